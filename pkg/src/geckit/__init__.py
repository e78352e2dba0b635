"""Corpus engineering toolkit for grammatical error correction.

Covers the data side of a GEC training setup: rule tokenization,
token-level edit alignment, the M2 annotation format, edit-overlap
scoring against multi-annotator references, deterministic synthetic
noising, corpus statistics and training-mix building.
"""

from .alignment import (DELETE, INSERT, MATCH, SUBSTITUTE, AlignEdge,
                        Alignment, Edit, align, apply_edits,
                        check_edit_sequence, corpus_error_rate, error_rate,
                        extract_edits, merge_swaps)
from .corpus import (CorpusStats, MixSpec, aggregate_stats, build_mix,
                     read_parallel_lines, stats_from_m2, stats_from_pairs,
                     stats_table)
from .errors import GecError, ParseError, ValidationError
from .m2 import (NOOP_TYPE, M2Record, emit_m2, emit_m2_text, from_parallel,
                 parse_m2, parse_m2_file)
from .noise import (ConfusionLexicon, NoiseConfig, corrupt_chars,
                    corrupt_sentence, corrupt_word, damerau_levenshtein,
                    propose_substitutions, record_rng, sample_error_prob,
                    synthesize_corpus, synthesize_corpus_parallel)
from .profiles import (CHAR_OPS, TOKEN_OPS, ErrorRate, LanguageProfile,
                       builtin_languages, builtin_profile, load_profile,
                       profile_from_dict, profile_to_dict, save_profile)
from .score import (ScoreReport, TypeRecall, f_beta, match_edits,
                    per_type_recall, score_corpus)
from .text import Sentence, detokenize, tokenize

__version__ = "0.1.0"

__all__ = [
    "DELETE", "INSERT", "MATCH", "SUBSTITUTE",
    "AlignEdge", "Alignment", "Edit", "align", "apply_edits",
    "check_edit_sequence", "corpus_error_rate", "error_rate",
    "extract_edits", "merge_swaps",
    "CorpusStats", "MixSpec", "aggregate_stats", "build_mix",
    "read_parallel_lines", "stats_from_m2", "stats_from_pairs", "stats_table",
    "GecError", "ParseError", "ValidationError",
    "NOOP_TYPE", "M2Record", "emit_m2", "emit_m2_text", "from_parallel",
    "parse_m2", "parse_m2_file",
    "ConfusionLexicon", "NoiseConfig", "corrupt_chars", "corrupt_sentence",
    "corrupt_word", "damerau_levenshtein", "propose_substitutions",
    "record_rng", "sample_error_prob", "synthesize_corpus",
    "synthesize_corpus_parallel",
    "CHAR_OPS", "TOKEN_OPS", "ErrorRate", "LanguageProfile",
    "builtin_languages", "builtin_profile", "load_profile",
    "profile_from_dict", "profile_to_dict", "save_profile",
    "ScoreReport", "TypeRecall", "f_beta", "match_edits", "per_type_recall",
    "score_corpus",
    "Sentence", "detokenize", "tokenize",
    "__version__",
]
