"""Seeded synthetic-error injection.

Every record gets its own generator (numpy Philox keyed by the 128-bit
value seed * 2**64 + record_index), so output depends only on the seed,
the record index and the input line, never on threading or chunking.

A sentence pass first samples a word error probability from a clipped
normal, corrupts that share of words (substitute from lexicon proposals,
insert a dictionary word, delete, swap with the right neighbour, recase),
then samples a character error probability and corrupts that share of
character positions (substitute, insert, delete, recase, or toggle
diacritics where the profile defines them).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .profiles import LanguageProfile
from .text import Sentence, tokenize

__all__ = [
    "NoiseConfig", "ConfusionLexicon", "record_rng", "sample_error_prob",
    "damerau_levenshtein", "propose_substitutions", "corrupt_word",
    "corrupt_chars", "corrupt_sentence", "synthesize_corpus",
]

logger = logging.getLogger(__name__)

# After this many infeasible draws an operation gives up and the word or
# character is left unchanged.
MAX_OP_ATTEMPTS = 10

_RECASE_MASK_ATTEMPTS = 100
_SKIP_LIMIT = 0.01          # abort when more than 1% of input lines are bad
_PROGRESS_EVERY = 1_000_000

MAX_SENTENCES_DEFAULT = 10_000_000

EMIT_ORDERS = ("noisy-clean", "clean-noisy")


def record_rng(seed: int, record_index: int) -> np.random.Generator:
    """Independent generator for one record.

    Philox is counter based: distinct keys give independent streams, so
    records can be processed in any order or in parallel.
    """
    if not 0 <= seed < 2 ** 64:
        raise ValidationError(f"seed {seed} outside [0, 2**64)")
    if not 0 <= record_index < 2 ** 64:
        raise ValidationError(f"record index {record_index} outside [0, 2**64)")
    return np.random.Generator(np.random.Philox(key=(seed << 64) | record_index))


def sample_error_prob(rng: np.random.Generator, mean: float, std: float) -> float:
    """One draw from a normal clipped to [0, 1]."""
    if not 0.0 <= mean <= 1.0:
        raise ValidationError(f"mean {mean} outside [0, 1]")
    if std < 0.0:
        raise ValidationError(f"std {std} must be >= 0")
    value = float(rng.normal(mean, std))
    return min(1.0, max(0.0, value))


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def _draw_op(rng: np.random.Generator, weights: dict[str, float]) -> str:
    u = float(rng.random())
    last = None
    for op, w in weights.items():
        if w <= 0.0:
            continue
        last = op
        u -= w
        if u < 0.0:
            return op
    return last


@dataclass(frozen=True)
class NoiseConfig:
    """Everything a corruption run depends on, besides the input itself."""

    profile: LanguageProfile
    seed: int = 0
    max_sentences: int = MAX_SENTENCES_DEFAULT
    emit_order: str = "noisy-clean"
    pretokenized: bool = False
    # apply the character pass to every sentence, or only to sentences
    # that already received a word-level corruption
    char_noise_all: bool = True
    # draw inserted words by corpus frequency instead of uniformly
    weighted_insert: bool = False

    def __post_init__(self) -> None:
        if self.max_sentences <= 0:
            raise ValidationError("max_sentences must be positive")
        if self.emit_order not in EMIT_ORDERS:
            raise ValidationError(
                f"emit_order must be one of {EMIT_ORDERS}, got {self.emit_order!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed {self.seed} outside [0, 2**64)")


def damerau_levenshtein(a: str, b: str) -> int:
    """Edit distance counting adjacent transpositions as one operation."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if not la:
        return lb
    if not lb:
        return la
    two_ago: list[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        row = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = a[i - 1] != b[j - 1]
            best = min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                best = min(best, two_ago[j - 2] + 1)
            row[j] = best
        two_ago, prev = prev, row
    return prev[lb]


class ConfusionLexicon:
    """Substitution proposals plus an insertion vocabulary.

    Explicit proposals win; otherwise candidates are vocabulary words
    within `max_edit_distance` (case-insensitive Damerau-Levenshtein),
    ordered by (distance, frequency descending, word).
    """

    def __init__(self,
                 vocabulary: Iterable[tuple[str, float]] | Iterable[str] = (),
                 proposals: Optional[dict[str, Sequence[str]]] = None,
                 max_edit_distance: int = 2):
        words: list[str] = []
        freqs: list[float] = []
        for entry in vocabulary:
            if isinstance(entry, str):
                word, freq = entry, 1.0
            else:
                word, freq = entry
            words.append(word)
            freqs.append(float(freq))
        self.words: tuple[str, ...] = tuple(words)
        self.frequencies: tuple[float, ...] = tuple(freqs)
        self.max_edit_distance = int(max_edit_distance)
        if self.max_edit_distance < 1:
            raise ValidationError("max_edit_distance must be >= 1")
        self.proposals: dict[str, tuple[str, ...]] = {}
        for key, cands in (proposals or {}).items():
            cands = tuple(cands)
            if key in cands:
                raise ValidationError(
                    f"proposal candidate equals its key {key!r}")
            self.proposals[key] = cands
        self._freq_by_word = dict(zip(self.words, self.frequencies))
        self._candidate_cache: dict[str, tuple[str, ...]] = {}
        self._cumulative: Optional[np.ndarray] = None

    # caches are derived state; keep them out of pickles sent to workers
    def __getstate__(self):
        state = self.__dict__.copy()
        state["_candidate_cache"] = {}
        state["_cumulative"] = None
        return state

    @classmethod
    def from_files(cls, vocabulary_path: Optional[str | Path] = None,
                   proposals_path: Optional[str | Path] = None,
                   max_edit_distance: int = 2) -> "ConfusionLexicon":
        """Load "word[<TAB>frequency]" vocabulary lines and
        "word<TAB>candidate..." proposal lines.
        """
        vocab: list[tuple[str, float]] = []
        if vocabulary_path is not None:
            with open(vocabulary_path, encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, 1):
                    line = line.rstrip("\n")
                    if not line.strip():
                        continue
                    parts = line.split("\t")
                    if len(parts) == 1:
                        vocab.append((parts[0], 1.0))
                    elif len(parts) == 2:
                        try:
                            vocab.append((parts[0], float(parts[1])))
                        except ValueError:
                            raise ParseError(
                                f"{vocabulary_path}:{line_no}: bad frequency "
                                f"{parts[1]!r}") from None
                    else:
                        raise ParseError(
                            f"{vocabulary_path}:{line_no}: expected "
                            "word[<TAB>frequency]")
        proposals: dict[str, Sequence[str]] = {}
        if proposals_path is not None:
            with open(proposals_path, encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, 1):
                    line = line.rstrip("\n")
                    if not line.strip():
                        continue
                    parts = line.split("\t")
                    proposals[parts[0]] = tuple(parts[1:])
        return cls(vocab, proposals, max_edit_distance)

    def candidates(self, word: str) -> tuple[str, ...]:
        """Substitution candidates for a word, never containing the word."""
        if word in self.proposals:
            return self.proposals[word]
        low = word.lower()
        cached = self._candidate_cache.get(low)
        if cached is not None:
            return cached
        maxd = self.max_edit_distance
        scored = []
        for cand, freq in zip(self.words, self.frequencies):
            cand_low = cand.lower()
            if abs(len(cand_low) - len(low)) > maxd or cand_low == low:
                continue
            d = damerau_levenshtein(cand_low, low)
            if d <= maxd:
                scored.append((d, -freq, cand))
        scored.sort()
        result = tuple(cand for _, _, cand in scored)
        if len(self._candidate_cache) > 100_000:
            self._candidate_cache.clear()
        self._candidate_cache[low] = result
        return result

    def random_word(self, rng: np.random.Generator,
                    weighted: bool = False) -> Optional[str]:
        """Draw a vocabulary word, uniformly or frequency-weighted."""
        if not self.words:
            return None
        if weighted:
            if self._cumulative is None:
                self._cumulative = np.cumsum(np.asarray(self.frequencies))
            total = float(self._cumulative[-1])
            if total > 0.0:
                u = float(rng.random()) * total
                idx = int(np.searchsorted(self._cumulative, u, side="right"))
                return self.words[min(idx, len(self.words) - 1)]
        return self.words[int(rng.integers(len(self.words)))]


def propose_substitutions(word: str, lexicon: Optional[ConfusionLexicon]) -> tuple[str, ...]:
    if lexicon is None:
        return ()
    return lexicon.candidates(word)


def _recase_word(rng: np.random.Generator, word: str) -> Optional[str]:
    # Either lowercase the whole word, or flip the case of individual
    # characters until at least one actually changed.
    if float(rng.random()) < 0.5:
        return word.lower()
    if not any(ch.swapcase() != ch for ch in word):
        return None
    for _ in range(_RECASE_MASK_ATTEMPTS):
        mask = rng.random(len(word)) < 0.5
        new = "".join(ch.swapcase() if flip else ch
                      for ch, flip in zip(word, mask))
        if new != word:
            return new
    return None


def corrupt_word(rng: np.random.Generator, tokens: list[str], index: int,
                 profile: LanguageProfile,
                 lexicon: Optional[ConfusionLexicon] = None,
                 weighted_insert: bool = False) -> Optional[str]:
    """Apply one token-level operation at `index`, mutating `tokens`.

    Returns the operation name, or None when every attempt drew an
    operation that is infeasible here (no substitution candidates, swap
    at the last token, caseless word, empty vocabulary).
    """
    for _ in range(MAX_OP_ATTEMPTS):
        op = _draw_op(rng, profile.token_ops)
        if op == "substitute":
            cands = propose_substitutions(tokens[index], lexicon)
            if not cands:
                continue
            tokens[index] = cands[int(rng.integers(len(cands)))]
            return op
        if op == "insert":
            word = lexicon.random_word(rng, weighted_insert) if lexicon else None
            if word is None:
                continue
            tokens.insert(index + 1, word)
            return op
        if op == "delete":
            del tokens[index]
            return op
        if op == "swap":
            if index + 1 >= len(tokens):
                continue
            tokens[index], tokens[index + 1] = tokens[index + 1], tokens[index]
            return op
        # recase
        new = _recase_word(rng, tokens[index])
        if new is None:
            continue
        tokens[index] = new
        return op
    return None


def _corrupt_char(rng: np.random.Generator, tokens: list[str], ti: int,
                  ci: int, profile: LanguageProfile) -> Optional[str]:
    for _ in range(MAX_OP_ATTEMPTS):
        op = _draw_op(rng, profile.char_ops)
        word = tokens[ti]
        ch = word[ci]
        if op == "substitute":
            pool = [c for c in profile.alphabet if c != ch]
            if not pool:
                continue
            tokens[ti] = word[:ci] + pool[int(rng.integers(len(pool)))] + word[ci + 1:]
            return op
        if op == "insert":
            if not profile.alphabet:
                continue
            new = profile.alphabet[int(rng.integers(len(profile.alphabet)))]
            tokens[ti] = word[:ci + 1] + new + word[ci + 1:]
            return op
        if op == "delete":
            new_word = word[:ci] + word[ci + 1:]
            if new_word:
                tokens[ti] = new_word
            else:
                del tokens[ti]
            return op
        if op == "recase":
            flipped = ch.swapcase()
            if flipped == ch:
                continue
            tokens[ti] = word[:ci] + flipped + word[ci + 1:]
            return op
        # toggle_diacritics: add a variant or strip back to the base
        options = profile.toggle_options(ch)
        if not options:
            continue
        tokens[ti] = word[:ci] + options[int(rng.integers(len(options)))] + word[ci + 1:]
        return op
    return None


def corrupt_chars(rng: np.random.Generator, tokens: list[str],
                  profile: LanguageProfile) -> list[str]:
    """Character pass over a token list, mutating it in place.

    Samples the share of character positions to corrupt, picks them
    uniformly without replacement and applies one operation each, right
    to left so indices stay valid.  Returns the applied operation names.
    """
    applied: list[str] = []
    p = sample_error_prob(rng, profile.char_err.mean, profile.char_err.std)
    lengths = [len(t) for t in tokens]
    total = sum(lengths)
    if total == 0:
        return applied
    count = min(_round_half_up(p * total), total)
    if count <= 0:
        return applied
    chosen = rng.permutation(total)[:count]
    starts: list[int] = []
    offset = 0
    for length in lengths:
        starts.append(offset)
        offset += length
    for flat in sorted((int(x) for x in chosen), reverse=True):
        ti = _token_of(starts, flat)
        op = _corrupt_char(rng, tokens, ti, flat - starts[ti], profile)
        if op is not None:
            applied.append(op)
    return applied


def _token_of(starts: list[int], flat: int) -> int:
    # binary search for the token containing flat character position
    lo, hi = 0, len(starts) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if starts[mid] <= flat:
            lo = mid
        else:
            hi = mid - 1
    return lo


def corrupt_sentence(sentence: Sentence, config: NoiseConfig,
                     lexicon: Optional[ConfusionLexicon],
                     record_index: int) -> Sentence:
    """Corrupt one sentence deterministically.

    The word pass runs before the character pass; word positions are
    processed in descending index order so earlier indices stay valid.
    """
    rng = record_rng(config.seed, record_index)
    profile = config.profile
    tokens = list(sentence.tokens)
    corrupted = 0
    if tokens:
        p = sample_error_prob(rng, profile.word_err.mean, profile.word_err.std)
        count = min(_round_half_up(p * len(tokens)), len(tokens))
        if count > 0:
            picked = sorted((int(i) for i in rng.permutation(len(tokens))[:count]),
                            reverse=True)
            for index in picked:
                if index >= len(tokens):
                    continue
                op = corrupt_word(rng, tokens, index, profile, lexicon,
                                  config.weighted_insert)
                if op is not None:
                    corrupted += 1
    if config.char_noise_all or corrupted:
        corrupt_chars(rng, tokens, profile)
    return Sentence(tuple(tokens))


def _decoded_lines(stream: Iterable[str | bytes]) -> Iterator[tuple[int, str]]:
    """Yield (line_index, text); skip undecodable lines, abort past 1%."""
    seen = 0
    skipped = 0
    for index, raw in enumerate(stream):
        seen += 1
        if isinstance(raw, bytes):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                skipped += 1
                logger.warning("skipping undecodable input line %d", index + 1)
                if seen >= 100 and skipped > _SKIP_LIMIT * seen:
                    raise ValidationError(
                        f"{skipped} of {seen} input lines are not valid UTF-8")
                continue
        else:
            text = raw
        if seen % _PROGRESS_EVERY == 0:
            logger.info("read %d input lines", seen)
        yield index, text.rstrip("\r\n")
    if skipped and skipped > _SKIP_LIMIT * seen:
        raise ValidationError(
            f"{skipped} of {seen} input lines are not valid UTF-8")
    if skipped:
        logger.warning("skipped %d of %d input lines", skipped, seen)


def _check_insert_feasible(config: NoiseConfig,
                           lexicon: Optional[ConfusionLexicon]) -> None:
    if config.profile.token_ops["insert"] > 0.0 and (
            lexicon is None or not lexicon.words):
        raise ValidationError(
            "profile has insert weight > 0 but the lexicon vocabulary is "
            "empty; provide a vocabulary or zero the insert weight")


def _clean_sentence(text: str, config: NoiseConfig) -> Sentence:
    if config.pretokenized:
        return Sentence.from_text(text)
    return tokenize(text, config.profile)


def synthesize_corpus(clean_stream: Iterable[str | bytes], config: NoiseConfig,
                      lexicon: Optional[ConfusionLexicon] = None,
                      start_index: int = 0) -> Iterator[tuple[str, str]]:
    """Yield up to config.max_sentences (noisy, clean) text pairs.

    The record index is the input line number plus start_index, so a
    sharded run reproduces the unsharded output.
    """
    _check_insert_feasible(config, lexicon)
    lines = islice(_decoded_lines(clean_stream), config.max_sentences)
    for index, text in lines:
        clean = _clean_sentence(text, config)
        noisy = corrupt_sentence(clean, config, lexicon, start_index + index)
        yield noisy.text, clean.text


# -- process-pool variant; workers recompute each record from its index --

_WORKER_STATE: dict = {}


def _init_worker(config: NoiseConfig, lexicon: Optional[ConfusionLexicon],
                 start_index: int) -> None:
    _WORKER_STATE["config"] = config
    _WORKER_STATE["lexicon"] = lexicon
    _WORKER_STATE["start"] = start_index


def _noise_chunk(chunk: list[tuple[int, str]]) -> list[tuple[str, str]]:
    config = _WORKER_STATE["config"]
    lexicon = _WORKER_STATE["lexicon"]
    start = _WORKER_STATE["start"]
    out = []
    for index, text in chunk:
        clean = _clean_sentence(text, config)
        noisy = corrupt_sentence(clean, config, lexicon, start + index)
        out.append((noisy.text, clean.text))
    return out


def synthesize_corpus_parallel(clean_stream: Iterable[str | bytes],
                               config: NoiseConfig,
                               lexicon: Optional[ConfusionLexicon] = None,
                               start_index: int = 0, threads: int = 1,
                               chunk_size: int = 512) -> Iterator[tuple[str, str]]:
    """Same contract and byte-identical output as synthesize_corpus;
    `threads` only changes throughput.
    """
    if threads <= 1:
        yield from synthesize_corpus(clean_stream, config, lexicon, start_index)
        return
    import multiprocessing

    _check_insert_feasible(config, lexicon)
    lines = islice(_decoded_lines(clean_stream), config.max_sentences)

    def chunks() -> Iterator[list[tuple[int, str]]]:
        while True:
            chunk = list(islice(lines, chunk_size))
            if not chunk:
                return
            yield chunk

    with multiprocessing.Pool(processes=threads, initializer=_init_worker,
                              initargs=(config, lexicon, start_index)) as pool:
        for result in pool.imap(_noise_chunk, chunks()):
            yield from result
