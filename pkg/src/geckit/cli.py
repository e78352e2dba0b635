"""Command-line interface.

Subcommands: noise (synthetic corruption), extract (parallel file to M2),
score (corrected corpus against M2 references), stats (corpus figures),
mix (authentic/synthetic training mix).  Every output file gets a
<file>.manifest.json sidecar with the resolved configuration and input
digests; equal manifests imply byte-identical outputs.

Exit codes: 0 success, 1 data or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import Iterable, Iterator, Optional

from . import __version__
from .corpus import (CorpusStats, MixSpec, aggregate_stats, build_mix,
                     stats_from_m2, stats_from_pairs, stats_table)
from .errors import GecError, ParseError
from .m2 import emit_m2, from_parallel, parse_m2_file
from .noise import (ConfusionLexicon, NoiseConfig, synthesize_corpus_parallel)
from .profiles import (LanguageProfile, builtin_profile, load_profile,
                       profile_to_dict)
from .score import per_type_recall, score_corpus
from .text import Sentence, tokenize

logger = logging.getLogger(__name__)

PROFILE_DIR_ENV = "GECKIT_PROFILES"


class _HashingLineReader:
    """Iterate lines of a binary stream while accumulating their digest."""

    def __init__(self, fh, label: str):
        self._fh = fh
        self.label = label
        self._hash = hashlib.sha256()

    def __iter__(self):
        for line in self._fh:
            self._hash.update(line)
            yield line

    @property
    def hexdigest(self) -> str:
        return self._hash.hexdigest()


class _HashingWriter:
    """Write-through text wrapper that hashes the UTF-8 bytes written."""

    def __init__(self, fh):
        self._fh = fh
        self._hash = hashlib.sha256()
        self.lines = 0

    def write(self, text: str) -> None:
        self._hash.update(text.encode("utf-8"))
        self._fh.write(text)

    def write_line(self, text: str) -> None:
        self.write(text + "\n")
        self.lines += 1

    @property
    def hexdigest(self) -> str:
        return self._hash.hexdigest()


def _sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(out_path: str | Path, subcommand: str, config: dict,
                    inputs: dict[str, str], outputs: dict[str, str]) -> None:
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
    }
    path = str(out_path) + ".manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_profile(lang: Optional[str],
                     profile_path: Optional[str]) -> LanguageProfile:
    base = None
    if lang is not None:
        try:
            base = builtin_profile(lang)
        except GecError:
            base = None
    if profile_path is not None:
        return load_profile(profile_path, base=base)
    if lang is None:
        raise GecError("no language or profile given")
    profile_dir = os.environ.get(PROFILE_DIR_ENV)
    if profile_dir:
        candidate = Path(profile_dir) / f"{lang}.json"
        if candidate.is_file():
            return load_profile(candidate, base=base)
    if base is None:
        return builtin_profile(lang)  # raises with the known-language list
    return base


def _sentence_reader(path: str | Path, do_tokenize: bool) -> Iterator[Sentence]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            text = line.rstrip("\r\n")
            yield tokenize(text) if do_tokenize else Sentence.from_text(text)


def _pair_lines(path: str | Path) -> Iterator[tuple[int, str, str]]:
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(
                    f"{path}:{line_no}: expected exactly one tab separator")
            yield line_no, parts[0], parts[1]


# ---------------------------------------------------------------- noise

def cmd_noise(args: argparse.Namespace) -> int:
    parser = args.parser
    if args.lang is None and args.profile is None:
        parser.error("one of --lang or --profile is required")
    if args.out_tsv and (args.out_src or args.out_tgt):
        parser.error("--out-tsv conflicts with --out-src/--out-tgt")
    if (args.out_src is None) != (args.out_tgt is None):
        parser.error("--out-src and --out-tgt must be given together")

    profile = _resolve_profile(args.lang, args.profile)
    lexicon = None
    if args.lexicon or args.proposals:
        lexicon = ConfusionLexicon.from_files(args.lexicon, args.proposals,
                                              args.max_edit_distance)
    config = NoiseConfig(
        profile=profile,
        seed=args.seed,
        max_sentences=args.max_sentences,
        emit_order=args.emit_order,
        pretokenized=args.pretokenized,
        char_noise_all=not args.char_noise_corrupted_only,
        weighted_insert=args.weighted_insert,
    )

    if args.input in (None, "-"):
        reader = _HashingLineReader(sys.stdin.buffer, "<stdin>")
        close_me = None
    else:
        close_me = open(args.input, "rb")
        reader = _HashingLineReader(close_me, str(args.input))

    pairs = synthesize_corpus_parallel(reader, config, lexicon,
                                       threads=args.threads)
    noisy_first = config.emit_order == "noisy-clean"

    config_dict = {
        "seed": config.seed,
        "max_sentences": config.max_sentences,
        "emit_order": config.emit_order,
        "pretokenized": config.pretokenized,
        "char_noise_all": config.char_noise_all,
        "weighted_insert": config.weighted_insert,
        "max_edit_distance": args.max_edit_distance,
        "profile": profile_to_dict(profile),
    }

    try:
        if args.out_src:
            with open(args.out_src, "w", encoding="utf-8") as src_fh, \
                    open(args.out_tgt, "w", encoding="utf-8") as tgt_fh:
                src_w = _HashingWriter(src_fh)
                tgt_w = _HashingWriter(tgt_fh)
                for noisy, clean in pairs:
                    first, second = (noisy, clean) if noisy_first else (clean, noisy)
                    src_w.write_line(first)
                    tgt_w.write_line(second)
            inputs = _noise_inputs(args, reader)
            outputs = {str(args.out_src): src_w.hexdigest,
                       str(args.out_tgt): tgt_w.hexdigest}
            _write_manifest(args.out_src, "noise", config_dict, inputs, outputs)
            _write_manifest(args.out_tgt, "noise", config_dict, inputs, outputs)
            emitted = src_w.lines
        elif args.out_tsv:
            with open(args.out_tsv, "w", encoding="utf-8") as fh:
                writer = _HashingWriter(fh)
                for noisy, clean in pairs:
                    first, second = (noisy, clean) if noisy_first else (clean, noisy)
                    writer.write_line(f"{first}\t{second}")
            inputs = _noise_inputs(args, reader)
            _write_manifest(args.out_tsv, "noise", config_dict, inputs,
                            {str(args.out_tsv): writer.hexdigest})
            emitted = writer.lines
        else:
            emitted = 0
            for noisy, clean in pairs:
                first, second = (noisy, clean) if noisy_first else (clean, noisy)
                sys.stdout.write(f"{first}\t{second}\n")
                emitted += 1
    finally:
        if close_me is not None:
            close_me.close()
    logger.info("noised %d sentences", emitted)
    return 0


def _noise_inputs(args: argparse.Namespace,
                  reader: _HashingLineReader) -> dict[str, str]:
    inputs = {reader.label: reader.hexdigest}
    for path in (args.lexicon, args.proposals, args.profile):
        if path:
            inputs[str(path)] = _sha256_file(path)
    return inputs


# -------------------------------------------------------------- extract

def cmd_extract(args: argparse.Namespace) -> int:
    parser = args.parser
    if args.input and (args.src or args.tgt):
        parser.error("--input conflicts with --src/--tgt")
    if (args.src is None) != (args.tgt is None):
        parser.error("--src and --tgt must be given together")
    if not args.input and not args.src:
        parser.error("give --input TSV or --src/--tgt files")

    def records():
        if args.input:
            for _, left, right in _pair_lines(args.input):
                yield _to_sentence(left, args.tokenize), \
                    _to_sentence(right, args.tokenize)
        else:
            src_iter = _sentence_reader(args.src, args.tokenize)
            tgt_iter = _sentence_reader(args.tgt, args.tokenize)
            yield from _strict_zip(src_iter, tgt_iter, args.src, args.tgt)

    def m2_lines():
        for src, tgt in records():
            record = from_parallel(src, tgt, annotator_id=args.annotator,
                                   merge_swaps=args.merge_swaps,
                                   split_edits=args.split_edits,
                                   max_gap=args.max_gap)
            yield from emit_m2([record])

    config_dict = {
        "annotator": args.annotator,
        "merge_swaps": args.merge_swaps,
        "split_edits": args.split_edits,
        "max_gap": args.max_gap,
        "tokenize": args.tokenize,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            writer = _HashingWriter(fh)
            for line in m2_lines():
                writer.write_line(line)
        inputs = {str(p): _sha256_file(p)
                  for p in (args.input, args.src, args.tgt) if p}
        _write_manifest(args.out, "extract", config_dict, inputs,
                        {str(args.out): writer.hexdigest})
    else:
        for line in m2_lines():
            sys.stdout.write(line + "\n")
    return 0


def _to_sentence(text: str, do_tokenize: bool) -> Sentence:
    return tokenize(text) if do_tokenize else Sentence.from_text(text)


def _strict_zip(left: Iterable, right: Iterable, left_name, right_name):
    sentinel = object()
    from itertools import zip_longest
    for index, (a, b) in enumerate(zip_longest(left, right, fillvalue=sentinel)):
        if a is sentinel or b is sentinel:
            longer = right_name if a is sentinel else left_name
            raise GecError(
                f"{longer} has more lines than its counterpart "
                f"(difference starts at line {index + 1})")
        yield a, b


# ---------------------------------------------------------------- score

def cmd_score(args: argparse.Namespace) -> int:
    hyps = _sentence_reader(args.hyp, args.tokenize)
    records = parse_m2_file(args.gold)
    collect = args.per_type and args.annotator is None
    report = score_corpus(hyps, records, beta=args.beta, collect_types=collect)
    if args.per_type and args.annotator is not None:
        types = per_type_recall(_sentence_reader(args.hyp, args.tokenize),
                                parse_m2_file(args.gold),
                                annotator_id=args.annotator)
        report = dataclasses.replace(report, per_type=types)
    print(report.table())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2,
                      sort_keys=True)
            fh.write("\n")
        config_dict = {"beta": args.beta, "per_type": args.per_type,
                       "annotator": args.annotator, "tokenize": args.tokenize}
        inputs = {str(args.gold): _sha256_file(args.gold),
                  str(args.hyp): _sha256_file(args.hyp)}
        _write_manifest(args.json, "score", config_dict, inputs,
                        {str(args.json): _sha256_file(args.json)})
    return 0


# ---------------------------------------------------------------- stats

def cmd_stats(args: argparse.Namespace) -> int:
    parser = args.parser
    if (args.src is None) != (args.tgt is None):
        parser.error("--src and --tgt must be given together")
    if not args.m2 and not args.tsv and not args.src:
        parser.error("give --m2, --tsv or --src/--tgt inputs")

    subsets: dict[str, CorpusStats] = {}
    for path in args.m2 or ():
        subsets[str(path)] = stats_from_m2(parse_m2_file(path),
                                           annotator_id=args.annotator)
    for path in args.tsv or ():
        pairs = ((_to_sentence(left, args.tokenize),
                  _to_sentence(right, args.tokenize))
                 for _, left, right in _pair_lines(path))
        subsets[str(path)] = stats_from_pairs(pairs)
    if args.src:
        pairs = _strict_zip(_sentence_reader(args.src, args.tokenize),
                            _sentence_reader(args.tgt, args.tokenize),
                            args.src, args.tgt)
        subsets[str(args.src)] = stats_from_pairs(pairs)

    if len(subsets) == 1:
        stats = next(iter(subsets.values()))
    else:
        stats = aggregate_stats(subsets)
    print(stats_table(stats))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(stats.to_dict(), fh, ensure_ascii=False, indent=2,
                      sort_keys=True)
            fh.write("\n")
        inputs = {name: _sha256_file(name) for name in subsets}
        config_dict = {"annotator": args.annotator, "tokenize": args.tokenize}
        _write_manifest(args.json, "stats", config_dict, inputs,
                        {str(args.json): _sha256_file(args.json)})
    return 0


# ------------------------------------------------------------------ mix

def _parse_part(spec: str) -> tuple[str, int]:
    path, sep, factor = spec.rpartition(":")
    if sep and factor.isdigit():
        return path, int(factor)
    return spec, 1


def _parse_ratio(spec: str) -> tuple[int, int]:
    parts = spec.split(":")
    if len(parts) != 2 or not all(p.isdigit() and int(p) > 0 for p in parts):
        raise GecError(f"ratio {spec!r} must look like A:S with positive integers")
    return int(parts[0]), int(parts[1])


def cmd_mix(args: argparse.Namespace) -> int:
    ratio_a, ratio_s = _parse_ratio(args.ratio)
    parts = tuple(_parse_part(spec) for spec in args.authentic)
    mix = MixSpec(
        authentic_parts=parts,
        synthetic_path=str(args.synthetic),
        ratio_authentic=ratio_a,
        ratio_synthetic=ratio_s,
        seed=args.seed,
        fit=args.fit,
    )
    counts = build_mix(mix, args.out)
    inputs = {path: _sha256_file(path) for path, _ in parts}
    inputs[str(args.synthetic)] = _sha256_file(args.synthetic)
    config_dict = {
        "authentic_parts": [list(p) for p in parts],
        "ratio": f"{ratio_a}:{ratio_s}",
        "seed": args.seed,
        "fit": args.fit,
    }
    _write_manifest(args.out, "mix", config_dict, inputs,
                    {str(args.out): _sha256_file(args.out)})
    print(f"authentic {counts['authentic']}  synthetic {counts['synthetic']}  "
          f"total {counts['total']}")
    return 0


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geckit",
        description="Corpus engineering for grammatical error correction: "
                    "synthetic noising, M2 annotation, scoring, statistics "
                    "and training mixes.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("noise", help="inject synthetic errors into clean text")
    p.add_argument("--lang", help="built-in profile language (en, cs, de, ru)")
    p.add_argument("--profile", help="JSON profile overriding the built-in")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sentences", type=int, default=10_000_000)
    p.add_argument("--lexicon", help="vocabulary file: word[<TAB>frequency]")
    p.add_argument("--proposals",
                   help="substitution file: word<TAB>candidate...")
    p.add_argument("--max-edit-distance", type=int, default=2,
                   help="distance bound for lexicon fallback candidates")
    p.add_argument("--input", help="clean sentences, one per line (default stdin)")
    p.add_argument("--out-src", help="noisy-side output file")
    p.add_argument("--out-tgt", help="clean-side output file")
    p.add_argument("--out-tsv", help="tab-separated pair output file")
    p.add_argument("--emit-order", choices=["noisy-clean", "clean-noisy"],
                   default="noisy-clean")
    p.add_argument("--pretokenized", action="store_true",
                   help="input is already tokenized; split on whitespace only")
    p.add_argument("--char-noise-corrupted-only", action="store_true",
                   help="run the character pass only on word-corrupted sentences")
    p.add_argument("--weighted-insert", action="store_true",
                   help="draw inserted words by frequency instead of uniformly")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes; affects throughput, never output")
    p.set_defaults(func=cmd_noise, parser=p)

    p = sub.add_parser("extract", help="annotate parallel sentences as M2 edits")
    p.add_argument("--input", "-i", help="TSV with source<TAB>target per line")
    p.add_argument("--src", help="source-side file (with --tgt)")
    p.add_argument("--tgt", help="target-side file (with --src)")
    p.add_argument("--out", "-o", help="M2 output file (default stdout)")
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--merge-swaps", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="fold short-range word moves into single edits")
    p.add_argument("--max-gap", type=int, default=2,
                   help="largest matched-token gap a swap may cross")
    p.add_argument("--split-edits", action="store_true",
                   help="one edit per alignment edge (disables swap merging)")
    p.add_argument("--tokenize", action="store_true",
                   help="run the rule tokenizer instead of splitting on spaces")
    p.set_defaults(func=cmd_extract, parser=p)

    p = sub.add_parser("score", help="score corrected text against M2 references")
    p.add_argument("--gold", required=True, help="reference M2 file")
    p.add_argument("--hyp", required=True,
                   help="corrected sentences, one per line")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--per-type", action="store_true",
                   help="add a per-error-type recall section")
    p.add_argument("--annotator", type=int, default=None,
                   help="fixed annotator for per-type recall "
                        "(default: each sentence's selected annotator)")
    p.add_argument("--tokenize", action="store_true")
    p.add_argument("--json", help="write the JSON report here")
    p.set_defaults(func=cmd_score, parser=p)

    p = sub.add_parser("stats", help="sentence/word counts and error rate")
    p.add_argument("--m2", action="append", help="annotated M2 file (repeatable)")
    p.add_argument("--tsv", action="append",
                   help="parallel source<TAB>target file (repeatable)")
    p.add_argument("--src", help="source-side file (with --tgt)")
    p.add_argument("--tgt", help="target-side file (with --src)")
    p.add_argument("--annotator", type=int, default=0,
                   help="annotator whose corrections define the error rate")
    p.add_argument("--tokenize", action="store_true")
    p.add_argument("--json", help="write the JSON report here")
    p.set_defaults(func=cmd_stats, parser=p)

    p = sub.add_parser("mix", help="build a shuffled authentic/synthetic mix")
    p.add_argument("--authentic", action="append", required=True,
                   metavar="PATH[:FACTOR]",
                   help="authentic parallel file with oversampling factor")
    p.add_argument("--synthetic", required=True, help="synthetic parallel file")
    p.add_argument("--ratio", default="1:2", metavar="A:S",
                   help="authentic:synthetic line ratio")
    p.add_argument("--fit", choices=["authentic", "synthetic"],
                   default="authentic",
                   help="which pool is resized to honor the ratio")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", required=True, help="mixed output file")
    p.set_defaults(func=cmd_mix, parser=p)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except GecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
