"""Corpus statistics and the authentic/synthetic training-mix builder."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import cycle, islice
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import alignment as _align
from .errors import ParseError, ValidationError
from .m2 import M2Record
from .text import Sentence

__all__ = ["CorpusStats", "stats_from_pairs", "stats_from_m2",
           "aggregate_stats", "MixSpec", "build_mix", "read_parallel_lines"]

logger = logging.getLogger(__name__)


@dataclass
class CorpusStats:
    """Sentence/word counts plus pooled alignment-edge counts.

    The error rate is nonmatch_edges / total_edges, which makes stats
    additive: merging two counts gives the stats of the concatenation.
    """

    sentences: int = 0
    words: int = 0
    nonmatch_edges: int = 0
    total_edges: int = 0
    per_subset: Optional[dict[str, "CorpusStats"]] = None

    @property
    def error_rate_defined(self) -> bool:
        return self.total_edges > 0

    @property
    def error_rate(self) -> float:
        return self.nonmatch_edges / self.total_edges if self.total_edges else 0.0

    def add_pair(self, src: Sentence, tgt: Sentence) -> None:
        self.sentences += 1
        self.words += len(src)
        alignment = _align.align(src, tgt)
        self.nonmatch_edges += alignment.cost
        self.total_edges += len(alignment.edges)

    def merge(self, other: "CorpusStats") -> None:
        self.sentences += other.sentences
        self.words += other.words
        self.nonmatch_edges += other.nonmatch_edges
        self.total_edges += other.total_edges

    def to_dict(self) -> dict:
        data = {
            "sentences": self.sentences,
            "words": self.words,
            "error_rate": self.error_rate,
            "error_rate_defined": self.error_rate_defined,
            "nonmatch_edges": self.nonmatch_edges,
            "total_edges": self.total_edges,
        }
        if self.per_subset is not None:
            data["per_subset"] = {name: sub.to_dict()
                                  for name, sub in self.per_subset.items()}
        return data


def stats_from_pairs(pairs: Iterable[tuple[Sentence, Sentence]]) -> CorpusStats:
    stats = CorpusStats()
    for src, tgt in pairs:
        stats.add_pair(src, tgt)
    return stats


def stats_from_m2(records: Iterable[M2Record],
                  annotator_id: int = 0) -> CorpusStats:
    """Stats of an annotated corpus: rate of source against one
    annotator's corrected side (lowest-id fallback when absent).
    """
    stats = CorpusStats()
    fallbacks = 0
    for record in records:
        chosen = annotator_id
        if chosen not in record.edits:
            chosen = min(record.edits)
            fallbacks += 1
        stats.add_pair(record.source, record.corrected(chosen))
    if fallbacks:
        logger.warning("%d records lack annotator %d; used the lowest id",
                       fallbacks, annotator_id)
    return stats


def aggregate_stats(subsets: dict[str, CorpusStats]) -> CorpusStats:
    """Total over named subsets, keeping the per-subset breakdown."""
    total = CorpusStats(per_subset=dict(subsets))
    for sub in subsets.values():
        total.merge(sub)
    return total


def stats_table(stats: CorpusStats) -> str:
    """Aligned text table: one row per subset plus the total."""
    rows: list[tuple[str, CorpusStats]] = []
    if stats.per_subset:
        rows.extend(stats.per_subset.items())
    rows.append(("Total", stats))

    def rate(s: CorpusStats) -> str:
        return f"{100.0 * s.error_rate:.1f} %" if s.error_rate_defined else "-"

    name_w = max(len("Subset"), max(len(name) for name, _ in rows))
    sent_w = max(len("Sent"), max(len(f"{s.sentences:,}") for _, s in rows))
    word_w = max(len("Word"), max(len(f"{s.words:,}") for _, s in rows))
    lines = [f"{'Subset':<{name_w}}  {'Sent':>{sent_w}}  {'Word':>{word_w}}  Error r."]
    for name, s in rows:
        lines.append(f"{name:<{name_w}}  {s.sentences:>{sent_w},}  "
                     f"{s.words:>{word_w},}  {rate(s)}")
    return "\n".join(lines)


def read_parallel_lines(path: str | Path) -> list[str]:
    """Read a tab-separated parallel file; every line must contain a tab."""
    lines: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if "\t" not in line:
                raise ParseError(
                    f"{path}:{line_no}: missing tab separator in parallel file")
            lines.append(line)
    return lines


@dataclass(frozen=True)
class MixSpec:
    """Recipe for one training mix.

    authentic_parts lists (path, oversample_factor); the ratio
    authentic:synthetic is enforced by resizing the side named by `fit`
    (truncating or cyclically repeating it).
    """

    authentic_parts: tuple[tuple[str, int], ...]
    synthetic_path: str
    ratio_authentic: int = 1
    ratio_synthetic: int = 2
    seed: int = 0
    fit: str = "authentic"

    def __post_init__(self) -> None:
        object.__setattr__(self, "authentic_parts",
                           tuple((str(p), int(f)) for p, f in self.authentic_parts))
        if not self.authentic_parts:
            raise ValidationError("at least one authentic part is required")
        for path, factor in self.authentic_parts:
            if factor < 1:
                raise ValidationError(
                    f"oversample factor {factor} for {path} must be >= 1")
        if self.ratio_authentic < 1 or self.ratio_synthetic < 1:
            raise ValidationError("ratio parts must be positive integers")
        if self.fit not in ("authentic", "synthetic"):
            raise ValidationError("fit must be 'authentic' or 'synthetic'")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed {self.seed} outside [0, 2**64)")


def _resize(lines: list[str], target: int) -> list[str]:
    if target == len(lines):
        return lines
    if target < len(lines):
        return lines[:target]
    return list(islice(cycle(lines), target))


def build_mix(spec: MixSpec, out_path: str | Path) -> dict:
    """Write the shuffled mix and return its line counts.

    The shuffle is a seeded permutation of the concatenated pools, so the
    output is a deterministic rearrangement of its inputs.  The whole mix
    is held in memory.
    """
    authentic: list[str] = []
    for path, factor in spec.authentic_parts:
        part = read_parallel_lines(path)
        for _ in range(factor):
            authentic.extend(part)
    if not authentic:
        raise ValidationError("authentic pool is empty")
    synthetic = read_parallel_lines(spec.synthetic_path)
    if not synthetic:
        raise ValidationError("synthetic pool is empty")

    if spec.fit == "authentic":
        target = _round_half_up(len(synthetic) * spec.ratio_authentic
                                / spec.ratio_synthetic)
        authentic = _resize(authentic, target)
        if not authentic:
            raise ValidationError(
                "ratio leaves no authentic lines; use fit='synthetic' or a "
                "larger synthetic pool")
    else:
        target = _round_half_up(len(authentic) * spec.ratio_synthetic
                                / spec.ratio_authentic)
        synthetic = _resize(synthetic, target)

    pool = authentic + synthetic
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    order = rng.permutation(len(pool))
    with open(out_path, "w", encoding="utf-8") as fh:
        for i in order:
            fh.write(pool[i])
            fh.write("\n")
    counts = {
        "authentic": len(authentic),
        "synthetic": len(synthetic),
        "total": len(pool),
    }
    logger.info("mixed %(authentic)d authentic + %(synthetic)d synthetic "
                "lines", counts)
    return counts


def _round_half_up(x: float) -> int:
    return int(x + 0.5)
