"""Edit-overlap evaluation against multi-annotator references.

Hypothesis edits are extracted from (source, hypothesis) pairs with the
same aligner used for annotation; edits match on span plus replacement,
ignoring the error type.  For every sentence the annotator that
maximizes the running F_beta is chosen, ties going to the lower id.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import zip_longest
from typing import Iterable, NamedTuple, Optional, Sequence

from .alignment import Edit, check_edit_sequence
from .errors import ValidationError
from .m2 import M2Record, from_parallel
from .text import Sentence

__all__ = ["TypeRecall", "ScoreReport", "f_beta", "match_edits",
           "score_corpus", "per_type_recall"]

logger = logging.getLogger(__name__)

UNTYPED = "unspec"


class TypeRecall(NamedTuple):
    matched: int
    total: int
    recall: float


def f_beta(precision: float, recall: float, beta: float = 0.5) -> float:
    """Weighted harmonic mean of precision and recall; 0 when both are 0."""
    if not 0.0 <= precision <= 1.0:
        raise ValidationError(f"precision {precision} outside [0, 1]")
    if not 0.0 <= recall <= 1.0:
        raise ValidationError(f"recall {recall} outside [0, 1]")
    if beta <= 0.0:
        raise ValidationError(f"beta {beta} must be positive")
    if precision == 0.0 and recall == 0.0:
        return 0.0
    b2 = beta * beta
    return (1.0 + b2) * precision * recall / (b2 * precision + recall)


def _precision(tp: int, fp: int) -> float:
    return tp / (tp + fp) if tp + fp else 1.0


def _recall(tp: int, fn: int) -> float:
    return tp / (tp + fn) if tp + fn else 1.0


def _f_from_counts(tp: int, fp: int, fn: int, beta: float) -> float:
    return f_beta(_precision(tp, fp), _recall(tp, fn), beta)


def match_edits(hyp: Sequence[Edit], gold: Sequence[Edit]) -> tuple[int, int, int]:
    """Count (tp, fp, fn) between two edit sets of one sentence.

    Both sequences must be sorted and non-overlapping; matching compares
    (start, end, replacement) only.
    """
    check_edit_sequence(hyp, _max_end(hyp))
    check_edit_sequence(gold, _max_end(gold))
    hyp_keys = Counter(e.key for e in hyp)
    gold_keys = Counter(e.key for e in gold)
    tp = sum((hyp_keys & gold_keys).values())
    return tp, len(hyp) - tp, len(gold) - tp


def _max_end(edits: Sequence[Edit]) -> int:
    # Callers without the source sentence only need overlap/order checks.
    return max((e.end for e in edits), default=0)


@dataclass(frozen=True)
class ScoreReport:
    """Corpus-level counts with derived precision/recall/F."""

    tp: int
    fp: int
    fn: int
    beta: float
    per_type: Optional[dict[str, TypeRecall]] = None

    @property
    def precision(self) -> float:
        return _precision(self.tp, self.fp)

    @property
    def recall(self) -> float:
        return _recall(self.tp, self.fn)

    @property
    def f(self) -> float:
        return f_beta(self.precision, self.recall, self.beta)

    def to_dict(self) -> dict:
        data = {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f_beta": self.f,
            "beta": self.beta,
        }
        if self.per_type is not None:
            data["per_type"] = {
                t: {"matched": r.matched, "total": r.total, "recall": r.recall}
                for t, r in sorted(self.per_type.items())
            }
        return data

    def table(self) -> str:
        rows = [
            ("TP", str(self.tp)),
            ("FP", str(self.fp)),
            ("FN", str(self.fn)),
            ("Precision", f"{self.precision:.4f}"),
            ("Recall", f"{self.recall:.4f}"),
            (f"F{self.beta:g}", f"{self.f:.4f}"),
        ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{name:<{width}}  {value}" for name, value in rows]
        if self.per_type:
            lines.append("")
            lines.append(_type_table(self.per_type))
        return "\n".join(lines)


def _type_table(per_type: dict[str, TypeRecall]) -> str:
    name_w = max(len("Type"), max(len(t) for t in per_type))
    lines = [f"{'Type':<{name_w}}  {'Match':>6}  {'Total':>6}  Recall"]
    for t in sorted(per_type):
        r = per_type[t]
        lines.append(f"{t:<{name_w}}  {r.matched:>6}  {r.total:>6}  {r.recall:.4f}")
    return "\n".join(lines)


def _hyp_edits(source: Sentence, hyp: Sentence) -> tuple[Edit, ...]:
    record = from_parallel(source, hyp, annotator_id=0, merge_swaps=True)
    return record.edits[0]


def _paired(hyp_corpus, records) -> Iterable[tuple[int, Sentence, M2Record]]:
    sentinel = object()
    for index, (hyp, record) in enumerate(
            zip_longest(hyp_corpus, records, fillvalue=sentinel)):
        if hyp is sentinel:
            raise ValidationError(
                f"hypothesis corpus ended at sentence {index} but the gold "
                "corpus continues")
        if record is sentinel:
            raise ValidationError(
                f"gold corpus ended at sentence {index} but the hypothesis "
                "corpus continues")
        yield index, hyp, record


def score_corpus(hyp_corpus: Iterable[Sentence], records: Iterable[M2Record],
                 beta: float = 0.5, collect_types: bool = False) -> ScoreReport:
    """Score a corrected corpus against multi-annotator references.

    Annotator choice is cumulative: per sentence, the annotator whose
    counts maximize the F over the totals accumulated so far wins, ties
    to the lower id.  With collect_types, per-type recall is tallied
    against each sentence's selected annotator.
    """
    f_beta(1.0, 1.0, beta)  # validate beta up front
    tp = fp = fn = 0
    counts: dict[str, list[int]] = {}
    for _, hyp, record in _paired(hyp_corpus, records):
        hyp_edits = _hyp_edits(record.source, hyp)
        best = None
        for annotator_id in sorted(record.edits):
            gold = record.edits[annotator_id]
            t, f, n = match_edits(hyp_edits, gold)
            score = _f_from_counts(tp + t, fp + f, fn + n, beta)
            if best is None or score > best[0]:
                best = (score, annotator_id, t, f, n, gold)
        _, _, t, f, n, gold = best
        tp += t
        fp += f
        fn += n
        if collect_types:
            _tally_types(counts, hyp_edits, gold)
    per_type = _finish_types(counts) if collect_types else None
    return ScoreReport(tp=tp, fp=fp, fn=fn, beta=beta, per_type=per_type)


def _tally_types(counts: dict[str, list[int]], hyp_edits: Sequence[Edit],
                 gold: Sequence[Edit]) -> None:
    available = Counter(e.key for e in hyp_edits)
    for e in gold:
        bucket = counts.setdefault(e.error_type or UNTYPED, [0, 0])
        bucket[1] += 1
        if available[e.key] > 0:
            available[e.key] -= 1
            bucket[0] += 1


def _finish_types(counts: dict[str, list[int]]) -> dict[str, TypeRecall]:
    return {t: TypeRecall(m, tot, m / tot) for t, (m, tot) in counts.items()}


def per_type_recall(hyp_corpus: Iterable[Sentence],
                    records: Iterable[M2Record],
                    annotator_id: int = 0) -> dict[str, TypeRecall]:
    """Recall per error type against one fixed annotator.

    Records lacking that annotator are skipped; the skip count is logged.
    """
    counts: dict[str, list[int]] = {}
    skipped = 0
    for _, hyp, record in _paired(hyp_corpus, records):
        if annotator_id not in record.edits:
            skipped += 1
            continue
        hyp_edits = _hyp_edits(record.source, hyp)
        _tally_types(counts, hyp_edits, record.edits[annotator_id])
    if skipped:
        logger.warning("per-type recall skipped %d records lacking annotator %d",
                       skipped, annotator_id)
    return _finish_types(counts)
