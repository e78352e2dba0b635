"""Token-level minimum-edit alignment and edit manipulation.

align() computes a Levenshtein alignment (match 0, substitute/insert/
delete 1) with a deterministic tie-break; extract_edits() collapses
non-match runs into span edits; merge_swaps() folds a moved word
(delete + identical insert over a short matched gap) into one edit;
apply_edits() replays edits; error_rate() is the non-match edge fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import ValidationError
from .text import Sentence, check_token

__all__ = [
    "MATCH", "SUBSTITUTE", "INSERT", "DELETE",
    "AlignEdge", "Alignment", "Edit",
    "align", "extract_edits", "merge_swaps", "apply_edits",
    "error_rate", "corpus_error_rate",
]

MATCH = "match"
SUBSTITUTE = "substitute"
INSERT = "insert"
DELETE = "delete"

DEFAULT_ERROR_TYPE = "unspec"


class AlignEdge(NamedTuple):
    kind: str
    src_index: Optional[int]  # None for insert
    tgt_index: Optional[int]  # None for delete


@dataclass(frozen=True)
class Alignment:
    """Monotone alignment between two sentences, as produced by align().

    Construction does not re-validate edge coverage (align() guarantees
    it); validate() checks the full contract for hand-built instances.
    """

    edges: tuple[AlignEdge, ...]
    src: Sentence
    tgt: Sentence

    @property
    def cost(self) -> int:
        return sum(1 for e in self.edges if e.kind != MATCH)

    def validate(self) -> None:
        want_src = 0
        want_tgt = 0
        for e in self.edges:
            if e.kind in (MATCH, SUBSTITUTE):
                if e.src_index != want_src or e.tgt_index != want_tgt:
                    raise ValidationError(f"edge {e} breaks index order")
                if (self.src.tokens[e.src_index] == self.tgt.tokens[e.tgt_index]) \
                        != (e.kind == MATCH):
                    raise ValidationError(f"edge {e} has wrong kind for its tokens")
                want_src += 1
                want_tgt += 1
            elif e.kind == DELETE:
                if e.src_index != want_src or e.tgt_index is not None:
                    raise ValidationError(f"edge {e} breaks index order")
                want_src += 1
            elif e.kind == INSERT:
                if e.tgt_index != want_tgt or e.src_index is not None:
                    raise ValidationError(f"edge {e} breaks index order")
                want_tgt += 1
            else:
                raise ValidationError(f"unknown edge kind {e.kind!r}")
        if want_src != len(self.src) or want_tgt != len(self.tgt):
            raise ValidationError("edges do not cover both sentences")


def align(src: Sentence, tgt: Sentence) -> Alignment:
    """Minimum-cost monotone alignment of two token sequences.

    Cost: match 0, substitute 1, insert 1, delete 1.  Among equal-cost
    alignments the backtrace prefers match > substitute > delete > insert
    at every cell, so the result is deterministic.
    """
    a = src.tokens
    b = tgt.tokens
    n = len(a)
    m = len(b)
    # Full cost table; sentences are short enough that O(n*m) ints are fine.
    dp = [list(range(m + 1))]
    for i in range(1, n + 1):
        prev = dp[-1]
        row = [i] * (m + 1)
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (ai != b[j - 1])
            up = prev[j] + 1
            if up < best:
                best = up
            left = row[j - 1] + 1
            if left < best:
                best = left
            row[j] = best
        dp.append(row)

    edges: list[AlignEdge] = []
    i, j = n, m
    while i > 0 or j > 0:
        cur = dp[i][j]
        if i > 0 and j > 0:
            if a[i - 1] == b[j - 1] and cur == dp[i - 1][j - 1]:
                edges.append(AlignEdge(MATCH, i - 1, j - 1))
                i -= 1
                j -= 1
                continue
            if a[i - 1] != b[j - 1] and cur == dp[i - 1][j - 1] + 1:
                edges.append(AlignEdge(SUBSTITUTE, i - 1, j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and cur == dp[i - 1][j] + 1:
            edges.append(AlignEdge(DELETE, i - 1, None))
            i -= 1
        else:
            edges.append(AlignEdge(INSERT, None, j - 1))
            j -= 1
    edges.reverse()
    return Alignment(tuple(edges), src, tgt)


@dataclass(frozen=True)
class Edit:
    """Replace source tokens [start, end) with `replacement`.

    start == end denotes a pure insertion before index start; an empty
    replacement denotes deletion.
    """

    start: int
    end: int
    replacement: tuple[str, ...]
    error_type: str = DEFAULT_ERROR_TYPE
    annotator_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if self.start < 0 or self.end < self.start:
            raise ValidationError(
                f"edit span [{self.start}, {self.end}) is malformed")
        if self.start == self.end and not self.replacement:
            raise ValidationError(
                f"edit at {self.start} neither removes nor inserts anything")
        if self.annotator_id < 0:
            raise ValidationError(f"annotator id {self.annotator_id} must be >= 0")
        if not self.error_type:
            raise ValidationError("error_type must be non-empty")
        for tok in self.replacement:
            check_token(tok)

    @property
    def key(self) -> tuple[int, int, tuple[str, ...]]:
        """Identity used for scoring: span plus replacement, type ignored."""
        return (self.start, self.end, self.replacement)


def extract_edits(alignment: Alignment, annotator_id: int = 0,
                  merge_runs: bool = True) -> tuple[Edit, ...]:
    """Turn an alignment into span edits.

    With merge_runs (default) each maximal run of non-match edges becomes
    one edit; otherwise every non-match edge becomes its own edit.
    """
    edits: list[Edit] = []
    tgt = alignment.tgt.tokens
    cursor = 0          # next source index
    run_start = -1      # -1: no open run
    run_rep: list[str] = []

    def flush() -> None:
        nonlocal run_start
        if run_start >= 0:
            edits.append(Edit(run_start, cursor, tuple(run_rep),
                              DEFAULT_ERROR_TYPE, annotator_id))
            run_start = -1
            run_rep.clear()

    for edge in alignment.edges:
        kind = edge.kind
        if kind == MATCH:
            flush()
            cursor += 1
        elif merge_runs:
            if run_start < 0:
                run_start = cursor
            if kind == SUBSTITUTE:
                run_rep.append(tgt[edge.tgt_index])
                cursor += 1
            elif kind == DELETE:
                cursor += 1
            else:  # INSERT
                run_rep.append(tgt[edge.tgt_index])
        else:
            if kind == SUBSTITUTE:
                edits.append(Edit(cursor, cursor + 1, (tgt[edge.tgt_index],),
                                  DEFAULT_ERROR_TYPE, annotator_id))
                cursor += 1
            elif kind == DELETE:
                edits.append(Edit(cursor, cursor + 1, (),
                                  DEFAULT_ERROR_TYPE, annotator_id))
                cursor += 1
            else:
                edits.append(Edit(cursor, cursor, (tgt[edge.tgt_index],),
                                  DEFAULT_ERROR_TYPE, annotator_id))
    flush()
    return tuple(edits)


def _try_merge_swap(first: Edit, second: Edit, src_tokens: tuple[str, ...],
                    max_gap: int) -> Optional[Edit]:
    if first.annotator_id != second.annotator_id:
        return None
    etype = first.error_type if first.error_type == second.error_type \
        else DEFAULT_ERROR_TYPE
    # word moved right: delete X ... insert X after <= max_gap matched tokens
    if not first.replacement and first.end > first.start \
            and second.start == second.end and second.replacement:
        moved = src_tokens[first.start:first.end]
        if second.replacement == moved:
            gap = second.start - first.end
            if 0 <= gap <= max_gap:
                rep = tuple(src_tokens[first.end:second.start]) + moved
                return Edit(first.start, second.start, rep, etype,
                            first.annotator_id)
    # word moved left: insert X ... delete X after <= max_gap matched tokens
    if first.start == first.end and first.replacement \
            and not second.replacement and second.end > second.start:
        moved = src_tokens[second.start:second.end]
        if first.replacement == moved:
            gap = second.start - first.start
            if 0 <= gap <= max_gap:
                rep = moved + tuple(src_tokens[first.start:second.start])
                return Edit(first.start, second.end, rep, etype,
                            first.annotator_id)
    return None


def merge_swaps(edits: Sequence[Edit], src: Sentence | Sequence[str],
                max_gap: int = 2) -> tuple[Edit, ...]:
    """Fold adjacent delete/insert pairs of an identical token sequence,
    separated by at most max_gap matched tokens, into one edit spanning
    the whole window.  Applying the result is equivalent to applying the
    original edits; the pass is idempotent.
    """
    src_tokens = src.tokens if isinstance(src, Sentence) else tuple(src)
    out: list[Edit] = []
    items = list(edits)
    i = 0
    while i < len(items):
        if i + 1 < len(items):
            merged = _try_merge_swap(items[i], items[i + 1], src_tokens, max_gap)
            if merged is not None:
                out.append(merged)
                i += 2
                continue
        out.append(items[i])
        i += 1
    return tuple(out)


def check_edit_sequence(edits: Sequence[Edit], source_len: int) -> None:
    """Require edits sorted by span, non-overlapping and inside the source."""
    prev: Optional[Edit] = None
    for pos, e in enumerate(edits):
        if e.end > source_len:
            raise ValidationError(
                f"edit #{pos} [{e.start}, {e.end}) exceeds source length {source_len}")
        if prev is not None:
            if (e.start, e.end) < (prev.start, prev.end):
                raise ValidationError(
                    f"edits #{pos - 1} and #{pos} are not sorted by span")
            if e.start < prev.end:
                raise ValidationError(
                    f"edits #{pos - 1} [{prev.start}, {prev.end}) and "
                    f"#{pos} [{e.start}, {e.end}) overlap")
        prev = e


def apply_edits(src: Sentence, edits: Sequence[Edit]) -> Sentence:
    """Apply non-overlapping sorted edits to a sentence.

    Spans are replaced right to left, which keeps indices valid and
    preserves the input order of insertions at the same index.
    """
    check_edit_sequence(edits, len(src))
    tokens = list(src.tokens)
    for e in reversed(edits):
        tokens[e.start:e.end] = e.replacement
    return Sentence(tuple(tokens))


def error_rate(src: Sentence, tgt: Sentence) -> float:
    """Fraction of non-match edges in the minimum alignment of src and tgt."""
    if len(src) == 0 and len(tgt) == 0:
        raise ValidationError("error rate is undefined for two empty sentences")
    alignment = align(src, tgt)
    return alignment.cost / len(alignment.edges)


def corpus_error_rate(pairs: Iterable[tuple[Sentence, Sentence]]) -> float:
    """Pooled error rate: summed non-match edges over summed edges.

    Pairs of two empty sentences contribute nothing; an all-empty corpus
    has no defined rate.
    """
    num = 0
    den = 0
    for src, tgt in pairs:
        alignment = align(src, tgt)
        num += alignment.cost
        den += len(alignment.edges)
    if den == 0:
        raise ValidationError("error rate is undefined for an empty corpus")
    return num / den
