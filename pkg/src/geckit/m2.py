"""Reading and writing the M2 edit-annotation format.

A record is one "S <tokens>" line followed by "A <start> <end>|||<type>
|||<replacement>|||REQUIRED|||-NONE-|||<annotator>" lines; records are
separated by blank lines.  "-NONE-" as replacement means deletion, and
an annotator whose only line is the "noop" line proposes no edits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import alignment as _align
from .errors import ParseError, ValidationError
from .text import Sentence

__all__ = ["M2Record", "parse_m2", "parse_m2_file", "emit_m2", "emit_m2_text",
           "from_parallel", "NOOP_TYPE"]

NOOP_TYPE = "noop"
_NONE_FIELD = "-NONE-"
_REQUIRED_FIELD = "REQUIRED"


@dataclass(frozen=True)
class M2Record:
    """One source sentence with per-annotator edit sets."""

    source: Sentence
    edits: dict[int, tuple[_align.Edit, ...]]

    def __post_init__(self) -> None:
        if not self.edits:
            raise ValidationError("record needs at least one annotator")
        norm: dict[int, tuple[_align.Edit, ...]] = {}
        for annotator_id in sorted(self.edits):
            if annotator_id < 0:
                raise ValidationError(f"annotator id {annotator_id} must be >= 0")
            seq = tuple(self.edits[annotator_id])
            _align.check_edit_sequence(seq, len(self.source))
            for e in seq:
                if e.annotator_id != annotator_id:
                    raise ValidationError(
                        f"edit {e.key} carries annotator {e.annotator_id}, "
                        f"listed under {annotator_id}")
                if e.replacement == self.source.tokens[e.start:e.end]:
                    raise ValidationError(
                        f"annotator {annotator_id} edit [{e.start}, {e.end}) "
                        "replaces tokens with themselves")
            norm[annotator_id] = seq
        object.__setattr__(self, "edits", norm)

    @property
    def annotator_ids(self) -> tuple[int, ...]:
        return tuple(self.edits)

    def corrected(self, annotator_id: int) -> Sentence:
        """Source with one annotator's edits applied."""
        if annotator_id not in self.edits:
            raise ValidationError(f"record has no annotator {annotator_id}")
        return _align.apply_edits(self.source, self.edits[annotator_id])


def _parse_a_line(body: str, line_no: int, source_len: int):
    fields = body.split("|||")
    if len(fields) != 6:
        raise ParseError(
            f"line {line_no}: expected 6 '|||'-separated fields, got {len(fields)}")
    span = fields[0].split()
    if len(span) != 2:
        raise ParseError(f"line {line_no}: span must be two integers")
    try:
        start, end = int(span[0]), int(span[1])
    except ValueError:
        raise ParseError(f"line {line_no}: span {fields[0]!r} is not integral") from None
    error_type = fields[1]
    try:
        annotator_id = int(fields[5])
    except ValueError:
        raise ParseError(
            f"line {line_no}: annotator field {fields[5]!r} is not an integer") from None
    if error_type == NOOP_TYPE:
        if (start, end) != (-1, -1):
            raise ParseError(f"line {line_no}: noop edits must use span -1 -1")
        return annotator_id, None
    if start < 0 or end < start or end > source_len:
        raise ParseError(
            f"line {line_no}: span [{start}, {end}) outside source of "
            f"length {source_len}")
    replacement = () if fields[2] == _NONE_FIELD else tuple(fields[2].split())
    edit = _align.Edit(start, end, replacement, error_type, annotator_id)
    return annotator_id, edit


def parse_m2(lines: Iterable[str]) -> Iterator[M2Record]:
    """Parse M2 lines into records, streaming.

    Raises ParseError with a line number for malformed lines and
    ValidationError for records violating span or overlap rules.  A
    record without any A-line is the noop record of annotator 0.
    """
    source: Sentence | None = None
    source_line = 0
    edits: dict[int, list[_align.Edit]] = {}

    def build() -> M2Record:
        assert source is not None
        collected = edits or {0: []}
        try:
            return M2Record(source,
                            {aid: tuple(seq) for aid, seq in collected.items()})
        except ValidationError as exc:
            raise ValidationError(
                f"record starting at line {source_line}: {exc}") from exc

    line_no = 0
    for line_no, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if source is not None:
                yield build()
                source = None
                edits = {}
            continue
        if line == "S" or line.startswith("S "):
            if source is not None:
                raise ParseError(
                    f"line {line_no}: new source line before blank separator")
            source = Sentence.from_text(line[2:] if len(line) > 1 else "")
            source_line = line_no
        elif line.startswith("A "):
            if source is None:
                raise ParseError(f"line {line_no}: edit line before any source line")
            annotator_id, edit = _parse_a_line(line[2:], line_no, len(source))
            bucket = edits.setdefault(annotator_id, [])
            if edit is not None:
                bucket.append(edit)
        else:
            raise ParseError(
                f"line {line_no}: expected 'S ', 'A ' or a blank line")
    if source is not None:
        yield build()


def parse_m2_file(path) -> Iterator[M2Record]:
    with open(path, encoding="utf-8") as fh:
        yield from parse_m2(fh)


def _format_edit(edit: _align.Edit, annotator_id: int) -> str:
    rep = " ".join(edit.replacement) if edit.replacement else _NONE_FIELD
    if edit.replacement and rep == _NONE_FIELD:
        raise ValidationError(
            f"replacement {_NONE_FIELD!r} cannot be represented in M2")
    for part in (edit.error_type, rep):
        if "|||" in part:
            raise ValidationError(f"{part!r} contains the M2 field separator")
    return (f"A {edit.start} {edit.end}|||{edit.error_type}|||{rep}"
            f"|||{_REQUIRED_FIELD}|||{_NONE_FIELD}|||{annotator_id}")


def emit_m2(records: Iterable[M2Record]) -> Iterator[str]:
    """Yield canonical M2 lines (without newlines), one blank line after
    each record.  Unrepresentable records raise before any of their lines
    are emitted.
    """
    for record in records:
        lines = ["S " + record.source.text]
        for annotator_id in sorted(record.edits):
            seq = record.edits[annotator_id]
            if not seq:
                lines.append(f"A -1 -1|||{NOOP_TYPE}|||{_NONE_FIELD}"
                             f"|||{_REQUIRED_FIELD}|||{_NONE_FIELD}|||{annotator_id}")
            else:
                for edit in seq:
                    lines.append(_format_edit(edit, annotator_id))
        lines.append("")
        yield from lines


def emit_m2_text(records: Iterable[M2Record]) -> str:
    return "".join(line + "\n" for line in emit_m2(records))


def from_parallel(src: Sentence, tgt: Sentence, annotator_id: int = 0,
                  merge_swaps: bool = True, split_edits: bool = False,
                  max_gap: int = 2) -> M2Record:
    """Annotate a source/target pair as one M2 record.

    Identical sentences yield the noop record.  split_edits emits one
    edit per alignment edge and disables swap merging.
    """
    alignment = _align.align(src, tgt)
    edits = _align.extract_edits(alignment, annotator_id,
                                 merge_runs=not split_edits)
    if merge_swaps and not split_edits:
        edits = _align.merge_swaps(edits, src, max_gap=max_gap)
    return M2Record(src, {annotator_id: tuple(edits)})
