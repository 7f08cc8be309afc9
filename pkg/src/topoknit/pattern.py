"""Stitch instruction vocabulary, pattern files and validity rules.

A stitch pattern is an M x N grid of instructions addressed as (m, n) with
n = 0 the first-knitted (bottom) row.  Pattern files list rows top-down so
a file reads like a chart; the parser reverses the line order.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum


class StitchKind(Enum):
    KNIT = "K"
    PURL = "P"
    TUCK = "T"
    MISS = "M"
    EMPTY = "E"
    TRANSFER = "X"


@dataclass(frozen=True)
class Stitch:
    """One instruction cell.

    ``shift`` is the signed needle displacement of the head loop and is
    nonzero exactly for Transfer stitches (range -3..-1, 1..3).
    """

    kind: StitchKind
    shift: int = 0

    def __post_init__(self) -> None:
        if self.kind is StitchKind.TRANSFER:
            if self.shift == 0 or abs(self.shift) > 3:
                raise ValueError(f"transfer shift must be in +-1..3, got {self.shift}")
        elif self.shift != 0:
            raise ValueError(f"{self.kind.name} carries no shift")

    @property
    def token(self) -> str:
        if self.kind is StitchKind.TRANSFER:
            side = "R" if self.shift > 0 else "L"
            return f"T{side}{abs(self.shift)}"
        return self.kind.value


KNIT = Stitch(StitchKind.KNIT)
PURL = Stitch(StitchKind.PURL)
TUCK = Stitch(StitchKind.TUCK)
MISS = Stitch(StitchKind.MISS)
EMPTY = Stitch(StitchKind.EMPTY)

_TOKENS = {
    "K": KNIT,
    "P": PURL,
    "T": TUCK,
    "M": MISS,
    "E": EMPTY,
}
for _mag in (1, 2, 3):
    _TOKENS[f"TL{_mag}"] = Stitch(StitchKind.TRANSFER, -_mag)
    _TOKENS[f"TR{_mag}"] = Stitch(StitchKind.TRANSFER, _mag)


class PatternError(Exception):
    """Raised when a pattern file cannot be parsed."""


class EmptyFile(PatternError):
    pass


class UnknownToken(PatternError):
    def __init__(self, token: str, line: int, col: int):
        super().__init__(f"unknown stitch token {token!r} at line {line}, column {col}")
        self.token = token
        self.line = line
        self.col = col


class RaggedRows(PatternError):
    def __init__(self, expected: int, got: int, line: int):
        super().__init__(f"line {line} has {got} tokens, expected {expected}")
        self.expected = expected
        self.got = got
        self.line = line


class Direction(Enum):
    LEFT_TO_RIGHT = "LeftToRight"
    RIGHT_TO_LEFT = "RightToLeft"


def carry_direction(n: int) -> Direction:
    """Yarn carry direction of stitch row ``n``: left-to-right iff even."""
    if n < 0:
        raise IndexError(f"stitch row {n} out of range")
    return Direction.LEFT_TO_RIGHT if n % 2 == 0 else Direction.RIGHT_TO_LEFT


@dataclass(frozen=True)
class StitchPattern:
    """Validated-shape M x N grid of stitch instructions, row 0 at the bottom."""

    cols: int
    rows: int
    cells: tuple[Stitch, ...]

    def __post_init__(self) -> None:
        if self.cols < 1 or self.rows < 1:
            raise ValueError("pattern dimensions must be at least 1x1")
        if len(self.cells) != self.cols * self.rows:
            raise ValueError("cell count does not match dimensions")

    def at(self, m: int, n: int) -> Stitch:
        if not (0 <= m < self.cols and 0 <= n < self.rows):
            raise IndexError(f"stitch ({m}, {n}) outside {self.cols}x{self.rows} grid")
        return self.cells[n * self.cols + m]

    def serialize(self) -> str:
        lines = []
        for n in range(self.rows - 1, -1, -1):
            lines.append(" ".join(self.at(m, n).token for m in range(self.cols)))
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()[:16]


def parse_pattern(text: str) -> StitchPattern:
    """Parse pattern-file text; line 1 is the top (last-knitted) stitch row."""
    rows: list[list[Stitch]] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise RaggedRows(width, len(tokens), lineno)
        row = []
        for col, tok in enumerate(tokens, start=1):
            stitch = _TOKENS.get(tok)
            if stitch is None:
                raise UnknownToken(tok, lineno, col)
            row.append(stitch)
        rows.append(row)
    if not rows or width is None:
        raise EmptyFile("pattern file contains no stitch rows")
    rows.reverse()
    cells = tuple(st for row in rows for st in row)
    return StitchPattern(cols=width, rows=len(rows), cells=cells)


@dataclass(frozen=True)
class Violation:
    rule: str
    m: int
    n: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "pattern is valid"
        return "\n".join(f"{v.rule} at ({v.m},{v.n}): {v.message}" for v in self.violations)


def _is_boundary(p: StitchPattern, m: int, n: int) -> bool:
    return m == 0 or m == p.cols - 1 or n == 0 or n == p.rows - 1


def _has_adjacent_empty(p: StitchPattern, m: int, n: int) -> bool:
    for dm, dn in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        mm, nn = m + dm, n + dn
        if 0 <= mm < p.cols and 0 <= nn < p.rows:
            if p.at(mm, nn).kind is StitchKind.EMPTY:
                return True
    return False


def validate(p: StitchPattern) -> ValidationReport:
    """Check the structural-soundness rules; violations are data, not errors.

    R1: boundary cells must be Knit or Purl.  Empty boundary cells are the
        outside of the fabric and pass; a boundary Transfer passes only when
        it sits next to an Empty cell (the increase/decrease edge idiom).
    R2: an Empty cell must not be surrounded on all four sides by non-Empty
        cells (Empty marks fabric outside, not holes).
    R3: a Transfer head must land inside the grid and not on an Empty cell,
        except when the cell above the target is knitted (widening idiom).
    """
    violations: list[Violation] = []
    for n in range(p.rows):
        for m in range(p.cols):
            st = p.at(m, n)
            kind = st.kind
            if _is_boundary(p, m, n):
                if kind in (StitchKind.TUCK, StitchKind.MISS):
                    violations.append(
                        Violation("R1", m, n, f"{kind.name.lower()} stitch on the pattern boundary")
                    )
                elif kind is StitchKind.TRANSFER and not _has_adjacent_empty(p, m, n):
                    violations.append(
                        Violation("R1", m, n, "transfer on the boundary without an Empty neighbor")
                    )
            if kind is StitchKind.EMPTY:
                if not _is_boundary(p, m, n):
                    neighbors = [p.at(m - 1, n), p.at(m + 1, n), p.at(m, n - 1), p.at(m, n + 1)]
                    if all(s.kind is not StitchKind.EMPTY for s in neighbors):
                        violations.append(
                            Violation("R2", m, n, "Empty cell surrounded by non-Empty stitches")
                        )
            if kind is StitchKind.TRANSFER:
                target = m + st.shift
                if not (0 <= target < p.cols):
                    violations.append(
                        Violation("R3", m, n, f"transfer head lands outside the pattern at column {target}")
                    )
                elif p.at(target, n).kind is StitchKind.EMPTY:
                    widened = n + 1 < p.rows and p.at(target, n + 1).kind is not StitchKind.EMPTY
                    if not widened:
                        violations.append(
                            Violation("R3", m, n, f"transfer head lands on an Empty stitch at column {target}")
                        )
    return ValidationReport(tuple(violations))
