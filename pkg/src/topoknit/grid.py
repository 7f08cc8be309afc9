"""Contact-neighborhood grid: allocation and population from stitch instructions.

An M x N stitch pattern owns a 2M x (N+1) grid of cells.  Each cell stores
the record of the CN created at that location as (ST, AV, MV):

* ST   -- stitch type executed at the location: None, "K" or "P".
* AV   -- actualization state: PCN, ACN, UACN or E.
* MV   -- [delta_i, delta_j] incremental movement of the CN away from its
          creation cell; components are None until a writer touches the cell.

Stitch (m, n) owns cells (2m, n), (2m+1, n) as its lower pair and
(2m, n+1), (2m+1, n+1) as its upper pair.  Writers mutate the lower pair,
actualize any moved CNs that terminate at the knitted location, then write
the upper pair.  After population the grid is frozen except for the
UACN -> ACN/PCN updates performed during yarn-path evaluation.
"""
from __future__ import annotations

from .pattern import Direction, StitchKind, StitchPattern, carry_direction

PCN = "PCN"
ACN = "ACN"
UACN = "UACN"
E_STATE = "E"

# A loop stretches at most 3 needles sideways or 3 rows up, so any CN that
# terminates at (i, j) originates within this window.
REACH_I = 6
REACH_J = 3


class PopulationConflict(Exception):
    def __init__(self, i: int, j: int, detail: str):
        super().__init__(f"no transition rule for cell ({i},{j}): {detail}")
        self.i = i
        self.j = j


class NoPositiveDeltaJBelow(Exception):
    def __init__(self, i: int, j: int):
        super().__init__(f"no pulled-up CN below ({i},{j}) in column {i}")
        self.i = i
        self.j = j


class TransferOutOfBounds(Exception):
    def __init__(self, i: int, j: int, delta_i: int):
        super().__init__(f"transfer at ({i},{j}) shifts outside the grid (delta_i={delta_i})")
        self.i = i
        self.j = j
        self.delta_i = delta_i


class CnCell:
    __slots__ = ("st", "av", "di", "dj")

    def __init__(self, st=None, av=E_STATE, di=None, dj=None):
        self.st = st
        self.av = av
        self.di = di
        self.dj = dj

    def mv(self):
        return [self.di, self.dj]

    def token(self) -> str:
        st = self.st if self.st is not None else "null"
        di = "null" if self.di is None else str(self.di)
        dj = "null" if self.dj is None else str(self.dj)
        return f"({st},{self.av},[{di},{dj}])"

    def __repr__(self) -> str:
        return f"CnCell{self.token()}"


class CnGrid:
    """The populated process-space data structure for one pattern."""

    __slots__ = ("width", "height", "cells", "pattern")

    def __init__(self, pattern: StitchPattern):
        self.pattern = pattern
        self.width = 2 * pattern.cols
        self.height = pattern.rows + 1
        self.cells = [[CnCell() for _ in range(self.width)] for _ in range(self.height)]

    @property
    def last_row(self) -> int:
        return self.height - 1

    def at(self, i: int, j: int) -> CnCell:
        return self.cells[j][i]

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.width and 0 <= j < self.height

    def dump(self) -> str:
        lines = []
        for j in range(self.height - 1, -1, -1):
            lines.append(" | ".join(cell.token() for cell in self.cells[j]))
        return "\n".join(lines) + "\n"


def allocate(p: StitchPattern) -> CnGrid:
    """Fresh grid: everything Empty except the cast-on PCNs in row 0."""
    g = CnGrid(p)
    for cell in g.cells[0]:
        cell.av = PCN
        cell.di = 0
        cell.dj = 0
    return g


def resolve_final(g: CnGrid, i: int, j: int) -> tuple[int, int, bool]:
    """Follow a CN's movement chain to its terminal cell.

    Returns (i', j', resolved).  ``resolved`` is False when the chain stalls
    on a cell that was never actualized (possible for truncated patterns and
    invalid inputs); such CNs are treated as not arriving anywhere.
    """
    cell = g.cells[j][i]
    if j == g.last_row:
        return i, j, True
    if cell.di is None or cell.dj is None:
        return i, j, False
    if cell.di:
        ii = i + cell.di
        if not 0 <= ii < g.width:
            return i, j, False
        i, jj = ii, j
    else:
        jj = j + cell.dj
    steps = 0
    while True:
        if not 0 <= jj < g.height:
            return i, j, False
        cur = g.cells[jj][i]
        if cur.st is not None:
            return i, jj, True
        if jj == g.last_row:
            return i, jj, True
        if not cur.dj or cur.dj < 0:
            return i, jj, False
        jj += cur.dj
        steps += 1
        if steps > g.height:
            return i, jj, False


def arrivals_at(g: CnGrid, i: int, j: int) -> list[tuple[int, int]]:
    """CN records whose movement chain terminates at (i, j), self included."""
    found = []
    for jj in range(max(0, j - REACH_J), j + 1):
        row = g.cells[jj]
        for ii in range(max(0, i - REACH_I), min(g.width, i + REACH_I + 1)):
            cell = row[ii]
            if cell.av == E_STATE:
                continue
            if not cell.di and not cell.dj:
                # stationary record terminates at its own cell
                if ii == i and jj == j:
                    found.append((ii, jj))
                continue
            fi, fj, ok = resolve_final(g, ii, jj)
            if ok and fi == i and fj == j:
                found.append((ii, jj))
    return found


def anchored_locally(g: CnGrid, i: int, j: int) -> bool:
    """True when a diagonal neighbor one row down holds an unmoved ACN."""
    if j == 0:
        return False
    row = g.cells[j - 1]
    for ii in (i - 1, i + 1):
        if 0 <= ii < g.width:
            cell = row[ii]
            if cell.av == ACN and cell.di == 0 and cell.dj == 0:
                return True
    return False


def _write_lower(g: CnGrid, i: int, j: int, kind: str) -> None:
    """Knit/Purl execution on one lower cell; transfers knit first too."""
    cell = g.cells[j][i]
    av = cell.av
    if av == E_STATE:
        cell.st = kind
    elif av == PCN:
        cell.st = kind
        if cell.di == 0 and cell.dj == 0:
            cell.av = ACN
        elif cell.dj:
            raise PopulationConflict(i, j, f"knit over vertically moved PCN {cell.token()}")
    elif av == UACN:
        cell.st = kind
        if anchored_locally(g, i, j):
            cell.av = ACN
    elif av == ACN:
        # already-actualized moved record: the CN that was created here was
        # transferred away and knitted at its destination before this stitch ran
        if not cell.di:
            raise PopulationConflict(i, j, f"knit over stationary ACN {cell.token()}")
        cell.st = kind
    else:
        raise PopulationConflict(i, j, f"unknown state {cell.token()}")


def _actualize_arrivals(g: CnGrid, i: int, j: int, arrived: list[tuple[int, int]]) -> None:
    for ii, jj in arrived:
        cell = g.cells[jj][ii]
        if cell.av == PCN:
            cell.av = ACN


def _write_upper(g: CnGrid, i: int, j: int, delta_i: int, lower_occupied: bool) -> None:
    cell = g.cells[j][i]
    if cell.di not in (None, 0):
        raise PopulationConflict(i, j, "horizontal CN shifts do not compose")
    cell.av = PCN if lower_occupied else UACN
    cell.di = delta_i
    cell.dj = 0


def write_knit_purl(g: CnGrid, i: int, j: int, kind: str) -> None:
    """Process one column of a Knit/Purl stitch: lower cell (i,j), upper (i,j+1)."""
    write_transfer(g, i, j, kind, 0)


def write_transfer(g: CnGrid, i: int, j: int, kind: str, delta_i: int) -> None:
    """Knit/Purl then shift the new head: upper cell carries MV [delta_i, 0]."""
    if delta_i and not 0 <= i + delta_i < g.width:
        raise TransferOutOfBounds(i, j, delta_i)
    _write_lower(g, i, j, kind)
    arrived = arrivals_at(g, i, j)
    _actualize_arrivals(g, i, j, arrived)
    lower = g.cells[j][i]
    occupied = (lower.av == ACN and not lower.di and not lower.dj) or any(
        (ii, jj) != (i, j) for ii, jj in arrived
    )
    _write_upper(g, i, j + 1, delta_i, occupied)


def _pull_lower(g: CnGrid, i: int, j: int) -> None:
    """Tuck/Miss shared lower-cell handling: pull the held CN up one row."""
    cell = g.cells[j][i]
    if cell.av == E_STATE:
        if cell.dj == -1:
            propagate_miss_column(g, i, j)
        # a never-instantiated Empty holds nothing to pull
        return
    if cell.av in (PCN, UACN, ACN):
        cell.dj = 1
        return
    raise PopulationConflict(i, j, f"unknown state {cell.token()}")


def write_tuck(g: CnGrid, i: int, j: int) -> None:
    _pull_lower(g, i, j)
    upper = g.cells[j + 1][i]
    if upper.di not in (None, 0):
        raise PopulationConflict(i, j + 1, "horizontal CN shifts do not compose")
    upper.av = UACN
    upper.di = 0
    upper.dj = 0


def write_miss(g: CnGrid, i: int, j: int) -> None:
    _pull_lower(g, i, j)
    upper = g.cells[j + 1][i]
    upper.av = E_STATE
    upper.di = 0
    upper.dj = -1


def propagate_miss_column(g: CnGrid, i: int, j: int) -> None:
    """Pulling above a Miss: bump the first pulled-up CN further down the column."""
    for jj in range(j - 1, -1, -1):
        cell = g.cells[jj][i]
        if cell.dj is not None and cell.dj >= 1:
            cell.dj += 1
            return
    raise NoPositiveDeltaJBelow(i, j)


def populate(g: CnGrid) -> CnGrid:
    """Apply every stitch instruction in knitting order to the fresh grid."""
    p = g.pattern
    for n in range(p.rows):
        columns = range(p.cols)
        if carry_direction(n) is Direction.RIGHT_TO_LEFT:
            columns = reversed(columns)
        for m in columns:
            stitch = p.at(m, n)
            kind = stitch.kind
            if kind is StitchKind.EMPTY:
                continue
            lo = 2 * m
            if kind in (StitchKind.KNIT, StitchKind.PURL):
                mark = "K" if kind is StitchKind.KNIT else "P"
                write_knit_purl(g, lo, n, mark)
                write_knit_purl(g, lo + 1, n, mark)
            elif kind is StitchKind.TRANSFER:
                delta_i = 2 * stitch.shift
                write_transfer(g, lo, n, "K", delta_i)
                write_transfer(g, lo + 1, n, "K", delta_i)
            elif kind is StitchKind.TUCK:
                write_tuck(g, lo, n)
                write_tuck(g, lo + 1, n)
            elif kind is StitchKind.MISS:
                write_miss(g, lo, n)
                write_miss(g, lo + 1, n)
            else:
                raise PopulationConflict(lo, n, f"unhandled stitch {stitch.token}")
    return g


def populated(p: StitchPattern) -> CnGrid:
    return populate(allocate(p))
