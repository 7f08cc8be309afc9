"""Yarn-path evaluation over a populated CN grid.

The single yarn visits the grid in a square-wave order per stitch row: two
leg cells at the row's own height bracket two head cells one row up, then
the wave climbs at the fabric edge.  Each visited CN is admitted to the
yarn path when it carries a real yarn crossing; unanchored CNs are probed
against their neighbor contact along the yarn and promoted in place when
the neighbor sits below their terminal row.
"""
from __future__ import annotations

from typing import NamedTuple

from .grid import ACN, E_STATE, PCN, REACH_I, REACH_J, UACN, CnGrid, resolve_final


class EvaluationDiverged(Exception):
    def __init__(self, i: int, j: int):
        super().__init__(f"yarn evaluation diverged near CN ({i},{j})")
        self.i = i
        self.j = j


class YarnPathEntry(NamedTuple):
    i: int
    j: int
    stitch_row: int


class WaveCursor(NamedTuple):
    i: int
    j: int
    leg_node: bool
    stitch_row: int


def square_wave(i: int, j: int, leg_node: bool) -> tuple[int, int]:
    """Next CN location inside a stitch row (border climbs excluded)."""
    row = j if leg_node else j - 1
    if row % 2 == 0:  # yarn carried left to right
        if leg_node:
            return (i, j + 1) if i % 2 == 0 else (i + 1, j)
        return (i + 1, j) if i % 2 == 0 else (i, j - 1)
    if leg_node:
        return (i, j + 1) if i % 2 == 1 else (i - 1, j)
    return (i - 1, j) if i % 2 == 1 else (i, j - 1)


def border_cn(i: int, j: int, leg_node: bool, width: int) -> bool:
    """Trailing leg of a stitch row, where the yarn loops up to the next row."""
    if not leg_node:
        return False
    return i == width - 1 if j % 2 == 0 else i == 0


def next_cn(cursor: WaveCursor, width: int) -> WaveCursor:
    i, j, leg_node, row = cursor
    if border_cn(i, j, leg_node, width):
        return WaveCursor(i, j + 1, True, row + 1)
    ni, nj = square_wave(i, j, leg_node)
    return WaveCursor(ni, nj, nj == row, row)


def final_location(g: CnGrid, i: int, j: int) -> tuple[int, int]:
    """Terminal cell of the CN created at (i, j); last-row CNs do not move."""
    fi, fj, _ = resolve_final(g, i, j)
    return fi, fj


def build_final_index(g: CnGrid) -> dict[tuple[int, int], list[tuple[int, int]]]:
    """Reverse map terminal location -> CN records, for linear-time sweeps."""
    index: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for j in range(g.height):
        row = g.cells[j]
        for i in range(g.width):
            cell = row[i]
            if cell.av == E_STATE:
                continue
            if not cell.di and not cell.dj:
                if cell.st is None and j != g.last_row:
                    continue
                index.setdefault((i, j), []).append((i, j))
                continue
            fi, fj, ok = resolve_final(g, i, j)
            if ok:
                index.setdefault((fi, fj), []).append((i, j))
    return index


def acns_at(g: CnGrid, i: int, j: int, index=None) -> list[tuple[int, int]]:
    """All actualized CNs whose terminal location is (i, j).

    Physical stretch limits bound the search to a 13 x 4 window, so the
    query costs a constant number of chain walks.
    """
    if index is not None:
        return [loc for loc in index.get((i, j), ()) if g.cells[loc[1]][loc[0]].av == ACN]
    found = []
    for jj in range(max(0, j - REACH_J), j + 1):
        row = g.cells[jj]
        for ii in range(max(0, i - REACH_I), min(g.width, i + REACH_I + 1)):
            cell = row[ii]
            if cell.av != ACN:
                continue
            if not cell.di and not cell.dj:
                if ii == i and jj == j:
                    found.append((ii, jj))
                continue
            fi, fj, ok = resolve_final(g, ii, jj)
            if ok and fi == i and fj == j:
                found.append((ii, jj))
    return found


def _has_foreign_arrival(g: CnGrid, i: int, j: int, index) -> bool:
    if index is not None:
        return any(loc != (i, j) for loc in index.get((i, j), ()))
    for jj in range(max(0, j - REACH_J), j + 1):
        for ii in range(max(0, i - REACH_I), min(g.width, i + REACH_I + 1)):
            if (ii, jj) == (i, j):
                continue
            cell = g.cells[jj][ii]
            if cell.av == E_STATE or (not cell.di and not cell.dj):
                continue
            fi, fj, ok = resolve_final(g, ii, jj)
            if ok and fi == i and fj == j:
                return True
    return False


def _backward_contact_row(path: list[YarnPathEntry], last_row: int):
    for entry in reversed(path):
        if entry.j < last_row:
            return entry.j
    return None


def _forward_contact_row(g: CnGrid, cursor: WaveCursor, index):
    """Row of the next definite yarn-path contact after the cursor.

    Unanchored CNs met during the scan are not candidates: their own fate is
    still open, and chains of them longer than the stretch limit cannot occur
    in sound fabric.  Returns None when the wave ends first.
    """
    rows = g.height - 1
    probe = next_cn(cursor, g.width)
    while probe.stitch_row < rows:
        cell = g.cells[probe.j][probe.i]
        if probe.leg_node:
            if acns_at(g, probe.i, probe.j, index):
                return probe.j
        elif cell.av == ACN:
            fi, fj, ok = resolve_final(g, probe.i, probe.j)
            if ok:
                return fj
        elif cell.av == PCN:
            fi, fj, ok = resolve_final(g, probe.i, probe.j)
            if ok and fj < g.last_row:
                return fj
        probe = next_cn(probe, g.width)
    return None


def add_to_list(g: CnGrid, cursor: WaveCursor, path: list[YarnPathEntry], index=None) -> bool:
    """Decide whether the CN under the cursor joins the yarn path.

    The only grid mutation of the whole evaluation happens here: an
    unanchored CN proven anchored becomes an ACN (a PCN when it sits in the
    last row, where nothing can intertwine with it any more).
    """
    i, j = cursor.i, cursor.j
    if cursor.leg_node:
        return len(acns_at(g, i, j, index)) > 0
    cell = g.cells[j][i]
    av = cell.av
    if av == E_STATE:
        return False
    if av == UACN:
        if j == g.last_row:
            if _has_foreign_arrival(g, i, j, index):
                return False  # a held CN bundle ends here; it stays unanchored
            cell.av = PCN
            return True
        fi, fj, ok = resolve_final(g, i, j)
        if not ok:
            return False
        if (i % 2 == 0) == (j % 2 == 1):
            n = _backward_contact_row(path, g.last_row)
        else:
            n = _forward_contact_row(g, cursor, index)
        if n is not None and n < fj:
            cell.av = ACN
            return True
        return False
    # ACN or PCN head: part of the yarn path when its chain terminates
    fi, fj, ok = resolve_final(g, i, j)
    return ok


def follow_the_yarn(g: CnGrid) -> list[YarnPathEntry]:
    """Trace the yarn through the whole fabric in square-wave order."""
    rows = g.height - 1
    index = build_final_index(g)
    path: list[YarnPathEntry] = []
    cursor = WaveCursor(0, 0, True, 0)
    budget = 4 * g.width * rows + g.width + 8
    while cursor.stitch_row < rows:
        budget -= 1
        if budget < 0:
            raise EvaluationDiverged(cursor.i, cursor.j)
        if add_to_list(g, cursor, path, index):
            if cursor.leg_node:
                path.append(YarnPathEntry(cursor.i, cursor.j, cursor.stitch_row))
            else:
                fi, fj, _ = resolve_final(g, cursor.i, cursor.j)
                path.append(YarnPathEntry(fi, fj, cursor.stitch_row))
        cursor = next_cn(cursor, g.width)
    return path
