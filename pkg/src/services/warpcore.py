"""
Warping crossing points, warping degrees and warping incidence matrices

A crossing is a warping crossing point of D_b when, traveling D from the base
point b, the crossing is first met as an undercrossing. Base point b_j sits
immediately before pass j, so moving it past an overpass adds one warping
crossing point and moving it past an underpass removes one.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.services.knotio import KnotDiagram, PassKind
from src.utils.errors import IndexOutOfRange, MalformedSource

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class IntMatrix:
    """
    Read-only integer matrix with optional row labels.

    Shared by every matrix the package builds; compare with `same_rows`
    rather than `==`.
    """
    rows: np.ndarray
    labels: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        try:
            rows = np.asarray(self.rows, dtype=np.int64)
        except OverflowError:
            raise MalformedSource("matrix entries must fit in a signed 64-bit integer")
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, 0)
        if rows.ndim != 2:
            raise MalformedSource(f"expected a 2-dimensional matrix, got {rows.ndim} dimension(s)")
        rows.flags.writeable = False
        self.rows = rows
        if self.labels is not None:
            self.labels = tuple(int(label) for label in self.labels)
            if len(self.labels) != rows.shape[0]:
                raise MalformedSource(
                    f"{len(self.labels)} labels for {rows.shape[0]} rows"
                )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows.shape

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    @property
    def crossing_count(self) -> int:
        return self.width // 2

    def tolist(self) -> List[List[int]]:
        return self.rows.tolist()

    def same_rows(self, other: 'IntMatrix') -> bool:
        return self.rows.shape == other.rows.shape and bool(np.array_equal(self.rows, other.rows))

    def with_rows(self, rows, labels=None) -> 'IntMatrix':
        return type(self)(rows, labels)


class IncidenceMatrix(IntMatrix):
    """c x 2c matrix over {0, 1}; row i is crossing v_i, column j is base point b_j"""
    pass


class WarpingDegreeSequence(tuple):
    """Warping degrees d(D_{b_1}), ..., d(D_{b_2c}) of one diagram"""

    def is_valid(self, crossing_count: int) -> bool:
        if len(self) != 2 * crossing_count:
            return False
        if any(not 0 <= value <= crossing_count for value in self):
            return False
        return all(
            abs(self[(j + 1) % len(self)] - self[j]) == 1 for j in range(len(self))
        )


def _check_edge(diagram: KnotDiagram, j: int) -> None:
    edges = 2 * diagram.crossing_count
    if not 1 <= j <= edges:
        raise IndexOutOfRange('edge', j, 1, edges)


def _check_crossing(diagram: KnotDiagram, k: int) -> None:
    if not 1 <= k <= diagram.crossing_count:
        raise IndexOutOfRange('crossing', k, 1, diagram.crossing_count)


def is_warping_crossing(diagram: KnotDiagram, j: int, k: int) -> bool:
    """True iff crossing k is first met as an underpass when traveling from b_j"""
    _check_edge(diagram, j)
    _check_crossing(diagram, k)
    n = len(diagram.pass_kinds)
    start = j - 1
    first = diagram.projection.pass_positions[k - 1][0]
    second = diagram.projection.partner(first)
    met = min((first, second), key=lambda position: (position - start) % n)
    return diagram.pass_kinds[met] is PassKind.UNDER


def warping_degree(diagram: KnotDiagram, j: int) -> int:
    """Number of warping crossing points of D_{b_j}, counted crossing by crossing"""
    _check_edge(diagram, j)
    return sum(
        is_warping_crossing(diagram, j, k)
        for k in range(1, diagram.crossing_count + 1)
    )


def brute_force_sequence(diagram: KnotDiagram) -> WarpingDegreeSequence:
    edges = 2 * diagram.crossing_count
    return WarpingDegreeSequence(warping_degree(diagram, j) for j in range(1, edges + 1))


def warping_degree_sequence(diagram: KnotDiagram) -> WarpingDegreeSequence:
    """
    s(D), computed incrementally.

    From b_1 every crossing is met first at its first pass, so d(b_1) counts
    the crossings whose first pass is under. Each later entry differs from the
    previous one by +1 (overpass crossed) or -1 (underpass crossed).
    """
    c = diagram.crossing_count
    degree = c - bin(diagram.assignment_index).count('1')
    values = []
    for kind in diagram.pass_kinds:
        values.append(degree)
        degree += kind.sign
    return WarpingDegreeSequence(values)


def incidence_matrix(diagram: KnotDiagram) -> IncidenceMatrix:
    """
    m(D). Row k is 1 exactly on the base points strictly after the overpass of
    v_k up to and including its underpass (cyclically).
    """
    c = diagram.crossing_count
    n = 2 * c
    entries = np.zeros((c, n), dtype=np.int64)
    for k, (first, second) in enumerate(diagram.projection.pass_positions):
        if diagram.pass_kinds[first] is PassKind.OVER:
            over, under = first, second
        else:
            over, under = second, first
        column = (over + 1) % n
        while True:
            entries[k, column] = 1
            if column == under:
                break
            column = (column + 1) % n
    return IncidenceMatrix(entries, tuple(range(1, c + 1)))


def crossing_change(diagram: KnotDiagram, i: int) -> KnotDiagram:
    _check_crossing(diagram, i)
    return KnotDiagram(diagram.projection, diagram.assignment_index ^ (1 << (i - 1)))


def block_entry_columns(matrix: IncidenceMatrix) -> List[Tuple[int, ...]]:
    """
    For each row k, every 1-based column l with a[k][l-1] = 0, a[k][l] = 1 and
    a[i][l-1] = a[i][l] for all other rows i (column indices cyclic).

    On a genuine incidence matrix each row yields exactly one column.
    """
    rows = matrix.rows
    c, n = rows.shape
    previous = np.roll(rows, 1, axis=1)
    changed = rows != previous
    candidates = []
    for k in range(c):
        hits = []
        for column in range(n):
            if previous[k, column] != 0 or rows[k, column] != 1:
                continue
            if changed[:, column].sum() == 1:
                hits.append(column + 1)
        candidates.append(tuple(hits))
    return candidates
