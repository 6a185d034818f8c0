"""
Exact integer linear algebra

Determinants and materialized ranks use fraction-free (Bareiss) elimination
over Python integers. The streaming RankAccumulator keeps a reduced row
echelon basis over the rationals, so its memory is bounded by the row width
no matter how many rows are inserted.
"""

import itertools
import logging
import math
from bisect import insort
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import NotSquare, TooShort, WidthMismatch

logger = logging.getLogger(__name__)

INT64_SAFE = 2 ** 62


def det_exact(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant by Bareiss fraction-free elimination"""
    m = [[int(x) for x in row] for row in matrix]
    n = len(m)
    for row in m:
        if len(row) != n:
            raise NotSquare(n, len(row))
    if n == 0:
        return 1

    sign = 1
    previous = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, row_k = m[i], m[k]
            factor = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // previous
            row_i[k] = 0
        previous = pivot
    return sign * m[n - 1][n - 1]


def rank_bareiss(rows: Iterable[Sequence[int]], width: Optional[int] = None) -> int:
    """Rank of a materialized matrix by fraction-free elimination"""
    m = [[int(x) for x in row] for row in rows]
    if not m:
        return 0
    if width is None:
        width = len(m[0])
    for index, row in enumerate(m):
        if len(row) != width:
            raise WidthMismatch(index, len(row), width)

    rank = 0
    previous = 1
    for column in range(width):
        pivot_row = next((i for i in range(rank, len(m)) if m[i][column] != 0), None)
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        pivot_line = m[rank]
        pivot = pivot_line[column]
        for i in range(rank + 1, len(m)):
            line = m[i]
            factor = line[column]
            for j in range(column + 1, width):
                line[j] = (line[j] * pivot - factor * pivot_line[j]) // previous
            line[column] = 0
        previous = pivot
        rank += 1
        if rank == len(m):
            break
    return rank


class RankAccumulator:
    """
    Incremental exact rank.

    Holds a reduced row echelon basis (rational entries, 1 at each pivot).
    Rows can be fed one at a time with `add` or as numpy blocks with
    `add_block`; a block is first screened with one vectorized residual
    computation so only rows outside the current span reach the exact path.
    """

    def __init__(self, width: int):
        self.width = width
        self.rows_seen = 0
        self._pivots: List[int] = []
        self._basis: Dict[int, List[Fraction]] = {}
        self._dense = None
        self._warned_object = False

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def basis(self) -> List[Tuple[Fraction, ...]]:
        return [tuple(self._basis[p]) for p in self._pivots]

    def add(self, row: Sequence[int]) -> bool:
        """Insert one row; True if it raised the rank"""
        if len(row) != self.width:
            raise WidthMismatch(self.rows_seen, len(row), self.width)
        self.rows_seen += 1
        return self._insert([Fraction(int(x)) for x in row])

    def add_block(self, block: np.ndarray) -> int:
        """Insert a 2-d block of rows; returns how many raised the rank"""
        block = np.asarray(block)
        if block.size == 0:
            return 0
        if block.ndim != 2 or block.shape[1] != self.width:
            width = block.shape[-1] if block.ndim else 0
            raise WidthMismatch(self.rows_seen, width, self.width)

        inserted = 0
        remaining = block
        while remaining.shape[0] and self.rank < self.width:
            residual = self._residual(remaining)
            outside = np.flatnonzero(residual.any(axis=1))
            if outside.size == 0:
                break
            first = int(outside[0])
            if self._insert([Fraction(int(x)) for x in remaining[first]]):
                inserted += 1
            remaining = remaining[first + 1:]
        self.rows_seen += block.shape[0]
        return inserted

    def extend(self, rows: Iterable[Sequence[int]], block_size: int = 4096) -> int:
        """Insert a stream of rows, materializing at most block_size at a time"""
        inserted = 0
        iterator = iter(rows)
        while True:
            chunk = list(itertools.islice(iterator, block_size))
            if not chunk:
                break
            for offset, row in enumerate(chunk):
                if len(row) != self.width:
                    raise WidthMismatch(self.rows_seen + offset, len(row), self.width)
            inserted += self.add_block(_as_block(chunk))
        return inserted

    def merge(self, other: 'RankAccumulator') -> None:
        """Absorb another accumulator's basis (used to combine sharded runs)"""
        if other.width != self.width:
            raise WidthMismatch(0, other.width, self.width)
        for row in other.basis:
            self._insert(list(row))
        self.rows_seen += other.rows_seen

    def _insert(self, vector: List[Fraction]) -> bool:
        for pivot in self._pivots:
            factor = vector[pivot]
            if factor:
                base = self._basis[pivot]
                vector = [v - factor * b for v, b in zip(vector, base)]

        lead_column = next((i for i, v in enumerate(vector) if v != 0), None)
        if lead_column is None:
            return False

        lead = vector[lead_column]
        vector = [v / lead for v in vector]
        # keep the basis fully reduced: clear the new pivot column elsewhere
        for pivot in self._pivots:
            base = self._basis[pivot]
            factor = base[lead_column]
            if factor:
                self._basis[pivot] = [b - factor * v for b, v in zip(base, vector)]

        self._basis[lead_column] = vector
        insort(self._pivots, lead_column)
        self._dense = None
        logger.debug(f"Rank raised to {self.rank} (pivot column {lead_column})")
        return True

    def _dense_form(self):
        if self._dense is None:
            denominator = 1
            for pivot in self._pivots:
                for value in self._basis[pivot]:
                    denominator = math.lcm(denominator, value.denominator)
            scaled = [
                [int(value * denominator) for value in self._basis[pivot]]
                for pivot in self._pivots
            ]
            self._dense = (np.array(self._pivots), scaled, denominator)
        return self._dense

    def _residual(self, block: np.ndarray) -> np.ndarray:
        """denominator * (row - its projection onto the span); zero iff row is in the span"""
        if self.rank == 0:
            return block

        pivots, scaled, denominator = self._dense_form()
        block_max = int(np.abs(block).max()) if block.size else 0
        basis_max = max((abs(x) for row in scaled for x in row), default=0)
        bound = denominator * block_max + self.rank * block_max * basis_max

        if bound < INT64_SAFE and block.dtype != object:
            values = block.astype(np.int64, copy=False)
            basis = np.array(scaled, dtype=np.int64)
        else:
            if not self._warned_object and block.dtype != object:
                logger.warning("Rank filter entries exceed int64 range, using exact object arithmetic")
                self._warned_object = True
            values = block.astype(object)
            basis = np.array(scaled, dtype=object)
        return values * denominator - values[:, pivots] @ basis


def _as_block(chunk: List[Sequence[int]]) -> np.ndarray:
    block = np.array([[int(x) for x in row] for row in chunk], dtype=object)
    if block.size and int(np.abs(block).max()) < INT64_SAFE:
        return block.astype(np.int64)
    return block


def rank_exact(rows: Iterable[Sequence[int]], width: Optional[int] = None,
               block_size: int = 4096) -> int:
    """Exact rank of a stream of rows without materializing the stream"""
    iterator = iter(rows)
    if width is None:
        first = next(iterator, None)
        if first is None:
            return 0
        width = len(first)
        iterator = itertools.chain([first], iterator)
    accumulator = RankAccumulator(width)
    accumulator.extend(iterator, block_size=block_size)
    return accumulator.rank


def rows_independent(rows: Sequence[Sequence[int]]) -> bool:
    rows = list(rows)
    if not rows:
        return True
    return rank_exact(rows) == len(rows)


class LemmaVariant(Enum):
    PLUS = 'plus'
    MINUS = 'minus'


@dataclass(frozen=True)
class LemmaMatrix:
    """
    (c+1) x (c+1) matrix with first column a. In rows 1..c the remaining
    entries are -1 on the shifted diagonal and +1 elsewhere; the last row is
    a_{c+1} followed by -1s. The MINUS variant negates the last column.
    """
    a: Tuple[int, ...]
    variant: LemmaVariant
    entries: Tuple[Tuple[int, ...], ...]

    @property
    def c(self) -> int:
        return len(self.a) - 1


def lemma_matrix(a: Sequence[int], variant: LemmaVariant = LemmaVariant.PLUS) -> LemmaMatrix:
    a = tuple(int(x) for x in a)
    if len(a) < 3:
        raise TooShort(len(a))
    c = len(a) - 1
    rows = []
    for i in range(c):
        rows.append([a[i]] + [-1 if t == i else 1 for t in range(c)])
    rows.append([a[c]] + [-1] * c)
    if variant is LemmaVariant.MINUS:
        for row in rows:
            row[-1] = -row[-1]
    return LemmaMatrix(a, variant, tuple(tuple(row) for row in rows))


def lemma_det_closed_form(a: Sequence[int], variant: LemmaVariant = LemmaVariant.PLUS) -> int:
    """-2^(c-1) * (a_1 + ... + a_c + (c-2) a_{c+1}); sign flipped for MINUS"""
    a = tuple(int(x) for x in a)
    if len(a) < 3:
        raise TooShort(len(a))
    c = len(a) - 1
    value = -(2 ** (c - 1)) * (sum(a[:c]) + (c - 2) * a[c])
    return -value if variant is LemmaVariant.MINUS else value


@dataclass
class ColumnReduction:
    """Result of differencing adjacent columns and cancelling zero-sum pairs"""
    columns: np.ndarray
    zero_columns: int
    pairs: List[Tuple[int, int]]


def column_difference_reduction(rows: np.ndarray) -> ColumnReduction:
    """
    Replace columns a_2..a_2c of a warping matrix by a_{j+1} - a_j, then for
    every pair of difference columns summing to zero add one to the other.
    Returns the surviving columns (a followed by one difference column per
    crossing) and the number of columns that became zero.
    """
    rows = np.asarray(rows, dtype=np.int64)
    differences = np.diff(rows, axis=1)
    count = differences.shape[1]
    kept = [rows[:, 0]]
    pairs = []
    used = set()
    for i in range(count):
        if i in used:
            continue
        partner = next(
            (j for j in range(i + 1, count)
             if j not in used and np.array_equal(differences[:, i], -differences[:, j])),
            None,
        )
        kept.append(differences[:, i])
        if partner is not None:
            used.add(partner)
            pairs.append((i + 1, partner + 1))
    return ColumnReduction(np.column_stack(kept), len(pairs), pairs)


@dataclass
class LemmaWitness:
    variant: LemmaVariant
    row_indices: Tuple[int, ...]
    determinant: int
    closed_form: int


def find_lemma_submatrix(columns: np.ndarray) -> Optional[LemmaWitness]:
    """
    Look for c+1 rows of a reduced matrix (a, v_1..v_c) whose sign part matches
    the PLUS pattern, falling back to the MINUS pattern.
    """
    columns = np.asarray(columns, dtype=np.int64)
    c = columns.shape[1] - 1
    if c < 2:
        return None

    first_row = {}
    for index, row in enumerate(columns):
        first_row.setdefault(tuple(int(x) for x in row[1:]), index)

    for variant in (LemmaVariant.PLUS, LemmaVariant.MINUS):
        pattern = lemma_matrix([0] * (c + 1), variant).entries
        targets = [tuple(row[1:]) for row in pattern]
        if all(target in first_row for target in targets):
            indices = tuple(first_row[target] for target in targets)
            a = [int(columns[i, 0]) for i in indices]
            return LemmaWitness(
                variant=variant,
                row_indices=indices,
                determinant=det_exact(lemma_matrix(a, variant).entries),
                closed_form=lemma_det_closed_form(a, variant),
            )
    return None
