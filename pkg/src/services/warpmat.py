"""
Warping matrices, ou matrices and Gauss (chord) diagrams

M(P) has one row per diagram over P (row label = assignment index) and one
column per base point. Rows are generated in blocks straight from assignment
indices, so the same generator feeds both the materialized builders and the
streaming rank.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import singledispatch
from math import comb
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from src.config.settings import load_settings
from src.services.exactla import RankAccumulator
from src.services.knotio import KnotDiagram, KnotProjection
from src.services.warpcore import IncidenceMatrix, IntMatrix, WarpingDegreeSequence
from src.utils.errors import (
    BadDimension,
    ConsistencyError,
    MalformedSource,
    PairingIncomplete,
    PairingNotUnique,
    RowMissing,
    TooManyCrossings,
)

logger = logging.getLogger(__name__)


class WarpingMatrix(IntMatrix):
    """Rows are warping degree sequences, labeled by assignment index"""
    pass


class OuMatrix(IntMatrix):
    """Entry (i, j) is +1 if pass j of diagram i is over, -1 if under"""
    pass


@dataclass(frozen=True)
class ChordDiagram:
    """Perfect matching of the positions 1..size, as sorted (low, high) pairs"""
    pairs: Tuple[Tuple[int, int], ...]
    size: int

    @classmethod
    def from_pairs(cls, pairs, size: int) -> 'ChordDiagram':
        normalized = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in pairs))
        positions = sorted(p for pair in normalized for p in pair)
        if positions != list(range(1, size + 1)):
            raise MalformedSource(f"pairs {normalized} are not a perfect matching of 1..{size}")
        return cls(normalized, size)

    @property
    def chord_count(self) -> int:
        return len(self.pairs)

    def rotated(self, shift: int) -> 'ChordDiagram':
        if not self.size:
            return self
        shifted = [
            (((a - 1 + shift) % self.size) + 1, ((b - 1 + shift) % self.size) + 1)
            for a, b in self.pairs
        ]
        return ChordDiagram.from_pairs(shifted, self.size)

    def canonical(self) -> 'ChordDiagram':
        """Least rotation, so diagrams equal up to rotation compare equal"""
        return min((self.rotated(s) for s in range(max(self.size, 1))), key=lambda d: d.pairs)

    def equivalent(self, other: 'ChordDiagram') -> bool:
        return self.size == other.size and self.canonical() == other.canonical()


def _check_limit(c: int, limit: Optional[int], streaming: bool = False) -> None:
    if limit is None:
        settings = load_settings()
        limit = settings.streaming_limit if streaming else settings.materialize_limit
    if c > limit:
        raise TooManyCrossings(c, limit)


def _over_flags(projection: KnotProjection, indices: np.ndarray) -> np.ndarray:
    labels = np.array(projection.passes, dtype=np.int64) - 1
    second = np.array(projection.is_second_pass, dtype=bool)
    first_over = ((indices[:, None] >> labels[None, :]) & 1).astype(bool)
    return first_over ^ second[None, :]


def sequence_block(projection: KnotProjection, indices) -> np.ndarray:
    """Warping degree sequences for a vector of assignment indices"""
    indices = np.asarray(indices, dtype=np.int64)
    c = projection.crossing_count
    steps = np.where(_over_flags(projection, indices), 1, -1)
    popcount = ((indices[:, None] >> np.arange(c, dtype=np.int64)[None, :]) & 1).sum(axis=1)
    block = np.empty((indices.shape[0], 2 * c), dtype=np.int64)
    block[:, 0] = c - popcount
    block[:, 1:] = block[:, :1] + np.cumsum(steps[:, :-1], axis=1)
    return block


def ou_block(projection: KnotProjection, indices) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    return np.where(_over_flags(projection, indices), 1, -1).astype(np.int64)


def iter_row_blocks(projection: KnotProjection, block_size: int = 4096,
                    start: int = 0, stop: Optional[int] = None
                    ) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (indices, rows) blocks of M(P) for assignment indices in [start, stop)"""
    if stop is None:
        stop = 2 ** projection.crossing_count
    for low in range(start, stop, block_size):
        indices = np.arange(low, min(low + block_size, stop), dtype=np.int64)
        yield indices, sequence_block(projection, indices)


def _index_ranges(total: int, parts: int) -> List[Tuple[int, int]]:
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [(low, min(low + step, total)) for low in range(0, total, step)]


def _build_range(args) -> np.ndarray:
    projection, start, stop = args
    return sequence_block(projection, np.arange(start, stop, dtype=np.int64))


def warping_matrix(projection: KnotProjection, limit: Optional[int] = None,
                   jobs: int = 1) -> WarpingMatrix:
    """M(P): 2^c rows in assignment-index order"""
    c = projection.crossing_count
    _check_limit(c, limit)
    total = 2 ** c

    if jobs > 1 and total >= 2 * 4096:
        ranges = [(projection, low, high) for low, high in _index_ranges(total, jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            rows = np.vstack(list(executor.map(_build_range, ranges)))
    else:
        rows = np.vstack([block for _, block in iter_row_blocks(projection, 1 << 16)])

    logger.debug(f"Built warping matrix {rows.shape[0]}x{rows.shape[1]} for c={c}")
    return WarpingMatrix(rows, tuple(range(total)))


def warping_matrix_without_signs(diagram: KnotDiagram, limit: Optional[int] = None,
                                 jobs: int = 1) -> WarpingMatrix:
    """M̄(D): M(P) with the row of D deleted"""
    full = warping_matrix(diagram.projection, limit=limit, jobs=jobs)
    keep = np.arange(full.shape[0]) != diagram.assignment_index
    labels = tuple(label for label in full.labels if label != diagram.assignment_index)
    return WarpingMatrix(full.rows[keep], labels)


def a_matrix(n: int) -> np.ndarray:
    """-1 on the diagonal, +1 below it and in the top-right corner"""
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise BadDimension(n)
    a = -np.eye(n, dtype=np.int64)
    a[np.arange(1, n), np.arange(n - 1)] = 1
    a[0, n - 1] = 1
    return a


def ou_matrix_direct(projection: KnotProjection, limit: Optional[int] = None) -> OuMatrix:
    c = projection.crossing_count
    _check_limit(c, limit)
    total = 2 ** c
    return OuMatrix(ou_block(projection, np.arange(total, dtype=np.int64)), tuple(range(total)))


def ou_matrix(projection: KnotProjection, limit: Optional[int] = None,
              jobs: int = 1) -> OuMatrix:
    """U(P) = M(P) x A, checked against the direct over/under construction"""
    m = warping_matrix(projection, limit=limit, jobs=jobs)
    product = m.rows @ a_matrix(m.width)
    direct = ou_matrix_direct(projection, limit=limit)
    if not np.array_equal(product, direct.rows):
        raise ConsistencyError(f"M(P)A differs from the direct ou matrix for {projection}")
    return OuMatrix(product, m.labels)


def column_pairs(ou: OuMatrix) -> ChordDiagram:
    """The unique perfect matching of columns into zero-sum pairs"""
    columns = ou.rows.T
    n = columns.shape[0]
    by_value: Dict[bytes, List[int]] = {}
    for j in range(n):
        by_value.setdefault(np.ascontiguousarray(columns[j]).tobytes(), []).append(j)

    pairs = set()
    for j in range(n):
        partners = [
            k for k in by_value.get(np.ascontiguousarray(-columns[j]).tobytes(), [])
            if k != j
        ]
        if not partners:
            raise PairingIncomplete(j + 1)
        if len(partners) > 1:
            raise PairingNotUnique(j + 1)
        pairs.add(tuple(sorted((j + 1, partners[0] + 1))))
    return ChordDiagram.from_pairs(pairs, n)


@singledispatch
def gauss_diagram(source) -> ChordDiagram:
    """Unsigned Gauss diagram recovered from a projection, ou matrix or incidence matrix"""
    raise MalformedSource(f"cannot recover a Gauss diagram from {type(source).__name__}")


@gauss_diagram.register
def _(source: KnotProjection) -> ChordDiagram:
    return ChordDiagram.from_pairs(
        ((first + 1, second + 1) for first, second in source.pass_positions),
        len(source.passes),
    )


@gauss_diagram.register
def _(source: KnotDiagram) -> ChordDiagram:
    return gauss_diagram(source.projection)


@gauss_diagram.register
def _(source: OuMatrix) -> ChordDiagram:
    return column_pairs(source)


@gauss_diagram.register
def _(source: WarpingMatrix) -> ChordDiagram:
    return column_pairs(OuMatrix(source.rows @ a_matrix(source.width)))


@gauss_diagram.register
def _(source: IncidenceMatrix) -> ChordDiagram:
    rows = source.rows
    if rows.size and not np.isin(rows, (0, 1)).all():
        raise MalformedSource("incidence matrix entries must be 0 or 1")
    c, n = rows.shape
    if n != 2 * c:
        raise MalformedSource(f"incidence matrix must be c x 2c, got {c}x{n}")

    chords = []
    for k in range(c):
        row = rows[k]
        previous = np.roll(row, 1)
        following = np.roll(row, -1)
        starts = np.flatnonzero((previous == 0) & (row == 1))
        ends = np.flatnonzero((row == 1) & (following == 0))
        if starts.size != 1 or ends.size != 1:
            raise MalformedSource(f"row {k + 1} is not a single cyclic block of 1s")
        # the block starts right after the overpass and ends on the underpass
        over = int(starts[0]) if starts[0] > 0 else n
        under = int(ends[0]) + 1
        chords.append((over, under))
    return ChordDiagram.from_pairs(chords, n)


def canonical_form(matrix: IntMatrix) -> IntMatrix:
    """
    Representative under row permutations and cyclic column shifts: for each
    shift sort the rows, keep the lexicographically least. Labels are dropped.
    """
    rows = matrix.rows
    if rows.size == 0:
        return matrix.with_rows(rows)

    best = None
    for shift in range(rows.shape[1]):
        rolled = np.roll(rows, -shift, axis=1)
        candidate = rolled[np.lexsort(rolled.T[::-1])].ravel()
        if best is None:
            best = candidate
            continue
        differ = np.flatnonzero(candidate != best)
        if differ.size and candidate[differ[0]] < best[differ[0]]:
            best = candidate
    return matrix.with_rows(best.reshape(rows.shape))


def row_for_diagram(matrix: WarpingMatrix, diagram: KnotDiagram) -> WarpingDegreeSequence:
    if matrix.labels is None:
        raise MalformedSource("matrix has no row labels")
    if matrix.width != 2 * diagram.crossing_count:
        raise MalformedSource(
            f"matrix width {matrix.width} does not fit a diagram with {diagram.crossing_count} crossings"
        )
    try:
        position = matrix.labels.index(diagram.assignment_index)
    except ValueError:
        raise RowMissing(diagram.assignment_index)
    return WarpingDegreeSequence(int(x) for x in matrix.rows[position])


def column_value_counts(matrix: IntMatrix) -> List[Dict[int, int]]:
    counts = []
    for column in matrix.rows.T:
        values, frequencies = np.unique(column, return_counts=True)
        counts.append({int(v): int(f) for v, f in zip(values, frequencies)})
    return counts


def complete_missing_row(matrix: WarpingMatrix) -> WarpingDegreeSequence:
    """
    Recover the deleted row of M̄(D): in M(P) every column holds the value n
    exactly C(c, n) times, so each column of M̄(D) is short by one entry.
    """
    c = matrix.crossing_count
    missing = []
    for j, counts in enumerate(column_value_counts(matrix), start=1):
        deficits = [n for n in range(c + 1) if comb(c, n) - counts.get(n, 0) == 1]
        surplus = [n for n in range(c + 1) if comb(c, n) - counts.get(n, 0) not in (0, 1)]
        if len(deficits) != 1 or surplus:
            raise MalformedSource(f"column {j} is not a warping matrix column with one row deleted")
        missing.append(deficits[0])
    return WarpingDegreeSequence(missing)


def rank_shard(projection: KnotProjection, start: int, stop: int, block_size: int = 4096,
               exclude: Optional[int] = None) -> RankAccumulator:
    """Accumulate the rows of M(P) with assignment index in [start, stop)"""
    accumulator = RankAccumulator(2 * projection.crossing_count)
    for indices, block in iter_row_blocks(projection, block_size, start, stop):
        if exclude is not None and start <= exclude < stop:
            block = block[indices != exclude]
        accumulator.add_block(block)
    return accumulator


def _rank_shard(args) -> RankAccumulator:
    return rank_shard(*args)


def streaming_rank(projection: KnotProjection, jobs: int = 1, block_size: Optional[int] = None,
                   limit: Optional[int] = None, exclude: Optional[int] = None) -> RankAccumulator:
    """
    Rank of M(P) (or of M̄(D) when `exclude` is D's assignment index) without
    materializing it. With jobs > 1 the index range is sharded over worker
    processes and the partial bases are merged.
    """
    c = projection.crossing_count
    _check_limit(c, limit, streaming=True)
    if block_size is None:
        block_size = load_settings().block_size
    total = 2 ** c
    shards = [
        (projection, low, high, block_size, exclude)
        for low, high in _index_ranges(total, jobs)
    ]

    if len(shards) == 1:
        return _rank_shard(shards[0])

    with ProcessPoolExecutor(max_workers=jobs) as executor:
        partials = list(executor.map(_rank_shard, shards))
    merged = partials[0]
    for partial in partials[1:]:
        merged.merge(partial)
    logger.info(f"Streaming rank for c={c} over {len(shards)} shards: {merged.rank}")
    return merged
