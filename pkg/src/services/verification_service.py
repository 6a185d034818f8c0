"""
Verification Service - Checks the warping matrix claims over a corpus of projections

Every verifier returns reports instead of raising: a failed claim is data.
The driver `verify_all` fans instances out over worker processes and sorts
the collected reports by (claim, instance), so output does not depend on
scheduling.
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.constants.claims import Claim, NAMED_PROJECTIONS, Realizability, Scope
from src.services.exactla import (
    LemmaVariant,
    column_difference_reduction,
    det_exact,
    find_lemma_submatrix,
    lemma_det_closed_form,
    lemma_matrix,
    rank_bareiss,
)
from src.services.knotio import KnotDiagram, KnotProjection, mirror, parse_projection, render
from src.services.warpcore import (
    WarpingDegreeSequence,
    block_entry_columns,
    crossing_change,
    incidence_matrix,
    warping_degree_sequence,
)
from src.services.warpmat import (
    a_matrix,
    column_pairs,
    column_value_counts,
    gauss_diagram,
    ou_matrix_direct,
    rank_shard,
    streaming_rank,
    warping_matrix,
)
from src.utils.errors import InputError, WarpMatrixError

logger = logging.getLogger(__name__)

# Largest c for which the materialized Bareiss rank is run as an oracle
ORACLE_LIMIT = 12
SHARDS_IN_PROCESS = 3
DEFAULT_LEMMA_TRIALS = 1000
DEFAULT_DIAGRAMS_PER_WORD = 4


@dataclass
class VerificationReport:
    """Outcome of checking one claim on one instance"""
    claim: str
    instance: str
    expected: Any
    actual: Any
    passed: bool
    runtime_ms: float = 0.0
    realizability: str = Realizability.UNCHECKED

    @property
    def sort_key(self) -> Tuple[str, str]:
        return (self.claim, self.instance)

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        data = {
            'claim': self.claim,
            'instance': self.instance,
            'expected': self.expected,
            'actual': self.actual,
            'pass': self.passed,
            'realizability': self.realizability,
        }
        if timings:
            data['runtimeMs'] = round(self.runtime_ms, 3)
        return data


def _report(claim: str, instance: str, expected, actual, started: float) -> VerificationReport:
    return VerificationReport(
        claim=claim,
        instance=instance,
        expected=expected,
        actual=actual,
        passed=expected == actual,
        runtime_ms=(time.perf_counter() - started) * 1000,
    )


def _failure(claim: str, instance: str, expected, error: Exception, started: float) -> VerificationReport:
    # an exception inside a check is a failed claim, reported with the error name
    logger.debug(f"{claim} on {instance} raised {type(error).__name__}: {error}")
    return _report(claim, instance, expected, f"{type(error).__name__}: {error}", started)


# =============================================================================
# Corpus
# =============================================================================

def _matchings(positions: List[int]) -> Iterator[List[Tuple[int, int]]]:
    if not positions:
        yield []
        return
    first, rest = positions[0], positions[1:]
    for i, partner in enumerate(rest):
        for matching in _matchings(rest[:i] + rest[i + 1:]):
            yield [(first, partner)] + matching


def enumerate_words(c: int) -> Iterator[KnotProjection]:
    """
    All double-occurrence words with c labels, up to first-appearance
    relabeling. There are (2c - 1)!! of them.
    """
    for matching in _matchings(list(range(2 * c))):
        word = [0] * (2 * c)
        # pairs come out ordered by their first position, which is first-appearance order
        for label, (first, second) in enumerate(matching, start=1):
            word[first] = label
            word[second] = label
        yield KnotProjection(tuple(word))


def random_word(c: int, rng: np.random.Generator) -> KnotProjection:
    """Uniform shuffle of the multiset {1, 1, ..., c, c}, normalized"""
    labels = rng.permutation(np.repeat(np.arange(1, c + 1), 2))
    return KnotProjection.from_labels(int(label) for label in labels)


@dataclass
class Corpus:
    """Named projections keyed by name"""
    named: Dict[str, KnotProjection] = field(default_factory=dict)

    @classmethod
    def default(cls) -> 'Corpus':
        return cls({name: parse_projection(code) for name, code in NAMED_PROJECTIONS.items()})

    def projections(self) -> List[KnotProjection]:
        return list(self.named.values())

    def describe(self) -> List[Dict[str, Any]]:
        return [
            {
                'name': name,
                'code': render(projection),
                'crossings': projection.crossing_count,
                'realizability': Realizability.UNCHECKED,
            }
            for name, projection in self.named.items()
        ]


@dataclass
class VerificationScope:
    """Which instances a run covers"""
    kind: str = Scope.CORPUS
    max_crossings: int = 4
    count: int = 100
    crossings: int = 8
    seed: int = 0
    diagrams_per_word: int = DEFAULT_DIAGRAMS_PER_WORD
    lemma_trials: int = DEFAULT_LEMMA_TRIALS

    def to_dict(self) -> Dict[str, Any]:
        data = {'scope': self.kind, 'seed': self.seed, 'lemmaTrials': self.lemma_trials}
        if self.kind == Scope.EXHAUSTIVE:
            data['maxCrossings'] = self.max_crossings
        elif self.kind == Scope.RANDOM:
            data.update({
                'n': self.count,
                'crossings': self.crossings,
                'diagramsPerWord': self.diagrams_per_word,
            })
        return data


def scope_instances(scope: VerificationScope) -> List[Tuple[KnotProjection, Tuple[int, ...]]]:
    """(projection, assignment indices to verify) pairs covered by a scope"""
    if scope.kind == Scope.CORPUS:
        words = Corpus.default().projections()
        return [(word, tuple(range(2 ** word.crossing_count))) for word in words]

    if scope.kind == Scope.EXHAUSTIVE:
        return [
            (word, tuple(range(2 ** c)))
            for c in range(1, scope.max_crossings + 1)
            for word in enumerate_words(c)
        ]

    if scope.kind == Scope.RANDOM:
        rng = np.random.default_rng(scope.seed)
        total = 2 ** scope.crossings
        sample = min(scope.diagrams_per_word, total)
        instances = []
        for _ in range(scope.count):
            word = random_word(scope.crossings, rng)
            indices = rng.choice(total, size=sample, replace=False)
            instances.append((word, tuple(sorted(int(i) for i in indices))))
        return instances

    raise InputError(f"unknown scope {scope.kind!r}")


# =============================================================================
# Warping matrix claims
# =============================================================================

def verify_matrix_properties(projection: KnotProjection,
                             limit: Optional[int] = None) -> List[VerificationReport]:
    """Row adjacency, binomial column counts and complementary rows of M(P)"""
    instance = render(projection)
    c = projection.crossing_count
    started = time.perf_counter()
    try:
        matrix = warping_matrix(projection, limit=limit)
    except WarpMatrixError as e:
        return [
            _failure(claim, instance, None, e, started)
            for claim in (Claim.ROW_ADJACENCY, Claim.COLUMN_BINOMIAL, Claim.COMPLEMENTARY_ROWS)
        ]
    rows = matrix.rows
    total = rows.shape[0]
    reports = []

    started = time.perf_counter()
    valid = sum(WarpingDegreeSequence(int(x) for x in row).is_valid(c) for row in rows)
    reports.append(_report(Claim.ROW_ADJACENCY, instance, total, int(valid), started))

    started = time.perf_counter()
    expected = [comb(c, n) for n in range(c + 1)]
    actual = expected
    for counts in column_value_counts(matrix):
        histogram = [counts.get(n, 0) for n in range(c + 1)]
        if histogram != expected or sum(counts.values()) != total:
            actual = histogram
            break
    reports.append(_report(Claim.COLUMN_BINOMIAL, instance, expected, actual, started))

    started = time.perf_counter()
    complements = 0
    for i in range(total):
        opposite = mirror(KnotDiagram(projection, i)).assignment_index
        if (rows[i] + rows[opposite] == c).all():
            complements += 1
    reports.append(_report(Claim.COMPLEMENTARY_ROWS, instance, total, int(complements), started))
    return reports


def verify_ou_claims(projection: KnotProjection,
                     diagrams: Sequence[KnotDiagram] = (),
                     limit: Optional[int] = None) -> List[VerificationReport]:
    """M(P)A against the direct ou matrix, its column pairing, and Gauss diagram agreement"""
    instance = render(projection)
    c = projection.crossing_count
    reports = []

    started = time.perf_counter()
    try:
        matrix = warping_matrix(projection, limit=limit)
        product = matrix.rows @ a_matrix(matrix.width)
        direct = ou_matrix_direct(projection, limit=limit)
        mismatches = int((product != direct.rows).sum())
        reports.append(_report(Claim.OU_PRODUCT, instance, 0, mismatches, started))
    except WarpMatrixError as e:
        return [
            _failure(claim, instance, None, e, started)
            for claim in (Claim.OU_PRODUCT, Claim.OU_PAIRS, Claim.GAUSS_AGREEMENT)
        ]

    started = time.perf_counter()
    try:
        reports.append(_report(Claim.OU_PAIRS, instance, c, column_pairs(direct).chord_count, started))
    except WarpMatrixError as e:
        reports.append(_failure(Claim.OU_PAIRS, instance, c, e, started))

    started = time.perf_counter()
    expected = [list(pair) for pair in gauss_diagram(projection).pairs]
    try:
        sources = [gauss_diagram(direct), gauss_diagram(matrix)]
        sources.extend(gauss_diagram(incidence_matrix(diagram)) for diagram in diagrams)
        disagreeing = next(
            (chords for chords in sources if [list(p) for p in chords.pairs] != expected),
            None,
        )
        actual = expected if disagreeing is None else [list(p) for p in disagreeing.pairs]
        reports.append(_report(Claim.GAUSS_AGREEMENT, instance, expected, actual, started))
    except WarpMatrixError as e:
        reports.append(_failure(Claim.GAUSS_AGREEMENT, instance, expected, e, started))
    return reports


def verify_theorem1(projection: KnotProjection, limit: Optional[int] = None) -> VerificationReport:
    """rank M(P) = c + 1, by streaming exact rank"""
    instance = render(projection)
    expected = projection.crossing_count + 1
    started = time.perf_counter()
    try:
        rank = streaming_rank(projection, limit=limit).rank
    except WarpMatrixError as e:
        return _failure(Claim.THEOREM1, instance, expected, e, started)
    return _report(Claim.THEOREM1, instance, expected, rank, started)


def verify_proof_witness(projection: KnotProjection,
                         limit: Optional[int] = None) -> VerificationReport:
    """
    Column differencing leaves c - 1 zero columns and c + 1 independent ones,
    and (for c >= 2) some rows form a lemma submatrix whose determinant
    matches the closed form and is nonzero.
    """
    instance = render(projection)
    c = projection.crossing_count
    expected = {'zeroColumns': c - 1, 'rank': c + 1, 'lemmaWitness': c >= 2}
    started = time.perf_counter()
    try:
        matrix = warping_matrix(projection, limit=limit)
    except WarpMatrixError as e:
        return _failure(Claim.THEOREM1_WITNESS, instance, expected, e, started)

    reduction = column_difference_reduction(matrix.rows)
    witness = find_lemma_submatrix(reduction.columns)
    witnessed = (
        witness is not None
        and witness.determinant == witness.closed_form
        and witness.determinant != 0
    )
    actual = {
        'zeroColumns': reduction.zero_columns,
        'rank': rank_bareiss(reduction.columns.tolist()),
        'lemmaWitness': witnessed,
    }
    return _report(Claim.THEOREM1_WITNESS, instance, expected, actual, started)


def verify_rank_oracle(projection: KnotProjection,
                       limit: Optional[int] = None) -> List[VerificationReport]:
    """Streaming rank against Bareiss, and in-process sharded rank against serial"""
    instance = render(projection)
    reports = []
    started = time.perf_counter()
    try:
        serial = streaming_rank(projection, limit=limit).rank
    except WarpMatrixError as e:
        return [
            _failure(Claim.RANK_ORACLE, instance, None, e, started),
            _failure(Claim.RANK_SHARDED, instance, None, e, started),
        ]

    if projection.crossing_count <= ORACLE_LIMIT:
        oracle = rank_bareiss(warping_matrix(projection, limit=limit).tolist())
        reports.append(_report(Claim.RANK_ORACLE, instance, oracle, serial, started))

    started = time.perf_counter()
    total = 2 ** projection.crossing_count
    step = -(-total // SHARDS_IN_PROCESS)
    partials = [
        rank_shard(projection, low, min(low + step, total), block_size=max(1, step // 2))
        for low in range(0, total, step)
    ]
    merged = partials[0]
    for partial in partials[1:]:
        merged.merge(partial)
    reports.append(_report(Claim.RANK_SHARDED, instance, serial, merged.rank, started))
    return reports


# =============================================================================
# Diagram claims
# =============================================================================

def verify_theorem2(diagram: KnotDiagram, limit: Optional[int] = None) -> VerificationReport:
    """
    rank M̄(D) = c + 1. For c = 1 only one row is left, so the rank is
    capped at the 2^c - 1 remaining rows.
    """
    instance = render(diagram)
    c = diagram.crossing_count
    expected = min(c + 1, 2 ** c - 1)
    started = time.perf_counter()
    try:
        rank = streaming_rank(diagram.projection, limit=limit,
                              exclude=diagram.assignment_index).rank
    except WarpMatrixError as e:
        return _failure(Claim.THEOREM2, instance, expected, e, started)
    return _report(Claim.THEOREM2, instance, expected, rank, started)


def verify_incidence_claims(diagram: KnotDiagram) -> List[VerificationReport]:
    """Row sums, block entry columns, crossing-change flips and ranks of m(D)"""
    instance = render(diagram)
    c = diagram.crossing_count
    reports = []

    started = time.perf_counter()
    matrix = incidence_matrix(diagram)
    sequence = warping_degree_sequence(diagram)
    row_sum = [int(x) for x in matrix.rows.sum(axis=0)]
    reports.append(_report(Claim.ROW_SUM, instance, list(sequence), row_sum, started))

    started = time.perf_counter()
    hits = [len(columns) for columns in block_entry_columns(matrix)]
    reports.append(_report(Claim.UNIQUE_ENTRY_COLUMN, instance, [1] * c, hits, started))

    # changing crossing i complements row i of m(D) and leaves the others alone
    started = time.perf_counter()
    flips = 0
    for i in range(1, c + 1):
        changed = incidence_matrix(crossing_change(diagram, i))
        expected_rows = matrix.rows.copy()
        expected_rows[i - 1] = 1 - expected_rows[i - 1]
        changed_sequence = np.array(warping_degree_sequence(crossing_change(diagram, i)))
        expected_sequence = np.array(sequence) - matrix.rows[i - 1] + (1 - matrix.rows[i - 1])
        if np.array_equal(changed.rows, expected_rows) and np.array_equal(changed_sequence, expected_sequence):
            flips += 1
    reports.append(_report(Claim.ROW_FLIP, instance, c, flips, started))

    started = time.perf_counter()
    reports.append(_report(Claim.INCIDENCE_RANK, instance, c, rank_bareiss(matrix.tolist()), started))

    started = time.perf_counter()
    with_ones = matrix.tolist() + [[1] * (2 * c)]
    reports.append(_report(Claim.INDEPENDENT_WITH_ONES, instance, c + 1, rank_bareiss(with_ones), started))
    return reports


def verify_theorem5(diagram: KnotDiagram) -> VerificationReport:
    """s(D) and the c single-crossing-change sequences are independent"""
    instance = render(diagram)
    c = diagram.crossing_count
    started = time.perf_counter()
    rows = [list(warping_degree_sequence(diagram))]
    rows.extend(
        list(warping_degree_sequence(crossing_change(diagram, i)))
        for i in range(1, c + 1)
    )
    return _report(Claim.THEOREM5, instance, c + 1, rank_bareiss(rows), started)


def verify_lemma31(trials: int, seed: int = 42, c_range: Tuple[int, int] = (2, 10),
                   a_range: Tuple[int, int] = (-50, 50)) -> VerificationReport:
    """Bareiss determinant of the lemma matrices against the closed form, both variants"""
    low, high = c_range
    instance = f"trials={trials} seed={seed} c={low}..{high} a={a_range[0]}..{a_range[1]}"
    started = time.perf_counter()
    if low < 2 or high < low:
        return _report(Claim.LEMMA31, instance, trials, f"invalid c range {low}..{high}", started)

    rng = np.random.default_rng(seed)
    agreed = 0
    for _ in range(trials):
        c = int(rng.integers(low, high + 1))
        a = [int(x) for x in rng.integers(a_range[0], a_range[1] + 1, size=c + 1)]
        if all(
            det_exact(lemma_matrix(a, variant).entries) == lemma_det_closed_form(a, variant)
            for variant in LemmaVariant
        ):
            agreed += 1
    return _report(Claim.LEMMA31, instance, trials, agreed, started)


# =============================================================================
# Driver
# =============================================================================

def verify_instance(projection: KnotProjection, indices: Sequence[int],
                    limit: Optional[int] = None) -> List[VerificationReport]:
    """Every projection claim on P plus every diagram claim on the listed diagrams"""
    diagrams = [KnotDiagram(projection, index) for index in indices]
    reports = []
    reports.extend(verify_matrix_properties(projection, limit=limit))
    reports.extend(verify_ou_claims(projection, diagrams, limit=limit))
    reports.append(verify_theorem1(projection, limit=limit))
    reports.append(verify_proof_witness(projection, limit=limit))
    reports.extend(verify_rank_oracle(projection, limit=limit))
    for diagram in diagrams:
        reports.append(verify_theorem2(diagram, limit=limit))
        reports.extend(verify_incidence_claims(diagram))
        reports.append(verify_theorem5(diagram))
    logger.debug(f"Verified {render(projection)}: {len(reports)} reports")
    return reports


def _verify_instance_task(args) -> List[VerificationReport]:
    return verify_instance(*args)


def verify_all(scope: VerificationScope, jobs: int = 1) -> List[VerificationReport]:
    """Run every verifier over a scope; reports sorted by (claim, instance)"""
    started = time.perf_counter()
    instances = scope_instances(scope)
    logger.info(f"Verifying {len(instances)} projection(s) in {scope.kind} scope with {jobs} job(s)")

    reports: List[VerificationReport] = []
    if jobs > 1 and len(instances) > 1:
        chunksize = max(1, len(instances) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            for batch in executor.map(_verify_instance_task, instances, chunksize=chunksize):
                reports.extend(batch)
    else:
        for instance in instances:
            reports.extend(_verify_instance_task(instance))

    if scope.lemma_trials > 0:
        reports.append(verify_lemma31(scope.lemma_trials, seed=scope.seed))

    reports.sort(key=lambda report: report.sort_key)
    summary = summarize(reports)
    logger.info(
        f"Verification finished: {summary['total']} reports, {summary['failed']} failed "
        f"in {int((time.perf_counter() - started) * 1000)}ms"
    )
    return reports


def summarize(reports: Sequence[VerificationReport]) -> Dict[str, Any]:
    failed = [report for report in reports if not report.passed]
    return {
        'total': len(reports),
        'passed': len(reports) - len(failed),
        'failed': len(failed),
        'failedClaims': sorted({report.claim for report in failed}),
        'success': not failed,
    }


def render_json_lines(reports: Sequence[VerificationReport], timings: bool = False) -> str:
    return ''.join(
        json.dumps(report.to_dict(timings=timings)) + '\n'
        for report in reports
    )


def render_table(reports: Sequence[VerificationReport], timings: bool = False) -> str:
    """Per-claim totals followed by one line per failed report"""
    per_claim: Dict[str, List[int]] = {}
    elapsed: Dict[str, float] = {}
    for report in reports:
        counts = per_claim.setdefault(report.claim, [0, 0])
        counts[0] += 1
        if not report.passed:
            counts[1] += 1
        elapsed[report.claim] = elapsed.get(report.claim, 0.0) + report.runtime_ms

    header = f"{'claim':<16}{'instances':>10}{'failed':>8}"
    if timings:
        header += f"{'ms':>12}"
    lines = [header, '-' * len(header)]
    for claim in sorted(per_claim):
        total, failed = per_claim[claim]
        line = f"{claim:<16}{total:>10}{failed:>8}"
        if timings:
            line += f"{elapsed[claim]:>12.1f}"
        lines.append(line)

    failures = [report for report in reports if not report.passed]
    if failures:
        lines.append('')
        lines.append('FAILED')
        for report in failures:
            lines.append(
                f"  {report.claim} [{report.instance}] expected {report.expected!r}, "
                f"got {report.actual!r} (realizability {report.realizability})"
            )

    summary = summarize(reports)
    lines.append('')
    lines.append(f"{summary['passed']}/{summary['total']} reports passed")
    return '\n'.join(lines) + '\n'
