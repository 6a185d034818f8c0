from math import comb

import numpy as np
import pytest

from src.services.knotio import KnotDiagram, parse_diagram, parse_projection
from src.services.warpcore import IncidenceMatrix, IntMatrix, incidence_matrix, warping_degree_sequence
from src.services.warpmat import (
    ChordDiagram,
    OuMatrix,
    WarpingMatrix,
    a_matrix,
    canonical_form,
    column_pairs,
    column_value_counts,
    complete_missing_row,
    gauss_diagram,
    iter_row_blocks,
    ou_matrix,
    ou_matrix_direct,
    row_for_diagram,
    streaming_rank,
    warping_matrix,
    warping_matrix_without_signs,
)
from src.utils.errors import (
    BadDimension,
    MalformedSource,
    PairingIncomplete,
    PairingNotUnique,
    RowMissing,
    TooManyCrossings,
)

# Example matrices as printed, in the printed row order
EXAMPLE_M = [[0, 1, 2, 1], [1, 2, 1, 2], [1, 0, 1, 0], [2, 1, 0, 1]]
EXAMPLE_U = [[1, 1, -1, -1], [1, -1, 1, -1], [-1, 1, -1, 1], [-1, -1, 1, 1]]


def as_row_set(matrix):
    return sorted(tuple(row) for row in matrix.tolist())


class TestWarpingMatrix:
    def test_double_twist_by_index(self, double_twist):
        matrix = warping_matrix(double_twist)
        assert isinstance(matrix, WarpingMatrix)
        assert matrix.tolist() == [[2, 1, 0, 1], [1, 2, 1, 2], [1, 0, 1, 0], [0, 1, 2, 1]]
        assert matrix.labels == (0, 1, 2, 3)

    def test_double_twist_matches_printed_example(self, double_twist):
        assert as_row_set(warping_matrix(double_twist)) == sorted(map(tuple, EXAMPLE_M))
        assert canonical_form(warping_matrix(double_twist)).same_rows(canonical_form(IntMatrix(EXAMPLE_M)))

    def test_curl(self):
        assert as_row_set(warping_matrix(parse_projection("1 1"))) == [(0, 1), (1, 0)]

    def test_trefoil_contains_alternating_row(self, trefoil):
        matrix = warping_matrix(trefoil)
        assert matrix.shape == (8, 6)
        assert matrix.tolist()[5] == [1, 2, 1, 2, 1, 2]

    def test_rows_are_sequences(self, trefoil):
        matrix = warping_matrix(trefoil)
        for index in range(8):
            assert tuple(matrix.tolist()[index]) == warping_degree_sequence(KnotDiagram(trefoil, index))

    @pytest.mark.parametrize("code", ["1 2 2 1", "1 2 3 1 2 3", "1 2 3 4 2 1 4 3"])
    def test_binomial_column_counts(self, code):
        projection = parse_projection(code)
        c = projection.crossing_count
        for counts in column_value_counts(warping_matrix(projection)):
            assert counts == {n: comb(c, n) for n in range(c + 1)}

    def test_complementary_rows(self, trefoil):
        rows = warping_matrix(trefoil).rows
        for index in range(8):
            assert (rows[index] + rows[7 ^ index] == 3).all()

    def test_limit(self, trefoil):
        with pytest.raises(TooManyCrossings) as exc:
            warping_matrix(trefoil, limit=2)
        assert exc.value.limit == 2

    def test_limit_from_environment(self, trefoil, monkeypatch):
        monkeypatch.setenv('WARPMATRIX_MATERIALIZE_LIMIT', '2')
        with pytest.raises(TooManyCrossings):
            warping_matrix(trefoil)

    def test_row_blocks_cover_all_indices(self, trefoil):
        blocks = list(iter_row_blocks(trefoil, block_size=3))
        assert [len(indices) for indices, _ in blocks] == [3, 3, 2]
        stacked = np.vstack([block for _, block in blocks])
        assert np.array_equal(stacked, warping_matrix(trefoil).rows)

    def test_parallel_build_matches_serial(self):
        projection = parse_projection("1 2 3 4 5 6 7 1 2 3 4 5 6 7 8 9 10 11 12 13 8 9 10 11 12 13")
        serial = warping_matrix(projection)
        parallel = warping_matrix(projection, jobs=2)
        assert serial.same_rows(parallel)
        assert serial.labels == parallel.labels


class TestWarpingMatrixWithoutSigns:
    def test_alternating_trefoil_missing_row(self, alternating_trefoil):
        matrix = warping_matrix_without_signs(alternating_trefoil)
        assert matrix.shape == (7, 6)
        assert 5 not in matrix.labels
        assert complete_missing_row(matrix) == (1, 2, 1, 2, 1, 2)

    def test_example_diagram(self, example_diagram):
        matrix = warping_matrix_without_signs(example_diagram)
        assert as_row_set(matrix) == sorted(map(tuple, EXAMPLE_M[1:]))

    def test_curl(self):
        assert warping_matrix_without_signs(parse_diagram("O1 U1")).tolist() == [[1, 0]]

    def test_completion_rejects_full_matrix(self, trefoil):
        with pytest.raises(MalformedSource):
            complete_missing_row(warping_matrix(trefoil))


class TestAMatrix:
    def test_four(self):
        assert a_matrix(4).tolist() == [[-1, 0, 0, 1], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]]

    def test_two(self):
        assert a_matrix(2).tolist() == [[-1, 1], [1, -1]]

    def test_columns_sum_to_zero(self):
        assert (a_matrix(10).sum(axis=0) == 0).all()

    @pytest.mark.parametrize("n", [0, 1, 3, -2])
    def test_bad_dimension(self, n):
        with pytest.raises(BadDimension):
            a_matrix(n)


class TestOuMatrix:
    def test_double_twist(self, double_twist):
        matrix = ou_matrix(double_twist)
        assert isinstance(matrix, OuMatrix)
        assert as_row_set(matrix) == sorted(map(tuple, EXAMPLE_U))

    def test_curl(self):
        assert as_row_set(ou_matrix(parse_projection("1 1"))) == [(-1, 1), (1, -1)]

    def test_product_equals_direct(self):
        rng = np.random.default_rng(11)
        for c in range(1, 8):
            labels = rng.permutation(np.repeat(np.arange(1, c + 1), 2))
            projection = parse_projection(' '.join(str(x) for x in labels))
            product = warping_matrix(projection).rows @ a_matrix(2 * c)
            assert np.array_equal(product, ou_matrix_direct(projection).rows)

    def test_mirror_rows_are_negatives(self, trefoil):
        rows = ou_matrix(trefoil).rows
        for index in range(8):
            assert (rows[index] == -rows[7 ^ index]).all()


class TestColumnPairs:
    def test_double_twist(self, double_twist):
        assert column_pairs(ou_matrix(double_twist)).pairs == ((1, 4), (2, 3))

    def test_trefoil(self, trefoil):
        assert column_pairs(ou_matrix(trefoil)).pairs == ((1, 4), (2, 5), (3, 6))

    def test_curl(self):
        assert column_pairs(ou_matrix(parse_projection("1 1"))).pairs == ((1, 2),)

    def test_incomplete(self):
        with pytest.raises(PairingIncomplete):
            column_pairs(OuMatrix([[1, 1], [1, -1]]))

    def test_not_unique(self):
        with pytest.raises(PairingNotUnique):
            column_pairs(OuMatrix([[1, -1, 1, -1]]))


class TestGaussDiagram:
    def test_sources_agree(self, double_twist, example_diagram):
        expected = ((1, 4), (2, 3))
        assert gauss_diagram(double_twist).pairs == expected
        assert gauss_diagram(ou_matrix(double_twist)).pairs == expected
        assert gauss_diagram(warping_matrix(double_twist)).pairs == expected
        assert gauss_diagram(incidence_matrix(example_diagram)).pairs == expected

    @pytest.mark.parametrize("code", ["1 1", "1 2 1 2", "1 2 3 1 2 3", "1 2 3 4 2 1 4 3"])
    def test_incidence_agrees_for_every_diagram(self, code):
        projection = parse_projection(code)
        expected = gauss_diagram(projection)
        for index in range(2 ** projection.crossing_count):
            assert gauss_diagram(incidence_matrix(KnotDiagram(projection, index))) == expected

    def test_malformed_incidence(self):
        with pytest.raises(MalformedSource):
            gauss_diagram(IncidenceMatrix([[1, 0, 1, 0], [0, 1, 1, 1]]))

    def test_unsupported_source(self):
        with pytest.raises(MalformedSource):
            gauss_diagram("1 2 2 1")

    def test_chord_rotation(self):
        chords = ChordDiagram.from_pairs([(1, 4), (2, 3)], 4)
        assert chords.rotated(1).pairs == ((1, 2), (3, 4))
        assert chords.equivalent(chords.rotated(3))

    def test_rotation_classes(self, double_twist):
        chords = gauss_diagram(double_twist)
        assert chords.canonical().pairs == ((1, 2), (3, 4))
        assert chords.rotated(1).canonical() == chords.canonical()
        assert not chords.equivalent(gauss_diagram(parse_projection("1 2 1 2")))

    def test_chord_must_be_perfect_matching(self):
        with pytest.raises(MalformedSource):
            ChordDiagram.from_pairs([(1, 2), (2, 3)], 4)


class TestCanonicalForm:
    def test_idempotent(self, trefoil):
        once = canonical_form(warping_matrix(trefoil))
        assert canonical_form(once).same_rows(once)

    def test_invariant_under_shuffle_and_rotation(self, trefoil):
        rng = np.random.default_rng(3)
        matrix = warping_matrix(trefoil)
        expected = canonical_form(matrix)
        for _ in range(10):
            rows = np.roll(matrix.rows[rng.permutation(8)], int(rng.integers(6)), axis=1)
            assert canonical_form(WarpingMatrix(rows)).same_rows(expected)

    def test_keeps_type_and_drops_labels(self, trefoil):
        result = canonical_form(warping_matrix(trefoil))
        assert isinstance(result, WarpingMatrix)
        assert result.labels is None

    def test_distinguishes_different_projections(self):
        assert not canonical_form(warping_matrix(parse_projection("1 2 1 2"))).same_rows(
            canonical_form(warping_matrix(parse_projection("1 2 2 1"))))


class TestRowForDiagram:
    def test_example(self, double_twist, example_diagram):
        assert row_for_diagram(warping_matrix(double_twist), example_diagram) == (0, 1, 2, 1)

    def test_trefoil(self, trefoil, alternating_trefoil):
        assert row_for_diagram(warping_matrix(trefoil), alternating_trefoil) == (1, 2, 1, 2, 1, 2)

    def test_deleted_row(self, example_diagram):
        with pytest.raises(RowMissing):
            row_for_diagram(warping_matrix_without_signs(example_diagram), example_diagram)

    def test_wrong_width(self, trefoil, example_diagram):
        with pytest.raises(MalformedSource):
            row_for_diagram(warping_matrix(trefoil), example_diagram)


class TestStreamingRank:
    @pytest.mark.parametrize("code, expected", [
        ("1 1", 2),
        ("1 2 2 1", 3),
        ("1 2 1 2", 3),
        ("1 2 3 1 2 3", 4),
        ("1 2 3 4 2 1 4 3", 5),
    ])
    def test_full_rank(self, code, expected):
        assert streaming_rank(parse_projection(code)).rank == expected

    def test_excluding_a_row(self, alternating_trefoil):
        accumulator = streaming_rank(alternating_trefoil.projection,
                                     exclude=alternating_trefoil.assignment_index)
        assert accumulator.rank == 4
        assert accumulator.rows_seen == 7

    def test_curl_without_signs_has_rank_one(self):
        diagram = parse_diagram("O1 U1")
        accumulator = streaming_rank(diagram.projection, exclude=diagram.assignment_index)
        assert accumulator.rank == 1
        assert accumulator.rows_seen == 1

    def test_small_blocks(self, trefoil):
        assert streaming_rank(trefoil, block_size=1).rank == 4

    def test_sharded(self):
        projection = parse_projection("1 2 3 4 5 1 6 2 7 3 8 4 9 5 10 6 11 7 12 8 13 9 14 10 11 12 13 14")
        assert streaming_rank(projection, jobs=3, block_size=1024).rank == 15

    def test_limit(self, trefoil):
        with pytest.raises(TooManyCrossings):
            streaming_rank(trefoil, limit=2)

    @pytest.mark.slow
    def test_twenty_two_crossings(self):
        labels = list(range(1, 23)) * 2
        projection = parse_projection(' '.join(str(x) for x in labels))
        assert streaming_rank(projection, jobs=4).rank == 23
