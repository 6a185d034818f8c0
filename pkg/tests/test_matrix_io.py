import json

import pytest

from src.services.warpcore import IncidenceMatrix, IntMatrix
from src.services.warpmat import WarpingMatrix, warping_matrix
from src.utils.errors import InputError, MalformedSource, UnreadableMatrix, WidthMismatch
from src.utils.matrix_io import (
    dump_matrix,
    from_delimited,
    from_json,
    from_text,
    from_xlsx,
    load_matrix,
    to_delimited,
    to_json_dict,
    to_text,
    to_xlsx,
)


@pytest.fixture
def labeled(double_twist):
    return warping_matrix(double_twist)


@pytest.fixture
def plain():
    return IntMatrix([[1, -1], [0, 2]])


class TestWriters:
    def test_text_labeled(self, labeled):
        assert to_text(labeled).splitlines()[0] == "0: 2 1 0 1"

    def test_text_plain(self, plain):
        assert to_text(plain) == "1 -1\n0 2\n"

    def test_text_empty(self):
        assert to_text(IntMatrix([])) == ""

    def test_csv(self, labeled):
        lines = to_delimited(labeled).splitlines()
        assert lines[0] == "label,b1,b2,b3,b4"
        assert lines[1] == "0,2,1,0,1"

    def test_tsv_plain(self, plain):
        assert to_delimited(plain, '\t').splitlines() == ["b1\tb2", "1\t-1", "0\t2"]

    def test_json(self, labeled):
        data = to_json_dict(labeled)
        assert data['c'] == 2
        assert data['labels'] == [0, 1, 2, 3]
        assert data['rows'][3] == [0, 1, 2, 1]

    def test_json_unlabeled(self, plain):
        assert json.loads(dump_matrix(plain, 'json')) == {'c': 1, 'labels': None, 'rows': [[1, -1], [0, 2]]}

    def test_unknown_format(self, plain):
        with pytest.raises(MalformedSource):
            dump_matrix(plain, 'xml')


class TestReaders:
    def test_text(self):
        matrix = from_text("1 2 3\n4 5 6\n")
        assert matrix.tolist() == [[1, 2, 3], [4, 5, 6]]
        assert matrix.labels is None

    def test_text_labels(self, labeled):
        matrix = from_text(to_text(labeled), WarpingMatrix)
        assert isinstance(matrix, WarpingMatrix)
        assert matrix.labels == labeled.labels
        assert matrix.same_rows(labeled)

    def test_text_mixed_labels(self):
        with pytest.raises(MalformedSource):
            from_text("0: 1 2\n3 4")

    def test_csv_with_label_header(self, labeled):
        matrix = from_delimited(to_delimited(labeled))
        assert matrix.labels == (0, 1, 2, 3)
        assert matrix.same_rows(labeled)

    def test_csv_with_column_header(self):
        assert from_delimited("b1,b2\n1,0\n0,1\n").tolist() == [[1, 0], [0, 1]]

    def test_csv_without_header(self):
        assert from_delimited("1,0\n0,1\n").tolist() == [[1, 0], [0, 1]]

    def test_json_string(self):
        matrix = from_json('{"rows": [[1, 1], [2, 2]]}', IncidenceMatrix)
        assert isinstance(matrix, IncidenceMatrix)
        assert matrix.tolist() == [[1, 1], [2, 2]]

    def test_json_accepts_integral_floats(self):
        assert from_json({'rows': [[1.0, 2.0]]}).tolist() == [[1, 2]]

    @pytest.mark.parametrize("payload", [
        '{"rows": [[1, 2.5]]}',
        '{"rows": [[true, 1]]}',
        '{"rows": [[1, 2]',
    ])
    def test_unreadable_json(self, payload):
        with pytest.raises(UnreadableMatrix) as exc:
            from_json(payload)
        assert isinstance(exc.value, InputError)

    @pytest.mark.parametrize("payload", [
        '{"rows": "1 2"}',
        '[[1, 2]]',
        '{"rows": [[1, 2]], "c": 3}',
        '{"rows": [[1, 2]], "labels": [0, 1]}',
        '{"rows": [1, 2]}',
    ])
    def test_bad_json(self, payload):
        with pytest.raises(MalformedSource):
            from_json(payload)

    def test_width_mismatch(self):
        with pytest.raises(WidthMismatch):
            from_text("1 2\n3")

    def test_non_integer(self):
        with pytest.raises(UnreadableMatrix):
            from_text("1 x")

    @pytest.mark.parametrize("reader, text", [
        (from_json, '{"rows": [[99999999999999999999, 1], [1, 1]]}'),
        (from_text, "99999999999999999999 1\n1 1\n"),
        (from_delimited, "1,-9223372036854775809\n"),
    ])
    def test_entries_beyond_int64(self, reader, text):
        with pytest.raises(MalformedSource):
            reader(text)

    def test_int64_bounds_are_accepted(self):
        assert from_text("9223372036854775807 -9223372036854775808").tolist() == [
            [9223372036854775807, -9223372036854775808]]

    def test_xlsx(self, labeled):
        matrix = from_xlsx(to_xlsx(labeled, title='wm'))
        assert matrix.labels == labeled.labels
        assert matrix.same_rows(labeled)

    def test_xlsx_garbage(self):
        with pytest.raises(MalformedSource):
            from_xlsx(b"not a workbook")


class TestLoadMatrix:
    def test_detects_json(self):
        assert load_matrix(' {"rows": [[1, 0]]}\n').tolist() == [[1, 0]]

    def test_detects_tsv(self):
        assert load_matrix("1\t2\n3\t4\n").tolist() == [[1, 2], [3, 4]]

    def test_detects_csv(self):
        assert load_matrix("1,2\n3,4\n").tolist() == [[1, 2], [3, 4]]

    def test_detects_text(self):
        assert load_matrix("1 2\n3 4\n").tolist() == [[1, 2], [3, 4]]

    def test_empty(self):
        with pytest.raises(MalformedSource):
            load_matrix("  \n")
