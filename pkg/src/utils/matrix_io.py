"""
Matrix serialization: text grid, CSV/TSV, JSON and XLSX

JSON is {"c": ..., "labels": [...], "rows": [[...]]}. Text and delimited
formats carry the row label in a leading field when the matrix has labels.
Every reader returns an IntMatrix (or the requested subclass) and checks that
rows share one width.
"""

import csv
import io
import json
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np
import openpyxl

from src.services.warpcore import IntMatrix
from src.utils.errors import MalformedSource, UnreadableMatrix, WidthMismatch

logger = logging.getLogger(__name__)

FORMATS = ['text', 'csv', 'tsv', 'json', 'xlsx']
LABEL_HEADER = 'label'
ENTRY_LIMIT = 2 ** 63


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool):
        raise UnreadableMatrix(f"non-integer entry {value!r} at {where}")
    if isinstance(value, float):
        if not value.is_integer():
            raise UnreadableMatrix(f"non-integer entry {value!r} at {where}")
        value = int(value)
    try:
        number = int(str(value).strip())
    except (TypeError, ValueError):
        raise UnreadableMatrix(f"non-integer entry {value!r} at {where}")
    if not -ENTRY_LIMIT <= number < ENTRY_LIMIT:
        raise MalformedSource(f"entry {number} at {where} does not fit in a signed 64-bit integer")
    return number


def _build(rows: List[List[int]], labels: Optional[List[int]],
           cls: Type[IntMatrix]) -> IntMatrix:
    if rows:
        width = len(rows[0])
        for index, row in enumerate(rows):
            if len(row) != width:
                raise WidthMismatch(index, len(row), width)
    matrix = np.array(rows, dtype=np.int64) if rows else np.zeros((0, 0), dtype=np.int64)
    return cls(matrix, tuple(labels) if labels is not None else None)


def _header(width: int) -> List[str]:
    return [f"b{j}" for j in range(1, width + 1)]


# =============================================================================
# Writers
# =============================================================================

def to_text(matrix: IntMatrix) -> str:
    """Space-separated grid; labeled rows read 'label: a b c ...'"""
    lines = []
    for index, row in enumerate(matrix.tolist()):
        body = ' '.join(str(x) for x in row)
        if matrix.labels is not None:
            lines.append(f"{matrix.labels[index]}: {body}")
        else:
            lines.append(body)
    return '\n'.join(lines) + ('\n' if lines else '')


def to_delimited(matrix: IntMatrix, delimiter: str = ',') -> str:
    output = io.StringIO()
    writer = csv.writer(output, delimiter=delimiter, lineterminator='\n')
    labeled = matrix.labels is not None
    writer.writerow(([LABEL_HEADER] if labeled else []) + _header(matrix.width))
    for index, row in enumerate(matrix.tolist()):
        writer.writerow(([matrix.labels[index]] if labeled else []) + row)
    return output.getvalue()


def to_json_dict(matrix: IntMatrix) -> Dict[str, Any]:
    return {
        'c': matrix.crossing_count,
        'labels': list(matrix.labels) if matrix.labels is not None else None,
        'rows': matrix.tolist(),
    }


def to_json(matrix: IntMatrix) -> str:
    return json.dumps(to_json_dict(matrix))


def to_xlsx(matrix: IntMatrix, title: str = 'matrix') -> bytes:
    workbook = openpyxl.Workbook()
    worksheet = workbook.active
    worksheet.title = title[:31]
    labeled = matrix.labels is not None
    worksheet.append(([LABEL_HEADER] if labeled else []) + _header(matrix.width))
    for index, row in enumerate(matrix.tolist()):
        worksheet.append(([matrix.labels[index]] if labeled else []) + row)

    output = io.BytesIO()
    workbook.save(output)
    workbook.close()
    return output.getvalue()


def dump_matrix(matrix: IntMatrix, fmt: str = 'text') -> str:
    """Serialize to one of the text formats"""
    if fmt == 'text':
        return to_text(matrix)
    if fmt == 'csv':
        return to_delimited(matrix, ',')
    if fmt == 'tsv':
        return to_delimited(matrix, '\t')
    if fmt == 'json':
        return to_json(matrix) + '\n'
    raise MalformedSource(f"unknown text format {fmt!r}")


# =============================================================================
# Readers
# =============================================================================

def from_json(data, cls: Type[IntMatrix] = IntMatrix) -> IntMatrix:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise UnreadableMatrix(f"invalid matrix JSON: {e.msg}")
    if not isinstance(data, dict) or not isinstance(data.get('rows'), list):
        raise MalformedSource("matrix JSON must be an object with a 'rows' list")

    rows = []
    for i, row in enumerate(data['rows']):
        if not isinstance(row, list):
            raise MalformedSource(f"row {i} is not a list")
        rows.append([_int(x, f"row {i}, column {j + 1}") for j, x in enumerate(row)])

    labels = data.get('labels')
    if labels is not None:
        if not isinstance(labels, list):
            raise MalformedSource("'labels' must be a list")
        labels = [_int(x, f"label {i}") for i, x in enumerate(labels)]

    matrix = _build(rows, labels, cls)
    if 'c' in data and data['c'] is not None and rows and _int(data['c'], 'c') != matrix.crossing_count:
        raise MalformedSource(f"'c' is {data['c']} but rows have width {matrix.width}")
    return matrix


def _split_label(fields: Sequence[Any], labeled: bool, where: str) -> Tuple[Optional[int], List[int]]:
    if labeled:
        return _int(fields[0], where), [_int(x, where) for x in fields[1:]]
    return None, [_int(x, where) for x in fields]


def _from_records(records: List[List[Any]], cls: Type[IntMatrix]) -> IntMatrix:
    records = [r for r in records if any(str(x).strip() for x in r if x is not None)]
    labeled = False
    if records and str(records[0][0]).strip().lower() == LABEL_HEADER:
        labeled = True
        records = records[1:]
    elif records and str(records[0][0]).strip().lower().startswith('b'):
        records = records[1:]

    rows, labels = [], []
    for i, record in enumerate(records):
        label, row = _split_label(record, labeled, f"row {i}")
        labels.append(label)
        rows.append(row)
    return _build(rows, labels if labeled else None, cls)


def from_delimited(text: str, delimiter: str = ',', cls: Type[IntMatrix] = IntMatrix) -> IntMatrix:
    return _from_records(list(csv.reader(io.StringIO(text), delimiter=delimiter)), cls)


def from_text(text: str, cls: Type[IntMatrix] = IntMatrix) -> IntMatrix:
    rows, labels = [], []
    for i, line in enumerate(raw for raw in text.splitlines() if raw.strip()):
        label = None
        if ':' in line:
            head, line = line.split(':', 1)
            label = _int(head, f"row {i} label")
        labels.append(label)
        rows.append([_int(x, f"row {i}") for x in line.split()])

    if any(label is not None for label in labels) and any(label is None for label in labels):
        raise MalformedSource("either every row or no row must carry a label")
    labeled = bool(labels) and labels[0] is not None
    return _build(rows, labels if labeled else None, cls)


def from_xlsx(content: bytes, cls: Type[IntMatrix] = IntMatrix) -> IntMatrix:
    try:
        workbook = openpyxl.load_workbook(io.BytesIO(content), data_only=True, read_only=True)
    except Exception as e:
        raise MalformedSource(f"cannot read workbook: {e}")
    try:
        worksheet = workbook.worksheets[0]
        records = [
            [cell for cell in row if cell is not None]
            for row in worksheet.iter_rows(values_only=True)
        ]
    finally:
        workbook.close()
    return _from_records(records, cls)


def load_matrix(text: str, cls: Type[IntMatrix] = IntMatrix) -> IntMatrix:
    """Read JSON, CSV, TSV or a text grid, detecting the format from the content"""
    stripped = text.strip() if text else ''
    if not stripped:
        raise MalformedSource("empty matrix input")
    if stripped.startswith('{'):
        return from_json(stripped, cls)
    if '\t' in stripped:
        return from_delimited(stripped, '\t', cls)
    if ',' in stripped:
        return from_delimited(stripped, ',', cls)
    return from_text(stripped, cls)
