"""
Computation API Routes
Warping matrices, ou matrices, incidence matrices, Gauss diagrams and ranks
"""

import logging
from flask import Blueprint, Response, jsonify, request

from src.services.exactla import rank_bareiss
from src.services.knotio import KnotDiagram, parse_code, parse_diagram_arg, parse_projection, render
from src.services.warpcore import incidence_matrix, warping_degree_sequence
from src.services.warpmat import (
    canonical_form,
    column_pairs,
    gauss_diagram,
    ou_matrix,
    streaming_rank,
    warping_matrix,
    warping_matrix_without_signs,
)
from src.utils.errors import InputError, error_response
from src.utils.matrix_io import dump_matrix, from_json, to_json_dict

logger = logging.getLogger(__name__)

bp = Blueprint('api', __name__)

TEXT_MIMETYPES = {
    'text': 'text/plain',
    'csv': 'text/csv',
    'tsv': 'text/tab-separated-values',
}


def code_arg():
    code = request.args.get('code', '')
    if not code.strip():
        raise InputError("query parameter 'code' is required")
    return code


def int_arg(name, default=None):
    raw = request.args.get(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"query parameter '{name}' must be an integer, got {raw!r}")


def diagram_arg():
    """Annotated code, or plain code plus ?assignment="""
    return parse_diagram_arg(code_arg(), int_arg('assignment'))


def matrix_response(matrix, **extra):
    """JSON envelope by default; ?format=text|csv|tsv returns the serialized matrix"""
    format_type = request.args.get('format', 'json')
    if format_type == 'json':
        return jsonify({'success': True, 'matrix': to_json_dict(matrix), **extra})
    if format_type not in TEXT_MIMETYPES:
        raise InputError(f"unknown format {format_type!r}")
    return Response(dump_matrix(matrix, format_type), mimetype=TEXT_MIMETYPES[format_type])


def failure(e):
    body, status = error_response(e)
    return jsonify(body), status


@bp.route('/wm', methods=['GET'])
def get_warping_matrix():
    """
    M(P) for a projection

    Query params:
    - code: Gauss code (O/U prefixes ignored)
    - format: json, text, csv, tsv (default: json)
    """
    try:
        projection = parse_projection(code_arg())
        return matrix_response(warping_matrix(projection), code=render(projection))
    except Exception as e:
        return failure(e)


@bp.route('/wmbar', methods=['GET'])
def get_warping_matrix_without_signs():
    """M̄(D): M(P) without the row of D"""
    try:
        diagram = diagram_arg()
        return matrix_response(
            warping_matrix_without_signs(diagram),
            diagram=render(diagram),
            assignment=diagram.assignment_index,
        )
    except Exception as e:
        return failure(e)


@bp.route('/ou', methods=['GET'])
def get_ou_matrix():
    try:
        projection = parse_projection(code_arg())
        return matrix_response(ou_matrix(projection), code=render(projection))
    except Exception as e:
        return failure(e)


@bp.route('/incidence', methods=['GET'])
def get_incidence_matrix():
    try:
        diagram = diagram_arg()
        return matrix_response(incidence_matrix(diagram), diagram=render(diagram))
    except Exception as e:
        return failure(e)


@bp.route('/sequence', methods=['GET'])
def get_sequence():
    """Warping degree sequence s(D)"""
    try:
        diagram = diagram_arg()
        return jsonify({
            'success': True,
            'diagram': render(diagram),
            'assignment': diagram.assignment_index,
            'sequence': list(warping_degree_sequence(diagram)),
        })
    except Exception as e:
        return failure(e)


@bp.route('/pairs', methods=['GET'])
def get_pairs():
    """Zero-sum column pairs of U(P), 1-based"""
    try:
        projection = parse_projection(code_arg())
        chords = column_pairs(ou_matrix(projection))
        return jsonify({
            'success': True,
            'code': render(projection),
            'pairs': [list(pair) for pair in chords.pairs],
        })
    except Exception as e:
        return failure(e)


@bp.route('/gauss', methods=['GET'])
def get_gauss_diagram():
    """
    Gauss diagram recovered from one source

    Query params:
    - code: Gauss code or annotated code
    - source: projection, ou, incidence (default: projection)
    - assignment: assignment index when source=incidence and code is plain
    """
    try:
        source = request.args.get('source', 'projection')
        if source == 'projection':
            chords = gauss_diagram(parse_code(code_arg()))
        elif source == 'ou':
            chords = gauss_diagram(ou_matrix(parse_projection(code_arg())))
        elif source == 'incidence':
            chords = gauss_diagram(incidence_matrix(diagram_arg()))
        else:
            raise InputError(f"unknown source {source!r}")
        return jsonify({
            'success': True,
            'source': source,
            'size': chords.size,
            'pairs': [list(pair) for pair in chords.pairs],
        })
    except Exception as e:
        return failure(e)


@bp.route('/canon', methods=['POST'])
def post_canonical_form():
    """Body: matrix JSON {"c", "labels", "rows"}"""
    try:
        matrix = from_json(request.get_json(silent=True))
        return jsonify({'success': True, 'matrix': to_json_dict(canonical_form(matrix))})
    except Exception as e:
        return failure(e)


@bp.route('/rank', methods=['POST'])
def post_rank():
    """
    Exact rank

    Body params (one of):
    - rows (+ labels, c): a serialized matrix
    - code: build M(P) (or M̄(D) for an annotated code) and rank it by streaming
    """
    try:
        data = request.get_json(silent=True) or {}
        if 'code' in data:
            parsed = parse_code(str(data['code']))
            if isinstance(parsed, KnotDiagram):
                accumulator = streaming_rank(parsed.projection, exclude=parsed.assignment_index)
            else:
                accumulator = streaming_rank(parsed)
            return jsonify({'success': True, 'code': render(parsed), 'rank': accumulator.rank})

        matrix = from_json(data)
        return jsonify({'success': True, 'rank': rank_bareiss(matrix.tolist(), matrix.width)})
    except Exception as e:
        return failure(e)
