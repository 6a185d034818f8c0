"""
Export API Routes
Matrix downloads as CSV, TSV, JSON or XLSX
"""

import logging
from datetime import datetime
from flask import Blueprint, Response, jsonify, request

from src.routes.api_routes import code_arg, diagram_arg, failure
from src.services.knotio import parse_projection, render
from src.services.warpcore import incidence_matrix
from src.services.warpmat import ou_matrix, warping_matrix, warping_matrix_without_signs
from src.utils.errors import InputError
from src.utils.matrix_io import dump_matrix, to_json_dict, to_xlsx

logger = logging.getLogger(__name__)

bp = Blueprint('export', __name__, url_prefix='/api/export')

XLSX_MIMETYPE = 'application/vnd.openxmlformats-officedocument.spreadsheetml.sheet'


def build_matrix(kind):
    if kind == 'wm':
        projection = parse_projection(code_arg())
        return warping_matrix(projection), render(projection)
    if kind == 'ou':
        projection = parse_projection(code_arg())
        return ou_matrix(projection), render(projection)
    if kind == 'wmbar':
        diagram = diagram_arg()
        return warping_matrix_without_signs(diagram), render(diagram)
    if kind == 'incidence':
        diagram = diagram_arg()
        return incidence_matrix(diagram), render(diagram)
    raise InputError(f"unknown matrix kind {kind!r}")


@bp.route('/<kind>', methods=['GET'])
def export_matrix(kind):
    """
    Export a matrix

    Query params:
    - code: Gauss code (annotated, or plain + assignment for wmbar/incidence)
    - format: csv, tsv, json, xlsx (default: json)
    """
    try:
        format_type = request.args.get('format', 'json')
        matrix, instance = build_matrix(kind)

        if format_type == 'json':
            return jsonify({
                'success': True,
                'kind': kind,
                'instance': instance,
                'matrix': to_json_dict(matrix),
                'exported_at': datetime.utcnow().isoformat()
            })

        filename = f'{kind}-c{matrix.crossing_count}-{datetime.now().strftime("%Y%m%d")}.{format_type}'
        headers = {'Content-Disposition': f'attachment; filename={filename}'}

        if format_type == 'xlsx':
            return Response(to_xlsx(matrix, title=kind), mimetype=XLSX_MIMETYPE, headers=headers)

        if format_type not in ('csv', 'tsv'):
            raise InputError(f"unknown export format {format_type!r}")

        content_type = 'text/tab-separated-values' if format_type == 'tsv' else 'text/csv'
        logger.info(f"Exporting {kind} for {instance} as {format_type}")
        return Response(dump_matrix(matrix, format_type), mimetype=content_type, headers=headers)

    except Exception as e:
        return failure(e)
