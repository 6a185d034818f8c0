"""
Verification API Routes
Runs the claim verifier and lists recorded runs
"""

import logging
from flask import Blueprint, jsonify, request

from src.config.settings import load_settings
from src.models.verification_run import VerificationRun
from src.routes.api_routes import failure
from src.services.run_log import record_run
from src.services.verification_service import VerificationScope, summarize, verify_all
from src.constants.claims import Scope
from src.utils.errors import InputError

logger = logging.getLogger(__name__)

bp = Blueprint('verify', __name__, url_prefix='/api/verify')

MAX_RUNS = 100


def scope_from_body(data) -> VerificationScope:
    """Build a scope from a request body, rejecting unknown or non-integer values"""
    kind = data.get('scope', Scope.CORPUS)
    if kind not in Scope.ALL:
        raise InputError(f"scope must be one of {', '.join(Scope.ALL)}")

    values = {}
    fields = {
        'maxCrossings': 'max_crossings',
        'n': 'count',
        'crossings': 'crossings',
        'seed': 'seed',
        'diagramsPerWord': 'diagrams_per_word',
        'lemmaTrials': 'lemma_trials',
    }
    for key, attribute in fields.items():
        if key in data:
            value = data[key]
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise InputError(f"'{key}' must be a non-negative integer")
            values[attribute] = value
    return VerificationScope(kind=kind, **values)


@bp.route('', methods=['POST'])
@bp.route('/', methods=['POST'])
def run_verification():
    """
    Run the verifier and record the run

    Body params:
    - scope: corpus, exhaustive, random (default: corpus)
    - maxCrossings, n, crossings, seed, diagramsPerWord, lemmaTrials
    - includeReports: Boolean - include every report (default: failed only)
    """
    try:
        data = request.get_json(silent=True) or {}
        scope = scope_from_body(data)
        jobs = load_settings().jobs

        run = record_run(scope, lambda: verify_all(scope, jobs=jobs))
        reports = run.reports
        summary = summarize(reports)

        shown = reports if data.get('includeReports') else [r for r in reports if not r.passed]
        return jsonify({
            'success': True,
            'run': run.record.to_dict(),
            'summary': summary,
            'reports': [r.to_dict() for r in shown],
        })

    except Exception as e:
        return failure(e)


@bp.route('/runs', methods=['GET'])
def list_runs():
    """
    Recent verification runs, newest first

    Query params:
    - limit: Max results (default 20)
    """
    try:
        try:
            limit = min(int(request.args.get('limit', 20)), MAX_RUNS)
        except ValueError:
            raise InputError("'limit' must be an integer")

        runs = VerificationRun.query.order_by(VerificationRun.started_at.desc(),
                                              VerificationRun.id.desc()).limit(limit).all()
        return jsonify({
            'success': True,
            'runs': [run.to_dict() for run in runs],
            'count': len(runs)
        })

    except Exception as e:
        return failure(e)
