"""
Run Log Service - Records verification runs in the database
"""

import json
import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, List

from src.config.extensions import db
from src.models.verification_run import VerificationRun
from src.services.verification_service import VerificationReport, VerificationScope, summarize

logger = logging.getLogger(__name__)


@dataclass
class RecordedRun:
    record: VerificationRun
    reports: List[VerificationReport]


def record_run(scope: VerificationScope,
               runner: Callable[[], List[VerificationReport]]) -> RecordedRun:
    """
    Run `runner` and log the outcome as a VerificationRun.
    Must be called inside an application context.
    """
    run = VerificationRun(
        scope=scope.kind,
        parameters=json.dumps(scope.to_dict()),
        status='started',
        started_at=datetime.utcnow()
    )
    db.session.add(run)
    db.session.commit()

    try:
        reports = runner()
    except Exception as e:
        run.status = 'error'
        run.error_message = str(e)
        run.completed_at = datetime.utcnow()
        run.duration_ms = int((run.completed_at - run.started_at).total_seconds() * 1000)
        db.session.commit()
        logger.error(f"Verification run {run.id} failed: {e}")
        raise

    summary = summarize(reports)
    run.status = 'success' if summary['success'] else 'failed'
    run.reports_total = summary['total']
    run.reports_failed = summary['failed']
    run.failed_claims = json.dumps(summary['failedClaims'])
    run.completed_at = datetime.utcnow()
    run.duration_ms = int((run.completed_at - run.started_at).total_seconds() * 1000)
    db.session.commit()

    logger.info(f"Recorded verification run {run.id}: {run.status}, {run.reports_failed}/{run.reports_total} failed")
    return RecordedRun(run, reports)
