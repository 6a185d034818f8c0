"""
VerificationRun Model - Log of verification runs and their outcome
"""

import json
from datetime import datetime
from src.config.extensions import db


class VerificationRun(db.Model):
    """One run of the claim verifier over a scope"""

    __tablename__ = 'verification_runs'

    id = db.Column(db.Integer, primary_key=True)

    # Run details
    scope = db.Column(db.String(50), nullable=False)  # corpus, exhaustive, random
    parameters = db.Column(db.Text)  # JSON-encoded scope parameters
    status = db.Column(db.String(50))  # success, failed, error

    # Results
    reports_total = db.Column(db.Integer, default=0)
    reports_failed = db.Column(db.Integer, default=0)
    failed_claims = db.Column(db.Text)  # JSON list of claim identifiers

    error_message = db.Column(db.Text)

    # Performance
    duration_ms = db.Column(db.Integer)

    # Timing
    started_at = db.Column(db.DateTime, default=datetime.utcnow)
    completed_at = db.Column(db.DateTime)

    def to_dict(self):
        """Convert run to dictionary for JSON serialization"""
        return {
            'id': self.id,
            'scope': self.scope,
            'parameters': json.loads(self.parameters) if self.parameters else {},
            'status': self.status,
            'reportsTotal': self.reports_total,
            'reportsFailed': self.reports_failed,
            'failedClaims': json.loads(self.failed_claims) if self.failed_claims else [],
            'errorMessage': self.error_message,
            'durationMs': self.duration_ms,
            'startedAt': self.started_at.isoformat() if self.started_at else None,
            'completedAt': self.completed_at.isoformat() if self.completed_at else None
        }

    def __repr__(self):
        return f'<VerificationRun {self.id}: {self.scope} - {self.status}>'
