"""Database models for warpmatrix"""

from src.models.verification_run import VerificationRun

__all__ = ['VerificationRun']
