"""
Initialize database and create tables
Run this before first use: python init_db.py
"""

from app import create_app
from src.config.extensions import db

app = create_app()

with app.app_context():
    # Import all models to ensure they're registered
    from src.models.verification_run import VerificationRun  # noqa: F401

    # Create all tables
    db.create_all()

    print("Database tables created successfully!")
    print("\nCreated tables:")
    print("- verification_runs")
