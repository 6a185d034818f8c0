"""
Shared fixtures: Flask app on in-memory SQLite, test client, click runner,
and the projections used across the suite
"""

import pytest
from click.testing import CliRunner

from app import create_app
from src.config.extensions import db
from src.services.knotio import parse_diagram, parse_projection


@pytest.fixture
def app():
    app = create_app({
        'SQLALCHEMY_DATABASE_URI': 'sqlite:///:memory:',
        'TESTING': True,
    })
    yield app
    with app.app_context():
        db.session.remove()
        db.drop_all()


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def double_twist():
    return parse_projection("1 2 2 1")


@pytest.fixture
def trefoil():
    return parse_projection("1 2 3 1 2 3")


@pytest.fixture
def alternating_trefoil():
    return parse_diagram("O1 U2 O3 U1 O2 U3")


@pytest.fixture
def example_diagram():
    """Both first passes over: the (0 1 2 1) row of the double twist"""
    return parse_diagram("O1 O2 U2 U1")
