"""
warpmatrix - API Application
JSON API over the warping matrix computations and the claim verifier
"""

import os
from flask import Flask, jsonify
from flask_cors import CORS
from datetime import datetime
import logging
from sqlalchemy import text

from src.config.settings import load_settings

logger = logging.getLogger(__name__)


def create_app(overrides=None):
    """
    Application factory (gunicorn entry: "app:create_app()")

    overrides: optional mapping merged over the Flask config, e.g.
    {'SQLALCHEMY_DATABASE_URI': 'sqlite:///:memory:'} in tests.
    """
    settings = load_settings()
    logging.basicConfig(level=getattr(logging, settings.log_level, logging.INFO))

    app = Flask(__name__)

    # Configuration
    app.config['SQLALCHEMY_DATABASE_URI'] = settings.database_url
    app.config['SQLALCHEMY_TRACK_MODIFICATIONS'] = False
    app.config['JSON_SORT_KEYS'] = False
    if overrides:
        app.config.update(overrides)

    # Initialize extensions
    from src.config.extensions import db
    db.init_app(app)

    CORS(app, origins=list(settings.cors_origins),
         allow_headers=['Content-Type'],
         methods=['GET', 'POST', 'OPTIONS'])

    # Import models after db initialization
    from src.models.verification_run import VerificationRun  # noqa: F401

    with app.app_context():
        db.create_all()

    @app.route('/health')
    def health_check():
        """Health check endpoint"""
        try:
            # Test database connection
            db.session.execute(text('SELECT 1'))
            return jsonify({
                'status': 'healthy',
                'timestamp': datetime.utcnow().isoformat(),
                'database': 'connected'
            }), 200
        except Exception as e:
            logger.error(f"Health check failed: {e}")
            return jsonify({
                'status': 'unhealthy',
                'timestamp': datetime.utcnow().isoformat(),
                'error': str(e)
            }), 500

    # Import and register API routes
    from src.routes.api_routes import bp as api_bp
    from src.routes.export_routes import bp as export_bp
    from src.routes.verify_routes import bp as verify_bp

    app.register_blueprint(api_bp, url_prefix='/api')
    app.register_blueprint(export_bp)
    app.register_blueprint(verify_bp)

    @app.errorhandler(404)
    def not_found(error):
        return jsonify({'success': False, 'error': 'Not found'}), 404

    @app.errorhandler(500)
    def internal_error(error):
        db.session.rollback()
        logger.error(f"Internal error: {error}")
        return jsonify({'success': False, 'error': 'Internal server error'}), 500

    logger.info(f"warpmatrix API ready (database: {app.config['SQLALCHEMY_DATABASE_URI'].split('://')[0]})")
    return app


if __name__ == '__main__':
    port = int(os.getenv('PORT', 5000))
    debug = os.getenv('FLASK_ENV') == 'development'

    logger.info(f"Starting warpmatrix API on port {port}")
    create_app().run(host='0.0.0.0', port=port, debug=debug)
