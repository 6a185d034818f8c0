"""API routes"""
from . import api_routes, export_routes, verify_routes

__all__ = ['api_routes', 'export_routes', 'verify_routes']
