"""Utility modules for warpmatrix"""
