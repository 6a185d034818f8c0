"""Services for warpmatrix"""
