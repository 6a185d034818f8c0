"""warpmatrix source package"""
