"""Special functions and quadrature"""
