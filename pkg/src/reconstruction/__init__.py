"""Herglotz densities, inversion formula and indicator recovery"""
