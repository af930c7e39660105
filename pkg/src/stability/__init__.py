"""Stability experiments, rate fits and the Hankel counterexample"""
