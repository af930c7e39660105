"""
Near-Field Comparison
Scattered-field differences on a shell |x| = a2 outside both obstacles
"""

import logging

import numpy as np

from src.core.errors import DomainError, GridMismatchError
from src.numerics.quadrature import build_sphere_quadrature
from src.scattering.trace import TraceSet

logger = logging.getLogger(__name__)


def near_field_difference(traces1: TraceSet, traces2: TraceSet, shell_radius: float, shell_degree: int = 16) -> float:
    """max over shell nodes and incident directions of |u_s1 − u_s2| on |x| = shell_radius.

    Args:
        traces1: Traces of the first obstacle
        traces2: Traces of the second obstacle, same incident directions
        shell_radius: a2, strictly outside both surfaces
        shell_degree: Exactness degree of the shell point set

    Returns:
        Max-norm near-field gap
    """
    if traces1.directions.shape != traces2.directions.shape or not np.allclose(
        traces1.directions, traces2.directions, atol=1e-14
    ):
        raise GridMismatchError("Trace sets use different incident directions")
    extent = max(
        float(np.max(np.linalg.norm(traces1.quadrature.points, axis=1))),
        float(np.max(np.linalg.norm(traces2.quadrature.points, axis=1))),
    )
    if shell_radius <= extent:
        raise DomainError(f"Shell radius {shell_radius} does not enclose both surfaces (extent {extent:.4g})")

    points = shell_radius * build_sphere_quadrature(shell_degree).nodes
    gap = float(np.max(np.abs(traces1.scattered_field(points) - traces2.scattered_field(points))))
    logger.debug(f"Near-field gap {gap:.3e} on |x| = {shell_radius}")
    return gap
