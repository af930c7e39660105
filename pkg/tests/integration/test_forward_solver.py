"""
Integration Tests for the Forward Solver
Boundary-integral solutions checked against the series solution and scattering identities
"""

import numpy as np
import pytest

from src.config import SolverConfig
from src.geometry.generators import perturbed_sphere, sphere
from src.numerics.quadrature import build_sphere_quadrature, fibonacci_directions
from src.scattering.bie import solve_traces
from src.scattering.far_field import assemble_far_field_matrix, optical_theorem_residual, reciprocity_residual
from src.scattering.mie import mie_far_field_matrix


@pytest.fixture(scope="module")
def bie_config():
    return SolverConfig(use_mie_for_spheres=False)


@pytest.mark.integration
@pytest.mark.slow
class TestSeriesAgreement:
    """Boundary-integral far fields of balls against the series solution"""

    @pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
    def test_far_field_matches_series(self, radius, bie_config):
        out_grid = build_sphere_quadrature(8)
        in_grid = build_sphere_quadrature(3)
        surface = sphere(radius)
        matrix = assemble_far_field_matrix(surface, out_grid, in_grid, bie_config)
        series = mie_far_field_matrix(radius, out_grid.nodes, in_grid.nodes)
        assert matrix.metadata["method"] == "bie"
        assert np.max(np.abs(matrix.values - series)) <= 1e-6 * np.max(np.abs(series))

    def test_series_shortcut_used_for_spheres(self):
        out_grid = build_sphere_quadrature(8)
        in_grid = build_sphere_quadrature(3)
        matrix = assemble_far_field_matrix(sphere(1.0), out_grid, in_grid, SolverConfig(use_mie_for_spheres=True))
        assert matrix.metadata["method"] == "series"


@pytest.mark.integration
@pytest.mark.slow
class TestScatteringIdentities:
    """Reciprocity and energy balance on a non-spherical obstacle"""

    def test_reciprocity(self, bie_config):
        surface = perturbed_sphere(1.0, 2, 0, 0.1)
        assert reciprocity_residual(surface, fibonacci_directions(4), bie_config) < 1e-6

    def test_optical_theorem(self, bie_config):
        surface = perturbed_sphere(1.0, 2, 0, 0.1)
        traces = solve_traces(surface, fibonacci_directions(3), bie_config)
        assert optical_theorem_residual(traces, build_sphere_quadrature(40)) < 1e-6

    def test_optical_theorem_series(self, ball_traces):
        assert optical_theorem_residual(ball_traces, build_sphere_quadrature(40)) < 1e-10

    def test_cache_reuses_traces(self, tmp_path):
        config = SolverConfig(bie_degree=10, polar_nodes=20, azimuth_nodes=40, cache_dir=str(tmp_path))
        surface = perturbed_sphere(1.0, 2, 0, 0.1)
        directions = fibonacci_directions(2)
        first = solve_traces(surface, directions, config)
        assert any(tmp_path.iterdir())
        second = solve_traces(surface, directions, config)
        assert np.array_equal(first.un_values, second.un_values)
