"""
Pytest Configuration and Fixtures
Shared surfaces, configurations and solved traces
"""

import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

# Add repository root and src to path
sys.path.insert(0, str(Path(__file__).parent.parent))
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from src.config import Config, SolverConfig
from src.geometry.generators import perturbed_sphere as make_perturbed_sphere
from src.geometry.generators import sphere
from src.numerics.quadrature import build_sphere_quadrature
from src.scattering.bie import solve_traces


@pytest.fixture
def config():
    """Defaults only, no environment or .env"""
    return Config(load_env=False)


@pytest.fixture
def unit_sphere():
    return sphere(1.0)


@pytest.fixture
def perturbed_sphere():
    """r = 1 + 0.1·S_2^0"""
    return make_perturbed_sphere(1.0, 2, 0, 0.1)


@pytest.fixture
def sphere_quadrature():
    return build_sphere_quadrature(82)


@pytest.fixture
def tmp_out_dir(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    return out


@pytest.fixture(scope="session")
def series_solver_config():
    """Forward solver that uses the series solution on spheres"""
    return replace(SolverConfig(), use_mie_for_spheres=True)


@pytest.fixture(scope="session")
def ball_traces(series_solver_config):
    """u_N traces of the unit ball over the default incident grid"""
    grid = build_sphere_quadrature(31)
    return solve_traces(sphere(1.0), grid.nodes, series_solver_config, weights=grid.weights)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def ball_spectrum():
    """Factory for exact χ̃ of a ball on a λ-lattice"""
    from src.reconstruction.inversion import ball_transform
    from src.reconstruction.spectrum import SpectrumGrid, lattice_indices

    def build(lambda_max=6.0, spacing=0.5, radius=1.0):
        indices = lattice_indices(lambda_max, spacing)
        norms = np.linalg.norm(indices * spacing, axis=1)
        values = np.array([ball_transform(n, radius) for n in norms], dtype=complex)
        zeros = np.zeros(len(indices))
        return SpectrumGrid(
            indices=indices,
            spacing=spacing,
            lambda_max=lambda_max,
            values=values,
            raw_values=values.copy(),
            residuals=zeros,
            bounds=zeros.copy(),
            symmetry_residuals=zeros.copy(),
        )

    return build
