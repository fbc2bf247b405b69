"""Shared heavy objects: grids, ground states, spectra, reference dynamics.

Everything here is deterministic and cached at session scope; the dynamics
runs are reused by several acceptance criteria.
"""

import pytest

import nlslab as nl
from nlslab.special_solutions import auto_t0


DEFAULT_N = 4096
DEFAULT_RMAX = 30.0


@pytest.fixture(scope="session")
def grid():
    return nl.make_grid(DEFAULT_N, DEFAULT_RMAX)


@pytest.fixture(scope="session")
def grid_half():
    return nl.make_grid(DEFAULT_N // 2, DEFAULT_RMAX)


@pytest.fixture(scope="session")
def gs3(grid):
    """Default ground state: beta = 3, symmetric branch."""
    return nl.build_ground_state(3.0, "symmetric", grid)


@pytest.fixture(scope="session")
def gs05(grid):
    return nl.build_ground_state(0.5, "semi_trivial_first", grid)


@pytest.fixture(scope="session")
def op3(gs3):
    return nl.assemble_sector(gs3, 0)


@pytest.fixture(scope="session")
def sp3(op3):
    return nl.compute_spectrum(op3)


@pytest.fixture(scope="session")
def sp3_half(grid_half):
    gs = nl.build_ground_state(3.0, "symmetric", grid_half)
    return nl.compute_spectrum(nl.assemble_sector(gs, 0))


@pytest.fixture(scope="session")
def spectra_by_beta(grid):
    """e0 data across couplings (coercivity skipped for speed)."""
    out = {}
    for beta, branch in [(0.5, "semi_trivial_first"), (2.0, "symmetric"),
                         (5.0, "symmetric")]:
        gs = nl.build_ground_state(beta, branch, grid)
        out[beta] = nl.compute_spectrum(nl.assemble_sector(gs, 0),
                                        compute_coercivity=False)
    return out


@pytest.fixture(scope="session")
def series_minus(gs3, sp3):
    return nl.build_Z_sequence(gs3, sp3, -1.0, 4)


@pytest.fixture(scope="session")
def series_plus(gs3, sp3):
    return nl.build_Z_sequence(gs3, sp3, +1.0, 4)


@pytest.fixture(scope="session")
def qminus_forward(gs3, sp3, series_minus):
    """A = -1 seed evolved forward: converges to the standing wave."""
    t0 = auto_t0(series_minus, 0.05)
    seed = nl.initial_data_UA(series_minus, t0, align_energy=True)
    cfg = nl.EvolutionConfig(dt=1e-4, t_span=(t0, t0 + 1.6), sample_every=100,
                             beta=3.0, store_states_every=100)
    rec = nl.evolve(seed, cfg, gs=gs3, spectral=sp3)
    return t0, seed, rec


@pytest.fixture(scope="session")
def qplus_forward(gs3, sp3, series_plus):
    """A = +1 seed evolved forward (high-kinetic side), states stored."""
    t0 = auto_t0(series_plus, 0.05)
    seed = nl.initial_data_UA(series_plus, t0, align_energy=True)
    cfg = nl.EvolutionConfig(dt=1e-4, t_span=(t0, t0 + 0.8), sample_every=50,
                             beta=3.0, store_states_every=50)
    rec = nl.evolve(seed, cfg, gs=gs3, spectral=sp3)
    return t0, seed, rec
