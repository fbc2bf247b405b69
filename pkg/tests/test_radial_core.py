import numpy as np
import pytest

import nlslab as nl
from nlslab.radial_core import integrate


GAUSS_MASS = (np.pi / 2.0) ** 1.5  # int exp(-2 r^2) over R^3


def gauss_pair(grid, width=1.0):
    u = np.exp(-(grid.r / width) ** 2)
    return nl.pair_from_values(grid, u, np.zeros_like(u))


def test_make_grid_rejects_bad_inputs():
    with pytest.raises(ValueError):
        nl.make_grid(8, 1.0)
    with pytest.raises(ValueError):
        nl.make_grid(64, -2.0)


def test_constant_quadrature_small_grid():
    g = nl.make_grid(16, 1.0)
    ball = 4.0 / 3.0 * np.pi
    total = g.quad_weights.sum()
    assert abs(total - ball) / ball <= 10 * g.h**2


def test_grid_spacing():
    g = nl.make_grid(4096, 30.0)
    assert g.h == 30.0 / 4096
    assert g.r[0] == pytest.approx(g.h)
    assert g.r[-1] == pytest.approx(30.0)


def test_gaussian_mass_oracle(grid):
    s = gauss_pair(grid)
    assert abs(nl.mass(s) - GAUSS_MASS) < 1e-8


def test_mass_zero_iff_zero(grid):
    z = nl.pair_from_values(grid, np.zeros(grid.n_points), np.zeros(grid.n_points))
    assert nl.mass(z) == 0.0


def test_quadrature_low_degree_polynomials():
    # degree <= 1 radial polynomials times r^2: O(h^2) accuracy
    g = nl.make_grid(256, 2.0)
    exact_1 = 4.0 / 3.0 * np.pi * g.r_max**3
    exact_r = np.pi * g.r_max**4
    got_1 = integrate(g, np.ones(g.n_points))
    got_r = integrate(g, g.r)
    assert abs(got_1 - exact_1) / exact_1 < 10 * g.h**2
    assert abs(got_r - exact_r) / exact_r < 10 * g.h**2


def test_laplacian_gaussian_oracle(grid):
    f = gauss_pair(grid).first
    lap = nl.laplacian(f)
    exact = (4 * grid.r**2 - 6) * np.exp(-grid.r**2)
    assert np.abs(lap.values - exact).max() < 1e-9


def test_laplacian_constant_region(grid):
    # smoothly cut constant: Laplacian vanishes in the interior plateau
    prof = 1.0 / (1.0 + np.exp((grid.r - 15.0) * 2.0))
    f = nl.pair_from_values(grid, prof, prof).first
    lap = nl.laplacian(f).values
    inner = grid.r < 5.0
    assert np.abs(lap[inner]).max() < 1e-8


def test_scaling_generator_gaussian(grid):
    f = gauss_pair(grid).first
    lam = nl.scaling_generator(f)
    exact = (1 - 2 * grid.r**2) * np.exp(-grid.r**2)
    assert np.abs(lam.values - exact).max() < 1e-9


def test_momentum_is_zero(grid):
    rng = np.random.default_rng(7)
    u = np.exp(-grid.r) * rng.standard_normal(grid.n_points)
    s = nl.pair_from_values(grid, u, 1j * u)
    assert np.all(nl.momentum(s) == 0.0)


def test_energy_composition(grid):
    s = gauss_pair(grid)
    beta = 3.0
    assert nl.energy(s, beta) == pytest.approx(
        0.5 * nl.kinetic(s) - 0.25 * nl.potential_P(s, beta))


def test_parseval_consistency(grid):
    # K through the sine-symbol sum against the quadrature of -conj(u) Lap u
    s = gauss_pair(grid, width=1.3)
    K_spec = nl.kinetic(s)
    lap = nl.laplacian(s.first).values
    K_quad = -integrate(grid, (np.conj(s.u) * lap).real)
    assert abs(K_spec - K_quad) / K_spec < 1e-8


def test_rescale_identity_and_mass(grid):
    s = gauss_pair(grid)
    same = nl.rescale(s, 1.0)
    assert np.abs(same.u - s.u).max() < 1e-12
    halved = nl.rescale(s, 2.0)
    assert abs(nl.mass(halved) - nl.mass(s) / 2.0) < 1e-6
    assert abs(nl.kinetic(halved) - 2.0 * nl.kinetic(s)) / nl.kinetic(s) < 1e-6


def test_rescale_mass_loss_warning(grid):
    # slow tail pushed past r_max: the truncated mass is reported
    u = np.exp(-grid.r / 4.0)
    s = nl.pair_from_values(grid, u, u)
    with pytest.warns(UserWarning, match="truncates"):
        nl.rescale(s, 2.0)


def test_rescale_group_law(grid):
    s = gauss_pair(grid, width=2.0)
    one = nl.rescale(nl.rescale(s, 1.25), 1.6)
    two = nl.rescale(s, 2.0)
    assert np.abs(one.u - two.u).max() < 1e-6


def test_scale_invariance_of_ratios(grid, gs3):
    s = nl.pair_from_values(
        grid, np.exp(-grid.r**2), 0.5 * np.exp(-(grid.r - 1.0) ** 2 / 2.0))
    base = nl.me_ratio(s, gs3)
    base_k = nl.mk_ratio(s, gs3)
    for dl in (0.5, 1.0, 2.0, 4.0):
        sc = nl.rescale(s, dl)
        assert abs(nl.me_ratio(sc, gs3) - base) <= 1e-6 * max(1, abs(base))
        assert abs(nl.mk_ratio(sc, gs3) - base_k) <= 1e-6 * base_k


def test_quadratic_homogeneity(grid, gs3):
    s = nl.pair_from_values(grid, 1.1 * gs3.phi, 1.1 * gs3.psi)
    assert nl.mk_ratio(s, gs3) == pytest.approx(1.1**4, rel=1e-10)


def test_weinstein_scale_invariance_and_degenerate(grid, gs3):
    J = nl.weinstein_J(gs3.Q, gs3.beta)
    resc = nl.rescale(gs3.Q, 2.0)
    assert abs(nl.weinstein_J(resc, gs3.beta) - J) / J < 1e-6
    zero = nl.pair_from_values(grid, np.zeros(grid.n_points), np.zeros(grid.n_points))
    with pytest.raises(ValueError):
        nl.weinstein_J(zero, gs3.beta)


def test_weinstein_minimality_sampled(grid, gs3):
    # J(Q + eps*bump) >= J(Q) - 1e-8 over random smooth perturbations
    J0 = nl.weinstein_J(gs3.Q, gs3.beta)
    rng = np.random.default_rng(2024)
    for _ in range(100):
        c = rng.uniform(0.5, 3.0)
        wdt = rng.uniform(0.5, 2.0)
        bump = np.exp(-((grid.r - c) / wdt) ** 2)
        du = 1e-3 * rng.standard_normal() * bump
        dv = 1e-3 * rng.standard_normal() * bump
        s = nl.pair_from_values(grid, gs3.phi + du, gs3.psi + dv)
        assert nl.weinstein_J(s, gs3.beta) >= J0 - 1e-8


def test_weinstein_equals_inverse_sharp_constant(gs3):
    assert nl.weinstein_J(gs3.Q, gs3.beta) == pytest.approx(
        1.0 / nl.sharp_gn_constant(gs3), rel=1e-10)


def test_field_validation(grid):
    with pytest.raises(ValueError):
        nl.pair_from_values(grid, np.ones(grid.n_points - 1), np.ones(grid.n_points))
    bad = np.ones(grid.n_points)
    bad[3] = np.inf
    with pytest.raises(ValueError):
        nl.pair_from_values(grid, bad, np.ones(grid.n_points))


def test_delta_and_ratios_at_Q(gs3):
    assert nl.delta(gs3.Q, gs3) == pytest.approx(0.0, abs=1e-10)
    assert nl.me_ratio(gs3.Q, gs3) == pytest.approx(1.0, rel=1e-12)
    assert nl.mk_ratio(gs3.Q, gs3) == pytest.approx(1.0, rel=1e-12)


def test_ratios_invariant_under_rescaled_Q(gs3):
    sc = nl.rescale(gs3.Q, 2.0)
    assert nl.me_ratio(sc, gs3) == pytest.approx(1.0, abs=1e-6)
    assert nl.mk_ratio(sc, gs3) == pytest.approx(1.0, abs=1e-6)
