"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
summary.  Criterion 7 (conservation on the standing-wave run over [0, 5])
is split into its three clauses: the mass clause holds, while the energy
and tracking clauses are provably unattainable for this system -- the
orbit carries a genuine exponential instability with rate e0 ~ 5.5, so any
perturbation (splitting defect or rounding, >= 1e-16) is amplified by
e^{5 e0} ~ 1e12 across the window.  Those two asserts are kept faithful to
the stated tolerances and are expected to fail; the blocking analysis is
recorded in the project notes.
"""

import time

import numpy as np
import pytest

import nlslab as nl
from nlslab.special_solutions import epsilon_fit_window, epsilon_norm


def report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


BRANCHES = [(0.5, "semi_trivial_first"), (0.5, "semi_trivial_second"),
            (2.0, "symmetric"), (3.0, "symmetric"), (5.0, "symmetric")]


def test_c01_pohozaev_identities(grid):
    worst = 0.0
    slowest = 0.0
    for beta, branch in BRANCHES:
        tic = time.monotonic()
        gs = nl.build_ground_state(beta, branch, grid)
        elapsed = time.monotonic() - tic
        r1, r2 = nl.pohozaev_residuals(gs)
        worst = max(worst, r1, r2)
        slowest = max(slowest, elapsed)
    ok = worst <= 1e-6 and slowest < 10.0
    assert report("C1 Pohozaev identities",
                  ok, f"max residual {worst:.2e} (tol 1e-6), "
                      f"slowest branch {slowest:.2f}s (limit 10s)")


def test_c02_sharp_constant(gs3):
    c1 = 4.0 / (3.0 * np.sqrt(gs3.M * gs3.K))
    c2 = 4.0 / (3.0 * np.sqrt(6.0 * gs3.M * gs3.E))
    rel = abs(c1 - c2) / c1
    eq = abs(gs3.P - c1 * np.sqrt(gs3.M) * gs3.K**1.5) / gs3.P
    ok = rel <= 1e-8 and eq <= 1e-6
    assert report("C2 sharp-constant consistency",
                  ok, f"form agreement {rel:.2e} (tol 1e-8), "
                      f"equality case {eq:.2e} (tol 1e-6)")


def test_c03_spectrum(grid, gs3, gs05, sp3, sp3_half, spectra_by_beta, op3):
    e0s = {3.0: sp3.e0}
    e0s.update({b: sp.e0 for b, sp in spectra_by_beta.items()})
    spread = (max(e0s.values()) - min(e0s.values())) / sp3.e0
    nrm2 = nl.h1_norm(sp3.Yplus) ** 2
    phi_plus = abs(nl.quadratic_Phi(op3, sp3.Yplus))
    phi_minus = abs(nl.quadratic_Phi(op3, sp3.Yminus))
    kdims = (
        len(nl.kernel_basis(nl.assemble_sector(gs3, 0))) == 2
        and len(nl.kernel_basis(nl.assemble_sector(gs05, 0))) == 1
        and len(nl.kernel_basis(nl.assemble_sector(gs3, 1))) == 1
    )
    coer_rel = abs(sp3.coercivity_c - sp3_half.coercivity_c) / sp3.coercivity_c
    ok = (sp3.e0 > 0 and sp3.eig_residual <= 1e-6 and spread <= 1e-5
          and phi_plus <= 1e-6 * nrm2 and phi_minus <= 1e-6 * nrm2
          and kdims and sp3.coercivity_c > 0 and coer_rel <= 0.10)
    assert report(
        "C3 spectrum",
        ok,
        f"e0 ={sp3.e0:.6f}, eig residual {sp3.eig_residual:.2e} (tol 1e-6), "
        f"beta spread {spread:.2e} (tol 1e-5), Phi(Y+-) "
        f"{max(phi_plus, phi_minus) / nrm2:.2e} (tol 1e-6), kernel dims "
        f"{'ok' if kdims else 'WRONG'}, coercivity {sp3.coercivity_c:.4f} "
        f"stable to {coer_rel:.1%} (limit 10%)")


def test_c04_linear_operator_identities(grid, gs3, op3):
    li = nl.apply_LI(op3, gs3.Q)
    r_li = max(np.abs(li.u).max(), np.abs(li.v).max()) / np.abs(gs3.phi).max()
    lam = nl.pair_from_values(
        grid,
        nl.scaling_generator(gs3.Q.first).values,
        nl.scaling_generator(gs3.Q.second).values)
    lr = nl.apply_LR(op3, lam)
    r_sc = max(np.abs(lr.u + 2 * gs3.phi).max(),
               np.abs(lr.v + 2 * gs3.psi).max()) / np.abs(gs3.phi).max()
    phiQ = nl.quadratic_Phi(op3, gs3.Q)
    r_phi = abs(phiQ + 2 * gs3.P) / (2 * gs3.P)
    rng = np.random.default_rng(1001)
    r_anti = 0.0
    for _ in range(200):
        def mk():
            c, w = rng.uniform(0, 4), rng.uniform(0.8, 2.0)
            b = np.exp(-((grid.r - c) / w) ** 2) + np.exp(-((grid.r + c) / w) ** 2)
            vals = rng.standard_normal() * b + 1j * rng.standard_normal() * b
            return vals
        s1 = nl.pair_from_values(grid, mk(), mk())
        s2 = nl.pair_from_values(grid, mk(), mk())
        n1, n2 = nl.h1_norm(s1), nl.h1_norm(s2)
        s1 = nl.pair_from_values(grid, s1.u / n1, s1.v / n1)
        s2 = nl.pair_from_values(grid, s2.u / n2, s2.v / n2)
        lhs = nl.bilinear_B(op3, nl.apply_script_L(op3, s1), s2)
        rhs = -nl.bilinear_B(op3, s1, nl.apply_script_L(op3, s2))
        r_anti = max(r_anti, abs(lhs - rhs))
    ok = r_li <= 1e-6 and r_sc <= 1e-6 and r_phi <= 1e-6 and r_anti <= 1e-6
    assert report(
        "C4 linear-operator identities",
        ok,
        f"L_I(Q) {r_li:.2e}, L_R(Lambda Q)+2Q {r_sc:.2e}, Phi(Q)+2P "
        f"{r_phi:.2e}, B-antisymmetry {r_anti:.2e} (all vs 1e-6)")


def test_c05_residual_decay_law(gs3, sp3):
    tic = time.monotonic()
    e0 = sp3.e0
    worst = 0.0
    rates = []
    for l in (1, 2, 3, 4):
        ser = nl.build_Z_sequence(gs3, sp3, 1.0, l)
        lo, hi = epsilon_fit_window(ser)
        hi = min(hi, lo + 5.0 / e0)
        ts = np.linspace(lo, hi, 25)
        vals = [epsilon_norm(ser, t) for t in ts]
        rate = -np.polyfit(ts, np.log(vals), 1)[0]
        rates.append(rate)
        worst = max(worst, abs(rate - (l + 1) * e0) / ((l + 1) * e0))
    elapsed = time.monotonic() - tic
    ok = worst <= 0.05 and elapsed < 60.0
    assert report(
        "C5 residual-decay law",
        ok, f"rates {['%.3f' % r for r in rates]} vs (l+1)e0, worst rel "
            f"{worst:.2%} (tol 5%), runtime {elapsed:.1f}s (limit 60s)")


def test_c06_special_solution_dynamics(grid, gs3, sp3, series_minus,
                                       series_plus, qminus_forward):
    tic = time.monotonic()
    e0 = sp3.e0
    t0, _, rec = qminus_forward
    fit = nl.fit_exponential_decay(rec.t, rec.delta,
                                   (t0 + 0.1, t0 + 0.1 + 3.0 / e0))
    rate_err = abs(fit.rate - e0) / e0

    from nlslab.special_solutions import auto_t0
    t0m = auto_t0(series_minus, 0.05)
    seed_m = nl.initial_data_UA(series_minus, t0m, align_energy=True)
    cfg_back = nl.EvolutionConfig(dt=2e-4, t_span=(t0m, t0m - 4.0),
                                  sample_every=50, beta=gs3.beta)
    rec_scatter = nl.evolve(seed_m, cfg_back, gs=gs3)

    t0p = auto_t0(series_plus, 0.05)
    seed_p = nl.initial_data_UA(series_plus, t0p, align_energy=True)
    rec_blow = nl.evolve(seed_p, nl.EvolutionConfig(
        dt=2e-4, t_span=(t0p, t0p - 4.0), sample_every=50, beta=gs3.beta),
        gs=gs3)
    elapsed = time.monotonic() - tic
    ok = (rate_err <= 0.05 and rec_scatter.verdict == "scatter"
          and rec_blow.verdict == "blowup" and elapsed < 1800.0)
    assert report(
        "C6 special-solution dynamics",
        ok,
        f"delta rate {fit.rate:.4f} vs e0 {e0:.4f} ({rate_err:.2%}, tol 5%); "
        f"A=-1 backward -> {rec_scatter.verdict} (min P/PQ "
        f"{np.nanmin(rec_scatter.potential) / gs3.P:.4f}); A=+1 backward -> "
        f"{rec_blow.verdict} (max K/KQ {np.nanmax(rec_blow.kinetic) / gs3.K:.1f}); "
        f"runtime {elapsed:.0f}s (limit 30min)")


@pytest.fixture(scope="module")
def standing_wave_run(gs3):
    cfg = nl.EvolutionConfig(dt=1e-3, t_span=(0.0, 5.0), sample_every=100,
                             beta=gs3.beta)
    return nl.evolve(gs3.Q, cfg, gs=gs3)


def test_c07a_conservation_mass(gs3, standing_wave_run):
    rec = standing_wave_run
    span = rec.t[-1] - rec.t[0]
    drift = np.nanmax(np.abs(rec.mass - rec.mass[0])) / rec.mass[0] / span
    ok = drift <= 1e-12
    assert report("C7a standing-wave mass drift",
                  ok, f"{drift:.2e} per unit time (tol 1e-12)")


def test_c07b_conservation_energy(gs3, standing_wave_run):
    rec = standing_wave_run
    span = rec.t[-1] - rec.t[0]
    drift = np.nanmax(np.abs(rec.energy - rec.energy[0])) / abs(rec.energy[0]) / span
    ok = drift <= 1e-8
    report("C7b standing-wave energy drift",
           ok, f"{drift:.2e} per unit time (tol 1e-8); the orbit instability "
               f"(e0 ~ 5.5) makes this unattainable over [0,5], see notes")
    assert ok


def test_c07c_standing_wave_tracking(grid, gs3):
    s = gs3.Q
    dt, n = 1e-3, 5000
    worst = 0.0
    for k in range(n):
        s = nl.strang_step(s, dt, gs3.beta)
        if (k + 1) % 250 == 0:
            target = nl.phase_rotate(gs3.Q, (k + 1) * dt)
            d = nl.pair_from_values(grid, s.u - target.u, s.v - target.v)
            worst = max(worst, nl.h1_norm(d))
    ok = worst <= 1e-6
    report("C7c standing-wave tracking",
           ok, f"max H1 deviation {worst:.2e} over [0,5] (tol 1e-6); "
               f"e^{{5 e0}} ~ 1e12 amplification makes this unattainable "
               f"at any dt, see notes")
    assert ok


def test_c08_virial_identities(grid, gs3, qplus_forward, qminus_forward):
    w = nl.make_virial_weight(grid, 8.0, "exact_quadratic")
    # high regime, E = E(Q) exactly: FD V'' vs -4 delta
    _, _, rec = qplus_forward
    ts = np.array([t for t, _ in rec.states])
    Vs = np.array([nl.virial_V(s, w) for _, s in rec.states])
    deltas = np.array([abs(nl.kinetic(s) - gs3.K) for _, s in rec.states])
    dt = ts[1] - ts[0]
    fd = (Vs[2:] - 2 * Vs[1:-1] + Vs[:-2]) / dt**2
    high_err = np.max(np.abs(fd + 4 * deltas[1:-1]) / np.abs(4 * deltas[1:-1]))
    # A_R(Q) for the truncated weights
    ar = max(abs(nl.virial_AR(gs3.Q, nl.make_virial_weight(grid, 8.0, m),
                              gs3.beta))
             for m in ("plateau_quadratic", "capped", "exact_quadratic"))
    # low regime: FD V'' vs +4 delta + A_R (the sign/constant follows from
    # the energy algebra; the narrative's printed "2 delta" is inconsistent
    # with its own exact-weight identity, see notes)
    _, _, recm = qminus_forward
    tsm = np.array([t for t, _ in recm.states])[:40]
    Vm = np.array([nl.virial_V(s, w) for _, s in recm.states[:40]])
    idm = np.array([nl.second_virial(s, w, gs3, "low")
                    for _, s in recm.states[:40]])
    dtm = tsm[1] - tsm[0]
    fdm = (Vm[2:] - 2 * Vm[1:-1] + Vm[:-2]) / dtm**2
    low_err = np.max(np.abs(fdm - idm[1:-1]) / np.abs(idm[1:-1]))
    ok = high_err <= 0.01 and ar <= 5 * grid.h**2 and low_err <= 0.01
    assert report(
        "C8 virial identities",
        ok, f"FD V'' vs -4delta {high_err:.2%} (tol 1%), A_R(Q) {ar:.1e} "
            f"(tol {5 * grid.h**2:.1e}), low-regime identity {low_err:.2%} "
            f"(tol 1%)")


def test_c09_banica(grid, gs3, qminus_forward):
    w = nl.make_virial_weight(grid, 8.0, "exact_quadratic")
    ratios = []
    checked = 0
    for _, st in qminus_forward[2].states:
        b = nl.banica_gap(st, w, gs3, hypothesis_rtol=1e-5)
        assert b.lhs <= b.sharp_rhs * (1 + 1e-8)
        if b.rhs > 0:
            ratios.append(b.ratio)
        checked += 1
    fam_ok = True
    for eps in np.geomspace(1e-3, 1e-1, 7):
        ph = np.exp(1j * eps * w.a)
        fam = nl.pair_from_values(grid, ph * gs3.phi, ph * gs3.psi)
        b = nl.banica_gap(fam, w, gs3, hypothesis_rtol=1.0)
        fam_ok &= b.lhs <= b.sharp_rhs * (1 + 1e-8)
    C = max(ratios)
    ok = checked >= 100 and fam_ok and np.isfinite(C)
    assert report(
        "C9 Banica inequality",
        ok, f"{checked} trajectory samples, recorded C = {C:.4f}; phase "
            f"family saturates the discriminant bound: {fam_ok}")


def test_c10_modulation(gs3, qminus_forward):
    delta0 = 0.1 * gs3.K
    ratios_a, ratios_h, worst_orth = [], [], 0.0
    for _, st in qminus_forward[2].states:
        d = abs(nl.kinetic(st) - gs3.K)
        if d >= delta0 or d < 1e-6:
            continue
        fit = nl.modulation_solve(st, gs3, delta0=delta0)
        if not fit.converged:
            continue
        ratios_a.append(abs(fit.alpha) / fit.delta)
        ratios_h.append(nl.h1_norm(fit.h_k) / fit.delta)
        worst_orth = max(worst_orth, max(fit.orthogonality))
    band_a = (min(ratios_a), max(ratios_a))
    band_h = (min(ratios_h), max(ratios_h))
    # calibrated two-sided bands for this system (recorded)
    ok = (len(ratios_a) >= 10 and worst_orth <= 1e-10
          and 1e-4 <= band_a[0] and band_a[1] <= 1.0
          and 1e-3 <= band_h[0] and band_h[1] <= 10.0)
    assert report(
        "C10 modulation",
        ok, f"{len(ratios_a)} samples; |alpha|/delta in "
            f"[{band_a[0]:.4f}, {band_a[1]:.4f}], |(h,k)|/delta in "
            f"[{band_h[0]:.4f}, {band_h[1]:.4f}], orthogonality "
            f"{worst_orth:.1e} (tol 1e-10)")


def test_c11_projection_dynamics(grid, gs3, sp3, qminus_forward):
    t0, _, rec = qminus_forward
    e0 = sp3.e0
    # fitted A from e^{e0 t} alpha+ constant within 3%
    m = (rec.t >= t0 + 0.05) & (rec.t <= t0 + 0.05 + 3.0 / e0)
    Afit = np.exp(e0 * rec.t[m]) * rec.alpha_plus[m]
    spread = (Afit.max() - Afit.min()) / abs(Afit.mean())
    # alpha- and sum |beta_j| decay no slower than alpha+ over the clean
    # early window (before the noise floor rises)
    lo, hi = t0 + 0.01, t0 + 0.30
    sel = (rec.t >= lo) & (rec.t <= hi)
    rate_plus = nl.fit_exponential_decay(rec.t[sel], np.abs(rec.alpha_plus[sel]),
                                         (lo, hi)).rate
    rate_minus = nl.fit_exponential_decay(rec.t[sel], np.abs(rec.alpha_minus[sel]),
                                          (lo, hi)).rate
    betas_t, betas_v = [], []
    for ts, st in rec.states:
        if lo <= ts <= hi:
            pert = nl.pair_from_values(
                grid, np.exp(-1j * ts) * st.u - gs3.phi,
                np.exp(-1j * ts) * st.v - gs3.psi)
            _, _, bb, _ = nl.spectral_project(gs3, sp3, pert)
            betas_t.append(ts)
            betas_v.append(np.abs(bb).sum())
    rate_beta = nl.fit_exponential_decay(betas_t, betas_v, (lo, hi)).rate
    ok = (spread <= 0.03 and rate_minus >= rate_plus * 0.98
          and rate_beta >= rate_plus * 0.98)
    assert report(
        "C11 projection dynamics",
        ok, f"A-fit spread {spread:.2%} (tol 3%), rates: alpha+ "
            f"{rate_plus:.3f}, alpha- {rate_minus:.3f}, sum|beta| "
            f"{rate_beta:.3f} (must be no slower)")
