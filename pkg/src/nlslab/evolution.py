"""Time integration of the coupled system for radial data.

Strang splitting with exact substeps: the linear half-flow acts diagonally
in the sine basis of w = r*u (continuum symbols, so smooth decaying data
propagate to spectral accuracy), and the nonlinearity is an exact pointwise
phase rotation because the moduli are invariant under it.  Both substeps
are L^2 isometries, so mass is conserved to rounding.

Trajectories carry conservation diagnostics, the kinetic distance delta,
and (when spectral data is supplied) the projection coefficients onto the
unstable pair and the kernel.  Verdicts: blow-up requires simultaneous
kinetic growth and saturation of the spectral tail (kinetic growth alone
cannot be told apart from under-resolution); scattering is flagged by a
sustained collapse of the potential energy.
"""

from dataclasses import dataclass, field

import numpy as np

from .radial_core import (
    StatePair,
    integrate,
    pair_from_values,
    sine_fwd,
    sine_inv,
)

VERDICTS = ("undetermined", "scatter", "blowup", "converge_to_Q")
VERDICT_FLAGS = {"undetermined": 0, "scatter": 1, "blowup": 2,
                 "converge_to_Q": 3, "resolution_failure": 4}


@dataclass
class EvolutionConfig:
    dt: float = 1e-3
    t_span: tuple = (0.0, 5.0)
    sample_every: int = 100
    blowup_K_factor: float = 5.0
    tail_fraction_tol: float = 0.1
    beta: float = 3.0
    scatter_P_factor: float = 0.01
    scatter_window: int = 5
    converge_delta_factor: float = 0.05
    store_states_every: int = 0     # 0 = keep no intermediate states
    modulation: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.blowup_K_factor <= 1:
            raise ValueError("blowup_K_factor must exceed 1")
        if not (0 < self.tail_fraction_tol < 0.5):
            raise ValueError("tail_fraction_tol must lie in (0, 0.5)")


@dataclass
class TrajectoryRecord:
    t: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    delta: np.ndarray
    h1norm: np.ndarray
    alpha: np.ndarray
    theta0: np.ndarray
    theta1: np.ndarray
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    verdict_flag: np.ndarray
    verdict: str = "undetermined"
    termination: str = "horizon"
    energy_drift_flag: bool = False
    resolution_failure: bool = False
    final_state: StatePair | None = None
    states: list = field(default_factory=list)   # (t, StatePair) samples

    @property
    def columns(self):
        return {
            "t": self.t, "mass": self.mass, "energy": self.energy,
            "kinetic": self.kinetic, "potential": self.potential,
            "delta": self.delta, "h1norm": self.h1norm, "alpha": self.alpha,
            "theta0": self.theta0, "theta1": self.theta1,
            "alpha_plus": self.alpha_plus, "alpha_minus": self.alpha_minus,
            "verdict_flag": self.verdict_flag,
        }


# ---------------------------------------------------------------------------
# raw stepping on (2, n) complex w-arrays
# ---------------------------------------------------------------------------

def _fwd2(x):
    return np.stack([
        sine_fwd(np.ascontiguousarray(x[0].real)) + 1j * sine_fwd(np.ascontiguousarray(x[0].imag)),
        sine_fwd(np.ascontiguousarray(x[1].real)) + 1j * sine_fwd(np.ascontiguousarray(x[1].imag)),
    ])


def _inv2(X):
    return np.stack([
        sine_inv(np.ascontiguousarray(X[0].real)) + 1j * sine_inv(np.ascontiguousarray(X[0].imag)),
        sine_inv(np.ascontiguousarray(X[1].real)) + 1j * sine_inv(np.ascontiguousarray(X[1].imag)),
    ])


def _linear_flow(grid, x, tau):
    return _inv2(_fwd2(x) * np.exp(-1j * grid.sine_k**2 * tau))


def _nonlinear_flow(grid, x, tau, beta):
    u2 = np.abs(x[0] / grid.r) ** 2
    v2 = np.abs(x[1] / grid.r) ** 2
    out = np.empty_like(x)
    out[0] = x[0] * np.exp(1j * tau * (u2 + beta * v2))
    out[1] = x[1] * np.exp(1j * tau * (v2 + beta * u2))
    return out


def strang_step(s, dt, beta):
    """One symmetric splitting step; dt may be negative (backward flow)."""
    g = s.grid
    x = np.stack([s.u * g.r, s.v * g.r])
    x = _linear_flow(g, x, dt / 2)
    x = _nonlinear_flow(g, x, dt, beta)
    x = _linear_flow(g, x, dt / 2)
    return pair_from_values(g, x[0] / g.r, x[1] / g.r)


def free_propagate(s, t):
    """Exact linear flow e^{i t Delta} of both components."""
    g = s.grid
    x = np.stack([s.u * g.r, s.v * g.r])
    x = _linear_flow(g, x, t)
    return pair_from_values(g, x[0] / g.r, x[1] / g.r)


# ---------------------------------------------------------------------------
# diagnostics on raw arrays (avoid re-wrapping in the hot loop)
# ---------------------------------------------------------------------------

def _diag(grid, x, beta):
    W = _fwd2(x)
    spec = np.abs(W[0]) ** 2 + np.abs(W[1]) ** 2
    k2 = grid.sine_k**2
    scale = 4.0 * np.pi * grid.h
    K = scale * np.sum(k2 * spec)
    u2 = np.abs(x[0] / grid.r) ** 2
    v2 = np.abs(x[1] / grid.r) ** 2
    M = float(integrate(grid, u2 + v2))
    P = float(integrate(grid, u2**2 + 2 * beta * u2 * v2 + v2**2))
    E = 0.5 * K - 0.25 * P
    kin_spec = k2 * spec
    total = np.sum(kin_spec)
    cut = 2 * len(k2) // 3
    tail = np.sum(kin_spec[cut:]) / total if total > 0 else 0.0
    return M, float(K), P, float(E), float(tail)


def detect_blowup(K, tail, Kq, cfg):
    if Kq is not None and K > cfg.blowup_K_factor * Kq and tail > cfg.tail_fraction_tol:
        return "blowup"
    return None


def detect_scattering(P_history, delta_history, Pq, cfg):
    """Sustained potential-energy collapse with the kinetic distance no
    longer shrinking; the pair distinguishes dispersal from convergence to
    the orbit (where P stays at P(Q))."""
    if Pq is None or len(P_history) < cfg.scatter_window:
        return None
    recent = P_history[-cfg.scatter_window:]
    if not all(p < cfg.scatter_P_factor * Pq for p in recent):
        return None
    d = delta_history[-cfg.scatter_window:]
    if np.isfinite(d[0]) and np.isfinite(d[-1]) and d[-1] < 0.5 * d[0]:
        return None  # delta still falling toward the orbit
    return "scatter"


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------

def evolve(s0, cfg, gs=None, spectral=None):
    """Integrate from t_span[0] to t_span[1] collecting a TrajectoryRecord.

    With `gs` given, delta and the detectors are referenced to the ground
    state; with `spectral` given, the unstable/kernel projections of
    w(t) = e^{-it}(u, v) - Q are sampled as well.  Modulation parameters
    (alpha, theta) are fitted per sample when cfg.modulation is set.
    """
    g = s0.grid
    t0, t1 = cfg.t_span
    direction = 1.0 if t1 >= t0 else -1.0
    nstep = int(round(abs(t1 - t0) / cfg.dt))
    tau = direction * cfg.dt

    Kq = gs.K if gs is not None else None
    Pq = gs.P if gs is not None else None

    mod_solve = None
    if cfg.modulation and gs is not None:
        from .threshold_diagnostics import modulation_solve
        mod_solve = modulation_solve

    cols = {k: [] for k in ("t", "mass", "energy", "kinetic", "potential",
                            "delta", "h1norm", "alpha", "theta0", "theta1",
                            "alpha_plus", "alpha_minus", "verdict_flag")}
    states = []
    verdict = None
    termination = "horizon"
    resolution_failure = False

    x = np.stack([s0.u * g.r, s0.v * g.r])
    M0, K0, P0, E0, tail0 = _diag(g, x, cfg.beta)
    nan = float("nan")

    def sample(t, x, P_hist):
        nonlocal verdict, resolution_failure
        M, K, P, E, tail = _diag(g, x, cfg.beta)
        if not np.isfinite(K):
            verdict = "blowup"
            return False
        P_hist.append(P)
        cols["t"].append(t)
        cols["mass"].append(M)
        cols["energy"].append(E)
        cols["kinetic"].append(K)
        cols["potential"].append(P)
        cols["delta"].append(abs(K - Kq) if Kq is not None else nan)
        cols["h1norm"].append(float(np.sqrt(K + M)))
        a = th0 = th1 = nan
        ap = am = nan
        if spectral is not None and gs is not None:
            from .linearized import spectral_project
            ph = np.exp(-1j * t)
            pert = pair_from_values(
                g, ph * x[0] / g.r - gs.phi, ph * x[1] / g.r - gs.psi
            )
            ap, am, _, _ = spectral_project(gs, spectral, pert)
        if mod_solve is not None:
            try:
                fit = mod_solve(pair_from_values(g, x[0] / g.r, x[1] / g.r), gs,
                                spectral)
                a, th0, th1 = fit.alpha, fit.theta, fit.theta_tilde
            except (RuntimeError, ValueError):
                pass
        cols["alpha"].append(a)
        cols["theta0"].append(th0)
        cols["theta1"].append(th1)
        cols["alpha_plus"].append(ap)
        cols["alpha_minus"].append(am)

        hit = detect_blowup(K, tail, Kq, cfg)
        if hit is None:
            hit = detect_scattering(P_hist, cols["delta"], Pq, cfg)
        if hit is None and tail > cfg.tail_fraction_tol:
            resolution_failure = True
        cols["verdict_flag"].append(VERDICT_FLAGS.get(hit or "undetermined", 0))
        if hit:
            verdict = hit
            return False
        return True

    P_hist = []
    sample(t0, x, P_hist)
    if cfg.store_states_every:
        states.append((t0, pair_from_values(g, x[0] / g.r, x[1] / g.r)))

    half = np.exp(-1j * g.sine_k**2 * tau / 2)
    full = half * half
    alive = verdict is None
    k = 0
    while alive and k < nstep:
        # merged kinetic half-steps between samples
        X = _fwd2(x) * half
        x = _inv2(X)
        block = min(cfg.sample_every, nstep - k)
        for j in range(block):
            x = _nonlinear_flow(g, x, tau, cfg.beta)
            k += 1
            last = (j == block - 1)
            X = _fwd2(x) * (half if last else full)
            x = _inv2(X)
        t = t0 + k * tau
        alive = sample(t, x, P_hist)
        if cfg.store_states_every and (k % cfg.store_states_every == 0 or not alive):
            states.append((t, pair_from_values(g, x[0] / g.r, x[1] / g.r)))

    if verdict:
        termination = "detector"
    record = TrajectoryRecord(
        **{key: np.array(val) for key, val in cols.items()},
        states=states,
    )
    record.final_state = pair_from_values(g, x[0] / g.r, x[1] / g.r)
    record.resolution_failure = resolution_failure

    if verdict is None and Kq is not None and len(cols["delta"]):
        if cols["delta"][-1] < cfg.converge_delta_factor * Kq:
            verdict = "converge_to_Q"
    record.verdict = verdict or "undetermined"
    record.termination = termination

    # conservation watchdog: relative energy drift per unit time
    if len(record.t) > 1 and abs(E0) > 0:
        span = abs(record.t[-1] - record.t[0])
        if span > 0:
            drift = np.nanmax(np.abs(record.energy - E0)) / abs(E0) / max(span, 1.0)
            record.energy_drift_flag = bool(drift > 1e-8)
    return record
