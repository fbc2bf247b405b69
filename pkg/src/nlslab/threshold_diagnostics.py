"""Virial quantities, the Banica-type gap, modulation fits, and decay fits.

Weight functions come in three flavors: the exact quadratic a = r^2 (finite
variance), a plateau weight that is r^2 inside radius R and vanishes beyond
3R while keeping the radial second derivative below 2, and a capped weight
that levels off at 2R^2 with |grad a|^2 controlled by a.  The transition
region carries a C^2 two-point quintic whose constraint compliance is
verified samplewise at construction.

The virial identities are implemented in the form that is exact for this
system,

    V''(t) = 4 int a'' G - int (Lap^2 a) rho - int (Lap a) Pdens
           = -4 (K - 6E) + A_R ,
    A_R    = 4 int (a''-2) G - int (Lap^2 a) rho - int (Lap a - 6) Pdens,

with G the radial-gradient density and Pdens the quartic interaction
density.  On trajectories with E = E(Q) this reads V'' = -4 delta + A_R in
the high-kinetic regime and V'' = +4 delta + A_R in the low regime.  (The
narrative source prints the gradient coefficient of A_R as 2 and a low-
regime constant 2 delta; both are inconsistent with the exact-weight case
V'' = -4 delta that the same source states, so the derivable constants are
used.)
"""

from dataclasses import dataclass

import numpy as np

from .radial_core import (
    StatePair,
    deriv_w,
    integrate,
    kinetic,
    lap_w,
    l2_inner,
    mass,
    pair_from_values,
    potential_P,
)

WEIGHT_MODES = ("exact_quadratic", "plateau_quadratic", "capped")


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

from numpy.polynomial import Polynomial as _Poly

_U = _Poly([0.0, 1.0])
_BUMP = (1.0 - (2.0 * _U - 1.0) ** 2) ** 3        # C^2 bump on [0, 1]
_HALF_BUMP = (1.0 - _U**2) ** 3                   # 1 -> 0 on [0, 1]
_SMOOTHSTEP = _Poly([0.0, 0.0, 0.0, 10.0, -15.0, 6.0])  # C^2 ramp 0 -> 1


class _PiecewisePoly:
    """Sum of polynomial pieces amp * P((x - x0)/w) on [x0, x0 + w).

    Supports pointwise evaluation of the profile and two derivatives, plus
    exact cumulative integrals int rho and int t*rho(t) dt (primitives of
    polynomials), which is what the weight assembly needs.  Pieces are
    half-open so samples landing exactly on a seam are counted once.
    """

    def __init__(self):
        self.pieces = []  # (x0, w, Polynomial, amp)

    def add(self, x0, w, poly, amp):
        self.pieces.append((float(x0), float(w), poly, float(amp)))

    def area(self):
        return sum(amp * w * P.integ()(1.0) for _, w, P, amp in self.pieces)

    def moment(self):
        """int x * rho(x) dx over all pieces."""
        tot = 0.0
        for x0, w, P, amp in self.pieces:
            I0 = P.integ()(1.0)
            I1 = (P * _U).integ()(1.0)
            tot += amp * w * (x0 * I0 + w * I1)
        return tot

    def _sum(self, x, order):
        out = np.zeros_like(x)
        for x0, w, P, amp in self.pieces:
            u = (x - x0) / w
            m = (u >= 0.0) & (u < 1.0)
            vals = P.deriv(order)(u[m]) / w**order if order else P(u[m])
            out[m] += amp * vals
        return out

    def __call__(self, x, order=0):
        return self._sum(np.asarray(x, float), order)

    def cumulative(self, x):
        """(int_1^x rho, int_1^x t rho(t) dt) sampled at x."""
        x = np.asarray(x, float)
        c0 = np.zeros_like(x)
        c1 = np.zeros_like(x)
        for x0, w, P, amp in self.pieces:
            u = np.clip((x - x0) / w, 0.0, 1.0)
            Pi = P.integ()
            Pui = (P * _U).integ()
            c0 += amp * w * Pi(u)
            c1 += amp * w * (x0 * Pi(u) + w * Pui(u))
        return c0, c1


def _transition_profile(mode):
    """Scaled curvature rho = a''/2 on x in [1, 3] (a = R^2 A(r/R)).

    The profile sums a boundary half-bump (rho(1) = 1 for C^2 matching), a
    deep down-spike (amplitude D, unconstrained below), and for the plateau
    a bounded up-ramp (amplitude U <= 1 keeps a'' <= 2).  The amplitudes
    solve the two endpoint conditions

        int rho = -1,   int (3 - x) rho = -5/2 (plateau) or -3/2 (capped),

    equivalent to a'(3R) = 0 and a(3R) = target.
    """
    moment_target = -2.5 if mode == "plateau_quadratic" else -1.5

    base = _PiecewisePoly()
    base.add(1.0, 0.15, _HALF_BUMP, 1.0)
    b_area = base.area()
    b_mom3 = 3.0 * b_area - base.moment()

    if mode == "plateau_quadratic":
        down = _PiecewisePoly()
        down.add(1.05, 0.30, _BUMP, 1.0)   # centered 1.2
        up = _PiecewisePoly()
        up.add(2.10, 0.35, _SMOOTHSTEP, 1.0)
        up.add(2.45, 0.25, _Poly([1.0]), 1.0)
        up.add(2.70, 0.30, 1.0 - _SMOOTHSTEP, 1.0)
        d_area, u_area = down.area(), up.area()
        d_mom3 = 3.0 * d_area - down.moment()
        u_mom3 = 3.0 * u_area - up.moment()
        M = np.array([[-d_area, u_area], [-d_mom3, u_mom3]])
        rhs = np.array([-1.0 - b_area, moment_target - b_mom3])
        D, U = np.linalg.solve(M, rhs)
        if not (D > 0 and 0 <= U <= 1.0 + 1e-12):
            raise RuntimeError(f"weight profile infeasible: D={D}, U={U}")
        prof = _PiecewisePoly()
        prof.pieces = list(base.pieces)
        prof.add(1.05, 0.30, _BUMP, -D)
        prof.add(2.10, 0.35, _SMOOTHSTEP, U)
        prof.add(2.45, 0.25, _Poly([1.0]), U)
        prof.add(2.70, 0.30, 1.0 - _SMOOTHSTEP, U)
        return prof

    # capped: no up-leg needed; the spike position balances the moment
    w = 0.30
    I0 = _BUMP.integ()(1.0)            # unit-bump area in local coords
    I1 = (_BUMP * _U).integ()(1.0)     # unit-bump first moment
    D = (1.0 + b_area) / (w * I0)
    # (3 - x)-moment of the spike is 3 w I0 - (x0 w I0 + w^2 I1); solve x0
    need = (b_mom3 - moment_target) / D
    x0 = (3.0 * w * I0 - w * w * I1 - need) / (w * I0)
    if not (1.0 <= x0 and x0 + w <= 3.0):
        raise RuntimeError(f"capped weight spike leaves the transition: x0={x0}")
    prof = _PiecewisePoly()
    prof.pieces = list(base.pieces)
    prof.add(x0, w, _BUMP, -D)
    return prof


@dataclass(frozen=True)
class VirialWeight:
    R: float
    mode: str
    a: np.ndarray
    a_r: np.ndarray      # radial first derivative
    a_rr: np.ndarray
    lap_a: np.ndarray    # a'' + 2 a'/r
    bilap_a: np.ndarray  # a'''' + 4 a'''/r
    grad_sq_over_a: float  # recorded constant for the capped mode


def make_virial_weight(grid, R, mode="exact_quadratic"):
    if mode not in WEIGHT_MODES:
        raise ValueError(f"unknown weight mode {mode!r}")
    r = grid.r
    if mode == "exact_quadratic":
        a = r**2
        return VirialWeight(float(R), mode, a, 2 * r, np.full_like(r, 2.0),
                            np.full_like(r, 6.0), np.zeros_like(r), 0.0)
    if R <= 0 or 3 * R >= grid.r_max:
        raise ValueError("need 0 < R and 3R < r_max for truncated weights")
    target = 0.0 if mode == "plateau_quadratic" else 2.0 * R**2
    prof = _transition_profile(mode)
    a = np.where(r < R, r**2, target)
    a_r = np.where(r < R, 2 * r, 0.0)
    a_rr = np.where(r < R, 2.0, 0.0)
    a3 = np.zeros_like(r)
    a4 = np.zeros_like(r)
    mid = (r >= R) & (r <= 3 * R)
    x = r[mid] / R
    rho = prof(x)
    cum0, cum1 = prof.cumulative(x)
    a[mid] = R**2 * (1.0 + 2.0 * (x - 1.0) + 2.0 * (x * cum0 - cum1))
    a_r[mid] = R * (2.0 + 2.0 * cum0)
    a_rr[mid] = 2.0 * rho
    a3[mid] = 2.0 * prof(x, order=1) / R
    a4[mid] = 2.0 * prof(x, order=2) / R**2
    if np.max(a_rr) > 2.0 + 1e-12:
        raise RuntimeError(
            f"weight violates d2a <= 2 (max {np.max(a_rr):.6f}); "
            "transition construction failed"
        )
    gso = 0.0
    if mode == "capped":
        if np.min(a) <= 0:
            raise RuntimeError("capped weight must stay positive")
        gso = float(np.max(a_r**2 / a))
    lap = a_rr + 2 * a_r / r
    bilap = a4 + 4 * a3 / r
    return VirialWeight(float(R), mode, a, a_r, a_rr, lap, bilap, gso)


# ---------------------------------------------------------------------------
# virial quantities
# ---------------------------------------------------------------------------

def _densities(s):
    g = s.grid
    wu, wv = s.u * g.r, s.v * g.r
    du = (deriv_w(g, wu) - s.u) / g.r      # u'
    dv = (deriv_w(g, wv) - s.v) / g.r
    rho = np.abs(s.u) ** 2 + np.abs(s.v) ** 2
    G = np.abs(du) ** 2 + np.abs(dv) ** 2
    imflux = (np.conj(s.u) * du).imag + (np.conj(s.v) * dv).imag
    return rho, G, imflux


def virial_V(s, w):
    rho, _, _ = _densities(s)
    return float(integrate(s.grid, w.a * rho))


def virial_Vprime(s, w):
    """V'_R = 2 Im int grad a . (grad u ubar + grad v vbar)."""
    _, _, imflux = _densities(s)
    return float(2.0 * integrate(s.grid, w.a_r * imflux))


def virial_AR(s, w, beta):
    """Truncation defect of the virial identity; vanishes on the exact weight."""
    rho, G, _ = _densities(s)
    u2 = np.abs(s.u) ** 2
    v2 = np.abs(s.v) ** 2
    pdens = u2**2 + 2 * beta * u2 * v2 + v2**2
    g = s.grid
    return float(
        4.0 * integrate(g, (w.a_rr - 2.0) * G)
        - integrate(g, w.bilap_a * rho)
        - integrate(g, (w.lap_a - 6.0) * pdens)
    )


def second_virial(s, w, gs, regime):
    """Right-hand side of the V'' identity at the threshold energy.

    high (K > K(Q)):  -4 delta + A_R
    low  (K < K(Q)):  +4 delta + A_R
    """
    K = kinetic(s)
    d = K - gs.K
    if regime == "high":
        if d < 0:
            raise ValueError("high regime requested but K < K(Q)")
        return -4.0 * d + virial_AR(s, w, gs.beta)
    if regime == "low":
        if d > 0:
            raise ValueError("low regime requested but K > K(Q)")
        return 4.0 * (-d) + virial_AR(s, w, gs.beta)
    raise ValueError("regime must be 'high' or 'low'")


def virial_Vsecond_direct(s, w, beta):
    """V'' evaluated directly: 4 int a'' G - int Lap^2 a rho - int Lap a Pdens."""
    rho, G, _ = _densities(s)
    u2 = np.abs(s.u) ** 2
    v2 = np.abs(s.v) ** 2
    pdens = u2**2 + 2 * beta * u2 * v2 + v2**2
    g = s.grid
    return float(
        4.0 * integrate(g, w.a_rr * G)
        - integrate(g, w.bilap_a * rho)
        - integrate(g, w.lap_a * pdens)
    )


# ---------------------------------------------------------------------------
# Banica-type gap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BanicaGap:
    lhs: float           # (Im int grad a . (grad f fbar + grad g gbar))^2
    rhs: float           # delta^2 * int |grad a|^2 rho
    gn_gap: float        # K - P^{2/3} / (c_gn^{2/3} M^{1/3})
    sharp_rhs: float     # gn_gap * int |grad a|^2 rho (discriminant bound)
    ratio: float         # lhs / rhs

    def as_tuple(self):
        return (self.lhs, self.rhs)


def banica_gap(s, w, gs, hypothesis_rtol=1e-6):
    """Both sides of the Cauchy-Schwarz-type flux bound.

    The sharp intermediate inequality lhs <= gn_gap * int |grad a|^2 rho
    holds for any state (it is the discriminant of the Gagliardo-Nirenberg
    quadratic); under the threshold hypotheses M = M(Q), E = E(Q) the gap
    itself is O(delta^2), which yields the quoted delta^2 bound.
    """
    M, K = mass(s), kinetic(s)
    P = potential_P(s, gs.beta)
    E = 0.5 * K - 0.25 * P
    if abs(M - gs.M) > hypothesis_rtol * gs.M or abs(E - gs.E) > hypothesis_rtol * abs(gs.E):
        raise ValueError(
            "Banica hypotheses M = M(Q), E = E(Q) violated beyond "
            f"rtol={hypothesis_rtol:g}"
        )
    rho, _, imflux = _densities(s)
    flux = integrate(s.grid, w.a_r * imflux)
    lhs = float(flux**2)
    weight = float(integrate(s.grid, w.a_r**2 * rho))
    d = abs(K - gs.K)
    rhs = float(d**2 * weight)
    gn_gap = float(K - abs(P) ** (2.0 / 3.0) / (gs.c_gn ** (2.0 / 3.0) * M ** (1.0 / 3.0)))
    sharp = float(gn_gap * weight)
    ratio = lhs / rhs if rhs > 0 else np.inf
    return BanicaGap(lhs, rhs, gn_gap, sharp, ratio)


# ---------------------------------------------------------------------------
# modulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModulationFit:
    alpha: float
    theta: float
    theta_tilde: float
    h_k: StatePair
    delta: float
    converged: bool
    orthogonality: tuple   # residuals of the imposed conditions


def _phase_newton(grid, uvals, profile, max_iter=50, tol=1e-13):
    """theta with Im <e^{-i theta} u, profile> = 0 and positive real overlap."""
    ip = np.sum(grid.quad_weights * uvals * profile)  # complex
    scale = abs(ip)
    if scale == 0:
        return 0.0, True
    theta = float(np.angle(ip))
    for _ in range(max_iter):
        F = (np.exp(-1j * theta) * ip).imag
        dF = -(np.exp(-1j * theta) * ip).real
        if abs(F) <= tol * scale:
            return theta % (2 * np.pi), True
        if dF == 0:
            break
        theta -= F / dF
    return theta % (2 * np.pi), abs((np.exp(-1j * theta) * ip).imag) <= 1e-10 * scale


def modulation_solve(s, gs, spectral=None, delta0=None, max_iter=50):
    """Fit (alpha, theta, theta~) so the residual pair lands in G-perp.

    Radial setting: the translation parameter is frozen at zero, so the
    phase conditions decouple and Newton converges from the overlap angle
    immediately; alpha then follows from the Delta-weighted overlap, which
    enforces the remaining orthogonality exactly.
    """
    if delta0 is None:
        delta0 = 0.1 * gs.K
    g = s.grid
    d = abs(kinetic(s) - gs.K)
    if d >= delta0:
        raise ValueError(f"delta(s) = {d:.3e} is not below delta0 = {delta0:.3e}")

    theta = theta_t = 0.0
    ok1 = ok2 = True
    if gs.branch != "semi_trivial_second":
        theta, ok1 = _phase_newton(g, s.u, gs.phi, max_iter)
    if gs.branch != "semi_trivial_first":
        theta_t, ok2 = _phase_newton(g, s.v, gs.psi, max_iter)
    if gs.branch == "semi_trivial_first":
        theta_t = 0.0
    if gs.branch == "semi_trivial_second":
        theta = 0.0

    lap_phi = lap_w(g, gs.phi * g.r) / g.r
    lap_psi = lap_w(g, gs.psi * g.r) / g.r
    num = (np.exp(-1j * theta) * np.sum(g.quad_weights * s.u * lap_phi)).real \
        + (np.exp(-1j * theta_t) * np.sum(g.quad_weights * s.v * lap_psi)).real
    alpha = -num / gs.K - 1.0

    h = np.exp(-1j * theta) * s.u - (1.0 + alpha) * gs.phi
    k = np.exp(-1j * theta_t) * s.v - (1.0 + alpha) * gs.psi
    hk = pair_from_values(g, h, k)

    res = []
    nrm = max(np.sqrt(mass(hk)), 1e-300)
    if abs(gs.phi).max() > 0:
        res.append(abs(l2_inner(g, 1j * gs.phi, h)) / (np.sqrt(gs.M) * nrm))
    if abs(gs.psi).max() > 0:
        res.append(abs(l2_inner(g, 1j * gs.psi, k)) / (np.sqrt(gs.M) * nrm))
    o2 = l2_inner(g, lap_phi, h) + l2_inner(g, lap_psi, k)
    res.append(abs(o2) / (gs.K * nrm))

    return ModulationFit(float(alpha), float(theta), float(theta_t), hk,
                         float(d), bool(ok1 and ok2), tuple(res))


# ---------------------------------------------------------------------------
# decay fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    window: tuple
    rate: float
    amplitude: float
    max_log_residual: float
    n_samples: int


def fit_exponential_decay(times, values, window):
    """Least squares on log-values over the window: values ~ A e^{-rate t}."""
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    t_a, t_b = window
    if t_a >= t_b:
        raise ValueError("empty fit window")
    if t_a < times.min() - 1e-12 or t_b > times.max() + 1e-12:
        raise ValueError("fit window leaves the sampled range")
    m = (times >= t_a) & (times <= t_b) & np.isfinite(values)
    if m.sum() < 10:
        raise ValueError(f"need at least 10 samples in the window, got {int(m.sum())}")
    if np.any(values[m] <= 0):
        raise ValueError("non-positive values in the fit window")
    ts, ys = times[m], np.log(values[m])
    slope, intercept = np.polyfit(ts, ys, 1)
    resid = ys - (slope * ts + intercept)
    return DecayFit(
        window=(float(t_a), float(t_b)),
        rate=float(-slope),
        amplitude=float(np.exp(intercept)),
        max_log_residual=float(np.abs(resid).max()),
        n_samples=int(m.sum()),
    )
