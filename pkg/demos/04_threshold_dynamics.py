"""Threshold trichotomy in action: converge / scatter / blow up.

Seeds built from the exponential series sit exponentially close to the
standing-wave orbit.  Forward in time both signs converge to it (delta
decays at rate e0); backward, the A = +1 seed focuses until the blow-up
detector fires while the A = -1 seed disperses until the potential energy
collapses (scattering indicator).
"""

import numpy as np

import nlslab as nl
from nlslab.special_solutions import auto_t0

grid = nl.make_grid(4096, 30.0)
gs = nl.build_ground_state(3.0, "symmetric", grid)
sp = nl.compute_spectrum(nl.assemble_sector(gs, 0), compute_coercivity=False)
e0 = sp.e0

records = {}
for A in (-1.0, +1.0):
    ser = nl.build_Z_sequence(gs, sp, A, 4)
    t0 = auto_t0(ser, 0.05)
    seed = nl.initial_data_UA(ser, t0, align_energy=True)
    fwd = nl.evolve(seed, nl.EvolutionConfig(
        dt=1e-4, t_span=(t0, t0 + 1.0), sample_every=100, beta=gs.beta),
        gs=gs, spectral=sp)
    back = nl.evolve(seed, nl.EvolutionConfig(
        dt=2e-4, t_span=(t0, t0 - 4.0), sample_every=50, beta=gs.beta), gs=gs)
    records[A] = (t0, fwd, back)
    fit = nl.fit_exponential_decay(fwd.t, fwd.delta,
                                   (t0 + 0.1, t0 + 0.1 + 3 / e0))
    print(f"A = {A:+.0f}: K(seed)-K(Q) = {nl.kinetic(seed) - gs.K:+.3f}")
    print(f"   forward delta-rate {fit.rate:.4f} vs e0 {e0:.4f} "
          f"({abs(fit.rate - e0) / e0:.2%})")
    print(f"   backward verdict: {back.verdict} at t = {back.t[-1]:+.2f} "
          f"(max K/K_Q {np.nanmax(back.kinetic) / gs.K:.1f}, "
          f"min P/P_Q {np.nanmin(back.potential) / gs.P:.4f})")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for A, (t0, fwd, back) in records.items():
        axes[0].semilogy(fwd.t - t0, fwd.delta, label=f"A = {A:+.0f}")
        axes[1].plot(back.t - t0, back.kinetic / gs.K, label=f"A = {A:+.0f}")
    axes[0].set_xlabel("t - t0 (forward)")
    axes[0].set_ylabel("delta(t)")
    axes[0].legend()
    axes[1].set_xlabel("t - t0 (backward)")
    axes[1].set_ylabel("K / K(Q)")
    axes[1].set_ylim(0, 8)
    axes[1].legend()
    fig.tight_layout()
    fig.savefig("demo04_trichotomy.png", dpi=120)
    print("\nwrote demo04_trichotomy.png")
except ImportError:
    pass
