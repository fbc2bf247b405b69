"""The linearized operator pair: instability eigenvalue, kernels, coercivity.

The block operator LL = [[0, -L_I], [L_R, 0]] has a single positive real
eigenvalue e0 with a conjugate eigenmode pair Y+-.  All couplings reduce to
the same scalar problem, so e0 is beta-independent; the kernel dimensions
switch between the branch regimes, and the linearized energy is coercive
once the symmetry and eigen-directions are projected out.
"""

import numpy as np

import nlslab as nl

grid = nl.make_grid(4096, 30.0)

print("instability eigenvalue across couplings:")
for beta, branch in [(0.5, "semi_trivial_first"), (2.0, "symmetric"),
                     (3.0, "symmetric"), (5.0, "symmetric")]:
    gs = nl.build_ground_state(beta, branch, grid)
    op = nl.assemble_sector(gs, 0)
    sp = nl.compute_spectrum(op, compute_coercivity=(beta == 3.0))
    k0 = len(nl.kernel_basis(op))
    k1 = len(nl.kernel_basis(nl.assemble_sector(gs, 1)))
    extra = f", coercivity c = {sp.coercivity_c:.5f}" if sp.coercivity_c else ""
    print(f"  beta={beta:3.1f}: e0 = {sp.e0:.9f}  (eig residual "
          f"{sp.eig_residual:.1e}), kernel dims l0/l1 = {k0}/{k1}{extra}")

gs = nl.build_ground_state(3.0, "symmetric", grid)
op = nl.assemble_sector(gs, 0)
sp = nl.compute_spectrum(op, compute_coercivity=False)

print("\nstructure checks at beta = 3:")
print(f"  Phi(Q) + 2P(Q)      = {nl.quadratic_Phi(op, gs.Q) + 2 * gs.P:.2e}")
print(f"  Phi(Y+)             = {nl.quadratic_Phi(op, sp.Yplus):.2e}")
print(f"  B(Y+, Y-)           = {nl.bilinear_B(op, sp.Yplus, sp.Yminus):+.12f}")
li = nl.apply_LI(op, gs.Q)
print(f"  max |L_I Q|         = {np.abs(li.u).max():.2e}")

ap, am, betas, rem = nl.spectral_project(gs, sp, sp.Yplus)
print(f"  project Y+: alpha+ = {ap:.10f}, alpha- = {am:.1e}, "
      f"|remainder| = {nl.h1_norm(rem):.1e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(grid.r, sp.Yplus.u.real, label="Re Y+ (first component)")
    ax.plot(grid.r, sp.Yplus.u.imag, label="Im Y+ (first component)")
    ax.plot(grid.r, gs.phi, "--", label="Q first component")
    ax.set_xlim(0, 12)
    ax.set_xlabel("r")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo02_eigenmode.png", dpi=120)
    print("\nwrote demo02_eigenmode.png")
except ImportError:
    pass
