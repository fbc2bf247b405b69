"""Numerical laboratory for threshold dynamics of coupled cubic Schrodinger systems.

Radial R^3 setting: ground states and sharp constants, linearized spectra,
exponential-series special solutions, split-step time evolution, and the
virial/modulation diagnostics that classify trajectories at the mass-energy
threshold.
"""

__version__ = "0.1.0"

from .radial_core import (
    ComplexField,
    RadialGrid,
    StatePair,
    delta,
    energy,
    h1_norm,
    kinetic,
    laplacian,
    make_grid,
    mass,
    me_ratio,
    mk_ratio,
    momentum,
    pair_from_values,
    phase_rotate,
    potential_P,
    rescale,
    scaling_generator,
    weinstein_J,
)
from .ground_state import (
    GroundState,
    build_ground_state,
    pohozaev_residuals,
    sharp_gn_constant,
    shoot_scalar_profile,
)
from .linearized import (
    SectorOperator,
    SpectralData,
    apply_LI,
    apply_LR,
    apply_script_L,
    assemble_sector,
    bilinear_B,
    coercivity_estimate,
    compute_spectrum,
    kernel_basis,
    nonlinear_L,
    nonlinear_R,
    project_orthogonal,
    quadratic_Phi,
    spectral_project,
)
from .special_solutions import (
    FrequencySeries,
    auto_t0,
    build_Z_sequence,
    eval_V,
    initial_data_UA,
    residual_epsilon,
    time_shift_TA,
)
from .evolution import (
    EvolutionConfig,
    TrajectoryRecord,
    evolve,
    free_propagate,
    strang_step,
)
from .threshold_diagnostics import (
    BanicaGap,
    DecayFit,
    ModulationFit,
    VirialWeight,
    banica_gap,
    fit_exponential_decay,
    make_virial_weight,
    modulation_solve,
    second_virial,
    virial_AR,
    virial_V,
    virial_Vprime,
    virial_Vsecond_direct,
)
