"""anisolab: numerical laboratory for anisotropic variational PDEs.

Anisotropies (positive 1-homogeneous norms) with derivative access, dual
norms and Wulff shapes, validators for the structural conditions relating a
norm to its dual, a planar profile constructor for sign-pairing anisotropies,
a smoothing family for singular/degenerate nonlinearities, and a 2-D grid
solver with rescaled-energy monotonicity and rigidity diagnostics.
"""

from .conditions import (
    BFunction,
    check_exact_pairing,
    check_nondegenerate,
    check_orthogonality_symmetry,
    check_power_growth,
    check_sign_pairing,
    coercivity_margin,
    comparability_constant,
    ellipticity_constant,
    ellipticity_from_growth,
    even_poly_b,
    power_b,
    quadratic_b,
    regularized_power_b,
)
from .duality import (
    DualNorm,
    check_polarity,
    dual_evaluate,
    dual_evaluate_many,
    dual_norm,
    duality_map,
    duality_map_inverse,
    duality_map_inverse_many,
    duality_map_many,
    ellipsoid_dual,
)
from .norms import (
    AnisotropyNorm,
    CustomNorm,
    EllipsoidNorm,
    GluedPQNorm,
    PolarNorm,
    check_homogeneity_and_euler,
    euclidean_norm,
)
from .pde import (
    EnergyTrace,
    GridField,
    Potential,
    ProblemSpec,
    Rectangle,
    SolveOptions,
    affine_trace,
    centered_box,
    check_monotonicity,
    check_pointwise_bound,
    constant_trace,
    double_well,
    energy_trace,
    gauge,
    in_wulff_ball,
    liouville_mass_test,
    poly_potential,
    rescaled_energy,
    residual,
    solve_dirichlet,
    tanh_interface_trace,
    zero_potential,
)
from .profiles import (
    ExtendedProfile,
    RadialProfile,
    bump_function,
    circle_profile,
    curvature,
    curvature_screen,
    check_smooth_matching,
    ellipse_profile,
    extend_profile,
    glued_pq_norm,
    mirrored_profile_norm,
    norm_from_profile,
    normalize_body_samples,
    parallel_angle,
    parallel_angle_inverse,
    perturbed_profile,
    pnorm_profile,
    profile_from_samples,
    trig_profile,
    validate_profile,
)
from .regularization import (
    EPS_LADDER,
    check_regularized_envelope,
    convergence_gap,
    convergence_gap_bounds,
    quadratic_cap,
    regularize,
)
from .report import ConditionReport

__version__ = "0.1.0"
