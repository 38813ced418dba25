"""Spherical tube volumes, conic condition numbers, and Monte Carlo
validation of their probabilistic tail bounds."""

__version__ = "0.1.0"

from .geometry import (
    Cap,
    SpherePoint,
    ball_volume,
    distance_to_subsphere,
    j_integral,
    j_integral_quad,
    kinematic_constant,
    projective_distance,
    riemannian_distance,
    sphere_volume,
    subsphere_tube_volume,
)
from .sampling import RngStream, Rotation, sample_rotation, sample_uniform_cap, sample_uniform_sphere
from .bounds import (
    BoundParams,
    ProblemDescriptor,
    application_bound,
    curvature_integral_bound,
    expectation_bound,
    linear_tail_bound,
    smooth_tube_bound,
    tail_bound,
    tube_ratio_bound,
)
from .conditioning import (
    PolySystem,
    WeylPolynomial,
    cntr_witness_check,
    discriminant_distance_2x2,
    eigenvalue_condition,
    frobenius_condition,
    moore_penrose_condition,
    mu_norm,
    mu_norm_real_lower,
    multiple_zero_witness,
    real_eigen_condition_lower,
    system_projective_distance,
    weyl_inner,
    weyl_norm,
)
from .varieties import (
    CurveVariety,
    DeterminantVariety,
    McEstimate,
    SubsphereVariety,
    UnionVariety,
    band_volume,
    clopper_pearson,
    distance_to_variety,
    estimate_tube_cap_ratio,
    geodesic_sphere_mu,
    verify_kinematic,
    verify_weyl_tube_bound,
)
