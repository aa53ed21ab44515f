"""Exact and numerical integration over simplices, and volumes of perspective
and naive relaxations of the origin/simplex disjunction."""

from .cubature import (
    CubatureRule,
    Jacobi1DRule,
    apply_rule,
    cone_product_rule,
    conical_product_rule,
    gauss_jacobi_rule,
    grundmann_moller_rule,
    monte_carlo_integrate,
    radial_rule,
    rule_to_json,
)
from .errors import (
    DegenerateSimplexError,
    DivergentIntegralError,
    DomainError,
    ExactModeError,
    IntegrandOverflowError,
    NumericalFailure,
    PreconditionError,
    SimplexVolError,
    SpecParseError,
)
from .exact import (
    FormalSeries,
    PoleStructure,
    decompose_monomial,
    h_complete,
    integrate_affine_power,
    integrate_exp_affine,
    integrate_monomial_standard,
    integrate_one_norm_power,
    integrate_polynomial,
    integrate_qhomogeneous,
    lagrange_zero_sum,
    pole_structure,
)
from .functions import (
    BlackBox,
    ExpAffine,
    FunctionSpec,
    LinPow,
    LogSumExp,
    Poly,
    QHomogeneous,
    SecantPlane,
    evaluate,
    parse_function_spec,
    parse_polynomial,
    secant_mean,
    secant_plane,
)
from .geometry import (
    AffineMap,
    ConeRegion,
    Simplex,
    dump_simplex_json,
    interval,
    load_simplex_json,
    sample_uniform,
    scaled_simplex,
    shifted_simplex,
    simplex_volume,
    standard_simplex,
    to_standard,
)
from .polynomial import Polynomial
from .relaxations import (
    ExpFamilyParams,
    RelaxationConfig,
    RelaxationReport,
    convexity_audit,
    cutoff_qhomogeneous,
    cutoff_report,
    exp_family_case_a,
    exp_family_case_b,
    exp_family_volumes,
    hunter_bound_check,
    logsumexp_sweep,
    max_integral_standard,
    naive_volume,
    naive_volume_qhomogeneous,
    normalized_logsumexp_integral,
    perspective_volume,
    ratio_lower_bound_even,
    ratio_lower_bound_power,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "BlackBox",
    "ConeRegion",
    "CubatureRule",
    "DegenerateSimplexError",
    "DivergentIntegralError",
    "DomainError",
    "ExactModeError",
    "ExpAffine",
    "ExpFamilyParams",
    "FormalSeries",
    "FunctionSpec",
    "IntegrandOverflowError",
    "Jacobi1DRule",
    "LinPow",
    "LogSumExp",
    "NumericalFailure",
    "PoleStructure",
    "Poly",
    "Polynomial",
    "PreconditionError",
    "QHomogeneous",
    "RelaxationConfig",
    "RelaxationReport",
    "SecantPlane",
    "Simplex",
    "SimplexVolError",
    "SpecParseError",
    "apply_rule",
    "cone_product_rule",
    "conical_product_rule",
    "convexity_audit",
    "cutoff_qhomogeneous",
    "cutoff_report",
    "decompose_monomial",
    "dump_simplex_json",
    "evaluate",
    "exp_family_case_a",
    "exp_family_case_b",
    "exp_family_volumes",
    "gauss_jacobi_rule",
    "grundmann_moller_rule",
    "h_complete",
    "hunter_bound_check",
    "integrate_affine_power",
    "integrate_exp_affine",
    "integrate_monomial_standard",
    "integrate_one_norm_power",
    "integrate_polynomial",
    "integrate_qhomogeneous",
    "interval",
    "lagrange_zero_sum",
    "load_simplex_json",
    "logsumexp_sweep",
    "max_integral_standard",
    "monte_carlo_integrate",
    "naive_volume",
    "naive_volume_qhomogeneous",
    "normalized_logsumexp_integral",
    "parse_function_spec",
    "parse_polynomial",
    "perspective_volume",
    "pole_structure",
    "radial_rule",
    "ratio_lower_bound_even",
    "ratio_lower_bound_power",
    "rule_to_json",
    "sample_uniform",
    "scaled_simplex",
    "secant_mean",
    "secant_plane",
    "shifted_simplex",
    "simplex_volume",
    "standard_simplex",
    "to_standard",
]
