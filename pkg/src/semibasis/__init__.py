"""Exact PBW-to-semicanonical transition matrices for linear A_n quivers.

The package computes, in exact rational arithmetic, the change of basis
between the PBW basis attached to the indecomposable representations of
the linearly oriented A_n quiver and the basis indexed by irreducible
components of the nilpotent variety, certifying unitriangularity with
respect to the degeneration order along the way.

    >>> from semibasis import Quiver, transition_matrix
    >>> result = transition_matrix(Quiver(2), (2, 2))
    >>> [list(map(int, row)) for row in result.matrix]
    [[1, 1, 1], [0, 1, 2], [0, 0, 1]]
"""

from .cache import HallCache, cache_dir_from_env
from .errors import (
    CacheCorruptError,
    CertificationError,
    ConsensusError,
    DeltaCheckError,
    InternalCheckError,
    InterpolationError,
    ParseError,
    RouteDisagreementError,
    SemibasisError,
)
from .hall import (
    PBWVector,
    SerreReport,
    check_serre,
    flag_word_matrix,
    hall_counts_simple_top,
    left_mul_divided_power,
    pbw_to_words,
    realize,
    iso_class,
    word_to_pbw,
)
from .nilpotent import (
    LambdaPoint,
    RhoEvaluator,
    SampleConfig,
    evaluate_word_at_point,
    lift_generic,
    peel_component,
    rho_evaluate,
    t_component,
)
from .quiver import (
    Multisegment,
    Quiver,
    deg_leq,
    enumerate_multisegments,
    euler_form,
    ext_dim,
    flag_vertex,
    format_word,
    generic_ext_simple,
    hom_dim,
    parse_word,
    peel_top,
    refine_order,
    t_top,
    total_generic_flag,
    word_weight,
)
from .semican import (
    CertifiedTransition,
    SemicanBasis,
    SemicanElement,
    evaluation_matrix,
    semican_recursive,
    transition_matrix,
    transition_via_inversion,
    verify_delta,
)

__version__ = "0.1.0"

__all__ = [
    "CacheCorruptError",
    "CertificationError",
    "CertifiedTransition",
    "ConsensusError",
    "DeltaCheckError",
    "HallCache",
    "InternalCheckError",
    "InterpolationError",
    "LambdaPoint",
    "Multisegment",
    "PBWVector",
    "ParseError",
    "Quiver",
    "RhoEvaluator",
    "RouteDisagreementError",
    "SampleConfig",
    "SemibasisError",
    "SemicanBasis",
    "SemicanElement",
    "SerreReport",
    "cache_dir_from_env",
    "check_serre",
    "deg_leq",
    "enumerate_multisegments",
    "evaluate_word_at_point",
    "evaluation_matrix",
    "euler_form",
    "ext_dim",
    "flag_vertex",
    "flag_word_matrix",
    "format_word",
    "generic_ext_simple",
    "hall_counts_simple_top",
    "hom_dim",
    "iso_class",
    "left_mul_divided_power",
    "lift_generic",
    "parse_word",
    "pbw_to_words",
    "peel_component",
    "peel_top",
    "realize",
    "refine_order",
    "rho_evaluate",
    "semican_recursive",
    "t_component",
    "t_top",
    "total_generic_flag",
    "transition_matrix",
    "transition_via_inversion",
    "verify_delta",
    "word_to_pbw",
    "word_weight",
    "__version__",
]
