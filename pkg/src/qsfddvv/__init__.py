"""DDVV-type inequalities for Riemannian maps into quaternionic space forms, checked numerically."""

from .ambient import SpaceFormAmbient, qsf_curvature, qsf_curvature_component, real_space_form_curvature, sectional_curvature
from .ddvv import (
    MatrixFamily,
    SubmanifoldData,
    Verdict,
    ddvv_matrix_ratio,
    lemma2_check,
    submanifold_ddvv_check,
    theorem1_check,
    theorem2_check,
)
from .errors import DegeneratePlaneError, InvalidArgument, UndefinedRatioError
from .invariants import (
    identity_suite,
    invariant_report,
    normal_scalar,
    normalized_normal_scalar,
    normalized_scalar,
    ricci_horizontal,
    scalar_horizontal,
)
from .quatlin import (
    AdaptedFrame,
    QuatStructure,
    commutator,
    frobenius_norm_sq,
    random_adapted_frame,
    standard_quaternionic_structure,
    validate_quaternionic,
)
from .rmap import (
    COMMUTATOR_ONLY,
    FULL,
    MapInstance,
    Sff,
    casorati,
    horizontal_curvature_component,
    normal_curvature_component,
    shape_operator,
    trace_zeta,
    trace_zeta_norm_sq,
    zeta_norm_sq,
)
from .search import FuzzConfig, construct_equality_instance, fuzz, maximize_violation, random_instance

__version__ = "0.1.0"
