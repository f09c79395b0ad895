"""Morse indices of constrained second variations via curves of Lagrangian subspaces."""
from .finite import (
    ConstrainedProblem,
    CriticalPoint,
    find_critical_point,
    hessian_data,
    hessian_index_nullity,
    index_additivity_check,
    is_morse_pair,
    l_space,
    lagrange_residual,
    polynomial_problem,
    quadratic_problem,
)
from .grassmannian import (
    ChartCoordinates,
    LagrangianFrame,
    darboux_adapted_basis,
    from_chart,
    grassmannian_distance,
    intersection_dim,
    tangent_form,
    to_chart,
)
from .jacobi import (
    JacobiProblem,
    LCurve,
    apply_projectors,
    flow_property_defect,
    piecewise_constant_problem,
    refine_to_limit,
    run_recursion,
    step_prederivative,
    time_variation_augment,
    uniform_partition,
    vertical_frame,
    zero_problem,
)
from .maslov import (
    DiscreteLagrangianCurve,
    SignatureResult,
    chain_rule_defect,
    curve_index_sum,
    is_monotone_increasing,
    pair_index,
    simple_curve_maslov,
    triple_index,
)
from .morse import (
    IndexReport,
    conjugate_point_times,
    hessian_oracle_index,
    increment_bound_check,
    main_lower_bound,
    local_index_terms,
    piecewise_index,
)
from .problems import CvProblem, build_cv_jacobi, build_lq, free_particle, oscillator
from .symplectic import (
    Subspace,
    SymplecticSpace,
    classify_subspace,
    is_symplectic_map,
    skew_orthogonal_complement,
    standard_form,
    symplectic_product,
)

__version__ = "0.1.0"
