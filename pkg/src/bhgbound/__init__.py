"""Certified upper bounds for B_h[g]-sets and the min-max weight problem behind them."""

from .bounds import (
    BhgInstance,
    BoundReport,
    b3_refined_constant,
    build_G,
    check_improvement_inequality,
    cju_constant,
    crt_constant,
    g_lhs,
    prop31_bound,
    solve_sinc,
    thm11_constant,
    trivial_bound,
)
from .psi import (
    FunctionFamily,
    PsiEstimate,
    ValueMatrix,
    family_search,
    minmax_lower_bound,
    psi_lower_bound,
    theorem32_family,
    value_matrix,
)
from .sets import (
    IntSet,
    expsum_check,
    greedy_bhg,
    is_bhg,
    lemma22_check,
    mass_profile,
    max_bhg_exact,
    project_to_torus,
    rep_profile,
    window_check,
)
from .trigcert import (
    CertificationError,
    CertifiedMin,
    CosinePoly,
    Interval,
    certified_min,
    derivative_sup,
    ell1_norm,
    evaluate,
    partition,
)

__version__ = "0.1.0"
