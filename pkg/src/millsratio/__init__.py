"""Laplace polynomials, certified Mills ratio brackets and identity checks."""

from .errors import (
    DomainError,
    InstanceTooLarge,
    IntegralityViolation,
    MillsError,
    MissingDependency,
    NonConvergence,
    PrecisionUnachievable,
)
from .exact import IntPoly, poly_derivative, poly_eval
from .laplace import (
    CoeffTable,
    LaplacePair,
    beta_coeff,
    laplace_P,
    laplace_Q,
    laplace_pair_recurrence,
    laplace_pair_three_term,
    p_coeff_closed,
    q_coeff_closed,
)
from .numeric import (
    BigReal,
    Bracket,
    asymptotic_partial_sum,
    bracket,
    cf_convergent,
    mills_derivative,
    mills_ratio,
    normal_upper_tail,
)

__version__ = "0.1.0"
