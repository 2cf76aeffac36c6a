"""Exact lazy series over iterated-logarithm monomials.

A series is a decreasing stream of terms ``c * exp^r_{-1} * x^r_0 * log^r_1 * ...``
with exact rational exponents, produced on demand.  The package provides the
field operations, the derivation, composition with ``log`` and ``exp``, a
numeric bridge for sampling asymptotic claims, and a small expression
language with a command line front end (``logfield``).
"""

from .calculus import derivative, nth_derivative
from .composition import (
    compose_with_log,
    complog_summands,
    exp_of,
    log_iter,
    log_linear_part,
    log_of,
    shift_log,
    substitute_logfree,
    taylor_compose,
)
from .errors import (
    BelowThreshold,
    BudgetExhausted,
    DivisionByZero,
    DSLSyntaxError,
    DSLTypeError,
    HasExpPart,
    IrrationalScalar,
    LargePartNotLogLinear,
    LogfieldError,
    MalformedInput,
    NonPositiveLeading,
    NotInfIncreasing,
    NotSmall,
    ShapeNotSupported,
    SummabilityViolation,
    UnboundName,
    ZeroSeries,
)
from .field import compose_ps1, divide, power, ps1_binomial, ps1_exp, ps1_geom, ps1_log
from .monomials import EXP, LOG, ONE_MONO, X, Monomial, mono_cmp, parse_monomial
from .numeric import EvalGrid, NumericGerm, builtin_germ, check_o, mono_eval, prefix_with_next
from .rationals import Q
from .scalars import Scalar, exp_scalar, log_scalar
from .series import (
    Budget,
    GridCertificate,
    Series,
    Term,
    add,
    almost_regular,
    e_coefficient,
    exp_order,
    from_terms,
    leading_term,
    monomial,
    mul,
    negate,
    observe,
    observing,
    one,
    scalar_mul,
    strictly_above,
    sub,
    terms_prefix,
    truncate_above,
    zero,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
