"""Real-axis evaluation and numeric oracles.

Evaluation goes through mpmath contexts so that ``exp`` of a large argument
does not overflow.  The default 53-bit context has double precision; callers
comparing nearly cancelling quantities ask for more bits.  The algebra itself
never touches these numbers.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath

from .errors import BelowThreshold, BudgetExhausted, MalformedInput
from .scalars import Scalar
from .series import observing, tick

DEFAULT_PREC = 53


@lru_cache(maxsize=None)
def context(prec=DEFAULT_PREC):
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


@lru_cache(maxsize=None)
def threshold(level):
    """``e_k`` with ``e_0 = 0`` and ``e_k = exp(e_{k-1})``; log_k is positive above it."""
    if level < 0:
        return -math.inf
    t = 0.0
    for _ in range(level):
        t = math.exp(t)
    return t


def mono_threshold(m):
    return threshold(m.max_level) if not m.is_one else -math.inf


def _check(x, t, what):
    if not x > t:
        raise BelowThreshold(f"{what} needs x > {t:.6g}, got {x}")


def _rat(ctx, r):
    return ctx.mpf(int(r.numerator)) / int(r.denominator)


def _coeff(ctx, c):
    if isinstance(c, Scalar):
        return c.evaluate(ctx)
    return _rat(ctx, c)


def _logs(ctx, x, top):
    # values of log_{-1}(x), log_0(x), ..., log_top(x)
    x = ctx.mpf(x)
    out = [ctx.exp(x), x]
    v = x
    for _ in range(top):
        v = ctx.log(v)
        out.append(v)
    return out


def mono_eval(m, x, prec=DEFAULT_PREC):
    """``prod log_i(x)^{r_i}`` as an mpmath number."""
    _check(x, mono_threshold(m), f"monomial {m}")
    ctx = context(prec)
    if m.is_one:
        return ctx.mpf(1)
    vals = _logs(ctx, x, max(m.max_level, 0))
    out = ctx.mpf(1)
    for level, r in m.exps.items():
        v = vals[level + 1]
        out *= v ** int(r) if r.denominator == 1 else v ** _rat(ctx, r)
    return out


def eval_terms(terms, x, prec=DEFAULT_PREC):
    ctx = context(prec)
    total = ctx.mpf(0)
    for c, m in terms:
        total += _coeff(ctx, c) * mono_eval(m, x, prec)
    return total


def series_eval_prefix(F, k, x, budget=None, prec=DEFAULT_PREC):
    """Value at x of the sum of the first k nonzero terms of F."""
    from .series import terms_prefix

    return eval_terms(terms_prefix(F, k, budget), x, prec)


@dataclass(frozen=True)
class NumericGerm:
    """A real function evaluated on ``(min_x, oo)``."""

    eval: Callable
    min_x: float = -math.inf
    label: str = "germ"

    def __call__(self, x, prec=DEFAULT_PREC):
        _check(x, self.min_x, self.label)
        return self.eval(x, prec)


@dataclass(frozen=True)
class EvalGrid:
    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise MalformedInput("empty grid")
        if any(p <= 0 for p in pts) or any(b <= a for a, b in zip(pts, pts[1:])):
            raise MalformedInput("grid points must be positive and strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def parse(cls, text):
        try:
            return cls(tuple(float(p) for p in text.split(",") if p.strip()))
        except ValueError as exc:
            raise MalformedInput(f"bad grid {text!r}") from exc


DEFAULT_GRID = EvalGrid((1e2, 1e3, 1e4))


@dataclass(frozen=True)
class RatioReport:
    ratios: tuple
    decreasing: bool
    final: float
    verdict: str

    def to_json(self):
        return {
            "ratios": list(self.ratios),
            "decreasing": self.decreasing,
            "final": self.final,
            "verdict": self.verdict,
        }


def numeric_of_series(F, k, budget=None):
    """Germ of the sum of the first k terms of F."""
    from .series import terms_prefix

    terms = terms_prefix(F, k, budget)
    t = max([mono_threshold(m) for _, m in terms] + [-math.inf])
    return NumericGerm(lambda x, prec=DEFAULT_PREC: eval_terms(terms, x, prec), t, "series prefix")


def numeric_complog(f, g):
    """Germ of ``f o log o g``; evaluation checks that ``log(g(x))`` is in f's domain."""

    def ev(x, prec=DEFAULT_PREC):
        ctx = context(prec)
        gx = g(x, prec)
        if not gx > 0:
            raise BelowThreshold(f"g({x}) = {gx} is not positive")
        y = ctx.log(gx)
        if not y > f.min_x:
            raise BelowThreshold(f"log(g({x})) = {y} is below the threshold of f")
        return f(y, prec)

    return NumericGerm(ev, g.min_x, f"({f.label}) o log o ({g.label})")


def fd_derivative(f, x, h, prec=DEFAULT_PREC):
    """Central difference ``(f(x+h) - f(x-h)) / 2h``."""
    if not h > 0:
        raise MalformedInput("h must be positive")
    _check(x - h, f.min_x, f.label)
    ctx = context(prec)
    x, h = ctx.mpf(x), ctx.mpf(h)
    return (f(x + h, prec) - f(x - h, prec)) / (2 * h)


def _settled_truncation(F, n, budget):
    # the terms >= n, which must be a finite set reachable within the budget
    out = []
    with observing(budget):
        for t in F.raw():
            if t.mono.cmp(n) < 0:
                break
            tick()
            if t.coeff != 0:
                out.append(t)
    return out


def check_o(f, F, n, grid=DEFAULT_GRID, budget=None, prec=128, limit=0.1):
    """Ratios ``|f(x) - F_n(x)| / n(x)`` over the grid.

    The verdict is "pass" when the ratios decrease strictly (or vanish) and the
    last one is below ``limit``.  Finitely many samples cannot prove o(n); the
    raw ratios are reported so callers can apply their own policy.
    """
    trunc = _settled_truncation(F, n, budget)
    ratios = []
    for x in grid.points:
        _check(x, max(f.min_x, mono_threshold(n)), "check_o grid")
        for _, m in trunc:
            _check(x, mono_threshold(m), f"monomial {m}")
        diff = abs(f(x, prec) - eval_terms(trunc, x, prec))
        ratios.append(float(diff / abs(mono_eval(n, x, prec))))
    decreasing = all(b < a or (a == 0 and b == 0) for a, b in zip(ratios, ratios[1:]))
    final = ratios[-1]
    verdict = "pass" if decreasing and final < limit else "fail"
    return RatioReport(tuple(ratios), decreasing, final, verdict)


def prefix_with_next(F, k, budget=None):
    """First k nonzero terms and a bound monomial for what follows.

    Returns ``(terms, nxt)`` where ``nxt`` is the (k+1)-th term, ``None`` if F
    has exactly the returned terms, or ``(1, w)`` with w the lowest monomial
    the enumeration reached when the budget ran out (ghosts included).
    """
    terms = []
    last = None
    try:
        with observing(budget):
            for t in F.raw():
                last = t.mono
                if t.coeff != 0:
                    if len(terms) == k:
                        return terms, t
                    terms.append(t)
        return terms, None
    except BudgetExhausted:
        if last is None:
            raise
        from .series import Term

        return terms, Term(1, last)


# -- builtin germs -------------------------------------------------------------------


def _g(fn, min_x, label):
    return NumericGerm(lambda x, prec=DEFAULT_PREC: fn(context(prec), x), min_x, label)


BUILTIN_GERMS = {
    "one": _g(lambda c, x: c.mpf(1), -math.inf, "1"),
    "x": _g(lambda c, x: c.mpf(x), -math.inf, "x"),
    "exp": _g(lambda c, x: c.exp(x), -math.inf, "exp"),
    "log": _g(lambda c, x: c.log(x), 0.0, "log"),
    "loglog": _g(lambda c, x: c.log(c.log(x)), 1.0, "log[2]"),
    "geom": _g(lambda c, x: 1 / (1 - 1 / c.mpf(x)), 1.0, "1/(1 - x^-1)"),
    "expinv": _g(lambda c, x: c.exp(1 / c.mpf(x)), 0.0, "exp(x^-1)"),
    "sqrt": _g(lambda c, x: c.sqrt(x), 0.0, "x^1/2"),
    "xlogx": _g(lambda c, x: x * c.log(x), 0.0, "x*log"),
    "log1p_inv": _g(lambda c, x: c.log(1 + 1 / c.mpf(x)), 0.0, "log(1 + x^-1)"),
}


def builtin_germ(name):
    try:
        return BUILTIN_GERMS[name]
    except KeyError:
        raise MalformedInput(
            f"unknown germ {name!r}; choose from {', '.join(sorted(BUILTIN_GERMS))}"
        ) from None


__all__ = [
    "NumericGerm",
    "EvalGrid",
    "RatioReport",
    "DEFAULT_GRID",
    "threshold",
    "mono_eval",
    "eval_terms",
    "series_eval_prefix",
    "numeric_of_series",
    "numeric_complog",
    "fd_derivative",
    "check_o",
    "prefix_with_next",
    "builtin_germ",
    "BUILTIN_GERMS",
]
