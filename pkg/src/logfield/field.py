"""Field structure: one-variable power series substituted into small series,
division through the geometric series, and rational powers."""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from .errors import DivisionByZero, NotSmall
from .monomials import ONE_MONO
from .rationals import ONE, ZERO, as_rational, fmt
from .scalars import coeff_inverse, scalar_pow
from .series import (
    Series,
    Term,
    _after,
    from_terms,
    lead_index,
    mul,
    mul_monomial,
    observing,
    one,
    scalar_mul,
    sum_stream,
    tick,
)


@dataclass(frozen=True)
class PowerSeries1:
    """``sum_n coeff(n) X^n`` with an exact coefficient generator.

    ``degree`` is an upper bound on the degree when the series is a
    polynomial, so substitution knows when to stop looking for stages.
    """

    coeff_fn: Callable[[int], object]
    label: str
    degree: Optional[int] = None
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    def coeff(self, n):
        if self.degree is not None and n > self.degree:
            return ZERO
        c = self._memo.get(n)
        if c is None:
            c = as_rational(self.coeff_fn(n))
            self._memo[n] = c
        return c

    def __str__(self):
        return self.label


def ps1_geom():
    return PowerSeries1(lambda n: ONE, "geom")


def _log_coeff(n):
    if n == 0:
        return ZERO
    return as_rational((-1) ** (n + 1)) / n


def ps1_log():
    """Taylor series of ``log(1 + X)`` at 0."""
    return PowerSeries1(_log_coeff, "F_log")


@lru_cache(maxsize=None)
def _binom(r, n):
    if n == 0:
        return ONE
    return _binom(r, n - 1) * (r - (n - 1)) / n


def ps1_binomial(r):
    """Taylor series of ``(1 + X)^r`` at 0."""
    r = as_rational(r)
    deg = int(r) if r.denominator == 1 and r >= 0 else None
    return PowerSeries1(lambda n: _binom(r, n), f"P_{fmt(r)}", deg)


@lru_cache(maxsize=None)
def _fact(n):
    return ONE if n == 0 else _fact(n - 1) * n


def ps1_exp(r=1):
    """Taylor series of ``exp(r X)`` at 0."""
    r = as_rational(r)
    return PowerSeries1(lambda n: r ** n / _fact(n), f"F_exp^{fmt(r)}", 0 if r == 0 else None)


class _Powers:
    """Memoised ``eps**n`` built by balanced products (keeps generator nesting shallow)."""

    def __init__(self, eps):
        self.eps = eps
        self.cache = {1: eps}

    def __call__(self, n):
        s = self.cache.get(n)
        if s is None:
            h = n // 2
            s = mul(self(h), self(n - h))
            self.cache[n] = s
        return s


def _scaled(S, c):
    for a, m in S.raw():
        yield Term(c * a, m)


def compose_ps1(P, eps):
    """``P o eps = sum_n P.coeff(n) * eps**n`` for small eps.

    Stage n is bounded by ``lead(eps)**n``, which is what lets the merge
    emit a term as soon as every stage that could still reach it is active.
    """

    def gen():
        idx_lead = None
        for i, t in enumerate(eps.raw()):
            if t.coeff != 0:
                idx_lead = t
                break
        c0 = P.coeff(0)
        if idx_lead is None:
            if c0 != 0:
                yield Term(c0, ONE_MONO)
            return
        lead = idx_lead.mono
        # leading ghosts (from cancellation) would sit above the stage bounds
        powers = _Powers(_after(eps, i - 1) if i else eps)
        if not lead.is_small():
            raise NotSmall(f"cannot substitute {P} into a series led by {lead}")

        def parts():
            if c0 != 0:
                yield (ONE_MONO, iter([Term(c0, ONE_MONO)]))
            n = 1
            bound = lead
            while P.degree is None or n <= P.degree:
                tick()
                c = P.coeff(n)
                if c != 0:
                    yield (bound, _scaled(powers(n), c))
                else:
                    yield (bound, ())
                n += 1
                bound = bound * lead

        yield from sum_stream(parts())

    def cert():
        c = eps.cert.power_closure()
        return c

    return Series(gen, cert, label=f"{P}(eps)")


def split_lead(G, budget=None):
    """``(a, g, eps)`` with ``G = a*g*(1 + eps)`` and eps small (lazy)."""
    with observing(budget):
        t, idx = lead_index(G)
    if t is None:
        return None
    a, g = t
    eps = scalar_mul(coeff_inverse(a), mul_monomial(_after(G, idx), g.inv()))
    return a, g, eps


def divide(F, G, budget=None):
    """``F / G = F * a^-1 * g^-1 * geom(-eps)`` where ``G = a*g*(1 + eps)``."""
    split = split_lead(G, budget)
    if split is None:
        raise DivisionByZero("division by the zero series")
    a, g, eps = split
    inv_a = coeff_inverse(a)
    q = compose_ps1(ps1_geom(), scalar_mul(-1, eps))
    return mul(scalar_mul(inv_a, mul_monomial(F, g.inv())), q)


def power(G, r, budget=None):
    """``G**r = a**r * g**r * P_r(eps)`` for rational r."""
    r = as_rational(r)
    if r == 0:
        return one()
    split = split_lead(G, budget)
    if split is None:
        if r > 0:
            return from_terms([])
        raise DivisionByZero("zero series to a negative power")
    a, g, eps = split
    ar = scalar_pow(a, r)
    if r == 1:
        return G
    return scalar_mul(ar, mul_monomial(compose_ps1(ps1_binomial(r), eps), g ** r))
