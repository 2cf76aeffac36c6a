"""Exact transcendental scalars: ``log`` of positive rationals and ``e^c``.

Coefficients are normally rationals (gmpy2 ``mpq``).  The log-composition
calculus needs ``log a`` and ``e^c`` for rational ``a, c``; those are carried
as :class:`Scalar` values, i.e. rational linear combinations of products
``(log p1)^k1 ... (log pj)^kj * e^c`` with ``p`` prime.  Equality is equality
of normal forms (the ``log p`` and ``e^c`` are treated as independent).

A Scalar that happens to be rational is always returned as a plain ``mpq``.
"""

from functools import lru_cache

import gmpy2
import mpmath

from .errors import IrrationalScalar
from .rationals import ONE, ZERO, as_rational, fmt, is_rational, rational_power

_RAT_KEY = ((), ZERO)


def _make(d):
    d = {k: v for k, v in d.items() if v != 0}
    if not d:
        return ZERO
    if len(d) == 1 and _RAT_KEY in d:
        return d[_RAT_KEY]
    return Scalar(d)


def _key_mul(k1, k2):
    logs = dict(k1[0])
    for p, e in k2[0]:
        logs[p] = logs.get(p, 0) + e
    return (tuple(sorted(logs.items())), k1[1] + k2[1])


def _as_dict(v):
    if isinstance(v, Scalar):
        return v._t
    return {_RAT_KEY: as_rational(v)}


class Scalar:
    __slots__ = ("_t", "_h")

    def __init__(self, terms):
        self._t = dict(terms)
        self._h = hash(frozenset(self._t.items()))

    def __add__(self, other):
        if not (isinstance(other, Scalar) or is_rational(other)):
            return NotImplemented
        d = dict(self._t)
        for k, v in _as_dict(other).items():
            d[k] = d.get(k, ZERO) + v
        return _make(d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -v for k, v in self._t.items()})

    def __sub__(self, other):
        if not (isinstance(other, Scalar) or is_rational(other)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not (isinstance(other, Scalar) or is_rational(other)):
            return NotImplemented
        if is_rational(other):
            return _make({k: v * other for k, v in self._t.items()})
        d = {}
        for k1, v1 in self._t.items():
            for k2, v2 in other._t.items():
                k = _key_mul(k1, k2)
                d[k] = d.get(k, ZERO) + v1 * v2
        return _make(d)

    __rmul__ = __mul__

    def inverse(self):
        if len(self._t) == 1:
            ((logs, c), v), = self._t.items()
            if not logs:
                return _make({((), -c): 1 / v})
        raise IrrationalScalar(f"cannot invert {self} exactly")

    def __truediv__(self, other):
        if is_rational(other):
            return self * (ONE / as_rational(other))
        if isinstance(other, Scalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return as_rational(other) * self.inverse()

    def __pow__(self, r):
        return scalar_pow(self, r)

    def __eq__(self, other):
        return isinstance(other, Scalar) and self._t == other._t

    def __hash__(self):
        return self._h

    def __bool__(self):
        return True

    def evaluate(self, ctx=None):
        """Numeric value as an mpmath number (default: 200-bit context)."""
        ctx = ctx or _hp()
        total = ctx.mpf(0)
        for (logs, c), v in self._t.items():
            t = ctx.mpf(v.numerator) / v.denominator
            for p, k in logs:
                t *= ctx.log(p) ** k
            if c:
                t *= ctx.exp(ctx.mpf(c.numerator) / c.denominator)
            total += t
        return total

    def __float__(self):
        return float(self.evaluate())

    def sign(self):
        v = self.evaluate()
        return (v > 0) - (v < 0)

    def __str__(self):
        pieces = []
        for (logs, c), v in sorted(self._t.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            factors = [f"log({p})" if k == 1 else f"log({p})^{k}" for p, k in logs]
            if c:
                factors.append(f"exp({fmt(c)})")
            if not factors:
                pieces.append(fmt(v))
            elif v == 1:
                pieces.append("*".join(factors))
            elif v == -1:
                pieces.append("-" + "*".join(factors))
            else:
                pieces.append(fmt(v) + "*" + "*".join(factors))
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    @property
    def is_monomial(self):
        """True for ``q * e^c`` (no log factors): these are invertible."""
        if len(self._t) != 1:
            return False
        ((logs, _c), _v), = self._t.items()
        return not logs


@lru_cache(maxsize=None)
def _hp():
    ctx = mpmath.MPContext()
    ctx.prec = 200
    return ctx


def is_scalar(v):
    return isinstance(v, Scalar) or is_rational(v)


def coeff_sign(v):
    if isinstance(v, Scalar):
        return v.sign()
    return (v > 0) - (v < 0)


def coeff_text(v):
    return str(v) if isinstance(v, Scalar) else fmt(v)


def _factor(n):
    """Prime factorisation of a positive integer as ``{p: k}``."""
    n = int(n)
    out = {}
    p = 2
    while p * p <= n and p < 100000:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p = 3 if p == 2 else p + 2
    if n > 1:
        if gmpy2.is_prime(n) or n < p * p:
            out[n] = out.get(n, 0) + 1
        else:
            from sympy import factorint  # large composite leftovers only

            for q, k in factorint(n).items():
                out[int(q)] = out.get(int(q), 0) + int(k)
    return out


def log_scalar(a):
    """Exact ``log a`` for a positive rational or a ``q * e^c`` Scalar."""
    if isinstance(a, Scalar):
        if not a.is_monomial:
            raise IrrationalScalar(f"log({a}) is not representable")
        ((_, c), q), = a._t.items()
        return log_scalar(q) + c
    a = as_rational(a)
    if a <= 0:
        raise IrrationalScalar(f"log({fmt(a)}) is not real")
    if a == 1:
        return ZERO
    d = {}
    for p, k in _factor(a.numerator).items():
        d[((p, 1),), ZERO] = d.get((((p, 1),), ZERO), ZERO) + k
    for p, k in _factor(a.denominator).items():
        d[((p, 1),), ZERO] = d.get((((p, 1),), ZERO), ZERO) - k
    return _make({(k[0], k[1]): v for k, v in d.items()})


def exp_scalar(v):
    """Exact ``e^v`` where v is rational plus an integer combination of ``log p``."""
    if is_rational(v):
        v = as_rational(v)
        return ONE if v == 0 else Scalar({((), v): ONE})
    q = ONE
    c = ZERO
    for (logs, ec), coef in v._t.items():
        if not logs and ec == 0:
            c = coef
        elif len(logs) == 1 and logs[0][1] == 1 and ec == 0 and coef.denominator == 1:
            q *= as_rational(logs[0][0]) ** int(coef.numerator)
        else:
            raise IrrationalScalar(f"exp({v}) is not representable")
    return q if c == 0 else Scalar({((), c): q})


def scalar_pow(a, r):
    """Exact ``a**r`` for a coefficient a and rational r."""
    r = as_rational(r)
    if not isinstance(a, Scalar):
        return rational_power(a, r)
    if r.denominator == 1:
        n = int(r.numerator)
        base = a if n >= 0 else a.inverse()
        out = ONE
        for _ in range(abs(n)):
            out = out * base
        return out
    if a.is_monomial:
        ((_, c), q), = a._t.items()
        return _make({((), c * r): rational_power(q, r)})
    raise IrrationalScalar(f"({a})^({fmt(r)}) is not representable")


def coeff_inverse(a):
    if isinstance(a, Scalar):
        return a.inverse()
    if a == 0:
        raise ZeroDivisionError("zero coefficient")
    return ONE / a
