"""Exact rational helpers on top of gmpy2's ``mpq``."""

from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq

from .errors import IrrationalScalar, MalformedInput

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)

_MPQ = type(mpq(0))
_MPZ = type(gmpy2.mpz(0))


def as_rational(value):
    """Coerce ``value`` (int, Fraction, mpq, or a ``"p/q"`` string) to mpq."""
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, (bool,)):
        raise MalformedInput(f"not a rational: {value!r}")
    if isinstance(value, (int, _MPZ, Fraction)) or isinstance(value, Rational):
        return mpq(value.numerator, value.denominator) if not isinstance(value, int) else mpq(value)
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"not a rational: {value!r}") from exc
    raise MalformedInput(f"not a rational: {value!r}")


def is_rational(value):
    return isinstance(value, (_MPQ, _MPZ, int, Fraction)) and not isinstance(value, bool)


def fmt(q):
    """Canonical text: ``3``, ``-1/2``."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _int_root(n, k):
    """Exact k-th root of the non-negative integer n, or None."""
    if n < 2:
        return n
    r = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(r[0]) if r[1] else None


def rational_power(a, r):
    """Exact ``a**r`` for rational a and r; raises IrrationalScalar otherwise."""
    a = as_rational(a)
    r = as_rational(r)
    if r.denominator == 1:
        if a == 0 and r < 0:
            raise ZeroDivisionError("0 to a negative power")
        return a ** int(r.numerator)
    k = int(r.denominator)
    p, q = int(a.numerator), int(a.denominator)
    sign = 1
    if p < 0:
        if k % 2 == 0:
            raise IrrationalScalar(f"({fmt(a)})^({fmt(r)}) is not real")
        sign, p = -1, -p
    rp, rq = _int_root(p, k), _int_root(q, k)
    if rp is None or rq is None:
        raise IrrationalScalar(f"({fmt(a)})^({fmt(r)}) is not rational")
    base = mpq(sign * rp, rq)
    if base == 0 and r < 0:
        raise ZeroDivisionError("0 to a negative power")
    return base ** int(r.numerator)
