"""The ordered group of iterated-log/exp monomials.

A monomial is a finite product ``log_{i1}^{r1} * ... * log_{ik}^{rk}`` with
levels ``i >= -1``: level -1 is ``exp``, level 0 is ``x`` and level ``i >= 1``
is the i-th iterate of ``log``.  Exponents are exact rationals.

Internally the exponents are a dense tuple indexed from level -1 with
trailing zeros stripped, which is canonical (structural equality is group
equality).  Ordering is lexicographic over levels -1, 0, 1, ...; a missing
level reads as 0.
"""

import re

from .errors import MalformedInput
from .rationals import ONE, ZERO, as_rational, fmt

__all__ = [
    "Monomial",
    "mono_one",
    "mono_mul",
    "mono_inv",
    "mono_cmp",
    "mono_is_small",
    "mono_is_large",
    "mono_derivative",
    "parse_monomial",
]


class Monomial:
    __slots__ = ("_e", "_h")

    def __init__(self, exps=()):
        e = list(exps)
        while e and e[-1] == 0:
            e.pop()
        self._e = tuple(e)
        self._h = hash(self._e)

    @classmethod
    def _raw(cls, e):
        # e is already a stripped tuple of mpq
        m = object.__new__(cls)
        m._e = e
        m._h = hash(e)
        return m

    @classmethod
    def from_dict(cls, exps):
        """Build from ``{level: exponent}``; zero exponents are dropped."""
        if not exps:
            return ONE_MONO
        levels = {}
        for level, r in exps.items():
            level = int(level)
            if level < -1:
                raise MalformedInput(f"level {level} < -1")
            r = as_rational(r)
            levels[level] = levels.get(level, ZERO) + r
        top = max(levels)
        return cls(levels.get(i, ZERO) for i in range(-1, top + 1))

    @classmethod
    def level(cls, i, r=1):
        """``log_i ** r``; ``level(-1)`` is exp and ``level(0)`` is x."""
        return cls.from_dict({i: r})

    # -- views ---------------------------------------------------------------

    @property
    def exps(self):
        return {i - 1: r for i, r in enumerate(self._e) if r != 0}

    def exponent(self, level):
        i = level + 1
        return self._e[i] if 0 <= i < len(self._e) else ZERO

    @property
    def max_level(self):
        """Highest level carrying a nonzero exponent (-2 for the identity)."""
        return len(self._e) - 2

    @property
    def is_one(self):
        return not self._e

    # -- group structure -----------------------------------------------------

    def __mul__(self, other):
        a, b = self._e, other._e
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return self if a is self._e else other
        e = [x + y for x, y in zip(a, b)]
        e.extend(a[len(b):])
        while e and e[-1] == 0:
            e.pop()
        return Monomial._raw(tuple(e))

    def inv(self):
        return Monomial._raw(tuple(-x for x in self._e))

    def __truediv__(self, other):
        return self * other.inv()

    def __pow__(self, r):
        r = as_rational(r)
        if r == 0:
            return ONE_MONO
        return Monomial._raw(tuple(x * r for x in self._e))

    def shift(self, k=1):
        """Compose with ``log`` k times: every level moves up by k (k >= 0)."""
        if k < 0:
            raise ValueError("use shift_down for negative shifts")
        if not self._e or k == 0:
            return self
        return Monomial._raw((ZERO,) * k + self._e)

    # -- order ---------------------------------------------------------------

    def cmp(self, other):
        a, b = self._e, other._e
        if a is b:
            return 0
        for x, y in zip(a, b):
            if x != y:
                return -1 if x < y else 1
        la, lb = len(a), len(b)
        if la == lb:
            return 0
        # the tail is nonzero somewhere since trailing zeros are stripped
        if la > lb:
            for x in a[lb:]:
                if x != 0:
                    return -1 if x < 0 else 1
        for y in b[la:]:
            if y != 0:
                return 1 if y < 0 else -1
        return 0

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __eq__(self, other):
        return isinstance(other, Monomial) and self._e == other._e

    def __hash__(self):
        return self._h

    def is_small(self):
        for x in self._e:
            if x != 0:
                return x < 0
        return False

    def is_large(self):
        for x in self._e:
            if x != 0:
                return x > 0
        return False

    # -- calculus ------------------------------------------------------------

    def derivative(self):
        """``m'`` as a list of ``(coeff, monomial)`` in decreasing order.

        ``(log_i)'/log_i`` is 1 for exp and ``prod_{j<=i} log_j^{-1}`` for
        i >= 0, so each term is ``r_i * m * d_i``.
        """
        out = []
        for idx, r in enumerate(self._e):
            if r == 0:
                continue
            i = idx - 1
            if i == -1:
                out.append((r, self))
            else:
                mult = Monomial._raw((ZERO,) + (-ONE,) * (i + 1))
                out.append((r, self * mult))
        # d_{-1} = 1 > d_0 > d_1 > ... so the list is already decreasing
        return out

    # -- text ----------------------------------------------------------------

    def __str__(self):
        if not self._e:
            return "1"
        parts = []
        for idx, r in enumerate(self._e):
            if r == 0:
                continue
            i = idx - 1
            name = {-1: "exp", 0: "x", 1: "log"}.get(i, f"log[{i}]")
            parts.append(name if r == 1 else f"{name}^{fmt(r)}")
        return " * ".join(parts)

    def __repr__(self):
        return f"Monomial({str(self)!r})"

    def to_json(self):
        return {str(k): fmt(v) for k, v in self.exps.items()}

    @classmethod
    def from_json(cls, obj):
        return cls.from_dict({int(k): as_rational(v) for k, v in obj.items()})


ONE_MONO = Monomial()
EXP = Monomial.level(-1)
X = Monomial.level(0)
LOG = Monomial.level(1)


def mono_one():
    return ONE_MONO


def mono_mul(m, n):
    return m * n


def mono_inv(m):
    return m.inv()


def mono_cmp(m, n):
    """Return ``"less"``, ``"equal"`` or ``"greater"``."""
    c = m.cmp(n)
    return "less" if c < 0 else "greater" if c > 0 else "equal"


def mono_is_small(m):
    return m.is_small()


def mono_is_large(m):
    return m.is_large()


def mono_derivative(m):
    return m.derivative()


_FACTOR = re.compile(
    r"\s*(exp|x|log(?:\s*\[\s*(\d+)\s*\])?)\s*(?:\^\s*(\(\s*)?(-?\d+(?:\s*/\s*\d+)?)\s*(\))?)?\s*"
)


def parse_monomial(text):
    """Parse canonical monomial text such as ``exp^-1 * x^2 * log[2]^-1/2``."""
    s = text.strip()
    if s == "1":
        return ONE_MONO
    if not s:
        raise MalformedInput("empty monomial")
    exps = {}
    for chunk in s.split("*"):
        m = _FACTOR.fullmatch(chunk)
        if m is None or bool(m.group(3)) != bool(m.group(5)):
            raise MalformedInput(f"bad monomial factor {chunk.strip()!r}")
        name, k, r = m.group(1, 2, 4)
        if name == "exp":
            level = -1
        elif name == "x":
            level = 0
        else:
            level = int(k) if k is not None else 1
            if level < 1:
                raise MalformedInput("log[k] needs k >= 1")
        exps[level] = exps.get(level, ZERO) + (as_rational(r.replace(" ", "")) if r else ONE)
    return Monomial.from_dict(exps)
