"""Lazily enumerated generalized series with grid-based support.

A :class:`Series` is a memoised producer of terms in strictly decreasing
monomial order.  Producers may also emit *ghost* terms (coefficient 0) when
coefficients cancel; ghosts carry no information about the value but let
consumers see that the enumeration has moved below a monomial, which is what
makes truncations and threshold comparisons terminate.  Every public
observation (``terms_prefix``, ``leading_term``, ...) filters ghosts out.

Observations run under a :class:`Budget`.  Zero detection is only
semi-decidable, so running out of budget raises :class:`BudgetExhausted`
instead of guessing.
"""

import contextvars
import heapq
import itertools
import os
import threading
from collections import namedtuple
from contextlib import contextmanager
from dataclasses import dataclass

from .errors import BudgetExhausted, MalformedInput, SummabilityViolation, ZeroSeries
from .monomials import ONE_MONO, Monomial
from .rationals import ONE, ZERO, as_rational, fmt
from .scalars import Scalar, coeff_sign, coeff_text

Term = namedtuple("Term", ["coeff", "mono"])


# -- budgets -------------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    max_terms: int = 10_000
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.max_terms < 1 or self.max_steps < 1:
            raise MalformedInput("budget limits must be positive")

    @classmethod
    def from_env(cls, var="LOGFIELD_BUDGET"):
        """Read ``TERMS,STEPS`` (or ``TERMS:STEPS``) from the environment."""
        raw = os.environ.get(var)
        if not raw:
            return cls()
        parts = raw.replace(":", ",").split(",")
        try:
            if len(parts) == 1:
                return cls(max_terms=int(parts[0]))
            return cls(max_terms=int(parts[0]), max_steps=int(parts[1]))
        except ValueError as exc:
            raise MalformedInput(f"bad {var}={raw!r}") from exc


DEFAULT_BUDGET = Budget()


class _Meter:
    __slots__ = ("steps", "budget")

    def __init__(self, budget):
        self.steps = 0
        self.budget = budget


_METER = contextvars.ContextVar("logfield_meter", default=None)


@contextmanager
def observing(budget=None):
    """Run an observation; nested observations share the outermost meter."""
    meter = _METER.get()
    if meter is not None:
        yield meter
        return
    meter = _Meter(budget or DEFAULT_BUDGET)
    token = _METER.set(meter)
    try:
        yield meter
    finally:
        _METER.reset(token)


def tick():
    meter = _METER.get()
    if meter is not None:
        meter.steps += 1
        if meter.steps > meter.budget.max_steps:
            raise BudgetExhausted("steps", meter.budget.max_steps)


# -- grid certificates ------------------------------------------------------------


def _grade(m):
    return -m.exponent(-1)


@dataclass(frozen=True)
class GridCertificate:
    """Certified support ``{b * g1^n1 ... gp^np}`` for bases b and small generators g."""

    bases: frozenset
    generators: frozenset = frozenset()

    def __post_init__(self):
        for g in self.generators:
            if not g.is_small():
                raise ValueError(f"certificate generator {g} is not small")

    @classmethod
    def of(cls, bases=(), generators=()):
        return cls(frozenset(bases), frozenset(generators))

    def union(self, other):
        return GridCertificate(self.bases | other.bases, self.generators | other.generators)

    def product(self, other):
        return GridCertificate(
            frozenset(a * b for a in self.bases for b in other.bases),
            self.generators | other.generators,
        )

    def times(self, m):
        return GridCertificate(frozenset(b * m for b in self.bases), self.generators)

    def map(self, f):
        """Image under an order-preserving group homomorphism f."""
        return GridCertificate(frozenset(map(f, self.bases)), frozenset(map(f, self.generators)))

    def small_closure(self, limit=2000):
        """Small generators of a monoid containing every small element of the support."""
        gens = list(self.generators)
        out = set(gens)
        for b in self.bases:
            if b.is_small():
                out.add(b)
                continue
            found = []
            seen = {(0,) * len(gens)}
            frontier = [(0,) * len(gens)]
            while frontier:
                nxt = []
                for n in frontier:
                    for j in range(len(gens)):
                        n2 = n[:j] + (n[j] + 1,) + n[j + 1:]
                        if n2 in seen:
                            continue
                        seen.add(n2)
                        if len(seen) > limit:
                            raise BudgetExhausted("certificate", limit)
                        if any(all(a >= c for a, c in zip(n2, f)) for f in found):
                            continue
                        m = b
                        for g, k in zip(gens, n2):
                            if k:
                                m = m * g ** k
                        if m.is_small():
                            found.append(n2)
                            out.add(m)
                        else:
                            nxt.append(n2)
                frontier = nxt
        return frozenset(out)

    def power_closure(self):
        """Certificate for ``sum_n c_n * S**n`` where S is a small series with this certificate."""
        return GridCertificate(frozenset([ONE_MONO]), self.small_closure())

    def contains(self, m):
        """Exact membership test ``m in {b * g^n}``."""
        gens = sorted(self.generators, key=str)
        for b in self.bases:
            t = m / b
            if t.is_one:
                return True
            if gens and _solve_nonneg(gens, t) is not None:
                return True
        return False

    # E-grading support

    def _exp_split(self):
        egens = [g for g in self.generators if g.exponent(-1) != 0]
        lgens = [g for g in self.generators if g.exponent(-1) == 0]
        return egens, lgens

    def grades(self):
        """Ascending candidate E-grades ``r`` (exp-exponent ``-r``) of the support."""
        egens, _ = self._exp_split()
        steps = sorted({_grade(g) for g in egens})
        heap = sorted({_grade(b) for b in self.bases})
        heapq.heapify(heap)
        seen = set(heap)
        last = None
        while heap:
            r = heapq.heappop(heap)
            if r != last:
                yield r
                last = r
            for s in steps:
                if r + s not in seen:
                    seen.add(r + s)
                    heapq.heappush(heap, r + s)

    def _grade_combos(self, r):
        egens, _ = self._exp_split()
        for b in self.bases:
            rest = r - _grade(b)
            if rest < 0:
                continue
            stack = [(0, b, rest)]
            while stack:
                j, m, left = stack.pop()
                if left == 0:
                    yield m
                    continue
                for jj in range(j, len(egens)):
                    s = _grade(egens[jj])
                    if s <= left:
                        stack.append((jj, m * egens[jj], left - s))

    def grade_slice(self, r):
        """Certificate of the grade-r coefficient (an L'-supported series)."""
        shift = Monomial.level(-1, r)
        _, lgens = self._exp_split()
        return GridCertificate(frozenset(m * shift for m in self._grade_combos(r)), frozenset(lgens))

    def grade_max(self, r):
        """Largest certified monomial of grade r, or None."""
        best = None
        for m in self._grade_combos(r):
            if best is None or best < m:
                best = m
        return best

    def __str__(self):
        b = ", ".join(sorted(map(str, self.bases)))
        g = ", ".join(sorted(map(str, self.generators)))
        return f"bases {{{b}}} generators {{{g}}}"


def _solve_nonneg(gens, target):
    """Find n in N^p with prod g_j^n_j == target, or None (small ILP)."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    top = max([target.max_level] + [g.max_level for g in gens]) + 2
    A = np.array([[float(g.exponent(i - 1)) for g in gens] for i in range(top)])
    rhs = np.array([float(target.exponent(i - 1)) for i in range(top)])
    res = milp(
        c=np.ones(len(gens)),
        constraints=LinearConstraint(A, rhs - 1e-9, rhs + 1e-9),
        integrality=np.ones(len(gens)),
        bounds=Bounds(0, np.inf),
    )
    if res.status != 0 or res.x is None:
        return None
    n = [int(round(v)) for v in res.x]
    m = ONE_MONO
    for g, k in zip(gens, n):
        m = m * g ** k
    return n if m == target else None


EMPTY_CERT = GridCertificate(frozenset())


# -- the lazy series -----------------------------------------------------------------


class Series:
    """A memoised, strictly decreasing term producer with a grid certificate.

    ``factory`` returns a fresh generator of :class:`Term` (ghosts allowed);
    it must be deterministic because it is replayed if an observation is
    interrupted part-way (e.g. by BudgetExhausted).
    """

    __slots__ = ("_factory", "_gen", "_cache", "_done", "_lock", "_skip", "_cert", "label")

    def __init__(self, factory, cert, label=None):
        self._factory = factory
        self._gen = None
        self._cache = []
        self._done = False
        self._skip = 0
        self._lock = threading.RLock()
        self._cert = cert
        self.label = label

    def _raw(self, i):
        cache = self._cache
        if i < len(cache):
            return cache[i]
        with self._lock:
            while len(cache) <= i:
                if self._done:
                    return None
                tick()
                if self._gen is None:
                    self._gen = self._factory()
                    self._skip = len(cache)
                try:
                    t = next(self._gen)
                except StopIteration:
                    self._done = True
                    self._gen = None
                    return None
                except BaseException:
                    self._gen = None
                    raise
                if self._skip:
                    self._skip -= 1
                    continue
                cache.append(t)
            return cache[i]

    def raw(self):
        """Iterate raw terms (ghosts included)."""
        i = 0
        while True:
            t = self._raw(i)
            if t is None:
                return
            yield t
            i += 1

    def terms(self):
        """Iterate the nonzero terms."""
        for t in self.raw():
            if t.coeff != 0:
                yield t

    @property
    def cert(self):
        c = self._cert
        if callable(c):
            c = c()
            self._cert = c
        return c

    @property
    def settled(self):
        """True once the producer has finished (the series is finite and fully known)."""
        return self._done

    # arithmetic sugar

    def __add__(self, other):
        return add(self, as_series(other))

    def __radd__(self, other):
        return add(as_series(other), self)

    def __neg__(self):
        return negate(self)

    def __sub__(self, other):
        return sub(self, as_series(other))

    def __rsub__(self, other):
        return sub(as_series(other), self)

    def __mul__(self, other):
        if isinstance(other, Monomial):
            return mul_monomial(self, other)
        if isinstance(other, Series):
            return mul(self, other)
        return scalar_mul(other, self)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        from .field import divide

        return divide(self, as_series(other))

    def __rtruediv__(self, other):
        from .field import divide

        return divide(as_series(other), self)

    def __pow__(self, r):
        from .field import power

        return power(self, r)

    def __repr__(self):
        shown = [t for t in self._cache if t.coeff != 0][:6]
        body = format_terms(shown) if shown else "..."
        more = "" if self._done and len(shown) == sum(1 for t in self._cache if t.coeff != 0) else " + ..."
        return f"<Series {body}{more}>"


def as_series(v):
    if isinstance(v, Series):
        return v
    if isinstance(v, Monomial):
        return from_terms([(ONE, v)])
    if isinstance(v, Scalar):
        return from_terms([(v, ONE_MONO)])
    return from_terms([(as_rational(v), ONE_MONO)])


_UNPULLED = object()


class _Desc:
    # heap key: the largest monomial pops first
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return other.m.cmp(self.m) < 0


def sum_stream(parts, eager=False):
    """Merge a (possibly infinite) sequence of decreasing term streams.

    ``parts`` yields ``(bound, terms)``.  A non-None bound is a guaranteed
    upper bound for the lead of ``terms`` and bounds must not increase along
    the sequence; with ``bound=None`` the part's actual lead is used and the
    monotone-activation contract is checked at runtime: a part activated
    after some monomial was emitted must lead strictly below it, otherwise
    SummabilityViolation.  ``eager`` activates every part up front (finite
    sums with arbitrary leads).
    """
    heap = []
    seq = itertools.count()
    parts = iter(parts)
    watermark = None

    def fetch():
        # next pending part as (bound, first_term, iterator); bounded parts are
        # only pulled on activation, unbounded ones are peeked for their lead
        while True:
            tick()
            p = next(parts, None)
            if p is None:
                return None
            bound, it = p
            if bound is not None:
                return (bound, _UNPULLED, it)
            it = iter(it)
            first = next(it, None)
            if first is None:
                continue
            return (first.mono, first, it)

    def activate(p):
        bound, first, it = p
        if first is _UNPULLED:
            it = iter(it)
            first = next(it, None)
            # ghosts left by a cancellation may sit above the bound; they carry nothing
            while first is not None and first.coeff == 0 and bound.cmp(first.mono) < 0:
                tick()
                first = next(it, None)
            if first is None:
                return
            if bound.cmp(first.mono) < 0:
                raise SummabilityViolation(f"summand lead {first.mono} exceeds its bound {bound}")
        if watermark is not None and not first.mono.cmp(watermark) < 0:
            raise SummabilityViolation(
                f"summand leading monomial {first.mono} is not below emitted {watermark}"
            )
        heapq.heappush(heap, (_Desc(first.mono), next(seq), first.coeff, it))

    pending = fetch()
    if eager:
        while pending is not None:
            activate(pending)
            pending = fetch()
    while True:
        tick()
        while pending is not None and (not heap or pending[0].cmp(heap[0][0].m) >= 0):
            activate(pending)
            pending = fetch()
        if not heap:
            return
        m = heap[0][0].m
        c = ZERO
        while heap and heap[0][0].m == m:
            _, _, coeff, it = heapq.heappop(heap)
            c = c + coeff
            nt = next(it, None)
            if nt is not None:
                if nt.mono.cmp(m) >= 0:
                    raise RuntimeError(f"producer out of order: {nt.mono} after {m}")
                heapq.heappush(heap, (_Desc(nt.mono), next(seq), nt.coeff, it))
        yield Term(c, m)
        watermark = m


# -- constructors --------------------------------------------------------------------


def _canonical(terms):
    acc = {}
    for c, m in terms:
        if not isinstance(c, Scalar):
            c = as_rational(c)
        if not isinstance(m, Monomial):
            m = Monomial.from_dict(m)
        acc[m] = acc.get(m, ZERO) + c
    out = [Term(c, m) for m, c in acc.items() if c != 0]
    out.sort(key=lambda t: _Desc(t.mono))
    return out


def from_terms(terms, label=None):
    """Finite series from (coeff, monomial) pairs: merged, sorted, zeros dropped."""
    canon = _canonical(terms)
    cert = GridCertificate(frozenset(t.mono for t in canon))
    s = Series(lambda: iter(canon), cert, label)
    s._cache = list(canon)
    s._done = True
    return s


def zero():
    return from_terms([])


def one():
    return from_terms([(ONE, ONE_MONO)])


def monomial(m, c=ONE):
    return from_terms([(c, m)])


# -- observation -----------------------------------------------------------------------


def terms_prefix(F, k, budget=None):
    """First ``min(k, |supp F|)`` terms in decreasing order."""
    with observing(budget) as meter:
        if k > meter.budget.max_terms:
            raise BudgetExhausted("terms", meter.budget.max_terms)
        out = []
        if k <= 0:
            return out
        for t in F.terms():
            out.append(t)
            if len(out) >= k:
                break
        return out


Prefix = namedtuple("Prefix", ["terms", "exhausted", "budget_hit"])


def observe(F, k, budget=None):
    """Like terms_prefix but never raises on budget: returns what was settled."""
    out = []
    try:
        with observing(budget) as meter:
            if k > meter.budget.max_terms:
                raise BudgetExhausted("terms", meter.budget.max_terms)
            it = F.terms()
            for t in it:
                out.append(t)
                if len(out) >= k:
                    break
            exhausted = len(out) < k or _no_more(F, out)
        return Prefix(out, exhausted, False)
    except BudgetExhausted:
        return Prefix(out, False, True)


def _no_more(F, shown):
    # cheap check only: the producer finished and nothing beyond was nonzero
    if not F.settled:
        return False
    return sum(1 for t in F._cache if t.coeff != 0) == len(shown)


def leading_term(F, budget=None):
    with observing(budget):
        for t in F.terms():
            return t
        return None


def lead_index(F, budget=None):
    """``(term, raw_index)`` of the leading term, or ``(None, None)``."""
    with observing(budget):
        for i, t in enumerate(F.raw()):
            if t.coeff != 0:
                return t, i
        return None, None


def _after(F, idx):
    """Series of the raw terms strictly after raw index ``idx``."""

    def gen():
        return itertools.islice(F.raw(), idx + 1, None)

    return Series(gen, lambda: F.cert)


# -- ring operations ---------------------------------------------------------------------


def add(F, G):
    return sum_series([F, G])


def sum_series(items):
    items = list(items)
    if not items:
        return zero()
    if len(items) == 1:
        return items[0]

    def gen():
        return sum_stream(((None, S.raw()) for S in items), eager=True)

    def cert():
        c = items[0].cert
        for S in items[1:]:
            c = c.union(S.cert)
        return c

    return Series(gen, cert)


def _map(F, f, cert):
    def gen():
        for t in F.raw():
            yield f(t)

    return Series(gen, cert)


def negate(F):
    return _map(F, lambda t: Term(-t.coeff, t.mono), lambda: F.cert)


def sub(F, G):
    return add(F, negate(G))


def scalar_mul(c, F):
    if not isinstance(c, Scalar):
        c = as_rational(c)
    if c == 0:
        return zero()
    if c == 1:
        return F
    return _map(F, lambda t: Term(c * t.coeff, t.mono), lambda: F.cert)


def mul_monomial(F, m):
    if m.is_one:
        return F
    return _map(F, lambda t: Term(t.coeff, t.mono * m), lambda: F.cert.times(m))


def _shifted(G, a, m):
    for b, n in G.raw():
        yield Term(a * b, m * n)


def mul(F, G):
    """Cauchy product: a sum of shifted copies of G, one per term of F.

    The part for F's term ``a*m`` is bounded by ``m * lead(G)``, so parts are
    activated only once the merge has come down to that bound.
    """

    def gen():
        g0 = G._raw(0)
        if g0 is None:
            return iter(())
        top = g0.mono

        def parts():
            for a, m in F.raw():
                if a == 0:
                    # keep ghosts flowing so consumers see progress
                    yield (m * top, (Term(ZERO, m * top),))
                else:
                    yield (m * top, _shifted(G, a, m))

        return sum_stream(parts())

    return Series(gen, lambda: F.cert.product(G.cert))


def truncate_above(F, n):
    """``F_n``: the terms of F with monomial >= n."""

    def gen():
        for t in F.raw():
            if t.mono.cmp(n) < 0:
                return
            yield t

    return Series(gen, lambda: F.cert)


def strictly_above(F, n, budget=None):
    """All nonzero terms of F with monomial > n (eager)."""
    with observing(budget):
        out = []
        for t in F.raw():
            if t.mono.cmp(n) <= 0:
                break
            if t.coeff != 0:
                out.append(t)
        return out


# -- E-grading ---------------------------------------------------------------------------


def exp_order(F, budget=None):
    """``ord(F)``: r such that the leading monomial carries ``exp^-r``."""
    lead = leading_term(F, budget)
    if lead is None:
        raise ZeroSeries("exp_order of the zero series")
    return _grade(lead.mono)


def e_coefficient(F, r):
    """The grade-r coefficient ``f_r`` (so that ``F = sum f_r exp^-r``), in L'."""
    r = as_rational(r)
    shift = Monomial.level(-1, r)

    def gen():
        for t in F.raw():
            g = _grade(t.mono)
            if g < r:
                tick()
                continue
            if g > r:
                return
            yield Term(t.coeff, t.mono * shift)

    return Series(gen, lambda: F.cert.grade_slice(r))


def decompose_leading(F, budget=None):
    """``F = head * exp^-d * (1 + eps)`` with head in L' and ``ord(eps) > 0``."""
    from .field import divide

    with observing(budget):
        d = exp_order(F)
        head = e_coefficient(F, d)
        eps = sub(divide(F, mul_monomial(head, Monomial.level(-1, -d))), one())
        return d, head, eps


def is_small(F, budget=None):
    lead = leading_term(F, budget)
    return lead is None or lead.mono.is_small()


def is_inf_increasing(F, budget=None):
    lead = leading_term(F, budget)
    return lead is not None and lead.mono.is_large() and coeff_sign(lead.coeff) > 0


def almost_regular(rows, constant_head=False):
    """``sum_i p_i(x) exp^-nu_i`` from rows ``(nu_i, [p_i0, p_i1, ...])``."""
    terms = []
    prev = None
    for i, (nu, poly) in enumerate(rows):
        nu = as_rational(nu)
        if nu < 0:
            raise MalformedInput(f"exponent nu_{i} = {fmt(nu)} is negative")
        if prev is not None and not nu > prev:
            raise MalformedInput(f"nu must be strictly increasing (nu_{i} = {fmt(nu)})")
        prev = nu
        coeffs = [as_rational(c) for c in poly]
        if i == 0 and constant_head:
            if not coeffs or coeffs[0] == 0 or any(c != 0 for c in coeffs[1:]):
                raise MalformedInput("p_0 must be a nonzero constant")
        for j, c in enumerate(coeffs):
            if c != 0:
                terms.append((c, Monomial.from_dict({-1: -nu, 0: j})))
    return from_terms(terms)


# -- text & JSON ----------------------------------------------------------------------


def term_text(t):
    c, m = t
    if m.is_one:
        return coeff_text(c)
    if isinstance(c, Scalar):
        return f"({c})*{m}"
    if c == 1:
        return str(m)
    if c == -1:
        return f"-{m}"
    return f"{fmt(c)}*{m}"


def format_terms(terms):
    if not terms:
        return "0"
    out = term_text(terms[0])
    for t in terms[1:]:
        s = term_text(t)
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


def prefix_to_json(prefix):
    return {
        "terms": [{"coeff": coeff_text(c), "mono": m.to_json()} for c, m in prefix.terms],
        "exhausted": bool(prefix.exhausted),
        "budget_hit": bool(prefix.budget_hit),
    }


def prefix_from_json(obj):
    terms = [Term(as_rational(t["coeff"]), Monomial.from_json(t["mono"])) for t in obj["terms"]]
    return Prefix(terms, bool(obj["exhausted"]), bool(obj["budget_hit"]))
