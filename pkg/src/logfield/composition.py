"""Log-composition ``F o log o G`` and the pieces it is built from.

``G`` is always an infinitely increasing series.  Compositions with a
monomial are computed through the tower ``L_0 = G, L_{i+1} = log o L_i``:
``(prod log_i^{r_i}) o G = prod L_i^{r_i}``.  Because composition with an
infinitely increasing series is an order-preserving group morphism on
monomials, the leading monomial of ``m o G`` is ``prod lead(L_i)^{r_i}``, which
gives exact bounds for the merge.
"""

from dataclasses import dataclass, field
from math import factorial

from .calculus import derivative
from .errors import (
    HasExpPart,
    IrrationalScalar,
    LargePartNotLogLinear,
    NonPositiveLeading,
    NotInfIncreasing,
    NotSmall,
    ShapeNotSupported,
    ZeroSeries,
)
from .field import compose_ps1, power, ps1_exp, ps1_log, split_lead
from .monomials import ONE_MONO, Monomial
from .rationals import ONE, ZERO, is_rational
from .scalars import coeff_sign, exp_scalar, log_scalar, scalar_pow
from .series import (
    GridCertificate,
    Series,
    Term,
    _after,
    add,
    e_coefficient,
    from_terms,
    is_inf_increasing,
    leading_term,
    mul,
    mul_monomial,
    observing,
    one,
    scalar_mul,
    sum_stream,
    tick,
)


@dataclass(frozen=True)
class LogLinearPart:
    """``constant + sum_i coeffs[i] * log_i`` over levels i >= 0."""

    constant: object = ZERO
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for level, c in self.coeffs.items():
            if level < 0 or c == 0:
                raise ValueError("log-linear coefficients need level >= 0 and c != 0")

    def to_monomial(self):
        """``exp`` of the log part: ``c_i log_i`` becomes exponent ``c_i`` on level ``i-1``."""
        return Monomial.from_dict({i - 1: c for i, c in self.coeffs.items()})


def shift_log(F):
    """``F o log``: every level moves up by one."""

    def gen():
        for a, m in F.raw():
            yield Term(a, m.shift(1))

    return Series(gen, lambda: F.cert.map(lambda m: m.shift(1)), label=F.label)


def log_of(G, budget=None):
    """``log o G = log a + log o g + F_log o eps`` for ``G = a*g*(1+eps)``, a > 0."""
    with observing(budget):
        split = split_lead(G)
        if split is None:
            raise ZeroSeries("log of the zero series")
        a, g, eps = split
        if coeff_sign(a) <= 0:
            raise NonPositiveLeading(f"log needs a positive leading coefficient, got {a}")
        head = [(r, Monomial.level(i + 1)) for i, r in g.exps.items()]
        c = log_scalar(a)
        if c != 0:
            head.append((c, ONE_MONO))
        return add(from_terms(head), compose_ps1(ps1_log(), eps))


def log_iter(G, i, budget=None):
    """``log_i o G`` for infinitely increasing G."""
    if i < 1:
        raise ValueError("log_iter needs i >= 1")
    with observing(budget):
        if not is_inf_increasing(G):
            raise NotInfIncreasing("log_iter needs an infinitely increasing series")
        for _ in range(i):
            G = log_of(G)
        return G


def log_linear_part(F, budget=None):
    """Split F into its log-linear large part and the raw index where the small part starts."""
    coeffs = {}
    const = ZERO
    start = 0
    with observing(budget):
        for idx, (a, m) in enumerate(F.raw()):
            if m.is_small():
                break
            start = idx + 1
            if a == 0:
                continue
            if m.is_one:
                const = a
                continue
            e = m.exps
            if len(e) != 1:
                raise LargePartNotLogLinear(f"large monomial {m} is not a single log_i")
            ((level, r),) = e.items()
            if level < 0 or r != 1:
                raise LargePartNotLogLinear(f"large monomial {m} is not log_i with exponent 1")
            if not is_rational(a):
                raise LargePartNotLogLinear(f"coefficient {a} of {m} is not rational")
            coeffs[level] = a
    return LogLinearPart(const, coeffs), start


def exp_of(F, budget=None):
    """``exp o F`` when F's large part is log-linear."""
    with observing(budget):
        part, start = log_linear_part(F)
        small = _after(F, start - 1)
        c = exp_scalar(part.constant) if part.constant != 0 else ONE
        body = compose_ps1(ps1_exp(1), small)
        return scalar_mul(c, mul_monomial(body, part.to_monomial()))


class _LogTower:
    """``L_i = log_i o G`` with their leading monomials and powers, memoised."""

    def __init__(self, G):
        self.levels = [G]
        self.leads = []
        self.powers = {}

    def level(self, i):
        while len(self.levels) <= i:
            self.levels.append(log_of(self.levels[-1]))
        return self.levels[i]

    def lead(self, i):
        while len(self.leads) <= i:
            t = leading_term(self.level(len(self.leads)))
            self.leads.append(t.mono)
        return self.leads[i]

    def hom(self, m):
        """Leading monomial of ``m o G`` for m in L'."""
        if m.exponent(-1) != 0:
            raise HasExpPart(f"monomial {m} has an exp part")
        out = ONE_MONO
        for i, r in m.exps.items():
            out = out * self.lead(i) ** r
        return out

    def power(self, i, r):
        key = (i, r)
        s = self.powers.get(key)
        if s is None:
            s = power(self.level(i), r)
            self.powers[key] = s
        return s

    def subst(self, m):
        """``m o G`` as a series."""
        if m.exponent(-1) != 0:
            raise HasExpPart(f"monomial {m} has an exp part")
        out = None
        for i, r in sorted(m.exps.items()):
            p = self.power(i, r)
            out = p if out is None else mul(out, p)
        return one() if out is None else out

    def subst_cert(self, cert):
        """Certificate for ``F o G`` given F's certificate (in L')."""
        bases = None
        for b in cert.bases:
            c = self.subst(b).cert
            bases = c if bases is None else bases.union(c)
        if bases is None:
            return GridCertificate(frozenset())
        gens = set()
        for g in cert.generators:
            gens |= self.subst(g).cert.small_closure()
        return bases.product(GridCertificate(frozenset([ONE_MONO]), frozenset(gens)))


def _scaled(S, c):
    for a, m in S.raw():
        yield Term(c * a, m)


def _subst_series(F, tower, shift):
    """``F' o G`` where ``F' = F o log_shift``, summed term-wise with exact bounds."""

    def gen():
        def parts():
            for a, m in F.raw():
                m2 = m.shift(shift)
                if m2.exponent(-1) != 0:
                    raise HasExpPart(f"monomial {m} has an exp part")
                bound = tower.hom(m2)
                if a == 0:
                    yield (bound, (Term(a, bound),))
                else:
                    yield (bound, _scaled(tower.subst(m2), a))

        return sum_stream(parts())

    def cert():
        return tower.subst_cert(F.cert.map(lambda m: m.shift(shift)))

    return Series(gen, cert)


def _checked_tower(G):
    if not is_inf_increasing(G):
        raise NotInfIncreasing("the inner series must be infinitely increasing")
    return _LogTower(G)


def substitute_logfree(F, G, budget=None):
    """``F o G`` for F supported in L' and G infinitely increasing."""
    with observing(budget):
        tower = _checked_tower(G)
    return _subst_series(F, tower, 0)


def _exp_power_of_log(tower, r):
    """``exp^{-r} o log o G = a^-r g^-r (F_{exp^-r} o F_log o eps)``."""
    if r == 0:
        return one()
    a, g, eps = split_lead(tower.level(0))
    inner = compose_ps1(ps1_log(), eps)
    return scalar_mul(scalar_pow(a, -r), mul_monomial(compose_ps1(ps1_exp(-r), inner), g ** -r))


def _grade_parts(F, tower):
    """Yield ``(r, bound, summand)`` for the E-grades of F in ascending order."""
    cert = F.cert
    for r in cert.grades():
        tick()
        if F.settled:
            present = [-t.mono.exponent(-1) for t in F._cache if t.coeff != 0]
            if not present or r > max(present):
                return
        top = cert.grade_max(r)
        if top is None:
            continue
        bound = tower.hom(top.shift(1))
        f_r = e_coefficient(F, r)
        summand = mul(_subst_series(f_r, tower, 1), _exp_power_of_log(tower, r))
        yield r, bound, summand


def compose_with_log(F, G, budget=None):
    """``F o log o G = sum_r (f_r o log o G) * (exp^-r o log o G)``."""
    with observing(budget):
        tower = _checked_tower(G)

    def gen():
        return sum_stream((bound, s.raw()) for _, bound, s in _grade_parts(F, tower))

    def cert():
        out = None
        for r in _finite_grades(F):
            c = _subst_series(e_coefficient(F, r), tower, 1).cert.product(
                _exp_power_of_log(tower, r).cert
            )
            out = c if out is None else out.union(c)
        return out or GridCertificate(frozenset())

    return Series(gen, cert)


def _finite_grades(F, limit=64):
    grades = []
    for r in F.cert.grades():
        grades.append(r)
        if len(grades) > limit:
            raise ShapeNotSupported("certificate of a composition with infinite E-support")
    return grades


def complog_summands(F, G, budget=None):
    """The nonzero-grade summands ``(r, S_r)`` of compose_with_log, as series."""
    with observing(budget):
        tower = _checked_tower(G)
        for r, _, s in _grade_parts(F, tower):
            if leading_term(e_coefficient(F, r)) is not None:
                yield r, s


def taylor_compose(F, G, H, budget=None, stages=None):
    """``F o (G + H) = sum_i F^(i) o G * H^i / i!`` for G = log o g0 with g0 log-free."""
    with observing(budget):
        lg = leading_term(G)
        if lg is None or lg.mono.exponent(-1) != 0:
            raise ShapeNotSupported("taylor_compose needs G without an exp part")
        if not is_inf_increasing(G):
            raise NotInfIncreasing("taylor_compose needs G infinitely increasing")
        try:
            g0 = exp_of(G)
            tower = _checked_tower(g0)
        except (LargePartNotLogLinear, IrrationalScalar, NotInfIncreasing) as exc:
            raise ShapeNotSupported(f"G is not log of an L'-series: {exc}") from exc
        if leading_term(g0).mono.exponent(-1) != 0:
            raise ShapeNotSupported("G must be log o g0 with g0 free of exp")
        lh = leading_term(H)
        if lh is not None and not lh.mono.is_small():
            raise NotSmall("taylor_compose needs a small increment H")
        lf = leading_term(F)

    if lf is None:
        return from_terms([])
    base = tower.hom(lf.mono.shift(1))

    def gen():
        def parts():
            Fi = F
            Hi = one()
            bound = base
            i = 0
            while stages is None or i <= stages:
                if i > 0 and (lh is None or leading_term(Fi) is None):
                    return
                stage = scalar_mul(ONE / factorial(i), mul(compose_with_log(Fi, g0), Hi))
                yield (bound, stage.raw())
                i += 1
                Fi = derivative(Fi)
                if lh is not None:
                    Hi = mul(Hi, H)
                    bound = bound * lh.mono

        return sum_stream(parts())

    def cert():
        return compose_with_log(F, exp_of(add(G, H))).cert

    return Series(gen, cert)


__all__ = [
    "LogLinearPart",
    "shift_log",
    "log_of",
    "log_iter",
    "log_linear_part",
    "exp_of",
    "substitute_logfree",
    "compose_with_log",
    "complog_summands",
    "taylor_compose",
]
