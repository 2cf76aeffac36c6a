"""Acceptance suites shared by ``logfield selftest`` and the test-suite.

Each suite runs a fixed number of seeded random cases against an exact
identity or a numeric oracle and returns a :class:`Result`.

Identities whose two sides differ by an infinite cancellation (for example
``divide(F, G) * G = F``) cannot be compared by asking for k nonzero terms:
past the last surviving term the enumeration produces zero-coefficient
progress terms forever.  Those comparisons are made over all monomials above
a threshold that the enumeration provably reaches, chosen so that the first k
terms of the computed side are the ones being tested.
"""

import math
import random
import signal
import sys
import threading
import time
from dataclasses import dataclass, field

from . import randgen
from .calculus import derivative
from .composition import (
    compose_with_log,
    complog_summands,
    exp_of,
    log_of,
    shift_log,
    substitute_logfree,
    taylor_compose,
)
from .errors import BudgetExhausted, DSLSyntaxError
from .field import compose_ps1, divide, power, ps1_geom
from .monomials import Monomial
from .numeric import (
    EvalGrid,
    builtin_germ,
    check_o,
    context,
    eval_terms,
    fd_derivative,
    mono_eval,
    numeric_complog,
    numeric_of_series,
    prefix_with_next,
    NumericGerm,
)
from .rationals import Q
from .series import (
    Budget,
    add,
    e_coefficient,
    exp_order,
    from_terms,
    leading_term,
    monomial,
    mul,
    observing,
    one,
    scalar_mul,
    strictly_above,
    sub,
    terms_prefix,
)

PROBE_BUDGET = Budget(max_terms=10_000, max_steps=40_000)


@dataclass
class Result:
    key: int
    title: str
    cases: int = 0
    failures: int = 0
    elapsed: float = 0.0
    limit: float = math.inf
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.failures == 0 and self.cases > 0 and self.elapsed <= self.limit

    def fail(self, msg):
        self.failures += 1
        if len(self.notes) < 5:
            self.notes.append(msg)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} [{self.key:2d}] {self.title}: {self.cases} cases, "
            f"{self.failures} failures, {self.elapsed:.2f} s (limit {self.limit:g} s)"
        )
        if self.notes and not self.passed:
            text += "\n        " + "\n        ".join(self.notes)
        return text


class _Timer:
    def __init__(self, result):
        self.result = result

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.result

    def __exit__(self, *exc):
        self.result.elapsed = time.perf_counter() - self.t0
        return False


# -- comparison helpers -----------------------------------------------------------------


def known_prefix(F, k, budget=PROBE_BUDGET, stop_below=None):
    """Up to k nonzero terms plus the cutoff above which F is fully known.

    The cutoff is None when F was enumerated to the end.  With ``stop_below``
    the enumeration also ends at the first raw monomial below that bound.
    """
    out = []
    last = None
    try:
        with observing(budget):
            for t in F.raw():
                last = t.mono
                if stop_below is not None and last < stop_below:
                    return out, last
                if t.coeff != 0:
                    out.append(t)
                    if len(out) == k:
                        return out, last
        return out, None
    except BudgetExhausted:
        if last is None:
            raise
        return out, last


def agree(A, B, k, budget=PROBE_BUDGET):
    """Compare the k-term prefixes of A and B over the region both enumerations reach.

    B is enumerated first; A stops once it is past everything known about B,
    which keeps finite results with infinite cancellation in A cheap.
    """
    tb, cb = known_prefix(B, k, budget)
    floor = cb if cb is not None else (tb[-1].mono if tb else None)
    ta, ca = known_prefix(A, k, budget, stop_below=floor)
    cuts = [c for c in (ca, cb) if c is not None]
    if cuts:
        t = max(cuts)
        ta = [x for x in ta if x.mono >= t]
        tb = [x for x in tb if x.mono >= t]
    if list(ta) == list(tb):
        return True, ""
    return False, f"{_fmt(ta)}  !=  {_fmt(tb)}"


def _fmt(terms):
    from .series import format_terms

    s = format_terms(list(terms))
    return s if len(s) < 200 else s[:200] + "..."


def _same_prefix(A, B, k):
    return terms_prefix(A, k) == terms_prefix(B, k)


# -- 1. field laws ---------------------------------------------------------------------------


def _divide_law(F, G, k=12):
    # the first k terms of Q = F/G determine Q*G strictly above t = q_k * lead(G)
    Qs = divide(F, G)
    qs, cut = known_prefix(Qs, k)
    g = leading_term(G).mono
    if cut is None:
        return terms_prefix(mul(Qs, G), 10_000) == terms_prefix(F, 10_000)
    t = cut * g
    return strictly_above(mul(Qs, G), t) == strictly_above(F, t)


def field_laws(n=1000, seed=1, limit=30.0):
    res = Result(1, "field laws (assoc, comm, distrib, divide)", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            F, G, H = (randgen.finite_series(rng) for _ in range(3))
            res.cases += 1
            checks = {
                "assoc*": _same_prefix(mul(mul(F, G), H), mul(F, mul(G, H)), 12),
                "assoc+": _same_prefix(add(add(F, G), H), add(F, add(G, H)), 12),
                "comm*": _same_prefix(mul(F, G), mul(G, F), 12),
                "comm+": _same_prefix(add(F, G), add(G, F), 12),
                "distrib": _same_prefix(mul(F, add(G, H)), add(mul(F, G), mul(F, H)), 12),
                "divide": _divide_law(F, G),
            }
            bad = [name for name, ok in checks.items() if not ok]
            if bad:
                res.fail(f"case {i}: {bad} F={_fmt(F.terms())} G={_fmt(G.terms())}")
    return res


# -- 2. geometric identity -------------------------------------------------------------------


def geometric_identity(n=200, seed=2, limit=10.0, k=20):
    res = Result(2, "geometric identity (1 - eps) * geom(eps) = 1", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            eps = randgen.small_series(rng)
            g = compose_ps1(ps1_geom(), eps)
            res.cases += 1
            # k terms of geom(eps) fix the product strictly above the k-th monomial
            _, cut = known_prefix(g, k)
            prod = mul(sub(one(), eps), g)
            if cut is None:
                ok = terms_prefix(prod, k) == terms_prefix(one(), k)
            else:
                ok = strictly_above(prod, cut) == terms_prefix(one(), 1)
            if not ok:
                res.fail(f"case {i}: eps={_fmt(eps.terms())}")
    return res


# -- 3. derivation ----------------------------------------------------------------------------


def derivation_suite(n=500, seed=3, limit=20.0, k=12):
    res = Result(3, "derivation (Leibniz, linearity, E-graded form)", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            F, G = randgen.finite_series(rng), randgen.finite_series(rng)
            a, b = randgen.rational(rng), randgen.rational(rng)
            res.cases += 1
            dF, dG = derivative(F), derivative(G)
            leibniz = _same_prefix(derivative(mul(F, G)), add(mul(dF, G), mul(F, dG)), k)
            lin = _same_prefix(
                derivative(add(scalar_mul(a, F), scalar_mul(b, G))),
                add(scalar_mul(a, dF), scalar_mul(b, dG)),
                k,
            )
            graded = True
            grades = sorted({-t.mono.exponent(-1) for t in F.terms()})
            for r in grades:
                f_r = e_coefficient(F, r)
                lhs = e_coefficient(dF, r)
                rhs = sub(derivative(f_r), scalar_mul(r, f_r))
                graded = graded and _same_prefix(lhs, rhs, k)
            if not (leibniz and lin and graded):
                res.fail(f"case {i}: leibniz={leibniz} linear={lin} graded={graded}")
    return res


# -- 4. monomial derivative vs finite differences -----------------------------------------------


def _mono_germ(m, prec):
    return NumericGerm(lambda x, p=prec: mono_eval(m, x, p), 0.0, str(m))


def derivative_oracle(n=100, seed=4, limit=5.0, rel=1e-5, prec=80):
    res = Result(4, "monomial derivative vs central difference", limit=limit)
    rng = random.Random(seed)
    ctx = context(prec)
    x = ctx.exp(ctx.exp(2))
    h = x * ctx.mpf("1e-6")
    with _Timer(res):
        for i in range(n):
            m = randgen.monomial(rng, levels=(-1, 0, 1, 2), max_abs=3)
            res.cases += 1
            exact = eval_terms(terms_prefix(derivative(monomial(m)), 10), x, prec)
            approx = fd_derivative(_mono_germ(m, prec), x, h, prec)
            if exact == 0:
                err = abs(approx)
            else:
                err = abs(approx - exact) / abs(exact)
            if not err <= rel:
                res.fail(f"case {i}: m={m} rel.err={float(err):.3g}")
    return res


# -- 5. associativity of composition -------------------------------------------------------------


def composition_associativity(n=100, seed=5, limit=60.0, k=10):
    res = Result(5, "(F o log) o G = F o (log o G)", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            F = randgen.graded_series(rng)
            G = randgen.inf_increasing(rng)
            res.cases += 1
            ok, why = agree(compose_with_log(F, G), substitute_logfree(shift_log(F), G), k)
            if not ok:
                res.fail(f"case {i}: F={_fmt(F.terms())} G={_fmt(G.terms())}: {why}")
    return res


# -- 6. power coherence --------------------------------------------------------------------------


def power_coherence(n=50, seed=6, limit=30.0, k=12):
    res = Result(6, "exp^-r o log o G = G^-r", limit=limit)
    rng = random.Random(seed)
    rs = [Q(1), Q(-1), Q(1, 2), Q(-1, 2), Q(2)]
    with _Timer(res):
        for i in range(n):
            G = randgen.inf_increasing(rng)
            for r in rs:
                res.cases += 1
                lhs = compose_with_log(monomial(Monomial.level(-1, -r)), G)
                ok, why = agree(lhs, power(G, -r), k)
                if not ok:
                    res.fail(f"case {i} r={r}: G={_fmt(G.terms())}: {why}")
    return res


# -- 7. round trips --------------------------------------------------------------------------------


def round_trips(n=100, seed=7, limit=30.0, k=15):
    res = Result(7, "exp_of(log_of(G)) = G and log_of(exp_of(F)) = F", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            G = randgen.inf_increasing(rng)
            res.cases += 1
            ok, why = agree(exp_of(log_of(G)), G, k)
            if not ok:
                res.fail(f"case {i}: exp(log G) for G={_fmt(G.terms())}: {why}")
            F = _log_linear_plus_small(rng)
            res.cases += 1
            ok, why = agree(log_of(exp_of(F)), F, k)
            if not ok:
                res.fail(f"case {i}: log(exp F) for F={_fmt(F.terms())}: {why}")
    return res


def _log_linear_plus_small(rng):
    # small terms share one leading level, so every term of F is reached after
    # finitely many monomials of exp_of(F)
    terms = []
    for level in rng.sample([0, 1, 2], rng.randint(1, 2)):
        terms.append((randgen.rational(rng, 3, 2), Monomial.level(level)))
    if rng.random() < 0.5:
        terms.append((randgen.rational(rng, 2, 2), Monomial()))
    lead_level = rng.choice([0, 1])
    for _ in range(rng.randint(1, 3)):
        exps = {lead_level: -Q(rng.randint(1, 8), rng.randint(1, 4))}
        if rng.random() < 0.5:
            exps[lead_level + 1] = randgen.exponent(rng, 2, 3)
        terms.append((randgen.rational(rng, 3, 3), Monomial.from_dict(exps)))
    return from_terms(terms)


# -- 8. Taylor formula -------------------------------------------------------------------------------


def _taylor_inputs(rng):
    # everything lives on the x scale so that each stage threshold is reached
    # after finitely many monomials
    F_terms = []
    for r in rng.sample([-1, Q(-1, 2), 0, Q(1, 2), 1], rng.randint(1, 2)):
        exps = {-1: -Q(r), 0: rng.randint(-2, 2)}
        F_terms.append((randgen.rational(rng, 3, 3), Monomial.from_dict(exps)))
    g0 = randgen.inf_increasing(rng, family=0, lead_coeffs=(Q(1),))
    H_terms = {}
    for _ in range(rng.randint(1, 2)):
        exps = {0: -Q(rng.randint(1, 4), rng.randint(1, 2)), 1: rng.randint(-1, 1)}
        H_terms[Monomial.from_dict(exps)] = randgen.rational(rng, 2, 2)
    return from_terms(F_terms), g0, from_terms([(c, m) for m, c in H_terms.items()])


def taylor_formula(n=50, seed=8, limit=60.0, max_stage=4):
    res = Result(8, "Taylor expansion F o (G + H) by stages", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            F, g0, H = _taylor_inputs(rng)
            G = log_of(g0)
            target = compose_with_log(F, exp_of(add(G, H)))
            lead_fg = leading_term(compose_with_log(F, g0)).mono
            lh = leading_term(H).mono
            for N in range(max_stage + 1):
                res.cases += 1
                t = lh ** (N + 1) * lead_fg
                stage = taylor_compose(F, G, H, stages=N)
                if strictly_above(stage, t, PROBE_BUDGET) != strictly_above(target, t, PROBE_BUDGET):
                    res.fail(
                        f"case {i} N={N}: F={_fmt(F.terms())} g0={_fmt(g0.terms())} H={_fmt(H.terms())}"
                    )
    return res


# -- 9. o(n) contract ----------------------------------------------------------------------------------


def o_contract(limit=1.0):
    res = Result(9, "o(n) ratios for the geometric series", limit=limit)
    with _Timer(res):
        g = compose_ps1(ps1_geom(), monomial(Monomial.level(0, -1)))
        report = check_o(builtin_germ("geom"), g, Monomial.level(0, -3), EvalGrid((1e2, 1e3)))
        expected = (1 / 99, 1 / 999)
        res.cases = 1
        close = all(abs(a - b) <= 1e-6 * b for a, b in zip(report.ratios, expected))
        if not (close and report.verdict == "pass"):
            res.fail(f"ratios {report.ratios} verdict {report.verdict}")
    return res


# -- 10. numeric composition oracle ---------------------------------------------------------------------


def _oracle_inputs(rng, i):
    # Each case is a single block whose omitted part is one regular tail, so
    # twice the next term bounds the remainder already at x = 100:
    #   even i: F = c exp^a, G = x^p + c1 x^(p-q)   (a binomial series)
    #   odd i:  F = c exp^a x^b, G = c0 x^p         (a series in 1/log x)
    c = randgen.rational(rng, 3, 2)
    p = rng.choice([Q(1), Q(3, 2), Q(2)])
    if i % 2 == 0:
        # positive integer powers give polynomials in G, finite only after an
        # infinite cancellation that enumeration cannot confirm
        a = rng.choice([Q(-2), Q(-1), Q(-1, 2), Q(1, 2), Q(3, 2)])
        q = rng.choice([Q(1, 2), Q(1), Q(3, 2)])
        F = from_terms([(c, Monomial.level(-1, a))])
        G = from_terms([(Q(1), Monomial.level(0, p)), (randgen.rational(rng, 1, 2), Monomial.level(0, p - q))])
    else:
        a = rng.choice([Q(-1), Q(0), Q(1)])
        b = rng.choice([-2, -1, 1, 2])
        F = from_terms([(c, Monomial.from_dict({-1: a, 0: b}))])
        G = from_terms([(rng.choice([Q(1), Q(4)]), Monomial.level(0, p))])
    return F, G


def composition_oracle(n=50, seed=10, limit=10.0, k=6, prec=300, grid=(1e2, 1e3, 1e4)):
    res = Result(10, "F(log(G(x))) vs composed prefix", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            F, G = _oracle_inputs(rng, i)
            res.cases += 1
            C = compose_with_log(F, G)
            terms, nxt = prefix_with_next(C, k, PROBE_BUDGET)
            truth = numeric_complog(numeric_of_series(F, 100), numeric_of_series(G, 100))
            for x in grid:
                approx = eval_terms(terms, x, prec)
                exact = truth(x, prec)
                bound = 0 if nxt is None else 2 * abs(eval_terms([nxt], x, prec))
                noise = abs(exact) * context(prec).mpf(2) ** (-prec // 2)
                if not abs(exact - approx) <= bound + noise:
                    res.fail(
                        f"case {i} x={x:g}: F={_fmt(F.terms())} G={_fmt(G.terms())} "
                        f"err={float(abs(exact - approx)):.3g} bound={float(bound):.3g}"
                    )
                    break
    return res


# -- 11. order law ------------------------------------------------------------------------------------


def order_law(n=50, seed=11, limit=20.0):
    res = Result(11, "exp_order of the r-summand is -r*s0", limit=limit)
    rng = random.Random(seed)
    with _Timer(res):
        for i in range(n):
            F = randgen.graded_series(rng, grades=(Q(1, 2), 1, Q(3, 2), 2, 3))
            G = randgen.inf_increasing(rng, family=2)
            s0 = exp_order(G)
            for r, S in complog_summands(F, G):
                res.cases += 1
                if exp_order(S) != -r * s0:
                    res.fail(f"case {i} r={r}: exp_order {exp_order(S)} != {-r * s0}")
    return res


# -- 12. parser fuzz and round trip ----------------------------------------------------------------------

_ALPHABET = [
    "x", "exp", "log", "log[2]", "let", "terms", "D", "complog", "pow", "(", ")", "[", "]",
    "^", "-", "+", "*", "/", ",", ";", "=", "#", "\n", " ", "0", "1", "2", "12", "1/2", "f", "g",
]


class _Timeout(Exception):
    pass


def _fuzz_inputs(rng, n):
    for i in range(n):
        if i % 2 == 0:
            yield bytes(rng.randrange(256) for _ in range(rng.randint(0, 40)))
        else:
            yield "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(0, 25))).encode()


def parser_fuzz(n=100_000, seed=12, limit=60.0, roundtrips=1000, per_input=1.0):
    from .dsl.parser import parse_program

    res = Result(12, "parser fuzz and round trips", limit=limit)
    rng = random.Random(seed)
    use_alarm = hasattr(signal, "setitimer") and threading.current_thread() is threading.main_thread()

    def _alarm(*_):
        raise _Timeout()

    old = signal.signal(signal.SIGALRM, _alarm) if use_alarm else None
    with _Timer(res):
        try:
            for i, raw in enumerate(_fuzz_inputs(rng, n)):
                res.cases += 1
                text = raw.decode("latin-1")
                t0 = time.perf_counter()
                try:
                    if use_alarm:
                        signal.setitimer(signal.ITIMER_REAL, per_input)
                    parse_program(text)
                except DSLSyntaxError:
                    pass
                except _Timeout:
                    res.fail(f"input {i} timed out: {raw!r}")
                except Exception as exc:  # noqa: BLE001 - any other exception is a crash
                    res.fail(f"input {i} crashed with {type(exc).__name__}: {raw!r}")
                finally:
                    if use_alarm:
                        signal.setitimer(signal.ITIMER_REAL, 0)
                if time.perf_counter() - t0 > per_input:
                    res.fail(f"input {i} took longer than {per_input} s: {raw!r}")
        finally:
            if use_alarm:
                signal.signal(signal.SIGALRM, old)
        for i in range(roundtrips):
            res.cases += 1
            ok, why = _roundtrip_case(rng)
            if not ok:
                res.fail(f"round trip {i}: {why}")
    return res


def random_expression(rng, depth=0):
    """Source text of a random finite-valued expression."""
    choice = rng.random()
    if depth > 3 or choice < 0.3:
        kind = rng.randrange(4)
        if kind == 0:
            return str(rng.randint(0, 9))
        if kind == 1:
            return rng.choice(["x", "exp", "log", "log[2]"])
        if kind == 2:
            base = rng.choice(["x", "exp", "log", "log[3]"])
            r = randgen.exponent(rng, 2, 3)
            return f"{base}^({r.numerator}/{r.denominator})"
        return rng.choice(["log(2)", "exp(1/2)", "log(3/4)", "1/2"])
    if choice < 0.45:
        return f"-({random_expression(rng, depth + 1)})"
    op = rng.choice(["+", "-", "*", "*"])
    return f"({random_expression(rng, depth + 1)}) {op} ({random_expression(rng, depth + 1)})"


def _roundtrip_case(rng):
    from .dsl.evaluator import Env, elaborate, format_value
    from .dsl.parser import parse, unparse

    src = random_expression(rng)
    ast = parse(src)
    if parse(unparse(ast)) != ast:
        return False, f"AST round trip failed for {src!r}"
    text = format_value(elaborate(ast, Env()), 10_000)
    again = format_value(elaborate(parse(text), Env()), 10_000)
    if text != again:
        return False, f"{src!r}: {text!r} reprints as {again!r}"
    return True, ""


# -- driver ---------------------------------------------------------------------------------------------

SUITES = [
    (field_laws, {"n": 1000}, {"n": 100}),
    (geometric_identity, {"n": 200}, {"n": 40}),
    (derivation_suite, {"n": 500}, {"n": 50}),
    (derivative_oracle, {"n": 100}, {"n": 30}),
    (composition_associativity, {"n": 100}, {"n": 15}),
    (power_coherence, {"n": 50}, {"n": 10}),
    (round_trips, {"n": 100}, {"n": 15}),
    (taylor_formula, {"n": 50}, {"n": 8}),
    (o_contract, {}, {}),
    (composition_oracle, {"n": 50}, {"n": 10}),
    (order_law, {"n": 50}, {"n": 10}),
    (parser_fuzz, {"n": 100_000, "roundtrips": 1000}, {"n": 5000, "roundtrips": 100}),
]


def run_all(quick=False, out=None):
    out = out or sys.stdout
    ok = True
    for fn, full, small in SUITES:
        res = fn(**(small if quick else full))
        out.write(res.line() + "\n")
        out.flush()
        ok = ok and res.passed
    return ok


__all__ = ["Result", "SUITES", "run_all", "agree", "known_prefix", "random_expression"]

