import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from logfield import randgen
from logfield.checks import agree, known_prefix
from logfield.composition import (
    compose_with_log,
    exp_of,
    log_iter,
    log_of,
    shift_log,
    substitute_logfree,
    taylor_compose,
)
from logfield.errors import (
    HasExpPart,
    LargePartNotLogLinear,
    NonPositiveLeading,
    NotInfIncreasing,
    NotSmall,
    ShapeNotSupported,
)
from logfield.field import compose_ps1, divide, power, ps1_geom, ps1_log
from logfield.monomials import EXP, X, Monomial
from logfield.rationals import Q
from logfield.series import (
    Budget,
    add,
    exp_order,
    from_terms,
    is_inf_increasing,
    monomial,
    mul,
    one,
    scalar_mul,
    sub,
    terms_prefix,
    zero,
)

from .conftest import finite_series, inf_increasing

PROBE = Budget(10_000, 5_000)
ONE_M = Monomial()
LOG = Monomial.level(1)
LOG2 = Monomial.level(2)


def xp(r):
    return Monomial.level(0, r)


def pairs(terms):
    return [(t.coeff, t.mono) for t in terms]


def same(A, B, k, budget=PROBE):
    ok, msg = agree(A, B, k, budget)
    assert ok, msg


def x_plus_1():
    return from_terms([(1, X), (1, ONE_M)])


def geom_x():
    return compose_ps1(ps1_geom(), monomial(X.inv()))


class TestShiftLog:
    def test_examples(self):
        assert pairs(terms_prefix(shift_log(monomial(EXP.inv())), 2)) == [(1, X.inv())]
        assert pairs(terms_prefix(shift_log(monomial(xp(Q(3, 2)))), 2)) == [(1, LOG ** Q(3, 2))]

    @given(finite_series(), finite_series())
    def test_linear(self, F, G):
        lhs = shift_log(add(F, G))
        assert terms_prefix(lhs, 20) == terms_prefix(add(shift_log(F), shift_log(G)), 20)


class TestLog:
    def test_examples(self):
        got = terms_prefix(log_of(mul_x2(x_plus_1_over_x())), 4)
        assert pairs(got) == [(2, LOG), (1, xp(-1)), (Q(-1, 2), xp(-2)), (Q(1, 3), xp(-3))]
        assert pairs(terms_prefix(log_of(monomial(X)), 3)) == [(1, LOG)]
        assert pairs(terms_prefix(log_of(monomial(EXP)), 3)) == [(1, X)]

    def test_symbolic_constant(self):
        (t,) = terms_prefix(log_of(monomial(X, 4)), 3)[1:]
        assert t.mono == ONE_M and str(t.coeff) == "2*log(2)"

    def test_non_positive_leading(self):
        with pytest.raises(NonPositiveLeading):
            log_of(from_terms([(-1, X)]))

    def test_iter(self):
        assert pairs(terms_prefix(log_iter(monomial(EXP), 2), 3)) == [(1, LOG)]
        assert pairs(terms_prefix(log_iter(monomial(X), 1), 3)) == [(1, LOG)]
        got = terms_prefix(log_iter(x_plus_1(), 2), 3)
        # log log (x + 1) = log[2] + x^-1 log^-1 - 1/2 x^-2 log^-1 - ...
        assert pairs(got)[:2] == [(1, LOG2), (1, xp(-1) * LOG.inv())]

    def test_iter_needs_inf_increasing(self):
        with pytest.raises(NotInfIncreasing):
            log_iter(monomial(X.inv()), 1)

    @given(inf_increasing())
    def test_monotonicity_transport(self, G):
        assert is_inf_increasing(log_of(G))


def x_plus_1_over_x():
    return from_terms([(1, ONE_M), (1, xp(-1))])


def mul_x2(F):
    return mul(monomial(xp(2)), F)


class TestExp:
    def test_examples(self):
        assert pairs(terms_prefix(exp_of(monomial(LOG, 2)), 3)) == [(1, xp(2))]
        assert pairs(terms_prefix(exp_of(monomial(X, 3)), 3)) == [(1, EXP**3)]

    def test_symbolic_constant(self):
        (t,) = terms_prefix(exp_of(from_terms([(1, X), (2, ONE_M)])), 3)
        assert t.mono == EXP and str(t.coeff) == "exp(2)"

    def test_rejects_non_log_linear(self):
        with pytest.raises(LargePartNotLogLinear):
            exp_of(monomial(xp(Q(1, 2))))

    @given(inf_increasing())
    def test_round_trip(self, G):
        same(exp_of(log_of(G)), G, 15)

    def test_round_trip_with_ghost_led_small_part(self):
        # G + H cancels the leading small term of log g0; exp of it used to violate summability
        g0 = from_terms([(1, xp(Q(3, 2))), (-1, xp(Q(1, 2)))])
        H = from_terms([(1, xp(-1)), (1, xp(-4))])
        got = terms_prefix(exp_of(add(log_of(g0), H)), 4)
        assert pairs(got) == [
            (1, xp(Q(3, 2))),
            (Q(-1, 2), xp(Q(-1, 2))),
            (Q(-1, 3), xp(Q(-3, 2))),
            (Q(7, 8), xp(Q(-5, 2))),
        ]


class TestSubstituteLogfree:
    def test_examples(self):
        assert pairs(terms_prefix(substitute_logfree(monomial(X.inv()), monomial(xp(2))), 3)) == [(1, xp(-2))]
        assert pairs(terms_prefix(substitute_logfree(monomial(LOG.inv()), monomial(EXP)), 3)) == [(1, X.inv())]

    def test_geometric_against_divide(self):
        # sum (x+1)^-n = 1/(1 - 1/(x+1)) = (x+1)/x
        got = substitute_logfree(geom_x(), x_plus_1())
        same(got, divide(x_plus_1(), monomial(X)), 8)

    def test_errors(self):
        with pytest.raises(HasExpPart):
            terms_prefix(substitute_logfree(monomial(EXP.inv()), monomial(X)), 2)
        with pytest.raises(NotInfIncreasing):
            substitute_logfree(monomial(X), monomial(X.inv()))

    @given(st.integers(0, 2**32 - 1), inf_increasing())
    def test_monomialwise_matches_product_route(self, seed, G):
        F = randgen.logfree_series(random.Random(seed))
        tower = {0: G}

        def level(i):
            if i not in tower:
                tower[i] = log_iter(G, i)
            return tower[i]

        route = zero()
        for a, m in terms_prefix(F, 100):
            term = monomial(ONE_M, a)
            for i, r in m.exps.items():
                term = mul(term, power(level(i), r))
            route = add(route, term)
        same(substitute_logfree(F, G), route, 10)


class TestComposeWithLog:
    def test_examples(self):
        assert pairs(terms_prefix(compose_with_log(monomial(EXP.inv()), monomial(xp(2))), 3)) == [(1, xp(-2))]
        F = compose_ps1(ps1_geom(), monomial(EXP.inv()))
        got = terms_prefix(compose_with_log(F, monomial(X)), 5)
        assert [t.mono for t in got] == [xp(-n) for n in range(5)]
        same(compose_with_log(monomial(EXP), x_plus_1()), x_plus_1(), 5)

    @given(st.integers(0, 2**32 - 1), inf_increasing())
    def test_associativity(self, seed, G):
        F = randgen.graded_series(random.Random(seed))
        same(compose_with_log(F, G), substitute_logfree(shift_log(F), G), 10)

    @given(inf_increasing(), st.sampled_from([Q(1), Q(-1), Q(1, 2), Q(2)]))
    def test_exp_power_matches_power(self, G, r):
        same(compose_with_log(monomial(EXP ** (-r)), G), power(G, -r), 12)

    @given(st.sampled_from([Q(1, 2), Q(1), Q(2)]), st.sampled_from([Q(1, 2), Q(1), Q(-1)]))
    def test_order_law(self, s0, r):
        G = from_terms([(1, EXP**s0), (1, X)])
        S = compose_with_log(monomial(EXP ** (-r)), G)
        assert exp_order(S) == r * s0


class TestTaylor:
    def g_setup(self):
        g0 = from_terms([(1, X), (1, ONE_M)])
        return log_of(g0)

    def test_zero_increment(self):
        G = self.g_setup()
        F = from_terms([(1, EXP.inv()), (2, EXP**-2)])
        same(taylor_compose(F, G, zero()), compose_with_log(F, exp_of(G)), 8)

    def test_exp_of_log_with_increment(self):
        # exp o (log + F_log(x^-1)) = x (1 + x^-1)
        G = monomial(LOG)
        H = compose_ps1(ps1_log(), monomial(X.inv()))
        same(taylor_compose(monomial(EXP), G, H), x_plus_1(), 4)

    def test_quadratic_is_finite(self):
        F = from_terms([(1, xp(2)), (3, X)])
        G = monomial(LOG)
        H = monomial(X.inv())
        # F o (log + x^-1) = (log + x^-1)^2 + 3 (log + x^-1)
        got = terms_prefix(taylor_compose(F, G, H), 10)
        expect = add(mul(add(monomial(LOG), H), add(monomial(LOG), H)), scalar_mul(3, add(monomial(LOG), H)))
        assert got == terms_prefix(expect, 10)

    def test_shape_errors(self):
        with pytest.raises(ShapeNotSupported):
            taylor_compose(monomial(X), monomial(EXP), zero())
        with pytest.raises(NotSmall):
            taylor_compose(monomial(X), monomial(LOG), monomial(X))


class TestSensitivity:
    def test_agree_detects_changed_coefficient(self):
        G = x_plus_1()
        good = compose_with_log(monomial(EXP.inv()), G)
        bad = add(good, monomial(xp(-3), Q(1, 1000)))
        assert agree(good, power(G, -1), 6, PROBE)[0]
        assert not agree(bad, power(G, -1), 6, PROBE)[0]

    def test_known_prefix_reports_cutoff_for_cancellation(self):
        Z = sub(mul(geom_x(), sub(one(), monomial(X.inv()))), one())
        terms, cut = known_prefix(Z, 3, Budget(10_000, 500))
        assert terms == [] and cut is not None and cut < xp(-5)
