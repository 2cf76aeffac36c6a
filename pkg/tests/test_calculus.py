import random

from hypothesis import given
from hypothesis import strategies as st

from logfield import randgen
from logfield.calculus import derivative, nth_derivative
from logfield.checks import derivative_oracle
from logfield.field import compose_ps1, ps1_geom
from logfield.monomials import EXP, X, Monomial
from logfield.rationals import Q
from logfield.series import (
    add,
    e_coefficient,
    from_terms,
    monomial,
    mul,
    mul_monomial,
    scalar_mul,
    sub,
    terms_prefix,
)

from .conftest import finite_series

LOG = Monomial.level(1)


def xp(r):
    return Monomial.level(0, r)


def pairs(terms):
    return [(t.coeff, t.mono) for t in terms]


class TestExamples:
    def test_power_rule_on_infinite_series(self):
        tail = mul_monomial(compose_ps1(ps1_geom(), monomial(X.inv())), X.inv())
        got = terms_prefix(derivative(tail), 5)
        assert pairs(got) == [(-n, xp(-n - 1)) for n in range(1, 6)]

    def test_constant(self):
        assert terms_prefix(derivative(from_terms([(7, Monomial())])), 3) == []

    def test_product_rule_example(self):
        got = terms_prefix(derivative(monomial(EXP.inv() * LOG**2)), 5)
        assert pairs(got) == [(-1, EXP.inv() * LOG**2), (2, EXP.inv() * X.inv() * LOG)]

    def test_nth(self):
        assert pairs(terms_prefix(nth_derivative(monomial(xp(2)), 2), 3)) == [(2, Monomial())]
        F = from_terms([(1, X), (Q(1, 2), LOG)])
        assert nth_derivative(F, 0) is F
        assert pairs(terms_prefix(nth_derivative(monomial(EXP), 3), 3)) == [(1, EXP)]

    def test_iterated_log(self):
        # (log[2])' = x^-1 log^-1, then the quotient rule by hand
        got = terms_prefix(nth_derivative(monomial(Monomial.level(2)), 2), 5)
        assert pairs(got) == [(-1, xp(-2) * LOG**-1), (-1, xp(-2) * LOG**-2)]


class TestLaws:
    @given(finite_series(), finite_series())
    def test_additive(self, F, G):
        assert terms_prefix(derivative(add(F, G)), 12) == terms_prefix(add(derivative(F), derivative(G)), 12)

    @given(finite_series(), finite_series())
    def test_leibniz(self, F, G):
        lhs = derivative(mul(F, G))
        rhs = add(mul(derivative(F), G), mul(F, derivative(G)))
        assert terms_prefix(lhs, 12) == terms_prefix(rhs, 12)

    @given(finite_series())
    def test_in_certificate(self, F):
        D = derivative(F)
        assert all(D.cert.contains(t.mono) for t in terms_prefix(D, 12))

    @given(st.integers(0, 2**32 - 1))
    def test_grading_form(self, seed):
        F = randgen.graded_series(random.Random(seed))
        grades = {-t.mono.exponent(-1) for t in terms_prefix(F, 100)}
        for r in grades:
            lhs = e_coefficient(derivative(F), r)
            fr = e_coefficient(F, r)
            rhs = sub(derivative(fr), scalar_mul(r, fr))
            assert terms_prefix(lhs, 12) == terms_prefix(rhs, 12)


def test_numeric_agreement():
    res = derivative_oracle(n=20, seed=40)
    assert res.passed, res.line()
