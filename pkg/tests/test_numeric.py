import math

import mpmath
import pytest

from logfield.errors import BelowThreshold, MalformedInput
from logfield.field import compose_ps1, ps1_geom
from logfield.monomials import EXP, X, Monomial
from logfield.numeric import (
    EvalGrid,
    NumericGerm,
    builtin_germ,
    check_o,
    fd_derivative,
    mono_eval,
    numeric_complog,
    numeric_of_series,
    prefix_with_next,
    series_eval_prefix,
    threshold,
)
from logfield.rationals import Q
from logfield.series import from_terms, monomial, zero


def geom():
    return compose_ps1(ps1_geom(), monomial(X.inv()))


class TestMonoEval:
    def test_examples(self):
        assert mono_eval(Monomial(), 100) == 1
        assert float(mono_eval(X.inv(), 100)) == pytest.approx(0.01, rel=1e-15)
        m = Monomial.from_dict({-1: -1, 1: 2})
        # 2.4068e-4 is a hand rounding of 2.40706e-4
        assert float(mono_eval(m, 10)) == pytest.approx(2.4068e-4, rel=2e-4)
        assert float(mono_eval(m, 10)) == pytest.approx(math.exp(-10) * math.log(10) ** 2, rel=1e-14)

    def test_threshold(self):
        assert threshold(0) == 0 and threshold(1) == 1 and threshold(2) == pytest.approx(math.e)
        with pytest.raises(BelowThreshold):
            mono_eval(Monomial.level(2), 2.0)

    def test_huge_exponential_does_not_overflow(self):
        v = mono_eval(EXP**-1, 1e4, 80)
        assert 0 < v < mpmath.mpf("1e-4000")


class TestSeriesEval:
    def test_examples(self):
        assert float(series_eval_prefix(geom(), 3, 10)) == pytest.approx(1.11, rel=1e-15)
        assert series_eval_prefix(zero(), 5, 10) == 0
        F = monomial(EXP.inv(), Q(2))
        assert float(series_eval_prefix(F, 1, 1)) == pytest.approx(2 / math.e, rel=1e-15)
        assert float(series_eval_prefix(F, 1, 1)) == pytest.approx(0.7358, abs=1e-4)

    def test_numeric_of_series(self):
        g = numeric_of_series(from_terms([(1, Monomial()), (1, X.inv())]), 2)
        assert float(g(10)) == pytest.approx(1.1)

    def test_complog(self):
        h = numeric_complog(builtin_germ("exp"), NumericGerm(lambda x, prec=53: mpmath.mpf(x) ** 2, 0, "x^2"))
        assert float(h(10)) == pytest.approx(100.0, rel=1e-14)

    def test_complog_threshold(self):
        h = numeric_complog(builtin_germ("log"), builtin_germ("x"))
        with pytest.raises(BelowThreshold):
            h(0.5)
        assert float(h(100)) == pytest.approx(math.log(math.log(100)))


class TestFiniteDifference:
    def test_examples(self):
        sq = NumericGerm(lambda x, prec=53: x * x, -math.inf, "x^2")
        assert float(fd_derivative(sq, 10, 1e-4)) == pytest.approx(20.0, abs=1e-6)
        assert abs(float(fd_derivative(builtin_germ("one"), 10, 1e-4))) <= 1e-12
        d = float(fd_derivative(builtin_germ("log"), math.exp(3), 1e-3))
        assert d == pytest.approx(math.exp(-3), abs=1e-6)

    def test_rejects_bad_step(self):
        with pytest.raises(MalformedInput):
            fd_derivative(builtin_germ("x"), 1.0, 0)


class TestCheckO:
    def test_geometric_expansion_passes(self):
        rep = check_o(builtin_germ("geom"), geom(), Monomial.level(0, -3), EvalGrid((1e2, 1e3)))
        assert rep.ratios[0] == pytest.approx(1.0101e-2, rel=1e-4)
        assert rep.ratios[1] == pytest.approx(1.0010e-3, rel=1e-4)
        assert rep.verdict == "pass" and rep.decreasing

    def test_exact_match_gives_zero(self):
        F = from_terms([(1, X)])
        rep = check_o(builtin_germ("x"), F, Monomial.level(0, -2))
        assert rep.ratios == (0.0, 0.0, 0.0)
        assert rep.verdict == "pass"

    def test_non_expansion_fails(self):
        rep = check_o(builtin_germ("exp"), from_terms([(1, Monomial())]), Monomial())
        assert not rep.decreasing and rep.verdict == "fail"

    def test_report_json(self):
        rep = check_o(builtin_germ("geom"), geom(), Monomial.level(0, -3), EvalGrid((1e2, 1e3)))
        assert set(rep.to_json()) == {"ratios", "decreasing", "final", "verdict"}


class TestGrid:
    def test_parse(self):
        assert EvalGrid.parse("10,100").points == (10.0, 100.0)

    @pytest.mark.parametrize("text", ["", "10,5", "-1,3", "a,b"])
    def test_rejects(self, text):
        with pytest.raises(MalformedInput):
            EvalGrid.parse(text)


class TestPrefixWithNext:
    def test_finite(self):
        F = from_terms([(1, X), (2, Monomial())])
        assert prefix_with_next(F, 5) == (list(F.terms()), None)
        terms, nxt = prefix_with_next(F, 1)
        assert len(terms) == 1 and nxt.mono == Monomial()

    def test_unknown_germ(self):
        with pytest.raises(MalformedInput):
            builtin_germ("sinh")
