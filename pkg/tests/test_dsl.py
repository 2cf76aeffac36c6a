import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from logfield.checks import _roundtrip_case, random_expression
from logfield.dsl.evaluator import Env, TermList, evaluate, format_value, value_to_json
from logfield.dsl.parser import Atom, BinOp, Call, Let, Neg, Num, Pow, parse, parse_program, unparse
from logfield.errors import (
    DSLSyntaxError,
    DSLTypeError,
    IrrationalScalar,
    NotInfIncreasing,
    NotSmall,
    UnboundName,
)
from logfield.monomials import Monomial
from logfield.rationals import Q
from logfield.series import Series


def text(src, k=8):
    return format_value(evaluate(src), k)


class TestParser:
    def test_monomial_expression(self):
        ast = parse("exp^-1 * log^(-1/2)")
        assert ast == BinOp(op="*", left=Pow(base=Atom(level=-1), exponent=Q(-1)),
                            right=Pow(base=Atom(level=1), exponent=Q(-1, 2)))
        assert evaluate("exp^-1 * log^(-1/2)") == Monomial.from_dict({-1: -1, 1: Q(-1, 2)})

    def test_division_shape(self):
        ast = parse("1/(1 - x^-1)")
        assert ast == BinOp(op="/", left=Num(value=1),
                            right=BinOp(op="-", left=Num(value=1), right=Pow(base=Atom(level=0), exponent=Q(-1))))

    def test_precedence(self):
        # ^ binds tighter than unary minus, which binds tighter than * and /
        assert parse("-x^2") == Neg(operand=Pow(base=Atom(level=0), exponent=Q(2)))
        assert parse("1 + 2 * x") == BinOp(op="+", left=Num(value=1),
                                           right=BinOp(op="*", left=Num(value=2), right=Atom(level=0)))
        assert parse("x^-1/2") == Pow(base=Atom(level=0), exponent=Q(-1, 2))

    def test_log_levels(self):
        assert parse("log[3]") == Atom(level=3)
        assert parse("log[1]") == Atom(level=1)
        with pytest.raises(DSLSyntaxError):
            parse("log[0]")

    def test_let_and_program(self):
        stmts = parse_program("let g = x^2  # comment\nterms(g, 2); ord(g)")
        assert isinstance(stmts[0], Let) and stmts[0].name == "g"
        assert [type(s) for s in stmts[1:]] == [Call, Call]

    @pytest.mark.parametrize("src", ["x^^2", "x^y", "(x", "terms(x)", "1 +", "x $ 2", "let = 3", "foo(1)"])
    def test_syntax_errors_have_location(self, src):
        with pytest.raises(DSLSyntaxError) as info:
            parse(src)
        assert "line 1, column" in str(info.value)

    def test_error_location_on_second_line(self):
        with pytest.raises(DSLSyntaxError) as info:
            parse_program("x\n  x +* 2")
        assert "line 2" in str(info.value)

    def test_deep_nesting_is_rejected_not_crashing(self):
        with pytest.raises(DSLSyntaxError):
            parse("(" * 5000 + "x" + ")" * 5000)

    @given(st.integers(0, 2**32 - 1))
    def test_unparse_round_trip(self, seed):
        ast = parse(random_expression(random.Random(seed)))
        assert parse(unparse(ast)) == ast

    @given(st.binary(max_size=60))
    def test_total_on_bytes(self, raw):
        try:
            parse_program(raw.decode("latin-1"))
        except DSLSyntaxError:
            pass


class TestEvaluator:
    def test_documented_examples(self):
        assert text("let g = x^2*(1+x^-1); terms(complog(exp^-1, g), 3)") == text("terms(pow(x^2*(1+x^-1), -1), 3)")
        assert text("let g = x^2*(1+x^-1); terms(complog(exp^-1, g), 3)") == "x^-2 - x^-3 + x^-4"
        assert evaluate("ord(exp^-2*(1+x^-1))") == 2
        assert evaluate("cmp(exp^-1, x^-1)") == "less"
        assert text("terms(D(log), 1)") == "x^-1"

    def test_unbound(self):
        with pytest.raises(UnboundName):
            evaluate("complog(f, x^2)")

    def test_series_printing(self):
        assert text("1/(1-x^-1)", 3) == "1 + x^-1 + x^-2 + ..."
        assert text("(x+1)*(x-1)") == "x^2 - 1"

    def test_constants_and_scalars(self):
        assert text("1/2 + 1/3") == "5/6"
        assert text("log(4)") == "2*log(2)"
        assert text("terms(expof(x + 2), 1)") == "(exp(2))*exp"
        assert text("terms(logof(3*x), 2)") == "log + log(3)"

    def test_functions(self):
        assert text("terms(rlog(exp^-1), 1)") == "x^-1"
        assert text("terms(subst(x^-1, x^2), 1)") == "x^-2"
        assert text("terms(trunc(1/(1-x^-1), x^-2), 10)") == "1 + x^-1 + x^-2"
        assert text("terms(geom(x^-1), 3)") == "1 + x^-1 + x^-2"
        assert text("terms(D(x^3, 2), 1)") == "6*x"
        assert text("terms(almost_regular([[0, [2]], [1, [0, 3]]]), 5)") == "2 + 3*exp^-1 * x"
        assert text("terms(taylor(exp, log, logof(1 + x^-1)), 2)") == "x + 1"

    def test_let_shadowing_warns(self, caplog):
        env = Env()
        evaluate("let a = x", env)
        with caplog.at_level("WARNING"):
            evaluate("let a = log", env)
        assert "shadows" in caplog.text
        assert evaluate("a", env) == Monomial.level(1)

    def test_type_errors(self):
        with pytest.raises(DSLTypeError):
            evaluate("terms(x, 1/2)")
        with pytest.raises(DSLTypeError):
            evaluate("trunc(x, x + 1)")
        with pytest.raises(DSLTypeError):
            evaluate("log(x)")

    def test_module_errors_propagate(self):
        with pytest.raises(IrrationalScalar):
            evaluate("pow(2*x, 1/2)")
        with pytest.raises(NotSmall):
            evaluate("terms(geom(x), 2)")
        with pytest.raises(NotInfIncreasing):
            evaluate("complog(exp, x^-1)")

    def test_values(self):
        assert isinstance(evaluate("x + 1"), Series)
        assert isinstance(evaluate("terms(x + 1, 5)"), TermList)

    def test_json(self):
        obj = value_to_json(evaluate("terms(1/(1-x^-1), 4)"))
        assert [t["coeff"] for t in obj["terms"]] == ["1"] * 4
        assert obj["exhausted"] is True
        assert value_to_json(evaluate("x^2")) == {"mono": {"0": "2"}, "text": "x^2"}

    @given(st.integers(0, 2**32 - 1))
    def test_printed_values_reparse(self, seed):
        ok, why = _roundtrip_case(random.Random(seed))
        assert ok, why
