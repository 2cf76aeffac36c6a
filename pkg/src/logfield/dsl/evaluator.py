"""Elaboration of parsed statements into values of the algebra."""

import logging
from dataclasses import dataclass, field

from .. import calculus, composition, field as fieldops, series as S
from ..errors import DSLTypeError, MalformedInput, UnboundName
from ..monomials import Monomial, mono_cmp
from ..numeric import NumericGerm, builtin_germ
from ..rationals import as_rational, fmt, is_rational, rational_power
from ..scalars import Scalar, coeff_inverse, exp_scalar, log_scalar, scalar_pow
from .parser import Atom, BinOp, Call, Let, ListLit, Name, Neg, Num, Pow, ScalarLit, parse_program

log = logging.getLogger("logfield.dsl")

DEFAULT_SHOW = 8


@dataclass
class Env:
    """Bindings plus the observation budget used for every evaluation."""

    bindings: dict = field(default_factory=dict)
    budget: S.Budget = field(default_factory=S.Budget.from_env)
    show_terms: int = DEFAULT_SHOW

    def bind(self, name, value):
        if name in self.bindings:
            log.warning("rebinding %r shadows its previous value", name)
        self.bindings[name] = value

    def lookup(self, name, node=None):
        try:
            return self.bindings[name]
        except KeyError:
            raise UnboundName(_at(f"unbound name {name!r}", node)) from None


@dataclass(frozen=True)
class TermList:
    """A finite, fully observed list of terms (the result of ``terms``)."""

    terms: tuple


def _at(msg, node):
    if node is None:
        return msg
    line, col = node.pos
    return f"{msg} (line {line}, column {col})"


def _is_coeff(v):
    return is_rational(v) or isinstance(v, Scalar)


def _kind(v):
    if _is_coeff(v):
        return "constant"
    if isinstance(v, Monomial):
        return "monomial"
    if isinstance(v, S.Series):
        return "series"
    if isinstance(v, TermList):
        return "terms"
    if isinstance(v, NumericGerm):
        return "germ"
    if isinstance(v, str):
        return "text"
    if isinstance(v, list):
        return "list"
    return type(v).__name__


def _as_series(v, node, op):
    if isinstance(v, S.Series):
        return v
    if isinstance(v, TermList):
        return S.from_terms(v.terms)
    if isinstance(v, Monomial) or _is_coeff(v):
        return S.as_series(v)
    raise DSLTypeError(_at(f"{op} expects a series, got a {_kind(v)}", node))


def _monomial(v, node, op):
    if isinstance(v, Monomial):
        return v
    if _is_coeff(v) and v == 1:
        return Monomial()
    raise DSLTypeError(_at(f"{op} expects a monomial, got a {_kind(v)}", node))


def _rational(v, node, op):
    if is_rational(v):
        return as_rational(v)
    raise DSLTypeError(_at(f"{op} expects a rational number, got a {_kind(v)}", node))


def _natural(v, node, op):
    r = _rational(v, node, op)
    if r.denominator != 1 or r < 0:
        raise DSLTypeError(_at(f"{op} expects a non-negative integer, got {fmt(r)}", node))
    return int(r)


def _arith(op, a, b, node):
    if _is_coeff(a) and _is_coeff(b):
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        return a * coeff_inverse(b)
    if isinstance(a, Monomial) and isinstance(b, Monomial) and op in "*/":
        return a * b if op == "*" else a / b
    sa, sb = _as_series(a, node, op), _as_series(b, node, op)
    if op == "+":
        return S.add(sa, sb)
    if op == "-":
        return S.sub(sa, sb)
    if op == "*":
        if isinstance(b, Monomial):
            return S.mul_monomial(sa, b)
        if isinstance(a, Monomial):
            return S.mul_monomial(sb, a)
        if _is_coeff(a):
            return S.scalar_mul(a, sb)
        if _is_coeff(b):
            return S.scalar_mul(b, sa)
        return S.mul(sa, sb)
    if isinstance(b, Monomial):
        return S.mul_monomial(sa, b.inv())
    if _is_coeff(b):
        return S.scalar_mul(coeff_inverse(b), sa)
    return fieldops.divide(sa, sb)


def _power(v, r, node):
    if is_rational(v):
        return rational_power(as_rational(v), r)
    if isinstance(v, Scalar):
        return scalar_pow(v, r)
    if isinstance(v, Monomial):
        return v ** r
    return fieldops.power(_as_series(v, node, "^"), r)


def _scalar_literal(node, arg):
    if not _is_coeff(arg):
        hint = "; use logof(...) for series" if node.fn == "log" else "; use expof(...) for series"
        raise DSLTypeError(_at(f"{node.fn}(...) takes a constant{hint}", node))
    return log_scalar(arg) if node.fn == "log" else exp_scalar(arg)


def _list(v, node):
    if not isinstance(v, list):
        raise DSLTypeError(_at(f"expected a list, got a {_kind(v)}", node))
    return v


def _call(node, env, args):
    fn = node.fn
    a = args
    if fn == "terms":
        F = _as_series(a[0], node, fn)
        return TermList(tuple(S.terms_prefix(F, _natural(a[1], node, fn), env.budget)))
    if fn == "D":
        n = _natural(a[1], node, fn) if len(a) > 1 else 1
        return calculus.nth_derivative(_as_series(a[0], node, fn), n)
    if fn == "logof":
        return composition.log_of(_as_series(a[0], node, fn), env.budget)
    if fn == "expof":
        return composition.exp_of(_as_series(a[0], node, fn), env.budget)
    if fn == "rlog":
        return composition.shift_log(_as_series(a[0], node, fn))
    if fn == "complog":
        return composition.compose_with_log(
            _as_series(a[0], node, fn), _as_series(a[1], node, fn), env.budget
        )
    if fn == "subst":
        return composition.substitute_logfree(
            _as_series(a[0], node, fn), _as_series(a[1], node, fn), env.budget
        )
    if fn == "pow":
        return _power(a[0], _rational(a[1], node, fn), node)
    if fn == "taylor":
        stages = _natural(a[3], node, fn) if len(a) > 3 else None
        F, G, H = (_as_series(v, node, fn) for v in a[:3])
        return composition.taylor_compose(F, G, H, env.budget, stages=stages)
    if fn == "trunc":
        return S.truncate_above(_as_series(a[0], node, fn), _monomial(a[1], node, fn))
    if fn == "ord":
        return S.exp_order(_as_series(a[0], node, fn), env.budget)
    if fn == "cmp":
        return mono_cmp(_monomial(a[0], node, fn), _monomial(a[1], node, fn))
    if fn == "geom":
        return fieldops.compose_ps1(fieldops.ps1_geom(), _as_series(a[0], node, fn))
    if fn == "almost_regular":
        rows = []
        for row in _list(a[0], node):
            row = _list(row, node)
            if len(row) != 2:
                raise MalformedInput(_at("almost_regular rows are [nu, [p0, p1, ...]]", node))
            nu = _rational(row[0], node, fn)
            rows.append((nu, [_rational(c, node, fn) for c in _list(row[1], node)]))
        constant_head = bool(len(a) > 1 and _rational(a[1], node, fn) != 0)
        return S.almost_regular(rows, constant_head=constant_head)
    if fn == "germ":
        if not isinstance(node.args[0], Name):
            raise DSLTypeError(_at("germ(...) takes a builtin germ name", node))
        return builtin_germ(node.args[0].id)
    raise DSLTypeError(_at(f"unknown function {fn}", node))


def elaborate(node, env):
    """Evaluate one AST node in ``env``."""
    if isinstance(node, Let):
        value = elaborate(node.expr, env)
        env.bind(node.name, value)
        return value
    if isinstance(node, Num):
        return as_rational(node.value)
    if isinstance(node, Name):
        return env.lookup(node.id, node)
    if isinstance(node, Atom):
        return Monomial.level(node.level)
    if isinstance(node, ScalarLit):
        return _scalar_literal(node, elaborate(node.arg, env))
    if isinstance(node, Neg):
        v = elaborate(node.operand, env)
        if _is_coeff(v):
            return -v
        return S.negate(_as_series(v, node, "-"))
    if isinstance(node, BinOp):
        return _arith(node.op, elaborate(node.left, env), elaborate(node.right, env), node)
    if isinstance(node, Pow):
        return _power(elaborate(node.base, env), node.exponent, node)
    if isinstance(node, ListLit):
        return [elaborate(item, env) for item in node.items]
    if isinstance(node, Call):
        if node.fn == "germ":
            return _call(node, env, [])
        return _call(node, env, [elaborate(arg, env) for arg in node.args])
    raise DSLTypeError(f"cannot evaluate {node!r}")


def evaluate(text, env=None):
    """Run every statement in ``text``; return the value of the last one."""
    env = env if env is not None else Env()
    value = None
    with S.observing(env.budget):
        for stmt in parse_program(text):
            value = elaborate(stmt, env)
    return value


# -- output ---------------------------------------------------------------------------


def format_value(v, k=DEFAULT_SHOW, budget=None):
    """Canonical text.  Finite values print so that they parse back to themselves."""
    if is_rational(v):
        return fmt(as_rational(v))
    if isinstance(v, (Scalar, Monomial)):
        return str(v)
    if isinstance(v, TermList):
        return S.format_terms(list(v.terms))
    if isinstance(v, S.Series):
        p = S.observe(v, k, budget)
        text = S.format_terms(p.terms)
        if p.budget_hit:
            return text + " + ... (budget exhausted)"
        return text if p.exhausted else text + " + ..."
    if isinstance(v, NumericGerm):
        return f"<germ {v.label}>"
    if isinstance(v, str):
        return v
    if isinstance(v, list):
        return "[" + ", ".join(format_value(i, k, budget) for i in v) + "]"
    return repr(v)


def value_to_json(v, k=DEFAULT_SHOW, budget=None):
    if isinstance(v, TermList):
        return S.prefix_to_json(S.Prefix(list(v.terms), True, False))
    if isinstance(v, S.Series):
        return S.prefix_to_json(S.observe(v, k, budget))
    if isinstance(v, Monomial):
        return {"mono": v.to_json(), "text": str(v)}
    if isinstance(v, list):
        return [value_to_json(i, k, budget) for i in v]
    return {"value": format_value(v, k, budget), "type": _kind(v)}


def error_to_json(exc):
    kind = getattr(exc, "kind", type(exc).__name__)
    return {"error": kind, "detail": str(exc)}


__all__ = [
    "Env",
    "TermList",
    "elaborate",
    "evaluate",
    "format_value",
    "value_to_json",
    "error_to_json",
]
