import math

import pytest
from hypothesis import given, strategies as st

from rfuncds.errors import ParseError
from rfuncds.expr import (
    Abs, Add, Const, Max, Min, Mul, Neg, Pow, RAnd, ROr, Sqrt, Sub, Var,
    canonicalize_alpha1, desugar_r_nodes, eval_expr,
)
from rfuncds.exprtext import (
    parse, parse_infix, parse_tree_text, serialize, to_infix, to_tree_text,
)
from rfuncds.geometry import testcase as load_case

X, Y = Var("x"), Var("y")

ZOO = [
    Const(1.5),
    Const(-2.0),
    X,
    X + Y,
    Sub(X, Const(3.0)),
    Mul(Const(2.0), X) - Y * Y,
    Neg(X + 1.0),
    Pow(X + Y, 3),
    Sqrt(Abs(X)),
    Min(X, Y),
    Max(Min(X, Y), Const(0.25)),
    Abs(Sub(Mul(X, Y), Const(0.5))),
    RAnd(X, Y, 1.0),
    ROr(X - 1.0, Y + 2.0, 0.5),
    RAnd(ROr(X, Y, -0.5), Sub(X, Y), 0.0),
]


def test_const_round_trip():
    assert serialize(Const(1.5)) == "1.5"
    assert parse("1.5") == Const(1.5)


def test_canonical_alpha1_infix_spelling():
    canon = canonicalize_alpha1(RAnd(X, Y, 1.0))
    assert to_infix(canon) == "0.5*((x+y)-abs(x-y))"


@pytest.mark.parametrize("expr", ZOO, ids=lambda e: type(e).__name__)
@pytest.mark.parametrize("fmt", ["infix", "tree"])
def test_round_trip_value_equality(expr, fmt, rng):
    text = serialize(expr, fmt)
    back = parse(text, fmt)
    # infix output expands R-nodes to radical arithmetic, so the round-trip
    # contract is against the expression as emitted
    reference = desugar_r_nodes(expr) if fmt == "infix" else expr
    pts = rng.uniform(-7, 7, size=(200, 2))
    for x, y in pts:
        env = {"x": x, "y": y}
        assert eval_expr(back, env) == pytest.approx(eval_expr(reference, env), abs=1e-12)


@pytest.mark.parametrize("expr", ZOO, ids=lambda e: type(e).__name__)
def test_tree_round_trip_is_structural(expr):
    assert parse_tree_text(to_tree_text(expr)) == expr


def test_composed_case_round_trips(rng):
    f_and, _, _ = load_case("parabolas-4.2")
    for style in ("sqrt", "abs"):
        text = to_infix(f_and.expr, alpha1_style=style)
        back = parse_infix(text)
        reference = desugar_r_nodes(
            canonicalize_alpha1(f_and.expr) if style == "abs" else f_and.expr)
        pts = rng.uniform(-6, 6, size=(1000, 2))
        for x, y in pts:
            env = {"x": x, "y": y}
            assert eval_expr(back, env) == pytest.approx(eval_expr(reference, env), abs=1e-12)


def test_infix_alpha1_styles_differ():
    expr = RAnd(X, Y, 1.0)
    assert "sqrt" in to_infix(expr, alpha1_style="sqrt")
    assert "abs" in to_infix(expr, alpha1_style="abs")


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_number_round_trip_full_precision(v):
    # negative literals (including -0.0) come back as Neg(Const(|v|));
    # value equality is exact either way
    assert eval_expr(parse_infix(serialize(Const(v))), {}) == v
    if math.copysign(1.0, v) > 0:
        assert parse_infix(serialize(Const(v))) == Const(v)


@pytest.mark.parametrize("bad, position_known", [
    ("1 +", True),
    ("(x+y", True),
    ("x y", True),
    ("foo(x)", True),
    ("min(x)", True),
    ("x / y", True),
    ("x ^ y", True),
    ("x ^ 1.5", True),
    ("x @ y", True),
    ("", True),
    ("min()", True),
])
def test_parse_errors(bad, position_known):
    with pytest.raises(ParseError):
        parse_infix(bad)


@pytest.mark.parametrize("bad", [
    "42",                                     # not an object
    '{"kind":"nope"}',
    '{"kind":"const","value":"x"}',
    '{"kind":"pow","exponent":-1,"args":[{"kind":"var","name":"x"}]}',
    '{"kind":"add","args":[{"kind":"var","name":"x"}]}',
    '{"kind":"rand","args":[{"kind":"var","name":"x"},{"kind":"var","name":"y"}]}',
    "{not json",
])
def test_tree_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_tree_text(bad)


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        serialize(X, "yaml")
    with pytest.raises(ValueError):
        parse("x", "yaml")


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_infix("x + $")
    assert info.value.position == 4


# random safe expressions (no sqrt: keeps domains valid for any point)
_leaf = st.one_of(
    st.floats(min_value=-5, max_value=5, allow_nan=False).map(lambda v: Const(v)),
    st.sampled_from([X, Y]),
)
_expr = st.recursive(
    _leaf,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda ab: Add(*ab)),
        st.tuples(inner, inner).map(lambda ab: Sub(*ab)),
        st.tuples(inner, inner).map(lambda ab: Mul(*ab)),
        st.tuples(inner, inner).map(lambda ab: Min(*ab)),
        st.tuples(inner, inner).map(lambda ab: Max(*ab)),
        inner.map(Neg),
        inner.map(Abs),
        inner.map(lambda e: Pow(e, 2)),
    ),
    max_leaves=12,
)


@given(expr=_expr, x=st.floats(-3, 3), y=st.floats(-3, 3))
def test_random_expression_round_trip(expr, x, y):
    env = {"x": x, "y": y}
    reference = eval_expr(expr, env)
    for fmt in ("infix", "tree"):
        back = parse(serialize(expr, fmt), fmt)
        assert eval_expr(back, env) == pytest.approx(reference, rel=1e-12, abs=1e-12)
