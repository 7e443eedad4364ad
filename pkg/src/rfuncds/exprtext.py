"""Text formats for expressions: human-readable infix and a JSON node tree.

The infix grammar (documented in docs/expressions.md):

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | power
    power   := atom ('^' UINT)?
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Functions: sqrt, abs (one argument), min, max (two or more, folded left).
There is no division.  R-nodes have no infix spelling; they are expanded to
arithmetic on output (alpha=1 optionally in abs form) and never produced by
the parser.  The tree format keeps R-nodes intact, so structural round trips
go through it.
"""

from __future__ import annotations

import json
import re

from .errors import ParseError
from .expr import (
    Abs, Add, Const, Expr, Max, Min, Mul, Neg, Pow, RAnd, ROr, Sqrt, Sub, Var,
    canonicalize_alpha1, desugar_r_nodes,
)

FORMATS = ("infix", "tree")


def serialize(expr: Expr, format: str = "infix", alpha1_style: str = "sqrt") -> str:
    """Render an expression as text.

    ``format="tree"`` emits the JSON node tree (R-nodes kept).  With
    ``format="infix"``, R-nodes are expanded: ``alpha1_style="abs"`` uses the
    0.5*((a+b) -/+ |a-b|) form for alpha=1 nodes, ``"sqrt"`` the radical form.
    """
    if format == "tree":
        return to_tree_text(expr)
    if format == "infix":
        return to_infix(expr, alpha1_style=alpha1_style)
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def parse(text: str, format: str = "infix") -> Expr:
    if format == "tree":
        return parse_tree_text(text)
    if format == "infix":
        return parse_infix(text)
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


# ----------------------------------------------------------------------
# infix output

def to_infix(expr: Expr, alpha1_style: str = "sqrt") -> str:
    if alpha1_style not in ("sqrt", "abs"):
        raise ValueError("alpha1_style must be 'sqrt' or 'abs'")
    if alpha1_style == "abs":
        expr = canonicalize_alpha1(expr)
    expr = desugar_r_nodes(expr)
    return _infix(expr)


def _infix(e: Expr) -> str:
    # binary children are always parenthesized; atoms and calls never are
    def child(c: Expr) -> str:
        s = _infix(c)
        if isinstance(c, (Add, Sub, Mul, Neg)):
            return f"({s})"
        return s

    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"-{child(e.a)}"
    if isinstance(e, Add):
        return f"{child(e.a)}+{child(e.b)}"
    if isinstance(e, Sub):
        return f"{child(e.a)}-{child(e.b)}"
    if isinstance(e, Mul):
        return f"{child(e.a)}*{child(e.b)}"
    if isinstance(e, Pow):
        base = _infix(e.base)
        if not isinstance(e.base, (Const, Var)) or (
            isinstance(e.base, Const) and e.base.value < 0
        ):
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Sqrt):
        return f"sqrt({_infix(e.a)})"
    if isinstance(e, Abs):
        return f"abs({_infix(e.a)})"
    if isinstance(e, Min):
        return f"min({_infix(e.a)},{_infix(e.b)})"
    if isinstance(e, Max):
        return f"max({_infix(e.a)},{_infix(e.b)})"
    raise TypeError(f"node {type(e).__name__} has no infix form")


# ----------------------------------------------------------------------
# infix parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*^(),]))"
)

_FUNCTIONS = {"sqrt": (Sqrt, 1), "abs": (Abs, 1), "min": (Min, 2), "max": (Max, 2)}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []  # (kind, value, position)
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                bad_at = len(text) - len(stripped)
                raise ParseError(bad_at, f"unexpected character {text[bad_at]!r}")
            kind = m.lastgroup
            self.items.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.next()
        if kind != "op" or value != op:
            raise ParseError(pos, f"expected {op!r}, got {value!r}")


def parse_infix(text: str) -> Expr:
    toks = _Tokens(text)
    expr = _parse_sum(toks)
    kind, value, pos = toks.peek()
    if kind is not None:
        raise ParseError(pos, f"unexpected trailing {value!r}")
    return expr


def _parse_sum(toks: _Tokens) -> Expr:
    node = _parse_term(toks)
    while True:
        kind, value, _ = toks.peek()
        if kind == "op" and value in "+-":
            toks.next()
            rhs = _parse_term(toks)
            node = Add(node, rhs) if value == "+" else Sub(node, rhs)
        else:
            return node


def _parse_term(toks: _Tokens) -> Expr:
    node = _parse_factor(toks)
    while True:
        kind, value, _ = toks.peek()
        if kind == "op" and value == "*":
            toks.next()
            node = Mul(node, _parse_factor(toks))
        else:
            return node


def _parse_factor(toks: _Tokens) -> Expr:
    kind, value, _ = toks.peek()
    if kind == "op" and value == "-":
        toks.next()
        return Neg(_parse_factor(toks))
    return _parse_power(toks)


def _parse_power(toks: _Tokens) -> Expr:
    node = _parse_atom(toks)
    kind, value, _ = toks.peek()
    if kind == "op" and value == "^":
        toks.next()
        kind, value, pos = toks.next()
        if kind != "number" or not value.isdigit():
            raise ParseError(pos, "exponent must be an unsigned integer literal")
        node = Pow(node, int(value))
    return node


def _parse_atom(toks: _Tokens) -> Expr:
    kind, value, pos = toks.next()
    if kind == "number":
        return Const(float(value))
    if kind == "name":
        nkind, nvalue, _ = toks.peek()
        if nkind == "op" and nvalue == "(":
            if value not in _FUNCTIONS:
                raise ParseError(pos, f"unknown function {value!r}")
            toks.next()
            args = [_parse_sum(toks)]
            while True:
                k, v, p = toks.next()
                if k == "op" and v == ")":
                    break
                if not (k == "op" and v == ","):
                    raise ParseError(p, f"expected ',' or ')', got {v!r}")
                args.append(_parse_sum(toks))
            ctor, arity = _FUNCTIONS[value]
            if arity == 1:
                if len(args) != 1:
                    raise ParseError(pos, f"{value} takes exactly one argument")
                return ctor(args[0])
            if len(args) < 2:
                raise ParseError(pos, f"{value} takes at least two arguments")
            out = args[0]
            for a in args[1:]:
                out = ctor(out, a)
            return out
        return Var(value)
    if kind == "op" and value == "(":
        node = _parse_sum(toks)
        toks.expect_op(")")
        return node
    raise ParseError(pos, f"expected a number, name or '(', got {value!r}")


# ----------------------------------------------------------------------
# tree format (JSON)

def _to_obj(e: Expr):
    if isinstance(e, Const):
        return {"kind": "const", "value": e.value}
    if isinstance(e, Var):
        return {"kind": "var", "name": e.name}
    if isinstance(e, Neg):
        return {"kind": "neg", "args": [_to_obj(e.a)]}
    if isinstance(e, Sqrt):
        return {"kind": "sqrt", "args": [_to_obj(e.a)]}
    if isinstance(e, Abs):
        return {"kind": "abs", "args": [_to_obj(e.a)]}
    if isinstance(e, Pow):
        return {"kind": "pow", "exponent": e.exponent, "args": [_to_obj(e.base)]}
    if isinstance(e, (RAnd, ROr)):
        kind = "rand" if isinstance(e, RAnd) else "ror"
        return {"kind": kind, "alpha": e.alpha, "args": [_to_obj(e.a), _to_obj(e.b)]}
    for cls, kind in ((Add, "add"), (Sub, "sub"), (Mul, "mul"), (Min, "min"), (Max, "max")):
        if isinstance(e, cls):
            return {"kind": kind, "args": [_to_obj(e.a), _to_obj(e.b)]}
    raise TypeError(f"unknown expression node {type(e).__name__}")


def to_tree_text(expr: Expr) -> str:
    return json.dumps(_to_obj(expr), separators=(",", ":"))


_UNARY_KINDS = {"neg": Neg, "sqrt": Sqrt, "abs": Abs}
_BINARY_KINDS = {"add": Add, "sub": Sub, "mul": Mul, "min": Min, "max": Max}


def _from_obj(obj) -> Expr:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(None, f"tree node must be an object with 'kind', got {obj!r}")
    kind = obj["kind"]
    if kind == "const":
        v = obj.get("value")
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ParseError(None, f"const value must be a number, got {v!r}")
        return Const(float(v))
    if kind == "var":
        name = obj.get("name")
        if not isinstance(name, str) or not name:
            raise ParseError(None, f"var name must be a non-empty string, got {name!r}")
        return Var(name)
    args = obj.get("args")
    if kind in _UNARY_KINDS:
        if not isinstance(args, list) or len(args) != 1:
            raise ParseError(None, f"{kind} takes one child")
        return _UNARY_KINDS[kind](_from_obj(args[0]))
    if kind == "pow":
        exponent = obj.get("exponent")
        if not isinstance(exponent, int) or isinstance(exponent, bool) or exponent < 0:
            raise ParseError(None, f"pow exponent must be a non-negative integer, got {exponent!r}")
        if not isinstance(args, list) or len(args) != 1:
            raise ParseError(None, "pow takes one child")
        return Pow(_from_obj(args[0]), exponent)
    if kind in _BINARY_KINDS:
        if not isinstance(args, list) or len(args) != 2:
            raise ParseError(None, f"{kind} takes two children")
        return _BINARY_KINDS[kind](_from_obj(args[0]), _from_obj(args[1]))
    if kind in ("rand", "ror"):
        alpha = obj.get("alpha")
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            raise ParseError(None, f"{kind} needs a numeric alpha, got {alpha!r}")
        if not isinstance(args, list) or len(args) != 2:
            raise ParseError(None, f"{kind} takes two children")
        ctor = RAnd if kind == "rand" else ROr
        return ctor(_from_obj(args[0]), _from_obj(args[1]), float(alpha))
    raise ParseError(None, f"unknown node kind {kind!r}")


def parse_tree_text(text: str) -> Expr:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.pos, f"invalid JSON: {exc.msg}") from None
    return _from_obj(obj)
