"""Two input syntaxes for expressions.

Infix strings are parsed with :mod:`ast`, so they follow Python precedence::

    "x1*xi1 - 3/2*x2**2 + min(x1, xi2)"

The JSON prefix form is a nested list ``[op, arg, ...]`` with

    ``"+"``/``"*"`` (two or more args), ``"-"`` (one or two), ``"/"``,
    ``"^"`` (integer exponent), ``"min"``, ``"max"``;

leaves are integers, rational strings ``"p/q"`` or variable names.
Variables are ``x<i>`` and ``xi<i>``; ``x, y, z`` and ``xi, eta, zeta``
are accepted as aliases for indices 1..3.
"""
import ast
from fractions import Fraction
from functools import reduce

from ..errors import SchemaError
from .expr import Const, Expr, add, div, minmax, mul, neg, power, var


def parse_infix(text):
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise SchemaError(f"cannot parse expression {text!r}: {exc.msg}") from None
    return _from_ast(tree.body)


def _from_ast(node):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise SchemaError(f"unsupported literal {node.value!r}")
        return Const(Fraction(node.value) if isinstance(node.value, int) else Fraction(str(node.value)))
    if isinstance(node, ast.Name):
        return var(node.id)
    if isinstance(node, ast.UnaryOp):
        inner = _from_ast(node.operand)
        if isinstance(node.op, ast.USub):
            return neg(inner)
        if isinstance(node.op, ast.UAdd):
            return inner
    if isinstance(node, ast.BinOp):
        a = _from_ast(node.left)
        if isinstance(node.op, ast.Pow):
            k = _int_exponent(node.right)
            return power(a, k)
        b = _from_ast(node.right)
        if isinstance(node.op, ast.Add):
            return add(a, b)
        if isinstance(node.op, ast.Sub):
            return add(a, neg(b))
        if isinstance(node.op, ast.Mult):
            return mul(a, b)
        if isinstance(node.op, ast.Div):
            return div(a, b)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in ("min", "max"):
        if len(node.args) < 2 or node.keywords:
            raise SchemaError(f"{node.func.id} takes two or more arguments")
        args = [_from_ast(a) for a in node.args]
        return reduce(lambda u, v: minmax(node.func.id, u, v), args)
    raise SchemaError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _int_exponent(node):
    sign = 1
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        sign, node = -1, node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return sign * node.value
    raise SchemaError("exponents must be integer literals")


def parse_prefix(data):
    if isinstance(data, bool):
        raise SchemaError("booleans are not expressions")
    if isinstance(data, int):
        return Const(Fraction(data))
    if isinstance(data, str):
        try:
            return Const(Fraction(data))
        except ValueError:
            return var(data)
    if not isinstance(data, list) or not data or not isinstance(data[0], str):
        raise SchemaError(f"bad prefix node {data!r}")
    op, args = data[0], data[1:]
    if op == "^":
        if len(args) != 2 or not isinstance(args[1], int):
            raise SchemaError("'^' takes an expression and an integer")
        return power(parse_prefix(args[0]), args[1])
    sub = [parse_prefix(a) for a in args]
    if op == "+" and len(sub) >= 2:
        return reduce(add, sub)
    if op == "*" and len(sub) >= 2:
        return reduce(mul, sub)
    if op == "-" and len(sub) == 1:
        return neg(sub[0])
    if op == "-" and len(sub) == 2:
        return add(sub[0], neg(sub[1]))
    if op == "/" and len(sub) == 2:
        return div(*sub)
    if op in ("min", "max") and len(sub) >= 2:
        return reduce(lambda u, v: minmax(op, u, v), sub)
    raise SchemaError(f"bad arity for {op!r}")


def parse_expr(src):
    """Infix string, JSON prefix list, number or an existing :class:`Expr`."""
    if isinstance(src, Expr):
        return src
    if isinstance(src, str):
        s = src.strip()
        if s.startswith("["):
            import json

            return parse_prefix(json.loads(s))
        return parse_infix(s)
    return parse_prefix(src)
