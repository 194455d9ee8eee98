"""Immutable expression trees over ``x1..xn, xi1..xin``.

Nodes fold constants on construction and differentiate symbolically.  A
division-free tree evaluates exactly at rational points.  ``min``/``max``
are allowed but are not C^1; their derivative is a :class:`Select` node
that raises :class:`NonDifferentiableError` when evaluated at a tie.
"""
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import NonDifferentiableError, SchemaError

VAR_RE = re.compile(r"^(x|xi)([1-9][0-9]*)$")
ALIASES = {"x": "x1", "y": "x2", "z": "x3", "xi": "xi1", "eta": "xi2", "zeta": "xi3"}


class Expr:
    __slots__ = ()

    # operator sugar keeps fixture code readable
    def __add__(self, other):
        return add(self, lift(other))

    def __radd__(self, other):
        return add(lift(other), self)

    def __sub__(self, other):
        return add(self, neg(lift(other)))

    def __rsub__(self, other):
        return add(lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, lift(other))

    def __rmul__(self, other):
        return mul(lift(other), self)

    def __truediv__(self, other):
        return div(self, lift(other))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        return power(self, k)


def lift(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Const(Fraction(v))
    if isinstance(v, float):
        return Const(v)
    raise TypeError(f"cannot use {v!r} in an expression")


@dataclass(frozen=True)
class Const(Expr):
    value: object

    def evaluate(self, env):
        return self.value

    def diff(self, name):
        return ZERO_E

    def variables(self):
        return frozenset()

    def division_free(self):
        return True

    def prefix(self):
        v = self.value
        if isinstance(v, Fraction):
            return int(v) if v.denominator == 1 else str(v)
        return v

    def __str__(self):
        v = self.value
        return str(v) if v >= 0 else f"({v})"


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self):
        if not VAR_RE.match(self.name):
            raise SchemaError(f"bad variable name {self.name!r}")

    def evaluate(self, env):
        return env[self.name]

    def diff(self, name):
        return ONE_E if name == self.name else ZERO_E

    def variables(self):
        return frozenset([self.name])

    def division_free(self):
        return True

    def prefix(self):
        return self.name

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    def evaluate(self, env):
        return self.a.evaluate(env) + self.b.evaluate(env)

    def diff(self, name):
        return add(self.a.diff(name), self.b.diff(name))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def division_free(self):
        return self.a.division_free() and self.b.division_free()

    def prefix(self):
        return ["+", self.a.prefix(), self.b.prefix()]

    def __str__(self):
        if isinstance(self.b, Neg):
            return f"({self.a} - {self.b.a})"
        return f"({self.a} + {self.b})"


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    def evaluate(self, env):
        return self.a.evaluate(env) * self.b.evaluate(env)

    def diff(self, name):
        return add(mul(self.a.diff(name), self.b), mul(self.a, self.b.diff(name)))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def division_free(self):
        return self.a.division_free() and self.b.division_free()

    def prefix(self):
        return ["*", self.a.prefix(), self.b.prefix()]

    def __str__(self):
        return f"{self.a}*{self.b}"


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr

    def evaluate(self, env):
        d = self.b.evaluate(env)
        if d == 0:
            raise ZeroDivisionError("division by zero in expression")
        return self.a.evaluate(env) / d

    def diff(self, name):
        num = add(mul(self.a.diff(name), self.b), neg(mul(self.a, self.b.diff(name))))
        return div(num, power(self.b, 2))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def division_free(self):
        return False

    def prefix(self):
        return ["/", self.a.prefix(), self.b.prefix()]

    def __str__(self):
        return f"({self.a} / {self.b})"


@dataclass(frozen=True)
class Pow(Expr):
    a: Expr
    k: int

    def evaluate(self, env):
        return self.a.evaluate(env) ** self.k

    def diff(self, name):
        return mul(mul(Const(Fraction(self.k)), power(self.a, self.k - 1)), self.a.diff(name))

    def variables(self):
        return self.a.variables()

    def division_free(self):
        return self.k >= 0 and self.a.division_free()

    def prefix(self):
        return ["^", self.a.prefix(), self.k]

    def __str__(self):
        return f"{self.a}**{self.k}"


@dataclass(frozen=True)
class Neg(Expr):
    a: Expr

    def evaluate(self, env):
        return -self.a.evaluate(env)

    def diff(self, name):
        return neg(self.a.diff(name))

    def variables(self):
        return self.a.variables()

    def division_free(self):
        return self.a.division_free()

    def prefix(self):
        return ["-", self.a.prefix()]

    def __str__(self):
        return f"-{self.a}"


@dataclass(frozen=True)
class MinMax(Expr):
    op: str  # "min" or "max"
    a: Expr
    b: Expr

    def evaluate(self, env):
        u, v = self.a.evaluate(env), self.b.evaluate(env)
        return min(u, v) if self.op == "min" else max(u, v)

    def diff(self, name):
        return select(self.op, self.a, self.b, self.a.diff(name), self.b.diff(name))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def division_free(self):
        return self.a.division_free() and self.b.division_free()

    def prefix(self):
        return [self.op, self.a.prefix(), self.b.prefix()]

    def __str__(self):
        return f"{self.op}({self.a}, {self.b})"


@dataclass(frozen=True)
class Select(Expr):
    """Derivative of ``min``/``max``: picks the branch that is active."""

    op: str
    a: Expr
    b: Expr
    da: Expr
    db: Expr

    def evaluate(self, env):
        u, v = self.a.evaluate(env), self.b.evaluate(env)
        if u == v:
            raise NonDifferentiableError(f"{self.op} has a kink at the evaluation point")
        first = u < v if self.op == "min" else u > v
        return (self.da if first else self.db).evaluate(env)

    def diff(self, name):
        return select(self.op, self.a, self.b, self.da.diff(name), self.db.diff(name))

    def variables(self):
        return self.a.variables() | self.b.variables() | self.da.variables() | self.db.variables()

    def division_free(self):
        return all(e.division_free() for e in (self.a, self.b, self.da, self.db))

    def prefix(self):
        raise SchemaError("derivative selector nodes have no serialized form")

    def __str__(self):
        return f"d{self.op}({self.a}, {self.b}; {self.da}, {self.db})"


ZERO_E = Const(Fraction(0))
ONE_E = Const(Fraction(1))


def _is_const(e, v=None):
    return isinstance(e, Const) and (v is None or e.value == v)


def add(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def neg(a):
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def mul(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO_E
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a, -1):
        return neg(b)
    if _is_const(b, -1):
        return neg(a)
    return Mul(a, b)


def div(a, b):
    if _is_const(b, 0):
        raise ZeroDivisionError("division by the constant 0")
    if _is_const(a, 0):
        return ZERO_E
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value / b.value)
    return Div(a, b)


def power(a, k):
    if not isinstance(k, int) or isinstance(k, bool):
        raise SchemaError("exponents must be integers")
    if k == 0:
        return ONE_E
    if k == 1:
        return a
    if _is_const(a):
        return Const(a.value**k)
    return Pow(a, k)


def minmax(op, a, b):
    if _is_const(a) and _is_const(b):
        return Const(min(a.value, b.value) if op == "min" else max(a.value, b.value))
    return MinMax(op, a, b)


def select(op, a, b, da, db):
    # both branches agree symbolically: no kink in this partial
    if da == db:
        return da
    return Select(op, a, b, da, db)


def var(name):
    return Var(ALIASES.get(name, name))


def to_float(v):
    return float(v) if not isinstance(v, float) else v


def is_finite(v):
    return not isinstance(v, float) or math.isfinite(v)


def compile_polynomial(expr, names):
    """A fast exact evaluator for a division-free polynomial tree.

    Returns ``fn(values) -> mpq`` taking the variables in the order of
    ``names``, or ``None`` when the tree has nodes other than constants,
    variables, sums, products, negations and non-negative powers.  The tree
    is flattened into straight-line code, so deep trees do not hit the
    parser's nesting limit, and shared subtrees are computed once.
    """
    from gmpy2 import mpq

    slots = {name: f"v{i}" for i, name in enumerate(names)}
    consts, lines, done = [], [], {}
    stack = [(expr, False)]
    while stack:
        node, ready = stack.pop()
        key = id(node)
        if key in done:
            continue
        if isinstance(node, Const):
            if not isinstance(node.value, Fraction):
                return None
            consts.append(mpq(node.value.numerator, node.value.denominator))
            done[key] = f"c[{len(consts) - 1}]"
            continue
        if isinstance(node, Var):
            if node.name not in slots:
                return None
            done[key] = slots[node.name]
            continue
        if isinstance(node, (Add, Mul)):
            kids = (node.a, node.b)
        elif isinstance(node, Neg) or (isinstance(node, Pow) and node.k >= 0):
            kids = (node.a,)
        else:
            return None
        if not ready:
            stack.append((node, True))
            stack.extend((k, False) for k in kids if id(k) not in done)
            continue
        refs = [done[id(k)] for k in kids]
        if isinstance(node, Add):
            rhs = f"{refs[0]} + {refs[1]}"
        elif isinstance(node, Mul):
            rhs = f"{refs[0]} * {refs[1]}"
        elif isinstance(node, Neg):
            rhs = f"-{refs[0]}"
        else:
            rhs = f"{refs[0]} ** {node.k}"
        name = f"t{len(lines)}"
        lines.append(f"    {name} = {rhs}")
        done[key] = name
    args = ", ".join(f"v{i}" for i in range(len(names)))
    body = "\n".join(lines) or "    pass"
    src = f"def _f(c, {args}):\n{body}\n    return {done[id(expr)]}\n" if names else None
    if src is None:
        return None
    scope = {}
    exec(compile(src, "<polynomial>", "exec"), scope)
    fn, table = scope["_f"], tuple(consts)
    zero = mpq(0)
    return lambda values: zero + fn(table, *values)
