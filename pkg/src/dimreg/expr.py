"""Symbolic expression trees.

Immutable node types with numeric evaluation (floats or numpy arrays),
dimensional type checking, a node-weight complexity score, light
simplification, a canonical printer, and a matching parser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dimensions import DIMENSIONLESS, Dimension

UNARY_OPS = ("neg", "inv", "sqrt", "sin", "cos", "tan", "exp", "log", "arcsin")
BINARY_OPS = ("add", "sub", "mul", "div")


class EvalError(ValueError):
    """Unbound variable or operator-domain violation during evaluation."""


class DimensionMismatch(ValueError):
    """Expression is dimensionally inconsistent; carries the offending node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class Expr:
    def __str__(self) -> str:
        return print_expr(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float
    fitted: bool = False  # True for free constants to be fitted by regression


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    child: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class PowInt(Expr):
    child: Expr
    power: int

    def __post_init__(self):
        if self.power == 0 or self.power != int(self.power):
            raise ValueError("powint exponent must be a nonzero integer")


_UNARY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "arcsin": np.arcsin,
    "sqrt": np.sqrt,
}


def eval_expr(e: Expr, bindings: dict):
    """Evaluate with IEEE doubles.  Values may be scalars or numpy arrays.

    Domain violations (log of a non-positive value, |arcsin| > 1, sqrt of a
    negative, division by zero) raise :class:`EvalError` instead of
    propagating NaN.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return bindings[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Unary):
        x = eval_expr(e.child, bindings)
        if e.op == "neg":
            return -x
        if e.op == "inv":
            if np.any(x == 0):
                raise EvalError("inv of zero")
            return 1.0 / x
        if e.op == "sqrt":
            if np.any(np.asarray(x) < 0):
                raise EvalError("sqrt of negative value")
        elif e.op == "log":
            if np.any(np.asarray(x) <= 0):
                raise EvalError("log of non-positive value")
        elif e.op == "arcsin":
            if np.any(np.abs(x) > 1):
                raise EvalError("arcsin argument outside [-1, 1]")
        return _UNARY_FUNCS[e.op](x)
    if isinstance(e, Binary):
        a = eval_expr(e.left, bindings)
        b = eval_expr(e.right, bindings)
        if e.op == "add":
            return a + b
        if e.op == "sub":
            return a - b
        if e.op == "mul":
            return a * b
        if e.op == "div":
            if np.any(b == 0):
                raise EvalError("division by zero")
            return a / b
        raise EvalError(f"unknown binary op {e.op!r}")
    if isinstance(e, PowInt):
        x = eval_expr(e.child, bindings)
        if e.power < 0 and np.any(x == 0):
            raise EvalError("zero raised to a negative power")
        with np.errstate(over="ignore"):
            return x ** float(e.power)
    raise TypeError(f"not an expression node: {e!r}")


def free_variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Unary):
        return free_variables(e.child)
    if isinstance(e, Binary):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, PowInt):
        return free_variables(e.child)
    return set()


def fitted_constants(e: Expr) -> list[Const]:
    """Fitted-constant nodes in deterministic (left-to-right) order."""
    if isinstance(e, Const):
        return [e] if e.fitted else []
    if isinstance(e, Unary):
        return fitted_constants(e.child)
    if isinstance(e, Binary):
        return fitted_constants(e.left) + fitted_constants(e.right)
    if isinstance(e, PowInt):
        return fitted_constants(e.child)
    return []


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.child, mapping))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, PowInt):
        return PowInt(substitute(e.child, mapping), e.power)
    return e


_DIMLESS_ONLY = {"sin", "cos", "tan", "exp", "log", "arcsin"}


def infer_dimension(e: Expr, dims: dict[str, Dimension]) -> Dimension:
    """Dimension of the expression, or :class:`DimensionMismatch`.

    add/sub need equal operand dimensions; transcendental functions need
    dimensionless arguments; sqrt halves exponents; mul/div/powint combine
    exponents exactly.  Constants are dimensionless.
    """
    if isinstance(e, Const):
        return DIMENSIONLESS
    if isinstance(e, Var):
        try:
            return dims[e.name]
        except KeyError:
            raise DimensionMismatch(f"variable {e.name!r} has no dimension", e) from None
    if isinstance(e, Unary):
        d = infer_dimension(e.child, dims)
        if e.op == "neg":
            return d
        if e.op == "inv":
            return d ** -1
        if e.op == "sqrt":
            return d ** Fraction(1, 2)
        if e.op in _DIMLESS_ONLY:
            if not d.is_dimensionless():
                raise DimensionMismatch(f"{e.op} of dimensional quantity [{d}]", e)
            return DIMENSIONLESS
        raise DimensionMismatch(f"unknown unary op {e.op!r}", e)
    if isinstance(e, Binary):
        dl = infer_dimension(e.left, dims)
        dr = infer_dimension(e.right, dims)
        if e.op in ("add", "sub"):
            if dl != dr:
                raise DimensionMismatch(f"{e.op} of [{dl}] and [{dr}]", e)
            return dl
        if e.op == "mul":
            return dl * dr
        if e.op == "div":
            return dl * dr ** -1
        raise DimensionMismatch(f"unknown binary op {e.op!r}", e)
    if isinstance(e, PowInt):
        return infer_dimension(e.child, dims) ** e.power
    raise TypeError(f"not an expression node: {e!r}")


def complexity(e: Expr) -> float:
    """Node-weight score: leaf 1, unary 2, binary 2, powint 2, fitted constant 3."""
    if isinstance(e, Const):
        return 3.0 if e.fitted else 1.0
    if isinstance(e, Var):
        return 1.0
    if isinstance(e, Unary):
        return 2.0 + complexity(e.child)
    if isinstance(e, Binary):
        return 2.0 + complexity(e.left) + complexity(e.right)
    if isinstance(e, PowInt):
        return 2.0 + complexity(e.child)
    raise TypeError(f"not an expression node: {e!r}")


@dataclass(frozen=True)
class ParetoEntry:
    complexity: float
    error: float
    expr: Expr


def numeric_equivalence(
    a: Expr,
    b: Expr,
    domain: dict[str, tuple[float, float]],
    n: int = 100,
    tol: float = 1e-6,
    seed: int = 0,
    max_retries: int = 200,
) -> bool:
    """True iff |a-b| <= tol*(1+|b|) at ``n`` seeded sample points.

    Points violating an operator domain of either expression are resampled,
    with a bounded number of retries.
    """
    if n < 1:
        raise ValueError("need at least one sample point")
    rng = np.random.default_rng(seed)
    names = sorted(free_variables(a) | free_variables(b))
    for name in names:
        if name not in domain:
            raise EvalError(f"no sampling domain for variable {name!r}")
    accepted = 0
    retries = 0
    while accepted < n:
        point = {k: rng.uniform(*domain[k]) for k in names}
        try:
            va = eval_expr(a, point)
            vb = eval_expr(b, point)
        except EvalError:
            retries += 1
            if retries > max_retries:
                raise EvalError("sampling domain violates operator domains")
            continue
        if not (abs(va - vb) <= tol * (1.0 + abs(vb))):
            return False
        accepted += 1
    return True


def _flatten(op: str, e: Expr) -> list[Expr]:
    if isinstance(e, Binary) and e.op == op:
        return _flatten(op, e.left) + _flatten(op, e.right)
    return [e]


def _is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and not e.fitted and (value is None or e.value == value)


def simplify(e: Expr) -> Expr:
    """Local rewrites to fixpoint: identity elements, double negation,
    literal constant folding (including across mul/add chains)."""
    prev = None
    cur = e
    while cur != prev:
        prev = cur
        cur = _simplify_once(cur)
    return cur


def _simplify_once(e: Expr) -> Expr:
    if isinstance(e, Unary):
        c = _simplify_once(e.child)
        if e.op == "neg":
            if isinstance(c, Unary) and c.op == "neg":
                return c.child
            if _is_const(c):
                return Const(-c.value)
        if e.op == "inv":
            if isinstance(c, Unary) and c.op == "inv":
                return c.child
            if _is_const(c) and c.value != 0:
                return Const(1.0 / c.value)
        if _is_const(c) and e.op in _UNARY_FUNCS:
            try:
                with np.errstate(all="ignore"):
                    folded = float(_UNARY_FUNCS[e.op](c.value))
            except (ValueError, FloatingPointError, ZeroDivisionError):
                folded = math.nan
            if math.isfinite(folded):
                return Const(folded)
        return Unary(e.op, c)
    if isinstance(e, PowInt):
        c = _simplify_once(e.child)
        if e.power == 1:
            return c
        if _is_const(c) and not (c.value == 0 and e.power < 0):
            return Const(c.value ** e.power)
        return PowInt(c, e.power)
    if isinstance(e, Binary):
        left = _simplify_once(e.left)
        right = _simplify_once(e.right)
        if e.op in ("add", "mul"):
            return _fold_chain(e.op, Binary(e.op, left, right))
        if _is_const(left) and _is_const(right):
            if e.op == "sub":
                return Const(left.value - right.value)
            if e.op == "div" and right.value != 0:
                return Const(left.value / right.value)
        if e.op == "sub":
            if _is_const(right, 0):
                return left
            if _is_const(left, 0):
                return Unary("neg", right)
        if e.op == "div":
            if _is_const(right, 1):
                return left
            if _is_const(left, 0):
                return Const(0.0)
        return Binary(e.op, left, right)
    return e


def _fold_chain(op: str, e: Expr) -> Expr:
    """Fold literal constants across an add or mul chain."""
    terms = _flatten(op, e)
    unit = 0.0 if op == "add" else 1.0
    acc = unit
    rest = []
    for t in terms:
        if _is_const(t):
            acc = acc + t.value if op == "add" else acc * t.value
        else:
            rest.append(t)
    if op == "mul" and acc == 0.0:
        return Const(0.0)
    if not rest:
        return Const(acc)
    out = rest[0]
    for t in rest[1:]:
        out = Binary(op, out, t)
    if acc != unit:
        out = Binary(op, Const(acc), out)
    return out


_BIN_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def print_expr(e: Expr) -> str:
    """Canonical fully-parenthesized infix form; re-parseable."""
    if isinstance(e, Const):
        v = e.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{print_expr(e.child)})"
        if e.op == "inv":
            return f"(1/{print_expr(e.child)})"
        return f"{e.op}({print_expr(e.child)})"
    if isinstance(e, Binary):
        return f"({print_expr(e.left)} {_BIN_SYMBOL[e.op]} {print_expr(e.right)})"
    if isinstance(e, PowInt):
        return f"({print_expr(e.child)}^{e.power})"
    raise TypeError(f"not an expression node: {e!r}")


class ParseError(ValueError):
    pass


def parse_expr(text: str) -> Expr:
    """Parse the canonical infix grammar (also accepts hand-written input).

    Precedence: unary minus < add/sub < mul/div < power < atoms.  Fitted
    constants are not distinguishable in text; all numbers parse as literals.
    """
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take(expected=None):
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected!r}, found {tok!r} in {text!r}")
        pos[0] += 1
        return tok

    def parse_sum():
        if peek() == "-":
            take()
            node = Unary("neg", parse_term())
        else:
            node = parse_term()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_term()
            node = Binary("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_term():
        node = parse_power()
        while peek() in ("*", "/"):
            op = take()
            rhs = parse_power()
            node = Binary("mul" if op == "*" else "div", node, rhs)
        return node

    def parse_power():
        node = parse_atom()
        if peek() == "^":
            take()
            sign = 1
            if peek() == "-":
                take()
                sign = -1
            exp_tok = take()
            try:
                power = sign * int(exp_tok)
            except ValueError:
                raise ParseError(f"powint exponent must be an integer, got {exp_tok!r}")
            node = PowInt(node, power)
        return node

    def parse_atom():
        tok = peek()
        if tok == "(":
            take()
            node = parse_sum()
            take(")")
            return node
        if tok == "-":
            take()
            return Unary("neg", parse_atom())
        take()
        if _is_number(tok):
            return Const(float(tok))
        if tok in UNARY_OPS and peek() == "(":
            take("(")
            node = parse_sum()
            take(")")
            if tok == "neg":
                return Unary("neg", node)
            return Unary(tok, node)
        return Var(tok)

    node = parse_sum()
    if pos[0] != len(tokens):
        raise ParseError(f"trailing input {tokens[pos[0]:]!r} in {text!r}")
    return node


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()+-*/^":
            tokens.append(ch)
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] in ".eE" or
                                     (text[j] in "+-" and j > i and text[j - 1] in "eE")):
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} in {text!r}")
    if not tokens:
        raise ParseError("empty expression")
    return tokens
