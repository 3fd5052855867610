"""Expression DSL for analytic curves of one real variable.

Grammar (EBNF), with precedence ^ > unary minus > * / > + -, and ^
right-associative with an integer exponent:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' integer)?
    unary  := '-'? atom
    atom   := number | 's' | ident | ident '(' expr ')' | '(' expr ')'

ident is one of the fixed functions sin, cos, sinh, cosh, exp, log when
followed by '(' and a parameter name otherwise.  The function set is
deliberately closed: every expression that evaluates also has exact jets
and a split-holomorphic extension, so derivatives are obtained by jet or
symbolic calculus and never by finite differences.

Offsets reported by syntax errors are 1-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from .errors import (
    DomainError,
    EvalError,
    ExprSyntaxError,
    NonIntegerExponent,
    UnboundParameter,
    UnknownFunction,
)
from .split_algebra import DEFAULT_JET_ORDER, Jet, SplitScalar, SplitVec3, extend_analytic

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log")

_MATH_FN = {
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "exp": math.exp,
    "log": math.log,
}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


class Expr:
    """Base class for expression nodes (immutable, structural equality)."""

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Lit(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    """The curve variable s."""


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Neg(Expr):
    a: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    n: int


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


S = Var()
ZERO = Lit(0.0)
ONE = Lit(1.0)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_INT_RE = re.compile(r"-?\d+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, cls=ExprSyntaxError):
        raise cls(message, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str):
        if not self.accept(ch):
            self.error(f"expected {ch!r}")

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected input {self.text[self.pos]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.accept("*"):
                e = Mul(e, self.factor())
            elif self.accept("/"):
                e = Div(e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        # unary minus binds below ^, so -s^2 is -(s^2)
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        exponents = []
        while self.accept("^"):
            exponents.append(self.integer())
        if not exponents:
            return base
        # right-associative: a^2^3 = a^(2^3); exponents are literal ints
        n = exponents[-1]
        for e in reversed(exponents[:-1]):
            n = e**n
        return Pow(base, n)

    def integer(self) -> int:
        self.skip_ws()
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            self.error("expected integer exponent", NonIntegerExponent)
        end = m.end()
        # reject 2.5 style exponents explicitly
        if end < len(self.text) and self.text[end] in ".eE":
            nxt = self.text[end]
            if nxt == "." or (nxt in "eE" and _NUMBER_RE.match(self.text, m.start())):
                self.error("exponent must be an integer", NonIntegerExponent)
        self.pos = end
        return int(m.group(0))

    def atom(self) -> Expr:
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        m = _NUMBER_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Lit(float(m.group(0)))
        m = _IDENT_RE.match(self.text, self.pos)
        if m:
            name = m.group(0)
            self.pos = m.end()
            if self.peek() == "(":
                if name not in FUNCTIONS:
                    self.pos = m.start()
                    self.error(f"unknown function {name!r}", UnknownFunction)
                self.pos += 1
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name == "s":
                return S
            if name in FUNCTIONS:
                self.error(f"function {name!r} requires an argument")
            return Param(name)
        self.error(f"unexpected character {ch!r}")


def parse(text: str) -> Expr:
    """Parse the DSL; raises ExprSyntaxError/UnknownFunction/NonIntegerExponent."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Pretty printer (parse . format . parse is the identity on parsed ASTs)
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_UNARY
    if isinstance(e, Pow):
        return _PREC_POW
    if isinstance(e, Lit) and e.value < 0:
        return _PREC_UNARY
    return _PREC_ATOM


def _wrap(e: Expr, minimum: int) -> str:
    s = format_expr(e)
    return f"({s})" if _prec(e) < minimum else s


def format_expr(e: Expr) -> str:
    if isinstance(e, Lit):
        return repr(e.value) if e.value != int(e.value) else str(int(e.value))
    if isinstance(e, Var):
        return "s"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Add):
        return f"{_wrap(e.a, _PREC_ADD)} + {_wrap(e.b, _PREC_ADD + 1)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.a, _PREC_ADD)} - {_wrap(e.b, _PREC_ADD + 1)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.a, _PREC_MUL)}*{_wrap(e.b, _PREC_MUL + 1)}"
    if isinstance(e, Div):
        return f"{_wrap(e.a, _PREC_MUL)}/{_wrap(e.b, _PREC_MUL + 1)}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.a, _PREC_UNARY)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_ATOM)}^{e.n}"
    if isinstance(e, Call):
        return f"{e.fn}({format_expr(e.arg)})"
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Structural helpers: free parameters, simplification, differentiation
# ---------------------------------------------------------------------------


def free_params(e: Expr) -> set:
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, (Add, Sub, Mul, Div)):
        return free_params(e.a) | free_params(e.b)
    if isinstance(e, Neg):
        return free_params(e.a)
    if isinstance(e, Pow):
        return free_params(e.base)
    if isinstance(e, Call):
        return free_params(e.arg)
    return set()


def _is_lit(e: Expr, value=None) -> bool:
    return isinstance(e, Lit) and (value is None or e.value == value)


def simplify(e: Expr) -> Expr:
    """Conservative constant folding and identity elimination.

    Keeps derivative expressions compact; never changes values on the
    common domain (0*x -> 0 assumes x evaluates finitely, which holds for
    in-domain evaluation of this closed function set).
    """
    if isinstance(e, (Lit, Var, Param)):
        return e
    if isinstance(e, Neg):
        a = simplify(e.a)
        if _is_lit(a):
            return Lit(-a.value)
        if isinstance(a, Neg):
            return a.a
        return Neg(a)
    if isinstance(e, Pow):
        base = simplify(e.base)
        if e.n == 0:
            return ONE
        if e.n == 1:
            return base
        if _is_lit(base):
            return Lit(base.value**e.n)
        return Pow(base, e.n)
    if isinstance(e, Call):
        arg = simplify(e.arg)
        if _is_lit(arg):
            try:
                return Lit(_MATH_FN[e.fn](arg.value))
            except ValueError:
                pass
        return Call(e.fn, arg)
    a = simplify(e.a)
    b = simplify(e.b)
    if isinstance(e, Add):
        if _is_lit(a) and _is_lit(b):
            return Lit(a.value + b.value)
        if _is_lit(a, 0.0):
            return b
        if _is_lit(b, 0.0):
            return a
        return Add(a, b)
    if isinstance(e, Sub):
        if _is_lit(a) and _is_lit(b):
            return Lit(a.value - b.value)
        if _is_lit(b, 0.0):
            return a
        if _is_lit(a, 0.0):
            return simplify(Neg(b))
        return Sub(a, b)
    if isinstance(e, Mul):
        if _is_lit(a) and _is_lit(b):
            return Lit(a.value * b.value)
        if _is_lit(a, 0.0) or _is_lit(b, 0.0):
            return ZERO
        if _is_lit(a, 1.0):
            return b
        if _is_lit(b, 1.0):
            return a
        return Mul(a, b)
    if isinstance(e, Div):
        if _is_lit(a, 0.0):
            return ZERO
        if _is_lit(b, 1.0):
            return a
        if _is_lit(a) and _is_lit(b) and b.value != 0.0:
            return Lit(a.value / b.value)
        return Div(a, b)
    raise TypeError(f"not an Expr: {e!r}")


_DIFF_FN = {
    "sin": lambda a, da: Mul(Call("cos", a), da),
    "cos": lambda a, da: Neg(Mul(Call("sin", a), da)),
    "sinh": lambda a, da: Mul(Call("cosh", a), da),
    "cosh": lambda a, da: Mul(Call("sinh", a), da),
    "exp": lambda a, da: Mul(Call("exp", a), da),
    "log": lambda a, da: Div(da, a),
}


def diff(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to s (simplified)."""
    return simplify(_diff(e))


def _diff(e: Expr) -> Expr:
    if isinstance(e, (Lit, Param)):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return Add(_diff(e.a), _diff(e.b))
    if isinstance(e, Sub):
        return Sub(_diff(e.a), _diff(e.b))
    if isinstance(e, Mul):
        return Add(Mul(_diff(e.a), e.b), Mul(e.a, _diff(e.b)))
    if isinstance(e, Div):
        return Div(Sub(Mul(_diff(e.a), e.b), Mul(e.a, _diff(e.b))), Pow(e.b, 2))
    if isinstance(e, Neg):
        return Neg(_diff(e.a))
    if isinstance(e, Pow):
        return Mul(Mul(Lit(float(e.n)), Pow(e.base, e.n - 1)), _diff(e.base))
    if isinstance(e, Call):
        return _DIFF_FN[e.fn](e.arg, _diff(e.arg))
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_scalar(e: Expr, s: float, params: Optional[Mapping[str, float]] = None) -> float:
    """Tree-walking reference evaluator with precise error locations."""
    params = params or {}
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        return float(s)
    if isinstance(e, Param):
        try:
            return float(params[e.name])
        except KeyError:
            raise UnboundParameter(f"parameter {e.name!r} is unbound", format_expr(e)) from None
    if isinstance(e, Add):
        return eval_scalar(e.a, s, params) + eval_scalar(e.b, s, params)
    if isinstance(e, Sub):
        return eval_scalar(e.a, s, params) - eval_scalar(e.b, s, params)
    if isinstance(e, Mul):
        return eval_scalar(e.a, s, params) * eval_scalar(e.b, s, params)
    if isinstance(e, Div):
        den = eval_scalar(e.b, s, params)
        if den == 0.0:
            raise EvalError(f"division by zero at s={s:.6g}", format_expr(e))
        return eval_scalar(e.a, s, params) / den
    if isinstance(e, Neg):
        return -eval_scalar(e.a, s, params)
    if isinstance(e, Pow):
        base = eval_scalar(e.base, s, params)
        if base == 0.0 and e.n < 0:
            raise EvalError(f"zero base with negative exponent at s={s:.6g}", format_expr(e))
        return base**e.n
    if isinstance(e, Call):
        arg = eval_scalar(e.arg, s, params)
        if e.fn == "log" and arg <= 0.0:
            raise EvalError(f"log of non-positive value {arg:.6g} at s={s:.6g}", format_expr(e))
        try:
            return _MATH_FN[e.fn](arg)
        except (ValueError, OverflowError) as exc:
            raise EvalError(f"{exc} at s={s:.6g}", format_expr(e)) from exc
    raise TypeError(f"not an Expr: {e!r}")


def eval_jet(
    e: Expr,
    s0: float,
    order: int = DEFAULT_JET_ORDER,
    params: Optional[Mapping[str, float]] = None,
) -> Jet:
    """Taylor jet of e at s0: coefficient k is the k-th derivative over k!."""
    params = params or {}
    if isinstance(e, Lit):
        return Jet.constant(e.value, order)
    if isinstance(e, Var):
        return Jet.variable(float(s0), order)
    if isinstance(e, Param):
        try:
            return Jet.constant(float(params[e.name]), order)
        except KeyError:
            raise UnboundParameter(f"parameter {e.name!r} is unbound", format_expr(e)) from None
    if isinstance(e, Add):
        return eval_jet(e.a, s0, order, params) + eval_jet(e.b, s0, order, params)
    if isinstance(e, Sub):
        return eval_jet(e.a, s0, order, params) - eval_jet(e.b, s0, order, params)
    if isinstance(e, Mul):
        return eval_jet(e.a, s0, order, params) * eval_jet(e.b, s0, order, params)
    if isinstance(e, Div):
        num = eval_jet(e.a, s0, order, params)
        den = eval_jet(e.b, s0, order, params)
        if den.value == 0.0:
            raise EvalError(f"division by zero at s={s0:.6g}", format_expr(e))
        return num / den
    if isinstance(e, Neg):
        return -eval_jet(e.a, s0, order, params)
    if isinstance(e, Pow):
        base = eval_jet(e.base, s0, order, params)
        if base.value == 0.0 and e.n < 0:
            raise EvalError(f"zero base with negative exponent at s={s0:.6g}", format_expr(e))
        return base**e.n
    if isinstance(e, Call):
        arg = eval_jet(e.arg, s0, order, params)
        if e.fn == "log" and arg.value <= 0.0:
            raise EvalError(
                f"log of non-positive value {arg.value:.6g} at s={s0:.6g}", format_expr(e)
            )
        return getattr(arg, e.fn)()
    raise TypeError(f"not an Expr: {e!r}")


def eval_split(e: Expr, z: SplitScalar, params: Optional[Mapping[str, float]] = None) -> SplitScalar:
    """Split-holomorphic extension of e, via the null-coordinate recipe.

    Equals extend_analytic applied to the real function defined by e;
    raises DomainError when u(z) or v(z) leaves the expression's domain.
    """
    params = params or {}

    def F(x: float) -> float:
        try:
            return eval_scalar(e, x, params)
        except EvalError as exc:
            raise DomainError(str(exc)) from exc

    return extend_analytic(F, z)


def eval_split_direct(
    e: Expr, z: SplitScalar, params: Optional[Mapping[str, float]] = None
) -> SplitScalar:
    """Direct AST evaluation over SplitScalar arithmetic.

    Test oracle for eval_split: the two must agree wherever division stays
    off the null cone.  Function nodes extend through extend_analytic.
    """
    params = params or {}
    if isinstance(e, Lit):
        return SplitScalar(e.value)
    if isinstance(e, Var):
        return z
    if isinstance(e, Param):
        try:
            return SplitScalar(float(params[e.name]))
        except KeyError:
            raise UnboundParameter(f"parameter {e.name!r} is unbound", format_expr(e)) from None
    if isinstance(e, Add):
        return eval_split_direct(e.a, z, params) + eval_split_direct(e.b, z, params)
    if isinstance(e, Sub):
        return eval_split_direct(e.a, z, params) - eval_split_direct(e.b, z, params)
    if isinstance(e, Mul):
        return eval_split_direct(e.a, z, params) * eval_split_direct(e.b, z, params)
    if isinstance(e, Div):
        return eval_split_direct(e.a, z, params) / eval_split_direct(e.b, z, params)
    if isinstance(e, Neg):
        return -eval_split_direct(e.a, z, params)
    if isinstance(e, Pow):
        return eval_split_direct(e.base, z, params) ** e.n
    if isinstance(e, Call):
        arg = eval_split_direct(e.arg, z, params)
        return extend_analytic(lambda x: _MATH_FN[e.fn](x), arg)
    raise TypeError(f"not an Expr: {e!r}")


def as_expr(obj) -> Expr:
    """Coerce a string, number, or Expr to an Expr."""
    if isinstance(obj, Expr):
        return obj
    if isinstance(obj, str):
        return parse(obj)
    if isinstance(obj, (int, float)):
        return Lit(float(obj))
    raise TypeError(f"cannot interpret {obj!r} as an expression")


# ---------------------------------------------------------------------------
# Analytic space curves
# ---------------------------------------------------------------------------


@dataclass
class AnalyticCurve3:
    """Three component expressions, parameter bindings and a real interval.

    Treated as immutable after construction; tape compilation results are
    cached idempotently, so instances are safe to share across threads.
    """

    components: Tuple[Expr, Expr, Expr]
    params: Dict[str, float] = field(default_factory=dict)
    domain: Tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        self.components = tuple(as_expr(c) for c in self.components)
        if len(self.components) != 3:
            raise ValueError("a space curve needs exactly 3 components")
        self.params = {k: float(v) for k, v in self.params.items()}
        lo, hi = self.domain
        if not (lo < hi):
            raise ValueError(f"empty domain [{lo}, {hi}]")
        self.domain = (float(lo), float(hi))
        unbound = set().union(*(free_params(c) for c in self.components)) - set(self.params)
        if unbound:
            raise UnboundParameter(f"unbound parameters: {sorted(unbound)}")
        self._tapes = None
        self._derivative = None

    @classmethod
    def from_strings(cls, exprs: Iterable[str], params=None, domain=(0.0, 1.0)):
        return cls(tuple(as_expr(e) for e in exprs), dict(params or {}), tuple(domain))

    def _tape(self):
        if self._tapes is None:
            from . import tape

            self._tapes = tuple(tape.compile_expr(c, self.params) for c in self.components)
        return self._tapes

    def values(self, s, strict: bool = True) -> np.ndarray:
        """Evaluate all components; returns shape s.shape + (3,).

        strict=False returns NaN entries instead of raising on points
        outside the expressions' domain.
        """
        from . import kernels

        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        cols = [kernels.eval_values(t, flat, strict=strict) for t in self._tape()]
        out = np.stack(cols, axis=-1)
        return out.reshape(s.shape + (3,))

    def jets(self, s, order: int = DEFAULT_JET_ORDER) -> np.ndarray:
        """Taylor coefficients; returns shape (order+1,) + s.shape + (3,)."""
        from . import kernels

        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        cols = [kernels.eval_jets(t, flat, order) for t in self._tape()]
        out = np.stack(cols, axis=-1)
        return out.reshape((order + 1,) + s.shape + (3,))

    def derivative(self) -> "AnalyticCurve3":
        if self._derivative is None:
            self._derivative = AnalyticCurve3(
                tuple(diff(c) for c in self.components), dict(self.params), self.domain
            )
        return self._derivative

    def eval_split(self, z: SplitScalar) -> SplitVec3:
        parts = [eval_split(c, z, self.params) for c in self.components]
        return SplitVec3(*parts)

    def sample(self, n: int = 257) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], n)

    def min_speed(self, n: int = 513) -> float:
        """min |alpha'| on a dense grid; > 0 certifies regularity numerically."""
        d = self.derivative().values(self.sample(n))
        return float(np.min(np.linalg.norm(d, axis=-1)))

    def assert_regular(self, n: int = 513, tol: float = 1e-12):
        speed = self.min_speed(n)
        if not speed > tol:
            raise EvalError(f"curve is not regular: min |alpha'| = {speed:.3e}")
