"""Meridian profile expressions: parsing and second-order jet evaluation.

Grammar (whitespace is insignificant)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = primary [ "^" unary ] ;                 (* right-associative *)
    primary = number | "u" | "pi" | "e"
            | func "(" expr ")" | "(" expr ")" ;
    number  = digits [ "." [digits] ] [ exponent ] | "." digits [ exponent ] ;
    func    = "sin" | "cos" | "tan" | "sec" | "sinh" | "cosh" | "tanh"
            | "exp" | "log" | "sqrt" | "arcsin" | "arctan" ;

There is no implicit multiplication, so ``2u`` is rejected.

Evaluation never differentiates symbolically. Every node returns a
:class:`Jet2` ``(value, d/du, d^2/du^2)``; operators and functions combine
jets with the truncated Taylor (second-order chain/Leibniz) rules. ``u`` may
be a float or a numpy array.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ParseError, UnknownIdentifier

Number = Union[float, np.ndarray]

FUNCTIONS = frozenset(
    ["sin", "cos", "tan", "sec", "sinh", "cosh", "tanh",
     "exp", "log", "sqrt", "arcsin", "arctan"]
)
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLE = "u"


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float

    def sexpr(self):
        return format(self.value, ".17g")


@dataclass(frozen=True)
class Const:
    name: str

    @property
    def value(self):
        return CONSTANTS[self.name]

    def sexpr(self):
        return self.name


@dataclass(frozen=True)
class Var:
    def sexpr(self):
        return VARIABLE


@dataclass(frozen=True)
class Neg:
    arg: object

    def sexpr(self):
        return f"neg({self.arg.sexpr()})"


_BIN_NAMES = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def sexpr(self):
        return f"{_BIN_NAMES[self.op]}({self.left.sexpr()}, {self.right.sexpr()})"


@dataclass(frozen=True)
class Call:
    func: str
    arg: object

    def sexpr(self):
        return f"{self.func}({self.arg.sexpr()})"


def _has_var(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, (Neg, Call)):
        return _has_var(node.arg)
    return _has_var(node.left) or _has_var(node.right)


# --------------------------------------------------------------------------
# Tokenizer / parser
# --------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_PUNCT = "+-*/^()"


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "ident", one of _PUNCT, or "end"
    text: str
    offset: int


def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        off = len(text[:i].encode("utf-8"))
        m = _NUMBER_RE.match(text, i)
        if m:
            toks.append(_Tok("num", m.group(), off))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            toks.append(_Tok("ident", m.group(), off))
            i = m.end()
            continue
        if ch in _PUNCT:
            toks.append(_Tok(ch, ch, off))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", off,
                         {"number", "identifier", "(", "-"}, text)
    toks.append(_Tok("end", "", len(text.encode("utf-8"))))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def tok(self):
        return self.toks[self.pos]

    def _advance(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def _fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.offset, expected, self.text)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            self._fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self._advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self._advance().kind
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.kind == "-":
            self._advance()
            return Neg(self.unary())
        if self.tok.kind == "+":
            self._advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok.kind == "^":
            self._advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self._advance()
            return Num(float(t.text))
        if t.kind == "(":
            self._advance()
            node = self.expr()
            if self.tok.kind != ")":
                self._fail({")"})
            self._advance()
            return node
        if t.kind == "ident":
            name = t.text
            if name in FUNCTIONS:
                self._advance()
                if self.tok.kind != "(":
                    self._fail({"("})
                self._advance()
                arg = self.expr()
                if self.tok.kind != ")":
                    self._fail({")"})
                self._advance()
                return Call(name, arg)
            if name == VARIABLE:
                self._advance()
                return Var()
            if name in CONSTANTS:
                self._advance()
                return Const(name)
            raise UnknownIdentifier(f"unknown identifier {name!r}", t.offset,
                                    sorted(FUNCTIONS | set(CONSTANTS) | {VARIABLE}), self.text)
        self._fail({"number", "identifier", "(", "-"})


# --------------------------------------------------------------------------
# Jets
# --------------------------------------------------------------------------

class Jet2:
    """Value with first and second derivative with respect to ``u``.

    Fields may be floats or equally-shaped numpy arrays. Arithmetic follows the
    second-order truncated Taylor rules, so composing jets is exact to rounding.
    """

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v, d1=0.0, d2=0.0):
        self.v = v
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def const(cls, c):
        return cls(c, 0.0 * c, 0.0 * c) if isinstance(c, np.ndarray) else cls(c, 0.0, 0.0)

    @classmethod
    def variable(cls, u):
        if isinstance(u, np.ndarray):
            return cls(u, np.ones_like(u), np.zeros_like(u))
        return cls(u, 1.0, 0.0)

    def __iter__(self):
        yield self.v
        yield self.d1
        yield self.d2

    def __repr__(self):
        return f"Jet2(v={self.v!r}, d1={self.d1!r}, d2={self.d2!r})"

    @staticmethod
    def _lift(x):
        return x if isinstance(x, Jet2) else Jet2(x, 0.0, 0.0)

    def __add__(self, o):
        o = Jet2._lift(o)
        return Jet2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, o):
        o = Jet2._lift(o)
        return Jet2(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, o):
        return Jet2._lift(o) - self

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __mul__(self, o):
        o = Jet2._lift(o)
        return Jet2(self.v * o.v,
                    self.d1 * o.v + self.v * o.d1,
                    self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Jet2._lift(o)
        q = self.v / o.v
        q1 = (self.d1 - q * o.d1) / o.v
        q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v
        return Jet2(q, q1, q2)

    def __rtruediv__(self, o):
        return Jet2._lift(o) / self

    def chain(self, h0, h1, h2):
        """Compose an outer function with value/derivatives ``h0, h1, h2`` at ``self.v``."""
        return Jet2(h0, h1 * self.d1, h2 * self.d1 * self.d1 + h1 * self.d2)


# |cos u| for the double nearest pi/2 is ~6e-17; treat anything this small as the pole
_POLE_TOL = 1e-15


def _scalar_like(val, ref):
    return float(val) if not isinstance(ref, np.ndarray) else val


def _bad_u(u, mask):
    """First ``u`` where ``mask`` is true (scalar ``u`` passes straight through)."""
    if isinstance(u, np.ndarray):
        uu = np.broadcast_to(u, np.shape(mask))
        return float(uu[np.argmax(mask)])
    return u


class _Ctx:
    def __init__(self, u, strict):
        self.u = u
        self.strict = strict

    def check(self, ok, what):
        """Enforce a domain mask; returns the mask for non-strict masking."""
        ok = np.asarray(ok)
        if ok.all():
            return None
        if self.strict:
            raise DomainError(what, _bad_u(self.u, ~ok))
        return ok


def _masked(j: Jet2, ok):
    if ok is None:
        return j
    nan = np.nan
    return Jet2(np.where(ok, j.v, nan), np.where(ok, j.d1, nan), np.where(ok, j.d2, nan))


def _func_jet(name, a: Jet2, ctx: _Ctx) -> Jet2:
    x = a.v
    with np.errstate(all="ignore"):
        if name == "sin":
            s, c = np.sin(x), np.cos(x)
            return a.chain(s, c, -s)
        if name == "cos":
            s, c = np.sin(x), np.cos(x)
            return a.chain(c, -s, -c)
        if name == "tan":
            ok = ctx.check(np.abs(np.cos(x)) > _POLE_TOL, "tan pole (cos u = 0)")
            t = np.tan(x)
            sec2 = 1.0 + t * t
            return _masked(a.chain(t, sec2, 2.0 * t * sec2), ok)
        if name == "sec":
            c = np.cos(x)
            ok = ctx.check(np.abs(c) > _POLE_TOL, "sec pole (cos u = 0)")
            sc = 1.0 / c
            t = np.tan(x)
            return _masked(a.chain(sc, sc * t, sc * (t * t + sc * sc)), ok)
        if name == "sinh":
            sh, ch = np.sinh(x), np.cosh(x)
            return a.chain(sh, ch, sh)
        if name == "cosh":
            sh, ch = np.sinh(x), np.cosh(x)
            return a.chain(ch, sh, ch)
        if name == "tanh":
            t = np.tanh(x)
            s2 = 1.0 - t * t
            return a.chain(t, s2, -2.0 * t * s2)
        if name == "exp":
            ex = np.exp(x)
            return a.chain(ex, ex, ex)
        if name == "log":
            ok = ctx.check(x > 0, "log of non-positive argument")
            return _masked(a.chain(np.log(x), 1.0 / x, -1.0 / (x * x)), ok)
        if name == "sqrt":
            flat_zero = (x == 0) & (a.d1 == 0) & (a.d2 == 0)
            ok = ctx.check((x > 0) | flat_zero, "sqrt of negative argument or at a branch point")
            r = np.sqrt(x)
            # a constant zero argument has zero derivatives, whatever sqrt' does there
            h1 = np.where(flat_zero, 0.0, 0.5 / r)
            h2 = np.where(flat_zero, 0.0, -0.25 / (r * x))
            return _masked(a.chain(r, _scalar_like(h1, x), _scalar_like(h2, x)), ok)
        if name == "arcsin":
            ok = ctx.check(np.abs(x) < 1, "arcsin outside (-1, 1)")
            w = 1.0 - x * x
            return _masked(a.chain(np.arcsin(x), 1.0 / np.sqrt(w), x / (w * np.sqrt(w))), ok)
        if name == "arctan":
            w = 1.0 + x * x
            return a.chain(np.arctan(x), 1.0 / w, -2.0 * x / (w * w))
    raise AssertionError(name)  # pragma: no cover


def _is_const_jet(j: Jet2) -> bool:
    return bool(np.all(j.d1 == 0) and np.all(j.d2 == 0))


def _pow_jet(a: Jet2, b: Jet2, b_const: bool, ctx: _Ctx) -> Jet2:
    x = a.v
    with np.errstate(all="ignore"):
        if b_const:
            n = b.v
            n_scalar = float(np.ravel(n)[0]) if np.ndim(n) else float(n)
            if np.all(n == n_scalar) and float(n_scalar).is_integer():
                k = int(n_scalar)
                if k == 0:
                    one = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
                    return Jet2.const(one)
                if k == 1:
                    return a
                if k < 0:
                    ok = ctx.check(x != 0, "negative power of zero")
                else:
                    ok = None
                h0 = x ** k
                h1 = k * x ** (k - 1)
                h2 = k * (k - 1) * x ** (k - 2) if k != 2 else 2.0 + 0.0 * x
                return _masked(a.chain(h0, h1, h2), ok)
            # real exponent: base must be positive (zero allowed only when n >= 2)
            ok = ctx.check((x > 0) | ((x == 0) & (n >= 2)), "non-integer power of non-positive base")
            h0 = np.power(x, n)
            h1 = n * np.power(x, n - 1)
            h2 = n * (n - 1) * np.power(x, n - 2)
            return _masked(a.chain(h0, h1, h2), ok)
        ok = ctx.check(x > 0, "variable exponent needs a positive base")
        lg = _func_jet("log", _masked(a, ok) if ok is not None else a, _Ctx(ctx.u, False))
        return _masked(_func_jet("exp", b * lg, ctx), ok)


def _eval(node, u, ctx: _Ctx) -> Jet2:
    if isinstance(node, Var):
        return Jet2.variable(u)
    if isinstance(node, (Num, Const)):
        c = node.value
        if isinstance(u, np.ndarray):
            return Jet2(np.full_like(u, c), np.zeros_like(u), np.zeros_like(u))
        return Jet2(c, 0.0, 0.0)
    if isinstance(node, Neg):
        return -_eval(node.arg, u, ctx)
    if isinstance(node, Call):
        return _func_jet(node.func, _eval(node.arg, u, ctx), ctx)
    a = _eval(node.left, u, ctx)
    if node.op == "^":
        b = _eval(node.right, u, ctx)
        return _pow_jet(a, b, not _has_var(node.right) or _is_const_jet(b), ctx)
    b = _eval(node.right, u, ctx)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    ok = ctx.check(b.v != 0, "division by zero")
    with np.errstate(all="ignore"):
        return _masked(a / b, ok)


# --------------------------------------------------------------------------
# Public API
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileExpr:
    """Parsed closed-form profile ``f(u)`` or ``g(u)``; immutable."""

    text: str
    ast: object

    def jet(self, u, strict: bool = True) -> Jet2:
        """Jet at ``u``; with ``strict=False`` out-of-domain entries become NaN."""
        if isinstance(u, np.ndarray):
            u = u.astype(float, copy=False)
        else:
            u = float(u)
        j = _eval(self.ast, u, _Ctx(u, strict))
        if isinstance(u, np.ndarray):
            shape = u.shape
            j = Jet2(*(np.broadcast_to(np.asarray(x, dtype=float), shape) for x in j))
        else:
            j = Jet2(float(j.v), float(j.d1), float(j.d2))
        if strict:
            bad = ~(np.isfinite(j.v) & np.isfinite(j.d1) & np.isfinite(j.d2))
            if np.any(bad):
                raise DomainError("non-finite profile value or derivative", _bad_u(u, bad))
        return j

    def __call__(self, u):
        return self.jet(u).v

    def sexpr(self) -> str:
        return self.ast.sexpr()

    def __str__(self):
        return self.text


def parse_profile(text: str) -> ProfileExpr:
    """Parse ``text`` into a :class:`ProfileExpr`.

    Raises
    ------
    ParseError
        Malformed input; carries the byte offset and the expected-token set.
    UnknownIdentifier
        A name that is neither ``u``, a constant, nor a whitelisted function.
    """
    if not isinstance(text, str):
        raise TypeError("profile text must be a string")
    return ProfileExpr(text, _Parser(text).parse())


def eval_jet2(expr: ProfileExpr, u) -> Jet2:
    """Value, first and second derivative of ``expr`` at ``u``."""
    return expr.jet(u)
