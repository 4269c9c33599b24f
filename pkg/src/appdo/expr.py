"""Coefficient functions of xi: a small expression language.

Expressions are immutable trees built through simplifying constructors,
so two trees describing the same formula in the same way compare equal.
Shifts of the argument (``xi -> xi + embed(lam)``) are recorded exactly on
the variable nodes, which keeps repeated shifting and conjugation
reversible at the structural level.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' exponent)?
    base   := number | 'pi' | 'i' | var | func '(' expr ')' | '(' expr ')'
    var    := 'xi' | 'xi1' .. 'xi9'
    func   := 'sin' | 'cos' | 'exp' | 'atan' | 'jbracket' | 'conj'

``jbracket(xi)`` is (1 + |xi|^2)^(1/2). Exponents are integers or
half-integers, optionally signed and parenthesized.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DerivativeOrderError, DimensionError, DomainError, ExprSyntaxError, PoleError

MAX_DERIVATIVE_ORDER = 6
FUNCTIONS = ("sin", "cos", "exp", "atan", "jbracket", "conj")


# ---------------------------------------------------------------- nodes


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    value: complex


@dataclass(frozen=True)
class Var(Node):
    """Coordinate ``index`` of the argument, shifted by ``embed(shift) + extra``."""

    index: int
    shift: tuple = ()
    extra: float = 0.0
    offset: float = field(default=0.0, compare=False)

    @property
    def shifted(self) -> bool:
        return bool(self.shift) or self.extra != 0.0


@dataclass(frozen=True)
class Add(Node):
    args: tuple


@dataclass(frozen=True)
class Mul(Node):
    args: tuple


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Fraction


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node


@dataclass(frozen=True)
class JBracket(Node):
    """(1 + sum_k args_k^2)^(1/2)."""

    args: tuple


@dataclass(frozen=True)
class Conj(Node):
    """Complex conjugate, kept only where it does not commute with the child."""

    arg: Node


ZERO = Const(0j)
ONE = Const(1 + 0j)


# ------------------------------------------------------ simplifying constructors


def const(value) -> Const:
    return Const(complex(value))


def _is_real_const(n: Node) -> bool:
    return isinstance(n, Const) and n.value.imag == 0


def add(*args: Node) -> Node:
    flat = []
    for a in args:
        if isinstance(a, Add):
            flat.extend(a.args)
        else:
            flat.append(a)
    total = 0j
    rest = []
    for a in flat:
        if isinstance(a, Const):
            total += a.value
        else:
            rest.append(a)
    rest = _collect_terms(rest)
    if not rest:
        return Const(total)
    # a lone variable plus a real constant is folded into a shifted variable
    if len(rest) == 1 and isinstance(rest[0], Var) and total != 0 and total.imag == 0:
        v = rest[0]
        return Var(v.index, v.shift, v.extra + total.real, v.offset + total.real)
    if total != 0:
        rest.append(Const(total))
    if len(rest) == 1:
        return rest[0]
    return Add(tuple(rest))


def _split_coef(n: Node) -> tuple:
    if isinstance(n, Mul) and isinstance(n.args[0], Const):
        body = n.args[1:]
        return n.args[0].value, body[0] if len(body) == 1 else Mul(body)
    return 1 + 0j, n


def _collect_terms(terms: list) -> list:
    """Merge terms that differ only by a constant factor, keeping first-appearance order."""
    coefs: dict = {}
    order = []
    for t in terms:
        c, body = _split_coef(t)
        if body not in coefs:
            coefs[body] = 0j
            order.append(body)
        coefs[body] += c
    return [mul(Const(coefs[b]), b) for b in order if coefs[b] != 0]


def mul(*args: Node) -> Node:
    flat = []
    for a in args:
        if isinstance(a, Mul):
            flat.extend(a.args)
        else:
            flat.append(a)
    coef = 1 + 0j
    rest = []
    for a in flat:
        if isinstance(a, Const):
            coef *= a.value
        else:
            rest.append(a)
    if coef == 0:
        return ZERO
    rest = _merge_powers(rest)
    if any(isinstance(a, Const) for a in rest):
        return mul(Const(coef), *rest)
    if not rest:
        return Const(coef)
    if coef != 1:
        rest.insert(0, Const(coef))
    if len(rest) == 1:
        return rest[0]
    return Mul(tuple(rest))


def _merge_powers(factors: list) -> list:
    """Collect repeated bases into one power, keeping first-appearance order.

    Exponents add freely for integer powers and for brackets, which are
    positive; other half-integer powers are left apart.
    """
    groups: dict = {}
    order = []
    for a in factors:
        base, p = (a.base, a.exponent) if isinstance(a, Pow) else (a, Fraction(1))
        if base not in groups:
            groups[base] = []
            order.append(base)
        groups[base].append(p)
    out = []
    for base in order:
        ps = groups[base]
        if len(ps) == 1:
            out.append(base if ps[0] == 1 else Pow(base, ps[0]))
        elif isinstance(base, JBracket) or all(p.denominator == 1 for p in ps):
            total = sum(ps, Fraction(0))
            if total != 0:
                out.append(power(base, total))
        else:
            out.extend(base if p == 1 else Pow(base, p) for p in ps)
    return out


def neg(a: Node) -> Node:
    return mul(Const(-1 + 0j), a)


def sub(a: Node, b: Node) -> Node:
    return add(a, neg(b))


def _check_exponent(p: Fraction) -> Fraction:
    p = Fraction(p)
    if p.denominator not in (1, 2):
        raise ExprSyntaxError(f"exponent {p} is neither an integer nor a half-integer")
    return p


def _const_pow(c: complex, p: Fraction) -> complex:
    if p < 0 and c == 0:
        raise PoleError("constant zero raised to a negative power")
    if p.denominator == 1:
        return c ** int(p)
    root = cmath.sqrt(complex(c.real, c.imag + 0.0) if c.imag == 0 else c)
    return root ** int(p.numerator)


def power(base: Node, p) -> Node:
    p = _check_exponent(p)
    if p == 0:
        return ONE
    if p == 1:
        return base
    if isinstance(base, Const):
        return Const(_const_pow(base.value, p))
    if isinstance(base, Pow) and p.denominator == 1:
        return power(base.base, base.exponent * p)
    return Pow(base, p)


def func(name: str, arg: Node) -> Node:
    if name == "conj":
        return conj(arg)
    if name == "jbracket":
        return jbracket((arg,))
    if name not in ("sin", "cos", "exp", "atan"):
        raise ExprSyntaxError(f"unknown function {name!r}")
    if isinstance(arg, Const):
        try:
            return Const(getattr(cmath, name)(arg.value))
        except ValueError:
            raise PoleError(f"{name} is singular at {arg.value}") from None
        except OverflowError:
            raise DomainError(f"{name}({arg.value}) overflows") from None
    return Func(name, arg)


def jbracket(args) -> Node:
    args = tuple(args)
    if all(isinstance(a, Const) for a in args):
        return Const(cmath.sqrt(1 + sum(a.value**2 for a in args)))
    return JBracket(args)


def is_real(n: Node) -> bool:
    """True when the node is real-valued for every real argument."""
    if isinstance(n, Const):
        return n.value.imag == 0
    if isinstance(n, Var):
        return True
    if isinstance(n, (Add, Mul)):
        return all(is_real(a) for a in n.args)
    if isinstance(n, Pow):
        if n.exponent.denominator == 1:
            return is_real(n.base)
        return isinstance(n.base, JBracket) and is_real(n.base)
    if isinstance(n, Func):
        return is_real(n.arg)
    if isinstance(n, JBracket):
        return all(is_real(a) for a in n.args)
    return False


def conj(n: Node) -> Node:
    if isinstance(n, Conj):
        return n.arg
    if is_real(n):
        return n
    if isinstance(n, Const):
        return Const(n.value.conjugate())
    if isinstance(n, Add):
        return add(*(conj(a) for a in n.args))
    if isinstance(n, Mul):
        return mul(*(conj(a) for a in n.args))
    if isinstance(n, Pow) and n.exponent.denominator == 1:
        return power(conj(n.base), n.exponent)
    if isinstance(n, Func) and n.name in ("sin", "cos", "exp"):
        # entire with real Taylor coefficients
        return func(n.name, conj(n.arg))
    return Conj(n)


def shift(n: Node, coeffs=None, real=None, gens_matrix=None) -> Node:
    """Substitute ``xi -> xi + embed(coeffs) + real`` throughout the tree.

    ``coeffs`` is an exact rational tuple over the generators whose rows
    are ``gens_matrix``; ``real`` is an extra real vector.
    """
    if isinstance(n, Const):
        return n
    if isinstance(n, Var):
        new_shift = n.shift
        if coeffs is not None and any(coeffs):
            base = n.shift or (Fraction(0),) * len(coeffs)
            summed = tuple(a + Fraction(b) for a, b in zip(base, coeffs))
            new_shift = summed if any(summed) else ()
        extra = n.extra
        if real is not None:
            extra = extra + float(real[n.index])
        offset = extra
        if new_shift:
            if gens_matrix is None:
                raise DimensionError("an exact shift needs the generator matrix")
            offset += float(np.array([float(c) for c in new_shift]) @ gens_matrix[:, n.index])
        return Var(n.index, new_shift, extra, offset)
    if isinstance(n, Add):
        return add(*(shift(a, coeffs, real, gens_matrix) for a in n.args))
    if isinstance(n, Mul):
        return mul(*(shift(a, coeffs, real, gens_matrix) for a in n.args))
    if isinstance(n, Pow):
        return power(shift(n.base, coeffs, real, gens_matrix), n.exponent)
    if isinstance(n, Func):
        return func(n.name, shift(n.arg, coeffs, real, gens_matrix))
    if isinstance(n, JBracket):
        return jbracket(shift(a, coeffs, real, gens_matrix) for a in n.args)
    if isinstance(n, Conj):
        return conj(shift(n.arg, coeffs, real, gens_matrix))
    raise TypeError(f"unknown node {n!r}")


def variables(n: Node) -> set:
    if isinstance(n, Var):
        return {n.index}
    if isinstance(n, Const):
        return set()
    if isinstance(n, (Add, Mul, JBracket)):
        out = set()
        for a in n.args:
            out |= variables(a)
        return out
    if isinstance(n, Pow):
        return variables(n.base)
    if isinstance(n, (Func, Conj)):
        return variables(n.arg)
    raise TypeError(f"unknown node {n!r}")


# ------------------------------------------------------------ derivative


def diff(n: Node, i: int) -> Node:
    """Partial derivative with respect to coordinate ``i``."""
    if isinstance(n, Const):
        return ZERO
    if isinstance(n, Var):
        return ONE if n.index == i else ZERO
    if isinstance(n, Add):
        return add(*(diff(a, i) for a in n.args))
    if isinstance(n, Mul):
        terms = []
        for k, a in enumerate(n.args):
            da = diff(a, i)
            if da == ZERO:
                continue
            terms.append(mul(*n.args[:k], da, *n.args[k + 1:]))
        return add(*terms) if terms else ZERO
    if isinstance(n, Pow):
        db = diff(n.base, i)
        if db == ZERO:
            return ZERO
        return mul(Const(complex(n.exponent)), power(n.base, n.exponent - 1), db)
    if isinstance(n, Func):
        du = diff(n.arg, i)
        if du == ZERO:
            return ZERO
        u = n.arg
        if n.name == "sin":
            outer = func("cos", u)
        elif n.name == "cos":
            outer = neg(func("sin", u))
        elif n.name == "exp":
            outer = n
        else:
            outer = power(add(ONE, power(u, 2)), -1)
        return mul(outer, du)
    if isinstance(n, JBracket):
        inner = add(*(mul(a, diff(a, i)) for a in n.args))
        if inner == ZERO:
            return ZERO
        return mul(inner, power(n, -1))
    if isinstance(n, Conj):
        return conj(diff(n.arg, i))
    raise TypeError(f"unknown node {n!r}")


# ------------------------------------------------------------ evaluation


def _positive_zero_imag(z: np.ndarray) -> np.ndarray:
    # keeps the principal square root on the branch of +0j imaginary parts
    return np.where(z.imag == 0, z.real + 0j, z)


def evaluate(n: Node, xi: np.ndarray) -> np.ndarray:
    """Evaluate at the rows of ``xi`` (shape ``(npts, d)``); complex result."""
    npts = xi.shape[0]
    if isinstance(n, Const):
        return np.full(npts, n.value, dtype=complex)
    if isinstance(n, Var):
        return (xi[:, n.index] + n.offset).astype(complex)
    if isinstance(n, Add):
        out = evaluate(n.args[0], xi)
        for a in n.args[1:]:
            out = out + evaluate(a, xi)
        return out
    if isinstance(n, Mul):
        out = evaluate(n.args[0], xi)
        for a in n.args[1:]:
            out = out * evaluate(a, xi)
        return out
    if isinstance(n, Pow):
        b = evaluate(n.base, xi)
        p = n.exponent
        if p < 0:
            hit = np.flatnonzero(b == 0)
            if hit.size:
                pt = xi[hit[0]]
                raise PoleError(f"division by zero at xi = {pt.tolist()}", point=pt.tolist())
        if p.denominator == 2:
            b = np.sqrt(_positive_zero_imag(b))
            return b ** int(p.numerator)
        return b ** int(p)
    if isinstance(n, Func):
        u = evaluate(n.arg, xi)
        return getattr(np, "arctan" if n.name == "atan" else n.name)(u)
    if isinstance(n, JBracket):
        s = np.ones(npts, dtype=complex)
        for a in n.args:
            s = s + evaluate(a, xi) ** 2
        return np.sqrt(_positive_zero_imag(s))
    if isinstance(n, Conj):
        return np.conj(evaluate(n.arg, xi))
    raise TypeError(f"unknown node {n!r}")


# -------------------------------------------------------------- printing


def _fmt_real(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_fraction(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


class _Printer:
    def __init__(self, dim: int):
        self.dim = dim

    def var_name(self, index: int) -> str:
        return "xi" if self.dim == 1 else f"xi{index + 1}"

    def const_terms(self, c: complex):
        """Signed textual terms of a constant, e.g. [(+1, '2'), (-1, '3*i')]."""
        out = []
        if c.real != 0 or c.imag == 0:
            out.append((1 if c.real >= 0 else -1, _fmt_real(abs(c.real))))
        if c.imag != 0:
            mag = abs(c.imag)
            out.append((1 if c.imag > 0 else -1, "i" if mag == 1 else f"{_fmt_real(mag)}*i"))
        return out

    def join(self, signed) -> str:
        text = ""
        for k, (sign, body) in enumerate(signed):
            if k == 0:
                text = body if sign > 0 else "-" + body
            else:
                text += (" + " if sign > 0 else " - ") + body
        return text

    def signed_terms(self, n: Node):
        if isinstance(n, Add):
            out = []
            for a in n.args:
                out.extend(self.signed_terms(a))
            return out
        if isinstance(n, Const):
            return self.const_terms(n.value)
        if isinstance(n, Mul) and _is_real_const(n.args[0]) and n.args[0].value.real < 0:
            rest = mul(Const(-n.args[0].value), *n.args[1:])
            return [(-1, self.term(rest))]
        return [(1, self.term(n))]

    def expr(self, n: Node) -> str:
        return self.join(self.signed_terms(n))

    def term(self, n: Node) -> str:
        if isinstance(n, Mul):
            parts = []
            for k, a in enumerate(n.args):
                if k == 0 and isinstance(a, Const):
                    terms = self.const_terms(a.value)
                    if len(terms) == 1 and terms[0][0] > 0:
                        parts.append(terms[0][1])
                    else:
                        parts.append("(" + self.join(terms) + ")")
                else:
                    parts.append(self.factor(a))
            return "*".join(parts)
        return self.factor(n)

    def factor(self, n: Node) -> str:
        if isinstance(n, Pow):
            base = self.atom(n.base)
            p = n.exponent
            ptxt = _fmt_fraction(p) if (p.denominator == 1 and p > 0) else f"({_fmt_fraction(p)})"
            return f"{base}^{ptxt}"
        return self.atom(n)

    def atom(self, n: Node) -> str:
        if isinstance(n, Var):
            name = self.var_name(n.index)
            if not n.shifted:
                return name
            off = n.offset
            sign = "+" if off >= 0 else "-"
            return f"({name} {sign} {_fmt_real(abs(off))})"
        if isinstance(n, Func):
            return f"{n.name}({self.expr(n.arg)})"
        if isinstance(n, Conj):
            return f"conj({self.expr(n.arg)})"
        if isinstance(n, JBracket):
            if len(n.args) == 1 and self.dim == 1:
                return f"jbracket({self.expr(n.args[0])})"
            if n.args == tuple(Var(k) for k in range(self.dim)):
                return "jbracket(xi)"
            if len(n.args) == 1:
                return f"jbracket({self.expr(n.args[0])})"
            inner = " + ".join(self.factor(power(a, 2)) for a in n.args)
            return f"(1 + {inner})^(1/2)"
        if isinstance(n, Const):
            terms = self.const_terms(n.value)
            if len(terms) == 1 and terms[0][0] > 0:
                return terms[0][1]
            return "(" + self.join(terms) + ")"
        return "(" + self.expr(n) + ")"


def to_text(n: Node, dim: int) -> str:
    return _Printer(dim).expr(n)


# --------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)
_VAR = re.compile(r"xi([1-9]?)$")


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _tokenize(self, text):
        out = []
        i = 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(text, i)
            if m is None or m.end() == i:
                raise ExprSyntaxError(f"unexpected character {text[i]!r}", self.text, i)
            start = m.start(m.lastgroup)
            out.append((m.lastgroup, m.group(m.lastgroup), start))
            i = m.end()
        out.append(("end", "", len(text)))
        return out

    def peek(self, offset=0):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        kind, val, where = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", self.text, where)

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, self.text, tok[2])

    def parse(self) -> Node:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        node = self.expr()
        kind, val, where = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", self.text, where)
        return node

    def expr(self) -> Node:
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        first = self.term()
        terms = [first if sign > 0 else neg(first)]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else neg(t))
        return add(*terms)

    def term(self) -> Node:
        factors = [self.factor()]
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            f = self.factor()
            factors.append(f if op == "*" else power(f, -1))
        return mul(*factors)

    def factor(self) -> Node:
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            p = self.exponent()
            try:
                return power(base, p)
            except ExprSyntaxError as exc:
                raise ExprSyntaxError(str(exc.args[0]).split(":")[0], self.text, tok[2]) from None
        return base

    def exponent(self) -> Fraction:
        paren = self.peek()[1] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        kind, val, where = self.take()
        if kind != "num":
            raise ExprSyntaxError("exponent must be a signed rational", self.text, where)
        p = Fraction(val)
        if self.peek()[1] == "/":
            self.take()
            kind, den, where = self.take()
            if kind != "num":
                raise ExprSyntaxError("exponent must be a signed rational", self.text, where)
            p = p / Fraction(den)
        if paren:
            self.expect(")")
        return sign * p

    def base(self) -> Node:
        kind, val, where = self.take()
        if kind == "num":
            return const(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val == "pi":
                return const(math.pi)
            if val == "i":
                return Const(1j)
            m = _VAR.match(val)
            if m:
                return self.variable(m.group(1), where)
            if val in FUNCTIONS:
                return self.call(val, where)
            raise ExprSyntaxError(f"unknown identifier {val!r}", self.text, where)
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", self.text, where)

    def variable(self, digit: str, where: int) -> Node:
        if digit == "":
            if self.dim != 1:
                raise ExprSyntaxError(
                    f"bare 'xi' is ambiguous in dimension {self.dim}; use xi1..xi{self.dim}",
                    self.text, where)
            return Var(0)
        k = int(digit)
        if k > self.dim:
            raise ExprSyntaxError(f"variable xi{k} exceeds dimension {self.dim}", self.text, where)
        return Var(k - 1)

    def call(self, name: str, where: int) -> Node:
        if self.peek()[1] != "(":
            raise ExprSyntaxError(f"function {name!r} needs one parenthesized argument", self.text, where)
        self.take()
        if (name == "jbracket" and self.dim > 1 and self.peek()[1] == "xi"
                and self.peek(1)[1] == ")"):
            self.take()
            self.take()
            return jbracket(Var(k) for k in range(self.dim))
        arg = self.expr()
        if self.peek()[1] == ",":
            raise ExprSyntaxError(f"function {name!r} takes exactly one argument", self.text, self.peek()[2])
        kind, val, pos = self.peek()
        if val != ")":
            if kind == "end":
                raise ExprSyntaxError(f"missing ')' after argument of {name!r}", self.text, pos)
            raise ExprSyntaxError(f"function {name!r} takes exactly one argument", self.text, pos)
        self.take()
        return func(name, arg)


# ----------------------------------------------------------------- facade


class CoeffFn:
    """A coefficient function ``R^dim -> C`` backed by an expression tree."""

    __slots__ = ("node", "dim", "_hash")

    def __init__(self, node: Node, dim: int):
        if dim < 1:
            raise DimensionError("dimension must be positive")
        bad = [k for k in variables(node) if k >= dim]
        if bad:
            raise DimensionError(f"variable index {bad[0] + 1} exceeds dimension {dim}")
        object.__setattr__(self, "node", node)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_hash", hash((node, dim)))

    def __setattr__(self, name, value):
        raise AttributeError("CoeffFn is immutable")

    @classmethod
    def parse(cls, text: str, dim: int = 1) -> "CoeffFn":
        return cls(_Parser(text, dim).parse(), dim)

    @classmethod
    def constant(cls, value, dim: int = 1) -> "CoeffFn":
        return cls(const(value), dim)

    def __eq__(self, other):
        if not isinstance(other, CoeffFn):
            return NotImplemented
        return self.dim == other.dim and self.node == other.node

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"CoeffFn({self.text()!r})"

    def text(self) -> str:
        return to_text(self.node, self.dim)

    def is_zero(self) -> bool:
        return self.node == ZERO

    def is_constant(self) -> bool:
        return not variables(self.node)

    def _points(self, xi) -> np.ndarray:
        pts = np.asarray(xi, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dim == 1 else pts.reshape(1, -1)
        if pts.shape[1] != self.dim:
            raise DimensionError(f"points of dimension {pts.shape[1]} for a function of {self.dim} variables")
        return pts

    def __call__(self, xi):
        """Evaluate at one point (scalar result) or at many points (array)."""
        arr = np.asarray(xi, dtype=float)
        single = arr.ndim == 0 or (arr.ndim == 1 and self.dim > 1 and arr.shape[0] == self.dim)
        vals = evaluate(self.node, self._points(arr))
        return complex(vals[0]) if single else vals

    def evaluate(self, points) -> np.ndarray:
        """Vectorized evaluation; ``points`` has shape ``(n, dim)`` (or ``(n,)`` when dim is 1)."""
        return evaluate(self.node, self._points(points))

    def derivative(self, alpha) -> "CoeffFn":
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim:
            raise DimensionError(f"multi-index of length {len(alpha)} for dimension {self.dim}")
        if sum(alpha) > MAX_DERIVATIVE_ORDER:
            raise DerivativeOrderError(
                f"derivative of order {sum(alpha)} exceeds the symbolic limit {MAX_DERIVATIVE_ORDER}")
        node = self.node
        for i, k in enumerate(alpha):
            for _ in range(k):
                node = diff(node, i)
        return CoeffFn(node, self.dim)

    def conj(self) -> "CoeffFn":
        return CoeffFn(conj(self.node), self.dim)

    def shifted(self, coeffs=None, real=None, gens_matrix=None) -> "CoeffFn":
        """``xi -> f(xi + embed(coeffs) + real)``."""
        if real is not None:
            real = np.asarray(real, dtype=float).reshape(-1)
            if real.shape[0] != self.dim:
                raise DimensionError("shift vector does not match the dimension")
            if not np.any(real):
                real = None
        if coeffs is not None and not any(coeffs):
            coeffs = None
        if coeffs is None and real is None:
            return self
        return CoeffFn(shift(self.node, coeffs, real, gens_matrix), self.dim)

    def __add__(self, other):
        other = _lift(other, self.dim)
        return CoeffFn(add(self.node, other.node), self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other, self.dim)
        return CoeffFn(sub(self.node, other.node), self.dim)

    def __rsub__(self, other):
        return _lift(other, self.dim) - self

    def __mul__(self, other):
        other = _lift(other, self.dim)
        return CoeffFn(mul(self.node, other.node), self.dim)

    __rmul__ = __mul__

    def __neg__(self):
        return CoeffFn(neg(self.node), self.dim)

    def __pow__(self, p):
        return CoeffFn(power(self.node, Fraction(p)), self.dim)


def _lift(value, dim) -> CoeffFn:
    if isinstance(value, CoeffFn):
        if value.dim != dim:
            raise DimensionError("coefficient functions of different dimensions")
        return value
    return CoeffFn.constant(value, dim)


def parse_coeff_expr(text: str, dim: int = 1) -> CoeffFn:
    """Parse ``text`` into a coefficient function of ``dim`` variables."""
    return CoeffFn.parse(text, dim)
