"""Expression trees in one deformation parameter and exact Puiseux series.

Expressions cover Gaussian-rational literals, the deformation variable t,
named parameter symbols, field operations, rational powers and sqrt.  The
exact evaluation tier expands them as Laurent–Puiseux series whose
coefficients live in Q(i) extended by lazily adjoined square roots of
square-free integers; the numeric tier evaluates them with mpmath.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional

import mpmath

from .exactmath import ONE, ZERO, GaussianRational, grat

__all__ = [
    "NonExpandable",
    "TExpression",
    "TNum",
    "TImag",
    "TVar",
    "TSym",
    "TNeg",
    "TAdd",
    "TSub",
    "TMul",
    "TDiv",
    "TPow",
    "TSqrt",
    "parse_expression",
    "to_text",
    "expression_symbols",
    "collect_sqrt_keys",
    "infer_ramification",
    "Radical",
    "sqrt_gaussian",
    "PuiseuxSeries",
    "expand_series",
    "evaluate_scalar",
    "evaluate_numeric",
    "DEFAULT_TRUNCATION",
    "RAMIFICATION_CAP",
]

DEFAULT_TRUNCATION = 16
RAMIFICATION_CAP = 12


class NonExpandable(Exception):
    """The exact tier cannot represent this value; fall back to numerics."""


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------


class TExpression:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class TNum(TExpression):
    value: Fraction


@dataclass(frozen=True)
class TImag(TExpression):
    pass


@dataclass(frozen=True)
class TVar(TExpression):
    pass


@dataclass(frozen=True)
class TSym(TExpression):
    name: str


@dataclass(frozen=True)
class TNeg(TExpression):
    arg: TExpression


@dataclass(frozen=True)
class TAdd(TExpression):
    left: TExpression
    right: TExpression


@dataclass(frozen=True)
class TSub(TExpression):
    left: TExpression
    right: TExpression


@dataclass(frozen=True)
class TMul(TExpression):
    left: TExpression
    right: TExpression


@dataclass(frozen=True)
class TDiv(TExpression):
    left: TExpression
    right: TExpression


@dataclass(frozen=True)
class TPow(TExpression):
    base: TExpression
    exponent: Fraction


@dataclass(frozen=True)
class TSqrt(TExpression):
    arg: TExpression


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[()+\-*/^]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ValueError(f"cannot tokenize {rest[:20]!r}")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", Fraction(m.group("num"))))
        elif m.group("name"):
            tokens.append(("name", m.group("name")))
        else:
            op = m.group("op")
            tokens.append(("op", "^" if op == "**" else op))
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r}, got {val!r}")

    def parse(self) -> TExpression:
        e = self.expr()
        kind, val = self.peek()
        if kind != "end":
            raise ValueError(f"trailing input at {val!r}")
        return e

    def expr(self) -> TExpression:
        node = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = TAdd(node, rhs) if val == "+" else TSub(node, rhs)
            else:
                return node

    def term(self) -> TExpression:
        node = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.factor()
                if val == "*":
                    node = TMul(node, rhs)
                elif isinstance(node, TNum) and isinstance(rhs, TNum):
                    # fold literal rationals so 5/2 round-trips as one number
                    node = TNum(node.value / rhs.value)
                else:
                    node = TDiv(node, rhs)
            else:
                return node

    def factor(self) -> TExpression:
        kind, val = self.peek()
        if kind == "op" and val == "-":
            self.take()
            inner = self.factor()
            if isinstance(inner, TNum):
                return TNum(-inner.value)
            return TNeg(inner)
        if kind == "op" and val == "+":
            self.take()
            return self.factor()
        return self.power()

    def power(self) -> TExpression:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exponent = _fold_rational(self.factor())
            return TPow(base, exponent)
        return base

    def atom(self) -> TExpression:
        kind, val = self.take()
        if kind == "num":
            return TNum(val)
        if kind == "name":
            if val == "sqrt":
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return TSqrt(inner)
            if val == "i":
                return TImag()
            if val == "t":
                return TVar()
            return TSym(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ValueError(f"unexpected token {val!r}")


def _fold_rational(e: TExpression) -> Fraction:
    """Constant-fold an exponent expression to a rational number."""
    if isinstance(e, TNum):
        return e.value
    if isinstance(e, TNeg):
        return -_fold_rational(e.arg)
    if isinstance(e, TAdd):
        return _fold_rational(e.left) + _fold_rational(e.right)
    if isinstance(e, TSub):
        return _fold_rational(e.left) - _fold_rational(e.right)
    if isinstance(e, TMul):
        return _fold_rational(e.left) * _fold_rational(e.right)
    if isinstance(e, TDiv):
        return _fold_rational(e.left) / _fold_rational(e.right)
    if isinstance(e, TPow) and e.exponent.denominator == 1:
        return _fold_rational(e.base) ** int(e.exponent)
    raise ValueError("exponent is not a rational constant")


def parse_expression(text) -> TExpression:
    """Parse an expression string; numbers and Fractions pass through."""
    if isinstance(text, TExpression):
        return text
    if isinstance(text, (int, Fraction)):
        return TNum(Fraction(text))
    return _Parser(_tokenize(str(text))).parse()


def to_text(e: TExpression) -> str:
    """Canonical, re-parseable rendering (used as the sqrt branch key)."""
    if isinstance(e, TNum):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, TImag):
        return "i"
    if isinstance(e, TVar):
        return "t"
    if isinstance(e, TSym):
        return e.name
    if isinstance(e, TNeg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, TAdd):
        return f"({to_text(e.left)}+{to_text(e.right)})"
    if isinstance(e, TSub):
        return f"({to_text(e.left)}-{to_text(e.right)})"
    if isinstance(e, TMul):
        return f"({to_text(e.left)}*{to_text(e.right)})"
    if isinstance(e, TDiv):
        return f"({to_text(e.left)}/{to_text(e.right)})"
    if isinstance(e, TPow):
        x = e.exponent
        ex = str(x.numerator) if x.denominator == 1 else f"({x.numerator}/{x.denominator})"
        return f"({to_text(e.base)}^{ex})"
    if isinstance(e, TSqrt):
        return f"sqrt({to_text(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def expression_symbols(e: TExpression) -> set:
    """Parameter symbols appearing in the expression."""
    out = set()

    def walk(node):
        if isinstance(node, TSym):
            out.add(node.name)
        elif isinstance(node, TNeg):
            walk(node.arg)
        elif isinstance(node, (TAdd, TSub, TMul, TDiv)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, TPow):
            walk(node.base)
        elif isinstance(node, TSqrt):
            walk(node.arg)

    walk(e)
    return out


def collect_sqrt_keys(exprs: Iterable[TExpression]):
    """Branch keys (canonical argument text) of all square roots, in order.

    A half-integer power contributes the same key as sqrt of its base, so
    the two spellings share one branch choice.
    """
    keys = []

    def walk(node):
        if isinstance(node, TNeg):
            walk(node.arg)
        elif isinstance(node, (TAdd, TSub, TMul, TDiv)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, TPow):
            walk(node.base)
            if node.exponent.denominator % 2 == 0 and not isinstance(node.base, TVar):
                key = to_text(node.base)
                if key not in keys:
                    keys.append(key)
        elif isinstance(node, TSqrt):
            walk(node.arg)
            key = to_text(node.arg)
            if key not in keys:
                keys.append(key)

    for e in exprs:
        walk(parse_expression(e))
    return keys


def infer_ramification(exprs: Iterable[TExpression]) -> int:
    """LCM of rational-exponent denominators across the expressions."""
    den = 1

    def walk(node):
        nonlocal den
        if isinstance(node, TNeg):
            walk(node.arg)
        elif isinstance(node, (TAdd, TSub, TMul, TDiv)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, TPow):
            den = den * node.exponent.denominator // math.gcd(den, node.exponent.denominator)
            walk(node.base)
        elif isinstance(node, TSqrt):
            walk(node.arg)

    for e in exprs:
        walk(parse_expression(e))
    if den > RAMIFICATION_CAP:
        raise NonExpandable(f"ramification {den} exceeds cap {RAMIFICATION_CAP}")
    return den


# ---------------------------------------------------------------------------
# coefficients: Q(i) with adjoined real square roots
# ---------------------------------------------------------------------------


def _squarefree(n: int):
    """n = s^2 * d with d squarefree; returns (s, d) for n >= 1."""
    s, d, m = 1, 1, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    if m > 1:
        d *= m
    return s, d


@dataclass(frozen=True)
class Radical:
    """Element of Q(i)(sqrt(d_1), ..., sqrt(d_k)), d_j squarefree positive.

    Stored as a sorted tuple of (d, coefficient) with d = 1 the rational
    part; products contract via sqrt(d1)*sqrt(d2) = g*sqrt(d1*d2/g^2).
    """

    terms: tuple

    @staticmethod
    def _make(data: Dict[int, GaussianRational]) -> "Radical":
        items = tuple(sorted((d, c) for d, c in data.items() if c))
        return Radical(items)

    @staticmethod
    def from_gaussian(z) -> "Radical":
        z = grat(z)
        return Radical(((1, z),) if z else ())

    @property
    def is_gaussian(self) -> bool:
        return all(d == 1 for d, _ in self.terms)

    def gaussian_value(self) -> GaussianRational:
        if not self.is_gaussian:
            raise NonExpandable(f"{self} is irrational")
        return self.terms[0][1] if self.terms else ZERO

    def __bool__(self):
        return bool(self.terms)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Radical):
            return other
        return Radical.from_gaussian(other)

    def __add__(self, other):
        other = self._coerce(other)
        data = dict(self.terms)
        for d, c in other.terms:
            data[d] = data.get(d, ZERO) + c
        return self._make(data)

    __radd__ = __add__

    def __neg__(self):
        return Radical(tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        data: Dict[int, GaussianRational] = {}
        for d1, c1 in self.terms:
            for d2, c2 in other.terms:
                g = math.gcd(d1, d2)
                d = (d1 // g) * (d2 // g)
                v = c1 * c2 * grat(g)
                data[d] = data.get(d, ZERO) + v
        return self._make(data)

    __rmul__ = __mul__

    def _conjugate_by(self, p: int) -> "Radical":
        return Radical(tuple((d, -c if d % p == 0 else c) for d, c in self.terms))

    def inverse(self) -> "Radical":
        if not self.terms:
            raise ZeroDivisionError("inverse of zero")
        if self.is_gaussian:
            return Radical.from_gaussian(ONE / self.terms[0][1])
        # peel one adjoined prime at a time: x * sigma_p(x) omits sqrt(p)
        dmax = max(d for d, _ in self.terms if d > 1)
        p = next(q for q in range(2, dmax + 1) if dmax % q == 0)
        conj = self._conjugate_by(p)
        norm = self * conj
        return conj * norm.inverse()

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def numeric(self):
        """mpmath complex value at current mpmath precision."""
        total = mpmath.mpc(0)
        for d, c in self.terms:
            root = mpmath.sqrt(d)
            total += mpmath.mpc(
                mpmath.mpf(c.re.numerator) / c.re.denominator,
                mpmath.mpf(c.im.numerator) / c.im.denominator,
            ) * root
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.terms:
            parts.append(str(c) if d == 1 else f"({c})*sqrt({d})")
        return " + ".join(parts)


_RAD_ZERO = Radical(())
_RAD_ONE = Radical.from_gaussian(ONE)


def _rational_sqrt(fr: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    if fr < 0:
        return None
    ns = math.isqrt(fr.numerator)
    ds = math.isqrt(fr.denominator)
    if ns * ns == fr.numerator and ds * ds == fr.denominator:
        return Fraction(ns, ds)
    return None


def _sqrt_positive_fraction(fr: Fraction) -> Radical:
    """sqrt of a positive rational as (s/den) * sqrt(d)."""
    s, d = _squarefree(fr.numerator * fr.denominator)
    coeff = grat(Fraction(s, fr.denominator))
    return Radical(((d, coeff),))


def sqrt_gaussian(z: GaussianRational) -> Radical:
    """Principal square root of a Gaussian rational, exact or NonExpandable.

    Principal means the result with positive real part (or, on the negative
    real axis, positive imaginary part), matching mpmath.sqrt.
    """
    z = grat(z)
    if not z:
        return _RAD_ZERO
    a, b = z.re, z.im
    if b == 0:
        if a > 0:
            return _sqrt_positive_fraction(a)
        return _sqrt_positive_fraction(-a) * GaussianRational(0, 1)
    if a == 0:
        half = _sqrt_positive_fraction(abs(b) / 2)
        unit = GaussianRational(1, 1) if b > 0 else GaussianRational(1, -1)
        return half * unit
    r = _rational_sqrt(a * a + b * b)
    if r is not None:
        x = _rational_sqrt((a + r) / 2)
        if x is not None and x != 0:
            y = b / (2 * x)
            return Radical.from_gaussian(GaussianRational(x, y))
    raise NonExpandable(f"no exact square root of {z}")


# ---------------------------------------------------------------------------
# Puiseux series
# ---------------------------------------------------------------------------


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class PuiseuxSeries:
    """sum_k c_k t^(k/ram), known modulo O(t^(prec/ram)); prec None = exact.

    Exponents may be negative (Laurent tails appear when bases are inverted);
    "exact" series are finite sums."""

    ram: int
    coeffs: tuple  # sorted ((k, Radical), ...), all coefficients nonzero
    prec: Optional[int]

    # construction ----------------------------------------------------------

    @staticmethod
    def _build(data: Dict[int, Radical], ram: int, prec: Optional[int]) -> "PuiseuxSeries":
        items = {k: c for k, c in data.items() if c and (prec is None or k < prec)}
        return PuiseuxSeries(ram, tuple(sorted(items.items())), prec)

    @staticmethod
    def scalar(value, ram: int = 1) -> "PuiseuxSeries":
        r = value if isinstance(value, Radical) else Radical.from_gaussian(value)
        return PuiseuxSeries._build({0: r}, ram, None)

    @staticmethod
    def zero(ram: int = 1) -> "PuiseuxSeries":
        return PuiseuxSeries(ram, (), None)

    @staticmethod
    def t_power(exp: Fraction, coeff=None) -> "PuiseuxSeries":
        exp = Fraction(exp)
        ram = exp.denominator
        c = coeff if isinstance(coeff, Radical) else Radical.from_gaussian(coeff if coeff is not None else ONE)
        return PuiseuxSeries._build({exp.numerator: c}, ram, None)

    # views ------------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    @property
    def known_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> Optional[Fraction]:
        """Exponent of the first known nonzero term (None if none known)."""
        if not self.coeffs:
            return None
        return Fraction(self.coeffs[0][0], self.ram)

    def leading_coefficient(self) -> Radical:
        if not self.coeffs:
            raise ValueError("series has no known nonzero term")
        return self.coeffs[0][1]

    def coefficient(self, exp) -> Radical:
        exp = Fraction(exp)
        if self.prec is not None and exp >= Fraction(self.prec, self.ram):
            raise ValueError(f"coefficient of t^{exp} is beyond truncation")
        k = exp * self.ram
        if k.denominator != 1:
            return _RAD_ZERO
        for kk, c in self.coeffs:
            if kk == int(k):
                return c
        return _RAD_ZERO

    def precision(self) -> Optional[Fraction]:
        return None if self.prec is None else Fraction(self.prec, self.ram)

    # ramification plumbing ---------------------------------------------------

    def _lift(self, ram: int) -> "PuiseuxSeries":
        if ram == self.ram:
            return self
        if ram % self.ram:
            raise ValueError("can only lift to a multiple of the ramification")
        f = ram // self.ram
        return PuiseuxSeries(
            ram,
            tuple((k * f, c) for k, c in self.coeffs),
            None if self.prec is None else self.prec * f,
        )

    @staticmethod
    def _common(a: "PuiseuxSeries", b: "PuiseuxSeries"):
        ram = _lcm(a.ram, b.ram)
        if ram > RAMIFICATION_CAP:
            raise NonExpandable(f"ramification {ram} exceeds cap {RAMIFICATION_CAP}")
        return a._lift(ram), b._lift(ram)

    @staticmethod
    def _coerce(value) -> "PuiseuxSeries":
        if isinstance(value, PuiseuxSeries):
            return value
        return PuiseuxSeries.scalar(value)

    # arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        a, b = self._common(self, self._coerce(other))
        data = dict(a.coeffs)
        for k, c in b.coeffs:
            data[k] = data.get(k, _RAD_ZERO) + c
        precs = [p for p in (a.prec, b.prec) if p is not None]
        return self._build(data, a.ram, min(precs) if precs else None)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.ram, tuple((k, -c) for k, c in self.coeffs), self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        a, b = self._common(self, self._coerce(other))
        if not a.coeffs and a.prec is None:
            return PuiseuxSeries.zero(a.ram)
        if not b.coeffs and b.prec is None:
            return PuiseuxSeries.zero(a.ram)
        va = a.coeffs[0][0] if a.coeffs else a.prec
        vb = b.coeffs[0][0] if b.coeffs else b.prec
        bounds = []
        if a.prec is not None:
            bounds.append(a.prec + vb)
        if b.prec is not None:
            bounds.append(b.prec + va)
        prec = min(bounds) if bounds else None
        data: Dict[int, Radical] = {}
        for k1, c1 in a.coeffs:
            for k2, c2 in b.coeffs:
                k = k1 + k2
                if prec is not None and k >= prec:
                    continue
                data[k] = data.get(k, _RAD_ZERO) + c1 * c2
        return self._build(data, a.ram, prec)

    __rmul__ = __mul__

    def _relative_budget(self, trunc: int) -> int:
        """Number of known relative terms, in 1/ram units."""
        if self.prec is None:
            return trunc * self.ram
        return self.prec - self.coeffs[0][0]

    def inverse(self, trunc: int = DEFAULT_TRUNCATION) -> "PuiseuxSeries":
        if not self.coeffs:
            if self.prec is None:
                raise ZeroDivisionError("inverse of the zero series")
            raise NonExpandable("leading term of divisor unknown at this truncation")
        v, lead = self.coeffs[0]
        rel = self._relative_budget(trunc)
        cinv = lead.inverse()
        # u = self / (lead t^v) - 1 has positive valuation
        shifted = PuiseuxSeries(
            self.ram,
            tuple((k - v, c * cinv) for k, c in self.coeffs),
            None if self.prec is None else self.prec - v,
        )
        u = shifted - 1
        if not u.coeffs:
            return PuiseuxSeries._build(
                {-v: cinv}, self.ram, None if self.prec is None else self.prec - 2 * v
            )
        # geometric series: 1/(1+u) = 1 - u + u^2 - ...
        uv = u.coeffs[0][0]
        steps = rel // uv + 1
        geom = PuiseuxSeries.scalar(ONE, self.ram)
        term = PuiseuxSeries.scalar(ONE, self.ram)
        sign = -1
        for _ in range(steps):
            term = (term * u).truncate_units(rel)
            if not term.coeffs:
                break
            geom = geom + term * grat(sign)
            sign = -sign
        out = geom * PuiseuxSeries._build({-v: cinv}, self.ram, None)
        # geom is known modulo t^rel; the monomial shifts that bound by -v
        return out.truncate_units(rel - v)

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other.coeffs and other.prec is None:
            raise ZeroDivisionError("division by the zero series")
        if other.prec is None and len(other.coeffs) == 1:
            k, c = other.coeffs[0]
            inv = PuiseuxSeries._build({-k: c.inverse()}, other.ram, None)
            return self * inv
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def truncate_units(self, prec: Optional[int]) -> "PuiseuxSeries":
        """Truncate to O(t^(prec/ram)); None leaves the series unchanged."""
        if prec is None:
            return self
        if self.prec is not None and self.prec <= prec:
            return self
        return self._build(dict(self.coeffs), self.ram, prec)

    def sqrt(self, branch: int = 1, trunc: int = DEFAULT_TRUNCATION) -> "PuiseuxSeries":
        if not self.coeffs:
            if self.prec is None:
                return PuiseuxSeries.zero(self.ram)
            raise NonExpandable("leading term under sqrt unknown at this truncation")
        work = self
        if work.coeffs[0][0] % 2:
            if work.ram * 2 > RAMIFICATION_CAP:
                raise NonExpandable("odd valuation under sqrt exceeds ramification cap")
            work = work._lift(work.ram * 2)
        v, lead = work.coeffs[0]
        root = sqrt_gaussian(lead.gaussian_value())  # NonExpandable if irrational
        rel = work._relative_budget(trunc)
        cinv = lead.inverse()
        shifted = PuiseuxSeries(
            work.ram,
            tuple((k - v, c * cinv) for k, c in work.coeffs),
            None if work.prec is None else work.prec - v,
        )
        u = shifted - 1
        half = PuiseuxSeries.scalar(ONE, work.ram)
        if u.coeffs:
            uv = u.coeffs[0][0]
            term = PuiseuxSeries.scalar(ONE, work.ram)
            coeff = Fraction(1)
            steps = rel // uv + 1
            for j in range(1, steps + 1):
                coeff *= Fraction(3 - 2 * j, 2 * j)  # binom(1/2, j) update
                term = (term * u).truncate_units(rel)
                if not term.coeffs:
                    break
                half = half + term * grat(coeff)
            out_prec = rel + v // 2
        else:
            out_prec = None if work.prec is None else work.prec - v // 2
        mono = PuiseuxSeries._build({v // 2: root * grat(branch)}, work.ram, None)
        return (half * mono).truncate_units(out_prec)

    def pow(self, exponent, branch: int = 1, trunc: int = DEFAULT_TRUNCATION) -> "PuiseuxSeries":
        e = Fraction(exponent)
        if e.denominator == 1:
            n = int(e)
            if n < 0:
                return self.inverse(trunc).pow(-n, trunc=trunc)
            out = PuiseuxSeries.scalar(ONE, self.ram)
            base = self
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        if e.denominator == 2:
            return self.sqrt(branch=branch, trunc=trunc).pow(e.numerator, trunc=trunc)
        # general rational power: only exact monomials
        if self.prec is None and len(self.coeffs) == 1:
            k, c = self.coeffs[0]
            new_exp = Fraction(k, self.ram) * e
            if new_exp.denominator > RAMIFICATION_CAP:
                raise NonExpandable("rational power exceeds ramification cap")
            root = _monomial_coeff_root(c, e)
            return PuiseuxSeries.t_power(new_exp, root)
        raise NonExpandable(f"cannot raise a non-monomial series to the {e} power")

    # numerics -----------------------------------------------------------------

    def numeric_at(self, tval):
        """Evaluate the known part at a numeric t (mpmath)."""
        tval = mpmath.mpf(tval)
        total = mpmath.mpc(0)
        for k, c in self.coeffs:
            total += c.numeric() * mpmath.power(tval, mpmath.mpf(k) / self.ram)
        return total

    def __str__(self):
        parts = []
        for k, c in self.coeffs:
            e = Fraction(k, self.ram)
            if e == 0:
                parts.append(f"({c})")
            elif e.denominator == 1:
                parts.append(f"({c})*t^{e.numerator}")
            else:
                parts.append(f"({c})*t^({e.numerator}/{e.denominator})")
        body = " + ".join(parts) if parts else "0"
        if self.prec is not None:
            p = Fraction(self.prec, self.ram)
            tail = f"t^{p.numerator}" if p.denominator == 1 else f"t^({p.numerator}/{p.denominator})"
            body += f" + O({tail})"
        return body

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        a, b = self._common(self, other)
        return a.coeffs == b.coeffs and a.prec == b.prec

    def __hash__(self):
        return hash((self.ram, self.coeffs, self.prec))

    def lift_to_at_least(self, ram: int) -> "PuiseuxSeries":
        return self._lift(_lcm(self.ram, ram))


def _monomial_coeff_root(c: Radical, e: Fraction) -> Radical:
    """c^e for the coefficient of an exact monomial, rational results only."""
    if not c.is_gaussian:
        raise NonExpandable("irrational coefficient under a rational power")
    z = c.gaussian_value()
    if z == ONE:
        return _RAD_ONE
    if z.im == 0 and z.re > 0:
        q, p = e.denominator, e.numerator
        root_num = _int_root(z.re.numerator, q)
        root_den = _int_root(z.re.denominator, q)
        if root_num is not None and root_den is not None:
            return Radical.from_gaussian(grat(Fraction(root_num, root_den) ** p))
    raise NonExpandable(f"no exact {e} power of coefficient {c}")


def _int_root(n: int, q: int) -> Optional[int]:
    """Exact integer q-th root of n >= 1, or None."""
    guess = round(n ** (1.0 / q))
    for r in (guess - 1, guess, guess + 1):
        if r >= 1 and r**q == n:
            return r
    return None


# ---------------------------------------------------------------------------
# evaluation contexts
# ---------------------------------------------------------------------------


class _SeriesContext:
    def __init__(self, params, ram, trunc, branch):
        self.params = params or {}
        self.ram = ram
        self.trunc = trunc
        self.branch = branch or {}

    def number(self, fr):
        return PuiseuxSeries.scalar(grat(fr), self.ram)

    def imaginary(self):
        return PuiseuxSeries.scalar(GaussianRational(0, 1), self.ram)

    def variable(self):
        return PuiseuxSeries._build({self.ram: _RAD_ONE}, self.ram, None)

    def symbol(self, name):
        if name not in self.params:
            raise NonExpandable(f"unbound parameter {name!r}")
        return PuiseuxSeries._coerce(self.params[name]).lift_to_at_least(self.ram)

    def power(self, x, e, key):
        return x.pow(e, branch=self.branch.get(key, 1), trunc=self.trunc)

    def sqrt(self, x, key):
        return x.sqrt(branch=self.branch.get(key, 1), trunc=self.trunc)


class _ScalarContext:
    def __init__(self, params, tval=None):
        self.params = params or {}
        self.tval = tval

    def number(self, fr):
        return grat(fr)

    def imaginary(self):
        return GaussianRational(0, 1)

    def variable(self):
        if self.tval is None:
            raise NonExpandable("the deformation variable has no scalar value")
        return grat(self.tval)

    def symbol(self, name):
        if name not in self.params:
            raise NonExpandable(f"unbound parameter {name!r}")
        return grat(self.params[name])

    def power(self, x, e, key):
        if e.denominator == 1:
            return x ** int(e)
        if e.denominator == 2:
            r = sqrt_gaussian(x)
            return r.gaussian_value() ** e.numerator
        rad = Radical.from_gaussian(x)
        root = _monomial_coeff_root(rad, e)
        return root.gaussian_value()

    def sqrt(self, x, key):
        return sqrt_gaussian(x).gaussian_value()


class _NumericContext:
    def __init__(self, tval, params, branch):
        self.tval = mpmath.mpf(tval)
        self.params = params or {}
        self.branch = branch or {}

    def number(self, fr):
        return mpmath.mpf(fr.numerator) / fr.denominator

    def imaginary(self):
        return mpmath.mpc(0, 1)

    def variable(self):
        return self.tval

    def symbol(self, name):
        if name not in self.params:
            raise NonExpandable(f"unbound parameter {name!r}")
        v = self.params[name]
        if isinstance(v, GaussianRational):
            return mpmath.mpc(
                mpmath.mpf(v.re.numerator) / v.re.denominator,
                mpmath.mpf(v.im.numerator) / v.im.denominator,
            )
        return v

    def power(self, x, e, key):
        if e.denominator == 1:
            return x ** int(e)
        if e.denominator == 2:
            return (self.branch.get(key, 1) * mpmath.sqrt(x)) ** e.numerator
        return mpmath.power(x, mpmath.mpf(e.numerator) / e.denominator)

    def sqrt(self, x, key):
        return self.branch.get(key, 1) * mpmath.sqrt(x)


def _evaluate(e: TExpression, ctx):
    if isinstance(e, TNum):
        return ctx.number(e.value)
    if isinstance(e, TImag):
        return ctx.imaginary()
    if isinstance(e, TVar):
        return ctx.variable()
    if isinstance(e, TSym):
        return ctx.symbol(e.name)
    if isinstance(e, TNeg):
        return -_evaluate(e.arg, ctx)
    if isinstance(e, TAdd):
        return _evaluate(e.left, ctx) + _evaluate(e.right, ctx)
    if isinstance(e, TSub):
        return _evaluate(e.left, ctx) - _evaluate(e.right, ctx)
    if isinstance(e, TMul):
        return _evaluate(e.left, ctx) * _evaluate(e.right, ctx)
    if isinstance(e, TDiv):
        return _evaluate(e.left, ctx) / _evaluate(e.right, ctx)
    if isinstance(e, TPow):
        return ctx.power(_evaluate(e.base, ctx), e.exponent, to_text(e.base))
    if isinstance(e, TSqrt):
        return ctx.sqrt(_evaluate(e.arg, ctx), to_text(e.arg))
    raise TypeError(f"not an expression node: {e!r}")


def expand_series(
    expr,
    ram: int = 1,
    trunc: int = DEFAULT_TRUNCATION,
    params=None,
    branch=None,
) -> PuiseuxSeries:
    """Expand an expression as an exact Puiseux series about t = 0.

    ram is the starting ramification (operations lift it as needed, up to
    the cap); trunc bounds the relative order kept by inversions and roots.
    Raises NonExpandable when the exact tier cannot represent the value.
    """
    e = parse_expression(expr)
    return _evaluate(e, _SeriesContext(params, ram, trunc, branch))


def evaluate_scalar(expr, params=None, tval=None) -> GaussianRational:
    """Evaluate an expression to a Gaussian rational.

    The expression must be t-free unless tval supplies a rational value
    for the deformation variable.
    """
    return _evaluate(parse_expression(expr), _ScalarContext(params, tval))


def evaluate_numeric(expr, tval, params=None, branch=None):
    """Evaluate at a numeric t with mpmath at the caller's precision."""
    return _evaluate(parse_expression(expr), _NumericContext(tval, params, branch))
