"""Exact scalars of the form  r(q) * pi**k.

``r`` is a rational function of the formal variable ``q`` with rational
coefficients and ``k`` is an integer.  Every arithmetic result is kept in
canonical form:

* numerator and denominator are coprime,
* the denominator is monic,
* zero is ``0 / 1 * pi**0``.

Negative powers of ``q`` live in the denominator (``q**-3`` is ``1/q^3``),
so equality is plain structural equality of canonical forms.

Sums of terms carrying different powers of pi are rejected: none of the
measure formulas produces them and allowing them would make equality
undecidable with this representation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

import mpmath

from .errors import (
    DegreeCapError,
    EvaluationPoleError,
    InvalidScalarError,
    ParseError,
)

__all__ = [
    "Poly",
    "SymbolicScalar",
    "NumericValue",
    "canonicalize",
    "evaluate_at",
    "parse",
    "get_degree_cap",
    "set_degree_cap",
    "Q",
    "PI",
    "ONE",
    "ZERO",
]

_degree_cap = 256


def get_degree_cap() -> int:
    return _degree_cap


def set_degree_cap(cap: int) -> int:
    """Set the polynomial degree cap; returns the previous value."""
    global _degree_cap
    if cap < 1:
        raise ValueError("degree cap must be positive")
    old, _degree_cap = _degree_cap, int(cap)
    return old


Number = Union[int, Fraction]


class Poly:
    """Dense univariate polynomial in q over the rationals.

    ``coeffs[i]`` is the coefficient of ``q**i``; there are no trailing
    zeros, and the zero polynomial has an empty tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Number] = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Poly":
        p = cls.__new__(cls)
        p.coeffs = coeffs
        return p

    @classmethod
    def monomial(cls, degree: int, coeff: Number = 1) -> "Poly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def low_order(self) -> int:
        """Index of the lowest nonzero coefficient (q-adic valuation)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise ValueError("zero polynomial has no valuation")

    def shift_down(self, k: int) -> "Poly":
        return Poly._raw(self.coeffs[k:])

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __neg__(self):
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
        return Poly(out)

    def scale(self, c: Number) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly._raw(())
        return Poly._raw(tuple(x * c for x in self.coeffs))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        inv_lead = 1 / other.lead
        quot = [Fraction(0)] * max(len(rem) - db, 0)
        bc = other.coeffs
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] * inv_lead
            if c:
                quot[k] = c
                for j, y in enumerate(bc):
                    if y:
                        rem[k + j] -= c * y
        return Poly(quot), Poly(rem[:db])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.lead)

    def __call__(self, x: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mp(self, x):
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
        return acc


def _check_cap(*polys: Poly) -> None:
    for p in polys:
        if p.degree > _degree_cap:
            raise DegreeCapError(
                f"polynomial degree {p.degree} exceeds cap {_degree_cap}"
            )


def _to_int_primitive(p: Poly) -> list[int]:
    # coprime integer coefficients, positive leading coefficient
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [c.numerator * (den // c.denominator) for c in p.coeffs]
    return _int_primpart(ints)


def _int_primpart(ints: list[int]) -> list[int]:
    g = 0
    for x in ints:
        g = math.gcd(g, x)
        if g == 1:
            break
    if ints[-1] < 0:
        g = -g
    return [x // g for x in ints] if g not in (0, 1) else ints


def _int_prem_primitive(a: list[int], b: list[int]) -> list[int]:
    """Primitive part of the pseudo-remainder of ``a`` by ``b``."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        g = math.gcd(lr, lb)
        ma, mb = lb // g, lr // g
        r = [x * ma for x in r]
        for j, y in enumerate(b):
            r[shift + j] -= mb * y
        r.pop()
        while r and r[-1] == 0:
            r.pop()
        if r:
            r = _int_primpart(r)
    return r


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q (primitive pseudo-remainder sequence over Z)."""
    _check_cap(a, b)
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    # the power of q in common is cheap to split off and very common here
    k = min(a.low_order(), b.low_order())
    ia = _to_int_primitive(a.shift_down(k))
    ib = _to_int_primitive(b.shift_down(k))
    if len(ia) < len(ib):
        ia, ib = ib, ia
    while len(ib) > 1:
        r = _int_prem_primitive(ia, ib)
        if not r:
            break
        ia, ib = ib, r
    else:
        # constant remainder: coprime apart from the q-power
        ib = [1]
    lead = ib[-1]
    return Poly._raw((Fraction(0),) * k + tuple(Fraction(x, lead) for x in ib))


def exact_quotient(a: Poly, g: Poly) -> Poly:
    """``a / g`` when ``g`` is known to divide ``a``."""
    if g.degree == 0:
        return a.scale(1 / g.lead)
    k = g.low_order()
    if any(a.coeffs[:k]):
        raise ArithmeticError("inexact polynomial division")
    a, g = a.shift_down(k), g.shift_down(k)
    if g.degree == 0:
        return a.scale(1 / g.lead)
    gi = _to_int_primitive(g)
    scale = g.lead / gi[-1]
    den = 1
    for c in a.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    r = [c.numerator * (den // c.denominator) for c in a.coeffs]
    dg = len(gi) - 1
    lg = gi[-1]
    quot = [0] * (len(r) - dg)
    for i in range(len(r) - 1 - dg, -1, -1):
        c, rem = divmod(r[i + dg], lg)
        if rem:
            raise ArithmeticError("inexact polynomial division")
        quot[i] = c
        if c:
            for j, y in enumerate(gi):
                r[i + j] -= c * y
    if any(r[:dg]):
        raise ArithmeticError("inexact polynomial division")
    f = 1 / (scale * den)
    return Poly._raw(tuple(Fraction(x) * f for x in quot)) if quot else Poly._raw(())


_POLY_ONE = Poly([1])
_POLY_ZERO = Poly()


@dataclass(frozen=True, eq=False)
class SymbolicScalar:
    """``numerator(q) / denominator(q) * pi**pi_exponent``.

    Instances produced by arithmetic are canonical.  Construct arbitrary
    (possibly non-reduced) values with :meth:`from_parts`, or directly and
    then pass through :func:`canonicalize`.
    """

    numerator: Poly
    denominator: Poly = _POLY_ONE
    pi_exponent: int = 0

    # -- construction ---------------------------------------------------
    @classmethod
    def from_parts(cls, numerator, denominator=1, pi_exponent: int = 0):
        num = numerator if isinstance(numerator, Poly) else Poly([numerator])
        den = denominator if isinstance(denominator, Poly) else Poly([denominator])
        return canonicalize(cls(num, den, int(pi_exponent)))

    @classmethod
    def const(cls, value: Number, pi_exponent: int = 0) -> "SymbolicScalar":
        v = Fraction(value)
        if v == 0:
            return ZERO
        return cls(Poly([v]), _POLY_ONE, int(pi_exponent))

    @classmethod
    def q_power(cls, k: int) -> "SymbolicScalar":
        if k >= 0:
            return cls(Poly.monomial(k), _POLY_ONE, 0)
        return cls(_POLY_ONE, Poly.monomial(-k), 0)

    @classmethod
    def coerce(cls, x) -> "SymbolicScalar":
        if isinstance(x, SymbolicScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        if isinstance(x, str):
            return parse(x)
        raise TypeError(f"cannot interpret {x!r} as a symbolic scalar")

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_constant(self) -> bool:
        """True when the value does not depend on q."""
        c = canonicalize(self)
        return c.numerator.degree <= 0 and c.denominator.degree == 0

    def is_rational(self) -> bool:
        return self.is_constant() and canonicalize(self).pi_exponent == 0

    def as_fraction(self) -> Fraction:
        c = canonicalize(self)
        if not c.is_rational():
            raise InvalidScalarError(f"{c.to_text()} is not a rational constant")
        if c.is_zero():
            return Fraction(0)
        return c.numerator.coeffs[0] / c.denominator.coeffs[0]

    def rational_part(self) -> Fraction:
        """The rational coefficient ``c`` of a constant ``c * pi**k``."""
        c = canonicalize(self)
        if not c.is_constant():
            raise InvalidScalarError(f"{c.to_text()} depends on q")
        if c.is_zero():
            return Fraction(0)
        return c.numerator.coeffs[0] / c.denominator.coeffs[0]

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return SymbolicScalar(-self.numerator, self.denominator, self.pi_exponent)

    def __add__(self, other):
        try:
            other = SymbolicScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero():
            return canonicalize(other)
        if other.is_zero():
            return canonicalize(self)
        if self.pi_exponent != other.pi_exponent:
            raise InvalidScalarError(
                "cannot add terms with different powers of pi "
                f"({self.pi_exponent} and {other.pi_exponent})"
            )
        if self.denominator == other.denominator:
            num = self.numerator + other.numerator
            den = self.denominator
        else:
            num = self.numerator * other.denominator + other.numerator * self.denominator
            den = self.denominator * other.denominator
        return canonicalize(SymbolicScalar(num, den, self.pi_exponent))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = SymbolicScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return SymbolicScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = SymbolicScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        # cross-cancel before multiplying keeps the gcds small
        g1 = poly_gcd(self.numerator, other.denominator)
        g2 = poly_gcd(other.numerator, self.denominator)
        n1 = exact_quotient(self.numerator, g1)
        d2 = exact_quotient(other.denominator, g1)
        n2 = exact_quotient(other.numerator, g2)
        d1 = exact_quotient(self.denominator, g2)
        return _normalize_lead(n1 * n2, d1 * d2, self.pi_exponent + other.pi_exponent)

    __rmul__ = __mul__

    def inverse(self) -> "SymbolicScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        return canonicalize(
            SymbolicScalar(self.denominator, self.numerator, -self.pi_exponent)
        )

    def __truediv__(self, other):
        try:
            other = SymbolicScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return SymbolicScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise InvalidScalarError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = canonicalize(self)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str)):
            other = SymbolicScalar.coerce(other)
        if not isinstance(other, SymbolicScalar):
            return NotImplemented
        a, b = canonicalize(self), canonicalize(other)
        return (
            a.numerator == b.numerator
            and a.denominator == b.denominator
            and a.pi_exponent == b.pi_exponent
        )

    def __hash__(self):
        c = canonicalize(self)
        return hash((c.numerator, c.denominator, c.pi_exponent))

    # -- substitution / evaluation ---------------------------------------
    def substitute(self, q_value: Number) -> "SymbolicScalar":
        """Replace q by a rational number; the result is a constant."""
        q_value = Fraction(q_value)
        den = self.denominator(q_value)
        if den == 0:
            raise EvaluationPoleError(f"pole at q = {q_value}")
        return SymbolicScalar.const(self.numerator(q_value) / den, self.pi_exponent)

    def __float__(self):
        return float(evaluate_at(self, None, 20).value)

    # -- text -----------------------------------------------------------
    def to_text(self) -> str:
        c = canonicalize(self)
        num = _poly_text(c.numerator)
        if c.denominator == _POLY_ONE:
            body = num
        else:
            body = f"({num})/({_poly_text(c.denominator)})"
        if c.pi_exponent:
            body += f"·pi^{c.pi_exponent}"
        return body

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SymbolicScalar({self.to_text()!r})"


def _normalize_lead(num: Poly, den: Poly, pi_exponent: int) -> SymbolicScalar:
    if num.is_zero():
        return ZERO
    _check_cap(num, den)
    lead = den.lead
    if lead != 1:
        num, den = num.scale(1 / lead), den.scale(1 / lead)
    return SymbolicScalar(num, den, pi_exponent)


def canonicalize(s: SymbolicScalar) -> SymbolicScalar:
    """Reduced form with monic denominator; zero is ``0/1 * pi^0``."""
    if s.denominator.is_zero():
        raise InvalidScalarError("zero denominator")
    if s.numerator.is_zero():
        return ZERO
    g = poly_gcd(s.numerator, s.denominator)
    if g == _POLY_ONE:
        return _normalize_lead(s.numerator, s.denominator, s.pi_exponent)
    num = exact_quotient(s.numerator, g)
    den = exact_quotient(s.denominator, g)
    return _normalize_lead(num, den, s.pi_exponent)


def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_text(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(p.coeffs):
        if not c:
            continue
        mag = abs(c)
        if i == 0:
            term = _frac_text(mag)
        else:
            mono = "q" if i == 1 else f"q^{i}"
            term = mono if mag == 1 else f"{_frac_text(mag)}*{mono}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts)


@dataclass(frozen=True)
class NumericValue:
    """A number with a certified absolute error bound.

    ``value`` is a :class:`~fractions.Fraction` when exact (then
    ``error_bound`` is 0) or an ``mpmath.mpf`` otherwise.
    """

    value: object
    error_bound: float = 0.0

    def __post_init__(self):
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be nonnegative")

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction) and self.error_bound == 0

    def __float__(self):
        return float(self.value)

    def contains(self, x, slack: float = 0.0) -> bool:
        return abs(mpmath.mpf(x) - mpmath.mpf(_to_mpf(self.value))) <= self.error_bound + slack


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def evaluate_at(s: SymbolicScalar, q_value: Number | None, pi_precision: int = 30) -> NumericValue:
    """Numeric value of ``s`` at ``q = q_value``.

    Without a power of pi the answer is an exact Fraction.  Otherwise pi
    is taken to ``pi_precision`` significant digits and the error bound
    accounts for that truncation.
    """
    s = canonicalize(s)
    if q_value is None:
        if not s.is_constant():
            raise EvaluationPoleError("q_value required for a q-dependent scalar")
        q_value = 0
    c = s.substitute(q_value)
    k = c.pi_exponent
    r = Fraction(0) if c.is_zero() else c.numerator.coeffs[0]
    if k == 0 or r == 0:
        return NumericValue(r, 0.0)
    with mpmath.workdps(pi_precision):
        value = _to_mpf(r) * mpmath.pi ** k
    # pi is correctly rounded at the working precision; the relative error
    # grows linearly with |k| through pi**k, plus one final rounding
    rel = (abs(k) + 1) * mpmath.mpf(10) ** (1 - pi_precision)
    bound = float(abs(value) * rel)
    return NumericValue(value, bound)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()·π]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", m.group("num")))
        elif m.group("name"):
            tokens.append(("name", m.group("name")))
        else:
            op = m.group("op")
            if op == "·":
                op = "*"
            elif op == "**":
                op = "^"
            elif op == "π":
                tokens.append(("name", "pi"))
                continue
            tokens.append(("op", op))
    return tokens


class _Parser:
    def __init__(self, text: str, bindings: Mapping[str, Number]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.bindings = dict(bindings)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> SymbolicScalar:
        if not self.tokens:
            raise ParseError("empty expression")
        v = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input at token {self.peek()[1]!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self):
        v = self.unary()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.unary()
                v = v * rhs if tok[1] == "*" else v / rhs
            elif tok[0] in ("num", "name") or tok == ("op", "("):
                # implicit multiplication, e.g. "2pi" or "3(q+1)"
                v = v * self.unary()
            else:
                return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            exp = self.unary()
            try:
                e = exp.as_fraction()
            except InvalidScalarError:
                raise ParseError("exponent must be a rational constant") from None
            if e.denominator != 1:
                raise ParseError("exponent must be an integer")
            try:
                return base ** int(e)
            except ZeroDivisionError:
                raise ParseError("zero raised to a negative power") from None
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return SymbolicScalar.const(Fraction(val))
        if kind == "name":
            if val == "q":
                return Q
            if val == "pi":
                return PI
            if val in self.bindings:
                return SymbolicScalar.coerce(Fraction(self.bindings[val]))
            raise ParseError(f"unbound name {val!r}")
        if val == "(":
            v = self.expr()
            self.take(")")
            return v
        raise ParseError(f"unexpected token {val!r}")


def parse(text: str, bindings: Mapping[str, Number] | None = None) -> SymbolicScalar:
    """Parse an arithmetic expression in q and pi into a canonical scalar.

    Accepts the canonical text rendering (``(1 - q)/(q^2)·pi^-2``) as well
    as ordinary input such as ``"(k-1)/(4*pi)"`` with ``bindings={"k": 7}``.
    """
    try:
        return _Parser(text, bindings or {}).parse()
    except ZeroDivisionError as exc:
        raise ParseError(f"division by zero in {text!r}") from exc
    except InvalidScalarError as exc:
        raise ParseError(str(exc)) from exc


ZERO = SymbolicScalar(_POLY_ZERO, _POLY_ONE, 0)
ONE = SymbolicScalar(_POLY_ONE, _POLY_ONE, 0)
Q = SymbolicScalar(Poly([0, 1]), _POLY_ONE, 0)
PI = SymbolicScalar(_POLY_ONE, _POLY_ONE, 1)
