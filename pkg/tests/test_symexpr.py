from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jlmeasure.errors import DegreeCapError, EvaluationPoleError, InvalidScalarError, ParseError
from jlmeasure.symexpr import (
    ONE,
    PI,
    Q,
    ZERO,
    Poly,
    SymbolicScalar,
    canonicalize,
    evaluate_at,
    get_degree_cap,
    parse,
    poly_gcd,
    set_degree_cap,
)

from .oracles import machin_pi


def scalar(num, den=(1,), k=0):
    return SymbolicScalar.from_parts(Poly(num), Poly(den), k)


# -- canonical form ---------------------------------------------------------

@pytest.mark.parametrize("i", range(1, 13))
def test_unit_factor_over_steinberg_factor_is_q_power(i):
    x = (1 - Q ** -i) / (Q ** i - 1)
    assert x == Q ** -i
    assert x.numerator == Poly([1]) and x.denominator == Poly.monomial(i)


def test_zero_is_unique():
    z = scalar([0], [1, 0, 1])
    assert z.is_zero()
    assert (z.numerator, z.denominator, z.pi_exponent) == (Poly(), Poly([1]), 0)
    assert scalar([0], [1], 5) == ZERO
    assert Q * 0 == ZERO and (PI - PI) == ZERO


def test_factor_cancellation():
    x = scalar([-1, 0, 1], [-1, 1])
    assert x == Q + 1
    assert x.denominator == Poly([1])


def test_denominator_is_monic():
    x = scalar([3], [0, 4])
    assert x.denominator.lead == 1
    assert x == SymbolicScalar.const(Fraction(3, 4)) / Q


def test_zero_denominator_rejected():
    with pytest.raises(InvalidScalarError):
        canonicalize(SymbolicScalar(Poly([1]), Poly(), 0))
    with pytest.raises((InvalidScalarError, ZeroDivisionError)):
        ONE / ZERO


def test_mixed_pi_sum_rejected():
    with pytest.raises(InvalidScalarError):
        PI + 1
    assert PI + PI == 2 * PI


def test_degree_cap():
    old = set_degree_cap(8)
    try:
        assert get_degree_cap() == 8
        with pytest.raises(DegreeCapError):
            (Q + 1) ** 9
    finally:
        set_degree_cap(old)
    assert get_degree_cap() == 256


def test_poly_gcd_known():
    a = Poly([-1, 0, 1])  # q^2 - 1
    b = Poly([1, 2, 1])   # (q+1)^2
    assert poly_gcd(a, b) == Poly([1, 1])


# -- text form ----------------------------------------------------------------

@pytest.mark.parametrize("text", [
    "(q+1)/q", "pi^-2/2", "(k-1)/(4*pi)", "3·π^2", "(1 - q^-3)/(q^3 - 1)",
    "q^2 - 1/3*q + 7", "2pi", "-(q-1)^2/(q^4+q+1)",
])
def test_text_roundtrip(text):
    x = parse(text, {"k": 7})
    assert parse(x.to_text()) == x
    assert parse(x.to_text()).to_text() == x.to_text()


def test_text_ascending_powers():
    assert (1 - Q).to_text().startswith("1 - q")
    assert (SymbolicScalar.const(Fraction(1, 2), -2)).to_text() == "1/2·pi^-2"


def test_parse_errors():
    for bad in ["", "q^", "q^(1/2)", "(q+1", "x + 1", "q $ 2"]:
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_bindings():
    assert parse("(k-1)/12", {"k": 7}) == Fraction(1, 2)


# -- evaluation ----------------------------------------------------------------

def test_evaluate_rational_exact():
    v = evaluate_at((Q + 1) / Q, 3)
    assert v.value == Fraction(4, 3) and v.error_bound == 0 and v.exact
    assert evaluate_at(Q - 1, 2).value == 1


def test_evaluate_pi_against_machin():
    v = evaluate_at(SymbolicScalar.const(Fraction(1, 2), -2), None, 20)
    ref = Fraction(1, 2) / machin_pi(40) ** 2
    exact = Fraction(int(v.value.man)) * Fraction(2) ** int(v.value.exp)
    assert abs(exact - ref) <= Fraction(v.error_bound)
    assert abs(exact - Fraction("0.050660591821168885722")) < Fraction(1, 10 ** 20)
    assert 0 < v.error_bound < 1e-17


def test_evaluate_pole():
    with pytest.raises(EvaluationPoleError):
        evaluate_at(1 / (Q - 2), 2)
    with pytest.raises(EvaluationPoleError):
        evaluate_at(Q, None)


# -- properties ---------------------------------------------------------------

coeff = st.fractions(min_value=-20, max_value=20, max_denominator=12)
poly = st.lists(coeff, min_size=1, max_size=25)  # degree <= 24
nonzero_poly = poly.filter(lambda c: any(c))


@st.composite
def scalars(draw, pi=False):
    k = draw(st.integers(-3, 3)) if pi else 0
    return SymbolicScalar.from_parts(Poly(draw(poly)), Poly(draw(nonzero_poly)), k)


slow = settings(max_examples=40, deadline=None)


@slow
@given(scalars(), scalars(), scalars())
def test_addition_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@slow
@given(scalars(), scalars(), scalars())
def test_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


@slow
@given(scalars(), scalars())
def test_commutative(a, b):
    assert a * b == b * a and a + b == b + a


@slow
@given(st.lists(coeff, min_size=1, max_size=10), nonzero_poly, st.integers(-4, 4))
def test_canonicalize_idempotent(num, den, k):
    raw = SymbolicScalar(Poly(num), Poly(den), k)
    c = canonicalize(raw)
    cc = canonicalize(c)
    assert (c.numerator, c.denominator, c.pi_exponent) == (cc.numerator, cc.denominator, cc.pi_exponent)
    if not c.is_zero():
        assert c.denominator.lead == 1
        assert poly_gcd(c.numerator, c.denominator).degree == 0


@settings(max_examples=40, deadline=None)
@given(scalars(pi=True), scalars(pi=True), st.integers(2, 9))
def test_evaluate_commutes_with_product(a, b, q):
    try:
        va, vb, vab = evaluate_at(a, q), evaluate_at(b, q), evaluate_at(a * b, q)
    except EvaluationPoleError:
        return
    import mpmath
    with mpmath.workdps(40):
        lhs = mpmath.mpf(va.value.numerator) / va.value.denominator if isinstance(va.value, Fraction) else va.value
        rhs = mpmath.mpf(vb.value.numerator) / vb.value.denominator if isinstance(vb.value, Fraction) else vb.value
        prod = lhs * rhs
        slack = abs(lhs) * vb.error_bound + abs(rhs) * va.error_bound + va.error_bound * vb.error_bound
        assert vab.contains(prod, float(slack) + 1e-25 * float(abs(prod)))


@slow
@given(scalars(pi=True))
def test_inverse(a):
    if a.is_zero():
        return
    assert a * a.inverse() == ONE
