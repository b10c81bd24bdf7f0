from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jlmeasure.errors import SpecViolationError
from jlmeasure.localgeom import (
    LocalAlgebraSpec,
    Normalization,
    disc_norm,
    disc_norm_symbolic,
    tamagawa_volume_max_compact,
    volume_max_compact_mult,
    volume_quotient,
)
from jlmeasure.symexpr import Q

from .oracles import gl_count_naive


def spec(n, d, dv, q=None, disc=1):
    return LocalAlgebraSpec.from_local_index(n, d, dv, q=q, local_disc_norm=disc)


def all_specs(max_nd=12):
    for nd in range(1, max_nd + 1):
        for n in (x for x in range(1, nd + 1) if nd % x == 0):
            for dv in (x for x in range(1, nd + 1) if nd % x == 0):
                yield spec(n, nd // n, dv)


# -- validation ---------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(n=2, d=1, n_v=1, d_v=1),
    dict(n=0, d=1, n_v=0, d_v=1),
    dict(n=1, d=2, n_v=1, d_v=2, q=6),
    dict(n=1, d=2, n_v=1, d_v=2, q=1),
    dict(n=1, d=1, n_v=1, d_v=1, local_disc_norm=0),
])
def test_invalid_specs(kwargs):
    with pytest.raises(SpecViolationError):
        LocalAlgebraSpec(**kwargs)


def test_local_index_must_divide():
    with pytest.raises(SpecViolationError):
        spec(1, 2, 3)


def test_json_roundtrip():
    for s in (spec(1, 2, 2), spec(2, 3, 3, q=9, disc=4)):
        assert LocalAlgebraSpec.from_json(s.to_json()) == s
    assert LocalAlgebraSpec.from_json({"q": "symbolic", "n": 1, "d": 2, "n_v": 1, "d_v": 2}).q is None
    with pytest.raises(SpecViolationError):
        LocalAlgebraSpec.from_json({"q": 4.5, "n": 1, "d": 2, "n_v": 1, "d_v": 2})
    with pytest.raises(SpecViolationError):
        LocalAlgebraSpec.from_json({"n": 1, "d": 2, "n_v": 1})


# -- multiplicative volumes ------------------------------------------------------

def test_units_have_volume_one():
    assert volume_max_compact_mult(spec(1, 1, 1)).value == 1


def test_gl2_over_f2_against_count():
    # |GL(2, F_2)| / |M(2, F_2)| * (1 - 1/2)^-1 by naive elimination
    expected = Fraction(gl_count_naive(2, 2), 2 ** 4) * 2
    assert expected == Fraction(3, 4)
    assert volume_max_compact_mult(spec(2, 1, 1, q=2)).value == expected


@pytest.mark.parametrize("n,q", [(2, 3), (3, 2), (2, 5)])
def test_gl_field_volume_against_count(n, q):
    expected = Fraction(gl_count_naive(n, q), q ** (n * n)) / (1 - Fraction(1, q))
    assert volume_max_compact_mult(LocalAlgebraSpec(n, 1, n, 1, q=q)).value == expected


def test_quaternion_unit_volume():
    assert volume_max_compact_mult(spec(1, 2, 2, q=3)).value == Fraction(4, 3)
    assert volume_max_compact_mult(spec(1, 2, 2)).normalization is Normalization.MULTIPLICATIVE


# -- discriminants ----------------------------------------------------------------

def test_disc_norm_split():
    for n, d in [(1, 1), (2, 1), (1, 3), (2, 2)]:
        assert disc_norm(LocalAlgebraSpec(n, d, n * d, 1, local_disc_norm=3)) == 3 ** (n * n * d * d)


def test_disc_norm_quaternion():
    for p in (2, 3, 5, 7):
        assert disc_norm(spec(1, 2, 2, q=p)) == p ** 2


def test_disc_norm_split_with_discriminant():
    # exponent (nd)^2 = 4 for n=1, d=2
    assert disc_norm(spec(1, 2, 1, disc=4)) == 4 ** 4 == 256


def test_disc_norm_needs_q_when_ramified():
    with pytest.raises(SpecViolationError):
        disc_norm(spec(1, 2, 2))
    assert disc_norm_symbolic(spec(1, 2, 2)) == Q ** 2


@pytest.mark.parametrize("nv,dv", [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3)])
def test_disc_norm_q_exponent_scales_with_nv_squared(nv, dv):
    one = disc_norm(LocalAlgebraSpec(1, dv, 1, dv, q=3))
    big = disc_norm(LocalAlgebraSpec(nv, dv, nv, dv, q=3))
    assert big == one ** (nv * nv)


# -- Tamagawa volumes ---------------------------------------------------------

def test_tamagawa_examples():
    assert tamagawa_volume_max_compact(spec(1, 1, 1)).value == 1
    assert tamagawa_volume_max_compact(spec(1, 2, 2, q=2)).value == Fraction(3, 4)
    assert tamagawa_volume_max_compact(spec(1, 2, 1)).value == 1 - Q ** -2


def test_tamagawa_formal_sqrt():
    # (nd)^2 = 1 odd, disc 2 not a square
    v = tamagawa_volume_max_compact(spec(1, 1, 1, q=3, disc=2))
    assert v.disc_half_power == -1 and v.has_formal_sqrt
    assert v.to_float() == pytest.approx(2 ** -0.5)
    # square discriminant: rational
    v = tamagawa_volume_max_compact(spec(1, 1, 1, q=3, disc=9))
    assert not v.has_formal_sqrt and v.value == Fraction(1, 3)


def test_volume_quotient_examples():
    assert volume_quotient(spec(2, 3, 1)) == 1
    assert volume_quotient(spec(1, 2, 2)) == Q - 1
    assert volume_quotient(spec(1, 3, 3)) == Q ** 3 * (1 - Q ** -1) * (1 - Q ** -2)
    assert volume_quotient(spec(1, 3, 3)) == (Q - 1) * (Q ** 2 - 1)


def test_volume_quotient_matches_volumes_exhaustive():
    for s in all_specs(12):
        g = tamagawa_volume_max_compact(s.split_form()).value
        gp = tamagawa_volume_max_compact(s).value
        assert volume_quotient(s) * gp == g, s


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(all_specs(8))), st.sampled_from([2, 3, 4, 5, 7, 8, 9, 11, 16, 25]),
       st.integers(1, 5))
def test_volumes_positive(s, q, disc):
    s = LocalAlgebraSpec(s.n, s.d, s.n_v, s.d_v, q=q, local_disc_norm=disc)
    assert volume_max_compact_mult(s).value.as_fraction() > 0
    assert tamagawa_volume_max_compact(s).to_float() > 0
