from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jlmeasure.errors import InvalidParameterError, NoDiscreteSeriesError, NotSquareIntegrableError
from jlmeasure.localgeom import LocalAlgebraSpec
from jlmeasure.plancherel import (
    CH1,
    DS2,
    STEINBERG_CONVENTIONS,
    ArchTemperedParam,
    Target,
    arch_formal_degree,
    jl_match_real,
    jl_real_to_json,
    jl_transferable_padic,
    plancherel_ratio,
    plancherel_ratio_display,
    sl2_discrete_series_degree,
    steinberg_degree,
    tamagawa_steinberg_degrees,
)
from jlmeasure.symexpr import PI, Q, SymbolicScalar, evaluate_at

from .oracles import machin_pi
from .test_localgeom import all_specs


def spec(n, d, dv, q=None):
    return LocalAlgebraSpec.from_local_index(n, d, dv, q=q)


# -- Steinberg ------------------------------------------------------------------

def test_steinberg_examples():
    assert steinberg_degree(2, 1).value == (Q - 1) / 2
    for e in (1, 2, 5):
        assert steinberg_degree(1, e).value == Fraction(1, e)
    assert steinberg_degree(2, 2, 3).value == 2
    assert steinberg_degree(2, 1).meta["convention"] == "1/(m*e)"


def test_steinberg_rejects_bad_shape():
    with pytest.raises(InvalidParameterError):
        steinberg_degree(0, 1)


@pytest.mark.parametrize("m,e,q", [(3, 1, 2), (2, 3, 5), (4, 1, 3)])
def test_steinberg_positive_at_q(m, e, q):
    assert steinberg_degree(m, e, q).value.as_fraction() > 0


# -- ratio identity ------------------------------------------------------------

def test_ratio_examples():
    assert plancherel_ratio(spec(1, 2, 2)) == 1
    assert plancherel_ratio(spec(3, 1, 1)) == 1
    assert plancherel_ratio(spec(2, 2, 4, q=5)) == 1


def test_ratio_is_one_exhaustive():
    bad = [s for s in all_specs(12) if plancherel_ratio(s) != 1]
    assert not bad


def test_display_form_is_one():
    for s in all_specs(8):
        assert plancherel_ratio_display(s) == 1


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(list(all_specs(10))), st.sampled_from(STEINBERG_CONVENTIONS))
def test_ratio_independent_of_convention(s, convention):
    assert plancherel_ratio(s, convention) == plancherel_ratio(s, "nd") == 1


def test_convention_changes_degrees_but_not_ratio():
    s = spec(2, 2, 2)
    a = tamagawa_steinberg_degrees(s, "nd")[0].value
    b = tamagawa_steinberg_degrees(s, "n")[0].value
    assert a != b and b == 2 * a


def test_tamagawa_degrees_carry_convention():
    g, gp = tamagawa_steinberg_degrees(spec(1, 2, 2))
    assert g.meta["convention"] == "nd" and g.value == gp.value


def test_ratio_with_numeric_q_and_discriminant():
    s = LocalAlgebraSpec.from_local_index(1, 2, 2, q=4, local_disc_norm=3)
    assert plancherel_ratio(s) == 1


# -- archimedean ---------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 11))
def test_arch_degree_both_targets(k):
    h = arch_formal_degree(ArchTemperedParam((DS2(k, "w"),), Target.REAL))
    v = arch_formal_degree(ArchTemperedParam((DS2(k, "w"),), Target.QUATERNIONIC))
    assert h.value == v.value == SymbolicScalar.const(Fraction(k, 2), -2)


def test_arch_degree_k3_numeric():
    val = evaluate_at(arch_formal_degree(DS2(3)).value, None, 25)
    ref = Fraction(3, 2) / machin_pi(40) ** 2
    assert abs(float(val.value) - float(ref)) < 1e-15
    assert str(ref.numerator * 10 ** 9 // ref.denominator) == "151981775"


def test_arch_degree_multiblock():
    with pytest.raises(NotSquareIntegrableError):
        arch_formal_degree(ArchTemperedParam((DS2(2), DS2(3))))
    with pytest.raises(NotSquareIntegrableError):
        arch_formal_degree(ArchTemperedParam((CH1(1, 0.5),)))


def test_sl2_degree():
    assert sl2_discrete_series_degree(2).value == SymbolicScalar.const(Fraction(1, 4), -1)
    assert sl2_discrete_series_degree(12).value == SymbolicScalar.const(Fraction(11, 4), -1)
    for k in range(2, 13):
        assert PI / 3 * sl2_discrete_series_degree(k).value == Fraction(k - 1, 12)
    with pytest.raises(NoDiscreteSeriesError):
        sl2_discrete_series_degree(1)


def test_jl_real_examples():
    p = ArchTemperedParam((DS2(3, "w1"), DS2(5, "w2")))
    img = jl_match_real(p)
    assert img.target is Target.QUATERNIONIC and img.data() == p.data()
    assert jl_match_real(ArchTemperedParam((DS2(2, "w"), CH1(1, 0.7, "w'"), CH1(-1, 0.1)))) is None
    assert jl_real_to_json(None) == {"zero": True}
    with pytest.raises(InvalidParameterError):
        jl_match_real(ArchTemperedParam((DS2(2), CH1(1, 0.0))))
    with pytest.raises(InvalidParameterError):
        ArchTemperedParam((CH1(1, 0.0), CH1(1, 1.0)), Target.QUATERNIONIC)


ds_lists = st.lists(st.builds(DS2, st.integers(1, 30), st.sampled_from(["a", "b", None])), min_size=1, max_size=4)


@settings(max_examples=50, deadline=None)
@given(ds_lists, ds_lists)
def test_jl_real_injective_and_preserves_data(a, b):
    pa, pb = ArchTemperedParam(tuple(a)), ArchTemperedParam(tuple(b))
    ia, ib = jl_match_real(pa), jl_match_real(pb)
    assert ia.data() == pa.data()
    assert (ia == ib) == (pa.data() == pb.data())
    for x, y in zip(pa.blocks, ia.blocks):
        assert arch_formal_degree(x).value == arch_formal_degree(
            ArchTemperedParam((y,), Target.QUATERNIONIC)).value


@settings(max_examples=30, deadline=None)
@given(ds_lists)
def test_param_json_roundtrip(blocks):
    p = ArchTemperedParam(tuple(blocks))
    assert ArchTemperedParam.from_json(p.to_json()) == p


def test_padic_transfer():
    assert jl_transferable_padic([2, 2], 2)
    assert not jl_transferable_padic([2, 1], 2)
    assert jl_transferable_padic([3, 1, 4], 1)
    with pytest.raises(InvalidParameterError):
        jl_transferable_padic([0, 2], 2)


def test_bad_blocks():
    with pytest.raises(InvalidParameterError):
        DS2(0)
    with pytest.raises(InvalidParameterError):
        CH1(2, 0.0)
