from fractions import Fraction

import pytest

from jlmeasure.errors import ResourceError, SpecViolationError
from jlmeasure.localgeom import LocalAlgebraSpec
from jlmeasure.oracle import (
    FiniteRingSpec,
    abelian_index_oracle,
    build_ring,
    count_gl,
    count_gl_by_enumeration,
    order_gl_chain_ring,
    order_gl_finite,
    volume_formula_oracle_check,
)

from .oracles import gl_count_naive, power_index


def test_order_gl_finite_examples():
    assert order_gl_finite(2, 2) == 6
    assert order_gl_finite(2, 3) == 48
    for q in (2, 3, 4, 5, 7):
        assert order_gl_finite(1, q) == q - 1


@pytest.mark.parametrize("n,q", [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)])
def test_enumeration_matches_field_formula(n, q):
    assert count_gl_by_enumeration(n, FiniteRingSpec.field(q)) == order_gl_finite(n, q)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_enumeration_matches_naive_elimination(n, q):
    assert count_gl_by_enumeration(n, FiniteRingSpec.prime_field(q)) == gl_count_naive(n, q)


def test_anchor_values():
    assert count_gl_by_enumeration(2, FiniteRingSpec.prime_field(2)) == 6
    assert count_gl_by_enumeration(2, FiniteRingSpec.prime_field(3)) == 48
    assert count_gl_by_enumeration(3, FiniteRingSpec.prime_field(2)) == 168
    assert count_gl_by_enumeration(1, FiniteRingSpec.field(4)) == 3
    for real in ("galois", "truncated"):
        assert count_gl_by_enumeration(2, FiniteRingSpec.chain_ring(2, 1, 2, real)) == 96


@pytest.mark.parametrize("p,f,m", [(2, 1, 2), (3, 1, 2), (2, 2, 2), (2, 1, 3), (2, 1, 4)])
def test_chain_ring_realizations_agree(p, f, m):
    a = count_gl_by_enumeration(2, FiniteRingSpec.chain_ring(p, f, m, "galois"))
    b = count_gl_by_enumeration(2, FiniteRingSpec.chain_ring(p, f, m, "truncated"))
    assert a == b == order_gl_chain_ring(2, p ** f, m)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2)])
def test_length_recursion(n, p, f):
    base = count_gl_by_enumeration(n, FiniteRingSpec.chain_ring(p, f, 1))
    two = count_gl_by_enumeration(n, FiniteRingSpec.chain_ring(p, f, 2))
    assert two == p ** (f * n * n) * base


def test_counting_methods_agree():
    ring = build_ring(FiniteRingSpec.chain_ring(2, 1, 2))
    assert count_gl(3, ring, "exhaustive") == count_gl(3, ring, "cofactor") == count_gl(3, ring, "residue")
    assert count_gl(3, ring) == order_gl_chain_ring(3, 2, 2) == 86016
    ring = build_ring(FiniteRingSpec.field(3))
    assert count_gl(2, ring, "residue") == count_gl(2, ring, "exhaustive") == 48


def test_chain_ring_structure():
    R = build_ring(FiniteRingSpec.chain_ring(2, 2, 2, "truncated"))
    assert R.order == 16
    assert len(R.maximal_ideal()) == 4
    k, _ = R.residue_field()
    assert k.order == 4
    assert len(R.units) == 12


def test_field_spec_equals_length_one_chain():
    a = count_gl_by_enumeration(2, FiniteRingSpec.field(4))
    b = count_gl_by_enumeration(2, FiniteRingSpec.chain_ring(2, 2, 1))
    assert a == b == 180


def test_spec_validation():
    with pytest.raises(SpecViolationError):
        FiniteRingSpec.prime_field(4)
    with pytest.raises(SpecViolationError):
        FiniteRingSpec.field(6)
    with pytest.raises(SpecViolationError):
        FiniteRingSpec.chain_ring(2, 1, 0)


def test_resource_caps():
    with pytest.raises(ResourceError):
        count_gl_by_enumeration(4, FiniteRingSpec.prime_field(2))
    with pytest.raises(ResourceError):
        count_gl_by_enumeration(2, FiniteRingSpec.chain_ring(2, 1, 9))
    with pytest.raises(ResourceError):
        abelian_index_oracle([201], 2)
    with pytest.raises(ResourceError):
        volume_formula_oracle_check(LocalAlgebraSpec(4, 1, 4, 1, q=2))


@pytest.mark.parametrize("q,nv,dv", [(2, 2, 1), (2, 1, 2), (3, 1, 1), (3, 2, 1), (4, 2, 1), (3, 1, 2)])
def test_volume_oracle(q, nv, dv):
    spec = LocalAlgebraSpec(n=nv * dv, d=1, n_v=nv, d_v=dv, q=q)
    for m in (1, 2):
        v = volume_formula_oracle_check(spec, m)
        assert v.is_equal, v.details


def test_volume_oracle_examples():
    v = volume_formula_oracle_check(LocalAlgebraSpec(2, 1, 2, 1, q=2), 1)
    assert v.details["oracle"] == v.details["closed_form"] == Fraction(3, 4)
    v = volume_formula_oracle_check(LocalAlgebraSpec(2, 1, 1, 2, q=2), 1)
    assert v.details["count"] == 3 and v.details["ring_order"] == 4
    assert volume_formula_oracle_check(LocalAlgebraSpec(1, 1, 1, 1, q=3)).details["oracle"] == 1


def test_abelian_oracle_examples():
    assert abelian_index_oracle([6], 4) == 2
    assert abelian_index_oracle([5], 3) == 1
    assert abelian_index_oracle([2, 4], 2) == 4


@pytest.mark.parametrize("orders", [[6], [8, 8], [2, 4], [3, 9], [2, 2, 2], [12]])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_abelian_oracle_matches_independent_count(orders, n):
    assert abelian_index_oracle(orders, n) == power_index(orders, n)
