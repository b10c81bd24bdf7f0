"""Composite verifications: per-place JL reports and the full invariant sweep."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Mapping

from .adelic import (
    GlobalSetup,
    PadicPlace,
    RestrictedProductSpec,
    TailRule,
    abelian_power_index,
    covolume_equality_check,
    inner_form_covolume_expr,
    restricted_product_measure,
)
from .errors import InputError
from .localgeom import LocalAlgebraSpec
from .plancherel import (
    DS2,
    ArchTemperedParam,
    Target,
    arch_formal_degree,
    jl_match_real,
    plancherel_ratio,
    sl2_discrete_series_degree,
)
from .symexpr import PI, SymbolicScalar
from .verdict import Verdict
from .vndensity import (
    DensitySide,
    LatticeDatum,
    density_preservation_check,
    gamma_dimension,
    jl_pair_densities,
    ps_density,
)


def verify_jl_preservation(setup: GlobalSetup, local_specs: Mapping[Hashable, LocalAlgebraSpec],
                           max_weight: int = 10) -> dict:
    """Per-place report that the local correspondence preserves Plancherel densities.

    Finite places get ``plancherel_ratio``; ramified real places compare the
    formal degrees of ``H_k`` and ``V_k`` for ``k <= max_weight``.  The
    Tamagawa note checks that the local discriminant norms supplied at the
    listed places multiply to ``|D_F|``.
    """
    nds = {s.nd for s in local_specs.values()}
    if len(nds) > 1:
        raise InputError(f"places disagree on nd: {sorted(nds)}")
    nd = nds.pop() if nds else None
    rows = []
    ok = True
    for v in sorted(local_specs, key=str):
        spec = local_specs[v]
        if v not in setup.places:
            raise InputError(f"place {v!r} is not a finite place of the setup")
        if spec.q is not None and spec.q != setup.places[v]:
            raise InputError(f"q at {v!r} is {spec.q}, setup says {setup.places[v]}")
        if v in setup.ram_set and spec.d_v == 1:
            raise InputError(f"place {v!r} is ramified but d_v = 1")
        if v not in setup.ram_set and spec.d_v != 1:
            raise InputError(f"d_v = {spec.d_v} at unramified place {v!r}")
        r = plancherel_ratio(spec)
        rows.append({"place": str(v), "kind": "finite", "d_v": spec.d_v, "ratio": r.to_text(),
                     "verdict": "equal" if r == 1 else "not_equal"})
        ok &= r == 1
    for v in setup.archimedean:
        if v not in setup.ram_set:
            rows.append({"place": v, "kind": "archimedean", "d_v": 1, "ratio": "1", "verdict": "equal"})
            continue
        if setup.place_kind(v) == "complex":
            raise InputError(f"complex place {v!r} cannot ramify")
        if nd is not None and nd % 2:
            raise InputError("a real place ramifies only when nd is even")
        equal = all(
            arch_formal_degree(ArchTemperedParam((DS2(k),), Target.REAL)).value
            == arch_formal_degree(jl_match_real(ArchTemperedParam((DS2(k),), Target.REAL))).value
            for k in range(1, max_weight + 1))
        rows.append({"place": v, "kind": "archimedean", "d_v": 2, "ratio": "1" if equal else "?",
                     "verdict": "equal" if equal else "not_equal"})
        ok &= equal
    disc = [setup.local_disc_norms.get(v, 1) for v in setup.places]
    compatible = math.prod(disc) == setup.abs_discriminant
    note = {
        "local_measure": "tamagawa",
        "product_of_local_disc_norms": math.prod(disc),
        "abs_discriminant": setup.abs_discriminant,
        "verdict": "equal" if compatible else "not_equal",
    }
    ok &= compatible
    return {"places": rows, "tamagawa_compatibility": note, "verdict": "equal" if ok else "not_equal"}


# -- synthesized global setups ------------------------------------------------

@dataclass(frozen=True)
class JLSetup:
    setup: GlobalSetup
    n: int
    d: int
    local_index: Mapping[Hashable, int]
    padic: Mapping[Hashable, PadicPlace] = field(default_factory=dict)


def _rational_setup(places, ram, S):
    return GlobalSetup(1, (1, 0), 2, {p: p for p in places}, frozenset(ram), frozenset(S))


def _gaussian_setup(ram, S):
    # Q(i): (1+i) over 2 with d(F_v) = 4, 5 splits, 3 is inert
    places = {"p2": 2, "p5a": 5, "p5b": 5, "p3": 9, "p13a": 13}
    return GlobalSetup(4, (0, 1), 4, places, frozenset(ram), frozenset(S), {"p2": 4})


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _gaussian_padic(nd: int) -> dict:
    # mu(Q_2(i)) = mu_4, Q_3(i) = Q_9 has mu_8; |n|^-1 = q^{e v_p(n)}
    return {
        "p2": PadicPlace(2, 2, math.gcd(nd, 4), 4 ** _vp(nd, 2)),
        "p3": PadicPlace(9, 3, math.gcd(nd, 8), 9 ** _vp(nd, 3)),
        "p5a": PadicPlace(5, 5, math.gcd(nd, 4), 5 ** _vp(nd, 5)),
        "p5b": PadicPlace(5, 5, math.gcd(nd, 4), 5 ** _vp(nd, 5)),
        "p13a": PadicPlace(13, 13, math.gcd(nd, 12), 13 ** _vp(nd, 13)),
    }


def synthesized_jl_setups() -> tuple[list[JLSetup], list[JLSetup]]:
    """Matched inner-form setups: (ram inside S, some ramified place outside S)."""
    good, bad = [], []
    primes = [2, 3, 5, 7, 11]
    quaternion_rams = [{2, "inf1"}, {3, "inf1"}, {2, 3}, {2, 5}, {5, 7}, {3, 11}, {2, 3, 5, "inf1"}]
    for n in (1, 2):
        for ram in quaternion_rams:
            idx = {v: 2 for v in ram}
            good.append(JLSetup(_rational_setup(primes, ram, ram | {"inf1"}), n, 2, idx))
            extra = {"inf1", primes[-1]} | ram
            good.append(JLSetup(_rational_setup(primes, ram, extra), n, 2, idx))
            finite = sorted(v for v in ram if v != "inf1")
            S_bad = (ram - {finite[0]}) | {"inf1"}
            bad.append(JLSetup(_rational_setup(primes, ram, S_bad), n, 2, idx))
    for ram in ({2, 3}, {5, 7}, {2, 7}):
        idx = {v: 3 for v in ram}
        good.append(JLSetup(_rational_setup(primes, ram, ram | {"inf1"}), 1, 3, idx))
        bad.append(JLSetup(_rational_setup(primes, ram, {"inf1"}), 1, 3, idx))
    for ram in ({"p2", "p5a"}, {"p3", "p5b"}):
        idx = {v: 2 for v in ram}
        good.append(JLSetup(_gaussian_setup(ram, ram | {"inf1"}), 1, 2, idx, _gaussian_padic(2)))
        bad.append(JLSetup(_gaussian_setup(ram, {"inf1", "p13a"}), 1, 2, idx, _gaussian_padic(2)))
    return good, bad


def jl_covolume_pair(js: JLSetup):
    left = inner_form_covolume_expr(js.setup, js.n, js.d, {}, padic=js.padic)
    right = inner_form_covolume_expr(js.setup, js.n, js.d, js.local_index, padic=js.padic)
    return left, right


def jl_density_verdict(js: JLSetup, weight: int = 4) -> Verdict:
    """density_preservation_check on the matched pair built from ``js``."""
    left, right = jl_covolume_pair(js)
    specs = {v: LocalAlgebraSpec.from_local_index(js.n, js.d, js.local_index.get(v, 1),
                                                  q=js.setup.places[v],
                                                  local_disc_norm=js.setup.local_disc_norms.get(v, 1))
             for v in js.setup.places}
    real = [v for v in js.setup.archimedean if js.setup.place_kind(v) == "real"]
    ld, rd = jl_pair_densities(specs, {v: weight for v in real} if js.n * js.d == 2 else {})
    return density_preservation_check(DensitySide(left, ld), DensitySide(right, rd), js.setup, specs)


# -- verify-all --------------------------------------------------------------

@dataclass
class CheckRow:
    name: str
    cases: int
    passed: bool
    seconds: float
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "cases": self.cases, "passed": self.passed,
                "seconds": round(self.seconds, 3), "detail": self.detail}


def _timed(name: str, fn: Callable[[], tuple[int, bool, str]]) -> CheckRow:
    t = time.perf_counter()
    cases, ok, detail = fn()
    return CheckRow(name, cases, ok, time.perf_counter() - t, detail)


def _ratio_sweep(max_nd: int):
    bad, cases = [], 0
    for nd in range(1, max_nd + 1):
        for n in range(1, nd + 1):
            if nd % n:
                continue
            for dv in range(1, nd + 1):
                if nd % dv:
                    continue
                cases += 1
                r = plancherel_ratio(LocalAlgebraSpec.from_local_index(n, nd // n, dv))
                if r != 1:
                    bad.append((n, nd // n, dv, r.to_text()))
    return cases, not bad, f"failures: {bad[:3]}" if bad else ""


def _gamma_table():
    lat = LatticeDatum(PI / 3, "SL(2,Z)", "sl2_iwasawa")
    ok = all(gamma_dimension(lat, sl2_discrete_series_degree(k)) == Fraction(k - 1, 12)
             for k in range(2, 13))
    return 11, ok, ""


def _arch_degrees():
    ok = True
    for k in range(1, 11):
        p = ArchTemperedParam((DS2(k),), Target.REAL)
        h, v = arch_formal_degree(p).value, arch_formal_degree(jl_match_real(p)).value
        ok &= h == v == SymbolicScalar.const(Fraction(k, 2), -2)
    return 10, ok, ""


def _ps_density():
    worst = 0.0
    for t in (0.5, 1, 2, 5, 10):
        for sign, f in ((1, math.tanh), (-1, lambda x: 1 / math.tanh(x))):
            exp = t / 24 * f(math.pi * t / 2)
            worst = max(worst, abs(math.pi / 3 * ps_density(t, sign) - exp) / exp)
    return 10, worst <= 1e-12, f"max relative error {worst:.2e}"


def _volume_oracle():
    from .oracle import volume_formula_oracle_check
    cases, bad = 0, []
    for q in (2, 3):
        for nv in (1, 2, 3):
            for dv in (1, 2):
                for m in (1, 2):
                    spec = LocalAlgebraSpec(n=nv * dv, d=1, n_v=nv, d_v=dv, q=q)
                    cases += 1
                    if not volume_formula_oracle_check(spec, m).is_equal:
                        bad.append((q, nv, dv, m))
    return cases, not bad, f"failures: {bad}" if bad else ""


def _index_oracle():
    from .oracle import abelian_index_oracle
    cases, bad = 0, []
    for group in _small_abelian_groups(200):
        for n in range(1, 13):
            cases += 1
            if abelian_index_oracle(group, n) != abelian_power_index(0, group, n):
                bad.append((group, n))
    return cases, not bad, f"failures: {bad[:3]}" if bad else ""


def _small_abelian_groups(max_order: int) -> list[tuple[int, ...]]:
    out = [(w,) for w in range(1, max_order + 1)]
    out += [(a, b) for a in range(2, max_order + 1) for b in range(a, max_order // a + 1) if b % a == 0]
    out += [(a, b, c) for a in range(2, 7) for b in range(a, 13, a) for c in range(b, max_order // (a * b) + 1, b)]
    return out


def _euler_tail(prime_cap: int | None):
    r = restricted_product_measure(RestrictedProductSpec({}, TailRule((-2,), True), 1e-6), prime_cap)
    err = abs(float(r.value) - math.pi ** 2 / 6)
    return 1, err <= r.error_bound <= 1e-6, f"|err| = {err:.2e}, bound {r.error_bound:.2e}"


def _covolume_sweep():
    good, bad = synthesized_jl_setups()
    ok = all(covolume_equality_check(*jl_covolume_pair(js), js.setup).is_equal for js in good)
    ok &= all(covolume_equality_check(*jl_covolume_pair(js), js.setup).status == "inconclusive" for js in bad)
    ok &= all(jl_density_verdict(js).is_equal for js in good)
    return len(good) + len(bad), ok, f"{len(good)} matched, {len(bad)} with ram outside S"


def verify_all(max_nd: int = 12, prime_cap: int | None = None, include_oracle: bool = True) -> list[CheckRow]:
    """Run every module invariant sweep; rows are in a fixed order."""
    checks: list[tuple[str, Callable]] = [
        ("plancherel_ratio", lambda: _ratio_sweep(max_nd)),
        ("gamma_dimension_table", _gamma_table),
        ("arch_formal_degree", _arch_degrees),
        ("ps_density", _ps_density),
        ("euler_tail", lambda: _euler_tail(prime_cap)),
        ("covolume_equality", _covolume_sweep),
        ("abelian_index_oracle", _index_oracle),
    ]
    if include_oracle:
        checks.append(("volume_oracle", _volume_oracle))
    return [_timed(name, fn) for name, fn in checks]
