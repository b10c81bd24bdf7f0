"""Von Neumann dimensions and densities of lattices.

``dim_{L(Gamma)} H = covol(Gamma) * d(pi)`` for discrete series, and the
continuous analogue ``covol(Gamma) * dnu(pi)`` against the Plancherel
density.  Both factors must refer to the same Haar measure; every object
here carries a normalization tag and mismatches are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Mapping, Union

import mpmath

from .adelic import CovolumeExpr, GlobalSetup, covolume_equality_check
from .errors import DomainError, InputError, NormalizationError
from .localgeom import LocalAlgebraSpec
from .plancherel import (
    DS2,
    FormalDegree,
    Target,
    ArchTemperedParam,
    arch_formal_degree,
    plancherel_ratio,
    tamagawa_steinberg_degrees,
)
from .symexpr import SymbolicScalar
from .verdict import Verdict

PROFILES = ("one", "t_tanh", "t_coth")


@dataclass(frozen=True)
class LatticeDatum:
    """Covolume ``mu(Gamma \\ G)`` in a declared Haar normalization."""

    covolume: SymbolicScalar
    label: str = ""
    normalization: str = "default"

    def __post_init__(self):
        object.__setattr__(self, "covolume", SymbolicScalar.coerce(self.covolume))
        c = self.covolume
        if c.is_zero() or (c.is_constant() and c.rational_part() <= 0):
            raise InputError(f"covolume must be positive, got {c.to_text()}")


@dataclass(frozen=True)
class GammaDensity:
    """A density ``coefficient * profile(t)`` with respect to ``reference_measure``.

    ``profile`` is ``"one"`` (constant), ``"t_tanh"`` for ``t tanh(pi t/2)``
    or ``"t_coth"`` for ``t coth(pi t/2)``.
    """

    coefficient: SymbolicScalar
    profile: str = "one"
    reference_measure: str = "dt Lebesgue"
    normalization: str = "default"

    def __post_init__(self):
        object.__setattr__(self, "coefficient", SymbolicScalar.coerce(self.coefficient))
        if self.profile not in PROFILES:
            raise InputError(f"unknown density profile {self.profile!r}")
        c = self.coefficient
        if c.is_constant() and not c.is_zero() and c.rational_part() < 0:
            raise InputError("densities are nonnegative")

    def __call__(self, t: float, digits: int = 30) -> float:
        if self.profile != "one" and t <= 0:
            raise DomainError("density defined for t > 0")
        with mpmath.workdps(digits):
            c = self.coefficient
            r = c.rational_part()
            coef = mpmath.mpf(r.numerator) / r.denominator * mpmath.pi ** c.pi_exponent
            return float(coef * _profile(self.profile, mpmath.mpf(t)))

    def to_text(self) -> str:
        tail = {"one": "", "t_tanh": "·t·tanh(pi*t/2)", "t_coth": "·t·coth(pi*t/2)"}[self.profile]
        return f"{self.coefficient.to_text()}{tail} {self.reference_measure}"


def _profile(profile: str, t):
    if profile == "one":
        return mpmath.mpf(1)
    x = mpmath.pi * t / 2
    return t * (mpmath.tanh(x) if profile == "t_tanh" else mpmath.coth(x))


def _check_tags(a: str, b: str) -> None:
    if a != b:
        raise NormalizationError(f"Haar normalizations differ: {a!r} vs {b!r}")


def gamma_dimension(lat: LatticeDatum, deg: FormalDegree | SymbolicScalar) -> SymbolicScalar:
    """``covol * d(pi)``; a bare scalar degree is taken in the lattice's normalization."""
    if isinstance(deg, FormalDegree):
        _check_tags(lat.normalization, deg.normalization)
        deg = deg.value
    return lat.covolume * SymbolicScalar.coerce(deg)


def gamma_density(lat: LatticeDatum, density: GammaDensity) -> GammaDensity:
    """Pointwise product ``covol * dnu``, same reference measure."""
    _check_tags(lat.normalization, density.normalization)
    return GammaDensity(lat.covolume * density.coefficient, density.profile,
                        density.reference_measure, density.normalization)


def sl2_principal_series_density(sign: int) -> GammaDensity:
    """Plancherel density of ``H_{it}^{+/-}`` for SL(2, R), Iwasawa Haar measure.

    ``(t / (8 pi)) tanh(pi t / 2)`` for even, ``coth`` for odd principal
    series; the constant is the one making the SL(2, Z) Gamma-density come
    out as ``(t/24) tanh(pi t/2)`` given covolume ``pi/3``.
    """
    if sign not in (1, -1):
        raise InputError("sign must be +1 or -1")
    return GammaDensity(SymbolicScalar.const(Fraction(1, 8), -1),
                        "t_tanh" if sign == 1 else "t_coth", "dt Lebesgue", "sl2_iwasawa")


def ps_density(t: float, sign: int | str = 1, digits: int = 30) -> float:
    """Numeric value of :func:`sl2_principal_series_density` at ``t > 0``."""
    if isinstance(sign, str):
        sign = {"+": 1, "-": -1}.get(sign, sign)
    if not t > 0:
        raise DomainError(f"principal series parameter must be positive, got {t}")
    return sl2_principal_series_density(sign)(t, digits)


# -- density preservation -------------------------------------------------

Density = Union[SymbolicScalar, FormalDegree, GammaDensity]


@dataclass(frozen=True)
class DensitySide:
    """One side of a comparison: a covolume and local densities per place."""

    covolume: Union[CovolumeExpr, LatticeDatum]
    local: Mapping[Hashable, Density]


def _density_key(x: Density) -> Any:
    if isinstance(x, FormalDegree):
        return ("deg", x.value, x.normalization)
    if isinstance(x, GammaDensity):
        return ("density", x.coefficient, x.profile, x.reference_measure, x.normalization)
    return ("deg", SymbolicScalar.coerce(x), None)


def _covolume_verdict(left, right, setup: GlobalSetup | None) -> Verdict:
    if isinstance(left, CovolumeExpr) and isinstance(right, CovolumeExpr):
        if setup is None:
            raise InputError("comparing covolume expressions needs the global setup")
        return covolume_equality_check(left, right, setup)
    if isinstance(left, LatticeDatum) and isinstance(right, LatticeDatum):
        _check_tags(left.normalization, right.normalization)
        if left.covolume == right.covolume:
            return Verdict.equal()
        return Verdict.not_equal("covolume", left=left.covolume.to_text(), right=right.covolume.to_text())
    raise InputError("both sides must give covolumes of the same kind")


def density_preservation_check(left: DensitySide | tuple, right: DensitySide | tuple,
                               setup: GlobalSetup | None = None,
                               local_specs: Mapping[Hashable, LocalAlgebraSpec] | None = None) -> Verdict:
    """Whether ``covol * density`` agrees for a matched pair of lattices.

    Composes three checks: covolumes (via the covolume verifier when given
    as expressions), ``plancherel_ratio = 1`` for every place in
    ``local_specs``, and equality of the supplied local densities.
    """
    left = left if isinstance(left, DensitySide) else DensitySide(*left)
    right = right if isinstance(right, DensitySide) else DensitySide(*right)
    if set(left.local) != set(right.local):
        raise InputError("local densities supplied at different places")

    cov = _covolume_verdict(left.covolume, right.covolume, setup)
    if cov.status == "inconclusive":
        return cov
    if not cov.is_equal:
        return Verdict.not_equal("covolume", component=cov.witness, **cov.details)

    for v, spec in sorted((local_specs or {}).items(), key=lambda kv: str(kv[0])):
        r = plancherel_ratio(spec)
        if r != 1:
            return Verdict.not_equal("plancherel_ratio", place=v, ratio=r.to_text())

    for v in sorted(left.local, key=str):
        a, b = left.local[v], right.local[v]
        ka, kb = _density_key(a), _density_key(b)
        if ka[0] != kb[0]:
            raise InputError(f"densities at {v!r} are not comparable")
        if ka != kb:
            return Verdict.not_equal("local_density", place=v)
    return Verdict.equal(places=len(left.local), ratio_places=len(local_specs or {}))


def jl_pair_densities(local_specs: Mapping[Hashable, LocalAlgebraSpec],
                      arch_weights: Mapping[Hashable, int] | None = None
                      ) -> tuple[dict, dict]:
    """Local densities at matched parameters for both groups of a JL pair.

    Finite places: Steinberg formal degrees under the local Tamagawa
    measures.  Archimedean places: ``H_k`` on the split side and its image
    ``V_k`` under the real correspondence on the other.
    """
    left, right = {}, {}
    for v, spec in local_specs.items():
        g, gp = tamagawa_steinberg_degrees(spec)
        left[v], right[v] = FormalDegree(g.value, f"St_{v}", "tamagawa"), \
            FormalDegree(gp.value, f"St'_{v}", "tamagawa")
    for v, k in (arch_weights or {}).items():
        ds = DS2(k)
        left[v] = arch_formal_degree(ArchTemperedParam((ds,), Target.REAL))
        right[v] = arch_formal_degree(ArchTemperedParam((ds,), Target.QUATERNIONIC))
    return left, right


__all__ = [
    "LatticeDatum", "GammaDensity", "DensitySide", "gamma_dimension", "gamma_density",
    "ps_density", "sl2_principal_series_density", "density_preservation_check",
    "jl_pair_densities",
]
