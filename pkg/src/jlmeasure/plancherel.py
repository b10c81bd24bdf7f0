"""Formal degrees and Plancherel density bookkeeping.

Non-archimedean side: Steinberg formal degrees of ``GL(m, D)`` and the
ratio of Plancherel densities of ``GL(nd, F_v)`` and its inner form
``GL(n_v, D_v)`` under local Tamagawa measures.

Archimedean side: formal degrees of the discrete series ``H_k(omega)`` of
``GL(2, R)`` and of ``V_k(omega)`` of ``H^x``, and the real
Jacquet-Langlands map on tempered parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Mapping, Sequence, Union

from .errors import (
    InvalidParameterError,
    NoDiscreteSeriesError,
    NotSquareIntegrableError,
)
from .localgeom import (
    LocalAlgebraSpec,
    Normalization,
    tamagawa_volume_max_compact,
    volume_quotient,
)
from .symexpr import ONE, PI, SymbolicScalar

# Constant in front of the Steinberg product.  The formula is usually quoted
# as 1/n; which n is meant is ambiguous for inner forms, so the convention is
# selectable.  It must be the same on both sides of a ratio.
STEINBERG_CONVENTIONS = ("nd", "n", "n_v")
DEFAULT_STEINBERG_CONVENTION = "nd"


@dataclass(frozen=True)
class SteinbergDegree:
    value: SymbolicScalar
    group_shape: tuple[int, int]
    normalization: Normalization = Normalization.MASS_ONE
    meta: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class FormalDegree:
    value: SymbolicScalar
    representation_tag: str = ""
    normalization: str = "default"

    def __post_init__(self):
        v = self.value
        if v.is_constant() and v.rational_part() < 0:
            raise InvalidParameterError("formal degree must be nonnegative")


def steinberg_degree(m: int, e: int, q: SymbolicScalar | int | None = None,
                     constant: Fraction | None = None) -> SteinbergDegree:
    """Formal degree of the Steinberg representation of ``GL(m, D)``.

    ``D`` has index ``e`` and the Haar measure gives the maximal compact
    subgroup total mass one.  The value is
    ``c * prod_{i=1}^{m-1} (q^{e i} - 1)`` with ``c = 1/(m e)`` unless
    ``constant`` is given.
    """
    if m < 1 or e < 1:
        raise InvalidParameterError("m and e must be positive")
    qs = _as_q(q)
    c = Fraction(1, m * e) if constant is None else Fraction(constant)
    acc = SymbolicScalar.const(c)
    for i in range(1, m):
        acc = acc * (qs ** (e * i) - 1)
    return SteinbergDegree(acc, (m, e), Normalization.MASS_ONE,
                           {"constant": str(c), "convention": "1/(m*e)" if constant is None else "explicit"})


def _as_q(q) -> SymbolicScalar:
    from .symexpr import Q
    if q is None:
        return Q
    return SymbolicScalar.coerce(q)


def _convention_constant(spec: LocalAlgebraSpec, convention: str) -> Fraction:
    if convention == "nd":
        return Fraction(1, spec.nd)
    if convention == "n":
        return Fraction(1, spec.n)
    if convention == "n_v":
        return Fraction(1, spec.n_v)
    raise ValueError(f"unknown Steinberg convention {convention!r}")


def tamagawa_steinberg_degrees(spec: LocalAlgebraSpec, convention: str = DEFAULT_STEINBERG_CONVENTION
                               ) -> tuple[SteinbergDegree, SteinbergDegree]:
    """Steinberg degrees of ``GL(nd, F_v)`` and ``GL(n_v, D_v)`` under Tamagawa measures.

    A formal degree scales inversely with the Haar measure, so each
    mass-one degree is divided by the Tamagawa volume of the corresponding
    maximal compact subgroup.
    """
    c = _convention_constant(spec, convention)
    q = spec.q_scalar
    split = spec.split_form()
    out = []
    for s in (split, spec):
        deg = steinberg_degree(s.n_v, s.d_v, q, constant=c)
        vol = tamagawa_volume_max_compact(s)
        out.append(SteinbergDegree(deg.value / vol.value, deg.group_shape, Normalization.TAMAGAWA,
                                   {"constant": str(c), "convention": convention,
                                    "disc_half_power": vol.disc_half_power}))
    return out[0], out[1]


def plancherel_ratio(spec: LocalAlgebraSpec, convention: str = DEFAULT_STEINBERG_CONVENTION
                     ) -> SymbolicScalar:
    """``dnu'_v / dnu_v`` for corresponding tempered representations.

    Plancherel densities of corresponding representations are proportional
    to the Steinberg degrees, so the ratio is
    ``deg St_{G'} / deg St_G`` with both degrees taken for the local
    Tamagawa measures.  The result is canonical; it is 1 exactly when the
    Tamagawa normalization makes the correspondence measure preserving.
    """
    deg_g, deg_gp = tamagawa_steinberg_degrees(spec, convention)
    # identical d(F_v) factors (including any formal square roots) cancel
    return deg_gp.value / deg_g.value


def plancherel_ratio_display(spec: LocalAlgebraSpec) -> SymbolicScalar:
    """The ratio assembled factor by factor from the closed forms.

    ``prod_{d_v does not divide i} (q^i - 1)^{-1}`` (Steinberg quotient)
    times the compact volume quotient.
    """
    q = spec.q_scalar
    steinberg = ONE
    for i in range(1, spec.nd + 1):
        if i % spec.d_v:
            steinberg = steinberg * (q ** i - 1)
    return steinberg.inverse() * volume_quotient(spec)


# -- archimedean -----------------------------------------------------------

class Target(str, enum.Enum):
    REAL = "real_group"
    QUATERNIONIC = "quaternionic_group"


@dataclass(frozen=True)
class DS2:
    """Discrete series block ``H_k(omega)`` of GL(2, R) (or ``V_k(omega)``)."""

    k: int
    omega: Hashable = None
    size = 2

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidParameterError(f"discrete series weight must be >= 1, got {self.k!r}")


@dataclass(frozen=True)
class CH1:
    """Unitary character block of GL(1, R): ``sign(x)^eps |x|^{it}``."""

    sign: int
    t: float
    label: Hashable = None
    size = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidParameterError("character sign must be +1 or -1")


Block = Union[DS2, CH1]


@dataclass(frozen=True)
class ArchTemperedParam:
    """A tempered parameter: an ordered list of blocks and a target group.

    For ``real_group`` the blocks partition ``m`` (rank of ``GL(m, R)``)
    into 1s and 2s.  For ``quaternionic_group`` every block is a ``DS2``
    and the group is ``GL(len(blocks), H)``.
    """

    blocks: tuple[Block, ...]
    target: Target = Target.REAL

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "target", Target(self.target))
        if not self.blocks:
            raise InvalidParameterError("a tempered parameter needs at least one block")
        for b in self.blocks:
            if not isinstance(b, (DS2, CH1)):
                raise InvalidParameterError(f"unknown block {b!r}")
        if self.target is Target.QUATERNIONIC and any(isinstance(b, CH1) for b in self.blocks):
            raise InvalidParameterError("quaternionic parameters consist of DS2 blocks only")

    @property
    def partition(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    @property
    def rank(self) -> int:
        """``m`` for GL(m, R); ``m`` for GL(m, H) as well (number of blocks)."""
        if self.target is Target.REAL:
            return sum(self.partition)
        return len(self.blocks)

    def data(self) -> tuple:
        return tuple((b.k, b.omega) if isinstance(b, DS2) else (b.sign, b.t, b.label)
                     for b in self.blocks)

    def to_json(self) -> dict:
        blocks = []
        for b in self.blocks:
            if isinstance(b, DS2):
                blocks.append({"type": "DS2", "k": b.k, "omega": b.omega})
            else:
                blocks.append({"type": "CH1", "sign": "+" if b.sign > 0 else "-", "t": b.t,
                               "label": b.label})
        return {"target": self.target.value, "blocks": blocks}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ArchTemperedParam":
        blocks = []
        for b in data["blocks"]:
            if b["type"] == "DS2":
                blocks.append(DS2(b["k"], b.get("omega")))
            elif b["type"] == "CH1":
                sign = b.get("sign", "+")
                sign = 1 if sign in ("+", 1, "+1") else -1
                blocks.append(CH1(sign, float(b.get("t", 0.0)), b.get("label")))
            else:
                raise InvalidParameterError(f"unknown block type {b['type']!r}")
        return cls(tuple(blocks), Target(data.get("target", "real_group")))


def arch_formal_degree(param: ArchTemperedParam | DS2) -> FormalDegree:
    """Formal degree ``k / (2 pi^2)`` of ``H_k(omega)`` or ``V_k(omega)``.

    Uses the real Tamagawa measure (``PSO(2)`` of mass pi, ``H^x / R^*`` of
    mass ``2 pi^2``); both groups give the same value.
    """
    if isinstance(param, DS2):
        param = ArchTemperedParam((param,), Target.REAL)
    if len(param.blocks) != 1 or not isinstance(param.blocks[0], DS2):
        raise NotSquareIntegrableError(
            f"parameter with partition {param.partition} is not square integrable"
        )
    k = param.blocks[0].k
    name = "H" if param.target is Target.REAL else "V"
    return FormalDegree(SymbolicScalar.const(Fraction(k, 2), -2),
                        f"{name}_{k}({param.blocks[0].omega})", "tamagawa")


def sl2_discrete_series_degree(k: int) -> FormalDegree:
    """Formal degree ``(k-1)/(4 pi)`` of the weight-k holomorphic discrete series of SL(2, R).

    Haar measure ``dt y^-2 dx dy`` (Iwasawa coordinates), the one for which
    ``SL(2, Z)`` has covolume ``pi/3``.
    """
    if not isinstance(k, int) or k < 2:
        raise NoDiscreteSeriesError(f"no holomorphic discrete series of weight {k!r}")
    return FormalDegree(SymbolicScalar.const(Fraction(k - 1, 4), -1), f"pi_{k}", "sl2_iwasawa")


def jl_match_real(param: ArchTemperedParam) -> ArchTemperedParam | None:
    """Real Jacquet-Langlands map ``GL(2n, R) -> GL(n, H)`` on tempered parameters.

    All-``DS2`` parameters go to the quaternionic parameter with the same
    ``(k_i, omega_i)``; anything containing a GL(1) block maps to the zero
    element of the Grothendieck group, returned as ``None``.
    """
    if param.target is not Target.REAL:
        raise InvalidParameterError("jl_match_real expects a real_group parameter")
    if param.rank % 2:
        raise InvalidParameterError(f"GL({param.rank}, R) has odd rank; no inner form GL(n, H)")
    if any(isinstance(b, CH1) for b in param.blocks):
        return None
    return ArchTemperedParam(param.blocks, Target.QUATERNIONIC)


def jl_real_to_json(result: ArchTemperedParam | None) -> dict:
    return {"zero": True} if result is None else result.to_json()


def jl_transferable_padic(levi_partition: Sequence[int], d: int) -> bool:
    """Whether a tempered representation induced from ``prod GL(n_i)`` transfers to the inner form.

    True iff every block size is divisible by the local index ``d``.
    """
    if d < 1:
        raise InvalidParameterError("d must be positive")
    parts = list(levi_partition)
    if any((not isinstance(x, int)) or x < 1 for x in parts):
        raise InvalidParameterError("partition entries must be positive integers")
    return all(x % d == 0 for x in parts)

