"""Central simple algebras over a non-archimedean local field.

A :class:`LocalAlgebraSpec` describes ``A_v = M(n_v, D_v)`` sitting inside
a global ``GL(n, D)``: ``D`` has index ``d``, ``D_v`` has index ``d_v`` and
``n_v * d_v = n * d``.  The residue field has ``q`` elements; ``q`` is
either a concrete prime power or ``None`` for the formal variable.

Volumes are returned as :class:`VolumeResult`, which carries the value as
a :class:`~jlmeasure.symexpr.SymbolicScalar` together with the Haar
normalization it refers to.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .errors import SpecViolationError
from .symexpr import ONE, Q, SymbolicScalar


class Normalization(str, enum.Enum):
    MULTIPLICATIVE = "multiplicative"
    TAMAGAWA = "tamagawa"
    MASS_ONE = "mass_one"


def is_prime_power(x: int) -> bool:
    if x < 2:
        return False
    p = 2
    while p * p <= x:
        if x % p == 0:
            while x % p == 0:
                x //= p
            return x == 1
        p += 1
    return True


def _is_square(x: int) -> bool:
    r = math.isqrt(x)
    return r * r == x


@dataclass(frozen=True)
class LocalAlgebraSpec:
    n: int
    d: int
    n_v: int
    d_v: int
    q: int | None = None
    local_disc_norm: int = 1

    def __post_init__(self):
        validate_spec(self)

    @property
    def nd(self) -> int:
        return self.n * self.d

    @property
    def split(self) -> bool:
        return self.d_v == 1

    @property
    def q_scalar(self) -> SymbolicScalar:
        return Q if self.q is None else SymbolicScalar.const(self.q)

    @classmethod
    def from_local_index(cls, n: int, d: int, d_v: int, q: int | None = None,
                         local_disc_norm: int = 1) -> "LocalAlgebraSpec":
        """Build a spec from (n, d, d_v); ``n_v`` is forced to ``nd / d_v``."""
        if d_v < 1 or (n * d) % d_v:
            raise SpecViolationError(f"d_v={d_v} does not divide nd={n * d}")
        return cls(n=n, d=d, n_v=n * d // d_v, d_v=d_v, q=q,
                   local_disc_norm=local_disc_norm)

    def split_form(self) -> "LocalAlgebraSpec":
        """The split algebra M(nd, F_v) with the same residue data."""
        return LocalAlgebraSpec(n=self.n, d=self.d, n_v=self.nd, d_v=1, q=self.q,
                                local_disc_norm=self.local_disc_norm)

    def to_json(self) -> dict:
        return {"q": "symbolic" if self.q is None else self.q,
                "local_disc_norm": self.local_disc_norm,
                "n": self.n, "d": self.d, "n_v": self.n_v, "d_v": self.d_v}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "LocalAlgebraSpec":
        q = data.get("q", "symbolic")
        if q == "symbolic" or q is None:
            q = None
        elif not isinstance(q, int) or isinstance(q, bool):
            raise SpecViolationError(f"q must be an integer or 'symbolic', got {q!r}")
        try:
            return cls(n=data["n"], d=data["d"], n_v=data["n_v"], d_v=data["d_v"], q=q,
                       local_disc_norm=data.get("local_disc_norm", 1))
        except KeyError as exc:
            raise SpecViolationError(f"missing field {exc.args[0]!r}") from None


def validate_spec(spec: LocalAlgebraSpec) -> None:
    for name in ("n", "d", "n_v", "d_v", "local_disc_norm"):
        v = getattr(spec, name)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise SpecViolationError(f"{name} must be a positive integer, got {v!r}")
    if spec.n_v * spec.d_v != spec.n * spec.d:
        raise SpecViolationError(
            f"n_v*d_v = {spec.n_v * spec.d_v} differs from n*d = {spec.n * spec.d}"
        )
    if spec.q is not None:
        if not isinstance(spec.q, int) or not is_prime_power(spec.q):
            raise SpecViolationError(f"q = {spec.q!r} is not a prime power")


@dataclass(frozen=True)
class VolumeResult:
    """A local volume.

    ``disc_half_power`` records a leftover formal factor
    ``sqrt(local_disc_norm) ** disc_half_power`` that could not be absorbed
    into the rational value (odd exponent, non-square discriminant norm).
    """

    value: SymbolicScalar
    normalization: Normalization
    disc_half_power: int = 0
    local_disc_norm: int = 1
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def has_formal_sqrt(self) -> bool:
        return self.disc_half_power != 0

    def to_float(self, q: int | None = None) -> float:
        v = self.value if q is None else self.value.substitute(q)
        return float(v) * math.sqrt(self.local_disc_norm) ** self.disc_half_power

    def __truediv__(self, other: "VolumeResult") -> SymbolicScalar:
        if self.normalization != other.normalization:
            raise SpecViolationError("volumes in different normalizations")
        if (self.disc_half_power, self.local_disc_norm) != (other.disc_half_power, other.local_disc_norm) \
                and (self.has_formal_sqrt or other.has_formal_sqrt):
            raise SpecViolationError("formal square-root factors do not cancel")
        return self.value / other.value


def _unit_product(q: SymbolicScalar, n_v: int, d_v: int) -> SymbolicScalar:
    # prod_{i=1}^{n_v} (1 - q^{-d_v i})
    acc = ONE
    for i in range(1, n_v + 1):
        acc = acc * (1 - q ** (-d_v * i))
    return acc


def volume_max_compact_mult(spec: LocalAlgebraSpec) -> VolumeResult:
    """Volume of ``GL(n_v, O(D_v))`` for the multiplicative Haar measure.

    The additive measure gives the maximal order volume 1 and
    ``dx* = (1 - 1/q)^-1 dx / ||x||``.
    """
    validate_spec(spec)
    q = spec.q_scalar
    value = (1 - q ** -1).inverse() * _unit_product(q, spec.n_v, spec.d_v)
    return VolumeResult(value, Normalization.MULTIPLICATIVE)


def disc_norm(spec: LocalAlgebraSpec) -> int:
    """Absolute norm of the discriminant of the maximal order of ``A_v``.

    ``d(F_v)^{(nd)^2} * q^{d_v (d_v - 1) n_v^2}``; needs a concrete q unless
    ``d_v = 1``.
    """
    validate_spec(spec)
    q_exp = spec.d_v * (spec.d_v - 1) * spec.n_v ** 2
    if q_exp and spec.q is None:
        raise SpecViolationError("disc_norm of a non-split algebra needs a concrete q")
    base = spec.local_disc_norm ** (spec.nd ** 2)
    return base * (spec.q ** q_exp if q_exp else 1)


def disc_norm_symbolic(spec: LocalAlgebraSpec) -> SymbolicScalar:
    """``disc_norm`` with q kept formal."""
    validate_spec(spec)
    q_exp = spec.d_v * (spec.d_v - 1) * spec.n_v ** 2
    return spec.local_disc_norm ** (spec.nd ** 2) * spec.q_scalar ** q_exp


def _disc_factor(local_disc_norm: int, exponent: int) -> tuple[SymbolicScalar, int]:
    """``local_disc_norm ** (-exponent / 2)`` as (rational part, leftover half power)."""
    if exponent % 2 == 0:
        return SymbolicScalar.const(Fraction(1, local_disc_norm ** (exponent // 2))), 0
    if _is_square(local_disc_norm):
        r = math.isqrt(local_disc_norm)
        return SymbolicScalar.const(Fraction(1, r ** exponent)), 0
    # d^{-e/2} = d^{-(e-1)/2} * sqrt(d)^{-1}
    return SymbolicScalar.const(Fraction(1, local_disc_norm ** ((exponent - 1) // 2))), -1


def tamagawa_volume_max_compact(spec: LocalAlgebraSpec) -> VolumeResult:
    """Volume of ``O(A_v)^x`` for the local Tamagawa measure.

    This is the multiplicative volume scaled by the inverse square root of
    :func:`disc_norm`.  ``d_v (d_v - 1)`` is always even, so only the
    ``d(F_v)`` part can leave a formal square root behind.
    """
    mult = volume_max_compact_mult(spec)
    q = spec.q_scalar
    rational, half = _disc_factor(spec.local_disc_norm, spec.nd ** 2)
    q_exp = spec.d_v * (spec.d_v - 1) * spec.n_v ** 2 // 2
    value = rational * q ** (-q_exp) * mult.value
    meta = {}
    if half:
        meta["formal_factor"] = f"sqrt({spec.local_disc_norm})^{half}"
    return VolumeResult(value, Normalization.TAMAGAWA, half, spec.local_disc_norm, meta)


def volume_quotient(spec: LocalAlgebraSpec) -> SymbolicScalar:
    """``mu(GL(nd, O_v)) / mu(GL(n_v, O(D_v)))`` for the Tamagawa measures.

    Closed form ``q^{d_v (d_v-1) n_v^2 / 2} * prod_{i <= nd, d_v does not
    divide i} (1 - q^{-i})``.
    """
    validate_spec(spec)
    q = spec.q_scalar
    acc = q ** (spec.d_v * (spec.d_v - 1) * spec.n_v ** 2 // 2)
    for i in range(1, spec.nd + 1):
        if i % spec.d_v:
            acc = acc * (1 - q ** -i)
    return acc
