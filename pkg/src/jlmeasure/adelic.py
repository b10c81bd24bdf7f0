"""Global assembly: restricted products, S-arithmetic covolumes, power indices.

Infinite products over places are evaluated over the rational primes
(``q_v = p``), which is exact for ``F = Q``; for other fields the caller
lists every factor that differs from the tail rule explicitly.

Truncation errors are certified with the Rosser-Schoenfeld bound
``pi(x) < 1.25506 x / log x`` (all ``x > 1``), which by partial summation
gives ``sum_{p > P} p^-2 <= 2.51012 / (P log P)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence, Union

import mpmath
import numpy as np

from .errors import DivergenceError, InputError, TruncationError
from .localgeom import LocalAlgebraSpec, tamagawa_volume_max_compact
from .symexpr import ONE, NumericValue, SymbolicScalar
from .verdict import Verdict

DEFAULT_PRIME_CAP = 10 ** 6
_ROSSER_SCHOENFELD = 1.25506
_EPS = 2.0 ** -52

Place = Union[int, str]


def default_prime_cap() -> int:
    """``JLM_PRIME_CAP`` from the environment, else 10**6."""
    raw = os.environ.get("JLM_PRIME_CAP")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise InputError(f"JLM_PRIME_CAP must be an integer, got {raw!r}") from None
        if cap < 2:
            raise InputError("JLM_PRIME_CAP must be at least 2")
        return cap
    return DEFAULT_PRIME_CAP


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> np.ndarray:
    """Sieve of Eratosthenes."""
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def prime_tail_sum_bound(P: float) -> float:
    """Upper bound for ``sum_{p > P} p^-2``."""
    if P < 2:
        raise ValueError("bound needs P >= 2")
    return 2 * _ROSSER_SCHOENFELD / (P * math.log(P))


# -- tail rules --------------------------------------------------------------

@dataclass(frozen=True)
class TailRule:
    """Closed-form local factor ``prod_e (1 - q^e)`` (inverted when ``invert``).

    An empty exponent list is the constant factor 1.
    """

    exponents: tuple[int, ...] = ()
    invert: bool = False

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if any(e >= 0 for e in self.exponents):
            raise DivergenceError("exponents must be negative")

    @property
    def is_trivial(self) -> bool:
        return not self.exponents

    def check_convergent(self) -> None:
        """|factor - 1| <= C q^-2 needs every exponent <= -2."""
        bad = [e for e in self.exponents if e > -2]
        if bad:
            raise DivergenceError(
                f"tail factor (1 - q^{bad[0]}) violates |f - 1| <= C q^-2; the product diverges"
            )

    def log_factor(self, q: float) -> float:
        s = math.fsum(math.log1p(-q ** e) for e in self.exponents)
        return -s if self.invert else s

    def log_constant(self, P: float) -> float:
        """C with ``|log factor(q)| <= C q^-2`` for every ``q > P``."""
        self.check_convergent()
        # |log(1 - x)| <= x / (1 - x) and q^e <= P^{e+2} q^-2 for q > P
        return math.fsum(P ** (e + 2) / (1 - P ** e) for e in self.exponents)

    def symbolic(self, q: SymbolicScalar) -> SymbolicScalar:
        acc = ONE
        for e in self.exponents:
            acc = acc * (1 - q ** e)
        return acc.inverse() if self.invert else acc

    def to_json(self) -> dict:
        if not self.exponents:
            return {"rule": "one"}
        if len(self.exponents) == 1:
            return {"rule": "one_minus_q_pow", "exponent": self.exponents[0], "invert": self.invert}
        return {"rule": "euler_product", "exponents": list(self.exponents), "invert": self.invert}

    @classmethod
    def from_json(cls, data: Mapping[str, Any] | None) -> "TailRule":
        if data is None:
            return cls()
        rule = data.get("rule")
        if rule == "one":
            return cls()
        if rule == "one_minus_q_pow":
            return cls((data["exponent"],), bool(data.get("invert", False)))
        if rule == "euler_product":
            return cls(tuple(data["exponents"]), bool(data.get("invert", False)))
        raise InputError(f"unknown tail rule {rule!r}")


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, SymbolicScalar):
        return x.as_fraction() if x.is_rational() else None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class RestrictedProductSpec:
    """Finite factors at the places of S, and a rule for all other primes.

    Tail primes are the rational primes not listed in ``S_factors`` or
    ``exclude``.
    """

    S_factors: Mapping[Place, Any] = field(default_factory=dict)
    tail: TailRule = TailRule()
    tolerance: float = 1e-6
    exclude: frozenset = frozenset()

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        for v, x in self.S_factors.items():
            if float(x) < 0:
                raise InputError(f"negative measure at place {v!r}")


def _tail_log_sum(rule: TailRule, P: int, skip: frozenset) -> tuple[float, float, int]:
    """Sum of log factors over tail primes <= P: (sum, sum of |terms|, count)."""
    primes = primes_up_to(P)
    if skip:
        mask = ~np.isin(primes, np.fromiter((int(s) for s in skip if isinstance(s, int)), dtype=np.int64))
        primes = primes[mask]
    pf = primes.astype(np.float64)
    terms = np.zeros_like(pf)
    for e in rule.exponents:
        terms += np.log1p(-pf ** e)
    if rule.invert:
        terms = -terms
    # fsum: exactly rounded and independent of summation order
    return math.fsum(terms.tolist()), math.fsum(np.abs(terms).tolist()), len(primes)


def _certified_tail(rule: TailRule, tolerance_rel: float, skip: frozenset, prime_cap: int,
                    start: int = 1024) -> tuple[float, float, int]:
    """Log of the tail product with a certified absolute error on the log.

    Doubles the truncation bound P until the error certified for the log
    is at most ``tolerance_rel``.  Returns (log value, log error, P).
    """
    rule.check_convergent()
    P = min(start, prime_cap)
    while True:
        s, sabs, count = _tail_log_sum(rule, P, skip)
        trunc = rule.log_constant(P) * prime_tail_sum_bound(P)
        rounding = 4 * _EPS * (sabs + count)
        err = trunc + rounding
        if err <= tolerance_rel:
            return s, err, P
        if P >= prime_cap:
            raise TruncationError(
                f"tolerance not reachable with primes <= {prime_cap}",
                value=math.exp(s), error_bound=err, prime_bound=P,
            )
        P = min(2 * P, prime_cap)


def restricted_product_measure(spec: RestrictedProductSpec, prime_cap: int | None = None) -> NumericValue:
    """Measure ``prod_{v in S} mu_v(Z_v) * prod_{v not in S} mu_v(Y_v)``.

    Exact when the tail is trivial and the S factors are rational.
    Otherwise the partial product over primes ``<= P`` is returned with an
    error bound certifying ``|value - limit| <= error_bound <= tolerance``.
    """
    cap = default_prime_cap() if prime_cap is None else prime_cap
    fracs = [_as_fraction(x) for x in spec.S_factors.values()]
    if spec.tail.is_trivial:
        if all(f is not None for f in fracs):
            return NumericValue(math.prod(fracs, start=Fraction(1)), 0.0)
        with mpmath.workdps(30):
            val = mpmath.fprod([mpmath.mpf(float(x)) for x in spec.S_factors.values()])
        return NumericValue(val, float(abs(val)) * 1e-15)
    with mpmath.workdps(30):
        head = mpmath.fprod([mpmath.mpf(float(x)) if f is None else mpmath.mpf(f.numerator) / f.denominator
                             for x, f in zip(spec.S_factors.values(), fracs)])
    head_f = float(head)
    if head_f == 0:
        return NumericValue(Fraction(0), 0.0)
    skip = frozenset(spec.S_factors) | frozenset(spec.exclude)
    # relative error e^t - 1 <= tolerance / |value|; aim at half of it for slack
    guess = abs(head_f) * math.exp(_tail_log_sum(spec.tail, min(1024, cap), skip)[0])
    target = math.log1p(spec.tolerance / (2 * guess))
    try:
        s, err, P = _certified_tail(spec.tail, target, skip, cap)
    except TruncationError as exc:
        value = head_f * exc.value
        raise TruncationError(str(exc), value=value,
                              error_bound=abs(value) * math.expm1(exc.error_bound),
                              prime_bound=exc.prime_bound) from None
    with mpmath.workdps(30):
        value = head * mpmath.exp(s)
    bound = float(abs(value)) * math.expm1(err)
    return NumericValue(value, bound)


# -- global data ---------------------------------------------------------------

@dataclass(frozen=True)
class GlobalSetup:
    """Global field invariants together with S and the ramification set.

    ``places`` maps finite place labels to residue cardinalities ``q_v``;
    archimedean places are ``"inf1"``, ``"inf2"``, ... (real first, then
    complex), generated from the signature.
    """

    abs_discriminant: int
    signature: tuple[int, int]
    torsion_order: int
    places: Mapping[Place, int]
    ram_set: frozenset
    S: frozenset
    local_disc_norms: Mapping[Place, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "signature", tuple(self.signature))
        object.__setattr__(self, "ram_set", frozenset(self.ram_set))
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "places", dict(self.places))
        r1, r2 = self.signature
        if self.abs_discriminant < 1 or r1 < 0 or r2 < 0 or self.torsion_order < 1:
            raise InputError("discriminant and torsion order must be positive, signature nonnegative")
        if r1 == 0 and self.torsion_order % 2:
            raise InputError("torsion order of a number field is even")
        if r1 > 0 and self.torsion_order != 2:
            raise InputError("a field with a real place has exactly two roots of unity")
        arch = set(self.archimedean)
        known = arch | set(self.places)
        if not arch <= self.S:
            raise InputError(f"S must contain every archimedean place {sorted(arch)}")
        for v in self.ram_set | self.S:
            if v not in known:
                raise InputError(f"place {v!r} is neither archimedean nor listed in places")
        for v, q in self.places.items():
            if not isinstance(q, int) or q < 2:
                raise InputError(f"residue cardinality at {v!r} must be an integer >= 2")

    @property
    def archimedean(self) -> list[str]:
        r1, r2 = self.signature
        return [f"inf{i + 1}" for i in range(r1 + r2)]

    def place_kind(self, v: Place) -> str:
        r1, r2 = self.signature
        if v in self.archimedean:
            return "real" if self.archimedean.index(v) < r1 else "complex"
        return "finite"

    @property
    def finite_S(self) -> list[Place]:
        return sorted((v for v in self.S if v not in self.archimedean), key=str)

    def ram_in_S(self) -> bool:
        return self.ram_set <= self.S

    def unit_rank(self) -> int:
        """Rank of ``O_S^x`` (Dirichlet): ``|S| - 1``."""
        return len(self.S) - 1

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GlobalSetup":
        places = {}
        disc = {}
        for p in data.get("places", []):
            label = p["label"]
            places[label] = p["q"]
            if "local_disc_norm" in p:
                disc[label] = p["local_disc_norm"]
        sig = data.get("signature", {"r1": 1, "r2": 0})
        if isinstance(sig, Mapping):
            sig = (sig.get("r1", 0), sig.get("r2", 0))
        return cls(abs_discriminant=data.get("abs_discriminant", 1), signature=tuple(sig),
                   torsion_order=data.get("torsion_order", 2), places=places,
                   ram_set=frozenset(data.get("ram_set", [])), S=frozenset(data.get("S", [])),
                   local_disc_norms=disc)

    def to_json(self) -> dict:
        return {
            "abs_discriminant": self.abs_discriminant,
            "signature": {"r1": self.signature[0], "r2": self.signature[1]},
            "torsion_order": self.torsion_order,
            "places": [dict({"label": v, "q": q},
                            **({"local_disc_norm": self.local_disc_norms[v]} if v in self.local_disc_norms else {}))
                       for v, q in self.places.items()],
            "ram_set": sorted(self.ram_set, key=str),
            "S": sorted(self.S, key=str),
        }


# -- power indices ---------------------------------------------------------

def abelian_power_index(rank: int, torsion_orders: Sequence[int], n: int) -> int:
    """``[A : A^n]`` for ``A = Z^rank x prod Z/w_j``."""
    if rank < 0 or n < 1 or any(w < 1 for w in torsion_orders):
        raise InputError("rank must be >= 0, n and torsion orders >= 1")
    return n ** rank * math.prod(math.gcd(n, w) for w in torsion_orders)


@dataclass(frozen=True)
class PadicPlace:
    """Data for ``[F_v^x : (F_v^x)^n]``: ``#mu_n(F_v)`` and ``|n|_v^{-1}``."""

    q: int
    p: int
    mu_n_order: int
    val_n: int

    @classmethod
    def rational(cls, p: int, n: int) -> "PadicPlace":
        """The place ``Q_p``: ``#mu_n = gcd(n, p - 1)`` (``gcd(n, 2)`` at 2)."""
        mu = math.gcd(n, 2) if p == 2 else math.gcd(n, p - 1)
        v = 0
        m = n
        while m % p == 0:
            m //= p
            v += 1
        return cls(q=p, p=p, mu_n_order=mu, val_n=p ** v)


def local_power_index(place_kind: str | PadicPlace, n: int) -> int:
    """``[F_v^x : (F_v^x)^n]`` for a real, complex or p-adic place."""
    if n < 1:
        raise InputError("n must be positive")
    if place_kind == "real":
        return 2 if n % 2 == 0 else 1
    if place_kind == "complex":
        return 1
    if isinstance(place_kind, PadicPlace):
        if place_kind.mu_n_order < 1 or place_kind.val_n < 1:
            raise InputError("mu_n order and |n|^-1 must be positive")
        return n * place_kind.mu_n_order * place_kind.val_n
    raise InputError(f"unknown place kind {place_kind!r}")


@dataclass(frozen=True)
class IndexData:
    """Factors relating PGL-type and SL-type covolumes.

    ``prefactor = prod(local_indices) / global_index / (mu_n_FS / mu_n_OS)``
    i.e. ``[F_S^x : (F_S^x)^n] / [O_S^x : (O_S^x)^n] * [mu_n(F_S) : mu_n(O_S)]^-1``.
    """

    local_indices: tuple[int, ...]
    global_index: int
    mu_n_FS: int
    mu_n_OS: int

    def validate(self) -> None:
        vals = list(self.local_indices) + [self.global_index, self.mu_n_FS, self.mu_n_OS]
        if any((not isinstance(x, int)) or isinstance(x, bool) or x < 1 for x in vals):
            raise InputError("index data entries must be positive integers")
        if self.mu_n_FS % self.mu_n_OS:
            raise InputError("mu_n(O_S) must be a subgroup of mu_n(F_S)")

    @property
    def prefactor(self) -> Fraction:
        self.validate()
        return Fraction(math.prod(self.local_indices), self.global_index) * Fraction(self.mu_n_OS, self.mu_n_FS)

    def to_json(self) -> dict:
        return {"local_indices": list(self.local_indices), "global_index": self.global_index,
                "mu_n_FS": self.mu_n_FS, "mu_n_OS": self.mu_n_OS}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "IndexData":
        try:
            return cls(tuple(data["local_indices"]), data["global_index"], data["mu_n_FS"], data["mu_n_OS"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed index data: {exc}") from None


def index_data_from_setup(setup: GlobalSetup, n: int,
                          padic: Mapping[Place, PadicPlace] | None = None) -> IndexData:
    """Index data for ``PGL(n)`` over ``O_S``.

    Finite places of S default to ``Q_p`` data (``q_v`` prime); pass
    ``padic`` for anything else.
    """
    padic = dict(padic or {})
    local, mu_FS = [], 1
    for v in sorted(setup.S, key=str):
        kind = setup.place_kind(v)
        if kind == "real":
            local.append(local_power_index("real", n))
            mu_FS *= math.gcd(n, 2)
        elif kind == "complex":
            local.append(1)
            mu_FS *= n
        else:
            data = padic.get(v)
            if data is None:
                q = setup.places[v]
                if not _is_prime(q):
                    raise InputError(f"place {v!r} has q = {q}; supply p-adic index data")
                data = PadicPlace.rational(q, n)
            local.append(local_power_index(data, n))
            mu_FS *= data.mu_n_order
    glob = abelian_power_index(setup.unit_rank(), [setup.torsion_order], n)
    return IndexData(tuple(local), glob, mu_FS, math.gcd(n, setup.torsion_order))


def _is_prime(x: int) -> bool:
    return x >= 2 and all(x % k for k in range(2, math.isqrt(x) + 1))


# -- covolumes --------------------------------------------------------------

@dataclass(frozen=True)
class CovolumeExpr:
    """``D_F^{half_exponent/2} * tau * (prod_v mu_v(P_v))^{-1}``.

    ``finite_factors`` lists explicit local volumes (SymbolicScalars in q,
    substituted with ``residue_sizes[v]``); the ``tail`` rule supplies the
    factor at every other rational prime outside S.
    """

    disc_base: int = 1
    half_exponent: int = 0
    tamagawa_number: Fraction = Fraction(1)
    finite_factors: Mapping[Place, SymbolicScalar] = field(default_factory=dict)
    residue_sizes: Mapping[Place, int] = field(default_factory=dict)
    tail: TailRule = TailRule()
    S: frozenset = frozenset()
    index_data: IndexData | None = None
    tolerance: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "tamagawa_number", Fraction(self.tamagawa_number))
        object.__setattr__(self, "finite_factors",
                           {v: SymbolicScalar.coerce(x) for v, x in dict(self.finite_factors).items()})
        object.__setattr__(self, "S", frozenset(self.S))
        if self.disc_base < 1 or self.tamagawa_number <= 0:
            raise InputError("discriminant and Tamagawa number must be positive")
        for v in self.finite_factors:
            if v in self.S:
                raise InputError(f"finite factor supplied at place {v!r} which lies in S")
        for v, x in self.local_values().items():
            if x.pi_exponent == 0 and x.as_fraction() <= 0:
                raise InputError(f"local volume at {v!r} must be positive")

    def local_values(self) -> dict[Place, SymbolicScalar]:
        out = {}
        for v, x in self.finite_factors.items():
            if x.is_constant():
                out[v] = x
            elif v in self.residue_sizes:
                out[v] = x.substitute(self.residue_sizes[v])
            else:
                raise InputError(f"factor at {v!r} depends on q but no residue size is given")
        return out

    def finite_product(self) -> SymbolicScalar:
        acc = ONE
        for v in sorted(self.finite_factors, key=str):
            acc = acc * self.local_values()[v]
        return acc

    def to_json(self) -> dict:
        out = {
            "disc_factor": {"base": self.disc_base, "half_exponent": self.half_exponent},
            "tamagawa_number": str(self.tamagawa_number),
            "finite_factors": {str(v): x.to_text() for v, x in self.finite_factors.items()},
            "residue_sizes": {str(v): q for v, q in self.residue_sizes.items()},
            "tail": self.tail.to_json(),
            "S": sorted((str(v) for v in self.S)),
            "tolerance": self.tolerance,
        }
        if self.index_data is not None:
            out["index_data"] = self.index_data.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "CovolumeExpr":
        from .symexpr import parse

        disc = data.get("disc_factor", {"base": 1, "half_exponent": 0})
        factors = {_place_key(v): parse(str(x)) for v, x in data.get("finite_factors", {}).items()}
        sizes = {_place_key(v): q for v, q in data.get("residue_sizes", {}).items()}
        idx = data.get("index_data")
        return cls(disc_base=disc["base"], half_exponent=disc["half_exponent"],
                   tamagawa_number=Fraction(str(data.get("tamagawa_number", 1))),
                   finite_factors=factors, residue_sizes=sizes,
                   tail=TailRule.from_json(data.get("tail")),
                   S=frozenset(_place_key(v) for v in data.get("S", [])),
                   index_data=None if idx is None else IndexData.from_json(idx),
                   tolerance=float(data.get("tolerance", 1e-6)))


def _place_key(v) -> Place:
    if isinstance(v, int):
        return v
    s = str(v)
    return int(s) if s.isdigit() else s


def _disc_power(base: int, half_exponent: int) -> Fraction | None:
    """``base^{half_exponent/2}`` when rational, else None."""
    if half_exponent % 2 == 0:
        return Fraction(base) ** (half_exponent // 2)
    r = math.isqrt(base)
    if r * r == base:
        return Fraction(r) ** half_exponent
    return None


def covolume_S_arithmetic(expr: CovolumeExpr, prime_cap: int | None = None
                          ) -> SymbolicScalar | NumericValue:
    """Covolume of the S-arithmetic group from its adelic fibration.

    Exact (a SymbolicScalar) when the tail is trivial and the discriminant
    power is rational; otherwise a NumericValue with certified bound.
    """
    finite = expr.finite_product()
    disc = _disc_power(expr.disc_base, expr.half_exponent)
    exact_head = SymbolicScalar.const(expr.tamagawa_number) / finite
    if expr.tail.is_trivial and disc is not None:
        return exact_head * disc
    with mpmath.workdps(40):
        head = evaluate_mp(exact_head)
        head *= mpmath.mpf(expr.disc_base) ** (mpmath.mpf(expr.half_exponent) / 2)
    if expr.tail.is_trivial:
        return NumericValue(head, float(abs(head)) * 1e-30)
    skip = frozenset(expr.S) | frozenset(expr.finite_factors)
    guess = abs(float(head)) * math.exp(-_tail_log_sum(expr.tail, 1024, skip)[0])
    target = math.log1p(expr.tolerance / (2 * guess))
    cap = default_prime_cap() if prime_cap is None else prime_cap
    try:
        s, err, P = _certified_tail(expr.tail, target, skip, cap)
    except TruncationError as exc:
        value = float(head) / exc.value
        raise TruncationError(str(exc), value=value,
                              error_bound=abs(value) * math.expm1(exc.error_bound),
                              prime_bound=exc.prime_bound) from None
    with mpmath.workdps(30):
        value = head * mpmath.exp(-s)
    return NumericValue(value, float(abs(value)) * math.expm1(err))


def evaluate_mp(x: SymbolicScalar):
    from .symexpr import evaluate_at

    v = evaluate_at(x, None, 40).value
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return v


def covolume_equality_check(left: CovolumeExpr, right: CovolumeExpr, setup: GlobalSetup) -> Verdict:
    """Compare two covolume expressions for inner forms over the same S.

    Inconclusive when a ramified place lies outside S.  Otherwise the index
    prefactors, discriminant powers, Tamagawa numbers and tail rules must
    coincide (they cancel), and the explicit finite products must agree as
    canonical scalars.
    """
    if not setup.ram_in_S():
        escaped = sorted(setup.ram_set - setup.S, key=str)
        return Verdict.inconclusive("ram ⊄ S", escaped=escaped)
    if (left.index_data is None) != (right.index_data is None):
        raise InputError("index data supplied on one side only")
    for expr in (left, right):
        if expr.S and expr.S != setup.S:
            raise InputError("covolume expression built for a different S")
        if expr.index_data is not None:
            expr.index_data.validate()
    if left.index_data is not None and left.index_data.prefactor != right.index_data.prefactor:
        return Verdict.not_equal("index", left=left.index_data.prefactor, right=right.index_data.prefactor)
    if _disc_key(left) != _disc_key(right):
        return Verdict.not_equal("discriminant", left=_disc_key(left), right=_disc_key(right))
    if left.tamagawa_number != right.tamagawa_number:
        return Verdict.not_equal("tamagawa_number", left=left.tamagawa_number, right=right.tamagawa_number)
    if left.tail != right.tail or set(left.finite_factors) != set(right.finite_factors):
        # tail primes must be the same set with the same rule on both sides
        return Verdict.not_equal("tail", left=left.tail.to_json(), right=right.tail.to_json())
    lv, rv = left.local_values(), right.local_values()
    differing = sorted((v for v in lv if lv[v] != rv[v]), key=str)
    lp, rp = left.finite_product(), right.finite_product()
    if lp != rp:
        return Verdict.not_equal("finite_factors", left=lp.to_text(), right=rp.to_text(), places=differing)
    return Verdict.equal(finite_product=lp.to_text(), places_checked=len(lv))


def _disc_key(expr: CovolumeExpr):
    # D^{h/2}: compare as exact value when rational, else structurally
    r = _disc_power(expr.disc_base, expr.half_exponent)
    return r if r is not None else (expr.disc_base, expr.half_exponent)


def inner_form_covolume_expr(setup: GlobalSetup, n: int, d: int, local_index: Mapping[Place, int],
                             explicit_places: Iterable[Place] | None = None,
                             with_index: bool = True,
                             padic: Mapping[Place, PadicPlace] | None = None) -> CovolumeExpr:
    """Covolume expression for the norm-one group of ``M(n, D)`` over O_S.

    ``local_index[v]`` is ``d_v`` (1 when absent).  Local volumes at the
    explicit finite places outside S are the maximal-order volumes under the
    local Tamagawa measure; every other prime gets the hyperspecial tail
    ``prod_{i=2}^{nd} (1 - q^-i)``.  The tail runs over rational primes, so
    numeric evaluation is meaningful for ``F = Q``; the equality check only
    compares rules.
    """
    nd = n * d
    if explicit_places is None:
        explicit_places = [v for v in setup.places if v not in setup.S]
    factors, sizes = {}, {}
    for v in explicit_places:
        if v in setup.S:
            continue
        q = setup.places[v]
        dv = local_index.get(v, 1)
        spec = LocalAlgebraSpec.from_local_index(n, d, dv, q=q,
                                                 local_disc_norm=setup.local_disc_norms.get(v, 1))
        factors[v] = tamagawa_volume_max_compact(spec).value
        sizes[v] = q
    tail = TailRule(tuple(range(-2, -nd - 1, -1)))
    return CovolumeExpr(
        disc_base=setup.abs_discriminant,
        half_exponent=nd * nd - 1,
        tamagawa_number=Fraction(1),
        finite_factors=factors,
        residue_sizes=sizes,
        tail=tail,
        S=setup.S,
        index_data=index_data_from_setup(setup, nd, padic) if with_index else None,
    )
