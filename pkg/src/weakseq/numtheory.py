"""Primality, lacunary prime schedules, offset schedules and power residues.

Everything here is exact integer arithmetic.  Schedules carry their
lacunarity/growth certificates so that a schedule read back from disk can be
re-validated without knowing how it was generated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import HypothesisViolation, InvalidModulusError, ScheduleTooLongError, ValidationError

# Deterministic for every n < 3.3e24, which covers the full 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_U64 = 1 << 64
_I63 = 1 << 63


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test for 0 <= n < 2**64."""
    if n < 0 or n >= _U64:
        raise ValueError(f"is_prime supports 0 <= n < 2**64, got {n}")
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    if n <= 2:
        return 2
    c = n | 1
    while not is_prime(c):
        c += 2
        if c >= _U64:
            raise ScheduleTooLongError("no prime below 2**64 at or above start")
    return c


def require_odd_prime(p: int) -> None:
    if not isinstance(p, int) or p < 3 or p >= _U64 or not is_prime(p):
        raise InvalidModulusError(f"expected an odd prime modulus, got {p!r}")


def mod_residue_power(j: int, r: int, p: int) -> int:
    """Return [j**r]_p, the representative of j**r in {0, ..., p-1}."""
    require_odd_prime(p)
    if r < 0 or r > 64:
        raise ValueError(f"exponent must satisfy 0 <= r <= 64, got {r}")
    if r == 0:
        return 1 % p
    return pow(j % p, r, p)


@dataclass(frozen=True)
class PrimeSchedule:
    """Lacunary sequence of odd primes with certified growth bounds.

    ``delta`` and ``cap`` certify ``(1 + delta) p_k <= p_{k+1} <= cap p_k``.
    """

    primes: tuple[int, ...]
    delta: Fraction
    cap: Fraction

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(int(p) for p in self.primes))
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "cap", Fraction(self.cap))

    def __len__(self) -> int:
        return len(self.primes)

    def validate(self, m: int | None = None) -> None:
        if not self.primes:
            raise ValidationError("empty prime schedule")
        if self.delta <= 0:
            raise ValidationError("lacunarity margin delta must be positive")
        for p in self.primes:
            if p >= _I63 or not is_prime(p) or p % 2 == 0:
                raise ValidationError(f"{p} is not an odd 63-bit prime")
            if m is not None and p <= m:
                raise ValidationError(f"prime {p} does not exceed exponent {m}")
        for lo, hi in zip(self.primes, self.primes[1:]):
            if hi < (1 + self.delta) * lo:
                raise ValidationError(f"lacunarity fails: {hi} < (1+{self.delta})*{lo}")
            if hi > self.cap * lo:
                raise ValidationError(f"growth cap fails: {hi} > {self.cap}*{lo}")

    def measured_ratios(self) -> tuple[Fraction, Fraction] | None:
        """Smallest and largest consecutive ratio p_{k+1}/p_k actually attained."""
        if len(self.primes) < 2:
            return None
        r = [Fraction(b, a) for a, b in zip(self.primes, self.primes[1:])]
        return min(r), max(r)


def build_prime_schedule(p0: int, count: int, ratio: Fraction | int | str = 2) -> PrimeSchedule:
    """p_1 = p0 and p_{k+1} = the smallest prime >= ratio * p_k."""
    ratio = Fraction(ratio)
    if ratio < 2:
        raise ValueError(f"ratio must be >= 2, got {ratio}")
    if count < 1:
        raise ValueError("count must be positive")
    require_odd_prime(p0)
    if p0 < 5:
        raise HypothesisViolation(f"p0 must be >= 5, got {p0}")
    if count * math.log2(ratio) + math.log2(p0) > 62:
        raise ScheduleTooLongError(f"{count} primes at ratio {ratio} from {p0} leave the 64-bit range")
    primes = [p0]
    for _ in range(count - 1):
        target = math.ceil(ratio * primes[-1])
        nxt = next_prime(target)
        if nxt >= _I63:
            raise ScheduleTooLongError("prime schedule exceeds 63 bits")
        primes.append(nxt)
    # Bertrand: a prime lies in [n, 2n], so p_{k+1} <= 2 * ceil(ratio p_k) <= 2 ratio p_k.
    sched = PrimeSchedule(tuple(primes), delta=ratio - 1, cap=2 * ratio)
    sched.validate()
    return sched


@dataclass(frozen=True)
class OffsetSchedule:
    """Offsets a_k with a_{k+1} > a_k + p_k^{e_k} and a_k <= mass_cap * p_k^{e_k}.

    ``exponents`` holds the span exponent e_k of each block (m for the
    power-diagonal construction, d + 1 for the paraboloid one).
    """

    offsets: tuple[int, ...]
    exponents: tuple[int, ...]
    mass_cap: Fraction

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(a) for a in self.offsets))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        object.__setattr__(self, "mass_cap", Fraction(self.mass_cap))

    @property
    def exponent(self) -> int:
        if len(set(self.exponents)) != 1:
            raise ValueError("mixed-exponent schedule has no single exponent")
        return self.exponents[0]

    def validate(self, schedule: PrimeSchedule) -> None:
        if len(self.offsets) != len(schedule.primes) or len(self.exponents) != len(schedule.primes):
            raise ValidationError("offset schedule length differs from prime schedule")
        for k, (a, p, e) in enumerate(zip(self.offsets, schedule.primes, self.exponents)):
            if a <= 0:
                raise ValidationError(f"offset a_{k + 1} = {a} is not positive")
            if a > self.mass_cap * p**e:
                raise ValidationError(f"a_{k + 1} = {a} exceeds {self.mass_cap} * {p}^{e}")
            if a + p**e >= _I63:
                raise ValidationError("offsets leave the 64-bit range")
            if k + 1 < len(self.offsets) and not self.offsets[k + 1] > a + p**e:
                raise ValidationError(f"a_{k + 2} <= a_{k + 1} + p_{k + 1}^{e}")


def build_offset_schedule(schedule: PrimeSchedule, m: int | Sequence[int]) -> OffsetSchedule:
    """a_1 = p_1^m, a_{k+1} = a_k + p_k^m + 1.

    ``m`` may be a per-block sequence of span exponents (mixed constructions).
    """
    if not schedule.primes:
        raise ValueError("schedule is empty")
    exps = [int(m)] * len(schedule.primes) if isinstance(m, int) else [int(e) for e in m]
    if len(exps) != len(schedule.primes):
        raise ValueError("need one exponent per block")
    if min(exps) < 2:
        raise HypothesisViolation("span exponents must be >= 2")
    offsets = [schedule.primes[0] ** exps[0]]
    for p, e in zip(schedule.primes[:-1], exps[:-1]):
        offsets.append(offsets[-1] + p**e + 1)
    for a, p, e in zip(offsets, schedule.primes, exps):
        if a + p**e >= _I63:
            raise ScheduleTooLongError("offset schedule exceeds 63 bits")
    cap = max(Fraction(a, p**e) for a, p, e in zip(offsets, schedule.primes, exps))
    if len(set(exps)) == 1 and schedule.delta >= 1:
        # ratio >= 2 gives a_k <= (4/3) p_k^m + k - 1
        assert cap <= 3, cap
    out = OffsetSchedule(tuple(offsets), tuple(exps), cap)
    out.validate(schedule)
    return out
