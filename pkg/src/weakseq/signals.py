"""Finitely supported functions on the integers.

``IntSignal`` holds floating-point (real or complex) values; ``ExactSignal``
holds integer numerators over one common denominator and is used wherever a
pointwise inequality has to be checked without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np


def _trim(offset: int, values: np.ndarray) -> tuple[int, np.ndarray]:
    nz = np.flatnonzero(values)
    if nz.size == 0:
        return 0, values[:0]
    return offset + int(nz[0]), values[nz[0] : nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class IntSignal:
    """values[i] is the value at integer position offset + i (canonically trimmed)."""

    offset: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.dtype.kind not in "fc":
            vals = vals.astype(np.float64)
        off, vals = _trim(int(self.offset), vals)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls) -> IntSignal:
        return cls(0, np.zeros(0))

    @classmethod
    def delta(cls, n: int, value: float = 1.0) -> IntSignal:
        return cls(n, np.array([value], dtype=np.float64))

    @classmethod
    def from_sparse(cls, pairs: Iterable[tuple[int, complex]]) -> IntSignal:
        pairs = list(pairs)
        if not pairs:
            return cls.zero()
        pos = np.array([int(n) for n, _ in pairs], dtype=np.int64)
        vals = np.array([v for _, v in pairs])
        if vals.dtype.kind not in "fc":
            vals = vals.astype(np.float64)
        lo = int(pos.min())
        dense = np.zeros(int(pos.max()) - lo + 1, dtype=vals.dtype)
        np.add.at(dense, pos - lo, vals)
        return cls(lo, dense)

    def to_sparse(self) -> list[tuple[int, complex | float]]:
        nz = np.flatnonzero(self.values)
        return [(self.offset + int(i), self.values[i].item()) for i in nz]

    @property
    def is_zero(self) -> bool:
        return self.values.size == 0

    @property
    def first(self) -> int:
        return self.offset

    @property
    def last(self) -> int:
        return self.offset + self.values.size - 1

    @property
    def diameter(self) -> int:
        return max(self.values.size - 1, 0)

    def positions(self) -> np.ndarray:
        return self.offset + np.arange(self.values.size, dtype=np.int64)

    def support(self) -> np.ndarray:
        return self.offset + np.flatnonzero(self.values).astype(np.int64)

    def at(self, n: int | np.ndarray):
        """Values at arbitrary positions (zero outside the stored window)."""
        n = np.asarray(n, dtype=np.int64)
        i = n - self.offset
        ok = (i >= 0) & (i < self.values.size)
        out = np.zeros(n.shape, dtype=self.values.dtype if self.values.size else np.float64)
        out[ok] = self.values[i[ok]]
        return out

    def shift(self, a: int) -> IntSignal:
        """n -> self(n - a)."""
        return IntSignal(self.offset + a, self.values)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Dense values on the closed window [lo, hi]."""
        return self.at(np.arange(lo, hi + 1, dtype=np.int64))

    def mass(self):
        return self.values.sum().item() if self.values.size else 0.0

    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    def l2sq(self) -> float:
        return float((np.abs(self.values) ** 2).sum())

    def abs(self) -> IntSignal:
        return IntSignal(self.offset, np.abs(self.values))

    def __add__(self, other: IntSignal) -> IntSignal:
        return _combine(self, other, 1)

    def __sub__(self, other: IntSignal) -> IntSignal:
        return _combine(self, other, -1)

    def __mul__(self, c) -> IntSignal:
        return IntSignal(self.offset, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> IntSignal:
        return IntSignal(self.offset, -self.values)


def _combine(f: IntSignal, g: IntSignal, sign: int) -> IntSignal:
    if f.is_zero:
        return g * sign
    if g.is_zero:
        return f
    lo, hi = min(f.first, g.first), max(f.last, g.last)
    return IntSignal(lo, f.window(lo, hi) + sign * g.window(lo, hi))


def convolve(f: IntSignal, g: IntSignal) -> IntSignal:
    """(f*g)(x) = sum_y f(x - y) g(y); support lies in supp f + supp g."""
    if f.is_zero or g.is_zero:
        return IntSignal.zero()
    nz = np.flatnonzero(f.values)
    if nz.size * 8 < f.values.size and nz.size < 256:
        # sparse f: shift-and-add copies of g, in increasing position order
        dtype = np.result_type(f.values, g.values)
        out = np.zeros(f.values.size + g.values.size - 1, dtype=dtype)
        for i in nz:
            out[i : i + g.values.size] += f.values[i] * g.values
        return IntSignal(f.offset + g.offset, out)
    return IntSignal(f.offset + g.offset, np.convolve(f.values, g.values))


def correlate(f: IntSignal, mu: IntSignal) -> IntSignal:
    """x -> sum_n f(x + n) mu(n), the orientation in which Mf averages f."""
    if f.is_zero or mu.is_zero:
        return IntSignal.zero()
    rev = IntSignal(-mu.last, mu.values[::-1])
    return convolve(f, rev)


@dataclass(frozen=True, eq=False)
class ExactSignal:
    """Rational-valued signal: value at offset + i is numerators[i] / denominator."""

    offset: int
    numerators: np.ndarray
    denominator: int

    def __post_init__(self):
        num = np.asarray(self.numerators)
        if num.dtype.kind not in "iO":
            raise TypeError("ExactSignal numerators must be integers")
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        off, num = _trim(int(self.offset), num)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "numerators", num)
        object.__setattr__(self, "denominator", int(self.denominator))

    @property
    def is_zero(self) -> bool:
        return self.numerators.size == 0

    @property
    def first(self) -> int:
        return self.offset

    @property
    def last(self) -> int:
        return self.offset + self.numerators.size - 1

    def support(self) -> np.ndarray:
        return self.offset + np.flatnonzero(self.numerators).astype(np.int64)

    def value(self, n: int) -> Fraction:
        i = n - self.offset
        if 0 <= i < self.numerators.size:
            return Fraction(int(self.numerators[i]), self.denominator)
        return Fraction(0)

    def numerator_at(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        i = n - self.offset
        ok = (i >= 0) & (i < self.numerators.size)
        out = np.zeros(n.shape, dtype=self.numerators.dtype if self.numerators.size else np.int64)
        out[ok] = self.numerators[i[ok]]
        return out

    def mass(self) -> Fraction:
        return Fraction(int(sum(int(v) for v in self.numerators)), self.denominator)

    def max_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(int(max(abs(int(v)) for v in self.numerators)), self.denominator)

    def shift(self, a: int) -> ExactSignal:
        return ExactSignal(self.offset + a, self.numerators, self.denominator)

    def rescale(self, denominator: int) -> ExactSignal:
        """Same values over a multiple of the current denominator."""
        factor, rem = divmod(denominator, self.denominator)
        if rem:
            raise ValueError("new denominator must be a multiple of the old one")
        return ExactSignal(self.offset, _widen(self.numerators, factor) * factor, denominator)

    def __sub__(self, other: ExactSignal) -> ExactSignal:
        den = math.lcm(self.denominator, other.denominator)
        a, b = self.rescale(den), other.rescale(den)
        if a.is_zero:
            return ExactSignal(b.offset, -b.numerators, den)
        if b.is_zero:
            return a
        lo, hi = min(a.first, b.first), max(a.last, b.last)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        return ExactSignal(lo, a.numerator_at(n) - b.numerator_at(n), den)

    def to_float(self) -> IntSignal:
        if self.numerators.dtype == object:
            vals = np.array([float(Fraction(int(v), self.denominator)) for v in self.numerators])
        else:
            vals = self.numerators.astype(np.float64) / self.denominator
        return IntSignal(self.offset, vals)


def _widen(num: np.ndarray, factor: int) -> np.ndarray:
    """Switch to Python integers when scaling could overflow int64."""
    if num.dtype == object:
        return num
    peak = int(np.abs(num).max()) if num.size else 0
    if peak * factor >= 1 << 62:
        return num.astype(object)
    return num
