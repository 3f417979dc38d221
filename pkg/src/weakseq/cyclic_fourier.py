"""Fourier analysis on Z_q^m and the exponential sums built on it.

Normalization: f^(xi) = sum_k f(k) e^{-2 pi i k.xi / q}, with inverse
f(k) = q^{-m} sum_xi f^(xi) e^{2 pi i k.xi / q}.

Every phase k.xi is reduced mod q in integer arithmetic and only then turned
into an angle, so no rounding error is ever accumulated inside a phase.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, HypothesisViolation, ShapeMismatch
from .numtheory import require_odd_prime

CAPACITY = 1 << 27


def unit_roots(q: int, sign: int = -1) -> np.ndarray:
    """Table of e^{sign 2 pi i u / q} for u = 0..q-1."""
    u = np.arange(q, dtype=np.float64)
    return np.exp(sign * 2j * np.pi * u / q)


@dataclass(frozen=True, eq=False)
class CyclicSignal:
    """Complex function on Z_q^m stored densely, one array axis per coordinate.

    Array position i on an axis stands for the group element i + origin; origin
    is 0 for Z_p^m and -p when Z_{3p} is identified with [-p, 2p-1].
    """

    q: int
    m: int
    values: np.ndarray
    origin: int = 0

    def __post_init__(self):
        if self.q < 1 or self.m < 1:
            raise ValueError("modulus and dimension must be positive")
        if self.q**self.m > CAPACITY:
            raise CapacityError(f"{self.q}^{self.m} exceeds capacity 2^27")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.size != self.q**self.m:
            raise ShapeMismatch(f"expected {self.q}^{self.m} values, got {vals.size}")
        object.__setattr__(self, "values", vals.reshape((self.q,) * self.m))

    @classmethod
    def zeros(cls, q: int, m: int, origin: int = 0) -> CyclicSignal:
        if q**m > CAPACITY:
            raise CapacityError(f"{q}^{m} exceeds capacity 2^27")
        return cls(q, m, np.zeros((q,) * m, dtype=np.complex128), origin)

    @classmethod
    def delta(cls, q: int, m: int, point: Sequence[int], origin: int = 0) -> CyclicSignal:
        s = cls.zeros(q, m, origin)
        s.values[s.index(point)] = 1.0
        return s

    def index(self, point: Sequence[int]) -> tuple[int, ...]:
        """Array index of a group element given by integer coordinates."""
        return tuple((int(c) - self.origin) % self.q for c in point)

    def __call__(self, point: Sequence[int]) -> complex:
        return complex(self.values[self.index(point)])

    def elements(self) -> np.ndarray:
        """Group elements represented along one axis, in storage order."""
        return np.arange(self.q, dtype=np.int64) + self.origin

    def same_group(self, other: CyclicSignal) -> bool:
        return (self.q, self.m, self.origin) == (other.q, other.m, other.origin)

    def mass(self) -> complex:
        return complex(self.values.sum())

    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    def l2(self) -> float:
        return float(np.sqrt((np.abs(self.values) ** 2).sum()))


def _phase_matrix(q: int, origin: int, sign: int) -> np.ndarray:
    el = np.arange(q, dtype=np.int64) + origin
    u = np.outer(el, el) % q
    return unit_roots(q, sign)[u]


def _transform(values: np.ndarray, q: int, origin: int, sign: int) -> np.ndarray:
    w = _phase_matrix(q, origin, sign)
    out = values
    for axis in range(values.ndim):
        out = np.moveaxis(np.tensordot(w, out, axes=([1], [axis])), 0, axis)
    return out


def dft(signal: CyclicSignal) -> CyclicSignal:
    """Forward transform by m direct O(q^2) passes, one per axis."""
    return CyclicSignal(signal.q, signal.m, _transform(signal.values, signal.q, signal.origin, -1), signal.origin)


def idft(spectrum: CyclicSignal) -> CyclicSignal:
    vals = _transform(spectrum.values, spectrum.q, spectrum.origin, +1) / spectrum.q**spectrum.m
    return CyclicSignal(spectrum.q, spectrum.m, vals, spectrum.origin)


def convolve(f: CyclicSignal, g: CyclicSignal) -> CyclicSignal:
    """Cyclic convolution (f*g)(x) = sum_y f(x - y) g(y), by direct summation."""
    if not f.same_group(g):
        raise ShapeMismatch("convolution needs signals on the same group")
    out = np.zeros_like(f.values)
    for idx in zip(*np.nonzero(g.values)):
        # element y = idx + origin; x - y sits at array index ix - iy - origin
        shift = tuple(int(i) + f.origin for i in idx)
        out += g.values[idx] * np.roll(f.values, shift, axis=tuple(range(f.m)))
    return CyclicSignal(f.q, f.m, out, f.origin)


def _power_table(p: int, m: int) -> np.ndarray:
    """Row k holds ([k]_p, [k^2]_p, ..., [k^m]_p)."""
    k = np.arange(p, dtype=np.int64)
    cols = [k.copy()]
    for _ in range(m - 1):
        cols.append(cols[-1] * k % p)
    return np.stack(cols, axis=1)


def weil_value(p: int, m: int, xi: Sequence[int]) -> complex:
    """p^{-1} sum_k e^{-2 pi i (k xi_1 + k^2 xi_2 + ... + k^m xi_m)/p}."""
    require_odd_prime(p)
    if p <= m:
        raise HypothesisViolation(f"need p > m, got p={p}, m={m}")
    xi = np.asarray(xi, dtype=np.int64) % p
    if xi.shape != (m,):
        raise ShapeMismatch(f"frequency must have {m} coordinates")
    u = (_power_table(p, m) * xi).sum(axis=1) % p
    return complex(unit_roots(p)[u].sum() / p)


def weil_spectrum(p: int, m: int) -> np.ndarray:
    """All values weil_value(p, m, xi) as an array of shape (p,)*m.

    Direct summation over k with the full integer phase reduced mod p; the
    sweep is chunked over the leading m-1 frequency coordinates.
    """
    require_odd_prime(p)
    if p <= m:
        raise HypothesisViolation(f"need p > m, got p={p}, m={m}")
    if p**m > CAPACITY:
        raise CapacityError(f"{p}^{m} exceeds capacity 2^27")
    pw = _power_table(p, m)
    roots = unit_roots(p)
    last = np.arange(p, dtype=np.int64)
    # inner[k, t] = k^m * t mod p, the contribution of the last coordinate
    inner = np.outer(pw[:, m - 1], last) % p
    out = np.empty((p,) * m, dtype=np.complex128)
    for head in itertools.product(range(p), repeat=m - 1):
        base = (pw[:, : m - 1] * np.asarray(head, dtype=np.int64)).sum(axis=1) % p if m > 1 else 0
        u = (inner + np.asarray(base).reshape(-1, 1)) % p
        out[head] = roots[u].sum(axis=0) / p
    return out


def weil_sup(p: int, m: int) -> float:
    """max over nonzero xi of |weil_value(p, m, xi)|."""
    spec = np.abs(weil_spectrum(p, m))
    spec.reshape(-1)[0] = 0.0
    return float(spec.max())


def weil_sweep(primes: Iterable[int], m: int, workers: int = 1) -> dict[int, float]:
    """Nonzero-frequency suprema for several primes; independent of worker count."""
    primes = list(primes)
    if workers <= 1:
        return {p: weil_sup(p, m) for p in primes}
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return dict(zip(primes, ex.map(lambda p: weil_sup(p, m), primes)))


def gauss_sum(p: int, a: int, b: int) -> complex:
    """sum_{n=0}^{p-1} e^{-2 pi i (a n + b n^2)/p}."""
    require_odd_prime(p)
    n = np.arange(p, dtype=np.int64)
    u = ((a % p) * n + (b % p) * (n * n % p)) % p
    return complex(unit_roots(p)[u].sum())


def gauss_table(p: int) -> np.ndarray:
    """|gauss_sum(p, a, b)| for all (a, b), shape (p, p)."""
    require_odd_prime(p)
    n = np.arange(p, dtype=np.int64)
    a = n.reshape(-1, 1, 1)
    b = n.reshape(1, -1, 1)
    u = (a * n + b * (n * n % p)) % p
    return np.abs(unit_roots(p)[u].sum(axis=2))


def gauss_expected(p: int, a: int, b: int) -> float:
    if b % p:
        return float(np.sqrt(p))
    return 0.0 if a % p else float(p)


def paraboloid_value(p: int, d: int, xi: Sequence[int]) -> complex:
    """p^{-d} sum_{n in [0,p-1]^d} e^{-2 pi i (n.xi' + |n|^2 xi_{d+1})/p}.

    The sum factors into d one-dimensional Gauss sums.
    """
    require_odd_prime(p)
    xi = [int(c) % p for c in xi]
    if len(xi) != d + 1:
        raise ShapeMismatch(f"frequency must have {d + 1} coordinates")
    val = 1.0 + 0j
    for c in xi[:d]:
        val *= gauss_sum(p, c, xi[d]) / p
    return val


def paraboloid_value_direct(p: int, d: int, xi: Sequence[int]) -> complex:
    """Unfactored summation over [0, p-1]^d; reference for paraboloid_value."""
    require_odd_prime(p)
    if p**d > 10**5:
        raise CapacityError("direct paraboloid sum limited to p^d <= 1e5")
    xi = np.asarray([int(c) % p for c in xi], dtype=np.int64)
    grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * d), indexing="ij")
    n = np.stack([g.reshape(-1) for g in grids], axis=1)
    norm2 = (n * n).sum(axis=1) % p
    u = ((n * xi[:d]).sum(axis=1) + norm2 * xi[d]) % p
    return complex(unit_roots(p)[u].sum() / p**d)


def fourier_identity_errors(signal: CyclicSignal, other: CyclicSignal) -> dict[str, float]:
    """Relative residues of Plancherel, inversion and the convolution theorem."""
    n = signal.q**signal.m
    fh, gh = dft(signal).values, dft(other).values
    l2 = signal.l2()
    planch = abs(np.sqrt((np.abs(fh) ** 2).sum() / n) - l2) / l2
    inv = np.abs(idft(dft(signal)).values - signal.values).max() / np.abs(signal.values).max()
    conv = dft(convolve(signal, other)).values
    scale = np.abs(fh * gh).max()
    return {
        "plancherel": float(planch),
        "inversion": float(inv),
        "convolution": float(np.abs(conv - fh * gh).max() / scale),
    }


def random_signal(q: int, m: int, rng: np.random.Generator) -> CyclicSignal:
    vals = rng.standard_normal((q,) * m) + 1j * rng.standard_normal((q,) * m)
    return CyclicSignal(q, m, vals)
