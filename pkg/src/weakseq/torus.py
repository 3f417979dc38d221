"""Fourier transforms of finitely supported signals on the torus T = R/Z.

s^(theta) = sum_n s(n) e^{-2 pi i n theta}.  Phases n*theta are reduced mod 1
in extended precision (or exactly, for rational theta) before any trig call.

Suprema are estimated by a dense grid followed by golden-section refinement.
The grid is evaluated with a zero-padded FFT; refinement and all pointwise
evaluations use direct summation.  The result is a lower estimate of the
true supremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cyclic_fourier import CyclicSignal, dft
from .errors import ShapeMismatch
from .signals import IntSignal

DEFAULT_OVERSAMPLE = 32
REFINE_CANDIDATES = 10
_GOLDEN = (math.sqrt(5) - 1) / 2


def _reduced_phase(n: np.ndarray, theta) -> np.ndarray:
    """(n * theta) mod 1 as float64, reduced before rounding to double."""
    if isinstance(theta, Fraction):
        num, den = theta.numerator, theta.denominator
        return ((n.astype(object) * num) % den).astype(np.float64) / den
    prod = n.astype(np.longdouble) * np.longdouble(theta)
    return (prod - np.floor(prod)).astype(np.float64)


def torus_eval(signal: IntSignal, theta) -> complex:
    if signal.is_zero:
        return 0j
    n = signal.positions()
    return complex(np.sum(signal.values * np.exp(-2j * np.pi * _reduced_phase(n, theta))))


def torus_eval_many(signal: IntSignal, thetas: Sequence[float]) -> np.ndarray:
    return np.array([torus_eval(signal, t) for t in thetas], dtype=np.complex128)


def torus_eval_multi(box: CyclicSignal, theta: Sequence[float]) -> complex:
    """Transform on T^m of a Z^m signal stored as a box with lower corner origin.

    The sum factors over axes, so each axis gets its own phase vector.
    """
    if len(theta) != box.m:
        raise ShapeMismatch(f"need {box.m} torus coordinates")
    k = box.elements()
    out = box.values
    for t in theta:
        w = np.exp(-2j * np.pi * _reduced_phase(k, t))
        out = np.tensordot(out, w, axes=([0], [0]))
    return complex(out)


@dataclass
class TorusScan:
    grid_size: int
    refined: bool
    sup_value: float
    argmax_theta: float
    oversample: int = DEFAULT_OVERSAMPLE
    samples: list = field(default_factory=list, repr=False)


def _grid_magnitudes(signal: IntSignal, size: int) -> np.ndarray:
    """|s^(g / size)| for g = 0..size-1 (size >= support length)."""
    buf = np.zeros(size, dtype=np.complex128)
    buf[: signal.values.size] = signal.values
    # the offset only contributes a unimodular factor
    return np.abs(np.fft.fft(buf))


def _golden_max(fun, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def grid_sup(signal: IntSignal, oversample: int = DEFAULT_OVERSAMPLE, refine: bool = True, trace: int = 0) -> TorusScan:
    """Estimate sup_theta |s^(theta)| on G = oversample * (D + 1) grid points plus local refinement.

    Refinement runs a golden-section search in the two grid cells around each
    of the largest grid local maxima.  ``trace`` > 0 keeps a downsampled copy
    of the grid magnitudes.
    """
    if oversample < 8:
        raise ValueError("oversample must be >= 8")
    if signal.is_zero:
        return TorusScan(0, refine, 0.0, 0.0, oversample)
    size = oversample * (signal.diameter + 1)
    mags = _grid_magnitudes(signal, size)
    g0 = int(np.argmax(mags))
    best, best_theta = float(mags[g0]), g0 / size
    if refine:
        left, right = np.roll(mags, 1), np.roll(mags, -1)
        peaks = np.flatnonzero((mags >= left) & (mags >= right))
        peaks = peaks[np.argsort(mags[peaks])[::-1][:REFINE_CANDIDATES]]
        fun = lambda t: abs(torus_eval(signal, t))
        for g in peaks:
            t, v = _golden_max(fun, (g - 1) / size, (g + 1) / size, 1e-7 / size)
            if v > best:
                best, best_theta = v, t % 1.0
    samples = []
    if trace:
        step = max(1, size // trace)
        samples = [(g / size, float(mags[g])) for g in range(0, size, step)]
    return TorusScan(size, refine, best, best_theta, oversample, samples)


def transference_check(rho_ddagger: CyclicSignal, rho_dagger: IntSignal, p: int, m: int, thetas: Iterable[float]) -> float:
    """max_theta |rho_dagger^(theta) - rho_ddagger^(theta, p theta, ..., p^{m-1} theta)|."""
    if rho_ddagger.m != m or rho_ddagger.q != 3 * p or rho_ddagger.origin != -p:
        raise ShapeMismatch("rho_ddagger must be the box [-p, 2p-1]^m for the same (p, m)")
    worst = 0.0
    for t in thetas:
        lhs = torus_eval(rho_dagger, t)
        if isinstance(t, Fraction):
            coords = [(t * p**j) % 1 for j in range(m)]
        else:
            coords = [float((np.longdouble(t) * p**j) % 1) for j in range(m)]
        rhs = torus_eval_multi(rho_ddagger, coords)
        worst = max(worst, abs(lhs - rhs))
    return worst


def decay_fit(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares (slope, intercept) of log(sup) against log(p)."""
    if len(points) < 3:
        raise ValueError("decay_fit needs at least 3 points")
    ps = np.array([float(p) for p, _ in points])
    if np.unique(ps).size != ps.size:
        raise ValueError("decay_fit needs distinct abscissae")
    ys = np.array([float(v) for _, v in points])
    slope, intercept = np.polyfit(np.log(ps), np.log(ys), 1)
    return float(slope), float(intercept)


def sharpness_check(sigma: CyclicSignal, p: int) -> tuple[float, float, bool]:
    """Both sides of ||sigma||_1 <= 2 p^{1/2} sup_{xi != 0} |sigma^(xi)|^{1/2}."""
    if sigma.q != p:
        raise ShapeMismatch("sigma must live on Z_p^m")
    support = int(np.count_nonzero(sigma.values))
    if support > p:
        raise ValueError(f"support has {support} points, more than p = {p}")
    spec = np.abs(dft(sigma).values)
    spec[sigma.index([0] * sigma.m)] = 0.0
    lhs = sigma.l1()
    rhs = 2.0 * math.sqrt(p) * math.sqrt(float(spec.max()))
    return lhs, rhs, lhs <= rhs + 1e-9
