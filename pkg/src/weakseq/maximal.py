"""Maximal operators along sparse sequences and weak-type (1,1) probes.

Conventions: Mf(x) = max_{N <= n_max} N^{-1} |sum_{nu <= N} f(x + n_nu)|.  The
dyadic companion measures are paired with f in the same orientation,
(f . mu)(x) = sum_n f(x + n) mu(n), so Mf and sup_k |f . mu_k| are comparable
pointwise.  Hardy-Littlewood domination uses ordinary convolution.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .signals import ExactSignal, IntSignal, convolve, correlate

FAMILIES = ("deltas", "comb", "difference-comb", "squares-baseline")
SPARSE_THRESHOLD = 4_000_000
_CHUNK = 1 << 20


def _terms(seq) -> np.ndarray:
    return np.asarray(getattr(seq, "merged", seq), dtype=np.int64)


def maximal_function(f: IntSignal, seq, n_max: int | None = None, method: str = "auto") -> IntSignal:
    """Mf on the only window where it can be nonzero, [min supp f - n_{n_max}, max supp f - n_1].

    ``method`` is "dense" (prefix sums at every window point), "sparse"
    (candidate points x = s - n_nu only) or "auto".  Both paths add the same
    floating-point terms in the same order and agree exactly.
    """
    n = _terms(seq)
    n_max = n.size if n_max is None else int(n_max)
    if n_max <= 0:
        raise ValueError("n_max must be positive")
    if n_max > n.size:
        raise ValueError(f"n_max = {n_max} exceeds sequence length {n.size}")
    n = n[:n_max]
    if f.is_zero:
        return IntSignal.zero()
    supp = f.support()
    if method == "auto":
        method = "sparse" if supp.size * n_max <= SPARSE_THRESHOLD else "dense"
    lo, hi = int(supp.min() - n[-1]), int(supp.max() - n[0])
    if method == "dense":
        return IntSignal(lo, _maximal_dense(f, n, lo, hi))
    if method == "sparse":
        return IntSignal(lo, _maximal_sparse(f, supp, n, lo, hi))
    raise ValueError(f"unknown method {method!r}")


def _maximal_dense(f: IntSignal, n: np.ndarray, lo: int, hi: int) -> np.ndarray:
    out = np.zeros(hi - lo + 1)
    counts = np.arange(1, n.size + 1, dtype=np.float64)
    rows = max(1, _CHUNK // n.size)
    for start in range(lo, hi + 1, rows):
        x = np.arange(start, min(start + rows, hi + 1), dtype=np.int64)
        vals = f.at(x[:, None] + n[None, :])
        s = np.cumsum(vals, axis=1)
        out[x - lo] = (np.abs(s) / counts).max(axis=1)
    return out


def _maximal_sparse(f: IntSignal, supp: np.ndarray, n: np.ndarray, lo: int, hi: int) -> np.ndarray:
    fv = f.at(supp)
    x = (supp[:, None] - n[None, :]).reshape(-1)
    nu = np.broadcast_to(np.arange(1, n.size + 1, dtype=np.int64), (supp.size, n.size)).reshape(-1)
    v = np.broadcast_to(fv[:, None], (supp.size, n.size)).reshape(-1)
    order = np.lexsort((nu, x))
    x, nu, v = x[order], nu[order], v[order]
    cand, start, count = np.unique(x, return_index=True, return_counts=True)
    s = np.zeros(cand.size, dtype=v.dtype)
    best = np.zeros(cand.size)
    # one hit rank at a time keeps the per-candidate summation order sequential
    for h in range(int(count.max())):
        sel = np.flatnonzero(count > h)
        idx = start[sel] + h
        s[sel] = s[sel] + v[idx]
        best[sel] = np.maximum(best[sel], np.abs(s[sel]) / nu[idx].astype(np.float64))
    out = np.zeros(hi - lo + 1)
    out[cand - lo] = best
    return out


@dataclass
class DyadicMeasureSet:
    """mu_k = 2^{-k} sum_{nu = 2^k + 1}^{2^{k+1}} delta_{n_nu} for every complete block."""

    measures: list[IntSignal]
    covered: int
    dropped_tail: int

    @property
    def truncated(self) -> bool:
        return self.dropped_tail > 0


def dyadic_measures(seq) -> DyadicMeasureSet:
    n = _terms(seq)
    if n.size < 2:
        raise ValueError("need at least two sequence terms")
    measures = []
    k = 0
    while 2 ** (k + 1) <= n.size:
        atoms = n[2**k : 2 ** (k + 1)]  # 1-based nu = 2^k + 1 .. 2^{k+1}
        measures.append(IntSignal.from_sparse((int(a), 2.0**-k) for a in atoms))
        k += 1
    covered = 2**k
    return DyadicMeasureSet(measures, covered, int(n.size - covered))


def sup_convolution(f: IntSignal, measures: Sequence[IntSignal]) -> IntSignal:
    """Pointwise sup_k |sum_n f(x + n) mu_k(n)| on the joint window."""
    pieces = [correlate(f, mu) for mu in measures]
    pieces = [p for p in pieces if not p.is_zero]
    if not pieces:
        return IntSignal.zero()
    lo = min(p.first for p in pieces)
    hi = max(p.last for p in pieces)
    out = np.zeros(hi - lo + 1)
    for p in pieces:
        seg = np.abs(p.values)
        out[p.first - lo : p.last - lo + 1] = np.maximum(out[p.first - lo : p.last - lo + 1], seg)
    return IntSignal(lo, out)


def _hl_witness(supp: np.ndarray, weights: np.ndarray, x: np.ndarray, r_max: int | None):
    """Best radius and value of the centered average at each x.

    The average over [x - r, x + r] only grows when r reaches a support point,
    so the sup is attained at r in {|s - x|}.
    """
    dist = np.abs(x[:, None] - supp[None, :])
    order = np.argsort(dist, axis=1, kind="stable")
    d = np.take_along_axis(dist, order, axis=1)
    cum = np.cumsum(weights[order], axis=1)
    vals = cum / (2 * d + 1)
    if r_max is not None:
        vals = np.where(d <= r_max, vals, -np.inf)
    j = np.argmax(vals, axis=1)
    best = np.take_along_axis(vals, j[:, None], axis=1)[:, 0]
    radius = np.take_along_axis(d, j[:, None], axis=1)[:, 0]
    best = np.maximum(best, 0.0)
    return best, radius


def hardy_littlewood(f: IntSignal, r_max: int | None = None, window: tuple[int, int] | None = None) -> IntSignal:
    """Centered maximal function sup_{0 <= r <= r_max} (2r+1)^{-1} sum_{|y| <= r} |f(x + y)|."""
    if f.is_zero:
        return IntSignal.zero()
    supp = f.support()
    w = np.abs(f.at(supp))
    if window is None:
        reach = r_max if r_max is not None else f.diameter
        window = (int(supp.min()) - reach, int(supp.max()) + reach)
    lo, hi = window
    out = np.zeros(hi - lo + 1)
    rows = max(1, _CHUNK // supp.size)
    for start in range(lo, hi + 1, rows):
        x = np.arange(start, min(start + rows, hi + 1), dtype=np.int64)
        out[x - lo] = _hl_witness(supp, w, x, r_max)[0]
    return IntSignal(lo, out)


@dataclass
class WeakTypeReport:
    alphas: np.ndarray
    counts: np.ndarray
    ratios: np.ndarray
    worst_ratio: float
    input_digest: str = ""
    grid_slack: float = float("nan")
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "input_digest": self.input_digest,
            "grid_slack": self.grid_slack,
            "worst_ratio": self.worst_ratio,
            "alphas": [float(a) for a in self.alphas],
            "counts": [int(c) for c in self.counts],
            "ratios": [float(r) for r in self.ratios],
        }

    @classmethod
    def from_dict(cls, d: dict) -> WeakTypeReport:
        return cls(
            np.asarray(d["alphas"], dtype=np.float64),
            np.asarray(d["counts"], dtype=np.int64),
            np.asarray(d["ratios"], dtype=np.float64),
            float(d["worst_ratio"]),
            d.get("input_digest", ""),
            float(d.get("grid_slack", float("nan"))),
            d.get("label", ""),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeakTypeReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def alpha_grid(top: float, per_decade: int = 64, decades: int = 4) -> np.ndarray:
    """Descending logarithmic grid top * 10^{-i / per_decade}, i = 0 .. per_decade * decades."""
    i = np.arange(per_decade * decades + 1, dtype=np.float64)
    return top * 10.0 ** (-i / per_decade)


def weak_type_report(
    maxfn: IntSignal,
    mass: float,
    alphas: Sequence[float] | None = None,
    per_decade: int = 64,
    decades: int = 4,
    digest: str = "",
    label: str = "",
) -> WeakTypeReport:
    """Superlevel counts |{Mf > alpha}| and ratios alpha * count / mass."""
    if not mass > 0:
        raise ValueError("mass must be positive")
    vals = np.sort(np.abs(maxfn.values)) if not maxfn.is_zero else np.zeros(0)
    if alphas is None:
        top = float(vals[-1]) if vals.size else 1.0
        alphas = alpha_grid(top, per_decade, decades)
        slack = 10.0 ** (1.0 / per_decade) - 1.0
    else:
        alphas = np.sort(np.asarray(alphas, dtype=np.float64))[::-1]
        slack = float(np.max(alphas[:-1] / alphas[1:]) - 1.0) if alphas.size > 1 else float("nan")
    alphas = np.asarray(alphas, dtype=np.float64)
    if np.any(alphas <= 0):
        raise ValueError("alphas must be positive")
    counts = vals.size - np.searchsorted(vals, alphas, side="right")
    ratios = alphas * counts / mass
    worst = float(ratios.max()) if ratios.size else 0.0
    return WeakTypeReport(alphas, counts.astype(np.int64), ratios, worst, digest, slack, label)


def signal_digest(f: IntSignal, seq) -> str:
    h = hashlib.sha256()
    h.update(str(f.offset).encode())
    h.update(np.ascontiguousarray(f.values).tobytes())
    h.update(np.ascontiguousarray(_terms(seq)).tobytes())
    return h.hexdigest()[:16]


def squares_sequence(length: int) -> np.ndarray:
    nu = np.arange(1, length + 1, dtype=np.int64)
    return nu * nu


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, trial); independent of trial scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & (2**64 - 1), trial])))


def probe_input(family: str, terms: np.ndarray, rng: np.random.Generator, atoms: int) -> IntSignal:
    """One random nonnegative probe for the named family (unit atoms)."""
    if family == "deltas":
        width = max(atoms, int(terms[-1]) // 8)
        pos = rng.choice(width, size=min(atoms, width), replace=False)
    elif family == "comb":
        c = int(rng.integers(1, max(2, int(terms[-1]) // (4 * atoms)) + 1))
        pos = c * np.arange(atoms)
    elif family == "difference-comb":
        i = rng.integers(0, terms.size, size=(4 * atoms, 2))
        diff = np.abs(terms[i[:, 0]] - terms[i[:, 1]])
        pos = np.unique(diff)[:atoms] if rng.random() < 0.5 else rng.permutation(np.unique(diff))[:atoms]
    else:
        raise ValueError(f"unknown probe family {family!r}")
    return IntSignal.from_sparse((int(x), 1.0) for x in np.unique(pos))


@dataclass
class ProbeSuite:
    reports: list[WeakTypeReport] = field(default_factory=list)

    @property
    def suite_max(self) -> float:
        return max((r.worst_ratio for r in self.reports), default=0.0)


def adversary_suite(
    seq,
    family: str,
    trials: int = 8,
    seed: int = 0,
    atoms: int = 16,
    per_decade: int = 64,
) -> ProbeSuite:
    """Weak-type reports for random probes; deterministic in (seed, trial).

    ``squares-baseline`` runs the three other families against n_nu = nu^2 of
    the same length; it is for contrast only.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown probe family {family!r}; choose from {FAMILIES}")
    terms = _terms(seq)
    if family == "squares-baseline":
        terms = squares_sequence(terms.size)
        fams = FAMILIES[:3]
    else:
        fams = (family,)
    suite = ProbeSuite()
    for fam_index, fam in enumerate(fams):
        for t in range(trials):
            rng = trial_rng(seed, fam_index * trials + t if family == "squares-baseline" else t)
            f = probe_input(fam, terms, rng, atoms)
            mf = maximal_function(f, terms)
            label = f"{family}/{fam}/{t}" if family == "squares-baseline" else f"{fam}/{t}"
            suite.reports.append(weak_type_report(mf, f.l1(), per_decade=per_decade, digest=signal_digest(f, terms), label=label))
    return suite


# -- pointwise comparisons --------------------------------------------------


def comparability_check(f: IntSignal, seq) -> dict:
    """Check sup_k f.mu_k <= 2 Mf and Mf <= 2 sup_k f.mu_k + f(. + n_1) for f >= 0.

    Mf is taken over N <= 2^{K+1} where mu_K is the last complete dyadic
    measure, the range the dyadic blocks cover.
    """
    if np.any(f.values < 0):
        raise ValueError("comparability is stated for nonnegative f")
    n = _terms(seq)
    dyad = dyadic_measures(n)
    mf = maximal_function(f, n, n_max=dyad.covered)
    sup = sup_convolution(f, dyad.measures)
    lo = min(mf.first, sup.first) if not sup.is_zero else mf.first
    hi = max(mf.last, sup.last) if not sup.is_zero else mf.last
    x = np.arange(lo, hi + 1, dtype=np.int64)
    mfv, supv, head = mf.at(x), sup.at(x), f.at(x + n[0])
    lower = supv <= 2 * mfv
    upper = mfv <= 2 * supv + head
    # float comparisons are decisive away from ties; near-ties are settled in rationals
    scale = 1e-9 * max(1.0, float(np.abs(f.values).max()))
    for i in np.flatnonzero((np.abs(supv - 2 * mfv) <= scale) & (supv > 0)):
        m_ex, s_ex = _exact_mf(f, n[: dyad.covered], int(x[i])), _exact_sup(f, n, dyad.covered, int(x[i]))
        lower[i] = s_ex <= 2 * m_ex
    for i in np.flatnonzero((np.abs(mfv - 2 * supv - head) <= scale) & (mfv > 0)):
        m_ex, s_ex = _exact_mf(f, n[: dyad.covered], int(x[i])), _exact_sup(f, n, dyad.covered, int(x[i]))
        upper[i] = m_ex <= 2 * s_ex + Fraction(f.at(int(x[i]) + int(n[0])).item())
    return {
        "lower_ok": bool(np.all(lower)),
        "upper_ok": bool(np.all(upper)),
        "window": (int(lo), int(hi)),
        "max_lower_ratio": float(np.max(np.where(mfv > 0, supv / np.where(mfv > 0, mfv, 1), 0))),
    }


def _exact_mf(f: IntSignal, n: np.ndarray, x: int) -> Fraction:
    vals = f.at(x + n)
    best, s = Fraction(0), Fraction(0)
    for N, v in enumerate(vals.tolist(), start=1):
        if v:
            s += Fraction(v)
        best = max(best, abs(s) / N)
    return best


def _exact_sup(f: IntSignal, n: np.ndarray, covered: int, x: int) -> Fraction:
    best = Fraction(0)
    k = 0
    while 2 ** (k + 1) <= covered:
        vals = f.at(x + n[2**k : 2 ** (k + 1)])
        best = max(best, abs(sum((Fraction(v) for v in vals.tolist() if v), Fraction(0))) / 2**k)
        k += 1
    return best


def _integer_values(f: IntSignal) -> dict[int, int]:
    out = {}
    for n, v in f.to_sparse():
        a = abs(v)
        if a != int(a):
            raise ValueError("exact domination check needs integer-valued f")
        out[n] = int(a)
    return out


def hl_domination_check(f: IntSignal, nus: Sequence[ExactSignal], constant: int) -> dict:
    """Exact test of sup_k (|f| * |nu_k|)(x) <= constant * M_HL f(x) at every x.

    The best radius at each x is located in floating point, then the
    inequality is confirmed at that radius in integer arithmetic.
    """
    fi = _integer_values(f)
    if not fi:
        return {"pass": True, "worst_ratio": 0.0, "points": 0}
    supp = np.array(sorted(fi), dtype=np.int64)
    w = np.array([fi[s] for s in supp], dtype=np.int64)
    prefix = np.concatenate([[0], np.cumsum(w)])
    fint = IntSignal.from_sparse((int(s), float(v)) for s, v in zip(supp, w))
    ok, worst, points = True, 0.0, 0
    for nu in nus:
        if nu.is_zero:
            continue
        num = np.abs(nu.numerators)
        peak = int(num.max()) * int(w.max()) * supp.size
        dtype = np.int64 if num.dtype != object and peak < 1 << 62 else object
        # exact (|f| * |nu|) numerators over nu.denominator
        lhs = np.convolve(fint.values.astype(dtype), num.astype(dtype))
        lo = fint.offset + nu.offset
        x = lo + np.flatnonzero(lhs).astype(np.int64)
        lhs = lhs[np.flatnonzero(lhs)]
        for c0 in range(0, x.size, max(1, _CHUNK // supp.size)):
            xs = x[c0 : c0 + max(1, _CHUNK // supp.size)]
            ls = lhs[c0 : c0 + xs.size]
            best, radius = _hl_witness(supp, w.astype(np.float64), xs, None)
            s_r = prefix[np.searchsorted(supp, xs + radius, side="right")] - prefix[np.searchsorted(supp, xs - radius, side="left")]
            # lhs / den <= C * s_r / (2r + 1)  <=>  lhs * (2r + 1) <= C * den * s_r
            left = ls.astype(object) * (2 * radius.astype(object) + 1)
            right = constant * nu.denominator * s_r.astype(object)
            good = left <= right
            if not np.all(good):
                ok = False
            ratio = ls.astype(np.float64) / nu.denominator / np.where(best > 0, best, np.inf)
            worst = max(worst, float(ratio.max()))
            points += xs.size
    return {"pass": ok, "worst_ratio": worst, "points": points}


def hl_structural_constant(nu: ExactSignal) -> Fraction:
    """||nu||_inf * (2R + 1) with R = max |x| over supp nu: the domination constant it certifies."""
    if nu.is_zero:
        return Fraction(0)
    supp = nu.support()
    reach = int(max(abs(int(supp.min())), abs(int(supp.max()))))
    return nu.max_value() * (2 * reach + 1)
