"""The twelve acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, and ``python tests/test_acceptance.py`` prints them
directly.
"""

import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from weakseq.construction import (
    kappa_structure,
    make_block_triple,
    paraboloid_kind,
    power_kind,
    rho_dagger,
    rho_ddagger,
    standard_sequence,
)
from weakseq.cyclic_fourier import fourier_identity_errors, gauss_expected, gauss_table, random_signal, weil_sweep
from weakseq.maximal import adversary_suite, comparability_check, hl_domination_check, maximal_function, trial_rng, weak_type_report
from weakseq.numtheory import is_prime
from weakseq.proof_lab import SQUARE_FUNCTION_CONSTANT, inspect_proof, sequence_triples
from weakseq.signals import IntSignal
from weakseq.torus import decay_fit, grid_sup, transference_check

RESULTS: dict[int, str] = {}
ADVERSARY_BOUND = 50.0
GROWTH_BOUND = 100.0
SUITE_SEED = 0


def record(n: int, name: str, ok: bool, detail: str) -> bool:
    RESULTS[n] = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    print(RESULTS[n])
    return ok


def workers() -> int:
    return int(os.environ.get("WEAKSEQ_WORKERS", os.cpu_count() or 1))


_cache: dict = {}


def family():
    if "seq" not in _cache:
        seq = standard_sequence(power_kind(2))
        _cache["seq"] = seq
        _cache["triples"] = sequence_triples(seq)
    return _cache["seq"], _cache["triples"]


def input_suite(count: int = 50):
    """Seeded nonnegative integer-valued sparse inputs, 1 to 16 atoms in [0, 4000)."""
    out = []
    for t in range(count):
        rng = trial_rng(SUITE_SEED, t)
        atoms = int(rng.integers(1, 17))
        pos = rng.choice(4000, size=atoms, replace=False)
        vals = rng.integers(1, 33, size=atoms).astype(np.float64)
        out.append(IntSignal.from_sparse(zip(pos.tolist(), vals.tolist())))
    return out


def criterion_1() -> bool:
    t0 = time.perf_counter()
    worst, worst_at = -math.inf, None
    for m in (2, 3):
        primes = [p for p in range(5, 102) if is_prime(p) and p > m]
        for p, sup in weil_sweep(primes, m, workers()).items():
            excess = sup - (m - 1) / math.sqrt(p)
            if excess > worst:
                worst, worst_at = excess, (p, m)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt <= 60
    return record(1, "Weil bound", ok, f"max sup - (m-1)p^-1/2 = {worst:.3e} at (p,m)={worst_at}; {dt:.1f}s")


def criterion_2() -> bool:
    t0 = time.perf_counter()
    worst = 0.0
    for p in (q for q in range(3, 200) if is_prime(q)):
        want = np.array([[gauss_expected(p, a, b) for b in range(p)] for a in range(p)])
        worst = max(worst, float(np.abs(gauss_table(p) - want).max()))
    dt = time.perf_counter() - t0
    return record(2, "Gauss table", worst <= 1e-9 and dt <= 10, f"max deviation {worst:.3e}; {dt:.1f}s")


def criterion_3() -> bool:
    t0 = time.perf_counter()
    worst = {"plancherel": 0.0, "inversion": 0.0, "convolution": 0.0}
    for p, m in [(5, 2), (7, 2), (13, 2), (5, 3)]:
        for t in range(100):
            rng = trial_rng(p * 100 + m, t)
            errs = fourier_identity_errors(random_signal(p, m, rng), random_signal(p, m, rng))
            for k, v in errs.items():
                worst[k] = max(worst[k], v)
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-12 and dt <= 30
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return record(3, "Fourier identities", ok, f"{detail}; {dt:.1f}s")


def criterion_4() -> bool:
    off = on = 0.0
    for p in (5, 7, 11):
        a, b = kappa_structure(p, power_kind(2))
        off, on = max(off, a), max(on, b)
    return record(4, "kappa spectrum", off <= 1e-9 and on <= 1e-9, f"off-lattice max {off:.1e}, on-lattice deviation {on:.1e}")


def criterion_5() -> bool:
    worst = 0.0
    for p in (5, 11):
        rng = trial_rng(SUITE_SEED, p)
        thetas = rng.random(64).tolist()
        worst = max(worst, transference_check(rho_ddagger(p, power_kind(2)), rho_dagger(p, power_kind(2)), p, 2, thetas))
    return record(5, "transference identity", worst <= 1e-9, f"max deviation {worst:.1e} over 64 theta")


def criterion_6() -> bool:
    t0 = time.perf_counter()
    primes = (5, 11, 23, 47, 97, 197)
    sups = [grid_sup(rho_dagger(p, power_kind(2)), oversample=32).sup_value for p in primes]
    slope, _ = decay_fit(list(zip(primes, sups)))
    scaled = [s * math.sqrt(p) for p, s in zip(primes, sups)]
    spread = max(scaled) / min(scaled)
    dt = time.perf_counter() - t0
    ok = -0.65 <= slope <= -0.35 and spread < 3 and dt <= 300
    detail = f"slope {slope:.3f} (window [-0.65, -0.35]), sup*p^1/2 spread {spread:.2f} (< 3); sup*p^1/2 = " + ", ".join(
        f"{v:.2f}" for v in scaled
    )
    return record(6, "decay of rho_dagger", ok, f"{detail}; {dt:.1f}s")


def criterion_7() -> bool:
    seqs = [standard_sequence(power_kind(2)), standard_sequence(paraboloid_kind(2), count=4)]
    failures = []
    blocks = 0
    for seq in seqs:
        for blk in seq.blocks:
            tri = make_block_triple(blk.p, blk.kind, blk.a)
            rep = tri.structure_report(blk)
            dim, size = blk.kind.dim, len(blk.elements)
            # lower bound: the probability-normalized block measure 1/|S_k| (= 1/p_k for power blocks)
            checks = {
                "lower": all(tri.mu_tilde.value(n) >= Fraction(1, size) for n in blk.elements),
                "nu_sup": tri.nu.max_value() <= Fraction(3**dim, blk.p**dim),
                "nu_window": rep["nu_window_ok"],
                "support": tri.mu_tilde.support().size <= 3**dim * size,
                "lambda": rep["lambda_identity"],
            }
            failures += [f"{seq.label}/k={blk.k}/{k}" for k, v in checks.items() if not v]
            blocks += 1
    return record(7, "measure structure", not failures, f"{blocks} blocks exact; failures: {failures or 'none'}")


def criterion_8() -> bool:
    seq, _ = family()
    bad = []
    for blk in seq.blocks:
        e = blk.elements
        if len(e) != blk.p or e[0] < blk.a or e[-1] > blk.a + blk.p**2:
            bad.append(blk.k)
    increasing = bool(np.all(np.diff(seq.merged) > 0))
    spread = seq.growth_spread()
    ok = not bad and increasing and spread <= GROWTH_BOUND
    return record(8, "sequence laws", ok, f"bad blocks {bad or 'none'}, increasing {increasing}, growth spread {spread:.2f} (<= 100)")


def criterion_9() -> bool:
    seq, _ = family()
    res = [comparability_check(f, seq) for f in input_suite()]
    lower = sum(r["lower_ok"] for r in res)
    upper = sum(r["upper_ok"] for r in res)
    ok = lower == upper == len(res)
    return record(9, "comparability", ok, f"lower {lower}/{len(res)}, upper {upper}/{len(res)}, max lower ratio {max(r['max_lower_ratio'] for r in res):.3f}")


def criterion_10() -> bool:
    seq, triples = family()
    nus = [t.nu for t in triples]
    const = 11 * 3**2
    res = [hl_domination_check(f, nus, const) for f in input_suite()]
    passed = sum(r["pass"] for r in res)
    worst = max(r["worst_ratio"] for r in res)
    return record(10, "Hardy-Littlewood domination", passed == len(res), f"{passed}/{len(res)} exact, worst ratio {worst:.2f} vs {const}")


def criterion_11() -> bool:
    seq, triples = family()
    alphas = (0.25, 2.0, 16.0)
    worst_e = worst_g = 0.0
    fails = []
    for i, f in enumerate(input_suite()):
        for a in alphas:
            ins = inspect_proof(f, seq, a, s_max=20, triples=triples)
            worst_e = max(worst_e, ins.constants["exceptional_total"])
            worst_g = max(worst_g, ins.constants["square_function"])
            if not (ins.checks["total_bound"] and ins.checks["square_function_bound"] and ins.checks["generous_domination"]):
                fails.append((i, a))
    ok = not fails
    detail = f"|E| alpha/||f|| max {worst_e:.3f} (<= 8), G_s ratio max {worst_g:.3f} (<= {SQUARE_FUNCTION_CONSTANT:g}), failures {fails or 'none'}"
    return record(11, "proof machinery", ok, detail)


def criterion_12() -> bool:
    seq, _ = family()
    mf = maximal_function(IntSignal.delta(0), seq)
    r128 = weak_type_report(mf, 1.0, per_decade=128)
    r256 = weak_type_report(mf, 1.0, per_decade=256)
    halving = 0.45 <= r256.grid_slack / r128.grid_slack <= 0.55
    single_ok = r128.worst_ratio <= 1 + r128.grid_slack and r256.worst_ratio <= 1 + r256.grid_slack and r128.grid_slack <= 0.02
    suite_max = 0.0
    for s in (seq, standard_sequence(paraboloid_kind(2), count=4)):
        for fam in ("deltas", "comb", "difference-comb"):
            suite_max = max(suite_max, adversary_suite(s, fam, trials=8, seed=SUITE_SEED, per_decade=128).suite_max)
    squares = adversary_suite(seq, "squares-baseline", trials=8, seed=SUITE_SEED, per_decade=128).suite_max
    ok = single_ok and halving and suite_max <= ADVERSARY_BOUND
    detail = (
        f"single delta {r128.worst_ratio:.5f} (slack {r128.grid_slack:.4f}), {r256.worst_ratio:.5f} (slack {r256.grid_slack:.4f}); "
        f"adversary max {suite_max:.3f} (<= 50); squares baseline {squares:.3f} (reported)"
    )
    return record(12, "weak-type probes", ok, detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(12)])
def test_acceptance(criterion):
    assert criterion(), RESULTS[int(criterion.__name__.split("_")[1])]


if __name__ == "__main__":
    for c in CRITERIA:
        c()
    print()
    for n in sorted(RESULTS):
        print(RESULTS[n])
