import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakseq.construction import make_sigma_triple, power_kind, rho_dagger, rho_ddagger
from weakseq.cyclic_fourier import CyclicSignal, dft, weil_sup
from weakseq.errors import ShapeMismatch
from weakseq.signals import IntSignal
from weakseq.torus import decay_fit, grid_sup, sharpness_check, torus_eval, transference_check

signals = st.dictionaries(st.integers(-300, 300), st.floats(-4, 4).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=10).map(
    lambda d: IntSignal.from_sparse(d.items())
)


def test_torus_eval_examples():
    assert torus_eval(IntSignal.delta(0), 0.37) == 1
    v = torus_eval(IntSignal.delta(1), 0.3)
    assert abs(v - cmath.exp(-2j * math.pi * 0.3)) < 1e-15
    assert abs(torus_eval(IntSignal(0, np.array([1.0, 1.0])), 0.5)) < 1e-15


def test_torus_eval_exact_phase_for_rationals():
    f = IntSignal.delta(10**15 + 3)
    # 10^15 + 3 = 3 mod 4
    assert abs(torus_eval(f, Fraction(1, 4)) - 1j) < 1e-12


@settings(max_examples=40)
@given(signals, st.floats(0, 1))
def test_conjugate_symmetry(f, theta):
    assert abs(torus_eval(f, theta) - torus_eval(f, 1 - theta).conjugate()) < 1e-12


@settings(max_examples=25)
@given(signals, st.integers(0, 14))
def test_torus_matches_folded_dft(f, xi):
    q = 15
    folded = np.zeros(q)
    np.add.at(folded, f.positions() % q, f.values)
    dft_val = dft(CyclicSignal(q, 1, folded))([xi])
    assert abs(torus_eval(f, Fraction(xi, q)) - dft_val) < 1e-9


def test_grid_sup_examples():
    s = grid_sup(IntSignal(0, np.array([1.0, 1.0])))
    assert abs(s.sup_value - 2) < 1e-12 and s.argmax_theta in (0.0, 1.0) or abs(s.argmax_theta) < 1e-6
    s = grid_sup(IntSignal(0, np.array([0.5, -0.5])))
    assert abs(s.sup_value - 1) < 1e-12 and abs(s.argmax_theta - 0.5) < 1e-6
    assert grid_sup(IntSignal.zero()).sup_value == 0
    with pytest.raises(ValueError):
        grid_sup(IntSignal.delta(0), oversample=4)


@settings(max_examples=20, deadline=None)
@given(signals)
def test_grid_sup_is_a_lower_bound_refinement_helps(f):
    raw = grid_sup(f, refine=False)
    ref = grid_sup(f)
    assert ref.sup_value >= raw.sup_value - 1e-12
    assert ref.sup_value <= f.l1() + 1e-9
    assert abs(abs(torus_eval(f, ref.argmax_theta)) - ref.sup_value) < 1e-9


@pytest.mark.parametrize("p", [5, 11, 23])
def test_grid_sup_monotone_in_oversample(p):
    f = rho_dagger(p, power_kind(2))
    vals = [grid_sup(f, ov).sup_value for ov in (8, 16, 32, 64)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_rho_dagger_sup_for_p5():
    sup = grid_sup(rho_dagger(5, power_kind(2))).sup_value
    # frozen measured constant: sup * 5^{1/2} = 1.743...
    assert abs(sup * math.sqrt(5) - 1.7435) < 5e-3


@pytest.mark.parametrize("p", [5, 11])
def test_transference_identity(p):
    dd, d = rho_ddagger(p, power_kind(2)), rho_dagger(p, power_kind(2))
    rng = np.random.default_rng(p)
    assert transference_check(dd, d, p, 2, rng.random(64).tolist()) <= 1e-9
    assert transference_check(dd, d, p, 2, [0.5, Fraction(1, 2)]) <= 1e-9
    assert abs(torus_eval(d, 0.0) - d.mass()) < 1e-12


def test_transference_guard():
    with pytest.raises(ShapeMismatch):
        transference_check(rho_ddagger(5, power_kind(2)), rho_dagger(7, power_kind(2)), 7, 2, [0.1])


def test_decay_fit_examples():
    pts = [(p, p**-0.5) for p in (5, 11, 23)]
    assert abs(decay_fit(pts)[0] + 0.5) < 1e-12
    gauss = [(p, weil_sup(p, 2)) for p in (5, 7, 11, 13, 17)]
    assert abs(decay_fit(gauss)[0] + 0.5) < 1e-9
    assert abs(decay_fit([(5, 2.0), (7, 2.0), (9, 2.0)])[0]) < 1e-12
    with pytest.raises(ValueError):
        decay_fit([(5, 1.0), (5, 2.0), (7, 1.0)])
    with pytest.raises(ValueError):
        decay_fit([(5, 1.0), (7, 2.0)])


def test_sharpness_examples():
    lhs, rhs, ok = sharpness_check(make_sigma_triple(5, power_kind(2)).sigma, 5)
    assert abs(lhs - 1) < 1e-12 and abs(rhs - 2 * 5**0.25) < 1e-9 and ok
    assert sharpness_check(CyclicSignal.zeros(5, 2), 5) == (0.0, 0.0, True)
    assert sharpness_check(make_sigma_triple(7, power_kind(2)).sigma, 7)[2]
    with pytest.raises(ValueError):
        sharpness_check(CyclicSignal(5, 2, np.ones((5, 5))), 5)
