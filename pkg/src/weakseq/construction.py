"""Measures on Z_p^m, their transfer to the integers, and the sparse sequences.

Pipeline for one block (prime p, offset a):

    sigma on Z_p^m  --periodize-->  kappa on Z_{3p}^m = [-p, 2p-1]^m
                    --cutoff phi--> rho on the box [-p, 2p-1]^m in Z^m
                    --push along F(k) = sum_j p^{j-1} k_j-->  a signal on Z

The composite sigma -> signal on Z is ``gamma_transfer``.  Cutoff values and
all measure atoms are rationals; the exact path keeps them as integer
numerators over a common denominator until a float view is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclic_fourier import CAPACITY, CyclicSignal, dft
from .errors import CapacityError, HypothesisViolation, ValidationError
from .numtheory import OffsetSchedule, PrimeSchedule, require_odd_prime
from .signals import ExactSignal, IntSignal

POWER = "power"
PARABOLOID = "paraboloid"


@dataclass(frozen=True)
class BlockKind:
    """``power`` with parameter m, or ``paraboloid`` with parameter d."""

    name: str
    param: int

    def __post_init__(self):
        if self.name not in (POWER, PARABOLOID):
            raise ValueError(f"unknown block kind {self.name!r}")
        if self.name == POWER and self.param < 2:
            raise HypothesisViolation("power-diagonal blocks need m >= 2")
        if self.name == PARABOLOID and self.param < 1:
            raise HypothesisViolation("paraboloid blocks need d >= 1")

    @classmethod
    def parse(cls, text: str) -> BlockKind:
        name, _, param = text.partition(":")
        return cls(name.strip(), int(param))

    def __str__(self) -> str:
        return f"{self.name}:{self.param}"

    @property
    def dim(self) -> int:
        """Number of coordinates of the ambient group Z_p^dim; also the span exponent."""
        return self.param if self.name == POWER else self.param + 1

    @property
    def growth_exponent(self) -> Fraction:
        return Fraction(self.param) if self.name == POWER else Fraction(self.param + 1, self.param)

    def atom_count(self, p: int) -> int:
        return p if self.name == POWER else p**self.param


def power_kind(m: int) -> BlockKind:
    return BlockKind(POWER, m)


def paraboloid_kind(d: int) -> BlockKind:
    return BlockKind(PARABOLOID, d)


def _as_kind(kind: BlockKind | int) -> BlockKind:
    return kind if isinstance(kind, BlockKind) else power_kind(int(kind))


# -- measures on Z_p^m -------------------------------------------------------


def sigma_atoms(p: int, kind: BlockKind) -> np.ndarray:
    """Atom coordinates, one row per atom, all in [0, p-1]."""
    if kind.name == POWER:
        k = np.arange(p, dtype=np.int64)
        cols = [k]
        for _ in range(kind.param - 1):
            cols.append(cols[-1] * k % p)
        return np.stack(cols, axis=1)
    d = kind.param
    grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * d), indexing="ij")
    n = np.stack([g.reshape(-1) for g in grids], axis=1)
    return np.concatenate([n, ((n * n).sum(axis=1) % p)[:, None]], axis=1)


@dataclass(frozen=True, eq=False)
class CyclicMeasureTriple:
    """sigma (atoms of mass 1/count), the uniform sigma0, and sigma_star = sigma - sigma0."""

    p: int
    kind: BlockKind
    atoms: np.ndarray
    counts: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.kind.dim

    @property
    def atom_denominator(self) -> int:
        return self.kind.atom_count(self.p)

    @property
    def uniform_denominator(self) -> int:
        return self.p**self.dim

    @property
    def sigma(self) -> CyclicSignal:
        return CyclicSignal(self.p, self.dim, self.counts / self.atom_denominator)

    @property
    def sigma0(self) -> CyclicSignal:
        return CyclicSignal(self.p, self.dim, np.full((self.p,) * self.dim, 1.0 / self.uniform_denominator))

    @property
    def sigma_star(self) -> CyclicSignal:
        # exact numerators over p^dim, then one rounding
        num = self.counts * (self.uniform_denominator // self.atom_denominator) - 1
        return CyclicSignal(self.p, self.dim, num / self.uniform_denominator)


def make_sigma_triple(p: int, kind: BlockKind | int) -> CyclicMeasureTriple:
    kind = _as_kind(kind)
    require_odd_prime(p)
    if kind.name == POWER and p <= kind.param:
        raise HypothesisViolation(f"need p > m, got p={p}, m={kind.param}")
    if p**kind.dim > CAPACITY:
        raise CapacityError(f"{p}^{kind.dim} exceeds capacity 2^27")
    atoms = sigma_atoms(p, kind)
    counts = np.zeros((p,) * kind.dim, dtype=np.int64)
    np.add.at(counts, tuple(atoms.T), 1)
    if counts.max() != 1:
        raise AssertionError("atoms of sigma must be distinct")
    return CyclicMeasureTriple(p, kind, atoms, counts)


# -- cutoff -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CutoffProfile:
    """phi on [-p, 2p-1] as integer numerators over ``denominator``.

    phi = 1 on [0, p-1], 0 up to -p + (p-1)/2 and from p - 1 + (p-1)/2 on,
    affine in between.
    """

    p: int
    numerators: np.ndarray
    denominator: int

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.p, 2 * self.p, dtype=np.int64)

    @property
    def values(self) -> list[Fraction]:
        return [Fraction(int(n), self.denominator) for n in self.numerators]

    def __call__(self, i: int) -> Fraction:
        return Fraction(int(self.numerators[i + self.p]), self.denominator)

    def as_float(self) -> np.ndarray:
        return self.numerators / self.denominator

    def total(self) -> Fraction:
        return Fraction(int(self.numerators.sum()), self.denominator)


def make_cutoff(p: int) -> CutoffProfile:
    if p % 2 == 0:
        raise ValueError(f"cutoff needs odd p, got {p}")
    if p < 5:
        raise ValueError(f"cutoff needs p >= 5, got {p}")
    h = (p - 1) // 2
    up, down = p - h, h  # ramp lengths: [-p+h, 0] and [p-1, p-1+h]
    den = up * down  # consecutive integers, so this is their lcm
    i = np.arange(-p, 2 * p, dtype=np.int64)
    num = np.zeros(3 * p, dtype=np.int64)
    num[(i >= 0) & (i <= p - 1)] = den
    rise = (i > -p + h) & (i < 0)
    num[rise] = (i[rise] - (-p + h)) * down
    fall = (i > p - 1) & (i < p - 1 + h)
    num[fall] = (p - 1 + h - i[fall]) * up
    return CutoffProfile(p, num, den)


# -- transfer to the integers -----------------------------------------------


def pushforward_positions(p: int, dim: int) -> np.ndarray:
    """F(k) = sum_j p^{j-1} k_j on the box [-p, 2p-1]^dim, as a dense int array."""
    k = np.arange(-p, 2 * p, dtype=np.int64)
    pos = np.zeros((3 * p,) * dim, dtype=np.int64)
    for j in range(dim):
        shape = [1] * dim
        shape[j] = 3 * p
        pos = pos + (p**j * k).reshape(shape)
    return pos


def _box_weights(phi: np.ndarray, dim: int) -> np.ndarray:
    w = phi
    for _ in range(dim - 1):
        w = np.multiply.outer(w, phi)
    return w


def _push(weights: np.ndarray, p: int, dim: int) -> tuple[int, np.ndarray]:
    pos = pushforward_positions(p, dim).reshape(-1)
    w = weights.reshape(-1)
    nz = np.flatnonzero(w)
    lo = -p * (p**dim - 1) // (p - 1)
    hi = (2 * p - 1) * (p**dim - 1) // (p - 1)
    out = np.zeros(hi - lo + 1, dtype=weights.dtype)
    np.add.at(out, pos[nz] - lo, w[nz])
    return lo, out


def _check_box(p: int, dim: int) -> None:
    if (3 * p) ** dim > CAPACITY:
        raise CapacityError(f"(3*{p})^{dim} exceeds capacity 2^27")


def periodize(signal: CyclicSignal) -> CyclicSignal:
    """kappa(k) = signal([k]_p) on Z_{3p}^m, stored with origin -p."""
    p, m = signal.q, signal.m
    _check_box(p, m)
    return CyclicSignal(3 * p, m, np.tile(signal.values, (3,) * m), origin=-p)


def kappa_structure(p: int, kind: BlockKind | int) -> tuple[float, float]:
    """Deviations of kappa^ from its lattice form, with kappa the periodization of sigma_star.

    Returns (max |kappa^(xi)| off 3 Z_{3p}^m, max |kappa^(3 eta) - 3^m sigma_star^(eta)|).
    """
    tri = make_sigma_triple(p, kind)
    star = tri.sigma_star
    kap = dft(periodize(star))
    m = star.m
    el = kap.elements()
    lat = np.flatnonzero(el % 3 == 0)
    eta = (el[lat] // 3) % p
    mask = np.ones(kap.values.shape, dtype=bool)
    mask[np.ix_(*[lat] * m)] = False
    off = float(np.abs(kap.values[mask]).max(initial=0.0))
    on = kap.values[np.ix_(*[lat] * m)]
    dev = float(np.abs(on - 3**m * dft(star).values[np.ix_(*[eta] * m)]).max())
    return off, dev


def apply_cutoff(kappa: CyclicSignal) -> CyclicSignal:
    """rho = (prod_i phi(k_i)) kappa on [-p, 2p-1]^m."""
    p = kappa.q // 3
    weights = _box_weights(make_cutoff(p).as_float(), kappa.m)
    return CyclicSignal(kappa.q, kappa.m, weights * kappa.values, origin=-p)


def gamma_transfer(measure: CyclicSignal, p: int, m: int) -> IntSignal:
    """Periodize, cut off, transplant to Z^m and push forward to Z (float path)."""
    if measure.q != p or measure.m != m:
        raise ValueError("measure must live on Z_p^m")
    rho = apply_cutoff(periodize(measure))
    lo, vals = _push(rho.values, p, m)
    if not np.iscomplexobj(measure.values) or not np.any(measure.values.imag):
        vals = vals.real.copy()
    return IntSignal(lo, vals)


def gamma_transfer_exact(counts: np.ndarray, denominator: int, p: int) -> ExactSignal:
    """Exact Gamma of the measure counts / denominator on Z_p^m (integer counts)."""
    dim = counts.ndim
    _check_box(p, dim)
    cut = make_cutoff(p)
    den = cut.denominator**dim * denominator
    peak = cut.denominator**dim * 3 ** (dim - 1) * int(np.abs(counts).max(initial=0))
    dtype = np.int64 if peak < 1 << 62 else object
    phi = cut.numerators.astype(dtype)
    weights = _box_weights(phi, dim) * np.tile(counts.astype(dtype), (3,) * dim)
    lo, vals = _push(weights, p, dim)
    return ExactSignal(lo, vals, den)


@dataclass(frozen=True, eq=False)
class BlockTriple:
    """mu_tilde = Gamma(sigma) shifted by a, nu = Gamma(sigma0) shifted by a, and their difference."""

    p: int
    kind: BlockKind
    a: int
    mu_tilde: ExactSignal
    nu: ExactSignal
    lam: ExactSignal

    @property
    def dim(self) -> int:
        return self.kind.dim

    def floats(self) -> tuple[IntSignal, IntSignal, IntSignal]:
        return self.mu_tilde.to_float(), self.nu.to_float(), self.lam.to_float()

    def structure_report(self, block: SequenceBlock | None = None) -> dict:
        """Exact checks of the block-measure properties; all entries are bools or ints."""
        p, m, a = self.p, self.dim, self.a
        nu_max = self.nu.max_value()
        supp_nu = self.nu.support()
        supp_mu = self.mu_tilde.support()
        out = {
            "mu_tilde_nonnegative": bool(all(int(v) >= 0 for v in self.mu_tilde.numerators)),
            "nu_sup_ok": nu_max <= Fraction(3**m, p**m),
            "nu_window_ok": bool(supp_nu.size == 0 or (supp_nu.min() >= a - 2 * p**m and supp_nu.max() <= a + 2 * p**m)),
            "mu_support_size": int(supp_mu.size),
            "mu_support_ok": int(supp_mu.size) <= 3**m * self.kind.atom_count(p),
            "lambda_identity": _exact_equal(self.lam, self.mu_tilde - self.nu),
        }
        if block is not None:
            count = len(block.elements)
            num = self.mu_tilde.numerator_at(np.asarray(block.elements, dtype=np.int64))
            # mu_tilde(n) >= 1/|S_k| at every n in S_k
            out["lower_bound_ok"] = bool(all(int(v) * count >= self.mu_tilde.denominator for v in num))
            out["lower_bound_pm_ok"] = bool(all(int(v) * p**m >= self.mu_tilde.denominator for v in num))
        return out


def _exact_equal(f: ExactSignal, g: ExactSignal) -> bool:
    diff = f - g
    return diff.is_zero


def make_block_triple(p: int, kind: BlockKind | int, a: int) -> BlockTriple:
    kind = _as_kind(kind)
    tri = make_sigma_triple(p, kind)
    mu = gamma_transfer_exact(tri.counts, tri.atom_denominator, p).shift(a)
    ones = np.ones((p,) * kind.dim, dtype=np.int64)
    nu = gamma_transfer_exact(ones, tri.uniform_denominator, p).shift(a)
    return BlockTriple(p, kind, a, mu, nu, mu - nu)


def rho_dagger(p: int, kind: BlockKind | int) -> IntSignal:
    """Gamma(sigma_star): the unshifted difference of the block triple."""
    return make_block_triple(p, kind, 0).lam.to_float()


def rho_ddagger(p: int, kind: BlockKind | int) -> CyclicSignal:
    """phi * kappa on [-p, 2p-1]^m, read as a function on Z^m supported in that box."""
    tri = make_sigma_triple(p, _as_kind(kind))
    return apply_cutoff(periodize(tri.sigma_star))


# -- sequence blocks --------------------------------------------------------


@dataclass(frozen=True)
class SequenceBlock:
    k: int
    p: int
    a: int
    elements: tuple[int, ...]
    kind: BlockKind

    def validate(self) -> None:
        e = self.elements
        if list(e) != sorted(set(e)):
            raise ValidationError(f"block {self.k}: elements not sorted and distinct")
        if len(e) != self.kind.atom_count(self.p):
            raise ValidationError(f"block {self.k}: expected {self.kind.atom_count(self.p)} elements, got {len(e)}")
        if e and (e[0] < self.a or e[-1] > self.a + self.p**self.kind.dim):
            raise ValidationError(f"block {self.k}: elements leave [a, a + p^{self.kind.dim}]")

    def measure(self) -> ExactSignal:
        """Uniform probability measure on the block elements."""
        e = np.asarray(self.elements, dtype=np.int64)
        num = np.zeros(int(e[-1] - e[0]) + 1, dtype=np.int64)
        num[e - e[0]] = 1
        return ExactSignal(int(e[0]), num, len(self.elements))


def block_offsets(p: int, kind: BlockKind) -> np.ndarray:
    """F applied to the atoms of sigma: the block elements before the shift by a."""
    atoms = sigma_atoms(p, kind)
    weights = p ** np.arange(kind.dim, dtype=np.int64)
    return atoms @ weights


def block_elements(p: int, m: int, a: int, k: int = 1) -> SequenceBlock:
    """{a + sum_r p^{r-1} [j^r]_p : 0 <= j < p}."""
    require_odd_prime(p)
    if a < 0:
        raise ValueError("offset must be nonnegative")
    kind = power_kind(m)
    g = block_offsets(p, kind)
    # first base-p digit of g(j) is j itself, which certifies injectivity
    if len(set((g % p).tolist())) != p:
        raise AssertionError("g is not injective")
    return SequenceBlock(k, p, a, tuple(sorted(int(a + v) for v in g)), kind)


def variant_block_elements(p: int, d: int, a: int, k: int = 1) -> SequenceBlock:
    """{a + j_1 + p j_2 + ... + p^{d-1} j_d + p^d [|j|^2]_p : j in [0, p-1]^d}."""
    require_odd_prime(p)
    if a < 0:
        raise ValueError("offset must be nonnegative")
    kind = paraboloid_kind(d)
    n = block_offsets(p, kind)
    if len(set((n % p**d).tolist())) != p**d:
        raise AssertionError("n(., p) is not injective")
    return SequenceBlock(k, p, a, tuple(sorted(int(a + v) for v in n)), kind)


def make_block(k: int, p: int, a: int, kind: BlockKind) -> SequenceBlock:
    if kind.name == POWER:
        return block_elements(p, kind.param, a, k)
    return variant_block_elements(p, kind.param, a, k)


# -- merged sequences -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SparseSequence:
    kinds: tuple[BlockKind, ...]
    schedule: PrimeSchedule
    offsets: OffsetSchedule
    blocks: tuple[SequenceBlock, ...]
    merged: np.ndarray

    @property
    def label(self) -> str:
        if len(set(self.kinds)) == 1:
            return self.kinds[0].name
        return "mixed"

    @property
    def target_exponent(self) -> float:
        if len(set(self.kinds)) == 1:
            return float(self.kinds[0].growth_exponent)
        return self.fitted_exponent()

    def __len__(self) -> int:
        return int(self.merged.size)

    def fitted_exponent(self) -> float:
        """Least-squares slope of log n_nu against log nu."""
        nu = np.arange(1, self.merged.size + 1, dtype=np.float64)
        slope, _ = np.polyfit(np.log(nu), np.log(self.merged.astype(np.float64)), 1)
        return float(slope)

    def growth_ratios(self, exponent: float | None = None) -> np.ndarray:
        e = self.target_exponent if exponent is None else exponent
        nu = np.arange(1, self.merged.size + 1, dtype=np.float64)
        return self.merged / nu**e

    def growth_spread(self, exponent: float | None = None) -> float:
        r = self.growth_ratios(exponent)
        return float(r.max() / r.min())

    def validate(self) -> None:
        self.schedule.validate()
        self.offsets.validate(self.schedule)
        if len(self.kinds) != len(self.schedule.primes):
            raise ValidationError("need one block kind per prime")
        for kind, e, p in zip(self.kinds, self.offsets.exponents, self.schedule.primes):
            if kind.dim != e:
                raise ValidationError(f"offset exponent {e} does not match block kind {kind}")
            if kind.name == POWER and p <= kind.param:
                raise ValidationError(f"prime {p} does not exceed m = {kind.param}")
        for blk, p, a, kind in zip(self.blocks, self.schedule.primes, self.offsets.offsets, self.kinds):
            blk.validate()
            if (blk.p, blk.a, blk.kind) != (p, a, kind):
                raise ValidationError(f"block {blk.k} disagrees with the schedules")
            if blk != make_block(blk.k, p, a, kind):
                raise ValidationError(f"block {blk.k} elements do not match the construction")
        joined = np.concatenate([np.asarray(b.elements, dtype=np.int64) for b in self.blocks])
        if not np.array_equal(joined, self.merged) or np.any(np.diff(self.merged) <= 0):
            raise ValidationError("merged sequence is not the strictly increasing union of the blocks")


def build_sequence(
    kind: BlockKind | Sequence[BlockKind],
    schedule: PrimeSchedule,
    offsets: OffsetSchedule,
) -> SparseSequence:
    """Blocks S_k from the schedules, merged into the increasing sequence n_nu.

    A list of kinds (one per block) gives the mixed-exponent construction.
    """
    n = len(schedule.primes)
    kinds = tuple([kind] * n) if isinstance(kind, BlockKind) else tuple(kind)
    if len(kinds) != n:
        raise ValueError(f"pattern has {len(kinds)} kinds for {n} blocks")
    schedule.validate()
    offsets.validate(schedule)
    blocks = tuple(make_block(k + 1, p, a, kd) for k, (p, a, kd) in enumerate(zip(schedule.primes, offsets.offsets, kinds)))
    for prev, nxt in zip(blocks, blocks[1:]):
        # cannot fire when a_{k+1} > a_k + p_k^m
        assert prev.elements[-1] < nxt.elements[0], "blocks overlap"
    merged = np.concatenate([np.asarray(b.elements, dtype=np.int64) for b in blocks])
    seq = SparseSequence(kinds, schedule, offsets, blocks, merged)
    seq.validate()
    return seq


def standard_sequence(kind: BlockKind | Sequence[BlockKind], p0: int = 5, count: int = 6, ratio=2) -> SparseSequence:
    """Sequence from the ratio-r prime schedule starting at p0 and the +1 offset rule."""
    from .numtheory import build_offset_schedule, build_prime_schedule

    sched = build_prime_schedule(p0, count, ratio)
    kinds = [kind] * count if isinstance(kind, BlockKind) else list(kind)
    offs = build_offset_schedule(sched, [kd.dim for kd in kinds])
    return build_sequence(kind if isinstance(kind, BlockKind) else kinds, sched, offs)


def mass_of_gamma(counts: np.ndarray, denominator: int, p: int) -> Fraction:
    """sum_k (prod_i phi(k_i)) * measure([k]_p), summed over the box [-p, 2p-1]^m."""
    cut = make_cutoff(p)
    lifted = cut.numerators.reshape(3, p).sum(axis=0)  # sum of phi over each residue class
    total = _box_weights(lifted.astype(object), counts.ndim) * counts.astype(object)
    return Fraction(int(total.sum()), cut.denominator**counts.ndim * denominator)

