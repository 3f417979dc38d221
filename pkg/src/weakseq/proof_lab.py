"""Finite instances of the exceptional-set / square-function argument.

Given f, a threshold alpha and block triples (mu_k, nu_k, lambda_k) with
per-block scales S_k, this module computes the objects of the weak-type
argument exactly on their finite windows:

* the dyadic level pieces f_j (|f| in [2^j, 2^{j+1})),
* the exceptional sets E_j = union over S_k < 2^j / alpha of supp f_j + supp mu_k,
* the square functions G_s = (sum_k |f_{j(k,s)} * lambda_k|^2)^{1/2} with
  S_k 2^{-s} alpha <= 2^{j(k,s)} < 2 S_k 2^{-s} alpha,

and the inequalities linking them.  Scales default to the block cardinality,
which is p_k for the power-diagonal construction.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .construction import BlockTriple, SequenceBlock, SparseSequence, make_block_triple
from .maximal import hl_structural_constant
from .signals import IntSignal, convolve
from .torus import DEFAULT_OVERSAMPLE, grid_sup

S_MAX = 20
EXCEPTIONAL_LEVEL_CONSTANT = 4
EXCEPTIONAL_TOTAL_CONSTANT = 8
# 4 * C_f^2 with C_f = 3.6 >= max_k sup|lambda_k^| p_k^{1/2} on the 6-block m = 2 family
SQUARE_FUNCTION_CONSTANT = 52.0


@dataclass
class LevelDecomposition:
    parts: dict[int, IntSignal]

    def levels(self) -> list[int]:
        return sorted(self.parts)

    def l1(self) -> float:
        return sum(p.l1() for p in self.parts.values())


def dyadic_level(v: float) -> int:
    """The integer j with 2^j <= |v| < 2^{j+1}, exactly."""
    mant, exp = math.frexp(abs(v))
    if mant == 0:
        raise ValueError("zero has no dyadic level")
    return exp - 1


def level_decompose(f: IntSignal) -> LevelDecomposition:
    parts: dict[int, list] = {}
    for n, v in f.to_sparse():
        parts.setdefault(dyadic_level(v), []).append((n, v))
    return LevelDecomposition({j: IntSignal.from_sparse(pairs) for j, pairs in parts.items()})


def bracket_level(scale: float, alpha: float, s: int) -> int:
    """The integer j with scale 2^{-s} alpha <= 2^j < 2 scale 2^{-s} alpha."""
    t = scale * alpha * 2.0**-s
    mant, exp = math.frexp(t)
    return exp - 1 if mant == 0.5 else exp


@dataclass
class ScaleAssignment:
    scales: tuple[float, ...]
    gamma: float
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly increasing")

    def lacunarity(self) -> float:
        if len(self.scales) < 2:
            return float("inf")
        return min(b / a for a, b in zip(self.scales, self.scales[1:]))

    @classmethod
    def for_sequence(cls, seq: SparseSequence, alpha: float) -> ScaleAssignment:
        scales = tuple(float(len(b.elements)) for b in seq.blocks)
        kinds = set(seq.kinds)
        gamma = float("nan")
        if len(kinds) == 1:
            kd = seq.kinds[0]
            # |supp sigma| = |Z_p^dim|^gamma
            gamma = 1.0 / kd.param if kd.name == "power" else kd.param / (kd.param + 1)
        return cls(scales, gamma, alpha)


@dataclass
class ProofInspection:
    exceptional_sizes: dict[int, int] = field(default_factory=dict)
    total_size: int = 0
    gs_norms: dict[int, float] = field(default_factory=dict)
    constants: dict[str, float] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    exceptional_points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("exceptional_points")
        d["exceptional_sizes"] = {str(k): v for k, v in self.exceptional_sizes.items()}
        d["gs_norms"] = {str(k): v for k, v in self.gs_norms.items()}
        return d


def exceptional_set(
    decomp: LevelDecomposition,
    blocks: Sequence[SequenceBlock],
    scales: ScaleAssignment,
    supports: Sequence[np.ndarray] | None = None,
) -> ProofInspection:
    """Sumsets E_j and their union, with the per-level and total size bounds.

    ``supports`` replaces the block element sets as supp mu_k when given.
    """
    alpha = scales.alpha
    supps = [np.asarray(b.elements, dtype=np.int64) for b in blocks] if supports is None else list(supports)
    out = ProofInspection()
    union: set[int] = set()
    worst_level = 0.0
    for j in decomp.levels():
        fj = decomp.parts[j]
        sj = fj.support()
        ej: set[int] = set()
        for sk, supp in zip(scales.scales, supps):
            if sk < 2.0**j / alpha:
                ej.update((sj[:, None] + supp[None, :]).reshape(-1).tolist())
        out.exceptional_sizes[j] = len(ej)
        union |= ej
        worst_level = max(worst_level, len(ej) * alpha / fj.l1())
    out.total_size = len(union)
    out.exceptional_points = np.array(sorted(union), dtype=np.int64)
    mass = decomp.l1()
    out.constants["exceptional_per_level"] = worst_level
    out.constants["exceptional_total"] = out.total_size * alpha / mass if mass else 0.0
    out.checks["union_le_sum"] = out.total_size <= sum(out.exceptional_sizes.values())
    out.checks["per_level_bound"] = worst_level <= EXCEPTIONAL_LEVEL_CONSTANT
    out.checks["total_bound"] = out.total_size * alpha <= EXCEPTIONAL_TOTAL_CONSTANT * mass
    return out


class _Pieces:
    """Cache of |f_j * lambda_k| on demand."""

    def __init__(self, decomp: LevelDecomposition, lambdas: Sequence[IntSignal]):
        self.decomp = decomp
        self.lambdas = lambdas
        self._cache: dict[tuple[int, int], IntSignal] = {}

    def get(self, j: int, k: int) -> IntSignal | None:
        if j not in self.decomp.parts:
            return None
        key = (j, k)
        if key not in self._cache:
            self._cache[key] = convolve(self.decomp.parts[j], self.lambdas[k]).abs()
        return self._cache[key]


def _accumulate(target: dict, piece: IntSignal, fn) -> None:
    for x, v in zip(piece.positions().tolist(), piece.values.tolist()):
        target[x] = fn(target.get(x, 0.0), v)


def square_function(
    decomp: LevelDecomposition,
    lambdas: Sequence[IntSignal],
    scales: ScaleAssignment,
    s: int,
    _pieces: _Pieces | None = None,
) -> IntSignal:
    """G_s(x) = (sum_k |f_{j(k,s)} * lambda_k(x)|^2)^{1/2}."""
    if len(lambdas) != len(scales.scales):
        raise ValueError("need one lambda per scale")
    pieces = _pieces or _Pieces(decomp, lambdas)
    acc: IntSignal | None = None
    for k, sk in enumerate(scales.scales):
        piece = pieces.get(bracket_level(sk, scales.alpha, s), k)
        if piece is None or piece.is_zero:
            continue
        sq = IntSignal(piece.offset, piece.values**2)
        acc = sq if acc is None else acc + sq
    if acc is None:
        return IntSignal.zero()
    return IntSignal(acc.offset, np.sqrt(acc.values))


def square_function_norms(decomp, lambdas, scales, s_max: int = S_MAX) -> dict[int, float]:
    """||G_s||_2^2 as sum_k ||f_{j(k,s)} * lambda_k||_2^2, for s = 0 .. s_max."""
    pieces = _Pieces(decomp, lambdas)
    out = {}
    for s in range(s_max + 1):
        total = 0.0
        for k, sk in enumerate(scales.scales):
            piece = pieces.get(bracket_level(sk, scales.alpha, s), k)
            if piece is not None:
                total += piece.l2sq()
        out[s] = total
    return out


def levels_needed(decomp: LevelDecomposition, scales: ScaleAssignment) -> int:
    """Largest s for which some bracket j(k, s) with 2^j <= S_k alpha hits a level of f."""
    need = 0
    for sk in scales.scales:
        top = bracket_level(sk, scales.alpha, 0)
        for j in decomp.levels():
            if 2.0**j <= sk * scales.alpha:
                # halving the scale moves the bracket down by exactly one level
                need = max(need, top - j)
    return need


def generous_domination(
    decomp: LevelDecomposition,
    lambdas: Sequence[IntSignal],
    scales: ScaleAssignment,
    s_max: int = S_MAX,
) -> dict:
    """Check sup_k sum_{2^j <= S_k alpha} |f_j * lambda_k(x)| <= sum_s G_s(x) pointwise.

    Left and right sides accumulate their terms in the same order of s, so the
    floating-point comparison inherits the exact termwise inequality.
    """
    pieces = _Pieces(decomp, lambdas)
    alpha = scales.alpha
    lhs_k: list[dict[int, float]] = [dict() for _ in scales.scales]
    rhs: dict[int, float] = {}
    for s in range(s_max + 1):
        g = square_function(decomp, lambdas, scales, s, pieces)
        if not g.is_zero:
            _accumulate(rhs, g, lambda a, b: a + b)
        for k, sk in enumerate(scales.scales):
            j = bracket_level(sk, alpha, s)
            if 2.0**j > sk * alpha:
                continue
            piece = pieces.get(j, k)
            if piece is not None and not piece.is_zero:
                _accumulate(lhs_k[k], piece, lambda a, b: a + b)
    lhs: dict[int, float] = {}
    for d in lhs_k:
        for x, v in d.items():
            lhs[x] = max(lhs.get(x, 0.0), v)
    bad = [x for x, v in lhs.items() if v > rhs.get(x, 0.0)]
    xs = sorted(set(lhs) | set(rhs))
    return {
        "pass": not bad,
        "violations": len(bad),
        "window": (xs[0], xs[-1]) if xs else (0, -1),
        "points": len(xs),
        "s_needed": levels_needed(decomp, scales),
        "truncated": levels_needed(decomp, scales) > s_max,
    }


def hypothesis_check(
    blocks: Sequence[SequenceBlock],
    triples: Sequence[BlockTriple],
    scales: ScaleAssignment,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> dict:
    """Support size, Fourier decay and Hardy-Littlewood hypotheses for each block triple.

    Fourier constants are measured at ``oversample`` and again at twice that
    to report their stability under grid refinement.
    """
    rows = []
    for blk, tri, sk in zip(blocks, triples, scales.scales):
        m = tri.dim
        supp = int(tri.mu_tilde.support().size)
        lam = tri.lam.to_float()
        c1 = grid_sup(lam, oversample).sup_value * math.sqrt(sk)
        c2 = grid_sup(lam, 2 * oversample).sup_value * math.sqrt(sk)
        hl = hl_structural_constant(tri.nu)
        rows.append(
            {
                "k": blk.k,
                "p": tri.p,
                "support": supp,
                "support_ok": supp <= 3**m * sk,
                "fourier_constant": c1,
                "fourier_constant_refined": c2,
                "refinement_change": abs(c2 - c1) / c1 if c1 else 0.0,
                "hl_constant": float(hl),
                "hl_ok": hl <= 11 * 3**m,
            }
        )
    c_f = max((r["fourier_constant"] for r in rows), default=0.0)
    stable = all(r["refinement_change"] <= 0.05 for r in rows)
    return {
        "blocks": rows,
        "fourier_constant": c_f,
        "fourier_constant_refined": max((r["fourier_constant_refined"] for r in rows), default=0.0),
        "hl_constant": max((r["hl_constant"] for r in rows), default=0.0),
        "pass": all(r["support_ok"] and r["hl_ok"] for r in rows) and stable,
        "refinement_stable": stable,
    }


def sequence_triples(seq: SparseSequence) -> list[BlockTriple]:
    return [make_block_triple(b.p, b.kind, b.a) for b in seq.blocks]


def inspect_proof(f: IntSignal, seq: SparseSequence, alpha: float, s_max: int = S_MAX, triples=None) -> ProofInspection:
    """Exceptional sets, square-function norms and the domination check for one (f, alpha)."""
    scales = ScaleAssignment.for_sequence(seq, alpha)
    triples = triples if triples is not None else sequence_triples(seq)
    lambdas = [t.lam.to_float() for t in triples]
    decomp = level_decompose(f)
    out = exceptional_set(decomp, seq.blocks, scales)
    mass = f.l1()
    out.gs_norms = square_function_norms(decomp, lambdas, scales, s_max)
    ratios = [v * 2.0**s / (alpha * mass) for s, v in out.gs_norms.items()] if mass else [0.0]
    out.constants["square_function"] = max(ratios)
    out.checks["square_function_bound"] = max(ratios) <= SQUARE_FUNCTION_CONSTANT
    dom = generous_domination(decomp, lambdas, scales, s_max)
    out.checks["generous_domination"] = dom["pass"]
    out.checks["levels_exhausted"] = not dom["truncated"]
    out.constants["gamma"] = scales.gamma
    return out
