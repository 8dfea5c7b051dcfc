"""Directed hypergraph sparsification by overlap bands.

The overlap of an arc is the largest ``k`` such that some arc set containing
it has every clique pair (tail vertex, head vertex) with multiplicity at
least ``k``.  Arcs are grouped into bands of overlap within a factor of two
and each band is sampled uniformly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .hypercore import (
    DirectedHypergraph,
    HypergraphError,
    Sparsifier,
    clique_multiplicities,
    directed_arc_energies,
)
from .rng import child_seed, uniforms

log = logging.getLogger(__name__)

#: Calibrated multiplier of r^2 log2(n) / (k eps^2) in the band sampling rate.
DEFAULT_P_C = 1.0
BRUTE_ARC_CAP = 12

Pair = tuple[int, int]


def _pairs(d: DirectedHypergraph, e: int) -> list[Pair]:
    return [(a, b) for a in sorted(d.tails[e]) for b in sorted(d.heads[e])]


@dataclass
class OverlapAssignment:
    k: list[int]
    witness: list[Pair]
    order: list[int]  # arcs in removal order

    def bands(self) -> list[tuple[int, list[int]]]:
        """Arcs grouped by exact overlap, increasing."""
        out: dict[int, list[int]] = {}
        for e, k in enumerate(self.k):
            out.setdefault(k, []).append(e)
        return sorted(out.items())

    def inverse_sum(self) -> float:
        return float(sum(1.0 / k for k in self.k))


def overlap_peel(d: DirectedHypergraph, arcs: list[int] | None = None) -> OverlapAssignment:
    """Peel arcs through their least-multiplicity clique pair; returns exact overlaps.

    ``k`` jumps to the current smallest multiplicity instead of counting up.
    Among pairs at multiplicity at most ``k`` the lexicographically smallest
    is processed first.
    """
    alive = set(range(d.m) if arcs is None else arcs)
    pairs_of = {e: _pairs(d, e) for e in alive}
    holders: dict[Pair, set[int]] = {}
    for e in alive:
        for p in pairs_of[e]:
            holders.setdefault(p, set()).add(e)
    kk = [0] * d.m
    wit: list[Pair] = [(-1, -1)] * d.m
    order = []
    k = 0
    while alive:
        k = max(k, min(len(s) for s in holders.values()))
        while True:
            low = [p for p, s in holders.items() if len(s) <= k]
            if not low:
                break
            p = min(low)
            for e in sorted(holders[p]):
                kk[e] = k
                wit[e] = p
                order.append(e)
                alive.discard(e)
                for q in pairs_of[e]:
                    if q != p:
                        holders[q].discard(e)
                        if not holders[q]:
                            del holders[q]
            del holders[p]
    return OverlapAssignment(k=kk, witness=wit, order=order)


def overlap_brute_all(d: DirectedHypergraph) -> list[int]:
    """Overlap of every arc by enumerating all arc subsets (|E| <= 12)."""
    m = d.m
    if m > BRUTE_ARC_CAP:
        raise HypergraphError(f"exhaustive overlap supports at most {BRUTE_ARC_CAP} arcs, got {m}")
    if m == 0:
        return []
    pair_ids: dict[Pair, int] = {}
    inc = []
    for e in range(m):
        for p in _pairs(d, e):
            pair_ids.setdefault(p, len(pair_ids))
    inc = np.zeros((len(pair_ids), m), dtype=np.int64)
    for e in range(m):
        for p in _pairs(d, e):
            inc[pair_ids[p], e] = 1
    masks = np.arange(1, 1 << m, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(m)) & 1).astype(np.int64)  # (S, m)
    mult = member @ inc.T  # (S, P)
    big = np.iinfo(np.int64).max
    mins = np.where(mult > 0, mult, big).min(axis=1)
    best = np.where(member.astype(bool), mins[:, None], 0).max(axis=0)
    return [int(v) for v in best]


def overlap_brute(d: DirectedHypergraph, e: int) -> int:
    if not 0 <= e < d.m:
        raise HypergraphError(f"arc index {e} out of range")
    return overlap_brute_all(d)[e]


def maximal_overlapping_set(d: DirectedHypergraph, arcs: list[int], k: int) -> list[int]:
    """Largest subset of ``arcs`` in which every clique pair has multiplicity >= k."""
    alive = set(arcs)
    holders: dict[Pair, set[int]] = {}
    for e in alive:
        for p in _pairs(d, e):
            holders.setdefault(p, set()).add(e)
    changed = True
    while changed:
        changed = False
        for p in sorted(holders):
            s = holders[p]
            if s and len(s) < k:
                for e in list(s):
                    alive.discard(e)
                    for q in _pairs(d, e):
                        holders[q].discard(e)
                changed = True
    return sorted(alive)


def is_k_overlapping(d: DirectedHypergraph, arcs: list[int], k: int) -> bool:
    mult: dict[Pair, int] = {}
    for e in arcs:
        for p in _pairs(d, e):
            mult[p] = mult.get(p, 0) + 1
    return all(v >= k for v in mult.values())


# -- sampling ----------------------------------------------------------------------


@dataclass(frozen=True)
class DirectedConfig:
    epsilon: float = 0.5
    p_c: float = DEFAULT_P_C
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.5:
            raise HypergraphError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if not self.p_c > 0:
            raise HypergraphError("p_c must be positive")


def band_rate(n: int, r: int, k: int, epsilon: float, p_c: float) -> float:
    if k < 1:
        raise HypergraphError(f"overlap level must be at least 1, got {k}")
    return min(1.0, p_c * r * r * math.log2(max(n, 2)) / (k * epsilon * epsilon))


def _band_entries(d: DirectedHypergraph, arcs: list[int], k: int, cfg: DirectedConfig, seed: int):
    if not arcs:
        return [], 1.0
    r = max(len(d.tails[e]) + len(d.heads[e]) for e in arcs)
    p = band_rate(d.n, r, k, cfg.epsilon, cfg.p_c)
    u = uniforms(seed, len(arcs))
    return [(e, float(d.weights[e]) / p) for e, ui in zip(arcs, u) if ui < p], p


def uniform_band_sparsify(band: DirectedHypergraph, k: int, cfg: DirectedConfig) -> Sparsifier:
    """Keep every arc with the same probability and reweight by its inverse."""
    ent, _ = _band_entries(band, list(range(band.m)), k, cfg, cfg.seed)
    return Sparsifier(band, ent)


@dataclass
class Band:
    k: int
    top: int
    arcs: list[int]
    rate: float
    kept: int
    seed: int


@dataclass
class DirectedRun:
    sparsifier: Sparsifier
    bands: list[Band] = field(default_factory=list)
    overlap: OverlapAssignment | None = None
    precondition_ok: bool = True

    def report(self) -> dict:
        d = self.sparsifier.parent
        return {
            "n": d.n,
            "m": d.m,
            "size": self.sparsifier.size,
            "inverse_overlap_sum": self.overlap.inverse_sum() if self.overlap else None,
            "inverse_overlap_bound": d.n * d.n,
            "band_count": len(self.bands),
            "band_bound": d.rank * math.log2(max(d.n, 2)),
            "precondition_11r_le_sqrt_eps_n": self.precondition_ok,
            "bands": [
                {"k": b.k, "top": b.top, "arcs": len(b.arcs), "rate": b.rate, "kept": b.kept} for b in self.bands
            ],
        }


def directed_sparsify(d: DirectedHypergraph, cfg: DirectedConfig | None = None) -> DirectedRun:
    """Repeatedly take the maximal ceil(kmax/2)-overlapping set of what is left and sample it."""
    cfg = cfg or DirectedConfig()
    remaining = list(range(d.m))
    entries = []
    bands = []
    full = overlap_peel(d)
    b = 0
    while remaining:
        ov = overlap_peel(d, remaining)
        top = max(ov.k[e] for e in remaining)
        k = math.ceil(top / 2)
        band = maximal_overlapping_set(d, remaining, k)
        if not band:
            raise AssertionError("empty band")
        seed = child_seed(cfg.seed, b)
        ent, p = _band_entries(d, band, k, cfg, seed)
        entries.extend(ent)
        bands.append(Band(k=k, top=top, arcs=band, rate=p, kept=len(ent), seed=seed))
        bs = set(band)
        remaining = [e for e in remaining if e not in bs]
        b += 1
    r = d.rank
    return DirectedRun(
        sparsifier=Sparsifier(d, entries),
        bands=bands,
        overlap=full,
        precondition_ok=11 * r <= math.sqrt(cfg.epsilon * d.n),
    )


# -- energies and the category probe ----------------------------------------------------


def clique_energy(d: DirectedHypergraph, x) -> float:
    x = np.asarray(x, dtype=float)
    tot = 0.0
    for t, hd, w in zip(d.tails, d.heads, d.weights):
        g = np.maximum(x[list(t)][:, None] - x[list(hd)][None, :], 0.0)
        tot += w * float((g * g).sum())
    return tot


def grouped_clique_energy(d: DirectedHypergraph, x) -> float:
    """Directed energy recomputed as the per-arc maximum over its clique pairs."""
    x = np.asarray(x, dtype=float)
    best: dict[int, float] = {}
    from .hypercore import clique_graph

    for cp in clique_graph(d):
        g = max(x[cp.tail] - x[cp.head], 0.0) ** 2
        best[cp.arc] = max(best.get(cp.arc, 0.0), g)
    return float(sum(d.weights[a] * v for a, v in best.items()))


def normalize_clique(d: DirectedHypergraph, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    q = clique_energy(d, x)
    if q <= 0:
        raise HypergraphError("vector has zero clique-graph energy")
    return x / math.sqrt(q)


@dataclass
class CategoryProbe:
    i_star: int
    k: int
    pair_category: dict[tuple[int, int, int], int]  # (arc, a, b) -> i, 0 for the residual set
    arc_category: list[int]
    rounded_arc: dict[int, np.ndarray]
    arc_energy: np.ndarray


def directed_category_probe(d: DirectedHypergraph, x, k: int, tol: float = 1e-9) -> CategoryProbe:
    """Dyadic energy categories of clique pairs and arcs, plus rounded arc energies per scale.

    Input must be unit clique energy and the arc set k-overlapping, so that no
    single pair carries more than 1/k.  An arc's category is the largest scale
    index among its pairs outside the residual set.
    """
    if k < 1:
        raise HypergraphError("k must be at least 1")
    x = np.asarray(x, dtype=float)
    if abs(clique_energy(d, x) - 1.0) > tol:
        raise HypergraphError("x must have unit clique-graph energy")
    if not is_k_overlapping(d, list(range(d.m)), k):
        raise HypergraphError(f"arc set is not {k}-overlapping")
    n = d.n
    i_star = math.ceil(3 * math.log2(max(n, 2)))
    pc: dict[tuple[int, int, int], int] = {}
    arc_cat = []
    pair_val: dict[tuple[int, int, int], float] = {}
    for e in range(d.m):
        best = 0
        for a, b in _pairs(d, e):
            q = float(d.weights[e]) * max(x[a] - x[b], 0.0) ** 2
            pair_val[(e, a, b)] = q
            if q <= 2.0 ** (-i_star) / k:
                i = 0
            else:
                i = max(1, math.ceil(-math.log2(q * k)))
                while i > 1 and q > 2.0 ** (-i + 1) / k:
                    i -= 1
                while q <= 2.0 ** (-i) / k:
                    i += 1
                if q > 1.0 / k * (1 + 1e-12):
                    raise HypergraphError("a clique pair carries more than 1/k of the energy")
            pc[(e, a, b)] = i
            best = max(best, i)
        arc_cat.append(best)
    grid = 1.0 / (k * n**3)
    rounded = {}
    for i in range(1, i_star + 1):
        vals = np.zeros(d.m)
        for (e, a, b), q in pair_val.items():
            if q > 2.0 ** (-i) / k:
                vals[e] = max(vals[e], round(q / grid) * grid)
        rounded[i] = vals
    return CategoryProbe(
        i_star=i_star,
        k=k,
        pair_category=pc,
        arc_category=arc_cat,
        rounded_arc=rounded,
        arc_energy=directed_arc_energies(d, x),
    )


def claim_d0_slack(probe: CategoryProbe, n: int) -> np.ndarray:
    """``1/(k n^3) - |Q^(i)(e) - Q(e)|`` for arcs in a scale set; ``inf`` for residual arcs."""
    out = np.full(len(probe.arc_category), np.inf)
    for e, i in enumerate(probe.arc_category):
        if i:
            out[e] = 1.0 / (probe.k * n**3) - abs(probe.rounded_arc[i][e] - probe.arc_energy[e])
    return out
