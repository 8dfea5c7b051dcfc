"""Exhaustive ground truth on small instances."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .hypercore import (
    DegenerateCutError,
    DirectedHypergraph,
    Hypergraph,
    HypergraphError,
    Sparsifier,
    directed_arc_energies,
    edge_energies,
    energy_witness,
)
from .rng import generator

BRUTE_CAP = 20
REL_TOL = 1e-9


class OracleCapacityError(HypergraphError):
    pass


def _guard(n: int, cap: int = BRUTE_CAP) -> None:
    if n > cap:
        raise OracleCapacityError(f"exhaustive enumeration supports n <= {cap}, got {n}")


def all_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def mask_to_set(mask: int) -> list[int]:
    out, v = [], 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def cut_table(g, masks: np.ndarray) -> np.ndarray:
    """Cut weight of every vertex set in ``masks`` (undirected or directed)."""
    out = np.zeros(masks.shape[0])
    if isinstance(g, DirectedHypergraph):
        tm, hm = g.masks
        full = (1 << g.n) - 1
        comp = full ^ masks
        for t, hd, w in zip(tm, hm, g.weights):
            out += w * (((masks & t) != 0) & ((comp & hd) != 0))
        return out
    for em, w in zip(g.edge_masks, g.weights):
        inter = masks & em
        out += w * ((inter != 0) & (inter != em))
    return out


def volume_table(h: Hypergraph, masks: np.ndarray) -> np.ndarray:
    vol = np.zeros(masks.shape[0])
    for v in range(h.n):
        if h.degrees[v]:
            vol += h.degrees[v] * ((masks >> v) & 1)
    return vol


def _brute(h: Hypergraph, product: bool):
    _guard(h.n)
    if h.n < 2:
        raise DegenerateCutError("need at least two vertices")
    masks = all_masks(h.n)[1:-1]
    cut = cut_table(h, masks)
    vs = volume_table(h, masks)
    vt = volume_table(h, ((1 << h.n) - 1) ^ masks)
    ok = (vs > 0) & (vt > 0)
    if not ok.any():
        raise DegenerateCutError("every cut has a zero-volume side")
    den = vs * vt if product else np.minimum(vs, vt)
    val = np.where(ok, cut / np.where(ok, den, 1.0), np.inf)
    k = int(np.argmin(val))
    return mask_to_set(int(masks[k])), float(val[k])


def brute_sparsest_cut(h: Hypergraph) -> tuple[list[int], float]:
    """Exact minimum expansion over nontrivial sets with both volumes positive."""
    return _brute(h, product=False)


def brute_phi(h: Hypergraph) -> float:
    """Exact minimum of ``cut / (vol S * vol V-S)``."""
    return _brute(h, product=True)[1]


def brute_phi_set(h: Hypergraph) -> tuple[list[int], float]:
    return _brute(h, product=True)


def brute_expansion_of_graph(h: Hypergraph) -> float:
    return brute_sparsest_cut(h)[1]


# -- sparsifier quality -----------------------------------------------------------


@dataclass
class QualityReport:
    epsilon: float
    size: int
    parent_size: int
    cut_queries: int
    cut_violations: int
    cut_min_ratio: float
    cut_max_ratio: float
    cut_mean_ratio: float
    zero_cuts: int
    zero_cut_mismatches: int
    vector_queries: int
    vector_violations: int
    vector_min_ratio: float
    vector_max_ratio: float

    @property
    def violations(self) -> int:
        return self.cut_violations + self.zero_cut_mismatches + self.vector_violations

    @property
    def worst_deviation(self) -> float:
        vals = [abs(v - 1.0) for v in (self.cut_min_ratio, self.cut_max_ratio,
                                        self.vector_min_ratio, self.vector_max_ratio) if np.isfinite(v)]
        return max(vals, default=0.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = self.violations
        d["worst_deviation"] = self.worst_deviation
        for k, v in d.items():
            if isinstance(v, float) and not np.isfinite(v):
                d[k] = None
        return d


def _ratios(q: np.ndarray, qt: np.ndarray, eps: float):
    pos = q > 0
    zero_mis = int(np.count_nonzero(~pos & (np.abs(qt) > 1e-12)))
    r = qt[pos] / q[pos]
    viol = int(np.count_nonzero(np.abs(qt[pos] - q[pos]) > eps * q[pos] * (1 + REL_TOL) + 1e-12))
    if r.size:
        return viol, float(r.min()), float(r.max()), float(r.mean()), int((~pos).sum()), zero_mis
    return viol, np.inf, -np.inf, np.nan, int((~pos).sum()), zero_mis


def _degrees(g) -> np.ndarray:
    if isinstance(g, Hypergraph):
        return g.degrees
    d = np.zeros(g.n)
    for t, hd, w in zip(g.tails, g.heads, g.weights):
        for v in (*t, *hd):
            d[v] += w
    return d


def random_test_vectors(g, k: int, seed: int) -> np.ndarray:
    """Standard normal rows, centered with respect to the degree measure."""
    x = generator(seed).standard_normal((k, g.n))
    d = _degrees(g)
    if d.sum() > 0:
        x -= (x @ d)[:, None] / d.sum()
    return x


def evaluate_sparsifier(
    g,
    sp: Sparsifier,
    epsilon: float,
    all_cuts: bool = True,
    samples: int = 0,
    seed: int = 0,
    vectors: np.ndarray | None = None,
) -> QualityReport:
    """Compare energies of ``g`` and ``sp`` on all cut indicators and on random vectors."""
    tilde = sp.as_graph()
    if tilde.n != g.n:
        raise HypergraphError("sparsifier lives on a different vertex set")
    directed = isinstance(g, DirectedHypergraph)
    if all_cuts:
        _guard(g.n)
        masks = all_masks(g.n)
        q = cut_table(g, masks)
        qt = cut_table(tilde, masks)
        cv, cmin, cmax, cmean, zc, zm = _ratios(q, qt, epsilon)
        nq = masks.size
    else:
        cv, cmin, cmax, cmean, zc, zm, nq = 0, np.inf, -np.inf, np.nan, 0, 0, 0
    if vectors is None and samples > 0:
        vectors = random_test_vectors(g, samples, seed)
    if vectors is not None and len(vectors):
        fn = directed_arc_energies if directed else edge_energies
        q = fn(g, vectors).sum(axis=-1)
        qt = fn(tilde, vectors).sum(axis=-1) if tilde.m else np.zeros(len(vectors))
        vv, vmin, vmax, _, vz, vzm = _ratios(q, qt, epsilon)
        vv += vzm
        nv = len(vectors)
    else:
        vv, vmin, vmax, nv = 0, np.inf, -np.inf, 0
    return QualityReport(
        epsilon=epsilon,
        size=sp.size,
        parent_size=g.m,
        cut_queries=nq,
        cut_violations=cv,
        cut_min_ratio=cmin,
        cut_max_ratio=cmax,
        cut_mean_ratio=cmean,
        zero_cuts=zc,
        zero_cut_mismatches=zm,
        vector_queries=nv,
        vector_violations=vv,
        vector_min_ratio=vmin,
        vector_max_ratio=vmax,
    )


# -- Cheeger ----------------------------------------------------------------------


@dataclass
class CheegerReport:
    passed: bool
    lhs: float
    rhs: float
    phi: float
    r: int

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def cheeger_check(h: Hypergraph, x, phi: float | None = None) -> CheegerReport:
    """Check ``Q(x) >= r Phi^2 / 32 * sum x_v^2 d(v)`` after degree-centering ``x``.

    ``Phi`` is the exact expansion capped at ``2/r``; a graph with no
    nondegenerate cut is treated as ``Phi = 0``.
    """
    x = np.asarray(x, dtype=float)
    d = h.degrees
    r = h.rank
    if phi is None:
        try:
            phi = brute_sparsest_cut(h)[1]
        except DegenerateCutError:
            phi = 0.0
    if r:
        phi = min(phi, 2.0 / r)
    vol = d.sum()
    y = x - (x @ d) / vol if vol > 0 else x.copy()
    lhs = float(edge_energies(h, y).sum()) if h.m else 0.0
    rhs = r * phi * phi / 32.0 * float((y * y) @ d)
    return CheegerReport(passed=lhs >= rhs - 1e-12 * max(1.0, rhs), lhs=lhs, rhs=rhs, phi=phi, r=r)


# -- argmax/argmin graph ------------------------------------------------------------


def sweep_graph(h: Hypergraph, x) -> Hypergraph:
    """Ordinary multigraph with one (argmax, argmin) pair per edge, ties to the lowest id.

    Constant edges become size-2 self-pairs ``[v, v]``.
    """
    x = np.asarray(x, dtype=float)
    pairs = [list(energy_witness(h, e, x)) for e in range(h.m)]
    return Hypergraph(h.n, pairs, h.weights, weighted=h.weighted)
