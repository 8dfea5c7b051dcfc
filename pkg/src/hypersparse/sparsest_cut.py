"""Sparsest cut via a metric LP, a Bourgain-style embedding and sweep rounding.

The LP works with the product-denominator sparsity ``cut / (vol S * vol V-S)``;
the reported cut is also scored by expansion ``cut / min(vol S, vol V-S)``.
Only vertices of positive degree take part; zero-degree vertices are put on
the complement side of the returned cut.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .hypercore import DegenerateCutError, Hypergraph, HypergraphError, connected_components
from .lp import DualSimplex, LPError
from .rng import child_seed, generator

log = logging.getLogger(__name__)

LP_CAP = 64
FEAS_TOL = 1e-7
TRIANGLE_TOL = 1e-9
PHI_TOL = 1e-9
HEURISTIC_ATTEMPTS = 5


class CapacityError(HypergraphError):
    pass


@dataclass
class MetricSolution:
    ell: np.ndarray
    z: np.ndarray
    objective: float
    pivots: int = 0
    rounds: int = 0
    triangles: int = 0
    shortcut: bool = False


@dataclass
class Embedding:
    coords: np.ndarray
    subsets: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.coords.shape[1]


@dataclass
class SweepResult:
    s: list[int]
    phi: float
    bound: float
    coordinate: int
    best_expansion_set: list[int]
    best_expansion: float


@dataclass
class SparseCutResult:
    s: list[int]
    expansion: float
    phi: float
    lp_objective: float | None
    mode: str  # "components", "lp" or "heuristic"
    certificate: float | None = None
    distortion: float | None = None

    @property
    def certified(self) -> bool:
        return self.mode != "heuristic"


# -- LP ---------------------------------------------------------------------


def _active(h: Hypergraph) -> list[int]:
    return [v for v in range(h.n) if h.degrees[v] > 0]


def _relabel(h: Hypergraph, verts: list[int]) -> Hypergraph:
    sub, _, kept = h.induced(verts)
    if len(kept) != h.m:
        raise HypergraphError("internal: positive-degree restriction dropped an edge")
    return sub


def _lift_metric(h: Hypergraph, act: list[int], ell_act: np.ndarray) -> np.ndarray:
    """Extend a metric on the active vertices; zero-degree vertices copy the first active vertex."""
    src = np.full(h.n, 0, dtype=np.int64)
    pos = {v: i for i, v in enumerate(act)}
    for v in range(h.n):
        src[v] = pos.get(v, 0)
    ell = ell_act[np.ix_(src, src)].copy()
    np.fill_diagonal(ell, 0.0)
    return ell


def _edge_z(h: Hypergraph, ell: np.ndarray) -> np.ndarray:
    z = np.zeros(h.m)
    for i, e in enumerate(h.edges):
        vs = sorted(set(e))
        if len(vs) > 1:
            z[i] = ell[np.ix_(vs, vs)].max()
    return z


def normalization(h: Hypergraph, ell: np.ndarray) -> float:
    """``sum over ordered pairs d(u) d(v) ell(u, v)``."""
    d = h.degrees
    return float(d @ ell @ d)


def solve_metric_lp(h: Hypergraph, cap: int = LP_CAP, max_rounds: int = 500) -> MetricSolution:
    act = _active(h)
    if len(act) < 2:
        raise DegenerateCutError("fewer than two vertices of positive degree")
    if len(act) > cap:
        raise CapacityError(f"metric LP supports at most {cap} vertices of positive degree, got {len(act)}")
    g = _relabel(h, act)
    comps = connected_components(g)
    if len(comps) > 1:
        side = np.zeros(g.n, dtype=bool)
        side[comps[0]] = True
        d = g.degrees
        val = 1.0 / (2.0 * d[side].sum() * d[~side].sum())
        ell_act = val * (side[:, None] != side[None, :])
        ell = _lift_metric(h, act, ell_act)
        return MetricSolution(ell=ell, z=_edge_z(h, ell), objective=0.0, shortcut=True)
    return _solve_connected(h, g, act, max_rounds)


def _solve_connected(h, g, act, max_rounds) -> MetricSolution:
    n = g.n
    iu, ju = np.triu_indices(n, 1)
    npair = iu.size
    pid = -np.ones((n, n), dtype=np.int64)
    pid[iu, ju] = np.arange(npair)
    pid[ju, iu] = np.arange(npair)
    live = [i for i, e in enumerate(g.edges) if len(set(e)) > 1]
    nz = len(live)
    nvar = npair + nz
    c = np.concatenate([np.zeros(npair), g.weights[live]])
    rows = []
    for k, ei in enumerate(live):
        vs = sorted(set(g.edges[ei]))
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                row = np.zeros(nvar)
                row[pid[vs[a], vs[b]]] = 1.0
                row[npair + k] = -1.0
                rows.append(row)
    d = g.degrees
    norm = np.zeros(nvar)
    norm[:npair] = -2.0 * d[iu] * d[ju]
    scale = -norm.min()
    rows.append(norm / scale)
    b = np.zeros(len(rows))
    b[-1] = -1.0 / scale
    lp = DualSimplex(c, np.array(rows), b)
    added: set[tuple[int, int, int]] = set()
    rounds = 0
    while True:
        try:
            lp.solve()
        except LPError as exc:
            raise LPError("metric LP failed", exc.iterations, rounds=rounds, triangles=len(added)) from None
        x = lp.primal()
        ell = np.zeros((n, n))
        ell[iu, ju] = x[:npair]
        ell[ju, iu] = x[:npair]
        new = _violated_triangles(ell, added, limit=max(4 * n, 32))
        if not new:
            break
        rounds += 1
        if rounds > max_rounds:
            raise LPError("row generation did not converge", lp.iterations, rounds=rounds)
        A = np.zeros((len(new), nvar))
        for r, (u, v, w) in enumerate(new):
            A[r, pid[u, w]] += 1.0
            A[r, pid[u, v]] -= 1.0
            A[r, pid[v, w]] -= 1.0
            added.add((u, v, w))
        lp.add_rows(A, np.zeros(len(new)))
    tot = float(d @ ell @ d)
    if tot < 1.0 - FEAS_TOL:
        raise LPError("normalization violated beyond tolerance", lp.iterations, value=tot)
    ell /= tot
    full = _lift_metric(h, act, ell)
    z = _edge_z(h, full)
    return MetricSolution(
        ell=full,
        z=z,
        objective=float(h.weights @ z),
        pivots=lp.iterations,
        rounds=rounds,
        triangles=len(added),
    )


def _violated_triangles(ell, added, limit):
    """Triples (u, v, w) with ell[u,w] > ell[u,v] + ell[v,w] + tol, most violated first."""
    viol = ell[:, None, :] - ell[:, :, None] - ell[None, :, :]
    # viol[u, v, w] = ell[u, w] - ell[u, v] - ell[v, w]
    u, v, w = np.nonzero(viol > TRIANGLE_TOL)
    keep = (u < w) & (v != u) & (v != w)
    u, v, w = u[keep], v[keep], w[keep]
    if u.size == 0:
        return []
    order = np.lexsort((w, v, u, -viol[u, v, w]))
    out = []
    for idx in order:
        t = (int(u[idx]), int(v[idx]), int(w[idx]))
        if t in added:
            continue
        out.append(t)
        if len(out) >= limit:
            break
    return out


def metric_violation(sol: MetricSolution, h: Hypergraph) -> dict[str, float]:
    """Largest violation of each LP constraint family."""
    ell = sol.ell
    tri = float(np.max(ell[:, None, :] - ell[:, :, None] - ell[None, :, :], initial=0.0))
    zv = 0.0
    for i, e in enumerate(h.edges):
        vs = sorted(set(e))
        if len(vs) > 1:
            zv = max(zv, float(ell[np.ix_(vs, vs)].max() - sol.z[i]))
    return {
        "triangle": tri,
        "z": zv,
        "normalization": abs(normalization(h, ell) - 1.0),
        "symmetry": float(np.abs(ell - ell.T).max(initial=0.0)),
        "negativity": float(max(0.0, -ell.min(initial=0.0))),
    }


# -- embedding ----------------------------------------------------------------


def bourgain_embed(ell, seed: int = 0, trials: int | None = None) -> Embedding:
    """Distances to random subsets: scale j keeps each vertex with probability 2^-j."""
    ell = np.asarray(ell, dtype=float)
    n = ell.shape[0]
    if n <= 1:
        return Embedding(np.zeros((n, 0)))
    scales = math.ceil(math.log2(n))
    reps = trials if trials is not None else scales
    rng = generator(seed)
    cols, subsets = [], []
    for j in range(1, scales + 1):
        p = 2.0 ** (-j)
        for _ in range(reps):
            mask = rng.random(n) < p
            while not mask.any():
                mask = rng.random(n) < p
            idx = np.flatnonzero(mask)
            cols.append(ell[:, idx].min(axis=1))
            subsets.append(tuple(idx.tolist()))
    return Embedding(np.column_stack(cols), subsets)


def distortion(ell, emb: Embedding) -> tuple[float, float]:
    """Measured ``(D, upper_violation)``.

    ``D`` is the smallest value with mean coordinate gap >= ell/D on every
    pair; ``upper_violation`` is the largest excess of a coordinate gap over ell.
    """
    ell = np.asarray(ell, dtype=float)
    n = ell.shape[0]
    if n <= 1 or emb.k == 0:
        return (1.0 if n <= 1 else math.inf), 0.0
    f = emb.coords
    iu, ju = np.triu_indices(n, 1)
    gaps = np.abs(f[iu] - f[ju])
    avg = gaps.mean(axis=1)
    up = float(np.max(gaps.max(axis=1) - ell[iu, ju], initial=0.0))
    pos = ell[iu, ju] > 0
    if not pos.any():
        return 1.0, up
    with np.errstate(divide="ignore"):
        ratios = np.where(avg[pos] > 0, ell[iu, ju][pos] / np.where(avg[pos] > 0, avg[pos], 1.0), math.inf)
    return float(ratios.max()), up


# -- sweep rounding ------------------------------------------------------------


def _sweep_profile(h: Hypergraph, f: np.ndarray):
    """Cut weight and prefix volume of every prefix of the (f, id) order."""
    order = np.lexsort((np.arange(h.n), f))
    pos = np.empty(h.n, dtype=np.int64)
    pos[order] = np.arange(h.n)
    diff = np.zeros(h.n + 1)
    if h.m:
        p = pos[h.padded]
        lo, hi = p.min(axis=1), p.max(axis=1)
        np.add.at(diff, lo + 1, h.weights)
        np.add.at(diff, hi + 1, -h.weights)
    cut = np.cumsum(diff)[1:h.n]  # prefix sizes 1..n-1
    d = h.degrees[order]
    vol = np.cumsum(d)[: h.n - 1]
    rest = np.cumsum(d[::-1])[::-1][1:]
    return order, cut, vol, rest


def _pair_moment(d: np.ndarray, f: np.ndarray) -> float:
    """``sum over unordered pairs d_u d_v |f_u - f_v|``."""
    return float(0.5 * (d[:, None] * d[None, :] * np.abs(f[:, None] - f[None, :])).sum())


def coordinate_bound(h: Hypergraph, f: np.ndarray) -> float:
    den = _pair_moment(h.degrees, f)
    if den <= 0:
        return math.inf
    if h.m:
        vals = f[h.padded]
        num = float(h.weights @ (vals.max(axis=1) - vals.min(axis=1)))
    else:
        num = 0.0
    return num / den


def sweep_round(h: Hypergraph, emb: Embedding) -> SweepResult:
    """Best prefix cut over all coordinates; asserts the per-coordinate ratio bound."""
    if h.n < 2:
        raise HypergraphError("sweep needs at least two vertices")
    best_phi = (math.inf, None, -1)
    best_exp = (math.inf, None)
    bound = math.inf
    coords = emb.coords if emb.k else np.zeros((h.n, 1))
    for i in range(coords.shape[1]):
        f = coords[:, i]
        bound = min(bound, coordinate_bound(h, f))
        order, cut, vol, other = _sweep_profile(h, f)
        ok = (vol > 0) & (other > 0)
        if not ok.any():
            continue
        prod = np.where(ok, vol * other, 1.0)
        phis = np.where(ok, cut / prod, math.inf)
        mins = np.where(ok, np.minimum(vol, other), 1.0)
        exps = np.where(ok, cut / mins, math.inf)
        k = int(np.argmin(phis))
        if phis[k] < best_phi[0]:
            best_phi = (float(phis[k]), order[: k + 1], i)
        k2 = int(np.argmin(exps))
        if exps[k2] < best_exp[0]:
            best_exp = (float(exps[k2]), order[: k2 + 1])
    if best_phi[1] is None:
        raise DegenerateCutError("no sweep prefix has positive volume on both sides")
    if best_phi[0] > bound + PHI_TOL * max(1.0, bound):
        raise AssertionError(f"sweep sparsity {best_phi[0]} exceeds coordinate bound {bound}")
    return SweepResult(
        s=sorted(best_phi[1].tolist()),
        phi=best_phi[0],
        bound=bound,
        coordinate=best_phi[2],
        best_expansion_set=sorted(best_exp[1].tolist()),
        best_expansion=best_exp[0],
    )


# -- composition --------------------------------------------------------------


def _scores(h: Hypergraph, s) -> tuple[float, float]:
    from .hypercore import cut_value, volume

    vs = volume(h, s)
    vt = volume(h, set(range(h.n)) - set(s))
    c = cut_value(h, s)
    return c / min(vs, vt), c / (vs * vt)


def sparse_cut(h: Hypergraph, seed: int = 0, cap: int = LP_CAP, trials: int | None = None) -> SparseCutResult:
    act = _active(h)
    if len(act) < 2:
        raise DegenerateCutError("fewer than two vertices of positive degree")
    g = _relabel(h, act)
    comps = connected_components(g)
    if len(comps) > 1:
        s = [act[v] for v in comps[0]]
        return SparseCutResult(s=s, expansion=0.0, phi=0.0, lp_objective=0.0, mode="components", certificate=0.0)
    if len(act) > cap:
        res = heuristic_cut(g, seed)
        res.s = [act[v] for v in res.s]
        return res
    sol = solve_metric_lp(g, cap=cap)
    emb = bourgain_embed(sol.ell, seed=seed, trials=trials)
    if emb.k == 0 or np.all(np.ptp(emb.coords, axis=0) == 0):
        emb = Embedding(sol.ell.copy(), [(v,) for v in range(g.n)])
    sw = sweep_round(g, emb)
    D, _ = distortion(sol.ell, emb)
    cand = sw.best_expansion_set
    exp_val, phi_val = _scores(g, cand)
    return SparseCutResult(
        s=[act[v] for v in cand],
        expansion=exp_val,
        phi=phi_val,
        lp_objective=sol.objective,
        mode="lp",
        certificate=sw.bound,
        distortion=D,
    )


def clique_matrix(h: Hypergraph) -> np.ndarray:
    """Adjacency of the clique expansion, each edge spread evenly over its distinct pairs."""
    a = np.zeros((h.n, h.n))
    for e, w in zip(h.edges, h.weights):
        vs = sorted(set(e))
        k = len(vs)
        if k < 2:
            continue
        ix = np.ix_(vs, vs)
        a[ix] += w / (k - 1)
    np.fill_diagonal(a, 0.0)
    return a


def fiedler_vector(h: Hypergraph, seed: int = 0, iters: int = 2000, tol: float = 1e-10) -> np.ndarray:
    """Second eigenvector of the normalized clique-graph Laplacian by power iteration."""
    a = clique_matrix(h)
    deg = a.sum(axis=1)
    inv = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    m = inv[:, None] * a * inv[None, :]
    m = 0.5 * (np.eye(h.n) + m)  # eigenvalues in [0, 1], same eigenvectors
    top = np.sqrt(deg)
    top /= np.linalg.norm(top) or 1.0
    rng = generator(seed)
    y = rng.standard_normal(h.n)
    for _ in range(iters):
        y -= (y @ top) * top
        nxt = m @ y
        nxt -= (nxt @ top) * top
        nrm = np.linalg.norm(nxt)
        if nrm == 0:
            break
        nxt /= nrm
        if np.linalg.norm(nxt - y) < tol:
            y = nxt
            break
        y = nxt
    return inv * y


def heuristic_cut(h: Hypergraph, seed: int = 0, attempts: int = HEURISTIC_ATTEMPTS) -> SparseCutResult:
    """Spectral sweep; carries no approximation certificate."""
    best = None
    for t in range(attempts):
        f = fiedler_vector(h, seed=child_seed(seed, t))
        sw = sweep_round(h, Embedding(f[:, None]))
        if best is None or sw.best_expansion < best.best_expansion:
            best = sw
    exp_val, phi_val = _scores(h, best.best_expansion_set)
    log.debug("heuristic cut on n=%d: expansion %.4g", h.n, exp_val)
    return SparseCutResult(
        s=best.best_expansion_set,
        expansion=exp_val,
        phi=phi_val,
        lp_objective=None,
        mode="heuristic",
    )
