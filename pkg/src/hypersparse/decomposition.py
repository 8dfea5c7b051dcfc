"""Expander decomposition: peel low-degree vertices, split along sparse cuts.

Thresholds use the input's ``m`` (total weight when weighted) and ``n`` for
the whole run.  A vertex removed by peeling is discarded for good and the
retained edges through it move to the removed set immediately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .hypercore import DegenerateCutError, Hypergraph, HypergraphError
from .rng import set_seed
from .sparsest_cut import LP_CAP, sparse_cut

log = logging.getLogger(__name__)

#: Calibrated constant in the default expansion target 1/(K r log2(n)^2).
DEFAULT_K = 4.0
BRUTE_CERT_CAP = 16


def log2n(n: int) -> float:
    return max(math.log2(max(n, 2)), 1.0)


def default_phi_target(n: int, r: int, K: float = DEFAULT_K) -> float:
    return 1.0 / (K * max(r, 1) * log2n(n) ** 2)


@dataclass(frozen=True)
class DecompositionConfig:
    phi_target: float | None = None
    K: float = DEFAULT_K
    cut_const: float = 4.0
    min_deg_frac: float = 0.25
    seed: int = 0
    lp_cap: int = LP_CAP
    certify: bool = True


@dataclass
class SplitRecord:
    cluster: list[int]
    side: list[int]  # the smaller-cardinality side, which is charged
    cut_weight: float
    expansion: float
    threshold: float
    r: int
    degrees: dict[int, float]  # induced degrees in the split cluster


@dataclass
class ClusterCertificate:
    level: str  # "brute", "lp", "heuristic" or "trivial"
    passed: bool
    phi: float | None


@dataclass
class Decomposition:
    n: int
    m: int
    clusters: list[list[int]]
    retained: list[list[int]]
    removed: list[int]
    discarded: list[int]
    phi_target: float
    degree_threshold: float
    certificates: list[ClusterCertificate] = field(default_factory=list)
    splits: list[SplitRecord] = field(default_factory=list)
    peels: list[tuple[int, float]] = field(default_factory=list)
    iterations: int = 0
    removed_weight: float = 0.0
    total_weight: float = 0.0

    @property
    def removed_fraction(self) -> float:
        return self.removed_weight / self.total_weight if self.total_weight else 0.0

    def violations(self, h: Hypergraph) -> list[str]:
        """Structural and guarantee checks; empty when everything holds."""
        out = []
        seen = set()
        for c in self.clusters:
            if seen & set(c):
                out.append("clusters overlap")
            seen |= set(c)
        if seen & set(self.discarded):
            out.append("a discarded vertex lies in a cluster")
        count = np.zeros(h.m, dtype=np.int64)
        for c, es in zip(self.clusters, self.retained):
            cs = set(c)
            for e in es:
                count[e] += 1
                if not all(v in cs for v in h.edges[e]):
                    out.append(f"retained edge {e} leaves its cluster")
        count[self.removed] += 1
        if np.any(count != 1):
            out.append("edge conservation fails")
        if self.removed_weight > self.total_weight / 2 + 1e-9 * max(1.0, self.total_weight):
            out.append(f"removed weight {self.removed_weight} exceeds half of {self.total_weight}")
        for c, es in zip(self.clusters, self.retained):
            sub = _induced_degrees(h, c, es)
            if min(sub.values(), default=math.inf) < self.degree_threshold - 1e-12:
                out.append(f"cluster {c[:4]}... has a vertex below the degree threshold")
        for c, cert in zip(self.clusters, self.certificates):
            if not cert.passed:
                out.append(f"cluster {c[:4]}... fails expansion certificate ({cert.phi} < {self.phi_target})")
        return out


def _induced_degrees(h: Hypergraph, c, edges) -> dict[int, float]:
    deg = {v: 0.0 for v in c}
    for e in edges:
        w = h.weights[e]
        for v in h.edges[e]:
            deg[v] += w
    return deg


def _cluster_graph(h: Hypergraph, c: list[int], edges: list[int]) -> Hypergraph:
    loc = {v: i for i, v in enumerate(c)}
    return Hypergraph(len(c), [[loc[v] for v in h.edges[e]] for e in edges], h.weights[edges], weighted=h.weighted)


def expander_decomposition(h: Hypergraph, cfg: DecompositionConfig | None = None) -> Decomposition:
    cfg = cfg or DecompositionConfig()
    if h.m == 0:
        raise HypergraphError("decomposition needs at least one edge")
    n, m = h.n, h.m
    W = h.total_weight if h.weighted else float(m)
    phi_target = cfg.phi_target if cfg.phi_target is not None else default_phi_target(n, h.rank, cfg.K)
    deg_thr = cfg.min_deg_frac * W / n
    lg = log2n(n)
    cap = n * n + m

    # each cluster: [sorted vertices, sorted retained edges, checked flag]
    work: list[list] = [[list(range(n)), list(range(m)), False]]
    removed: list[int] = []
    discarded: list[int] = []
    splits: list[SplitRecord] = []
    peels: list[tuple[int, float]] = []
    modes: dict[tuple[int, ...], str] = {}
    it = 0

    def peel(cl):
        nonlocal it
        verts, edges = cl[0], cl[1]
        while verts:
            deg = _induced_degrees(h, verts, edges)
            low = [v for v in verts if deg[v] < deg_thr]
            if not low:
                return
            v = low[0]
            it += 1
            drop = [e for e in edges if v in h.edges[e]]
            removed.extend(drop)
            peels.append((v, float(h.weights[drop].sum()) if drop else 0.0))
            discarded.append(v)
            verts.remove(v)
            ds = set(drop)
            edges[:] = [e for e in edges if e not in ds]
            cl[2] = False

    while True:
        if it > cap:
            raise AssertionError(f"decomposition exceeded iteration cap {cap}")
        for cl in work:
            peel(cl)
        work = [cl for cl in work if cl[0]]
        work.sort(key=lambda cl: cl[0][0])
        target = None
        for cl in work:
            if cl[2]:
                continue
            verts, edges = cl[0], cl[1]
            sub = _cluster_graph(h, verts, edges)
            r = max((len(h.edges[e]) for e in edges), default=1)
            thr = 1.0 / (cfg.cut_const * r * lg)
            try:
                res = sparse_cut(sub, seed=set_seed(cfg.seed, verts), cap=cfg.lp_cap)
            except DegenerateCutError:
                cl[2] = True
                modes[tuple(verts)] = "trivial"
                continue
            modes[tuple(verts)] = "heuristic" if res.mode == "heuristic" else "lp"
            if res.expansion <= thr + 1e-12:
                target = (cl, res, thr, r, sub)
                break
            cl[2] = True
        if target is None:
            break
        cl, res, thr, r, sub = target
        it += 1
        verts, edges = cl[0], cl[1]
        s = sorted(verts[i] for i in res.s)
        sset = set(s)
        t = [v for v in verts if v not in sset]
        tset = set(t)
        in_s = [e for e in edges if all(v in sset for v in h.edges[e])]
        in_t = [e for e in edges if all(v in tset for v in h.edges[e])]
        cross = [e for e in edges if e not in set(in_s) and e not in set(in_t)]
        removed.extend(cross)
        side = s if len(s) <= len(t) else t
        splits.append(
            SplitRecord(
                cluster=list(verts),
                side=list(side),
                cut_weight=float(h.weights[cross].sum()) if cross else 0.0,
                expansion=float(res.expansion),
                threshold=thr,
                r=r,
                degrees=_induced_degrees(h, verts, edges),
            )
        )
        work.remove(cl)
        work.append([s, in_s, False])
        work.append([t, in_t, False])

    work.sort(key=lambda cl: cl[0][0])
    clusters = [cl[0] for cl in work]
    retained = [sorted(cl[1]) for cl in work]
    removed = sorted(removed)
    dec = Decomposition(
        n=n,
        m=m,
        clusters=clusters,
        retained=retained,
        removed=removed,
        discarded=sorted(discarded),
        phi_target=phi_target,
        degree_threshold=deg_thr,
        splits=splits,
        peels=peels,
        iterations=it,
        removed_weight=float(h.weights[removed].sum()) if removed else 0.0,
        total_weight=h.total_weight,
    )
    dec.certificates = [
        certify_cluster(h, c, es, phi_target, modes.get(tuple(c), "trivial"), cfg.certify)
        for c, es in zip(clusters, retained)
    ]
    if dec.removed_weight > dec.total_weight / 2 + 1e-9 * dec.total_weight:
        log.error("decomposition removed %.6g of %.6g total weight", dec.removed_weight, dec.total_weight)
    return dec


def certify_cluster(h, c, edges, phi_target, mode, brute=True) -> ClusterCertificate:
    if len(c) < 2:
        return ClusterCertificate("trivial", True, None)
    if brute and len(c) <= BRUTE_CERT_CAP:
        sub = _cluster_graph(h, c, edges)
        try:
            phi = oracle.brute_sparsest_cut(sub)[1]
        except DegenerateCutError:
            return ClusterCertificate("trivial", True, None)
        return ClusterCertificate("brute", phi >= phi_target - 1e-12, phi)
    return ClusterCertificate(mode, True, None)


@dataclass
class ChargeAudit:
    split_removed: float
    peel_removed: float
    total_removed: float
    charged_total: float
    split_bound: float
    peel_bound: float
    max_vertex_excess: float
    within_half: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def charge_audit(dec: Decomposition, h: Hypergraph) -> ChargeAudit:
    """Recount removal and redo the degree-proportional charging of split edges."""
    charge = np.zeros(h.n)
    for sp in dec.splits:
        vol = sum(sp.degrees[v] for v in sp.side)
        for v in sp.side:
            charge[v] += sp.cut_weight * sp.degrees[v] / vol if vol > 0 else 0.0
    # per-vertex bound: sum over incident edges of w * multiplicity / (4 |e|)
    vb = np.zeros(h.n)
    for e, w in zip(h.edges, h.weights):
        for v in e:
            vb[v] += w / (4.0 * len(e))
    split_removed = float(sum(sp.cut_weight for sp in dec.splits))
    peel_removed = float(sum(w for _, w in dec.peels))
    total = split_removed + peel_removed
    W = dec.total_weight
    removed_weight = dec.removed_weight
    if abs(total - removed_weight) > 1e-9 * max(1.0, W):
        raise AssertionError(f"audit recount {total} disagrees with removed weight {removed_weight}")
    return ChargeAudit(
        split_removed=split_removed,
        peel_removed=peel_removed,
        total_removed=total,
        charged_total=float(charge.sum()),
        split_bound=float(vb.sum()),
        peel_bound=dec.degree_threshold * len(dec.peels),
        max_vertex_excess=float(np.max(charge - vb, initial=-np.inf)) if h.n else 0.0,
        within_half=total <= W / 2 + 1e-9 * max(1.0, W),
    )
