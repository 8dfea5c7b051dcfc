"""General sparsification: decompose, sparsify each cluster, contract old clusters.

Level ``i`` works on the live edges contracted by the current partition.  At
level ``i >= delay`` the vertex sets of the clusters found at level
``i - delay`` are merged into the partition, so a cluster is contracted to a
supernode ``delay`` levels after it was sparsified.  Logs are base 2.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .decomposition import DEFAULT_K, Decomposition, DecompositionConfig, expander_decomposition
from .expander_sparsify import DEFAULT_LAMBDA_C, ExpanderSparsifyConfig, expander_sparsify
from .hypercore import (
    Hypergraph,
    HypergraphError,
    Sparsifier,
    VertexPartition,
    contract,
    edge_energies,
    energy,
)
from .expander_sparsify import additive_error_bound
from .rng import child_seed

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    pass


def default_delay(n: int) -> int:
    return math.ceil(10 * math.log2(max(n, 2)))


def default_level_cap(h: Hypergraph) -> int:
    if h.m == 0:
        return 1
    ratio = h.total_weight / float(h.weights.min())
    return int(math.floor(math.log2(max(ratio, 1.0)))) + 1


@dataclass(frozen=True)
class PipelineConfig:
    epsilon: float = 0.5
    seed: int = 0
    delay: int | None = None
    level_cap: int | None = None
    lambda_c: float = DEFAULT_LAMBDA_C
    K: float = DEFAULT_K
    min_deg_frac: float = 0.25
    jobs: int = 1
    certify: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.5:
            raise HypergraphError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if self.delay is not None and self.delay < 1:
            raise HypergraphError("delay must be at least 1")
        if self.jobs < 1:
            raise HypergraphError("jobs must be at least 1")


@dataclass
class ClusterRecord:
    level: int
    index: int
    classes: list[int]  # supernode ids at this level
    vertices: list[int]  # original vertices making up the cluster
    edges: list[int]  # original edge indices retained in the cluster
    entries: list[tuple[int, float]]  # sparsifier entries, original edge indices
    seed: int
    phi: float
    weight_total: float
    unit_energy_total: float
    weight_bound: float


@dataclass
class LevelRecord:
    level: int
    m: int
    n: int
    live_weight: float
    partition: list[list[int]]  # classes of the partition used at this level
    clusters: list[ClusterRecord]
    removed: list[int]
    decomposition: Decomposition


@dataclass
class PipelineRun:
    graph: Hypergraph
    config: PipelineConfig
    delay: int
    level_cap: int
    levels: list[LevelRecord] = field(default_factory=list)
    sparsifier: Sparsifier | None = None
    complete: bool = False

    def census(self) -> dict:
        return cluster_census(self)

    def checks(self) -> dict[str, bool]:
        return structure_checks(self)


def _level_partition(h: Hypergraph, levels: list[LevelRecord], i: int, delay: int) -> VertexPartition:
    p = VertexPartition(h.n)
    for lev in levels[: max(0, i - delay + 1)]:
        for cl in lev.clusters:
            p.merge_all(cl.vertices)
    return p


def _sparsify_cluster(gi: Hypergraph, dec: Decomposition, j: int, cfg: PipelineConfig, n_ref: int, level: int):
    cl = dec.clusters[j]
    sub, verts, kept = gi.induced(cl)
    retained = dec.retained[j]
    # the induced subgraph can only contain retained edges of this cluster
    if sorted(kept) != retained:
        raise PipelineError("cluster edges disagree with the decomposition")
    seed = child_seed(cfg.seed, level, j)
    scfg = ExpanderSparsifyConfig(
        epsilon=cfg.epsilon / 10,
        phi=dec.phi_target,
        n_ref=n_ref,
        lambda_c=cfg.lambda_c,
        seed=seed,
        strip_self_loops=True,
    )
    sp = expander_sparsify(sub, scfg) if sub.m else Sparsifier(sub, [])
    return verts, kept, sp, seed, scfg.phi


def sparsify(h: Hypergraph, cfg: PipelineConfig | None = None) -> PipelineRun:
    cfg = cfg or PipelineConfig()
    if h.m == 0:
        raise HypergraphError("cannot sparsify an edgeless hypergraph")
    delay = cfg.delay if cfg.delay is not None else default_delay(h.n)
    cap = cfg.level_cap if cfg.level_cap is not None else default_level_cap(h)
    run = PipelineRun(graph=h, config=cfg, delay=delay, level_cap=cap)
    live = list(range(h.m))
    entries: list[tuple[int, float]] = []
    pool = ThreadPoolExecutor(max_workers=cfg.jobs) if cfg.jobs > 1 else None
    try:
        for i in range(cap):
            if not live:
                break
            part = _level_partition(h, run.levels, i, delay)
            gi, _ = contract(h.subgraph(live), part)
            dcfg = DecompositionConfig(
                K=cfg.K, min_deg_frac=cfg.min_deg_frac, seed=child_seed(cfg.seed, i), certify=cfg.certify
            )
            dec = expander_decomposition(gi, dcfg)
            classes = part.classes()
            jobs = range(len(dec.clusters))
            if pool is not None:
                results = list(pool.map(lambda j: _sparsify_cluster(gi, dec, j, cfg, h.n, i), jobs))
            else:
                results = [_sparsify_cluster(gi, dec, j, cfg, h.n, i) for j in jobs]
            records = []
            for j, (verts, kept, sp, seed, phi) in enumerate(results):
                orig_edges = [live[k] for k in kept]
                ent = [(live[kept[k]], w) for k, w in sp.entries]
                entries.extend(ent)
                weight_total = float(sum(w for _, w in sp.entries))
                tg = sp.as_graph()
                unit = float(edge_energies(tg, np.eye(tg.n)).sum()) if tg.m else 0.0
                records.append(
                    ClusterRecord(
                        level=i,
                        index=j,
                        classes=list(verts),
                        vertices=sorted(v for c in verts for v in classes[c]),
                        edges=sorted(orig_edges),
                        entries=sorted(ent),
                        seed=seed,
                        phi=phi,
                        weight_total=weight_total,
                        unit_energy_total=unit,
                        weight_bound=2.0 * gi.n * gi.m,
                    )
                )
            removed = [live[k] for k in dec.removed]
            run.levels.append(
                LevelRecord(
                    level=i,
                    m=gi.m,
                    n=gi.n,
                    live_weight=gi.total_weight,
                    partition=classes,
                    clusters=records,
                    removed=sorted(removed),
                    decomposition=dec,
                )
            )
            live = sorted(removed)
    finally:
        if pool is not None:
            pool.shutdown()
    run.complete = not live
    run.sparsifier = Sparsifier(h, entries)
    if not run.complete:
        log.error("level cap %d reached with %d live edges", cap, len(live))
    return run


# -- audits ----------------------------------------------------------------------


def cluster_census(run: PipelineRun) -> dict:
    total = sum(len(cl.classes) for lev in run.levels for cl in lev.clusters)
    count = sum(len(lev.clusters) for lev in run.levels)
    n = run.graph.n
    bound = 21 * n * math.log2(max(n, 2))
    return {"total_size": total, "clusters": count, "bound": bound, "within_bound": total <= bound}


def _laminar(sets: list[frozenset]) -> bool:
    uniq = sorted(set(sets), key=len)
    for a_i, a in enumerate(uniq):
        for b in uniq[a_i + 1:]:
            if a & b and not a <= b:
                return False
    return True


def structure_checks(run: PipelineRun) -> dict[str, bool]:
    h = run.graph
    count = np.zeros(h.m, dtype=np.int64)
    for lev in run.levels:
        for cl in lev.clusters:
            count[cl.edges] += 1
    conservation = bool(np.all(count == 1)) and run.complete
    halving = True
    for a, b in zip(run.levels, run.levels[1:]):
        if b.live_weight > a.live_weight / 2 + 1e-9 * max(1.0, a.live_weight):
            halving = False
    coarsening = True
    for a, b in zip(run.levels, run.levels[1:]):
        pa = VertexPartition.from_classes(h.n, a.partition)
        pb = VertexPartition.from_classes(h.n, b.partition)
        if not pa.refines(pb):
            coarsening = False
    fam = [frozenset(c) for lev in run.levels for c in lev.partition]
    weight_ok = all(
        cl.weight_total <= cl.unit_energy_total * (1 + 1e-9) + 1e-12 for lev in run.levels for cl in lev.clusters
    )
    weight_bound = all(cl.weight_total <= cl.weight_bound for lev in run.levels for cl in lev.clusters)
    entries = run.sparsifier.entries if run.sparsifier else []
    no_loops = not any(_contracted_loop(run, e) for e, _ in entries)
    return {
        "complete": run.complete,
        "edge_conservation": conservation,
        "halving": halving,
        "coarsening": coarsening,
        "laminar": _laminar(fam),
        "census": cluster_census(run)["within_bound"],
        "weight_vs_unit_energy": weight_ok,
        "weight_bound": weight_bound,
        "no_contracted_self_loops": no_loops,
    }


def _contracted_loop(run: PipelineRun, e: int) -> bool:
    for lev in run.levels:
        for cl in lev.clusters:
            if e in cl.edges:
                p = VertexPartition.from_classes(run.graph.n, lev.partition)
                lab = p.labels()
                return len({int(lab[v]) for v in run.graph.edges[e]}) == 1
    return False


@dataclass
class ProbeRecord:
    level: int
    cluster: int
    delta: float
    contract_compare_ok: bool
    observation_gap: float
    additive_ok: bool
    case_bound_ok: bool
    max_gap: float
    g0_asymptotic_bound: float
    g0_asymptotic_ok: bool


def contraction_error_probe(run: PipelineRun, x) -> list[ProbeRecord]:
    """Per contracted cluster: discrepancy within supernodes and the per-edge error bounds.

    The lifted vector takes, on every vertex, the value of the smallest member
    of its supernode.
    """
    h = run.graph
    x = np.asarray(x, dtype=float)
    eps = run.config.epsilon
    q_total = energy(h, x)
    out = []
    for lev in run.levels:
        if all(len(c) == 1 for c in lev.partition):
            continue
        part = VertexPartition.from_classes(h.n, lev.partition)
        rep = part.representatives()
        lab = part.labels()
        xt = x[rep]
        for cl in lev.clusters:
            cls = [lev.partition[c] for c in cl.classes]
            delta = max((float(np.ptp(x[c])) for c in cls), default=0.0)
            hat = h.subgraph(cl.edges)
            qx = edge_energies(hat, x)
            qxt = edge_energies(hat, xt)
            gap = np.abs(qx - qxt)
            add_ok = bool(np.all(gap <= additive_error_bound(qx, delta) * (1 + 1e-9) + 1e-12))
            case = np.maximum(eps / 10 * qx, 204 * delta * delta / eps)
            case_ok = bool(np.all(gap <= case * (1 + 1e-9) + 1e-12))
            # contracted cluster graph at the class-value vector
            cg, _ = contract(hat, part)
            xc = np.zeros(part.num_classes)
            for c, members in enumerate(part.classes()):
                xc[c] = x[members[0]]
            cc_ok = energy(cg, xc) <= energy(hat, x) + 1e-12 * max(1.0, energy(hat, x))
            # sparsifier on original vertices at the lifted vector vs on supernodes
            if cl.entries:
                idx = [e for e, _ in cl.entries]
                w = [wt for _, wt in cl.entries]
                breve = Hypergraph(h.n, [h.edges[e] for e in idx], w)
                tilde = Hypergraph(part.num_classes, [[int(lab[v]) for v in h.edges[e]] for e in idx], w)
                obs = abs(energy(breve, xt) - energy(tilde, xc))
            else:
                obs = 0.0
            g0 = eps * q_total / (2 * h.n**3 * max(lev.m, 1))
            out.append(
                ProbeRecord(
                    level=lev.level,
                    cluster=cl.index,
                    delta=delta,
                    contract_compare_ok=bool(cc_ok),
                    observation_gap=float(obs),
                    additive_ok=add_ok,
                    case_bound_ok=case_ok,
                    max_gap=float(gap.max(initial=0.0)),
                    g0_asymptotic_bound=g0,
                    g0_asymptotic_ok=bool(np.all(gap <= eps / 10 * qx + g0 + 1e-12)),
                )
            )
    return out


def run_report(run: PipelineRun) -> dict:
    sp = run.sparsifier
    return {
        "n": run.graph.n,
        "m": run.graph.m,
        "epsilon": run.config.epsilon,
        "seed": run.config.seed,
        "lambda_c": run.config.lambda_c,
        "delay": run.delay,
        "level_cap": run.level_cap,
        "complete": run.complete,
        "size": sp.size if sp else 0,
        "levels": [
            {
                "level": lev.level,
                "live_edges": lev.m,
                "supernodes": lev.n,
                "clusters": len(lev.clusters),
                "cluster_sizes": [len(cl.classes) for cl in lev.clusters],
                "removed": len(lev.removed),
                "kept": sum(len(cl.entries) for cl in lev.clusters),
            }
            for lev in run.levels
        ],
        "census": cluster_census(run),
        "checks": structure_checks(run),
    }
