"""Cut-query string compression built on Ruzsa-Szemeredi graphs.

A string of length 2ta picks a subset of the doubled bipartite RS graph; each
left vertex and its chosen neighbours form one hyperedge.  Subset sums of the
string are read back from single cut values of that hypergraph.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hypercore import Hypergraph, HypergraphError, Sparsifier, cut_value
from .rng import child_seed, generator

Edge = tuple[int, int]


class RSGenerationError(HypergraphError):
    def __init__(self, msg: str, found: int):
        super().__init__(msg)
        self.found = found


@dataclass(frozen=True)
class RSGraph:
    n: int
    matchings: tuple[tuple[Edge, ...], ...]

    def __init__(self, n: int, matchings):
        object.__setattr__(self, "n", int(n))
        ms = tuple(tuple(tuple(sorted((int(u), int(v)))) for u, v in m) for m in matchings)
        object.__setattr__(self, "matchings", ms)
        for m in ms:
            for u, v in m:
                if not (0 <= u < n and 0 <= v < n) or u == v:
                    raise HypergraphError(f"bad RS edge ({u}, {v}) on {n} vertices")

    @property
    def t(self) -> int:
        return len(self.matchings)

    @property
    def a(self) -> int:
        return len(self.matchings[0]) if self.matchings else 0

    @property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for m in self.matchings:
            for u, v in m:
                d[u] += 1
                d[v] += 1
        return d

    def to_dict(self) -> dict:
        return {"n": self.n, "t": self.t, "a": self.a, "matchings": [[list(e) for e in m] for m in self.matchings]}

    @classmethod
    def from_dict(cls, d: dict) -> "RSGraph":
        return cls(d["n"], [[tuple(e) for e in m] for m in d["matchings"]])


def validate_rs(g: RSGraph) -> tuple[bool, str | None]:
    """Check equal sizes, vertex-disjointness inside matchings, edge-disjointness and inducedness."""
    if g.t == 0:
        return True, None
    sizes = {len(m) for m in g.matchings}
    if len(sizes) != 1:
        return False, f"matchings have unequal sizes {sorted(sizes)}"
    owner: dict[Edge, int] = {}
    for j, m in enumerate(g.matchings):
        seen = set()
        for e in m:
            if e[0] in seen or e[1] in seen:
                return False, f"matching {j} is not a matching at edge {e}"
            seen.update(e)
            if e in owner:
                return False, f"edge {e} lies in matchings {owner[e]} and {j}"
            owner[e] = j
    for j, m in enumerate(g.matchings):
        vs = {v for e in m for v in e}
        for e, k in owner.items():
            if k != j and e[0] in vs and e[1] in vs:
                return False, f"edge {e} of matching {k} lies inside the support of matching {j}"
    return True, None


def disjoint_blocks(t: int, a: int) -> RSGraph:
    """``t`` matchings on disjoint blocks of ``2a`` vertices; valid but every degree is 1."""
    ms = [[(j * 2 * a + 2 * i, j * 2 * a + 2 * i + 1) for i in range(a)] for j in range(t)]
    return RSGraph(2 * t * a, ms)


def _compatible(cand, edges, vsets) -> bool:
    cv = {v for e in cand for v in e}
    for e in cand:
        if e in edges:
            return False
        for vs in vsets:
            if e[0] in vs and e[1] in vs:
                return False
    for e in edges:
        if e[0] in cv and e[1] in cv:
            return False
    return True


def gen_rs_greedy(n: int, t: int, a: int, seed: int = 0, budget: int = 20000) -> RSGraph:
    """Randomized greedy packing of ``t`` induced matchings of size ``a``.

    Candidate supports favour low-degree vertices so coverage spreads evenly.
    Raises ``RSGenerationError`` when the retry budget runs out.
    """
    if 2 * a > n or a < 1 or t < 1:
        raise HypergraphError(f"infeasible parameters n={n}, t={t}, a={a}")
    rng = generator(seed)
    deg = np.zeros(n)
    edges: set[Edge] = set()
    vsets: list[set[int]] = []
    out = []
    tries = 0
    while len(out) < t:
        tries += 1
        if tries > budget:
            raise RSGenerationError(f"found only {len(out)} of {t} matchings within {budget} tries", len(out))
        w = 1.0 / (1.0 + deg) ** 2
        vs = rng.choice(n, size=2 * a, replace=False, p=w / w.sum())
        cand = [tuple(sorted((int(vs[2 * i]), int(vs[2 * i + 1])))) for i in range(a)]
        if not _compatible(cand, edges, vsets):
            continue
        out.append(cand)
        edges.update(cand)
        vsets.append({v for e in cand for v in e})
        for e in cand:
            deg[list(e)] += 1
    g = RSGraph(n, out)
    ok, why = validate_rs(g)
    assert ok, why
    return g


# -- encoding -----------------------------------------------------------------------


@dataclass
class EncodedInstance:
    rs: RSGraph
    s: np.ndarray
    pairs: list[Edge]  # doubled edges in index order, (u in P, n + v in Q)
    matching_of: np.ndarray
    hyper: Hypergraph
    P_j: list[list[int]] = field(default_factory=list)
    Q_j: list[list[int]] = field(default_factory=list)

    @property
    def ell(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return self.rs.n

    def neighbourhood(self, u: int) -> list[int]:
        return list(self.hyper.edges[u][1:])


def doubled_edges(g: RSGraph) -> tuple[list[Edge], np.ndarray]:
    """Edges of the bipartite double ordered by (matching, edge rank, orientation)."""
    pairs, which = [], []
    for j, m in enumerate(g.matchings):
        for u, v in m:
            pairs.append((u, g.n + v))
            pairs.append((v, g.n + u))
            which += [j, j]
    return pairs, np.asarray(which, dtype=np.int64)


def encode(g: RSGraph, s) -> EncodedInstance:
    pairs, which = doubled_edges(g)
    s = np.asarray(s, dtype=np.uint8).ravel()
    if s.size != len(pairs):
        raise HypergraphError(f"string length {s.size} differs from 2ta = {len(pairs)}")
    if np.any(s > 1):
        raise HypergraphError("string must be binary")
    nb: list[list[int]] = [[] for _ in range(g.n)]
    for i in np.flatnonzero(s):
        u, q = pairs[i]
        nb[u].append(q)
    hyper = Hypergraph(2 * g.n, [[u] + sorted(nb[u]) for u in range(g.n)])
    inst = EncodedInstance(rs=g, s=s, pairs=pairs, matching_of=which, hyper=hyper)
    for j in range(g.t):
        idx = np.flatnonzero(which == j)
        inst.P_j.append(sorted(pairs[i][0] for i in idx))
        inst.Q_j.append(sorted(pairs[i][1] for i in idx))
    return inst


def _segments(inst: EncodedInstance, q) -> dict[int, list[int]]:
    q = sorted({int(i) for i in q})
    if q and (q[0] < 0 or q[-1] >= inst.ell):
        raise HypergraphError(f"query coordinates must lie in [0, {inst.ell})")
    seg: dict[int, list[int]] = {}
    for i in q:
        seg.setdefault(int(inst.matching_of[i]), []).append(i)
    return seg


def query_cut_set(inst: EncodedInstance, j: int, qj) -> list[int]:
    """P-endpoints of the queried edges of matching ``j`` plus all of Q outside ``Q_j``."""
    qj = list(qj)
    if any(inst.matching_of[i] != j for i in qj):
        raise HypergraphError(f"query segment has coordinates outside matching {j}")
    n = inst.n
    qset = set(inst.Q_j[j])
    return sorted({inst.pairs[i][0] for i in qj} | {v for v in range(n, 2 * n) if v not in qset})


def _outside_counts(inst: EncodedInstance, j: int) -> np.ndarray:
    c = np.zeros(inst.n, dtype=np.int64)
    qset = set(inst.Q_j[j])
    for u, q in inst.pairs:
        if q not in qset:
            c[u] += 1
    return c


def expected_z(inst: EncodedInstance, j: int) -> float:
    """Mean number of hyperedges at P outside P_j reaching outside Q_j, for a uniform string."""
    c = _outside_counts(inst, j)
    pj = set(inst.P_j[j])
    return float(sum(1.0 - 2.0 ** (-int(c[u])) for u in range(inst.n) if u not in pj))


def realized_z(inst: EncodedInstance, j: int) -> int:
    qset = set(inst.Q_j[j])
    pj = set(inst.P_j[j])
    return sum(1 for u in range(inst.n) if u not in pj and any(q not in qset for q in inst.neighbourhood(u)))


@dataclass
class SegmentClasses:
    cat1_crossing: int
    cat2_crossing: int
    cat2_low_degree: int
    cat3_crossing: int
    target: int  # |s cap q_j|


def classify(inst: EncodedInstance, j: int, qj) -> SegmentClasses:
    """Split the crossing hyperedges of the segment cut by the kind of their P-vertex."""
    S = set(query_cut_set(inst, j, qj))
    e = inst.hyper.edges
    crosses = [any(v in S for v in e[u]) and any(v not in S for v in e[u]) for u in range(inst.n)]
    pj = set(inst.P_j[j])
    sp = S & pj
    deg = [len(e[u]) - 1 for u in range(inst.n)]
    return SegmentClasses(
        cat1_crossing=sum(crosses[u] for u in sp),
        cat2_crossing=sum(crosses[u] for u in pj - sp),
        cat2_low_degree=sum(deg[u] < 2 for u in pj),
        cat3_crossing=sum(crosses[u] for u in range(inst.n) if u not in pj),
        target=int(inst.s[list(qj)].sum()) if len(qj) else 0,
    )


CutFn = Callable[[list[int]], float]


def exact_cut_fn(inst: EncodedInstance) -> CutFn:
    return lambda S: cut_value(inst.hyper, S)


def sketch_cut_fn(sp: Sparsifier) -> CutFn:
    g = sp.as_graph()
    return lambda S: cut_value(g, S)


@dataclass
class DecodeResult:
    estimate: int
    raw: float
    segments: dict[int, float]
    clamped: bool


def decode(inst: EncodedInstance, q, cut_fn: CutFn | None = None, realized: bool = False) -> DecodeResult:
    """Estimate ``|s cap q|`` by one cut per matching segment.

    Matchings with no queried coordinate contribute 0.  With ``realized`` the
    expected noise terms are replaced by their actual values, which makes the
    exact-cut estimate equal the truth.
    """
    cut_fn = cut_fn or exact_cut_fn(inst)
    seg = _segments(inst, q)
    vals = {}
    two_a = 2 * inst.rs.a
    for j, qj in sorted(seg.items()):
        c = float(cut_fn(query_cut_set(inst, j, qj)))
        if realized:
            cl = classify(inst, j, qj)
            vals[j] = c - cl.cat2_crossing - cl.cat3_crossing
        else:
            vals[j] = c - (two_a - len(qj)) - expected_z(inst, j)
    raw = float(sum(vals.values()))
    total = sum(len(v) for v in seg.values())
    est = int(round(raw))
    clamped = est < 0 or est > total
    return DecodeResult(estimate=min(max(est, 0), total), raw=raw, segments=vals, clamped=clamped)


def good_set_error(inst: EncodedInstance) -> float:
    """Sum over matchings of low-degree P_j vertices plus the deviation of Z_j from its mean."""
    tot = 0.0
    for j in range(inst.rs.t):
        tot += sum(len(inst.hyper.edges[u]) - 1 < 2 for u in inst.P_j[j])
        tot += abs(realized_z(inst, j) - expected_z(inst, j))
    return tot


def good_set_bound(n: int, t: int) -> float:
    return 8 * n + 100 * t * math.sqrt(n * math.log(max(n, 2)))


@dataclass
class AuditReport:
    n: int
    t: int
    a: int
    ell: int
    trials: int
    bound: float
    errors: list[int]
    good_errors: list[float]
    within_bound: int
    in_good_set: int
    low_degree_instance: bool
    clamped: int

    def quantiles(self) -> dict:
        e = np.asarray(self.errors, dtype=float)
        if not e.size:
            return {}
        return {f"q{p}": float(np.percentile(e, p)) for p in (50, 90, 99, 100)}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "a": self.a,
            "ell": self.ell,
            "trials": self.trials,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "within_bound_fraction": self.within_bound / self.trials if self.trials else None,
            "in_good_set": self.in_good_set,
            "mean_error": float(np.mean(self.errors)) if self.errors else None,
            "error_quantiles": self.quantiles(),
            "low_degree_instance": self.low_degree_instance,
            "clamped": self.clamped,
        }


def random_string(ell: int, seed) -> np.ndarray:
    return (generator(seed).random(ell) < 0.5).astype(np.uint8)


def _audit_trial(g: RSGraph, seed: int, q_density: float) -> tuple[int, float, bool]:
    ell = 2 * g.t * g.a
    s = random_string(ell, child_seed(seed, 0))
    q = np.flatnonzero(generator(child_seed(seed, 1)).random(ell) < q_density)
    inst = encode(g, s)
    res = decode(inst, q)
    return abs(res.estimate - int(s[q].sum())), good_set_error(inst), res.clamped


def audit_scs(g: RSGraph, trials: int, seed: int = 0, q_density: float = 0.5, jobs: int = 1) -> AuditReport:
    """Decode random subset queries on random strings with exact cuts and tally errors."""
    ok, why = validate_rs(g)
    if not ok:
        raise HypergraphError(f"not an RS graph: {why}")
    bound = good_set_bound(g.n, g.t)
    seeds = [child_seed(seed, k) for k in range(trials)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda s: _audit_trial(g, s, q_density), seeds))
    else:
        rows = [_audit_trial(g, s, q_density) for s in seeds]
    errs = [r[0] for r in rows]
    goods = [r[1] for r in rows]
    return AuditReport(
        n=g.n,
        t=g.t,
        a=g.a,
        ell=2 * g.t * g.a,
        trials=trials,
        bound=bound,
        errors=errs,
        good_errors=goods,
        within_bound=sum(e <= bound for e in errs),
        in_good_set=sum(x <= bound for x in goods),
        low_degree_instance=bool(g.n and g.degrees.min() < 2),
        clamped=sum(r[2] for r in rows),
    )
