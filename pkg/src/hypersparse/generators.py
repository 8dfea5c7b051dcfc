"""Instance generators used by the tests and the ``gen`` subcommand."""

from __future__ import annotations

import itertools

import numpy as np

from .hypercore import DirectedHypergraph, Hypergraph, HypergraphError
from .rng import generator


def complete_uniform(n: int, r: int) -> Hypergraph:
    if r < 1 or r > n:
        raise HypergraphError(f"need 1 <= r <= n, got r={r}, n={n}")
    return Hypergraph(n, list(itertools.combinations(range(n), r)))


def random_uniform(n: int, m: int, r: int, seed: int = 0, multiset: bool = False) -> Hypergraph:
    """``m`` independent edges of size ``r``; distinct vertices unless ``multiset``."""
    if r > n and not multiset:
        raise HypergraphError(f"r={r} exceeds n={n}")
    rng = generator(seed)
    edges = []
    for _ in range(m):
        if multiset:
            edges.append(sorted(rng.integers(0, n, size=r).tolist()))
        else:
            edges.append(sorted(rng.choice(n, size=r, replace=False).tolist()))
    return Hypergraph(n, edges)


def random_weighted(n: int, m: int, r: int, seed: int = 0, low: float = 0.5, high: float = 2.0) -> Hypergraph:
    h = random_uniform(n, m, r, seed)
    w = generator(seed + 1).uniform(low, high, size=m)
    return Hypergraph(n, h.edges, w)


def random_mixed(n: int, m: int, rmax: int, seed: int = 0) -> Hypergraph:
    """Edge sizes uniform in ``1..rmax`` with repeated vertices allowed."""
    rng = generator(seed)
    edges = [rng.integers(0, n, size=int(rng.integers(1, rmax + 1))).tolist() for _ in range(m)]
    return Hypergraph(n, edges)


def bridge(k: int = 6, r: int = 3) -> Hypergraph:
    """Two complete r-uniform hypergraphs on ``k`` vertices joined by one edge."""
    if not 2 <= r <= k:
        raise HypergraphError(f"need 2 <= r <= k, got r={r}, k={k}")
    left = list(itertools.combinations(range(k), r))
    right = [tuple(v + k for v in e) for e in left]
    link = tuple(range(k - (r - 1), k)) + (k,)
    return Hypergraph(2 * k, left + right + [link])


def disjoint_union(a: Hypergraph, b: Hypergraph) -> Hypergraph:
    edges = list(a.edges) + [tuple(v + a.n for v in e) for e in b.edges]
    w = np.concatenate([a.weights, b.weights])
    return Hypergraph(a.n + b.n, edges, w if (a.weighted or b.weighted) else None)


def path(m: int, r: int = 2) -> Hypergraph:
    """``m`` edges of size ``r`` along a line, consecutive edges sharing one vertex."""
    step = r - 1
    return Hypergraph(m * step + 1, [list(range(i * step, i * step + r)) for i in range(m)])


# -- directed --------------------------------------------------------------------


def bipartite_clique(n: int) -> DirectedHypergraph:
    """All arcs ``{u} -> {v}`` from the first half to the second half."""
    a = n // 2
    return DirectedHypergraph(n, [((u,), (v,)) for u in range(a) for v in range(a, n)])


def random_directed(n: int, m: int, rmax: int = 3, seed: int = 0) -> DirectedHypergraph:
    rng = generator(seed)
    arcs, seen = [], set()
    tries = 0
    while len(arcs) < m:
        tries += 1
        if tries > 1000 * (m + 1):
            raise HypergraphError("could not draw enough distinct arcs")
        size = int(rng.integers(2, min(rmax, n) + 1))
        vs = rng.choice(n, size=size, replace=False)
        cut = int(rng.integers(1, size))
        t, hd = tuple(sorted(vs[:cut].tolist())), tuple(sorted(vs[cut:].tolist()))
        if (t, hd) in seen:
            continue
        seen.add((t, hd))
        arcs.append((t, hd))
    return DirectedHypergraph(n, arcs)


def block_directed(n: int, blocks: int = 2, seed: int = 0, density: float = 1.0) -> DirectedHypergraph:
    """Arcs between all nonempty subsets of a tail block and a head block.

    Vertices are split into ``2 * blocks`` groups; group ``2i`` sends to group
    ``2i + 1``.  Every pair of subsets becomes an arc with probability
    ``density``, which makes clique pairs heavily overlapped.
    """
    rng = generator(seed)
    groups = np.array_split(np.arange(n), 2 * blocks)
    arcs = []
    for b in range(blocks):
        T, H = groups[2 * b].tolist(), groups[2 * b + 1].tolist()
        tsubs = [s for k in range(1, len(T) + 1) for s in itertools.combinations(T, k)]
        hsubs = [s for k in range(1, len(H) + 1) for s in itertools.combinations(H, k)]
        for t in tsubs:
            for hd in hsubs:
                if density >= 1.0 or rng.random() < density:
                    arcs.append((t, hd))
    return DirectedHypergraph(n, arcs)


def two_scale_overlap() -> DirectedHypergraph:
    """A path of single arcs (overlap 1) beside a complete 2-by-3 subset block (overlap 8).

    In the block every tail subset of {4, 5} is joined to every head subset of
    {6, 7, 8}, so each clique pair occurs in 2 * 4 = 8 arcs.
    """
    path_arcs = [((0,), (1,)), ((1,), (2,)), ((2,), (3,))]
    T, H = (4, 5), (6, 7, 8)
    tsubs = [s for k in (1, 2) for s in itertools.combinations(T, k)]
    hsubs = [s for k in (1, 2, 3) for s in itertools.combinations(H, k)]
    return DirectedHypergraph(9, path_arcs + [(t, hd) for t in tsubs for hd in hsubs])
