"""Hypergraph and directed-hypergraph values, energies, cuts and contraction.

Hyperedges are multisets: a vertex id may be listed more than once and the
list length is the edge size.  Vertices are dense ids ``0..n-1``; edges keep
insertion order so edge indices are stable through contraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet


class HypergraphError(ValueError):
    """Invalid hypergraph data or arguments."""


class DegenerateCutError(ArithmeticError):
    """Raised when a cut has a side of zero volume, so its expansion is undefined."""


@dataclass(frozen=True)
class Hyperedge:
    vertices: tuple[int, ...]
    weight: float = 1.0

    @property
    def size(self) -> int:
        return len(self.vertices)

    def multiplicity(self, v: int) -> int:
        return self.vertices.count(v)

    @property
    def is_self_loop(self) -> bool:
        return len(set(self.vertices)) == 1


class Hypergraph:
    """Immutable weighted multiset hypergraph."""

    def __init__(
        self,
        n: int,
        edges: Iterable[Sequence[int]],
        weights: Sequence[float] | None = None,
        weighted: bool | None = None,
    ):
        if n < 0:
            raise HypergraphError(f"vertex count must be nonnegative, got {n}")
        self.n = int(n)
        self._edges: tuple[tuple[int, ...], ...] = tuple(tuple(int(v) for v in e) for e in edges)
        for idx, e in enumerate(self._edges):
            if not e:
                raise HypergraphError(f"edge {idx} is empty")
            for v in e:
                if v < 0 or v >= self.n:
                    raise HypergraphError(f"edge {idx} has vertex {v} outside 0..{self.n - 1}")
        if weights is None:
            w = np.ones(len(self._edges))
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
            if w.shape[0] != len(self._edges):
                raise HypergraphError(f"{w.shape[0]} weights for {len(self._edges)} edges")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise HypergraphError("edge weights must be finite and positive")
        w.setflags(write=False)
        self._weights = w
        self.weighted = bool(weights is not None) if weighted is None else bool(weighted)

    # -- basic accessors -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return self._edges

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def edge(self, i: int) -> Hyperedge:
        return Hyperedge(self._edges[i], float(self._weights[i]))

    def __iter__(self):
        return (self.edge(i) for i in range(self.m))

    def __len__(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, m={self.m}, weighted={self.weighted})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and self._edges == other._edges
            and np.array_equal(self._weights, other._weights)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def total_weight(self) -> float:
        return float(self._weights.sum())

    @cached_property
    def rank(self) -> int:
        """Maximum edge size (0 for an edgeless hypergraph)."""
        return max((len(e) for e in self._edges), default=0)

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([len(e) for e in self._edges], dtype=np.int64)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Weighted degrees: sum over edges of multiplicity times weight."""
        d = np.zeros(self.n)
        for e, w in zip(self._edges, self._weights):
            for v in e:
                d[v] += w
        d.setflags(write=False)
        return d

    @cached_property
    def padded(self) -> np.ndarray:
        """``m x rank`` index matrix; short edges are padded with their first vertex."""
        out = np.zeros((self.m, max(self.rank, 1)), dtype=np.int64)
        for i, e in enumerate(self._edges):
            out[i, : len(e)] = e
            out[i, len(e):] = e[0]
        return out

    @cached_property
    def edge_masks(self) -> np.ndarray:
        """Bitmask of the distinct vertices of every edge (requires n <= 62)."""
        if self.n > 62:
            raise HypergraphError("bitmask representation needs n <= 62")
        masks = np.zeros(self.m, dtype=np.int64)
        for i, e in enumerate(self._edges):
            mask = 0
            for v in e:
                mask |= 1 << v
            masks[i] = mask
        return masks

    @cached_property
    def self_loop_mask(self) -> np.ndarray:
        return np.array([len(set(e)) == 1 for e in self._edges], dtype=bool)

    def with_weights(self, weights: Sequence[float]) -> "Hypergraph":
        return Hypergraph(self.n, self._edges, weights, weighted=True)

    def subgraph(self, edge_indices: Sequence[int]) -> "Hypergraph":
        """Same vertex set, only the listed edges (in the given order)."""
        idx = list(edge_indices)
        return Hypergraph(
            self.n, [self._edges[i] for i in idx], self._weights[idx], weighted=self.weighted
        )

    def induced(self, vertices: Iterable[int]) -> tuple["Hypergraph", list[int], list[int]]:
        """Induced subgraph G[S], relabelled to ``0..|S|-1``.

        Returns the subgraph, the sorted list of original vertex ids and the
        original indices of the retained edges.
        """
        verts = sorted(set(vertices))
        local = {v: i for i, v in enumerate(verts)}
        kept = [i for i, e in enumerate(self._edges) if all(v in local for v in e)]
        sub = Hypergraph(
            len(verts),
            [[local[v] for v in self._edges[i]] for i in kept],
            self._weights[kept],
            weighted=self.weighted,
        )
        return sub, verts, kept


def _check_vector(h, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != h.n:
        raise HypergraphError(f"vector has length {x.shape[-1]}, expected {h.n}")
    return x


def edge_energies(h: Hypergraph, x) -> np.ndarray:
    """Per-edge energies ``w_e * (max_e x - min_e x)^2``; ``x`` may be batched ``(k, n)``."""
    x = _check_vector(h, x)
    if h.m == 0:
        return np.zeros(x.shape[:-1] + (0,))
    vals = x[..., h.padded]
    gap = vals.max(axis=-1) - vals.min(axis=-1)
    return h.weights * gap * gap


def energy_edge(h: Hypergraph, e: int, x) -> float:
    x = _check_vector(h, x)
    if not 0 <= e < h.m:
        raise HypergraphError(f"edge index {e} out of range")
    vals = x[list(h.edges[e])]
    gap = float(vals.max() - vals.min())
    return float(h.weights[e]) * gap * gap


def energy(h: Hypergraph, x) -> float | np.ndarray:
    """Hypergraph energy; returns an array for batched input."""
    out = edge_energies(h, x).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def energy_witness(h: Hypergraph, e: int, x) -> tuple[int, int]:
    """A pair ``(argmax, argmin)`` attaining the energy of edge ``e``; ties go to the lowest id."""
    x = _check_vector(h, x)
    verts = sorted(set(h.edges[e]))
    hi = max(verts, key=lambda v: (x[v], -v))
    lo = min(verts, key=lambda v: (x[v], v))
    return hi, lo


def indicator(n: int, s: Iterable[int]) -> np.ndarray:
    x = np.zeros(n)
    x[list(s)] = 1.0
    return x


def cut_value(h: Hypergraph, s: Iterable[int]) -> float:
    s = set(s)
    if h.m == 0:
        return 0.0
    cross = np.array([any(v in s for v in e) and not all(v in s for v in e) for e in h.edges])
    # same reduction as energy() at the indicator, so the two agree bit for bit
    return float(np.where(cross, h.weights, 0.0).sum())


def degree(h: Hypergraph, v: int) -> float:
    if not 0 <= v < h.n:
        raise HypergraphError(f"vertex {v} out of range")
    return float(h.degrees[v])


def volume(h: Hypergraph, s: Iterable[int]) -> float:
    idx = list(s)
    return float(h.degrees[idx].sum()) if idx else 0.0


def _nontrivial(h: Hypergraph, s: Iterable[int]) -> set[int]:
    s = set(s)
    if not s or len(s) >= h.n or any(v < 0 or v >= h.n for v in s):
        raise HypergraphError("cut side must be a nonempty proper subset of the vertices")
    return s


def expansion_of_set(h: Hypergraph, s: Iterable[int]) -> float:
    """``cut(S) / min(vol S, vol V-S)``; raises DegenerateCutError on a zero-volume side."""
    s = _nontrivial(h, s)
    vs = volume(h, s)
    vt = volume(h, set(range(h.n)) - s)
    denom = min(vs, vt)
    if denom <= 0:
        raise DegenerateCutError("a side of the cut has zero volume")
    return cut_value(h, s) / denom


def sparsity_of_set(h: Hypergraph, s: Iterable[int]) -> float:
    """``cut(S) / (vol S * vol V-S)``, the product-denominator sparsity."""
    s = _nontrivial(h, s)
    vs = volume(h, s)
    vt = volume(h, set(range(h.n)) - s)
    if vs <= 0 or vt <= 0:
        raise DegenerateCutError("a side of the cut has zero volume")
    return cut_value(h, s) / (vs * vt)


def connected_components(h: Hypergraph) -> list[list[int]]:
    """Vertex classes of the connectivity relation, each sorted, ordered by smallest id."""
    ds = DisjointSet(range(h.n))
    for e in h.edges:
        for v in e[1:]:
            ds.merge(e[0], v)
    comps = [sorted(c) for c in ds.subsets()]
    comps.sort(key=lambda c: c[0])
    return comps


class VertexPartition:
    """Equivalence relation on ``0..n-1`` kept as a disjoint-set forest.

    Class ids are assigned in order of each class's smallest member, so the
    labelling only depends on the partition, not on the merge history.
    """

    def __init__(self, n: int):
        self.n = int(n)
        self._ds = DisjointSet(range(self.n))

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> "VertexPartition":
        p = cls(n)
        for c in classes:
            p.merge_all(c)
        return p

    def union(self, a: int, b: int) -> bool:
        return self._ds.merge(a, b)

    def merge_all(self, vertices: Iterable[int]) -> None:
        it = iter(vertices)
        first = next(it, None)
        if first is None:
            return
        for v in it:
            self._ds.merge(first, v)

    def find(self, v: int) -> int:
        return self._ds[v]

    def connected(self, a: int, b: int) -> bool:
        return self._ds.connected(a, b)

    def classes(self) -> list[list[int]]:
        cl = [sorted(c) for c in self._ds.subsets()]
        cl.sort(key=lambda c: c[0])
        return cl

    def labels(self) -> np.ndarray:
        """Class id per vertex."""
        lab = np.empty(self.n, dtype=np.int64)
        for cid, c in enumerate(self.classes()):
            lab[c] = cid
        return lab

    def representatives(self) -> np.ndarray:
        """Smallest member of each vertex's class."""
        rep = np.empty(self.n, dtype=np.int64)
        for c in self.classes():
            rep[c] = c[0]
        return rep

    @property
    def num_classes(self) -> int:
        return self._ds.n_subsets

    def copy(self) -> "VertexPartition":
        return VertexPartition.from_classes(self.n, self.classes())

    def refines(self, other: "VertexPartition") -> bool:
        """True when every class of ``self`` lies inside a class of ``other``."""
        lab = other.labels()
        return all(len({lab[v] for v in c}) == 1 for c in self.classes())


def contract(h: Hypergraph, p: VertexPartition) -> tuple[Hypergraph, np.ndarray]:
    """Contract ``h`` by ``p``; every edge keeps its length, weight and position."""
    if p.n != h.n:
        raise HypergraphError("partition and hypergraph have different vertex counts")
    lab = p.labels()
    edges = [[int(lab[v]) for v in e] for e in h.edges]
    return Hypergraph(p.num_classes, edges, h.weights, weighted=h.weighted), lab


# -- directed hypergraphs ---------------------------------------------------


@dataclass(frozen=True)
class Hyperarc:
    tail: frozenset[int]
    head: frozenset[int]
    weight: float = 1.0

    @property
    def size(self) -> int:
        return len(self.tail) + len(self.head)


class DirectedHypergraph:
    """Simple directed hypergraph: arcs are (tail, head) pairs of disjoint vertex sets."""

    def __init__(
        self,
        n: int,
        arcs: Iterable[tuple[Iterable[int], Iterable[int]]],
        weights: Sequence[float] | None = None,
        weighted: bool | None = None,
    ):
        self.n = int(n)
        tails, heads, seen = [], [], set()
        for idx, (t, hd) in enumerate(arcs):
            t_list, h_list = [int(v) for v in t], [int(v) for v in hd]
            ts, hs = frozenset(t_list), frozenset(h_list)
            if len(ts) != len(t_list) or len(hs) != len(h_list):
                raise HypergraphError(f"arc {idx} lists a vertex twice in its tail or head")
            if not ts or not hs:
                raise HypergraphError(f"arc {idx} has an empty tail or head")
            if ts & hs:
                raise HypergraphError(f"arc {idx} has overlapping tail and head {sorted(ts & hs)}")
            for v in ts | hs:
                if v < 0 or v >= self.n:
                    raise HypergraphError(f"arc {idx} has vertex {v} outside 0..{self.n - 1}")
            if (ts, hs) in seen:
                raise HypergraphError(f"arc {idx} duplicates an earlier arc")
            seen.add((ts, hs))
            tails.append(tuple(t_list))
            heads.append(tuple(h_list))
        self._tails = tuple(tails)
        self._heads = tuple(heads)
        if weights is None:
            w = np.ones(len(tails))
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
            if w.shape[0] != len(tails):
                raise HypergraphError(f"{w.shape[0]} weights for {len(tails)} arcs")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise HypergraphError("arc weights must be finite and positive")
        w.setflags(write=False)
        self._weights = w
        self.weighted = bool(weights is not None) if weighted is None else bool(weighted)

    @property
    def m(self) -> int:
        return len(self._tails)

    def __len__(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return f"DirectedHypergraph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedHypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and self._tails == other._tails
            and self._heads == other._heads
            and np.array_equal(self._weights, other._weights)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def tails(self) -> tuple[tuple[int, ...], ...]:
        return self._tails

    @property
    def heads(self) -> tuple[tuple[int, ...], ...]:
        return self._heads

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def arc(self, i: int) -> Hyperarc:
        return Hyperarc(frozenset(self._tails[i]), frozenset(self._heads[i]), float(self._weights[i]))

    @cached_property
    def rank(self) -> int:
        return max((len(t) + len(h) for t, h in zip(self._tails, self._heads)), default=0)

    def subgraph(self, arc_indices: Sequence[int]) -> "DirectedHypergraph":
        idx = list(arc_indices)
        return DirectedHypergraph(
            self.n,
            [(self._tails[i], self._heads[i]) for i in idx],
            self._weights[idx],
            weighted=self.weighted,
        )

    def with_weights(self, weights: Sequence[float]) -> "DirectedHypergraph":
        return DirectedHypergraph(self.n, zip(self._tails, self._heads), weights, weighted=True)

    @cached_property
    def _padded(self) -> tuple[np.ndarray, np.ndarray]:
        rt = max((len(t) for t in self._tails), default=1)
        rh = max((len(h) for h in self._heads), default=1)
        pt = np.zeros((self.m, rt), dtype=np.int64)
        ph = np.zeros((self.m, rh), dtype=np.int64)
        for i, (t, h) in enumerate(zip(self._tails, self._heads)):
            pt[i, : len(t)] = t
            pt[i, len(t):] = t[0]
            ph[i, : len(h)] = h
            ph[i, len(h):] = h[0]
        return pt, ph

    @cached_property
    def masks(self) -> tuple[np.ndarray, np.ndarray]:
        if self.n > 62:
            raise HypergraphError("bitmask representation needs n <= 62")
        tm = np.array([sum(1 << v for v in t) for t in self._tails], dtype=np.int64)
        hm = np.array([sum(1 << v for v in h) for h in self._heads], dtype=np.int64)
        return tm, hm


def directed_arc_energies(d: DirectedHypergraph, x) -> np.ndarray:
    """``w_e * max_{a in tail, b in head} (x_a - x_b)_+^2`` per arc; ``x`` may be batched."""
    x = _check_vector(d, x)
    if d.m == 0:
        return np.zeros(x.shape[:-1] + (0,))
    pt, ph = d._padded
    gap = np.maximum(x[..., pt].max(axis=-1) - x[..., ph].min(axis=-1), 0.0)
    return d.weights * gap * gap


def directed_energy(d: DirectedHypergraph, x) -> float | np.ndarray:
    out = directed_arc_energies(d, x).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def directed_cut_value(d: DirectedHypergraph, s: Iterable[int]) -> float:
    s = set(s)
    total = 0.0
    for t, h, w in zip(d.tails, d.heads, d.weights):
        if any(v in s for v in t) and any(v not in s for v in h):
            total += w
    return total


@dataclass(frozen=True)
class CliquePair:
    tail: int
    head: int
    arc: int


def clique_graph(d: DirectedHypergraph) -> list[CliquePair]:
    """Multi-union of the tail x head cliques, each pair tagged with its source arc."""
    out = []
    for idx, (t, h) in enumerate(zip(d.tails, d.heads)):
        for a in sorted(t):
            for b in sorted(h):
                out.append(CliquePair(a, b, idx))
    return out


def clique_multiplicities(d: DirectedHypergraph) -> dict[tuple[int, int], int]:
    mult: dict[tuple[int, int], int] = {}
    for t, h in zip(d.tails, d.heads):
        for a in t:
            for b in h:
                mult[(a, b)] = mult.get((a, b), 0) + 1
    return mult


# -- sparsifiers ------------------------------------------------------------


class Sparsifier:
    """Weighted sub-(hyper)graph of a parent: positive weights on distinct parent edge indices."""

    def __init__(self, parent, entries: Iterable[tuple[int, float]]):
        self.parent = parent
        items = sorted((int(i), float(w)) for i, w in entries)
        idx = [i for i, _ in items]
        if len(set(idx)) != len(idx):
            raise HypergraphError("sparsifier lists an edge index twice")
        for i, w in items:
            if not 0 <= i < parent.m:
                raise HypergraphError(f"sparsifier edge index {i} out of range")
            if not (w > 0 and math.isfinite(w)):
                raise HypergraphError(f"sparsifier weight {w} for edge {i} is not positive")
        self.entries: list[tuple[int, float]] = items

    @property
    def size(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return self.size

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.entries]

    def weight_vector(self) -> np.ndarray:
        """Effective weight per parent edge (zero when dropped)."""
        out = np.zeros(self.parent.m)
        for i, w in self.entries:
            out[i] = w
        return out

    def as_graph(self):
        """The sparsifier as a standalone weighted (directed) hypergraph on the parent's vertices."""
        idx = self.indices
        weights = [w for _, w in self.entries]
        if isinstance(self.parent, DirectedHypergraph):
            return DirectedHypergraph(
                self.parent.n,
                [(self.parent.tails[i], self.parent.heads[i]) for i in idx],
                weights,
                weighted=True,
            )
        return Hypergraph(self.parent.n, [self.parent.edges[i] for i in idx], weights, weighted=True)

    def energy(self, x):
        g = self.as_graph()
        if isinstance(g, DirectedHypergraph):
            return directed_energy(g, x)
        return energy(g, x)

    def total_weight(self) -> float:
        return float(sum(w for _, w in self.entries))

    def __repr__(self) -> str:
        return f"Sparsifier(size={self.size}, parent={self.parent!r})"
