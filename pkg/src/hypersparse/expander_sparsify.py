"""Importance sampling for hypergraphs of large expansion.

Each edge is kept independently with probability ``min(lam / d_min(e), 1)``
where ``d_min(e)`` is the smallest degree among its vertices, and a kept edge
is reweighted by ``1 / p_e`` so that the expected sparsifier equals the input.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .hypercore import Hypergraph, HypergraphError, Sparsifier, edge_energies
from .rng import uniforms

log = logging.getLogger(__name__)

#: Default multiplier of ``log2(n)^2 / (eps^4 phi^2 r)``.
DEFAULT_LAMBDA_C = 1.0


@dataclass(frozen=True)
class ExpanderSparsifyConfig:
    epsilon: float
    phi: float
    n_ref: int | None = None
    lambda_c: float = DEFAULT_LAMBDA_C
    seed: int = 0
    strip_self_loops: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.5:
            raise HypergraphError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if not self.phi > 0:
            raise HypergraphError(f"phi must be positive, got {self.phi}")
        if not self.lambda_c > 0:
            raise HypergraphError(f"lambda_c must be positive, got {self.lambda_c}")
        if self.n_ref is not None and self.n_ref < 1:
            raise HypergraphError("n_ref must be at least 1")


def effective_phi(h: Hypergraph, phi: float) -> float:
    """``phi`` clamped to ``2/r``, the range where the Cheeger bound applies."""
    r = max(h.rank, 1)
    cap = 2.0 / r
    if phi > cap:
        log.info("phi=%.6g exceeds 2/r=%.6g for r=%d; clamping", phi, cap, r)
        return cap
    return phi


def _n_ref(h: Hypergraph, cfg: ExpanderSparsifyConfig) -> int:
    return cfg.n_ref if cfg.n_ref is not None else h.n


def lambda_for_size(r: int | np.ndarray, cfg: ExpanderSparsifyConfig, n_ref: int, phi: float):
    lg = math.log2(max(n_ref, 2))
    return cfg.lambda_c * lg * lg / (cfg.epsilon**4 * phi * phi * np.asarray(r, dtype=float))


def min_degrees(h: Hypergraph) -> np.ndarray:
    """Smallest vertex degree within each edge."""
    if h.m == 0:
        return np.zeros(0)
    return h.degrees[h.padded].min(axis=1)


def sampling_rates(h: Hypergraph, cfg: ExpanderSparsifyConfig) -> np.ndarray:
    phi = effective_phi(h, cfg.phi)
    dmin = min_degrees(h)
    if np.any(dmin <= 0):
        raise HypergraphError("an edge has a vertex of zero degree; degrees are inconsistent")
    lam = lambda_for_size(h.sizes, cfg, _n_ref(h, cfg), phi)
    return np.minimum(lam / dmin, 1.0)


def sampling_rate(h: Hypergraph, e: int, cfg: ExpanderSparsifyConfig) -> float:
    if not 0 <= e < h.m:
        raise HypergraphError(f"edge index {e} out of range")
    phi = effective_phi(h, cfg.phi)
    dmin = float(h.degrees[list(h.edges[e])].min())
    if dmin <= 0:
        raise HypergraphError(f"edge {e} has a vertex of zero degree")
    lam = float(lambda_for_size(len(h.edges[e]), cfg, _n_ref(h, cfg), phi))
    return min(lam / dmin, 1.0)


def expander_sparsify(h: Hypergraph, cfg: ExpanderSparsifyConfig) -> Sparsifier:
    if h.m == 0:
        return Sparsifier(h, [])
    p = sampling_rates(h, cfg)
    keep = uniforms(cfg.seed, h.m) < p
    if cfg.strip_self_loops:
        keep &= ~h.self_loop_mask
    idx = np.flatnonzero(keep)
    return Sparsifier(h, zip(idx.tolist(), (h.weights[idx] / p[idx]).tolist()))


# -- analysis surface ---------------------------------------------------------


def center_normalize(h: Hypergraph, x) -> np.ndarray:
    """Shift and scale ``x`` so that sum x_v d(v) = 0 and sum x_v^2 d(v) = 1."""
    x = np.asarray(x, dtype=float)
    d = h.degrees
    vol = d.sum()
    if vol <= 0:
        raise HypergraphError("hypergraph has zero volume")
    y = x - (x @ d) / vol
    nrm = (y * y) @ d
    if nrm <= 0:
        raise HypergraphError("vector is constant on the support of the degree measure")
    return y / math.sqrt(nrm)


@dataclass
class StressPartition:
    """Energy scale categories of the edges for one vector.

    ``category[e]`` is ``i`` in ``1..i_star`` for the scale sets and ``0`` for
    the residual set; ``rounded[i]`` is the rounded vector for scale ``i``.
    """

    i_star: int
    category: np.ndarray
    rounded: dict[int, np.ndarray] = field(default_factory=dict)
    scale: np.ndarray | None = None

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.category == i)


def stress_vectors(
    h: Hypergraph,
    x,
    i_max: int | None = None,
    epsilon: float = 0.5,
    n_ref: int | None = None,
    tol: float = 1e-9,
) -> StressPartition:
    """Split edges by ``max x_v^2 * min d(v)`` into dyadic bands and round ``x`` per band."""
    x = np.asarray(x, dtype=float)
    if x.shape != (h.n,):
        raise HypergraphError(f"vector has shape {x.shape}, expected ({h.n},)")
    d = h.degrees
    if abs(x @ d) > tol * max(1.0, d.sum()) or abs((x * x) @ d - 1.0) > tol:
        raise HypergraphError("x must satisfy sum x_v d(v) = 0 and sum x_v^2 d(v) = 1")
    n = n_ref if n_ref is not None else h.n
    i_star = i_max if i_max is not None else math.ceil(2 * math.log2(max(n, 2)))
    if h.m:
        xm = (x * x)[h.padded].max(axis=1)
        scale = xm * min_degrees(h)
    else:
        scale = np.zeros(0)
    cat = np.zeros(h.m, dtype=np.int64)
    pos = scale > 2.0 ** (-i_star)
    # scale in (2^-i, 2^-i+1]  <=>  i = ceil(-log2 scale), with scale <= 1 up to rounding
    with np.errstate(divide="ignore"):
        ii = np.ceil(-np.log2(np.where(pos, scale, 1.0))).astype(np.int64)
    ii = np.maximum(ii, 1)
    # fix floating boundary cases so the interval test holds exactly
    for e in np.flatnonzero(pos):
        i = int(ii[e])
        while i > 1 and scale[e] > 2.0 ** (-i + 1):
            i -= 1
        while scale[e] <= 2.0 ** (-i):
            i += 1
        ii[e] = i
    cat[pos] = np.minimum(ii[pos], i_star)
    rounded = {}
    sq = np.sqrt(np.where(d > 0, d, 1.0))
    grid = 1.0 / (n * n * sq)
    for i in range(1, i_star + 1):
        xi = np.round(x / grid) * grid
        small = (x * x) * d < epsilon**2 * 2.0 ** (-i) / 2500.0
        xi[small] = 0.0
        rounded[i] = xi
    return StressPartition(i_star=i_star, category=cat, rounded=rounded, scale=scale)


def claim0_bound(h: Hypergraph, x, part: StressPartition, epsilon: float, n_ref: int | None = None):
    """Per-edge check (|dQ| <= eps/10 Q + 20/(n^2 d_min)) on every scale set.

    Returns the per-edge slack (bound minus observed gap); negative entries
    are violations.  Residual-set edges get ``inf``.
    """
    n = n_ref if n_ref is not None else h.n
    q = edge_energies(h, x)
    dmin = min_degrees(h)
    slack = np.full(h.m, np.inf)
    for i, xi in part.rounded.items():
        idx = part.members(i)
        if idx.size == 0:
            continue
        qi = edge_energies(h, xi)[idx]
        bound = epsilon / 10 * q[idx] + 20.0 / (n * n * dmin[idx])
        slack[idx] = bound - np.abs(qi - q[idx])
    return slack


def additive_error_bound(q_edge: np.ndarray, delta: float) -> np.ndarray:
    """``4 delta (sqrt(Q_e) + delta)``: per-edge energy change under a delta perturbation."""
    return 4.0 * delta * (np.sqrt(q_edge) + delta)


def expected_size(h: Hypergraph, cfg: ExpanderSparsifyConfig) -> float:
    return float(sampling_rates(h, cfg).sum())


def with_seed(cfg: ExpanderSparsifyConfig, seed: int) -> ExpanderSparsifyConfig:
    return replace(cfg, seed=seed)
