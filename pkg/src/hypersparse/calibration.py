"""Desk-scale constants and the harnesses that produced them.

Asymptotic constants are far too conservative at n of about a dozen, so each
one here was chosen by sweeping its harness:

* ``LAMBDA_C``: sampling multiplier in the expander sparsifier.  Demo family
  n=12, m=80, r=3, eps=1/2, 100 seeds, all 4096 cuts plus 1000 vectors.
  1e-9 gave 0 failing seeds with mean size 73; 7e-10 gave 3 and 5e-10 gave 33;
  at 1.4e-9 and above nothing is dropped.
* ``P_C``: multiplier for directed band rates.  Block families on n=10;
  0.015 fails at most 1 of 100 seeds and 0.01 up to 12.  The floor is set by
  the bipartite clique on 10 vertices, which must keep every arc: rate 1 at
  r=2, k=1 needs p_c >= 0.25 / (4 log2 10), about 0.0188.  At 0.02 no
  family fails in 100 seeds and the sparse block family keeps 200 of 452 arcs.
* ``K``: expansion target 1/(K r log2(n)^2) for decomposition clusters.
  Over 100 random 3-uniform instances with n <= 16 every cluster passed the
  brute-force check for K in {1, 2, 4}; 4 is kept.
* ``C_CAL``: ratio cap Phi(S) / Phi(G) <= C_CAL ln n for the LP rounding.
  The largest measured value of Phi(S) / (Phi(G) ln n) over 100 mixed
  instances with n <= 14 was 0.69.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LAMBDA_C = 1e-9
P_C = 0.02
K = 4.0
C_CAL = 1.0

DEMO_N, DEMO_M, DEMO_R, DEMO_EPS = 12, 80, 3, 0.5


@dataclass
class SweepPoint:
    value: float
    failing: int
    trials: int
    mean_size: float
    parent_size: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def lambda_sweep(values, seeds=range(20), n=DEMO_N, m=DEMO_M, r=DEMO_R, eps=DEMO_EPS, vectors=1000):
    from .generators import random_uniform
    from .oracle import evaluate_sparsifier
    from .pipeline import PipelineConfig, sparsify

    out = []
    for lc in values:
        bad, sizes = 0, []
        for s in seeds:
            h = random_uniform(n, m, r, seed=s)
            run = sparsify(h, PipelineConfig(epsilon=eps, seed=s, lambda_c=lc))
            rep = evaluate_sparsifier(h, run.sparsifier, eps, samples=vectors, seed=s)
            bad += rep.violations > 0
            sizes.append(run.sparsifier.size)
        out.append(SweepPoint(lc, bad, len(sizes), float(np.mean(sizes)), m))
    return out


def directed_family(s: int, kind: str = "block"):
    from .generators import block_directed, random_directed

    if kind == "block":
        return block_directed(10, 2, s)
    if kind == "sparse-block":
        return block_directed(10, 1, s, density=0.5)
    return random_directed(10, 60, 4, s)


def p_c_sweep(values, seeds=range(20), kind="block", eps=0.5):
    from .directed import DirectedConfig, directed_sparsify
    from .oracle import evaluate_sparsifier

    out = []
    for pc in values:
        bad, sizes, m = 0, [], 0
        for s in seeds:
            d = directed_family(s, kind)
            run = directed_sparsify(d, DirectedConfig(epsilon=eps, p_c=pc, seed=s))
            bad += evaluate_sparsifier(d, run.sparsifier, eps).violations > 0
            sizes.append(run.sparsifier.size)
            m = d.m
        out.append(SweepPoint(pc, bad, len(sizes), float(np.mean(sizes)), m))
    return out


def k_sweep(values, seeds=range(20), n_max=16):
    """Decompositions with any violated guarantee; sizes are cluster counts and n."""
    from .decomposition import DecompositionConfig, expander_decomposition

    out = []
    for k in values:
        bad, counts, ns = 0, [], []
        for s in seeds:
            h = cheeger_family(s, n_max)
            dec = expander_decomposition(h, DecompositionConfig(K=k, seed=s))
            bad += bool(dec.violations(h))
            counts.append(len(dec.clusters))
            ns.append(h.n)
        out.append(SweepPoint(k, bad, len(counts), float(np.mean(counts)), float(np.mean(ns))))
    return out


def cheeger_family(s: int, n_max: int = 16):
    from .generators import random_uniform

    rng = np.random.default_rng(s)
    n = int(rng.integers(6, n_max + 1))
    m = int(rng.integers(n, 4 * n))
    return random_uniform(n, m, 3, seed=s)


def cut_ratio_family(s: int, n_max: int = 14):
    """Mixed instances for the rounding ratio: random sizes, weights, and planted bridges."""
    from .generators import bridge, random_mixed, random_uniform, random_weighted

    rng = np.random.default_rng(s)
    kind = s % 4
    if kind == 3:
        return bridge(int(rng.integers(4, 8)), 3)
    n = int(rng.integers(5, n_max + 1))
    m = int(rng.integers(n, 3 * n))
    if kind == 0:
        return random_uniform(n, m, 3, seed=s)
    if kind == 1:
        return random_weighted(n, m, int(rng.integers(2, 5)), seed=s)
    return random_mixed(n, m, 4, seed=s)


def cut_ratios(seeds=range(100)) -> list[float]:
    """``Phi(S) / (Phi(G) ln n)`` for the returned cut; instances with Phi(G) = 0 excluded."""
    from .hypercore import DegenerateCutError
    from .oracle import brute_sparsest_cut
    from .sparsest_cut import sparse_cut

    out = []
    for s in seeds:
        h = cut_ratio_family(s)
        try:
            _, phi = brute_sparsest_cut(h)
        except DegenerateCutError:
            continue
        res = sparse_cut(h, seed=s)
        if phi > 0:
            out.append(res.expansion / (phi * math.log(h.n)))
        elif res.expansion > 0:
            out.append(math.inf)
    return out
