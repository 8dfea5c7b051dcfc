"""One test per acceptance criterion, each with its runtime budget.

Every test records a single PASS/FAIL line, listed in the terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hypersparse.calibration import C_CAL, K, LAMBDA_C, P_C, cheeger_family, cut_ratio_family, directed_family
from hypersparse.decomposition import DecompositionConfig, expander_decomposition
from hypersparse.directed import DirectedConfig, directed_sparsify, overlap_brute_all, overlap_peel
from hypersparse.generators import bipartite_clique, random_directed, random_mixed, random_uniform, random_weighted
from hypersparse.hypercore import (
    DegenerateCutError,
    Hypergraph,
    VertexPartition,
    contract,
    edge_energies,
    energy,
    indicator,
)
from hypersparse.lowerbound import (
    audit_scs,
    classify,
    encode,
    expected_z,
    gen_rs_greedy,
    random_string,
    realized_z,
)
from hypersparse.oracle import all_masks, brute_phi, brute_sparsest_cut, cheeger_check, evaluate_sparsifier, sweep_graph
from hypersparse.pipeline import PipelineConfig, run_report, sparsify, structure_checks
from hypersparse.rng import child_seed
from hypersparse.sparsest_cut import sparse_cut

pytestmark = pytest.mark.acceptance


class Criterion:
    def __init__(self, number: int, budget: float):
        self.number, self.budget = number, budget
        self.notes: list[str] = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None and dt < self.budget
        detail = "; ".join(self.notes)
        if exc_type is not None:
            detail = (detail + "; " if detail else "") + f"{exc_type.__name__}: {exc}"
        line = f"criterion {self.number}: {'PASS' if ok else 'FAIL'} ({dt:.1f}s of {self.budget:.0f}s) {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        if exc_type is None:
            assert dt < self.budget, f"criterion {self.number} took {dt:.1f}s, budget {self.budget}s"
        return False


def _instance(rng, n_max=10, m_max=20):
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    seed = int(rng.integers(1 << 30))
    kind = int(rng.integers(3))
    if kind == 0:
        return random_mixed(n, m, 4, seed=seed)
    if kind == 1:
        return random_weighted(n, m, int(rng.integers(2, min(n, 4) + 1)), seed=seed)
    return random_uniform(n, m, int(rng.integers(2, min(n, 4) + 1)), seed=seed, multiset=True)


def test_criterion_1_exact_identities():
    with Criterion(1, 10) as c:
        rng = np.random.default_rng(1)
        for _ in range(50):
            h = _instance(rng)
            w = h.weights
            for s_bits in itertools.product((0, 1), repeat=h.n):
                s = [v for v, b in enumerate(s_bits) if b]
                q = edge_energies(h, indicator(h.n, s))
                crossing = np.array([any(v in s for v in e) and any(v not in s for v in e) for e in h.edges])
                assert np.array_equal(q, np.where(crossing, w, 0.0))
        for _ in range(200):
            h = _instance(rng)
            x = rng.standard_normal(h.n)
            g = sweep_graph(h, x)
            assert np.array_equal(edge_energies(g, x), edge_energies(h, x))
            assert energy(g, x) == energy(h, x)
        for _ in range(200):
            h = _instance(rng)
            p = VertexPartition(h.n)
            for _ in range(int(rng.integers(0, h.n))):
                p.union(int(rng.integers(h.n)), int(rng.integers(h.n)))
            g, lab = contract(h, p)
            xc = rng.standard_normal(g.n)
            x = xc[lab]
            assert np.array_equal(edge_energies(g, xc), edge_energies(h, x))
            assert energy(g, xc) == energy(h, x)
        c.notes.append("50 cut tables, 200 sweep graphs, 200 contractions, all exact")


def test_criterion_2_sum_min_degree():
    with Criterion(2, 5) as c:
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(500):
            n = int(rng.integers(2, 30))
            m = int(rng.integers(1, 4 * n))
            h = random_mixed(n, m, 5, seed=int(rng.integers(1 << 30)))
            total = float((1.0 / h.degrees[h.padded].min(axis=1)).sum())
            worst = max(worst, total / h.n)
            assert total <= h.n + 1e-9
        c.notes.append(f"max ratio to |V|: {worst:.3f}")


def test_criterion_3_overlap():
    with Criterion(3, 60) as c:
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(500):
            n = int(rng.integers(3, 12))
            d = random_directed(n, int(rng.integers(1, 3 * n)), 4, seed=int(rng.integers(1 << 30)))
            total = overlap_peel(d).inverse_sum()
            worst = max(worst, total / d.n**2)
            assert total <= d.n**2
        mismatches = 0
        for _ in range(200):
            n = int(rng.integers(3, 7))
            d = random_directed(n, int(rng.integers(1, 11)), 4, seed=int(rng.integers(1 << 30)))
            mismatches += overlap_peel(d).k != overlap_brute_all(d)
        c.notes.append(f"max ratio to n^2: {worst:.3f}; {mismatches} peel/brute mismatches")
        assert mismatches == 0


def test_criterion_4_cheeger():
    with Criterion(4, 120) as c:
        rng = np.random.default_rng(4)
        fails, worst = 0, math.inf
        for s in range(200):
            h = cheeger_family(s, n_max=12)
            x = rng.standard_normal(h.n)
            rep = cheeger_check(h, x)
            fails += not rep.passed
            if rep.rhs > 0:
                worst = min(worst, rep.lhs / rep.rhs)
        c.notes.append(f"{fails} violations; min lhs/rhs {worst:.2f}")
        assert fails == 0


def test_criterion_5_decomposition():
    with Criterion(5, 300) as c:
        bad = 0
        for s in range(100):
            h = cheeger_family(s, n_max=16)
            dec = expander_decomposition(h, DecompositionConfig(K=K, seed=s))
            v = dec.violations(h)
            assert len(dec.removed) <= h.m / 2
            for cl, es in zip(dec.clusters, dec.retained):
                deg = {u: 0 for u in cl}
                for e in es:
                    for u in h.edges[e]:
                        deg[u] += 1
                assert min(deg.values()) >= h.m / (4 * h.n) - 1e-12
                assert dec.certificates[dec.clusters.index(cl)].level in ("brute", "trivial")
            bad += bool(v)
        c.notes.append(f"K={K}: {bad} runs with violations")
        assert bad == 0


def test_criterion_6_sparsest_cut():
    with Criterion(6, 600) as c:
        worst, lp_gap = 0.0, -math.inf
        for s in range(100):
            h = cut_ratio_family(s, n_max=14)
            try:
                _, best = brute_sparsest_cut(h)
                phi = brute_phi(h)
            except DegenerateCutError:
                continue
            res = sparse_cut(h, seed=s)
            if best > 0:
                worst = max(worst, res.expansion / (best * math.log(h.n)))
            else:
                assert res.expansion == 0
            if res.lp_objective is not None:
                # the LP normalizes over ordered pairs, so a cut metric scores phi / 2
                lp_gap = max(lp_gap, res.lp_objective - phi / 2)
        c.notes.append(f"max Phi(S)/(Phi(G) ln n) = {worst:.3f} (C_cal = {C_CAL}); max LP - phi/2 = {lp_gap:.2e}")
        assert C_CAL <= 4 and worst <= C_CAL and lp_gap <= 1e-6


def test_criterion_7_undirected_end_to_end():
    with Criterion(7, 600) as c:
        passing, sizes = 0, []
        for s in range(100):
            h = random_uniform(12, 80, 3, seed=s)
            run = sparsify(h, PipelineConfig(epsilon=0.5, seed=s, lambda_c=LAMBDA_C))
            assert all(structure_checks(run).values())
            rep = evaluate_sparsifier(h, run.sparsifier, 0.5, all_cuts=True, samples=1000, seed=s)
            assert rep.cut_queries == 4096 and rep.vector_queries == 1000
            passing += rep.violations == 0
            sizes.append(run.sparsifier.size)
            assert run.sparsifier.size <= h.m
        dense = []
        for s in range(5):
            h = random_uniform(12, 200, 3, seed=1000 + s)
            dense.append(sparsify(h, PipelineConfig(epsilon=0.5, seed=s, lambda_c=LAMBDA_C)).sparsifier.size)
        c.notes.append(f"{passing}/100 seeds clean, mean size {np.mean(sizes):.1f} of 80; dense sizes {dense} of 200")
        assert passing >= 95 and all(z < 200 for z in dense)


def test_criterion_8_directed_end_to_end():
    with Criterion(8, 600) as c:
        d = bipartite_clique(10)
        masks = all_masks(d.n)
        tm = np.array([sum(1 << v for v in t) for t in d.tails])
        hm = np.array([sum(1 << v for v in hd) for hd in d.heads])
        # arc crosses S when some tail is in S and some head is outside
        cross = ((masks[:, None] & tm[None, :]) != 0) & ((~masks[:, None] & hm[None, :]) != 0)
        unique = cross[cross.sum(axis=1) == 1]
        witnessed = set(np.flatnonzero(unique.any(axis=0)).tolist())
        assert witnessed == set(range(d.m))
        run = directed_sparsify(d, DirectedConfig(p_c=P_C))
        assert run.sparsifier.indices == list(range(d.m))
        assert evaluate_sparsifier(d, run.sparsifier, 0.5).violations == 0
        fam = {}
        for kind in ("random", "block", "sparse-block"):
            ok = 0
            for s in range(100):
                g = directed_family(s, kind)
                sp = directed_sparsify(g, DirectedConfig(p_c=P_C, seed=s)).sparsifier
                ok += evaluate_sparsifier(g, sp, 0.5).violations == 0
            fam[kind] = ok
        c.notes.append(f"bipartite clique intact; clean seeds per family {fam}")
        assert all(v >= 95 for v in fam.values())


def test_criterion_9_lower_bound():
    with Criterion(9, 300) as c:
        g = gen_rs_greedy(24, 20, 3, seed=0)
        assert g.degrees.min() >= 3
        ell = 2 * g.t * g.a
        rng = np.random.default_rng(9)
        for trial in range(10_000):
            inst = encode(g, random_string(ell, trial)) if trial % 20 == 0 else inst
            j = int(rng.integers(g.t))
            idx = np.flatnonzero(inst.matching_of == j)
            qj = [int(i) for i in idx if rng.random() < 0.5]
            cl = classify(inst, j, qj)
            assert cl.cat1_crossing == cl.target
        rep = audit_scs(g, trials=500, seed=9)
        frac = rep.within_bound / rep.trials
        zs = []
        for j in range(g.t):
            mu = expected_z(encode(g, np.zeros(ell)), j)
            sm = np.array([realized_z(encode(g, random_string(ell, child_seed(j, s))), j) for s in range(300)])
            zs.append(abs(sm.mean() - mu) / max(sm.std(ddof=1) / math.sqrt(sm.size), 1e-12))
        c.notes.append(
            f"10^4 category-1 checks exact; {rep.within_bound}/{rep.trials} within {rep.bound:.0f}; "
            f"max |Z mean - E Z| = {max(zs):.2f} sigma"
        )
        assert frac >= 0.9 and max(zs) <= 3


def test_criterion_10_determinism_and_structure():
    with Criterion(10, 600) as c:
        runs = 0
        for s in range(20):
            h = random_uniform(14, int(40 + 5 * s), 3, seed=s)
            for delay in (None, 1):
                a = sparsify(h, PipelineConfig(seed=s, delay=delay, lambda_c=LAMBDA_C))
                b = sparsify(h, PipelineConfig(seed=s, delay=delay, lambda_c=LAMBDA_C, jobs=4))
                assert a.sparsifier.entries == b.sparsifier.entries
                assert run_report(a) == run_report(b)
                checks = structure_checks(a)
                assert all(checks.values()), checks
                runs += 1
        w = random_weighted(12, 50, 3, seed=7)
        for delay in (None, 1):
            assert all(structure_checks(sparsify(w, PipelineConfig(delay=delay, lambda_c=LAMBDA_C))).values())
            runs += 1
        g = gen_rs_greedy(12, 12, 2, seed=0)
        assert audit_scs(g, 40, seed=1).to_dict() == audit_scs(g, 40, seed=1, jobs=4).to_dict()
        c.notes.append(f"{runs} pipeline runs identical across jobs with all structure checks")
