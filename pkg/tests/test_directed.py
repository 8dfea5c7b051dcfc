import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import directed_hypergraphs
from hypersparse.calibration import P_C, directed_family
from hypersparse.directed import (
    DirectedConfig,
    band_rate,
    claim_d0_slack,
    clique_energy,
    directed_category_probe,
    directed_sparsify,
    grouped_clique_energy,
    is_k_overlapping,
    maximal_overlapping_set,
    normalize_clique,
    overlap_brute,
    overlap_brute_all,
    overlap_peel,
    uniform_band_sparsify,
)
from hypersparse.generators import bipartite_clique, block_directed, two_scale_overlap
from hypersparse.hypercore import DirectedHypergraph, HypergraphError, directed_energy
from hypersparse.oracle import evaluate_sparsifier


def test_single_arc_overlap_one():
    d = DirectedHypergraph(2, [((0,), (1,))])
    assert overlap_peel(d).k == [1] and overlap_brute(d, 0) == 1


def test_shared_pair_overlap():
    # (0, 2) sits in both arcs, but the second arc also owns (1, 2) alone,
    # so it peels at 1 and takes the whole set below 2
    d = DirectedHypergraph(3, [((0,), (2,)), ((0, 1), (2,))])
    assert overlap_peel(d).k == [1, 1] == overlap_brute_all(d)
    # two copies of the same pair in distinct arcs: both at 2
    d = DirectedHypergraph(3, [((0,), (2,)), ((0, 1), (2,)), ((1,), (2,))])
    assert overlap_peel(d).k == [2, 2, 2] == overlap_brute_all(d)


def test_two_scale_example():
    d = two_scale_overlap()
    ov = overlap_peel(d)
    assert ov.k == [1, 1, 1] + [8] * 21
    run = directed_sparsify(d)
    assert [(b.k, b.top, len(b.arcs)) for b in run.bands] == [(4, 8, 21), (1, 1, 3)]


def test_bipartite_clique_all_overlap_one():
    assert overlap_peel(bipartite_clique(8)).k == [1] * 16


def test_band_rate_formula():
    assert band_rate(16, 2, 8, 0.5, 1.0) == pytest.approx(min(1.0, 4 * 4 / (8 * 0.25)))
    assert band_rate(16, 2, 1000, 0.5, 1.0) == pytest.approx(4 * 4 / (1000 * 0.25))
    with pytest.raises(HypergraphError):
        band_rate(16, 2, 0, 0.5, 1.0)


def test_config_validation():
    with pytest.raises(HypergraphError):
        DirectedConfig(epsilon=0.8)
    with pytest.raises(HypergraphError):
        DirectedConfig(p_c=0)


def test_maximal_overlapping_set():
    d = two_scale_overlap()
    band = maximal_overlapping_set(d, list(range(d.m)), 4)
    assert band == list(range(3, 24)) and is_k_overlapping(d, band, 4)
    assert maximal_overlapping_set(d, list(range(d.m)), 9) == []


def test_max_overlap_drops_after_band_removal():
    d = block_directed(10, 2, seed=0, density=0.5)
    rem = list(range(d.m))
    top = max(overlap_peel(d, rem).k[e] for e in rem)
    k = math.ceil(top / 2)
    band = set(maximal_overlapping_set(d, rem, k))
    rest = [e for e in rem if e not in band]
    assert rest and max(overlap_peel(d, rest).k[e] for e in rest) < k


def test_band_size_statistics():
    d = block_directed(10, 1, seed=0)
    k = 200
    cfg = DirectedConfig(p_c=0.02)
    p = band_rate(d.n, d.rank, k, cfg.epsilon, cfg.p_c)
    assert p < 1
    sizes = np.array([uniform_band_sparsify(d, k, DirectedConfig(p_c=cfg.p_c, seed=s)).size for s in range(300)])
    sigma = math.sqrt(d.m * p * (1 - p))
    assert abs(sizes.mean() - d.m * p) <= 3 * sigma / math.sqrt(300)


def test_seed_determinism():
    d = directed_family(4, "sparse-block")
    a = directed_sparsify(d, DirectedConfig(p_c=P_C, seed=11))
    b = directed_sparsify(d, DirectedConfig(p_c=P_C, seed=11))
    assert a.sparsifier.entries == b.sparsifier.entries


def test_bipartite_clique_intact_at_calibrated_rate():
    d = bipartite_clique(10)
    run = directed_sparsify(d, DirectedConfig(p_c=P_C))
    assert run.sparsifier.size == d.m
    assert evaluate_sparsifier(d, run.sparsifier, 0.5).violations == 0


def test_category_probe_requires_normalized():
    d = two_scale_overlap()
    with pytest.raises(HypergraphError):
        directed_category_probe(d, np.arange(9.0), 1)


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_claim_d0(seed):
    d = two_scale_overlap()
    x = np.random.default_rng(seed).standard_normal(d.n)
    assume(clique_energy(d, x) > 0)  # every tail below its head leaves nothing to normalize
    x = normalize_clique(d, x)
    assert clique_energy(d, x) == pytest.approx(1.0)
    probe = directed_category_probe(d, x, 1)
    assert probe.i_star == math.ceil(3 * math.log2(d.n))
    assert np.all(claim_d0_slack(probe, d.n) >= -1e-12)


@settings(max_examples=60)
@given(directed_hypergraphs(n_max=7, m_max=10))
def test_peel_matches_brute(d):
    assert overlap_peel(d).k == overlap_brute_all(d)


@given(directed_hypergraphs())
def test_inverse_overlap_sum(d):
    assert overlap_peel(d).inverse_sum() <= d.n * d.n


@given(directed_hypergraphs(), st.integers(0, 100))
def test_grouped_energy_identity(d, seed):
    x = np.random.default_rng(seed).standard_normal(d.n)
    assert grouped_clique_energy(d, x) == pytest.approx(directed_energy(d, x))


@settings(max_examples=40)
@given(directed_hypergraphs(), st.integers(0, 100))
def test_bands_partition_arcs(d, seed):
    run = directed_sparsify(d, DirectedConfig(seed=seed, p_c=P_C))
    arcs = sorted(e for b in run.bands for e in b.arcs)
    assert arcs == list(range(d.m))
    assert len(run.bands) <= max(1, math.ceil(d.rank * math.log2(max(d.n, 2)))) + 1
    for b in run.bands:
        assert is_k_overlapping(d, b.arcs, b.k)
