import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hypergraphs
from hypersparse.calibration import LAMBDA_C
from hypersparse.generators import bridge, complete_uniform, disjoint_union, random_uniform, random_weighted
from hypersparse.hypercore import Hypergraph, HypergraphError, VertexPartition, contract, energy
from hypersparse.oracle import evaluate_sparsifier
from hypersparse.pipeline import (
    PipelineConfig,
    cluster_census,
    contraction_error_probe,
    default_delay,
    default_level_cap,
    run_report,
    sparsify,
    structure_checks,
)


def test_defaults():
    assert default_delay(16) == 40
    assert default_level_cap(Hypergraph(2, [[0, 1]] * 4)) == 3


def test_config_validation():
    with pytest.raises(HypergraphError):
        PipelineConfig(epsilon=0.6)
    with pytest.raises(HypergraphError):
        PipelineConfig(delay=0)
    with pytest.raises(HypergraphError):
        PipelineConfig(jobs=0)


def test_single_edge_kept():
    run = sparsify(Hypergraph(2, [[0, 1]]))
    assert run.complete and run.sparsifier.entries == [(0, 1.0)] and len(run.levels) == 1


def test_full_rate_is_exact_copy():
    h = random_weighted(8, 20, 3, seed=1)
    run = sparsify(h, PipelineConfig(lambda_c=1e6))
    assert np.allclose(run.sparsifier.weight_vector(), h.weights)
    assert evaluate_sparsifier(h, run.sparsifier, 0.01).violations == 0


def test_bridge_two_levels():
    h = bridge(6, 3)
    run = sparsify(h, PipelineConfig(delay=1))
    assert [(lev.m, lev.n, len(lev.clusters)) for lev in run.levels] == [(41, 12, 2), (1, 2, 1)]
    assert all(structure_checks(run).values())
    # the bridge is handled at the contracted level and keeps its own index
    assert h.m - 1 in run.sparsifier.indices
    assert evaluate_sparsifier(h, run.sparsifier, 0.5).violations == 0


@pytest.mark.xfail(strict=True, reason="desk-scale lambda_c was calibrated on single-level runs; "
                   "a lone contracted bridge gets rate far below 1 and is dropped")
def test_bridge_two_levels_calibrated_quality():
    h = bridge(6, 3)
    run = sparsify(h, PipelineConfig(delay=1, lambda_c=LAMBDA_C))
    assert evaluate_sparsifier(h, run.sparsifier, 0.5).violations == 0


def test_disjoint_union_additive():
    a, b = complete_uniform(5, 3), complete_uniform(4, 2)
    h = disjoint_union(a, b)
    run = sparsify(h, PipelineConfig(lambda_c=1e6))
    x = np.random.default_rng(0).standard_normal(h.n)
    q = energy(run.sparsifier.as_graph(), x)
    assert q == pytest.approx(energy(a, x[:5]) + energy(b, x[5:]))


def test_census():
    run = sparsify(random_uniform(12, 60, 3, seed=2), PipelineConfig(lambda_c=LAMBDA_C))
    c = cluster_census(run)
    assert c["within_bound"] and c["clusters"] >= 1


def test_jobs_determinism():
    h = random_uniform(14, 80, 3, seed=4)
    a = sparsify(h, PipelineConfig(seed=9, delay=1, lambda_c=LAMBDA_C))
    b = sparsify(h, PipelineConfig(seed=9, delay=1, lambda_c=LAMBDA_C, jobs=4))
    assert a.sparsifier.entries == b.sparsifier.entries
    assert run_report(a) == run_report(b)


def test_probe_empty_without_contraction():
    run = sparsify(random_uniform(10, 40, 3, seed=1))
    assert contraction_error_probe(run, np.arange(10.0)) == []


def _two_level():
    return sparsify(bridge(6, 3), PipelineConfig(delay=1, lambda_c=LAMBDA_C))


def test_probe_class_constant_is_exact():
    run = _two_level()
    x = np.array([1.0] * 6 + [-2.0] * 6)
    recs = contraction_error_probe(run, x)
    assert recs and all(r.delta == 0 and r.max_gap == 0 and r.observation_gap == pytest.approx(0) for r in recs)
    assert all(r.contract_compare_ok and r.g0_asymptotic_ok for r in recs)


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_probe_error_shapes(seed):
    run = _two_level()
    x = np.random.default_rng(seed).standard_normal(12)
    for r in contraction_error_probe(run, x):
        assert r.additive_ok and r.case_bound_ok
        assert r.observation_gap == pytest.approx(0.0, abs=1e-9)


def test_contraction_compare_counterexample():
    # a representative outside the edge can raise its energy after contraction
    h = Hypergraph(3, [[0, 1]])
    p = VertexPartition(3)
    p.union(1, 2)
    g, lab = contract(h, p)
    xc = np.zeros(g.n)
    xc[lab[0]], xc[lab[1]] = 0.0, 5.0
    assert energy(g, xc) > energy(h, np.array([0.0, 0.0, 5.0]))


@settings(max_examples=20)
@given(hypergraphs(n_min=2, n_max=9, m_max=20), st.integers(0, 50))
def test_structure_properties(h, seed):
    if h.m == 0:
        return
    run = sparsify(h, PipelineConfig(seed=seed, delay=1, lambda_c=LAMBDA_C))
    checks = structure_checks(run)
    assert all(checks.values()), checks
