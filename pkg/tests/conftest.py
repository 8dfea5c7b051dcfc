import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hypersparse.hypercore import DirectedHypergraph, Hypergraph

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@st.composite
def hypergraphs(draw, n_min=2, n_max=8, m_max=12, r_max=4, weighted=None, multiset=True):
    n = draw(st.integers(n_min, n_max))
    m = draw(st.integers(1, m_max))
    edges = []
    for _ in range(m):
        k = draw(st.integers(1 if multiset else 2, r_max))
        if multiset:
            edges.append(draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k)))
        else:
            k = min(k, n)
            edges.append(draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True)))
    w = weighted if weighted is not None else draw(st.booleans())
    weights = draw(st.lists(st.floats(0.25, 4.0), min_size=m, max_size=m)) if w else None
    return Hypergraph(n, edges, weights)


@st.composite
def vectors(draw, n):
    return np.array(draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n)))


@st.composite
def directed_hypergraphs(draw, n_min=3, n_max=7, m_max=10):
    n = draw(st.integers(n_min, n_max))
    m = draw(st.integers(1, m_max))
    arcs, seen = [], set()
    for _ in range(m):
        vs = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=min(4, n), unique=True))
        cut = draw(st.integers(1, len(vs) - 1))
        t, h = tuple(sorted(vs[:cut])), tuple(sorted(vs[cut:]))
        if (t, h) not in seen:
            seen.add((t, h))
            arcs.append((t, h))
    return DirectedHypergraph(n, arcs)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
