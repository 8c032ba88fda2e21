import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exdec.errors import ContractError
from exdec.flow import FlowInstance, exact_max_flow
from exdec.graph import Graph, degrees
from exdec.ppr import ValidState, from_scratch_verdict


def random_state(seed: int, tall: bool = True, max_n: int = 12):
    r = random.Random(seed)
    n = r.randint(3, max_n)
    edges = [(u, v, r.randint(1, 4)) for u in range(n) for v in range(n) if u != v and r.random() < 0.3]
    G = Graph(n, edges, 4)
    deg = degrees(G)
    h = n + 1 if tall else r.randint(1, 4)
    inst = FlowInstance(G, [r.randint(0, 3) for _ in range(n)], [deg[v] + r.randint(0, 2) for v in range(n)],
                        [c * r.randint(1, 2) for _, _, c in edges], h, 1, 1)
    return ValidState(inst, gap=r.random() < 0.5), r


def interleave(st_, r, steps):
    """Random increase_source / remove_vertices sequence; yields after each operation."""
    for _ in range(steps):
        live = st_.active_set()
        if r.random() < 0.7 or len(live) < 2:
            st_.increase_source(r.choice(live), r.randint(1, 8))
        else:
            st_.remove_vertices(r.sample(live, r.randint(1, max(1, len(live) // 3))))
        yield


@pytest.mark.parametrize("seed", range(40))
def test_interleavings_keep_state_valid(seed):
    st_, r = random_state(seed, tall=seed % 2 == 0)
    assert st_.scan() == []
    floor = [min(p, q) for p, q in zip(st_.p, st_.nn)]
    for _ in interleave(st_, r, 10):
        assert st_.scan() == []
        for v in st_.active_set():
            m = min(st_.p[v], st_.nn[v])
            assert m >= floor[v]  # min(p, n) never decreases
            floor[v] = m


@pytest.mark.parametrize("seed", range(40))
def test_tall_state_matches_exact_solve(seed):
    st_, r = random_state(seed)
    for _ in interleave(st_, r, 8):
        pass
    _, cumulative = st_.cumulative_instance()
    exact = exact_max_flow(cumulative).value == sum(cumulative.src)
    assert st_.is_feasible() == from_scratch_verdict(st_) == exact


def test_sink_domination_is_enforced():
    G = Graph(2, [(0, 1, 3)])
    inst = FlowInstance(G, [1, 0], [1, 3], [3], 3, 1, 1)
    with pytest.raises(ContractError):
        ValidState(inst)
    ValidState(inst, check_domination=False)


def test_removed_vertices_reject_sources():
    st_, _ = random_state(1)
    v = st_.active_set()[0]
    st_.remove_vertices([v])
    with pytest.raises(ContractError):
        st_.increase_source(v, 1)
    with pytest.raises(ContractError):
        st_.increase_source(st_.active_set()[0], -1)


def test_feasible_flow_routes_every_source():
    st_, r = random_state(5)
    for _ in interleave(st_, r, 3):
        pass
    status, flow = st_.feasibility()
    if status == "stuck":
        pytest.skip("instance ended infeasible")
    G = st_.G
    net = [0] * G.n
    for j, (u, v, _) in enumerate(G.edges):
        net[u] -= flow[j]
        net[v] += flow[j]
    for v in st_.active_set():
        assert 0 <= st_.src[v] + net[v] <= st_.snk[v]


def test_reset_levels_keeps_validity():
    st_, r = random_state(11)
    for _ in interleave(st_, r, 5):
        pass
    for v in st_.active_set():
        st_.increase_sink(v, 2)
    st_.reset_levels()
    assert st_.scan() == []


@given(st.integers(0, 10_000))
def test_flip_numbers_are_bounded(seed):
    st_, r = random_state(seed, tall=seed % 3 != 0)
    for _ in interleave(st_, r, 10):
        pass
    for v in st_.active_set():
        if st_.snk[v] > 0:
            assert st_.flips[v] <= 4 * st_.nn[v] / st_.snk[v] + 2


@pytest.mark.parametrize("seed", range(40))
def test_settle_clears_stale_sinks(seed):
    # heavy arcs over small sinks: removals strand vertices above level 0
    r = random.Random(seed)
    n = r.randint(4, 10)
    edges = [(u, v, r.randint(1, 4)) for u in range(n) for v in range(n) if u != v and r.random() < 0.35]
    G = Graph(n, edges, 4)
    deg = degrees(G)
    inst = FlowInstance(G, [0] * n, [deg[v] + 1 for v in range(n)], [c * 10 for _, _, c in edges], n + 1, 10, 1)
    s = ValidState(inst)
    for _ in range(12):
        live = s.active_set()
        if r.random() < 0.6 or len(live) < 2:
            s.increase_source(r.choice(live), r.randint(1, 2 * max(deg, default=0) + 1))
        else:
            s.remove_vertices(r.sample(live, 1))
    _, cumulative = s.cumulative_instance()
    assert s.settle() == (exact_max_flow(cumulative).value == sum(cumulative.src))
    assert s.stale_sinks() == [] and s.scan() == []
