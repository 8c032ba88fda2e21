import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exdec.errors import ContractError, InputError
from exdec.flow import (FlowInstance, check_preflow, decompose_flow, exact_max_flow,
                        extract_sparse_level_cut, push_relabel_bounded)
from exdec.graph import Graph, conductance, degrees
from exdec.oracle import min_cut_value

from conftest import random_graph


@st.composite
def instances(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=len(pairs), unique=True))
    G = Graph(n, [(u, v, draw(st.integers(1, 4))) for u, v in chosen], 4)
    src = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    snk = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    return FlowInstance.build(G, src, snk, scale=1)


def test_build_scales_to_integers():
    G = Graph(2, [(0, 1, 3)])
    inst = FlowInstance.build(G, [Fraction(1, 2), 0], [0, Fraction(1, 3)], scale=Fraction(5, 2))
    assert inst.unit == 6
    assert inst.src == [3, 0] and inst.snk == [0, 2] and inst.cap == [45]
    with pytest.raises(InputError):
        FlowInstance.build(G, [-1, 0], [0, 0])


@given(instances())
def test_exact_max_flow_equals_min_cut(inst):
    assert exact_max_flow(inst).value == min_cut_value(inst)


@given(instances())
def test_push_relabel_with_tall_height_is_exact(inst):
    inst.h = inst.n + 1
    res = push_relabel_bounded(inst, gap=True)
    assert check_preflow(res.state) == []
    assert res.feasible == (exact_max_flow(inst).value == sum(inst.src))


@given(instances(), st.integers(1, 4), st.booleans())
def test_bounded_push_relabel_invariants(inst, h, gap):
    inst.h = h
    res = push_relabel_bounded(inst, gap=gap)
    assert check_preflow(res.state) == []
    if res.feasible:
        assert exact_max_flow(inst).value == sum(inst.src)


@given(instances())
def test_decomposition_reassembles_flow(inst):
    r = exact_max_flow(inst)
    supply = [a - min(a, b) for a, b in zip(r.src_used, r.absorbed)]
    demand = [b - min(a, b) for a, b in zip(r.src_used, r.absorbed)]
    for forest in ("linkcut", "naive"):
        dec = decompose_flow(inst.host, r.flow, supply, demand, forest=forest)
        assert dec.edge_loads(inst.host.m) == r.flow
        sent = [0] * inst.n
        got = [0] * inst.n
        for p in dec.paths:
            sent[p.src] += p.amount
            got[p.dst] += p.amount
        assert sent == supply and got == demand
        assert len(dec.paths) <= inst.host.m + inst.n


def test_decomposition_rejects_nonconservative_flow():
    G = Graph(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(InputError):
        decompose_flow(G, [1, 0], [1, 0, 0], [0, 0, 1])


def test_level_cut_on_stuck_state_is_sparse():
    # dense blob 0..3 with all source, weakly tied to sink-heavy blob 4..7
    edges = [(u, v, 4) for u in range(4) for v in range(4) if u != v]
    edges += [(u, v, 4) for u in range(4, 8) for v in range(4, 8) if u != v]
    edges += [(0, 4, 1), (4, 0, 1)]
    G = Graph(8, edges, 4)
    deg = degrees(G)
    phi = Fraction(1, 20)
    src = [deg[v] if v < 4 else 0 for v in range(8)]
    snk = [0 if v < 4 else deg[v] for v in range(8)]
    inst = FlowInstance.build(G, src, snk, scale=1 / phi, h=400)
    res = push_relabel_bounded(inst, gap=True)
    assert not res.feasible
    lc = extract_sparse_level_cut(res.state, deg, phi)
    assert lc.S in (frozenset(range(4)), frozenset(range(4, 8)))
    assert lc.conductance == conductance(G, deg, lc.S)
    assert lc.conductance <= Fraction(11, 10) * phi
    assert 3 * sum(deg[v] for v in lc.S) <= 2 * sum(deg)


def test_level_cut_refuses_feasible_states():
    G = Graph(2, [(0, 1, 1)])
    res = push_relabel_bounded(FlowInstance.build(G, [1, 0], [0, 1]))
    with pytest.raises(ContractError):
        extract_sparse_level_cut(res.state, [1, 1], Fraction(1, 2))


def test_push_relabel_is_deterministic():
    G = random_graph(3, 9, 0.4)
    inst = FlowInstance.build(G, list(range(9)), list(reversed(range(9))), h=5)
    a, b = push_relabel_bounded(inst, gap=True), push_relabel_bounded(inst, gap=True)
    assert a.state.flow == b.state.flow and a.state.level == b.state.level


def test_exact_max_flow_small_enumeration():
    # every s-t split on a 4-vertex instance, checked against the enumeration oracle
    G = Graph(4, [(0, 1, 2), (1, 3, 1), (0, 2, 1), (2, 3, 2), (1, 2, 1)])
    for s, t in itertools.permutations(range(4), 2):
        src = [3 if v == s else 0 for v in range(4)]
        snk = [3 if v == t else 0 for v in range(4)]
        inst = FlowInstance.build(G, src, snk)
        assert exact_max_flow(inst).value == min_cut_value(inst)


@pytest.mark.parametrize("seed", range(5))
def test_min_cut_side_certifies_value(seed):
    r = random.Random(seed)
    G = random_graph(seed, 7, 0.4)
    src = [r.randint(0, 5) for _ in range(7)]
    snk = [r.randint(0, 5) for _ in range(7)]
    inst = FlowInstance.build(G, src, snk)
    res = exact_max_flow(inst)
    S = res.cut
    cut = sum(c for u, v, c in G.edges if u in S and v not in S)
    value = cut + sum(src[v] for v in range(7) if v not in S) + sum(snk[v] for v in S)
    assert value == res.value
