import dataclasses
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exdec.decomp import CertRecord, ComponentInfo, strong_decomposition
from exdec.errors import SizeGuardError
from exdec.graph import Graph, conductance
from exdec.oracle import (acyclicity_check, find_cycle, min_conductance, near_expansion,
                          validate_decomposition, verify_expander)

from conftest import bidirected_clique, random_dag, two_cliques
from test_graph import graphs


def brute_min_conductance(G, d):
    best = None
    for r in range(1, G.n):
        for S in combinations(range(G.n), r):
            try:
                val = conductance(G, d, S)
            except ZeroDivisionError:
                continue
            if best is None or val < best:
                best = val
    return best


@given(graphs(max_n=7), st.data())
def test_min_conductance_matches_loop(G, data):
    d = data.draw(st.lists(st.integers(0, 5), min_size=G.n, max_size=G.n))
    val, S = min_conductance(G, d)
    assert val == brute_min_conductance(G, d)
    if S is not None:
        assert conductance(G, d, S) == val


@given(graphs(max_n=7), st.data())
def test_near_expansion_matches_loop(G, data):
    A = sorted(data.draw(st.sets(st.integers(0, G.n - 1), min_size=2)))
    d = [1] * G.n
    best = None
    for r in range(1, len(A)):
        for S in combinations(A, r):
            S = set(S)
            out = sum(c for u, v, c in G.edges if u in S and v not in S)
            inc = sum(c for u, v, c in G.edges if v in S and u not in S)
            val = Fraction(min(out, inc), min(len(S), len(A) - len(S)))
            best = val if best is None else min(best, val)
    assert near_expansion(G, A, d) == best


def test_clique_conductance_closed_form():
    # bidirected K_n with unit caps and degree weights: min at |S| = n/2
    for n in (4, 6):
        G = bidirected_clique(n)
        deg = [2 * (n - 1)] * n
        k = n // 2
        assert min_conductance(G, deg)[0] == Fraction(k * (n - k), k * 2 * (n - 1))
        assert verify_expander(G, deg, Fraction(1, 4))


def test_enumeration_size_guard():
    with pytest.raises(SizeGuardError):
        min_conductance(bidirected_clique(17), [1] * 17)


@pytest.mark.parametrize("seed", range(10))
def test_find_cycle(seed):
    G = random_dag(seed, 9, 0.4)
    arcs = [(j, u, v) for j, (u, v, _) in enumerate(G.edges)]
    assert find_cycle(G.n, arcs) is None
    if not arcs:
        return
    j, u, v = arcs[random.Random(seed).randrange(len(arcs))]
    arcs.append((len(arcs), v, u))
    cyc = find_cycle(G.n, arcs)
    assert cyc is not None
    by_id = {a[0]: a for a in arcs}
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert by_id[a][2] == by_id[b][1]


def test_acyclicity_check_on_two_cycle():
    G = Graph(2, [(0, 1, 1), (1, 0, 1)])
    assert acyclicity_check(G, [0])
    assert not acyclicity_check(G, [0, 1])


@pytest.fixture(scope="module")
def split_cliques():
    G = two_cliques(6)
    return G, strong_decomposition(G, Fraction(1, 20), seed=1, c_T=1)


def test_valid_result_passes(split_cliques):
    G, res = split_cliques
    rep = validate_decomposition(G, res)
    assert rep.ok, rep.lines()


def test_partition_violations(split_cliques):
    G, res = split_cliques
    dup = dataclasses.replace(res, components=[res.components[0] + (res.components[1][0],)] + res.components[1:])
    rep = validate_decomposition(G, dup)
    assert not rep.ok and rep.failures()[0].name == "partition"
    # the duplicated vertex also falls outside the first component's scope
    assert "inside its recorded scope" in rep.failures()[-1].detail
    gone = dataclasses.replace(res, components=res.components[1:], component_info=res.component_info[1:])
    assert [c.name for c in validate_decomposition(G, gone).failures()] == ["partition"]


def test_cycle_witness(split_cliques):
    G, res = split_cliques
    both = sorted(set(res.excluded_edges) | {G.m - 2, G.m - 1})
    rep = validate_decomposition(G, dataclasses.replace(res, excluded_edges=both))
    (fail,) = rep.failures()
    assert fail.name == "acyclic" and sorted(fail.witness) == [G.m - 2, G.m - 1]
    assert "0 -> 6 -> 0" in fail.detail or "6 -> 0 -> 6" in fail.detail


def test_tampered_certificate(split_cliques):
    G, res = split_cliques
    c = res.certificates[0]
    lie = CertRecord(c.kind, c.scope, c.S, c.host, c.value, c.value / 2 if c.value else Fraction(-1))
    rep = validate_decomposition(G, dataclasses.replace(res, certificates=[lie]))
    assert [f.name for f in rep.failures()] == ["certificates"]
    wrong = CertRecord(c.kind, c.scope, c.S, c.host, c.value + 1, c.bound + 1)
    assert not validate_decomposition(G, dataclasses.replace(res, certificates=[wrong])).ok


def test_overclaimed_component(split_cliques):
    G, res = split_cliques
    info = [ComponentInfo(i.kind, i.scope, Fraction(1)) if i.phi_cert else i for i in res.component_info]
    rep = validate_decomposition(G, dataclasses.replace(res, component_info=info))
    (fail,) = rep.failures()
    assert fail.name == "components" and "has conductance" in fail.detail


def test_inter_capacity_bound(split_cliques):
    G, res = split_cliques
    assert validate_decomposition(G, res, bounds={"inter_capacity": 1}).ok
    rep = validate_decomposition(G, res, bounds={"inter_capacity": 0})
    assert [f.name for f in rep.failures()] == ["inter_capacity"]


def test_bad_scope_index_is_a_failed_replay(split_cliques):
    G, res = split_cliques
    c = res.certificates[0]
    moved = CertRecord(c.kind, 99, c.S, c.host, c.value, c.bound)
    rep = validate_decomposition(G, dataclasses.replace(res, certificates=[moved]))
    assert [f.name for f in rep.failures()] == ["certificates"]
