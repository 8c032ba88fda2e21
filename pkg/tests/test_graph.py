from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exdec.errors import DegenerateCutError, InputError, ZeroWeightError
from exdec.graph import (CutCertificate, Graph, Weighting, as_weighting, conductance, degrees,
                         format_edge_list, induced_subgraph, parse_edge_list, regularized_weighting,
                         reverse)


@st.composite
def graphs(draw, max_n=8, W=5):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=len(pairs), unique=True))
    caps = draw(st.lists(st.integers(1, W), min_size=len(chosen), max_size=len(chosen)))
    return Graph(n, [(u, v, c) for (u, v), c in zip(chosen, caps)], W)


def test_graph_rejects_bad_edges():
    with pytest.raises(InputError):
        Graph(2, [(0, 0, 1)])
    with pytest.raises(InputError):
        Graph(2, [(0, 2, 1)])
    with pytest.raises(InputError):
        Graph(2, [(0, 1, 5)], W=4)


def test_parse_reports_line_numbers():
    with pytest.raises(InputError) as exc:
        parse_edge_list("0 1 1\n# note\n1 x 2\n")
    assert exc.value.line == 3
    with pytest.raises(InputError) as exc:
        parse_edge_list("p 3 2\n0 1 1\n")
    assert "declares 2" in str(exc.value)
    with pytest.raises(InputError):
        parse_edge_list("p 2 1\n0 2 1\n")


def test_header_allows_isolated_vertices():
    G = parse_edge_list("p 5 1\n0 1 3\n")
    assert G.n == 5 and G.m == 1 and G.W == 3


@given(graphs())
def test_edge_list_round_trip(G):
    H = parse_edge_list(format_edge_list(G))
    # W is re-derived as the largest capacity present
    assert (H.n, H.edges, H.W) == (G.n, G.edges, max(c for _, _, c in G.edges))


@given(graphs())
def test_regularized_weighting_formula(G):
    d = regularized_weighting(G)
    deg = degrees(G)
    total = sum(deg)
    for v in range(G.n):
        udeg = sum(1 for u, w, _ in G.edges if v in (u, w))
        assert d[v] == deg[v] + Fraction(udeg * total, 2 * G.m)
    assert d.total() == 2 * total


def test_regularized_weighting_needs_an_edge():
    with pytest.raises(InputError):
        regularized_weighting(Graph(3, []))


def test_conductance_hand_example():
    # path 0 -> 1 -> 2 plus 2 -> 0, unit weights
    G = Graph(3, [(0, 1, 1), (1, 2, 2), (2, 0, 3)])
    d = [1, 1, 1]
    # S = {0}: out 1, in 3, min side weight 1
    assert conductance(G, d, {0}) == 1
    assert conductance(G, [2, 1, 1], {0}) == Fraction(1, 2)
    with pytest.raises(DegenerateCutError):
        conductance(G, d, set())
    with pytest.raises(ZeroWeightError):
        conductance(G, [0, 1, 1], {0})


@given(graphs(), st.data())
def test_conductance_is_symmetric_and_local(G, data):
    S = data.draw(st.sets(st.integers(0, G.n - 1), min_size=1, max_size=G.n - 1))
    d = [1] * G.n
    rest = set(range(G.n)) - S
    assert conductance(G, d, S) == conductance(G, d, rest)
    # evaluating inside a universe equals evaluating on the induced subgraph
    U = sorted(S | {min(rest)})
    if len(S) < len(U):
        H = induced_subgraph(G, U)
        local = {v: i for i, v in enumerate(U)}
        assert conductance(G, d, S, universe=U) == conductance(H, [1] * H.n, {local[v] for v in S})


@given(graphs())
def test_induced_subgraph_origins_compose(G):
    keep = list(range(0, G.n, 2)) or [0]
    H = induced_subgraph(G, keep)
    H2 = induced_subgraph(H, range(H.n))
    assert H2.origin == tuple(keep)
    for j, (u, v, c) in enumerate(H2.edges):
        gu, gv, gc = G.edges[H2.edge_origin[j]]
        assert (gu, gv, gc) == (keep[u], keep[v], c)


@given(graphs())
def test_reverse_twice_is_identity(G):
    assert reverse(reverse(G)) == G


def test_weighting_common_denominator():
    w = as_weighting([Fraction(1, 2), Fraction(1, 3), 2])
    assert w.den == 6 and list(w.num) == [3, 2, 12]
    assert w.of([0, 1]) == Fraction(5, 6)
    assert w.restrict([2]) == Weighting([12], 6)


def test_certificate_check_catches_lies():
    G = Graph(4, [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 3, 1), (3, 2, 1), (2, 1, 1)])
    host = frozenset(range(4))
    S = frozenset({0, 1})
    value = conductance(G, [1] * 4, S)
    good = CutCertificate(S, host, value, value, "test")
    assert good.check(G, [1] * 4) == []
    assert CutCertificate(S, host, value, value / 2, "test").check(G, [1] * 4)
    assert CutCertificate(S, host, value + 1, value + 1, "test").check(G, [1] * 4)
    assert CutCertificate(host, host, value, value, "test").check(G, [1] * 4)
