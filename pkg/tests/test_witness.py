import random
from fractions import Fraction

import pytest

from exdec.cutmatch import run_cut_matching
from exdec.graph import Graph, regularized_weighting
from exdec.witness import (build_witness, crossing_sources, crossing_sources_explicit, verify_witness,
                           witness_graph)

from conftest import edge_flow, random_graph, synthetic_witness


@pytest.fixture(scope="module")
def runs():
    out = []
    for seed in range(6):
        G = random_graph(seed, 9, 0.5)
        d = regularized_weighting(G)
        res = run_cut_matching(G, d, Fraction(1, 20), seed=seed, c_T=1, keep_paths=True)
        if res.near_expander:
            out.append((G, d, res))
    assert out
    return out


def test_replayed_crossings_match_stored_paths(runs):
    for G, _, res in runs:
        r = random.Random(G.m)
        for _ in range(5):
            boundary = {j for j in range(G.m) if r.random() < 0.2}
            inside = {v for v in range(G.n) if r.random() < 0.7}
            assert crossing_sources(res.witness, boundary, inside) == \
                crossing_sources_explicit(res.witness, boundary, inside)


def test_witness_congestion_and_expansion(runs):
    for G, d, res in runs:
        rep = verify_witness(res.witness, G, res.A_star, d, 0)
        assert rep.congestion_ok, rep.congestion
        assert rep.expansion is not None and rep.expansion > 0
        assert rep.ok


def test_witness_graph_scales_capacities():
    G = Graph(3, [(0, 1, 1), (1, 2, 1)])
    w = synthetic_witness(G, [edge_flow(G, {(0, 1), (1, 2)}, 3)])
    WG, den = witness_graph(w)
    assert den == 1 and WG.edges == ((0, 2, 3),)
    assert w.degrees() == ([3, 0, 0], [0, 0, 3])


def test_empty_witness():
    w = build_witness([], 4, Fraction(1, 10))
    assert w.edges() == [] and crossing_sources(w, {0}, range(4)) == {}


def test_clique_witness_loads_are_per_round(k8):
    d = regularized_weighting(k8)
    res = run_cut_matching(k8, d, Fraction(1, 50), seed=0, c_T=1)
    per_round, total = res.witness.edge_loads(k8)
    assert set(per_round) == set(range(1, res.rounds_run + 1))
    assert sum(total) == sum(sum(x) for x in per_round.values())
