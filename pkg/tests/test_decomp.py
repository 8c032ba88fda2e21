from fractions import Fraction

import pytest

from exdec.decomp import (DecompositionResult, acyclicity_check, child_seed, load_result,
                          reparameterized_phi, strong_decomposition, weak_decomposition)
from exdec.errors import InputError
from exdec.graph import Graph, regularized_weighting
from exdec.oracle import inter_component_capacity, validate_decomposition

from conftest import random_dag, random_graph, two_cliques


@pytest.fixture(scope="module")
def cliques_result():
    G = two_cliques(6)
    return G, strong_decomposition(G, Fraction(1, 20), seed=1, c_T=1)


def test_two_cliques_split_along_the_bridge(cliques_result):
    G, res = cliques_result
    assert res.components == [tuple(range(6)), tuple(range(6, 12))]
    assert [c.kind for c in res.component_info] == ["certified", "certified"]
    assert res.excluded_edges == [G.m - 2]  # 0 -> 6 goes into E_D, 6 -> 0 stays
    assert inter_component_capacity(G, res.components, res.excluded_edges) == 1
    assert validate_decomposition(G, res).ok


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("mode", ["strong", "weak"])
def test_random_graphs_validate(seed, mode):
    G = random_graph(seed, 10, 0.3)
    phi = Fraction(1, 20)
    if mode == "strong":
        res = strong_decomposition(G, phi, seed=seed, c_T=1)
    else:
        res = weak_decomposition(G, phi=phi, seed=seed, c_T=1)
    rep = validate_decomposition(G, res)
    assert rep.ok, rep.lines()
    assert sorted(v for P in res.components for v in P) == list(range(G.n))


@pytest.mark.parametrize("seed", range(6))
def test_dags_fall_apart_into_singletons(seed):
    G = random_dag(seed, 12, 0.3)
    for res in (strong_decomposition(G, Fraction(1, 20), seed=seed, c_T=1),
                weak_decomposition(G, phi=Fraction(1, 20), seed=seed, c_T=1)):
        assert res.components == [(v,) for v in range(G.n)]
        assert res.excluded_edges == list(range(G.m))
        assert validate_decomposition(G, res).ok


def test_weak_mode_records_its_weighting():
    G = random_graph(3, 9, 0.4)
    d = regularized_weighting(G)
    res = weak_decomposition(G, d, Fraction(1, 20), seed=2, c_T=1)
    assert res.mode == "weak" and res.weighting == d
    assert validate_decomposition(G, res).ok


def test_runs_are_deterministic():
    G = random_graph(7, 10, 0.35)
    a = strong_decomposition(G, Fraction(1, 20), seed=5, c_T=1)
    b = strong_decomposition(G, Fraction(1, 20), seed=5, c_T=1)
    assert a.to_text() == b.to_text() and a.to_json() == b.to_json()
    assert child_seed(5, (0, 1)) == child_seed(5, (0, 1)) != child_seed(5, (1, 0))


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_round_trip(cliques_result, fmt):
    _, res = cliques_result
    doc = res.to_text() if fmt == "text" else res.to_json()
    back = load_result(doc)
    assert back.to_dict() == res.to_dict()
    assert isinstance(back, DecompositionResult)


def test_weak_round_trip_keeps_weighting():
    G = random_graph(1, 8, 0.5)
    res = weak_decomposition(G, phi=Fraction(1, 20), seed=1, c_T=1)
    assert load_result(res.to_text()).weighting == res.weighting


def malformed(text: str, line: int, needle: str):
    with pytest.raises(InputError) as exc:
        load_result(text)
    msg = str(exc.value)
    assert msg.startswith(f"line {line}:") and msg.count("line ") == 1 and needle in msg


def test_malformed_text_names_the_line(cliques_result):
    _, res = cliques_result
    lines = res.to_text().splitlines()
    i = next(k for k, s in enumerate(lines) if s.startswith("excluded_edges"))
    bad = lines[:i] + ["excluded_edges 2 : 60"] + lines[i + 1:]
    malformed("\n".join(bad), i + 1, "excluded_edges")
    j = next(k for k, s in enumerate(lines) if s.startswith("n "))
    bad = lines[:j] + ["n twelve"] + lines[j + 1:]
    malformed("\n".join(bad), j + 1, "")
    k = next(k for k, s in enumerate(lines) if s.startswith("components"))
    bad = lines[:k] + ["components 3"] + lines[k + 1:]
    with pytest.raises(InputError, match="line"):
        load_result("\n".join(bad))
    with pytest.raises(InputError):
        load_result('{"format": "other"}')


def test_acyclicity_check():
    G = two_cliques(3)
    assert acyclicity_check(G, [])
    ids = {(u, v): j for j, (u, v, _) in enumerate(G.edges)}
    assert acyclicity_check(G, [ids[0, 1], ids[1, 2]])
    assert not acyclicity_check(G, [ids[0, 1], ids[1, 0]])


def test_argument_validation():
    G = two_cliques(3)
    with pytest.raises(InputError):
        strong_decomposition(G, Fraction(0))
    with pytest.raises(InputError):
        strong_decomposition(G, Fraction(1, 10), tau=10)
    with pytest.raises(InputError):
        weak_decomposition(G, [1, 2], Fraction(1, 10))


def test_edgeless_graph():
    res = strong_decomposition(Graph(4, []), Fraction(1, 10))
    assert res.components == [(v,) for v in range(4)] and res.excluded_edges == []


def test_reparameterized_phi_shrinks():
    assert 0 < reparameterized_phi(Fraction(1, 2), 64, 4) < Fraction(1, 2)
