from fractions import Fraction

import pytest

from exdec.cutmatch import run_cut_matching
from exdec.errors import SizeGuardError
from exdec.graph import Graph, regularized_weighting
from exdec.trim import CERTIFIED, EARLY, make_config, trim, verify_certified_expander

from conftest import bidirected_clique, clique, edge_flow, random_graph, synthetic_witness, two_batch_instance


def dead_end_instance():
    """K6 core plus a two-vertex dead end {6, 7} whose witness path leaves A via 8."""
    edges = clique(6, 4) + [(0, 6, 1), (6, 7, 1), (7, 8, 1), (8, 1, 1)]
    G = Graph(9, edges, 4)
    w = synthetic_witness(G, [edge_flow(G, {(6, 7), (7, 8), (8, 1)}, 5)])
    return G, w


def test_clique_certifies_immediately(k8):
    d = regularized_weighting(k8)
    out = run_cut_matching(k8, d, Fraction(1, 50), seed=0, c_T=1)
    tr = trim(k8, out.A_star, out.witness, d, Fraction(1, 50), check=True)
    assert tr.tag == CERTIFIED and tr.A_prime == frozenset(range(8)) and tr.cuts == []
    assert tr.rounds == 1 and tr.certified_phi == tr.cfg.certified_phi(1)
    assert verify_certified_expander(k8, tr.A_prime, tr.certified_phi, d)


def test_config_constants():
    G, w = dead_end_instance()
    d = regularized_weighting(G)
    cfg = make_config(G, d, Fraction(1, 10), w)
    assert cfg.cap_scale == 200 * cfg.sigma / Fraction(1, 10)
    assert cfg.sink_step == 10 * cfg.sigma
    assert cfg.h >= 40000
    assert cfg.certified_phi(3) == Fraction(1, 10) / (10 ** 7 * cfg.sigma ** 2 * 3)


def test_dead_end_is_cut_and_certificate_replays():
    G, w = dead_end_instance()
    d = regularized_weighting(G)
    tr = trim(G, range(8), w, d, Fraction(1, 10), c0=Fraction(1, 10 ** 6), check=True)
    assert tr.tag == CERTIFIED
    (cut,) = tr.cuts
    assert cut.cert.S == frozenset({6, 7}) and cut.direction == "out" and cut.batch == 0
    assert cut.cert.check(G, d) == []
    assert tr.A_prime == frozenset(range(6))
    assert verify_certified_expander(G, tr.A_prime, tr.certified_phi, d)


def test_early_termination_threshold():
    G, w = dead_end_instance()
    d = regularized_weighting(G)
    tr = trim(G, range(8), w, d, Fraction(1, 10), check=True)
    assert tr.tag == EARLY and tr.reason == "removed weight reached the threshold"
    assert tr.certified_phi is None


@pytest.mark.parametrize("amt_y,shrink", [(2, 10.0), (5, 4.0), (10, 2.0)])
def test_second_batch_trims_newly_exposed_vertex(amt_y, shrink):
    G, w, A = two_batch_instance(10, amt_y)
    d = regularized_weighting(G)
    tr = trim(G, A, w, d, Fraction(1, 10), c0=Fraction(1, 10 ** 9), check=True)
    assert tr.tag == CERTIFIED
    assert [(sorted(c.cert.S), c.direction, c.batch) for c in tr.cuts] == [([4, 5], "out", 0), ([6], "in", 1)]
    assert [b.round for b in tr.batches] == [0, 1]
    assert tr.batches[1].shrink == shrink
    assert all(c.cert.check(G, d) == [] for c in tr.cuts)
    assert tr.A_prime == frozenset(range(4))
    assert sum(tr.flips["out"].values()) == G.n - 1


def test_batch_limit():
    G, w, A = two_batch_instance()
    d = regularized_weighting(G)
    tr = trim(G, A, w, d, Fraction(1, 10), c0=Fraction(1, 10 ** 9), max_batches=0)
    assert tr.tag == EARLY and tr.reason == "batch limit reached"


@pytest.mark.parametrize("seed", [2, 4, 5, 6, 7, 8])
def test_near_expanders_trim_to_certified_sets(seed):
    G = random_graph(seed, 9, 0.45)
    d = regularized_weighting(G)
    phi = Fraction(1, 20)
    out = run_cut_matching(G, d, phi, seed=seed, c_T=1)
    assert out.near_expander
    tr = trim(G, out.A_star, out.witness, d, phi, out.cuts, check=True)
    assert tr.certified and tr.rounds <= 64
    assert 2 * d.of(tr.A_prime) >= d.of(tr.A)
    assert verify_certified_expander(G, tr.A_prime, tr.certified_phi, d)


def test_singletons_and_size_guard():
    G = bidirected_clique(3)
    d = regularized_weighting(G)
    tr = trim(G, [1], None, d, Fraction(1, 10))
    assert tr.certified and tr.A_prime == frozenset({1})
    with pytest.raises(SizeGuardError):
        verify_certified_expander(bidirected_clique(15), range(15), Fraction(1, 10), [1] * 15)
