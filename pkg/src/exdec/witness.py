"""Expansion witnesses assembled from cut-matching rounds.

Each routed path of each round becomes a witness edge (sender, receiver,
amount).  The path itself is never stored: it is recovered on demand by
replaying the round's path-decomposition transcript, which is how
:func:`crossing_sources` finds the paths that cross a boundary.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import Graph, as_weighting
from .linkcut import TranscriptLog, replay_crossings


@dataclass
class RoutedBatch:
    """One flow problem of one round: a decomposition on a host subgraph.

    ``host`` is an induced subgraph whose ``origin``/``edge_origin`` map into
    the graph the witness lives on.  ``amounts`` are integers in units of
    ``1/unit``.
    """

    round: int
    host: Graph
    transcript: TranscriptLog
    endpoints: list  # (sender, receiver) in witness-graph ids, one per emitted path
    amounts: list
    unit: int
    flow: list  # per host edge, integer units
    edges: list = field(default_factory=list)  # optional explicit edge lists (host ids)


@dataclass
class Witness:
    n: int
    batches: list
    phi: Fraction
    rounds: int = 0

    def edges(self):
        """Witness edges (sender, receiver, capacity) in emission order."""
        out = []
        for b in self.batches:
            for (s, r), a in zip(b.endpoints, b.amounts):
                if s != r:
                    out.append((s, r, Fraction(a, b.unit)))
        return out

    def degrees(self):
        """(out-degree, in-degree) per vertex."""
        outd = [Fraction(0)] * self.n
        ind = [Fraction(0)] * self.n
        for s, r, c in self.edges():
            outd[s] += c
            ind[r] += c
        return outd, ind

    def total_degrees(self):
        outd, ind = self.degrees()
        return [a + b for a, b in zip(outd, ind)]

    def edge_loads(self, G: Graph):
        """Per-round and total loads on the edges of ``G`` (real units)."""
        per_round = defaultdict(lambda: [Fraction(0)] * G.m)
        for b in self.batches:
            load = per_round[b.round]
            for j, f in enumerate(b.flow):
                if f:
                    load[b.host.edge_origin[j]] += Fraction(f, b.unit)
        total = [Fraction(0)] * G.m
        for load in per_round.values():
            for j, x in enumerate(load):
                total[j] += x
        return dict(per_round), total


def build_witness(batches: Iterable[RoutedBatch], n: int, phi, rounds: int | None = None) -> Witness:
    batches = list(batches)
    if rounds is None:
        rounds = len({b.round for b in batches})
    return Witness(n, batches, Fraction(phi), rounds)


def crossing_sources(w: Witness, boundary: Iterable[int], restrict_to: Iterable[int], factor=100):
    """Source to add per vertex: ``factor``·capacity for each crossing witness edge endpoint in ``restrict_to``.

    ``boundary`` holds edge ids of the witness graph.  Paths are found by
    replaying every batch's transcript with those edges tagged.
    """
    boundary = set(boundary)
    inside = set(restrict_to)
    out = defaultdict(Fraction)
    if not boundary:
        return {}
    for b in w.batches:
        tagged = {j for j, g in enumerate(b.host.edge_origin) if g in boundary}
        if not tagged:
            continue
        emitted = replay_crossings(b.transcript, tagged)
        for (_, _, crosses), (ws, wr), a in zip(emitted, b.endpoints, b.amounts):
            if not crosses or ws == wr:
                continue
            c = Fraction(a, b.unit) * factor
            if ws in inside:
                out[ws] += c
            if wr in inside:
                out[wr] += c
    return dict(out)


def crossing_sources_explicit(w: Witness, boundary: Iterable[int], restrict_to: Iterable[int], factor=100):
    """Same answer from stored explicit edge lists; test oracle."""
    boundary = set(boundary)
    inside = set(restrict_to)
    out = defaultdict(Fraction)
    for b in w.batches:
        for (ws, wr), a, edges in zip(b.endpoints, b.amounts, b.edges):
            if ws == wr:
                continue
            if any(b.host.edge_origin[j] in boundary for j in edges):
                c = Fraction(a, b.unit) * factor
                if ws in inside:
                    out[ws] += c
                if wr in inside:
                    out[wr] += c
    return dict(out)


@dataclass
class WitnessReport:
    congestion: Fraction
    congestion_ok: bool
    expansion: Fraction | None
    expansion_ok: bool | None

    @property
    def ok(self):
        return self.congestion_ok and self.expansion_ok is not False


def witness_graph(w: Witness) -> Graph:
    """Witness edges as a graph with capacities scaled to integers."""
    edges = w.edges()
    den = 1
    for _, _, c in edges:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [(s, r, int(c * den)) for s, r, c in edges if c > 0]
    return Graph(w.n, ints), den


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def verify_witness(w: Witness, G: Graph, A, d, psi_target, per_round_limit=None) -> WitnessReport:
    """Check embedding congestion and, for small A, near-expansion of A in W.

    Congestion is the worst per-round load ratio.  A round solves two flow
    problems (L into R and R into L), each within c/φ, so the default limit
    is 2/φ.  Near-expansion is checked by enumerating cuts of A in the witness
    graph.
    """
    from .oracle import near_expansion  # local import: oracle depends on graph only

    per_round, _ = w.edge_loads(G)
    worst = Fraction(0)
    for load in per_round.values():
        for j, x in enumerate(load):
            worst = max(worst, x / G.edges[j][2])
    limit = 2 / w.phi if per_round_limit is None else per_round_limit
    A = sorted(set(A))
    expansion = ok = None
    if len(A) >= 2:
        WG, den = witness_graph(w)
        dd = as_weighting(d)
        raw = near_expansion(WG, A, dd)
        if raw is not None:
            expansion = raw / den
            ok = expansion >= Fraction(psi_target)
    return WitnessReport(worst, worst <= limit, expansion, ok)
