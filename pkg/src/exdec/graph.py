"""Directed capacitated graphs, vertex weightings and conductance.

Every quantity that ends up in a sparsity certificate is computed with
integers or :class:`fractions.Fraction`, never floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateCutError, InputError, ZeroWeightError


class Graph:
    """Directed multigraph on vertices ``0..n-1`` with positive integer capacities.

    ``origin[i]`` is the root-graph id of local vertex ``i`` and
    ``edge_origin[j]`` the root-graph id of local edge ``j``; both are the
    identity for graphs built directly and are composed by
    :func:`induced_subgraph`.
    """

    __slots__ = ("n", "edges", "W", "origin", "edge_origin", "out_edges", "in_edges")

    def __init__(self, n: int, edges: Iterable[Sequence[int]], W: int | None = None,
                 origin: Sequence[int] | None = None,
                 edge_origin: Sequence[int] | None = None):
        if n < 0:
            raise InputError("negative vertex count")
        edges = tuple((int(u), int(v), int(c)) for u, v, c in edges)
        if W is None:
            W = max((c for _, _, c in edges), default=1)
        self.n = n
        self.edges = edges
        self.W = W
        self.out_edges: list[list[int]] = [[] for _ in range(n)]
        self.in_edges: list[list[int]] = [[] for _ in range(n)]
        for j, (u, v, c) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge {j} ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InputError(f"edge {j} is a self-loop at {u}")
            if not 1 <= c <= W:
                raise InputError(f"edge {j} capacity {c} outside [1, {W}]")
            self.out_edges[u].append(j)
            self.in_edges[v].append(j)
        self.origin = tuple(range(n)) if origin is None else tuple(origin)
        self.edge_origin = tuple(range(len(edges))) if edge_origin is None else tuple(edge_origin)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, W={self.W})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges and self.W == other.W

    def __hash__(self):
        return hash((self.n, self.edges, self.W))

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n):
            raise InputError(f"unknown vertex id {v!r}")

    def total_capacity(self) -> int:
        return sum(c for _, _, c in self.edges)


def degree_weighted(G: Graph, v: int) -> int:
    G.check_vertex(v)
    caps = G.edges
    return sum(caps[j][2] for j in G.out_edges[v]) + sum(caps[j][2] for j in G.in_edges[v])


def degrees(G: Graph) -> list[int]:
    deg = [0] * G.n
    for u, v, c in G.edges:
        deg[u] += c
        deg[v] += c
    return deg


def unweighted_degrees(G: Graph) -> list[int]:
    deg = [0] * G.n
    for u, v, _ in G.edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def cut_capacity(G: Graph, S: Iterable[int], T: Iterable[int]) -> int:
    S = set(S)
    T = set(T)
    return sum(c for u, v, c in G.edges if u in S and v in T)


def boundary_edges(G: Graph, S: Iterable[int]) -> tuple[list[int], list[int]]:
    """Edge ids leaving ``S`` and entering ``S``."""
    S = set(S)
    out, inc = [], []
    for j, (u, v, _) in enumerate(G.edges):
        if u in S and v not in S:
            out.append(j)
        elif v in S and u not in S:
            inc.append(j)
    return out, inc


class Weighting:
    """Vertex weighting stored as integer numerators over one common denominator.

    ``w[v]`` gives an exact :class:`Fraction`.  Plain integer weightings have
    ``den == 1``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable[int], den: int = 1):
        num = tuple(int(x) for x in num)
        if den <= 0:
            raise InputError("weighting denominator must be positive")
        if any(x < 0 for x in num):
            raise InputError("weightings must be non-negative")
        self.num = num
        self.den = int(den)

    def __len__(self):
        return len(self.num)

    def __getitem__(self, v: int) -> Fraction:
        return Fraction(self.num[v], self.den)

    def __eq__(self, other):
        if not isinstance(other, Weighting):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __repr__(self):
        return f"Weighting({list(self.num)}, den={self.den})"

    def numer(self, S: Iterable[int]) -> int:
        num = self.num
        return sum(num[v] for v in S)

    def of(self, S: Iterable[int]) -> Fraction:
        return Fraction(self.numer(S), self.den)

    def total(self) -> Fraction:
        return Fraction(sum(self.num), self.den)

    def support(self) -> list[int]:
        return [v for v, x in enumerate(self.num) if x > 0]

    def restrict(self, ids: Sequence[int]) -> "Weighting":
        return Weighting([self.num[v] for v in ids], self.den)


def as_weighting(d) -> Weighting:
    if isinstance(d, Weighting):
        return d
    if isinstance(d, dict):
        n = max(d, default=-1) + 1
        d = [d.get(v, 0) for v in range(n)]
    vals = list(d)
    if all(isinstance(x, int) for x in vals):
        return Weighting(vals, 1)
    fr = [Fraction(x) for x in vals]
    den = 1
    for x in fr:
        den = den * x.denominator // _gcd(den, x.denominator)
    return Weighting([int(x * den) for x in fr], den)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def degree_weighting(G: Graph) -> Weighting:
    return Weighting(degrees(G), 1)


def regularized_weighting(G: Graph) -> Weighting:
    """d(v) = deg(v) + udeg(v)·deg(V)/(2m), kept exact over the denominator 2m."""
    if G.m == 0:
        raise InputError("regularized weighting needs at least one edge")
    deg = degrees(G)
    udeg = unweighted_degrees(G)
    two_m = 2 * G.m
    total = sum(deg)
    return Weighting([two_m * deg[v] + udeg[v] * total for v in range(G.n)], two_m)


def _sides(n: int, S: Iterable[int], universe: Iterable[int] | None = None):
    S = set(S)
    U = set(range(n)) if universe is None else set(universe)
    if not S <= U:
        raise InputError("cut side is not contained in the vertex set")
    rest = U - S
    if not S or not rest:
        raise DegenerateCutError("cut has an empty side")
    return S, rest


def conductance(G: Graph, d, S: Iterable[int], universe: Iterable[int] | None = None) -> Fraction:
    """min(δ(S, U∖S), δ(U∖S, S)) / min(d(S), d(U∖S)) in ``G[U]``, exactly.

    ``universe`` defaults to all of V(G); passing a subset evaluates the
    conductance inside the induced subgraph without building it.
    """
    d = as_weighting(d)
    S, rest = _sides(G.n, S, universe)
    fwd = bwd = 0
    for u, v, c in G.edges:
        if u in S:
            if v in rest:
                fwd += c
        elif v in S and u in rest:
            bwd += c
    den = min(d.numer(S), d.numer(rest))
    if den == 0:
        raise ZeroWeightError("both cut sides need positive weight")
    return Fraction(min(fwd, bwd) * d.den, den)


def induced_subgraph(G: Graph, S: Iterable[int]) -> Graph:
    """Subgraph on ``S``; local ids follow sorted order of ``S``.

    The result's ``origin`` and ``edge_origin`` point back into the root graph.
    """
    keep = sorted(set(S))
    for v in keep:
        G.check_vertex(v)
    local = {v: i for i, v in enumerate(keep)}
    edges, eids = [], []
    for j, (u, v, c) in enumerate(G.edges):
        if u in local and v in local:
            edges.append((local[u], local[v], c))
            eids.append(G.edge_origin[j])
    return Graph(len(keep), edges, G.W, origin=[G.origin[v] for v in keep], edge_origin=eids)


def reverse(G: Graph) -> Graph:
    return Graph(G.n, [(v, u, c) for u, v, c in G.edges], G.W, G.origin, G.edge_origin)


def parse_edge_list(text: str, W: int | None = None) -> Graph:
    """Parse ``tail head capacity`` lines with an optional ``p <n> <m>`` header."""
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None or edges:
                raise InputError("header must come before any edge", lineno)
            if len(parts) != 3:
                raise InputError("header must be 'p <n> <m>'", lineno)
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise InputError("header fields must be integers", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise InputError("header fields must be non-negative", lineno)
            continue
        if len(parts) != 3:
            raise InputError(f"expected 'tail head capacity', got {line!r}", lineno)
        try:
            u, v, c = (int(x) for x in parts)
        except ValueError:
            raise InputError(f"non-integer field in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise InputError("vertex ids must be non-negative", lineno)
        if u == v:
            raise InputError(f"self-loop at {u}", lineno)
        if c < 1 or (W is not None and c > W):
            raise InputError(f"capacity {c} out of range", lineno)
        if header is not None and max(u, v) >= header[0]:
            raise InputError(f"vertex id exceeds header n={header[0]}", lineno)
        edges.append((u, v, c))
    if header is not None:
        n, m = header
        if m != len(edges):
            raise InputError(f"header declares {m} edges, found {len(edges)}")
    else:
        n = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
    return Graph(n, edges, W)


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(G: Graph) -> str:
    lines = [f"p {G.n} {G.m}"]
    lines.extend(f"{u} {v} {c}" for u, v, c in G.edges)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CutCertificate:
    """A cut ``S`` of ``G[host]`` with its exact conductance and the bound it was emitted under."""

    S: frozenset
    host: frozenset
    value: Fraction
    sparsity_bound: Fraction
    kind: str = ""

    def check(self, G: Graph, d) -> list[str]:
        bad = []
        if not self.S or not self.S < self.host:
            bad.append("S must be a non-empty proper subset of host")
            return bad
        try:
            got = conductance(G, d, self.S, universe=self.host)
        except (DegenerateCutError, ZeroWeightError) as exc:
            return [f"cut does not evaluate: {exc}"]
        if got != self.value:
            bad.append(f"recorded conductance {self.value} but recomputed {got}")
        if got > self.sparsity_bound:
            bad.append(f"conductance {got} exceeds claimed bound {self.sparsity_bound}")
        return bad
