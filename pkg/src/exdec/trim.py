"""Trimming a near-expander down to a certified expander.

Two push-pull-relabel states run on ``G[A]`` and its reverse.  Sources come
from witness edges whose embedded path crosses the boundary of the current
set; sinks are the weighting ``d``.  Whenever a state gets stuck we cut off a
sparse level set from both.  New crossing sources are applied in batch
rounds, each of which escalates the sinks, resets the levels and keeps the
flow.

All amounts are integers in units of ``1/unit``.  The scale constant
``sigma`` is the measured witness degree bound ``deg_W(v) <= sigma·d(v)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractError, SizeGuardError
from .flow import FlowInstance, sparse_level_scan
from .graph import CutCertificate, Graph, Weighting, as_weighting, boundary_edges, conductance, induced_subgraph
from .ppr import ValidState
from .witness import Witness, crossing_sources

EARLY = "EarlyTermination"
CERTIFIED = "CertifiedExpander"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass
class TrimConfig:
    phi: Fraction
    h: int
    sigma: int
    unit: int
    c0: Fraction | int = 4096
    source_factor: int = 100
    max_batches: int = 64
    gap: bool = True
    log_n: float = 1.0
    log_nw: float = 1.0

    @property
    def cap_scale(self) -> Fraction:
        """Edge capacity multiplier 200·σ/φ."""
        return 200 * self.sigma / self.phi

    @property
    def sink_step(self) -> int:
        """Sink added per batch round, as a multiple of d(v)."""
        return 10 * self.sigma

    @property
    def witness_constant(self) -> float:
        """C with σ = C·log2(n)·log2(nW)."""
        return self.sigma / (self.log_n * self.log_nw)

    def early_threshold(self, dV: Fraction) -> Fraction:
        logs = Fraction(self.log_n * self.log_nw).limit_denominator(10 ** 6)
        return dV / (Fraction(self.c0) * logs)

    def certified_phi(self, rounds: int) -> Fraction:
        """Expansion certified after ``rounds`` sink levels: φ / (10^7·σ²·R)."""
        return self.phi / (10 ** 7 * self.sigma ** 2 * max(1, rounds))


def make_config(G: Graph, d, phi, w: Witness | None, c0=4096, h: int | None = None,
                max_batches: int = 64) -> TrimConfig:
    d = as_weighting(d)
    phi = Fraction(phi)
    n, W = max(G.n, 2), max(G.W, 1)
    log_n = math.log2(n)
    log_nw = math.log2(max(2, n * W))
    deg = w.total_degrees() if w is not None else [0] * G.n
    sigma = 1
    for v in range(G.n):
        if deg[v] > 0:
            if d.num[v] == 0:
                raise ContractError(f"witness touches vertex {v} of zero weight")
            sigma = max(sigma, _ceil(deg[v] / d[v]))
    unit = _lcm(d.den, phi.numerator)
    for b in (w.batches if w is not None else ()):
        unit = _lcm(unit, b.unit)
    if h is None:
        h = max(1, math.ceil(40000 * log_nw / float(phi)))
    return TrimConfig(phi, h, sigma, unit, c0, 100, max_batches, True, log_n, log_nw)


def build_instances(G: Graph, A: Iterable[int], w: Witness, d, cfg: TrimConfig):
    """Forward and reverse instances on ``G[A]`` with round-0 sinks.

    Returns ``(forward, reverse, H)`` where ``H = G[A]`` and the instances use
    its local ids.
    """
    d = as_weighting(d)
    A = sorted(set(A))
    H = induced_subgraph(G, A)
    out, inc = boundary_edges(G, A)
    src = crossing_sources(w, out + inc, A, cfg.source_factor)
    local = {v: i for i, v in enumerate(A)}
    K = cfg.unit
    source = [0] * H.n
    for v, amt in src.items():
        x = amt * K
        if x.denominator != 1:
            raise ContractError("source amount not integral in the configured unit")
        source[local[v]] = int(x)
    sink = [d.num[v] * (K // d.den) * cfg.sink_step for v in A]
    cap = [_exact(c * cfg.cap_scale * K) for _, _, c in H.edges]
    fwd = FlowInstance(H, source, sink, cap, cfg.h, cfg.cap_scale, K)
    return fwd, fwd.reversed(), H


def _exact(x: Fraction) -> int:
    if x.denominator != 1:
        raise ContractError(f"{x} is not integral in the configured unit")
    return x.numerator


@dataclass
class TrimCut:
    cert: CutCertificate
    direction: str  # "out" (forward state) or "in" (reverse state)
    batch: int
    level: int
    weight_ratio: Fraction  # d(S_t) / d(A_t)


@dataclass
class BatchLog:
    round: int
    added_source: Fraction
    unabsorbed: Fraction
    cuts: int
    shrink: float | None = None


@dataclass
class TrimOutcome:
    tag: str
    cuts: list  # TrimCut, in emission order
    A_prime: frozenset  # ids of G
    A: frozenset
    batches: list  # BatchLog
    rounds: int
    cfg: TrimConfig
    certified_phi: Fraction | None
    reason: str = ""
    flips: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.tag == CERTIFIED

    @property
    def S(self):
        return [c.cert.S for c in self.cuts]


def _unabsorbed(st: ValidState) -> int:
    return sum(st.ex_pos(v) for v in range(st.G.n) if st.active[v])


def _level_cut(st: ValidState, b: Weighting):
    """Upper level set of a stuck state plus the flow-derived sparsity bound."""
    G = st.G
    found = sparse_level_scan(G, st.cap, st.inst.unit, st.level, st.h, b, st.active)
    if found is None:
        return None
    k, upper, slack = found
    S = set(upper)
    # net flow leaving S plus the consecutive-level slack bounds the capacity S -> rest
    net = 0
    for j, (u, v, _) in enumerate(G.edges):
        if not (st.active[u] and st.active[v]):
            continue
        if u in S and v not in S:
            net += st.flow[j]
        elif v in S and u not in S:
            net -= st.flow[j]
    return k, frozenset(S), Fraction(net, st.inst.unit) + slack


def trim(G: Graph, A: Iterable[int], w: Witness, d, phi, prior_cuts: Sequence = (),
         c0=4096, cfg: TrimConfig | None = None, max_batches: int = 64,
         check: bool = False) -> TrimOutcome:
    """Trim ``A`` (ids of ``G``) into a certified expander or stop early.

    ``check`` runs the full invariant scan on both states after every
    operation; tests use it.
    """
    d = as_weighting(d)
    phi = Fraction(phi)
    A = frozenset(A)
    G = Graph(G.n, G.edges, G.W)  # local ids throughout, whatever G's origin
    if cfg is None:
        cfg = make_config(G, d, phi, w, c0=c0, max_batches=max_batches)
    dV = d.total()
    limit = cfg.early_threshold(dV)
    order = sorted(A)
    if len(order) <= 1 or d.numer(order) == 0:
        return TrimOutcome(CERTIFIED, [], A, A, [], 0, cfg, cfg.certified_phi(1))
    fwd_inst, rev_inst, H = build_instances(G, order, w, d, cfg)
    states = {"out": ValidState(fwd_inst, gap=cfg.gap), "in": ValidState(rev_inst, gap=cfg.gap)}
    b = d.restrict(order)
    K = cfg.unit
    dstep = [x * (K // d.den) * cfg.sink_step for x in b.num]

    def scan():
        if check:
            for name, st in states.items():
                bad = st.scan()
                if bad:
                    raise ContractError(f"{name} state invalid: {bad[:3]}")

    scan()
    cuts: list[TrimCut] = []
    removed: set[int] = set()
    removed_weight = 0
    batches = [BatchLog(0, Fraction(sum(fwd_inst.src), K), Fraction(_unabsorbed(states["out"])
                        + _unabsorbed(states["in"]), K), 0)]
    rnd = 0
    while True:
        batch_removed: set[int] = set()
        while not (states["out"].is_feasible() and states["in"].is_feasible()):
            name = "out" if not states["out"].is_feasible() else "in"
            st = states[name]
            A_t = st.active_set()
            found = _level_cut(st, b)
            if found is None:
                return _finish(EARLY, cuts, removed, order, H, A, batches, rnd, cfg, states,
                               "no sparse level")
            k, S, net_bound = found
            host_g = frozenset(H.origin[v] for v in A_t)
            S_g = frozenset(H.origin[v] for v in S)
            value = conductance(G, d, S_g, universe=host_g)
            lo = min(b.numer(S), b.numer(A_t) - b.numer(S))
            bound = net_bound / cfg.cap_scale / Fraction(lo, b.den)
            cert = CutCertificate(S_g, host_g, value, bound, "trim-" + name)
            cuts.append(TrimCut(cert, name, rnd, k, Fraction(b.numer(S), b.numer(A_t))))
            for other in states.values():
                other.remove_vertices(S)
            scan()
            removed |= S
            batch_removed |= S
            removed_weight += b.numer(S)
            if Fraction(removed_weight, b.den) >= limit:
                return _finish(EARLY, cuts, removed, order, H, A, batches, rnd, cfg, states,
                               "removed weight reached the threshold")
            if not any(states["out"].active):
                return _finish(EARLY, cuts, removed, order, H, A, batches, rnd, cfg, states,
                               "everything removed")
        batches[-1].cuts = sum(1 for c in cuts if c.batch == rnd)
        if not batch_removed:
            return _finish(CERTIFIED, cuts, removed, order, H, A, batches, rnd, cfg, states, "")
        # batch round: crossing sources for the edges around this round's cuts
        live = [v for v in range(H.n) if states["out"].active[v]]
        live_g = {H.origin[v] for v in live}
        boundary = [H.edge_origin[j] for j, (u, v, _) in enumerate(H.edges)
                    if (u in batch_removed and states["out"].active[v])
                    or (v in batch_removed and states["out"].active[u])]
        added = crossing_sources(w, boundary, live_g, cfg.source_factor)
        local = {H.origin[v]: v for v in live}
        inc = {}
        for gv, amt in added.items():
            x = amt * K
            if x.denominator != 1:
                raise ContractError("source amount not integral in the configured unit")
            if x:
                inc[local[gv]] = int(x)
        if not inc:
            return _finish(CERTIFIED, cuts, removed, order, H, A, batches, rnd, cfg, states, "")
        rnd += 1
        if rnd > cfg.max_batches:
            return _finish(EARLY, cuts, removed, order, H, A, batches, rnd - 1, cfg, states,
                           "batch limit reached")
        for st in states.values():
            for v in live:
                st.increase_sink(v, dstep[v])
            for v, x in inc.items():
                st.src[v] += x
                st.p[v] += x
            st.reset_levels()
        scan()
        un = Fraction(_unabsorbed(states["out"]) + _unabsorbed(states["in"]), K)
        added_total = Fraction(sum(inc.values()), K)
        prev = batches[-1]
        shrink = float(prev.added_source / added_total) if added_total else None
        batches.append(BatchLog(rnd, added_total, un, 0, shrink))


def _finish(tag, cuts, removed, order, H, A, batches, rnd, cfg, states, reason):
    rest = frozenset(H.origin[v] for v in range(H.n) if v not in removed)
    flips = {}
    for name, st in states.items():
        hist = {}
        for v in range(H.n):
            hist[st.flips[v]] = hist.get(st.flips[v], 0) + 1
        flips[name] = dict(sorted(hist.items()))
    phi_c = cfg.certified_phi(rnd + 1) if tag == CERTIFIED else None
    return TrimOutcome(tag, cuts, rest, A, batches, rnd + 1, cfg, phi_c, reason, flips)


EXHAUSTIVE_LIMIT = 14


def verify_certified_expander(G: Graph, A, phi, d, limit: int = EXHAUSTIVE_LIMIT) -> bool:
    """Exhaustively check Φ_{G[A],d}(S) >= φ' for every cut S of A.

    Cuts with an empty-weight side are skipped, as in the conductance
    definition.
    """
    from .oracle import min_conductance

    A = sorted(set(A))
    if len(A) > limit:
        raise SizeGuardError(f"exhaustive check limited to {limit} vertices, got {len(A)}")
    if len(A) <= 1:
        return True
    H = induced_subgraph(G, A)
    value, _ = min_conductance(H, as_weighting(d).restrict(A), limit=limit)
    return value is None or value >= Fraction(phi)
