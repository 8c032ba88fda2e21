"""Push-pull-relabel: a preflow kept valid under source increases and vertex removals.

Per vertex we track ``p`` (positive units) and ``n`` (negative units) with
``p - n = e - ∇`` where ``e = Δ + in - out`` over edges inside the active
set.  Then

    ex⁺(v) = max(p - n, 0)        ex⁻(v) = max(n - p - ∇, 0)

A state is valid when every residual arc (x, y) has ℓ(x) <= ℓ(y) + 1, every
vertex with negative excess sits at level 0 and every vertex with positive
excess sits at level h.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ContractError
from .flow import FlowInstance, decompose_flow, push_relabel_bounded
from .graph import Graph, degrees, induced_subgraph


@dataclass
class PprStats:
    pushes: int = 0
    saturating_pushes: int = 0
    pulls: int = 0
    saturating_pulls: int = 0
    relabels_up: int = 0
    relabels_down: int = 0
    gap_lifts: int = 0


class ValidState:
    """Dynamic preflow on ``inst.host`` restricted to the active vertex set.

    ``gap`` enables the gap heuristic during push phases: when a level below
    h empties, everything above it jumps to h.  That keeps every invariant
    and avoids walking excess up a huge height one level at a time.
    """

    def __init__(self, inst: FlowInstance, check_domination: bool = True, gap: bool = False):
        G = inst.host
        if check_domination:
            deg = degrees(G)
            for v in range(G.n):
                if inst.snk[v] * 1 < deg[v] * inst.unit:
                    raise ContractError(f"sink at {v} is below its weighted degree")
        if inst.h < 1:
            raise ContractError("height must be at least 1")
        self.inst = inst
        self.G = G
        self.h = inst.h
        self.cap = list(inst.cap)
        self.gap = gap
        n = G.n
        self.active = [True] * n
        self.src = list(inst.src)
        self.snk = list(inst.snk)
        self.flow = [0] * G.m
        self.level = [0] * n
        self.p = list(inst.src)
        self.nn = list(inst.snk)
        self.flips = [0] * n
        self._dir = [0] * n
        self.stats = PprStats()
        arcs = [[] for _ in range(n)]
        for j, (u, v, _) in enumerate(G.edges):
            arcs[u].append((j, 1, v))
            arcs[v].append((j, -1, u))
        self.arcs = [sorted(a) for a in arcs]
        self.push_relabel()

    # bookkeeping

    def ex_pos(self, v):
        return max(self.p[v] - self.nn[v], 0)

    def ex_neg(self, v):
        return max(self.nn[v] - self.p[v] - self.snk[v], 0)

    def imbalance(self, v):
        """e(v) = Δ(v) + in(v) - out(v)."""
        return self.p[v] - self.nn[v] + self.snk[v]

    def absorbed(self, v):
        return min(max(self.imbalance(v), 0), self.snk[v])

    def _set_level(self, v, new):
        old = self.level[v]
        if new == old:
            return
        d = 1 if new > old else -1
        if self._dir[v] and self._dir[v] != d:
            self.flips[v] += 1
        self._dir[v] = d
        self.level[v] = new

    def _res(self, j, sgn):
        return self.cap[j] - self.flow[j] if sgn > 0 else self.flow[j]

    # phases

    def pull_relabel(self):
        lv = self.level
        queue = deque(v for v in range(self.G.n) if self.active[v] and lv[v] > 0 and self.ex_neg(v) > 0)
        inq = set(queue)
        while queue:
            v = queue.popleft()
            inq.discard(v)
            while lv[v] > 0 and self.ex_neg(v) > 0:
                moved = False
                for j, sgn, u in self.arcs[v]:
                    if not self.active[u] or lv[u] != lv[v] + 1:
                        continue
                    # arc (u, v): forward edge u->v when sgn < 0 from v's view
                    res = self._res(j, -sgn)
                    if res <= 0:
                        continue
                    amt = min(self.ex_neg(v), res)
                    self.flow[j] += amt * (-sgn)
                    self.nn[u] += amt
                    self.nn[v] -= amt
                    self.stats.pulls += 1
                    if amt == res:
                        self.stats.saturating_pulls += 1
                    if self.ex_neg(u) > 0 and u not in inq:
                        queue.append(u)
                        inq.add(u)
                    moved = True
                    if self.ex_neg(v) == 0:
                        break
                if self.ex_neg(v) == 0:
                    break
                if not moved:
                    top = 0
                    for j, sgn, u in self.arcs[v]:
                        if self.active[u] and self._res(j, -sgn) > 0 and lv[u] - 1 > top:
                            top = lv[u] - 1
                    self._set_level(v, top)
                    self.stats.relabels_down += 1

    def push_relabel(self):
        lv, h = self.level, self.h
        queue = deque(v for v in range(self.G.n) if self.active[v] and lv[v] < h and self.ex_pos(v) > 0)
        inq = set(queue)
        while queue:
            v = queue.popleft()
            inq.discard(v)
            while lv[v] < h and self.ex_pos(v) > 0:
                for j, sgn, w in self.arcs[v]:
                    if not self.active[w] or lv[v] != lv[w] + 1:
                        continue
                    res = self._res(j, sgn)
                    if res <= 0:
                        continue
                    amt = min(self.ex_pos(v), res)
                    self.flow[j] += amt * sgn
                    self.p[v] -= amt
                    self.p[w] += amt
                    self.stats.pushes += 1
                    if amt == res:
                        self.stats.saturating_pushes += 1
                    if self.ex_pos(w) > 0 and lv[w] < h and w not in inq:
                        queue.append(w)
                        inq.add(w)
                    if self.ex_pos(v) == 0:
                        break
                if self.ex_pos(v) == 0:
                    break
                low = h
                for j, sgn, w in self.arcs[v]:
                    if self.active[w] and self._res(j, sgn) > 0 and lv[w] + 1 < low:
                        low = lv[w] + 1
                old = lv[v]
                self._set_level(v, min(h, low))
                self.stats.relabels_up += 1
                if self.gap and 0 < old < h and not any(
                        self.active[x] and lv[x] == old for x in range(self.G.n)):
                    for x in range(self.G.n):
                        if self.active[x] and old < lv[x] < h:
                            self._set_level(x, h)
                            self.stats.gap_lifts += 1

    # public operations

    def increase_source(self, v: int, delta: int):
        if not self.active[v]:
            raise ContractError(f"vertex {v} has been removed")
        if delta < 0:
            raise ContractError("source increments must be non-negative")
        if delta == 0:
            return
        self.src[v] += delta
        self.p[v] += delta
        self.push_relabel()

    def increase_sources(self, amounts: dict):
        """Batch form of :meth:`increase_source`; one push phase at the end."""
        for v, delta in sorted(amounts.items()):
            if not self.active[v]:
                raise ContractError(f"vertex {v} has been removed")
            if delta < 0:
                raise ContractError("source increments must be non-negative")
            self.src[v] += delta
            self.p[v] += delta
        self.push_relabel()

    def increase_sink(self, v: int, delta: int):
        """Raise ∇(v); n moves with it so p - n = e - ∇ keeps holding."""
        self.snk[v] += delta
        self.nn[v] += delta

    def remove_vertices(self, S):
        S = {v for v in S if self.active[v]}
        if not S:
            return
        for v in S:
            self.active[v] = False
        for j, (u, v, _) in enumerate(self.G.edges):
            f = self.flow[j]
            if not f:
                continue
            if u in S and self.active[v]:
                self.nn[v] += f
            elif v in S and self.active[u]:
                self.p[u] += f
        self.pull_relabel()
        self.push_relabel()

    def reset_levels(self):
        """Drop every level to 0, keep the flow, and re-validate."""
        for v in range(self.G.n):
            if self.active[v]:
                self._set_level(v, 0)
        self.pull_relabel()
        self.push_relabel()

    def stale_sinks(self) -> list[int]:
        """Active vertices above level 0 whose sink still has room.

        Validity does not rule these out: a removal can take flow away from
        a vertex without lowering it.  While one exists, positive excess at h
        is not proof that the instance is infeasible.
        """
        return [v for v in range(self.G.n)
                if self.active[v] and self.level[v] > 0 and self.absorbed(v) < self.snk[v]]

    def settle(self) -> bool:
        """Reset levels when some sink is stale, then report feasibility.

        Afterwards every vertex above level 0 has a full sink, so with
        h >= n a stuck state really has no residual path to spare capacity.
        """
        if self.stale_sinks():
            self.reset_levels()
        return self.is_feasible()

    # queries

    def active_set(self):
        return [v for v in range(self.G.n) if self.active[v]]

    def is_feasible(self) -> bool:
        return not any(self.active[v] and self.ex_pos(v) > 0 for v in range(self.G.n))

    def scan(self) -> list[str]:
        """Full invariant scan; returns the list of violations."""
        bad = []
        G, lv, h = self.G, self.level, self.h
        e = [0] * G.n
        for v in range(G.n):
            if self.active[v]:
                e[v] = self.src[v]
        for j, (u, v, _) in enumerate(G.edges):
            f = self.flow[j]
            if not 0 <= f <= self.cap[j]:
                bad.append(f"edge {j}: flow {f} outside [0, {self.cap[j]}]")
            if not (self.active[u] and self.active[v]):
                continue
            e[u] -= f
            e[v] += f
            if f < self.cap[j] and lv[u] > lv[v] + 1:
                bad.append(f"edge {j}: unsaturated downward skip {lv[u]}->{lv[v]}")
            if f > 0 and lv[v] > lv[u] + 1:
                bad.append(f"edge {j}: flow on upward skip {lv[u]}->{lv[v]}")
        for v in range(G.n):
            if not self.active[v]:
                continue
            if self.p[v] - self.nn[v] != e[v] - self.snk[v]:
                bad.append(f"vertex {v}: p - n != e - sink")
            if self.ex_neg(v) > 0 and lv[v] != 0:
                bad.append(f"vertex {v}: negative excess at level {lv[v]}")
            if self.ex_pos(v) > 0 and lv[v] != h:
                bad.append(f"vertex {v}: positive excess at level {lv[v]}")
            if not 0 <= lv[v] <= h:
                bad.append(f"vertex {v}: level out of range")
        return bad

    def cumulative_instance(self) -> tuple[Graph, FlowInstance]:
        """The instance this state currently solves, on the active subgraph."""
        keep = self.active_set()
        H = induced_subgraph(self.G, keep)
        local_edges = [j for j, (u, v, _) in enumerate(self.G.edges) if self.active[u] and self.active[v]]
        inst = FlowInstance(H, [self.src[v] for v in keep], [self.snk[v] for v in keep],
                            [self.cap[j] for j in local_edges], self.h, self.inst.scale, self.inst.unit)
        return H, inst

    def feasibility(self):
        """``("feasible", flow)`` with negative-excess path mass stripped, or ``("stuck", levels)``.

        The returned flow is indexed by host edge ids (zero outside the
        active set) and routes every active Δ into sinks.
        """
        if not self.is_feasible():
            return "stuck", list(self.level)
        G = self.G
        flow = [self.flow[j] if self.active[u] and self.active[v] else 0
                for j, (u, v, _) in enumerate(G.edges)]
        net = [0] * G.n
        for j, (u, v, _) in enumerate(G.edges):
            net[u] += flow[j]
            net[v] -= flow[j]
        supply = [max(x, 0) for x in net]
        demand = [max(-x, 0) for x in net]
        dec = decompose_flow(G, flow, supply, demand, keep_edges=True)
        strip = [self.ex_neg(v) if self.active[v] else 0 for v in range(G.n)]
        for path in dec.paths:
            take = min(strip[path.src], path.amount)
            if take <= 0:
                continue
            strip[path.src] -= take
            for j in path.edges:
                flow[j] -= take
        return "feasible", flow


def from_scratch_verdict(state: ValidState) -> bool:
    """Feasibility of the cumulative instance solved afresh with the same height."""
    _, inst = state.cumulative_instance()
    return push_relabel_bounded(inst).feasible
