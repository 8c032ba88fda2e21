"""Flow instances with vertex sources and sinks.

Three solvers live here:

* :func:`push_relabel_bounded`, push-relabel capped at height ``h`` that
  either routes all source or stops with every leftover excess at level ``h``;
* :func:`extract_sparse_level_cut`, which turns such a stuck state into a
  sparse level cut;
* :func:`exact_max_flow`, a Dinic max flow used as the exact matching oracle.

:func:`decompose_flow` splits a flow into source-to-sink paths using a
link-cut forest and records a transcript for later crossing queries.

All internal amounts are integers.  An instance keeps a ``unit`` K so that a
real amount x is stored as ``x*K``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ContractError, InputError
from .graph import Graph, Weighting, as_weighting, conductance
from .linkcut import LinkCutForest, NaiveForest, RecordingForest, TranscriptLog, root_path_edges


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def default_height(n: int, W: int, phi, kappa=1) -> int:
    """h = ceil(100·κ·log2(nW)/φ)."""
    return max(1, math.ceil(100 * kappa * math.log2(max(2, n * W)) / float(phi)))


@dataclass
class FlowInstance:
    """Source/sink instance on ``host`` with edge capacities ``scale·c(e)``.

    ``src``, ``snk`` and ``cap`` hold the integer amounts in units of
    ``1/unit``.
    """

    host: Graph
    src: list
    snk: list
    cap: list
    h: int
    scale: Fraction
    unit: int

    @classmethod
    def build(cls, host: Graph, source, sink, scale=1, h: int | None = None, unit: int | None = None):
        n = host.n
        source = [Fraction(x) for x in _dense(source, n)]
        sink = [Fraction(x) for x in _dense(sink, n)]
        if any(x < 0 for x in source) or any(x < 0 for x in sink):
            raise InputError("sources and sinks must be non-negative")
        scale = Fraction(scale)
        if scale <= 0:
            raise InputError("capacity scale must be positive")
        if unit is None:
            unit = scale.denominator
            for x in source + sink:
                unit = _lcm(unit, x.denominator)
        K = unit
        src = [_exact_int(x * K) for x in source]
        snk = [_exact_int(x * K) for x in sink]
        cap = [_exact_int(c * scale * K) for _, _, c in host.edges]
        if h is None:
            h = max(1, host.n)
        return cls(host, src, snk, cap, int(h), scale, K)

    @property
    def n(self):
        return self.host.n

    def reversed(self) -> "FlowInstance":
        from .graph import reverse
        return FlowInstance(reverse(self.host), list(self.src), list(self.snk), list(self.cap),
                            self.h, self.scale, self.unit)

    def real(self, x) -> Fraction:
        return Fraction(x, self.unit)


def _dense(vals, n):
    if isinstance(vals, Weighting):
        return [vals[v] for v in range(n)]
    if isinstance(vals, dict):
        return [vals.get(v, 0) for v in range(n)]
    vals = list(vals)
    if len(vals) != n:
        raise InputError(f"expected {n} values, got {len(vals)}")
    return vals


def _exact_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise InputError(f"{x} is not integral in the chosen unit")
    return x.numerator


@dataclass
class PreflowState:
    inst: FlowInstance
    flow: list
    level: list
    absorbed: list
    excess: list
    pushes: int = 0
    relabels: int = 0

    @property
    def feasible(self) -> bool:
        return not any(self.excess)

    @property
    def h(self):
        return self.inst.h


@dataclass
class FlowResult:
    status: str  # "feasible" or "stuck"
    state: PreflowState

    @property
    def feasible(self):
        return self.status == "feasible"

    @property
    def flow(self):
        return self.state.flow


def _residual_arcs(G: Graph):
    """Per vertex: list of (edge id, +1 forward / -1 backward, other end), edge-id order."""
    arcs = [[] for _ in range(G.n)]
    for j, (u, v, _) in enumerate(G.edges):
        arcs[u].append((j, 1, v))
        arcs[v].append((j, -1, u))
    for lst in arcs:
        lst.sort()
    return arcs


def push_relabel_bounded(inst: FlowInstance, gap: bool = False) -> FlowResult:
    """Push-relabel with levels capped at ``inst.h``.

    Vertices are discharged in FIFO order and arcs are scanned in edge-id
    order, so the run is deterministic.  Relabels jump straight to
    ``min(h, 1 + lowest residual neighbour)``, which is what a run of unit
    relabels would reach.  With ``gap`` set, an emptied level lifts every
    vertex above it to ``h``.
    """
    G = inst.host
    n, h = G.n, inst.h
    cap = inst.cap
    arcs = _residual_arcs(G)
    flow = [0] * G.m
    level = [0] * n
    e = list(inst.src)  # Δ + in - out
    snk = inst.snk
    cur = [0] * n
    count = {0: n} if gap else None
    st = PreflowState(inst, flow, level, [0] * n, [0] * n)

    def ex(v):
        return max(e[v] - snk[v], 0)

    queue = deque(v for v in range(n) if ex(v) > 0)
    inq = [False] * n
    for v in queue:
        inq[v] = True
    while queue:
        v = queue.popleft()
        inq[v] = False
        while ex(v) > 0 and level[v] < h:
            lst = arcs[v]
            i = cur[v]
            while i < len(lst):
                j, sgn, w = lst[i]
                res = cap[j] - flow[j] if sgn > 0 else flow[j]
                if res > 0 and level[v] == level[w] + 1:
                    amt = min(ex(v), res)
                    flow[j] += amt * sgn
                    e[v] -= amt
                    e[w] += amt
                    st.pushes += 1
                    if not inq[w] and ex(w) > 0 and level[w] < h:
                        queue.append(w)
                        inq[w] = True
                    if ex(v) == 0:
                        break
                i += 1
            cur[v] = i
            if ex(v) == 0:
                break
            # no admissible arc: every residual neighbour sits at level >= level[v]
            low = h
            for j, sgn, w in lst:
                res = cap[j] - flow[j] if sgn > 0 else flow[j]
                if res > 0 and level[w] + 1 < low:
                    low = level[w] + 1
            old = level[v]
            new = min(h, low)
            level[v] = new
            cur[v] = 0
            st.relabels += 1
            if gap:
                count[old] -= 1
                count[new] = count.get(new, 0) + 1
                if count[old] == 0 and 0 < old < h:
                    for x in range(n):
                        if old < level[x] < h:
                            count[level[x]] -= 1
                            level[x] = h
                            count[h] = count.get(h, 0) + 1
    for v in range(n):
        st.absorbed[v] = min(e[v], snk[v])
        st.excess[v] = e[v] - st.absorbed[v]
        if e[v] < 0:
            raise AssertionError("push-relabel produced a negative imbalance")
    return FlowResult("feasible" if st.feasible else "stuck", st)


def check_preflow(state: PreflowState) -> list[str]:
    """Full scan of the preflow invariants; returns a list of violations."""
    inst = state.inst
    G = inst.host
    bad = []
    e = list(inst.src)
    for j, (u, v, _) in enumerate(G.edges):
        f = state.flow[j]
        if not 0 <= f <= inst.cap[j]:
            bad.append(f"edge {j} flow {f} outside [0, {inst.cap[j]}]")
        e[u] -= f
        e[v] += f
        lu, lv = state.level[u], state.level[v]
        if lu > lv + 1 and f != inst.cap[j]:
            bad.append(f"edge {j} skips down {lu}->{lv} but is not saturated")
        if lu < lv - 1 and f != 0:
            bad.append(f"edge {j} skips up {lu}->{lv} but carries flow")
    for v in range(G.n):
        if e[v] != state.absorbed[v] + state.excess[v]:
            bad.append(f"vertex {v}: conservation broken")
        if state.absorbed[v] > inst.snk[v] or state.absorbed[v] < 0 or state.excess[v] < 0:
            bad.append(f"vertex {v}: absorbed/excess out of range")
        if state.level[v] >= 1 and state.absorbed[v] != inst.snk[v]:
            bad.append(f"vertex {v} at level {state.level[v]} has unsaturated sink")
        if state.excess[v] > 0 and state.level[v] != inst.h:
            bad.append(f"vertex {v} keeps excess below level h")
    return bad


@dataclass
class LevelCut:
    S: frozenset
    k: int
    upper: bool  # True when S = L>=k
    conductance: Fraction
    slack: Fraction  # capacity between levels k and k-1, real units
    extra_source_bound: Fraction
    host: frozenset


def level_profile(G: Graph, cap: Sequence[int], level: Sequence[int], active=None):
    """Capacity between consecutive levels: returns dict k -> capacity across (k, k-1)."""
    slack = {}
    for j, (u, v, _) in enumerate(G.edges):
        if active is not None and not (active[u] and active[v]):
            continue
        lu, lv = level[u], level[v]
        if abs(lu - lv) == 1:
            k = max(lu, lv)
            slack[k] = slack.get(k, 0) + cap[j]
    return slack


def sparse_level_scan(G: Graph, cap, unit, level, h, b: Weighting, active=None, ratio=Fraction(1, 10)):
    """Highest k with cap(L_k <-> L_{k-1}) <= ratio·min(b(L>=k), b(L<k)), both sides positive.

    Returns ``(k, upper_set, slack)`` or ``None``.  Only the levels that
    actually occur need checking: between occupied levels the consecutive
    capacity is zero.
    """
    verts = [v for v in range(G.n) if active is None or active[v]]
    if not verts:
        return None
    slack = level_profile(G, cap, level, active)
    occupied = sorted({level[v] for v in verts}, reverse=True)
    candidates = set()
    for lv in occupied:
        if lv >= 1:
            candidates.add(lv)
        if lv + 1 <= h:
            candidates.add(lv + 1)
    total = sum(b.num[v] for v in verts)
    order = sorted(verts, key=lambda v: -level[v])
    for k in sorted(candidates, reverse=True):
        if k < 1:
            continue
        upper = [v for v in order if level[v] >= k]
        if not upper or len(upper) == len(verts):
            continue
        bu = sum(b.num[v] for v in upper)
        low = min(bu, total - bu)
        if low <= 0:
            continue
        s = Fraction(slack.get(k, 0), unit)
        if s <= ratio * Fraction(low, b.den):
            return k, frozenset(upper), s
    return None


def extract_sparse_level_cut(state: PreflowState, b, phi) -> LevelCut:
    """Level cut of a stuck preflow, oriented so that b(S) <= 2b(V)/3.

    With capacities c/φ and Δ, ∇ <= b, a level k whose consecutive-level
    capacity is at most a tenth of the lighter side gives conductance
    at most 1.1φ.
    """
    if state.feasible:
        raise ContractError("extract_sparse_level_cut called on a feasible state")
    inst = state.inst
    G = inst.host
    b = as_weighting(b)
    found = sparse_level_scan(G, inst.cap, inst.unit, state.level, inst.h, b)
    if found is None:
        raise ContractError("no sparse level exists; the height bound is too small")
    k, upper, s = found
    V = frozenset(range(G.n))
    bu = b.numer(upper)
    if 3 * bu <= 2 * sum(b.num):
        S, is_upper = upper, True
    else:
        S, is_upper = V - upper, False
    phi_cut = conductance(G, b, S)
    extra = 2 * min(b.of(S), b.of(V - S))
    return LevelCut(S, k, is_upper, phi_cut, s, extra, V)


@dataclass
class MaxFlowResult:
    value: int
    flow: list
    src_used: list
    absorbed: list
    cut: frozenset  # source side of a minimum cut (excluding the super source)
    unit: int = 1

    def real_value(self):
        return Fraction(self.value, self.unit)


class _Dinic:
    def __init__(self, N):
        self.N = N
        self.head = [[] for _ in range(N)]
        self.to = []
        self.cap = []

    def add(self, u, v, c):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        return len(self.to) - 2

    def _bfs(self, s, t):
        lvl = [-1] * self.N
        lvl[s] = 0
        q = deque([s])
        to, cap, head = self.to, self.cap, self.head
        while q:
            u = q.popleft()
            for a in head[u]:
                if cap[a] > 0 and lvl[to[a]] < 0:
                    lvl[to[a]] = lvl[u] + 1
                    q.append(to[a])
        return lvl

    def maxflow(self, s, t):
        total = 0
        to, cap, head = self.to, self.cap, self.head
        while True:
            lvl = self._bfs(s, t)
            if lvl[t] < 0:
                return total
            it = [0] * self.N
            while True:
                # iterative DFS for one augmenting path in the level graph
                path = []
                u = s
                while u != t:
                    hs = head[u]
                    while it[u] < len(hs):
                        a = hs[it[u]]
                        if cap[a] > 0 and lvl[to[a]] == lvl[u] + 1:
                            break
                        it[u] += 1
                    if it[u] == len(hs):
                        if u == s:
                            break
                        lvl[u] = -1
                        a = path.pop()
                        u = to[a ^ 1]
                        it[u] += 1
                        continue
                    a = hs[it[u]]
                    path.append(a)
                    u = to[a]
                if u != t:
                    break
                amt = min(cap[a] for a in path)
                for a in path:
                    cap[a] -= amt
                    cap[a ^ 1] += amt
                total += amt

    def reachable(self, s):
        seen = [False] * self.N
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for a in self.head[u]:
                if self.cap[a] > 0 and not seen[self.to[a]]:
                    seen[self.to[a]] = True
                    stack.append(self.to[a])
        return seen


def exact_max_flow(inst: FlowInstance) -> MaxFlowResult:
    """Dinic max flow from the vertex sources to the vertex sinks."""
    G = inst.host
    n = G.n
    s, t = n, n + 1
    D = _Dinic(n + 2)
    earcs = [D.add(u, v, inst.cap[j]) for j, (u, v, _) in enumerate(G.edges)]
    sarcs = [D.add(s, v, inst.src[v]) for v in range(n)]
    tarcs = [D.add(v, t, inst.snk[v]) for v in range(n)]
    value = D.maxflow(s, t)
    flow = [D.cap[a ^ 1] for a in earcs]
    used = [D.cap[a ^ 1] for a in sarcs]
    absorbed = [D.cap[a ^ 1] for a in tarcs]
    seen = D.reachable(s)
    return MaxFlowResult(value, flow, used, absorbed, frozenset(v for v in range(n) if seen[v]), inst.unit)


@dataclass
class FlowPath:
    src: int
    dst: int
    amount: object
    edges: tuple = ()


@dataclass
class PathDecomposition:
    paths: list
    cycles: list = field(default_factory=list)
    transcript: TranscriptLog | None = None

    def edge_loads(self, m: int) -> list:
        load = [0] * m
        for p in self.paths + self.cycles:
            for j in p.edges:
                load[j] += p.amount
        return load


def decompose_flow(host: Graph, flow: Sequence, supply=None, demand=None,
                   forest: str = "linkcut", keep_edges: bool = True) -> PathDecomposition:
    """Split ``flow`` into supply-to-demand paths plus leftover cycles.

    ``supply``/``demand`` default to the positive and negative parts of the
    net outflow; when given they must satisfy out - in = supply - demand at
    every vertex.  Every path saturates an edge, a supply or a demand, so
    there are at most m + (#terminals) paths.  The forest operations are
    recorded against graph-edge ids in ``transcript``.
    """
    n, m = host.n, host.m
    if len(flow) != m:
        raise InputError(f"flow has {len(flow)} entries for {m} edges")
    net = [0] * n
    for j, (u, v, _) in enumerate(host.edges):
        f = flow[j]
        if f < 0:
            raise InputError(f"negative flow on edge {j}")
        net[u] += f
        net[v] -= f
    if supply is None:
        supply = [max(x, 0) for x in net]
        demand = [max(-x, 0) for x in net]
    else:
        supply = list(supply)
        demand = list(demand)
        for v in range(n):
            if net[v] != supply[v] - demand[v]:
                raise InputError(f"flow violates conservation at vertex {v}")
    base = NaiveForest(n) if forest == "naive" else LinkCutForest(n)
    log = TranscriptLog(tuple((u, v) for u, v, _ in host.edges), n)
    F = RecordingForest(base, log)
    remaining = list(flow)
    ptr = [0] * n
    out_edges = host.out_edges
    paths, cycles = [], []

    def next_edge(r):
        lst = out_edges[r]
        while ptr[r] < len(lst) and remaining[lst[ptr[r]]] <= 0:
            ptr[r] += 1
        return lst[ptr[r]] if ptr[r] < len(lst) else None

    def prune(u):
        while True:
            res = F.find_min(u)
            if res is None or res[1] > 0:
                return
            eid = res[0]
            remaining[eid] = 0
            F.cut_edge(eid)

    def grow(r):
        """Extend root r by one flow edge, cancelling a cycle if one closes."""
        j = next_edge(r)
        if j is None:
            return False
        v = host.edges[j][1]
        if F.find_root(v) == r:
            amt = remaining[j]
            if v != r:
                amt = min(amt, F.find_min(v)[1])
            cyc = (j,) + tuple(root_path_edges(base, v)) if keep_edges else ()
            cycles.append(FlowPath(r, r, amt, cyc))
            remaining[j] -= amt
            if v != r:
                F.add(v, -amt)
                prune(v)
        else:
            F.link_edge(j, remaining[j])
        return True

    for s in range(n):
        while supply[s] > 0:
            r = F.find_root(s)
            if demand[r] > 0:
                amt = min(supply[s], demand[r])
                res = F.find_min(s)
                if res is not None:
                    amt = min(amt, res[1])
                edges = tuple(root_path_edges(base, s)) if keep_edges else ()
                F.emit(s, r, amt)
                paths.append(FlowPath(s, r, amt, edges))
                supply[s] -= amt
                demand[r] -= amt
                if s != r:
                    F.add(s, -amt)
                    prune(s)
                continue
            if not grow(r):
                raise InputError(f"flow cannot be traced from vertex {s}: conservation broken at {r}")
    # whatever flow is left is a circulation
    for u in range(n):
        while True:
            r = F.find_root(u)
            if r == u and next_edge(u) is None:
                break
            if not grow(r):
                raise InputError(f"flow violates conservation at vertex {r}")
    if any(demand):
        raise InputError("flow leaves unmatched demand")
    return PathDecomposition(paths, cycles, log.seal())
