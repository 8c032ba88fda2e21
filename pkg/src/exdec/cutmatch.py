"""The non-stop cut-matching game.

Each round the cut player projects the current flow matrix onto a random
direction and bisects the active weight; the matching player routes the two
halves into each other with two flow problems on the graph minus the cuts
found so far.  Vertices that do not get fully matched are partially
deleted; sparse cuts found by the flow solver are appended to the cut
sequence.  The run ends early once enough weight has been cut, otherwise a
final grafting step re-attaches the partially deleted vertices.

Units.  Weights and flows are integers in units of ``1/K``; ``K`` doubles
whenever the active weight is odd, so the bisection never rounds.  The flow
matrix stores exact rationals.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ContractError, SizeGuardError
from .flow import (FlowInstance, decompose_flow, default_height, exact_max_flow,
                   extract_sparse_level_cut, push_relabel_bounded)
from .graph import CutCertificate, Graph, Weighting, as_weighting, conductance, degrees, induced_subgraph, reverse
from .witness import RoutedBatch, Witness, build_witness

EARLY = "EarlyTermination"
NEAR = "NearExpander"


def as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def rounds_for(n: int, W: int, c_T=10) -> int:
    """T = ceil(c_T · log2 n · log2(nW))."""
    n = max(n, 2)
    return max(1, math.ceil(float(c_T) * math.log2(n) * math.log2(n * max(W, 1))))


# flow matrix


@dataclass
class RoundMatrix:
    d_prev: dict  # u -> Fraction, over A_{t-1}
    d_new: dict  # u -> Fraction, over A_{t-1} (zero when deleted)
    split: dict  # (row index, column index) -> Fraction; u∘ = u, u× = N + u


class FlowMatrixImplicit:
    """𝔽_t kept as F_0 and per-round factors, F_t = B_t F_{t-1} C_t.

    ``C_t`` rescales the columns (the 𝔽' step) and ``B_t`` mixes the rows
    along the split matching.  Products with a vector cost O(nnz) per
    round; :meth:`materialize` rebuilds the dense matrix exactly.
    """

    MAX_EXACT = 64
    DENSE_LIMIT = 256  # below this many vertices a dense float copy is kept up to date

    def __init__(self, N: int, d0: Sequence[Fraction]):
        self.N = N
        self.d0 = [Fraction(x) for x in d0]
        self.rounds: list[RoundMatrix] = []
        self._float_ops: list = []
        self._dense = None
        self._dense_t = 0

    def __len__(self):
        return len(self.rounds)

    def append(self, rm: RoundMatrix):
        self.rounds.append(rm)
        self._float_ops.append(None)

    # factor construction, shared by the float and exact paths

    def _factors(self, t: int, zero, conv):
        rm = self.rounds[t - 1]
        N = self.N
        B = defaultdict(lambda: zero)
        C = defaultdict(lambda: zero)
        recv = defaultdict(lambda: zero)
        for (a, b), x in rm.split.items():
            recv[a] += conv(x)
        active = rm.d_prev
        for u in range(N):
            if u not in active:
                B[(u, u)] += 1
                B[(N + u, N + u)] += 1
                C[(u, u)] += 1
                C[(N + u, N + u)] += 1
                continue
            dp = conv(active[u])
            r = conv(rm.d_new[u]) / dp
            C[(u, u)] += r
            C[(u, N + u)] += 1 - r
            C[(N + u, N + u)] += 1
            B[(u, u)] += r - recv[u] / (2 * dp)
            B[(N + u, N + u)] += 1
            B[(N + u, u)] += (1 - r) - recv[N + u] / (2 * dp)
        for (a, b), x in rm.split.items():
            base = a % N
            B[(b, base)] += conv(x) / (2 * conv(active[base]))
        return B, C

    def _float(self, t):
        ops = self._float_ops[t - 1]
        if ops is None:
            B, C = self._factors(t, 0.0, float)
            n2 = 2 * self.N

            def mat(D):
                keys = list(D)
                rows = [k[0] for k in keys]
                cols = [k[1] for k in keys]
                return sp.csr_matrix(([D[k] for k in keys], (rows, cols)), shape=(n2, n2))
            ops = (mat(B), mat(C))
            self._float_ops[t - 1] = ops
        return ops

    def matvec(self, x, t: int | None = None, transpose: bool = False) -> np.ndarray:
        """𝔽_t x (or 𝔽_tᵀ x) in floating point."""
        t = len(self.rounds) if t is None else t
        if self.N <= self.DENSE_LIMIT and t >= self._dense_t:
            F = self._dense_at(t)
            return F.T @ np.asarray(x, dtype=float) if transpose else F @ np.asarray(x, dtype=float)
        y = np.asarray(x, dtype=float).copy()
        f0 = np.array([float(v) for v in self.d0] + [0.0] * self.N)
        if not transpose:
            for s in range(t, 0, -1):
                y = self._float(s)[1] @ y
            y = f0 * y
            for s in range(1, t + 1):
                y = self._float(s)[0] @ y
        else:
            for s in range(t, 0, -1):
                y = self._float(s)[0].T @ y
            y = f0 * y
            for s in range(1, t + 1):
                y = self._float(s)[1].T @ y
        return y

    def _dense_at(self, t: int) -> np.ndarray:
        if self._dense is None:
            self._dense = np.diag([float(v) for v in self.d0] + [0.0] * self.N)
            self._dense_t = 0
        while self._dense_t < t:
            B, C = self._float(self._dense_t + 1)
            self._dense = B @ np.asarray(C.T @ self._dense.T).T
            self._dense_t += 1
        return self._dense

    def materialize_float(self, t: int | None = None) -> np.ndarray:
        t = len(self.rounds) if t is None else t
        F = np.diag([float(v) for v in self.d0] + [0.0] * self.N)
        for s in range(1, t + 1):
            B, C = self._float(s)
            F = B @ (F @ C.toarray())
        return F

    def materialize(self, t: int | None = None) -> list:
        """Exact dense 𝔽_t over Ā × Ā (index u∘ = u, u× = N + u)."""
        t = len(self.rounds) if t is None else t
        F = None
        for _, F in zip(range(t + 1), self.iter_exact()):
            pass
        return F

    def iter_exact(self):
        """Yield the exact 𝔽_0, 𝔽_1, ... in turn, one factor update per step."""
        if self.N > self.MAX_EXACT:
            raise SizeGuardError(f"exact materialization limited to {self.MAX_EXACT} vertices")
        n2 = 2 * self.N
        zero = Fraction(0)
        F = [[zero] * n2 for _ in range(n2)]
        for v, x in enumerate(self.d0):
            F[v][v] = x
        yield F
        for s in range(1, len(self.rounds) + 1):
            B, C = self._factors(s, zero, Fraction)
            # F' = F C, column by column
            cols = defaultdict(list)
            for (i, j), c in C.items():
                if c:
                    cols[j].append((i, c))
            Fp = [[zero] * n2 for _ in range(n2)]
            for j, terms in cols.items():
                for row_in, row_out in zip(F, Fp):
                    acc = zero
                    for i, c in terms:
                        if row_in[i]:
                            acc += row_in[i] * c
                    row_out[j] = acc
            rows = defaultdict(list)
            for (i, j), c in B.items():
                if c:
                    rows[i].append((j, c))
            Fn = [[zero] * n2 for _ in range(n2)]
            for i, terms in rows.items():
                out = Fn[i]
                for j, c in terms:
                    src = Fp[j]
                    for k in range(n2):
                        if src[k]:
                            out[k] += c * src[k]
            F = Fn
            yield F


def potential(impl: FlowMatrixImplicit, t: int, direction: str = "row", F=None) -> Fraction:
    """ψ(t) (rows) or its column analogue, exactly, over A_t."""
    if F is None:
        F = impl.materialize(t)
    if t == 0:
        d = {u: x for u, x in enumerate(impl.d0) if x > 0}
    else:
        d = {u: x for u, x in impl.rounds[t - 1].d_new.items() if x > 0}
    A = sorted(d)
    if not A:
        return Fraction(0)
    total = sum(d.values())
    if direction == "row":
        get = lambda u, v: F[u][v]
    elif direction == "column":
        get = lambda u, v: F[v][u]
    else:
        raise ValueError("direction must be 'row' or 'column'")
    mu = {v: sum(get(u, v) for u in A) / total for v in A}
    psi = Fraction(0)
    for u in A:
        du = d[u]
        acc = Fraction(0)
        for v in A:
            diff = get(u, v) / du - mu[v]
            acc += diff * diff / d[v]
        psi += du * acc
    return psi


def potential_float(F: np.ndarray, d: dict, direction: str = "row") -> float:
    A = sorted(u for u, x in d.items() if x > 0)
    if not A:
        return 0.0
    dv = np.array([float(d[u]) for u in A])
    blk = F[np.ix_(A, A)]
    if direction == "column":
        blk = blk.T
    mu = blk.sum(axis=0) / dv.sum()
    diff = blk / dv[:, None] - mu[None, :]
    return float((dv[:, None] * diff * diff / dv[None, :]).sum())


# bisection


@dataclass
class Bisection:
    L: dict  # vertex -> portion (units)
    R: dict
    split: int | None
    eta: float
    proj: dict


def weighted_bisection(proj: dict, weight: dict) -> Bisection:
    """Sort by projection and cut the weight exactly in half.

    ``weight`` values are integers with an even total; at most one vertex is
    divided between the sides.
    """
    order = sorted(weight, key=lambda u: (proj[u], u))
    total = sum(weight[u] for u in order)
    if total % 2:
        raise ContractError("bisection needs an even total weight")
    half = total // 2
    L, R = {}, {}
    cum = 0
    split = None
    for u in order:
        w = weight[u]
        if cum + w <= half:
            L[u] = w
            cum += w
        elif cum < half:
            a = half - cum
            L[u] = a
            R[u] = w - a
            split = u
            cum += w
        else:
            R[u] = w
    if split is not None:
        eta = proj[split]
    else:
        lo = max((proj[u] for u in L), default=None)
        hi = min((proj[u] for u in R), default=None)
        eta = lo if hi is None else hi if lo is None else (lo + hi) / 2
    return Bisection(L, R, split, eta, dict(proj))


def bisection_lemma_witness(values, weights, eta, left_mask):
    """Search for the certifying subset of the bisection lemma.

    ``values``/``weights`` describe a weighted multiset (weights act as
    multiplicities, a split element appears on both sides with its two
    portions); ``left_mask[i]`` tells the side of entry ``i``.  Returns the
    index set found or ``None``.  Exhaustive over subsets of each side.
    """
    values = [Fraction(v) for v in values]
    weights = [Fraction(w) for w in weights]
    eta = Fraction(eta)
    total_w = sum(weights)
    mean = sum(v * w for v, w in zip(values, weights)) / total_w
    spread = sum(w * (v - mean) ** 2 for v, w in zip(values, weights))
    for side in (True, False):
        idx = [i for i in range(len(values)) if left_mask[i] == side and weights[i] > 0]
        for r in range(len(idx), 0, -1):
            for S in combinations(idx, r):
                if all(9 * (values[i] - eta) ** 2 >= (values[i] - mean) ** 2 for i in S) and \
                        16 * sum(weights[i] * (values[i] - mean) ** 2 for i in S) >= spread:
                    return list(S)
    if spread == 0:
        return []
    return None


# matching player


@dataclass
class RawCut:
    S: frozenset
    host: frozenset
    kind: str  # "mincut" or "level"
    cap_out: Fraction = Fraction(0)  # scaled capacity leaving the source side (real units)
    gap: Fraction = Fraction(0)  # Δ(S) - ∇(S) on the source side (real units)
    complemented: bool = False
    extra_source_bound: Fraction = Fraction(0)


@dataclass
class MatchingResult:
    M: dict  # (receiver, sender) -> units
    batches: list
    cuts: list
    load: list  # per edge of G, real units


def _solve_instance(G: Graph, H: Graph, src, snk, K, phi, mode, d0u, t, kappa, keep_paths, b_host):
    scale = 1 / phi
    # K is a multiple of φ's numerator, so c·K/φ is an integer
    mult = K * phi.denominator // phi.numerator
    cap = [c * mult for _, _, c in H.edges]
    h = default_height(H.n, G.W, phi, kappa) if mode == "push-relabel" else max(1, H.n)
    inst = FlowInstance(H, src, snk, cap, h, scale, K)
    M = defaultdict(int)
    cut = None
    host = frozenset(H.origin)
    if mode == "exact":
        r = exact_max_flow(inst)
        used, absorbed, flow = r.src_used, r.absorbed, r.flow
        self_part = [min(a, b) for a, b in zip(used, absorbed)]
        supply = [a - s for a, s in zip(used, self_part)]
        demand = [b - s for b, s in zip(absorbed, self_part)]
        dec = decompose_flow(H, flow, supply, demand, keep_edges=keep_paths)
        matched = [p.amount for p in dec.paths]
        if r.value < sum(src):
            S = r.cut
            cap_out = sum(cap[j] for j, (u, v, _) in enumerate(H.edges) if u in S and v not in S)
            gapv = sum(src[v] for v in S) - sum(snk[v] for v in S)
            Sg = frozenset(H.origin[v] for v in S)
            comp = 3 * sum(d0u[g] for g in Sg) > 2 * sum(d0u[g] for g in host)
            cut = RawCut(host - Sg if comp else Sg, host, "mincut", Fraction(cap_out, K),
                         Fraction(gapv, K), comp)
    else:
        res = push_relabel_bounded(inst, gap=True)
        st = res.state
        flow = st.flow
        e = [a + x for a, x in zip(st.absorbed, st.excess)]
        self_part = [min(a, b) for a, b in zip(src, e)]
        supply = [a - s for a, s in zip(src, self_part)]
        demand = [b - s for b, s in zip(e, self_part)]
        self_part = [min(s, a) for s, a in zip(self_part, st.absorbed)]
        budget = [a - s for a, s in zip(st.absorbed, self_part)]
        dec = decompose_flow(H, flow, supply, demand, keep_edges=keep_paths)
        matched = []
        for p in dec.paths:
            take = min(p.amount, budget[p.dst])
            budget[p.dst] -= take
            matched.append(take)
        if not res.feasible:
            lc = extract_sparse_level_cut(st, b_host, phi)
            Sg = frozenset(H.origin[v] for v in lc.S)
            cut = RawCut(Sg, host, "level", extra_source_bound=lc.extra_source_bound)
    for v, s in enumerate(self_part):
        if s:
            g = H.origin[v]
            M[(g, g)] += s
    endpoints = []
    for p, amt in zip(dec.paths, matched):
        s, r = H.origin[p.src], H.origin[p.dst]
        endpoints.append((s, r))
        if amt:
            M[(r, s)] += amt
    batch = RoutedBatch(t, H, dec.transcript, endpoints, matched, K, list(flow),
                        [p.edges for p in dec.paths] if keep_paths else [])
    load = [Fraction(0)] * G.m
    for j, f in enumerate(flow):
        if f:
            load[H.edge_origin[j]] += Fraction(f, K)
    return M, batch, cut, load


def matching_player(G: Graph, host: Sequence[int], bis: Bisection, phi: Fraction, mode: str,
                    K: int, d0u: Sequence[int], t: int = 0, kappa=1, keep_paths=False) -> MatchingResult:
    """Route L into R and R into L on ``G[host]`` with capacities c/φ."""
    H = induced_subgraph(G, host)
    local = {g: i for i, g in enumerate(H.origin)}
    n = H.n
    left = [0] * n
    right = [0] * n
    for u, a in bis.L.items():
        left[local[u]] = a
    for u, a in bis.R.items():
        right[local[u]] = a
    b_host = Weighting([d0u[g] for g in H.origin], K)
    M = defaultdict(int)
    batches, cuts = [], []
    load = [Fraction(0)] * G.m
    for src, snk in ((left, right), (right, left)):
        Mi, batch, cut, li = _solve_instance(G, H, src, snk, K, phi, mode, d0u, t, kappa, keep_paths, b_host)
        for k, x in Mi.items():
            M[k] += x
        batches.append(batch)
        if cut is not None:
            cuts.append(cut)
        for j, x in enumerate(li):
            load[j] += x
    return MatchingResult(dict(M), batches, cuts, load)


# round state and the main loop


@dataclass
class RoundLog:
    t: int
    L: dict
    R: dict
    split: int | None
    eta: float
    raw_cuts: list
    appended: list
    deferred: frozenset
    d_active: Fraction
    d_deleted: Fraction
    d_cut: Fraction


@dataclass
class RoundState:
    G: Graph
    d0: Weighting
    phi: Fraction
    tau: Fraction
    T: int
    K: int
    d0u: list
    du: list
    A: set
    D: set
    cut_vertices: set = field(default_factory=set)
    cuts: list = field(default_factory=list)
    t: int = 0
    logs: list = field(default_factory=list)
    matrix: FlowMatrixImplicit | None = None
    batches: list = field(default_factory=list)
    load: list = field(default_factory=list)

    def double_units(self):
        self.K *= 2
        self.d0u = [2 * x for x in self.d0u]
        self.du = [2 * x for x in self.du]

    def threshold_ok(self, active_units: int) -> bool:
        """d_t(A_t) >= (1 - 100/τ)·d_0(V)."""
        return active_units * self.tau >= (self.tau - 100) * sum(self.d0u)

    def active_units(self):
        return sum(self.du[u] for u in self.A)

    def host(self):
        return [v for v in range(self.G.n) if v not in self.cut_vertices]

    def real(self, units) -> Fraction:
        return Fraction(units, self.K)

    def weight0(self, S) -> Fraction:
        return Fraction(sum(self.d0u[v] for v in S), self.K)


@dataclass
class CutMatchingOutcome:
    tag: str
    cuts: list
    A_star: frozenset | None
    witness: Witness | None
    rounds_run: int
    T: int
    congestion: Fraction
    congestion_bounds: tuple
    state: RoundState

    @property
    def near_expander(self):
        return self.tag == NEAR


def cut_player(state: RoundState, rng: np.random.Generator, t: int, T: int) -> Bisection:
    A = sorted(state.A)
    if not A:
        raise ContractError("cut player needs a non-empty active set")
    N = state.G.n
    dprev = [float(state.real(state.du[u])) for u in range(N)]
    r = rng.standard_normal(len(A))
    norm = np.linalg.norm(r)
    r = r / norm if norm > 0 else r
    x = np.zeros(2 * N)
    for u, ru in zip(A, r):
        x[u] = ru / math.sqrt(dprev[u])
    y = state.matrix.matvec(x, t - 1, transpose=(2 * t > T))
    proj = {u: float(y[u] / dprev[u]) for u in A}
    return weighted_bisection(proj, {u: state.du[u] for u in A})


def _certify(state: RoundState, S: frozenset, host: frozenset, bound: Fraction, kind: str) -> CutCertificate:
    d = Weighting(state.d0u, state.K)
    value = conductance(state.G, d, S, universe=host)
    return CutCertificate(frozenset(S), frozenset(host), value, Fraction(bound), kind)


def _append_cut(state: RoundState, S, bound, kind) -> CutCertificate:
    host = frozenset(state.host())
    cert = _certify(state, frozenset(S), host, bound, kind)
    state.cuts.append(cert)
    state.cut_vertices |= set(S)
    state.A -= set(S)
    state.D -= set(S)
    for v in S:
        state.du[v] = 0
    return cert


def reconcile_cuts(state: RoundState, raw: list, bounds: dict):
    """Append this round's sparse cuts; returns (appended certificates, deferred set)."""
    raw = sorted(raw, key=lambda c: (state.weight0(c.S), sorted(c.S)))
    appended, deferred = [], set()
    if not raw:
        return appended, frozenset()

    def triggers(S):
        return not state.threshold_ok(sum(state.du[u] for u in state.A - set(S)))

    if len(raw) == 1:
        c = raw[0]
        appended.append(_append_cut(state, c.S, bounds[c.kind], c.kind))
        return appended, frozenset()
    c1, c2 = raw
    S1, S2 = c1.S, c2.S
    if triggers(S1):
        appended.append(_append_cut(state, S1, bounds[c1.kind], c1.kind))
        return appended, frozenset()
    if triggers(S2):
        appended.append(_append_cut(state, S2, bounds[c2.kind], c2.kind))
        return appended, frozenset()
    rest = S2 - S1
    three = 3 * state.phi
    if 2 * state.weight0(rest) >= state.weight0(S2):
        appended.append(_append_cut(state, S1, bounds[c1.kind], c1.kind))
        if rest:
            appended.append(_append_cut(state, rest, three, "reconcile"))
        return appended, frozenset()
    inter = S1 & S2
    host = frozenset(state.host())
    cert = None
    if inter and host - inter:
        try:
            cert = _certify(state, inter, host, three, "reconcile")
        except ZeroDivisionError:
            cert = None
    if cert is not None and cert.value <= three:
        appended.append(_append_cut(state, inter, three, "reconcile"))
        deferred = set(S1 ^ S2)
    else:
        # the two cuts are sparse in opposite directions: keep S1, defer the rest of S2
        appended.append(_append_cut(state, S1, bounds[c1.kind], c1.kind))
        deferred = set(rest)
    deferred -= state.cut_vertices
    return appended, frozenset(deferred)


def update_round(state: RoundState, M: dict, deferred: frozenset, A_prev: Sequence[int], d_prev_units: dict):
    """d_t from the matching, the half rule, and the split matching 𝕄_t."""
    N = state.G.n
    recv = defaultdict(int)
    sent = defaultdict(int)
    for (a, b), x in M.items():
        recv[a] += x
        sent[b] += x
    new = {}
    for u in A_prev:
        if u in state.cut_vertices or u in deferred:
            new[u] = 0
            continue
        val = min(recv[u], sent[u])
        if 2 * val < state.d0u[u]:
            val = 0
        new[u] = val
    for u in A_prev:
        state.du[u] = new[u]
        if new[u] == 0:
            state.A.discard(u)
            if u not in state.cut_vertices:
                state.D.add(u)
    K = state.K
    split = {}
    for (a, b), x in M.items():
        if not x:
            continue
        al = Fraction(new[a], recv[a])
        be = Fraction(new[b], sent[b])
        xr = Fraction(x, K)
        for ra, fa in ((a, al), (N + a, 1 - al)):
            for cb, fb in ((b, be), (N + b, 1 - be)):
                val = xr * fa * fb
                if val:
                    split[(ra, cb)] = split.get((ra, cb), 0) + val
    rm = RoundMatrix({u: Fraction(d_prev_units[u], K) for u in A_prev},
                     {u: Fraction(new[u], K) for u in A_prev}, split)
    _check_split(rm, N)
    state.matrix.append(rm)
    return rm


def _check_split(rm: RoundMatrix, N: int):
    rows = defaultdict(Fraction)
    cols = defaultdict(Fraction)
    for (a, b), x in rm.split.items():
        rows[a] += x
        cols[b] += x
    for u, dn in rm.d_new.items():
        if dn and (rows[u] != dn or cols[u] != dn):
            raise AssertionError(f"split matching sums at {u} differ from d_t")
        if cols[N + u] > rm.d_prev[u] - dn:
            raise AssertionError(f"deleted half of {u} sends too much")


def grafting(state: RoundState, mode: str):
    """Route deleted-vertex weight into A forward and backward; returns the cuts found."""
    found = []
    for direction in ("forward", "reverse"):
        D = sorted(state.D)
        if not D:
            break
        host = state.host()
        H = induced_subgraph(state.G, host)
        if direction == "reverse":
            H = reverse(H)
        local = {g: i for i, g in enumerate(H.origin)}
        K = state.K
        src = [0] * H.n
        snk = [0] * H.n
        for u in D:
            src[local[u]] = state.d0u[u]
        for u in state.A:
            snk[local[u]] = state.d0u[u]
        scale = 1 / state.phi
        cap = [int(c * scale * K) for _, _, c in H.edges]
        inst = FlowInstance(H, src, snk, cap, max(1, H.n), scale, K)
        r = exact_max_flow(inst)
        for j, f in enumerate(r.flow):
            if f:
                state.load[H.edge_origin[j]] += Fraction(f, K)
        if r.value == sum(src):
            continue
        S = frozenset(H.origin[v] for v in r.cut)
        hs = frozenset(host)
        if 2 * state.weight0(S) > state.weight0(hs):
            S = hs - S
        found.append(_append_cut(state, S, state.phi, "graft"))
        if not state.threshold_ok(state.active_units()):
            return found, True
    return found, False


def run_cut_matching(G: Graph, d, phi, tau=10 ** 4, seed=0, mode: str = "exact", c_T=10,
                     T: int | None = None, kappa=1, keep_paths: bool = False) -> CutMatchingOutcome:
    """Play the cut-matching game on ``G`` with weighting ``d``."""
    if mode not in ("exact", "push-relabel"):
        raise ValueError(f"unknown mode {mode!r}")
    G = Graph(G.n, G.edges, G.W)
    d = as_weighting(d)
    if len(d) != G.n:
        raise ContractError("weighting length does not match the graph")
    phi = as_fraction(phi)
    if not 0 < phi < 1:
        raise ContractError("phi must lie in (0, 1)")
    tau = as_fraction(tau)
    if tau < 10 ** 4:
        raise ContractError("tau must be at least 10^4")
    if T is None:
        T = rounds_for(G.n, G.W, c_T)
    if mode == "push-relabel":
        deg = degrees(G)
        if any(d.num[v] * kappa < deg[v] * d.den for v in range(G.n)):
            raise ContractError("push-relabel mode needs d >= deg/kappa")
    K = d.den * phi.numerator * 2
    d0u = [x * (K // d.den) for x in d.num]
    support = {v for v in range(G.n) if d0u[v] > 0}
    state = RoundState(G, d, phi, tau, T, K, d0u, list(d0u), set(support), set())
    state.matrix = FlowMatrixImplicit(G.n, [Fraction(x, K) for x in d0u])
    state.load = [Fraction(0)] * G.m
    rng = np.random.Generator(np.random.Philox(seed))
    bounds = {"mincut": phi, "level": Fraction(11, 10) * phi}
    if len(support) <= 1:
        return CutMatchingOutcome(NEAR, [], frozenset(range(G.n)), build_witness([], G.n, phi, 0),
                                  0, T, Fraction(0), _bounds(T, phi), state)
    t = 0
    tag = None
    while t < T and state.threshold_ok(state.active_units()):
        t += 1
        state.t = t
        if state.active_units() % 2:
            state.double_units()
        A_prev = sorted(state.A)
        d_prev = {u: state.du[u] for u in A_prev}
        bis = cut_player(state, rng, t, T)
        mr = matching_player(G, state.host(), bis, phi, mode, state.K, state.d0u, t, kappa, keep_paths)
        state.batches.extend(mr.batches)
        for j, x in enumerate(mr.load):
            state.load[j] += x
        appended, deferred = reconcile_cuts(state, mr.cuts, bounds)
        update_round(state, mr.M, deferred, A_prev, d_prev)
        state.logs.append(RoundLog(t, bis.L, bis.R, bis.split, bis.eta, mr.cuts, appended, deferred,
                                   state.real(state.active_units()), state.weight0(state.D),
                                   state.weight0(state.cut_vertices)))
    if not state.threshold_ok(state.active_units()):
        tag = EARLY
    else:
        _, early = grafting(state, mode)
        tag = EARLY if early else NEAR
    congestion = max((x / G.edges[j][2] for j, x in enumerate(state.load)), default=Fraction(0))
    A_star = frozenset(state.host()) if tag == NEAR else None
    wit = build_witness(state.batches, G.n, phi, t) if tag == NEAR else None
    return CutMatchingOutcome(tag, list(state.cuts), A_star, wit, t, T, congestion, _bounds(T, phi), state)


def _bounds(T, phi):
    return (7 * T / phi, 26 * T / phi)


def potential_trace(outcome: CutMatchingOutcome) -> list:
    """(t, ψ(t), ψ⃖(t)) for t = 0..rounds in floating point, one dense update per round."""
    impl = outcome.state.matrix
    F = np.diag([float(v) for v in impl.d0] + [0.0] * impl.N)
    d = {u: x for u, x in enumerate(impl.d0) if x > 0}
    out = [(0, potential_float(F, d, "row"), potential_float(F, d, "column"))]
    for t in range(1, len(impl) + 1):
        B, C = impl._float(t)
        F = B @ np.asarray(C.T @ F.T).T
        d = {u: x for u, x in impl.rounds[t - 1].d_new.items() if x > 0}
        out.append((t, potential_float(F, d, "row"), potential_float(F, d, "column")))
    return out
