"""Brute-force ground truth for small graphs.

Cut enumeration is vectorised with numpy over all 2^n subsets; the final
comparison between candidate minima is redone in exact rationals so the
answer never depends on float rounding.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import SizeGuardError
from .graph import Graph, Weighting, as_weighting, conductance, induced_subgraph, regularized_weighting

ENUM_LIMIT = 16
COMPONENT_LIMIT = 14


def _masks(k: int) -> np.ndarray:
    """Row i holds the bits of i over k columns."""
    idx = np.arange(1 << k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k, dtype=np.int64)) & 1).astype(bool)


def _int_array(vals):
    vals = [int(x) for x in vals]
    if vals and max(abs(x) for x in vals) * max(1, len(vals)) >= 2 ** 52:
        return np.array(vals, dtype=object)
    return np.array(vals, dtype=np.int64)


def _argmin_ratio(num: np.ndarray, den: np.ndarray, scale: int):
    """Index of the smallest num/den·scale among rows with den > 0, exactly."""
    ok = den > 0
    if not ok.any():
        return None, None
    idx = np.nonzero(ok)[0]
    approx = num[idx].astype(float) / den[idx].astype(float)
    lo = approx.min()
    close = idx[approx <= lo * (1 + 1e-9) + 1e-300]
    best = None
    best_i = None
    for i in close:
        val = Fraction(int(num[i]) * scale, int(den[i]))
        if best is None or val < best or (val == best and i < best_i):
            best, best_i = val, int(i)
    return best, best_i


def min_conductance(G: Graph, d, limit: int = ENUM_LIMIT):
    """Exact minimum of Φ_{G,d}(S) over proper non-empty S with positive lighter side.

    Returns ``(value, S)``; both are ``None`` when no cut has positive weight
    on both sides.
    """
    if G.n > limit:
        raise SizeGuardError(f"cut enumeration limited to {limit} vertices, got {G.n}")
    d = as_weighting(d)
    n = G.n
    if n < 2:
        return None, None
    X = _masks(n)
    fwd, bwd = _crossing(G, X, X)
    dn = _int_array(d.num)
    dS = X.astype(np.int64) @ dn if dn.dtype != object else X.astype(object) @ dn
    dR = sum(d.num) - dS
    num = np.minimum(fwd, bwd)
    den = np.minimum(dS, dR)
    val, i = _argmin_ratio(num, den, d.den)
    if val is None:
        return None, None
    return val, frozenset(np.nonzero(X[i])[0].tolist())


def _crossing(G: Graph, X_tail: np.ndarray, X_head: np.ndarray):
    """Capacities S -> rest and rest -> S for every row of the membership matrix."""
    if not G.edges:
        z = np.zeros(X_tail.shape[0], dtype=np.int64)
        return z, z.copy()
    us = np.array([u for u, _, _ in G.edges])
    vs = np.array([v for _, v, _ in G.edges])
    cs = _int_array([c for _, _, c in G.edges])
    inU = X_tail[:, us]
    inV = X_head[:, vs]
    if cs.dtype == object:
        return (inU & ~inV).astype(object) @ cs, (~inU & inV).astype(object) @ cs
    return (inU & ~inV).astype(np.int64) @ cs, (~inU & inV).astype(np.int64) @ cs


def near_expansion(G: Graph, A: Iterable[int], d, limit: int = ENUM_LIMIT):
    """min over S ⊂ A of min(δ(S, V∖S), δ(V∖S, S)) / min(d(S), d(A∖S)).

    Edges of the whole graph count.  Returns ``None`` when no S has positive
    weight on both sides.
    """
    A = sorted(set(A))
    if len(A) > limit:
        raise SizeGuardError(f"subset enumeration limited to {limit} vertices, got {len(A)}")
    d = as_weighting(d)
    if len(A) < 2:
        return None
    k = len(A)
    sub = _masks(k)
    X = np.zeros((sub.shape[0], G.n), dtype=bool)
    X[:, A] = sub
    fwd, bwd = _crossing(G, X, X)
    dn = _int_array([d.num[v] for v in A])
    dS = sub.astype(np.int64) @ dn if dn.dtype != object else sub.astype(object) @ dn
    dR = d.numer(A) - dS
    val, _ = _argmin_ratio(np.minimum(fwd, bwd), np.minimum(dS, dR), d.den)
    return val


def verify_near_expander(G: Graph, A, phi, d, limit: int = ENUM_LIMIT) -> bool:
    val = near_expansion(G, A, d, limit)
    return val is None or val >= Fraction(phi)


def verify_expander(G: Graph, d, phi, limit: int = ENUM_LIMIT) -> bool:
    val, _ = min_conductance(G, d, limit)
    return val is None or val >= Fraction(phi)


def verify_no_sparse_cut(G: Graph, d, kappa, limit: int = ENUM_LIMIT) -> bool:
    """Necessary condition for mixing with congestion κ: no cut sparser than 1/κ."""
    return verify_expander(G, d, 1 / Fraction(kappa), limit)


def min_cut_value(inst) -> Fraction:
    """Minimum s-t cut of a flow instance by enumerating every vertex subset."""
    G = inst.host
    if G.n > ENUM_LIMIT:
        raise SizeGuardError(f"cut enumeration limited to {ENUM_LIMIT} vertices, got {G.n}")
    best = None
    for mask in range(1 << G.n):
        side = [(mask >> v) & 1 for v in range(G.n)]
        # source side holds the vertices whose bit is set
        val = sum(inst.src[v] for v in range(G.n) if not side[v])
        val += sum(inst.snk[v] for v in range(G.n) if side[v])
        val += sum(inst.cap[j] for j, (u, v, _) in enumerate(G.edges) if side[u] and not side[v])
        if best is None or val < best:
            best = val
    return Fraction(best, inst.unit)


def find_cycle(n: int, arcs: Iterable[tuple[int, int, int]]):
    """A directed cycle as a list of arc ids, or ``None``.  ``arcs`` holds (id, tail, head)."""
    arcs = list(arcs)
    out = [[] for _ in range(n)]
    indeg = [0] * n
    for j, u, v in arcs:
        out[u].append((j, v))
        indeg[v] += 1
    q = deque(v for v in range(n) if indeg[v] == 0)
    seen = 0
    while q:
        u = q.popleft()
        seen += 1
        for _, v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                q.append(v)
    if seen == n:
        return None
    # every leftover vertex has a leftover in-arc, so walking backwards must repeat
    left = {v for v in range(n) if indeg[v] > 0}
    back = {}
    for j, u, v in arcs:
        if u in left and v in left and v not in back:
            back[v] = (j, u)
    start = min(left)
    order, pos = [], {}
    v = start
    while v not in pos:
        pos[v] = len(order)
        j, u = back[v]
        order.append((j, u, v))
        v = u
    cyc = order[pos[v]:]
    cyc.reverse()
    return [j for j, _, _ in cyc]


def acyclicity_check(G: Graph, E_D: Iterable[int]) -> bool:
    return find_cycle(G.n, ((j, G.edges[j][0], G.edges[j][1]) for j in sorted(set(E_D)))) is None


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    witness: object = None


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    inter_capacity: int = 0
    inter_bound: Fraction | None = None
    worst_component: tuple | None = None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name, ok, detail="", witness=None):
        self.checks.append(Check(name, bool(ok), detail, witness))

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def lines(self):
        out = []
        for c in self.checks:
            tag = "ok" if c.ok else "FAIL"
            out.append(f"{tag} {c.name}" + (f": {c.detail}" if c.detail else ""))
        return out


def inter_component_capacity(G: Graph, parts, E_D) -> int:
    label = {}
    for i, P in enumerate(parts):
        for v in P:
            label[v] = i
    ex = set(E_D)
    return sum(c for j, (u, v, c) in enumerate(G.edges)
               if j not in ex and label.get(u) != label.get(v))


def scope_weighting(G: Graph, scope, explicit: Weighting | None = None):
    """(subgraph, weighting) a certificate or component was produced under."""
    H = induced_subgraph(G, scope)
    if explicit is not None:
        return H, explicit.restrict(sorted(set(scope)))
    if H.m == 0:
        return H, Weighting([0] * H.n, 1)
    return H, regularized_weighting(H)


def _scope_ok(G: Graph, result, key) -> bool:
    if not isinstance(key, int) or not 0 <= key < len(result.scopes):
        return False
    return all(isinstance(v, int) and 0 <= v < G.n for v in result.scopes[key])


def validate_decomposition(G: Graph, result, mode: str | None = None, bounds: dict | None = None,
                           component_limit: int = COMPONENT_LIMIT) -> ValidationReport:
    """Check a decomposition result against ``G``.

    ``bounds`` may carry ``inter_capacity`` (an upper bound on the capacity
    between components outside E_D).  Components of at most
    ``component_limit`` vertices with a recorded certified φ' are checked by
    enumerating every cut.
    """
    bounds = bounds or {}
    mode = mode or result.mode
    rep = ValidationReport()
    # partition
    seen = {}
    dup = None
    for i, P in enumerate(result.components):
        for v in P:
            if v in seen and dup is None:
                dup = (v, seen[v], i)
            seen[v] = i
    missing = sorted(set(range(G.n)) - set(seen))
    extra = sorted(set(seen) - set(range(G.n)))
    if dup:
        rep.add("partition", False, f"vertex {dup[0]} in components {dup[1]} and {dup[2]}", dup)
    elif missing or extra:
        rep.add("partition", False, f"missing {missing[:10]} unknown {extra[:10]}", (missing, extra))
    else:
        rep.add("partition", True, f"{len(result.components)} components")
    # acyclicity
    bad_ids = [j for j in result.excluded_edges if not 0 <= j < G.m]
    if bad_ids:
        rep.add("acyclic", False, f"unknown edge ids {bad_ids[:10]}", bad_ids)
    else:
        cyc = find_cycle(G.n, ((j, G.edges[j][0], G.edges[j][1]) for j in sorted(set(result.excluded_edges))))
        if cyc is None:
            rep.add("acyclic", True, f"{len(set(result.excluded_edges))} excluded edges")
        else:
            walk = " -> ".join(f"{G.edges[j][0]}" for j in cyc) + f" -> {G.edges[cyc[0]][0]}"
            rep.add("acyclic", False, f"cycle through edges {cyc}: {walk}", cyc)
    explicit = result.explicit_weighting()
    # certificates
    cache = {}
    bad = []
    for i, cert in enumerate(result.certificates):
        key = cert.scope
        if not _scope_ok(G, result, key):
            bad.append((i, f"scope {key!r} is not a valid vertex set"))
            continue
        if key not in cache:
            cache[key] = scope_weighting(G, result.scopes[key], explicit)
        H, d = cache[key]
        local = {v: k for k, v in enumerate(sorted(result.scopes[key]))}
        try:
            S = [local[v] for v in cert.S]
            host = [local[v] for v in cert.host]
            got = conductance(H, d, S, universe=host)
        except Exception as exc:  # any failure to evaluate is a failed replay
            bad.append((i, f"does not evaluate: {exc}"))
            continue
        if got != cert.value:
            bad.append((i, f"recorded {cert.value}, recomputed {got}"))
        elif got > cert.bound:
            bad.append((i, f"conductance {got} above claimed bound {cert.bound}"))
    if bad:
        rep.add("certificates", False, f"certificate {bad[0][0]}: {bad[0][1]}", bad)
    else:
        rep.add("certificates", True, f"{len(result.certificates)} replayed exactly")
    # inter-component capacity
    if rep.checks[0].ok and not bad_ids:
        total = inter_component_capacity(G, result.components, result.excluded_edges)
        rep.inter_capacity = total
        lim = bounds.get("inter_capacity")
        if lim is not None:
            rep.inter_bound = Fraction(lim)
            rep.add("inter_capacity", total <= lim, f"{total} vs bound {Fraction(lim)}", total)
        else:
            rep.add("inter_capacity", True, f"{total} (no bound configured)", total)
    # small components
    if mode == "strong":
        fails = []
        checked = 0
        for i, comp in enumerate(result.component_info):
            P = result.components[i]
            if len(P) < 2 or comp.phi_cert is None or len(P) > component_limit:
                continue
            if not _scope_ok(G, result, comp.scope) or not set(P) <= set(result.scopes[comp.scope]):
                fails.append((i, sorted(P), None, comp.phi_cert))
                continue
            H, d = cache.get(comp.scope) or scope_weighting(G, result.scopes[comp.scope], explicit)
            local = sorted(result.scopes[comp.scope])
            pos = {v: k for k, v in enumerate(local)}
            sub = induced_subgraph(H, [pos[v] for v in P])
            dd = d.restrict([pos[v] for v in sorted(P)])
            val, S = min_conductance(sub, dd, limit=component_limit)
            checked += 1
            if val is not None and (rep.worst_component is None or val < rep.worst_component[1]):
                rep.worst_component = (i, val)
            if val is not None and val < comp.phi_cert:
                cut = sorted(sorted(P)[k] for k in S)
                fails.append((i, cut, val, comp.phi_cert))
        if fails:
            i, cut, val, want = fails[0]
            if val is None:
                rep.add("components", False, f"component {i} does not lie inside its recorded scope", fails)
            else:
                rep.add("components", False, f"component {i}: cut {cut} has conductance {val} < {want}", fails)
        else:
            rep.add("components", True, f"{checked} small components verified exhaustively")
    return rep
