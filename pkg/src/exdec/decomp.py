"""Weak and strong expander decomposition drivers.

Both drivers recurse over vertex subsets of the root graph.  Each sparse
cut (S, host) contributes the edges of its heavier boundary direction to
E_D; the lighter direction stays as inter-component capacity.  A final pass
moves further inter-component edges into E_D whenever that keeps D acyclic.

Strong mode recomputes the regularized weighting on every recursive
subgraph, so every certificate and component records the vertex set
("scope") whose weighting it was produced under.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .cutmatch import as_fraction, run_cut_matching
from .errors import ContractError, InputError
from .graph import Graph, Weighting, as_weighting, induced_subgraph, regularized_weighting
from .oracle import find_cycle, inter_component_capacity
from .trim import trim

FORMAT = "exdec-decomposition/1"


@dataclass(frozen=True)
class CertRecord:
    kind: str
    scope: int
    S: tuple
    host: tuple
    value: Fraction
    bound: Fraction


@dataclass(frozen=True)
class ComponentInfo:
    kind: str  # certified | near | singleton | vacuous
    scope: int | None
    phi_cert: Fraction | None


@dataclass
class DecompositionResult:
    mode: str
    n: int
    m: int
    phi: Fraction
    tau: Fraction
    seed: int
    params: dict
    components: list  # sorted tuples of root ids, sorted by smallest member
    component_info: list
    excluded_edges: list  # sorted root edge ids
    certificates: list
    scopes: list  # sorted tuples
    weighting: Weighting | None = None  # explicit weighting (weak mode); None means regularized per scope
    stats: dict = field(default_factory=dict)

    def explicit_weighting(self) -> Weighting | None:
        return self.weighting

    def partition_of(self):
        label = {}
        for i, P in enumerate(self.components):
            for v in P:
                label[v] = i
        return label

    # serialization

    def to_dict(self) -> dict:
        out = {
            "format": FORMAT,
            "mode": self.mode,
            "n": self.n,
            "m": self.m,
            "phi": _frac(self.phi),
            "tau": _frac(self.tau),
            "seed": self.seed,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "weighting": ({"kind": "regularized-per-scope"} if self.weighting is None else
                          {"kind": "explicit", "den": self.weighting.den, "num": list(self.weighting.num)}),
            "scopes": [list(s) for s in self.scopes],
            "components": [
                {"vertices": list(P), "kind": c.kind, "scope": c.scope,
                 "phi_cert": None if c.phi_cert is None else _frac(c.phi_cert)}
                for P, c in zip(self.components, self.component_info)],
            "excluded_edges": list(self.excluded_edges),
            "certificates": [
                {"kind": c.kind, "scope": c.scope, "S": list(c.S), "host": list(c.host),
                 "value": _frac(c.value), "bound": _frac(c.bound)}
                for c in self.certificates],
            "stats": {k: self.stats[k] for k in sorted(self.stats)},
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False) + "\n"

    def to_text(self) -> str:
        return dict_to_text(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DecompositionResult":
        if data.get("format") != FORMAT:
            raise InputError(f"unknown result format {data.get('format')!r}")
        w = data["weighting"]
        weighting = None if w["kind"] != "explicit" else Weighting(w["num"], w["den"])
        comps, info = [], []
        for c in data["components"]:
            comps.append(tuple(c["vertices"]))
            info.append(ComponentInfo(c["kind"], c["scope"],
                                      None if c["phi_cert"] is None else Fraction(c["phi_cert"])))
        certs = [CertRecord(c["kind"], c["scope"], tuple(c["S"]), tuple(c["host"]),
                            Fraction(c["value"]), Fraction(c["bound"])) for c in data["certificates"]]
        return cls(data["mode"], data["n"], data["m"], Fraction(data["phi"]), Fraction(data["tau"]),
                   data["seed"], dict(data["params"]), comps, info, list(data["excluded_edges"]), certs,
                   [tuple(s) for s in data["scopes"]], weighting, dict(data["stats"]))


def _frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _ids(xs) -> str:
    return " ".join(str(x) for x in xs)


def _parse_ids(s: str) -> list:
    return [int(x) for x in s.split()]


def dict_to_text(data: dict) -> str:
    """Line-oriented rendering of :meth:`DecompositionResult.to_dict`, field for field."""
    lines = [f"format {data['format']}", f"mode {data['mode']}", f"n {data['n']}", f"m {data['m']}",
             f"phi {data['phi']}", f"tau {data['tau']}", f"seed {data['seed']}"]
    for k, v in data["params"].items():
        lines.append(f"param {k} {json.dumps(v)}")
    w = data["weighting"]
    if w["kind"] == "explicit":
        lines.append(f"weighting explicit {w['den']} : {_ids(w['num'])}")
    else:
        lines.append(f"weighting {w['kind']}")
    lines.append(f"scopes {len(data['scopes'])}")
    for i, s in enumerate(data["scopes"]):
        lines.append(f"scope {i} : {_ids(s)}")
    lines.append(f"components {len(data['components'])}")
    for c in data["components"]:
        scope = "-" if c["scope"] is None else c["scope"]
        phi = "-" if c["phi_cert"] is None else c["phi_cert"]
        lines.append(f"component {c['kind']} scope={scope} phi_cert={phi} : {_ids(c['vertices'])}")
    lines.append(f"excluded_edges {len(data['excluded_edges'])} : {_ids(data['excluded_edges'])}".rstrip())
    lines.append(f"certificates {len(data['certificates'])}")
    for c in data["certificates"]:
        lines.append(f"certificate {c['kind']} scope={c['scope']} value={c['value']} bound={c['bound']}"
                     f" S : {_ids(c['S'])} | host : {_ids(c['host'])}")
    for k, v in data["stats"].items():
        lines.append(f"stat {k} {json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def text_to_dict(text: str) -> dict:
    """Inverse of :func:`dict_to_text`."""
    data = {"params": {}, "scopes": [], "components": [], "certificates": [], "stats": {},
            "excluded_edges": []}
    declared = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        try:
            if key in ("format", "mode"):
                data[key] = rest
            elif key in ("n", "m", "seed"):
                data[key] = int(rest)
            elif key in ("phi", "tau"):
                data[key] = rest
            elif key == "param":
                k, _, v = rest.partition(" ")
                data["params"][k] = json.loads(v)
            elif key == "weighting":
                if rest.startswith("explicit"):
                    head, _, nums = rest.partition(" : ")
                    data["weighting"] = {"kind": "explicit", "den": int(head.split()[1]),
                                         "num": _parse_ids(nums)}
                else:
                    data["weighting"] = {"kind": rest}
            elif key == "scope":
                _, _, ids = rest.partition(" : ")
                data["scopes"].append(_parse_ids(ids))
            elif key == "component":
                head, _, ids = rest.partition(" : ")
                kind, scope, phi = head.split()
                scope = scope.split("=", 1)[1]
                phi = phi.split("=", 1)[1]
                data["components"].append({"vertices": _parse_ids(ids), "kind": kind,
                                           "scope": None if scope == "-" else int(scope),
                                           "phi_cert": None if phi == "-" else phi})
            elif key == "excluded_edges":
                count, _, ids = rest.partition(":")
                data["excluded_edges"] = _parse_ids(ids)
                if int(count) != len(data["excluded_edges"]):
                    raise InputError(f"excluded_edges declares {int(count)} ids, "
                                     f"lists {len(data['excluded_edges'])}", lineno)
            elif key == "certificate":
                head, _, sets = rest.partition(" S : ")
                kind, scope, value, bound = head.split()
                S, _, host = sets.partition(" | host : ")
                data["certificates"].append({
                    "kind": kind, "scope": int(scope.split("=", 1)[1]),
                    "S": _parse_ids(S), "host": _parse_ids(host),
                    "value": value.split("=", 1)[1], "bound": bound.split("=", 1)[1]})
            elif key == "stat":
                k, _, v = rest.partition(" ")
                data["stats"][k] = json.loads(v)
            elif key in ("scopes", "components", "certificates"):
                declared[key] = (int(rest), lineno)
            else:
                raise InputError(f"unknown record {key!r}", lineno)
        except InputError:
            raise
        except (ValueError, IndexError, json.JSONDecodeError) as exc:
            raise InputError(f"malformed record: {exc}", lineno) from None
    for k in ("format", "mode", "n", "m", "phi", "tau", "seed", "weighting"):
        if k not in data:
            raise InputError(f"result is missing the {k!r} record")
    for key, (count, lineno) in declared.items():
        if count != len(data[key]):
            raise InputError(f"{key} declares {count} records, found {len(data[key])}", lineno)
    return data


def load_result(text: str) -> DecompositionResult:
    """Parse either serialization."""
    s = text.lstrip()
    if s.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON: {exc}") from None
    else:
        data = text_to_dict(text)
    try:
        return DecompositionResult.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed result: {exc}") from None


# drivers


def child_seed(seed: int, path: tuple) -> int:
    h = hashlib.blake2b(repr((int(seed), path)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def acyclicity_check(G: Graph, E_D: Iterable[int]) -> bool:
    E_D = sorted(set(E_D))
    if any(not 0 <= j < G.m for j in E_D):
        raise InputError("E_D contains an unknown edge id")
    return find_cycle(G.n, ((j, G.edges[j][0], G.edges[j][1]) for j in E_D)) is None


class _Builder:
    def __init__(self, G: Graph, mode: str):
        self.G = G
        self.mode = mode
        self.components = []
        self.info = []
        self.excluded = set()
        self.certs = []
        self.scopes = {}
        self.smaller_side = [0] * G.n
        self.stats = {"cut_matching_calls": 0, "trim_calls": 0, "trim_certified": 0,
                      "trim_batches_max": 0, "depth": 0, "fallbacks": 0, "cut_matching_rounds": 0,
                      "cut_matching_early": 0, "trim_cuts": 0, "cut_matching_cuts": 0,
                      "trim_source_shrink_min": None, "trim_flips": {}}

    def scope(self, X) -> int:
        key = tuple(sorted(X))
        if key not in self.scopes:
            self.scopes[key] = len(self.scopes)
        return self.scopes[key]

    def component(self, P, kind, scope=None, phi_cert=None):
        self.components.append(tuple(sorted(P)))
        self.info.append(ComponentInfo(kind, scope, phi_cert))

    def cut(self, H: Graph, d: Weighting, cert, scope: int, kind: str):
        """Record a certificate given in ``H``-local ids and add its heavier direction to E_D."""
        S = cert.S
        host = cert.host
        out_ids, in_ids, cap_out, cap_in = [], [], 0, 0
        for j, (u, v, c) in enumerate(H.edges):
            if u in S and v in host and v not in S:
                out_ids.append(j)
                cap_out += c
            elif v in S and u in host and u not in S:
                in_ids.append(j)
                cap_in += c
        heavy = out_ids if cap_out >= cap_in else in_ids
        self.excluded.update(H.edge_origin[j] for j in heavy)
        rest = host - S
        small = S if d.numer(S) <= d.numer(rest) else rest
        for v in small:
            self.smaller_side[H.origin[v]] += 1
        self.certs.append(CertRecord(kind, scope, tuple(sorted(H.origin[v] for v in S)),
                                     tuple(sorted(H.origin[v] for v in host)), cert.value,
                                     cert.sparsity_bound))


def _split_isolated(G: Graph, X):
    """(non-isolated, isolated) vertices of G[X]."""
    X = set(X)
    touched = set()
    for u, v, _ in G.edges:
        if u in X and v in X:
            touched.add(u)
            touched.add(v)
    return touched, X - touched


def _decompose(G: Graph, mode: str, phi: Fraction, tau, seed: int, d_global: Weighting | None,
               cm_mode: str, c_T, c0, trim_batches: int):
    B = _Builder(G, mode)
    stack = [(tuple(range(G.n)), (), 0)]
    while stack:
        X, path, depth = stack.pop()
        B.stats["depth"] = max(B.stats["depth"], depth)
        touched, lonely = _split_isolated(G, X)
        for v in sorted(lonely):
            B.component([v], "singleton")
        if not touched:
            continue
        Xs = sorted(touched)
        if len(Xs) == 1:
            B.component(Xs, "singleton")
            continue
        H = induced_subgraph(G, Xs)
        d = regularized_weighting(H) if d_global is None else d_global.restrict(Xs)
        support = d.support()
        if len(support) <= 1:
            if mode == "weak":
                B.component(Xs, "vacuous", B.scope(Xs))
            else:
                for v in Xs:
                    B.component([v], "singleton")
            continue
        sid = B.scope(Xs)
        s = child_seed(seed, path)
        cm = run_cut_matching(H, d, phi, tau=tau, seed=s, mode=cm_mode, c_T=c_T)
        B.stats["cut_matching_calls"] += 1
        B.stats["cut_matching_rounds"] += cm.rounds_run
        B.stats["cut_matching_cuts"] += len(cm.cuts)
        for cert in cm.cuts:
            B.cut(H, d, cert, sid, "cm-" + (cert.kind or "cut"))
        pieces = [c.S for c in cm.cuts]
        rest = frozenset(range(H.n)).difference(*pieces) if pieces else frozenset(range(H.n))
        children = list(pieces)
        if not cm.near_expander:
            B.stats["cut_matching_early"] += 1
            children.append(rest)
        elif mode == "weak":
            B.component([H.origin[v] for v in rest], "near", sid)
        else:
            tr = trim(H, cm.A_star, cm.witness, d, phi, cm.cuts, c0=c0, max_batches=trim_batches)
            B.stats["trim_calls"] += 1
            B.stats["trim_cuts"] += len(tr.cuts)
            B.stats["trim_batches_max"] = max(B.stats["trim_batches_max"], tr.rounds)
            for b in tr.batches:
                if b.shrink is not None:
                    cur = B.stats["trim_source_shrink_min"]
                    B.stats["trim_source_shrink_min"] = b.shrink if cur is None else min(cur, b.shrink)
            for name, hist in tr.flips.items():
                agg = B.stats["trim_flips"].setdefault(name, {})
                for k, v in hist.items():
                    agg[str(k)] = agg.get(str(k), 0) + v
            for c in tr.cuts:
                B.cut(H, d, c.cert, sid, c.cert.kind)
                children.append(c.cert.S)
            if tr.certified:
                B.stats["trim_certified"] += 1
                B.component([H.origin[v] for v in tr.A_prime], "certified", sid, tr.certified_phi)
            elif tr.A_prime:
                children.append(tr.A_prime)
        kids = [tuple(sorted(H.origin[v] for v in C)) for C in children if C]
        if any(len(k) == len(Xs) for k in kids):
            # no progress possible here; fall back to the trivially valid split
            B.stats["fallbacks"] += 1
            for v in Xs:
                B.component([v], "singleton")
            continue
        for i in reversed(range(len(kids))):
            stack.append((kids[i], path + (i,), depth + 1))
    return B


def _assemble(G, B: _Builder, mode, phi, tau, seed, params, weighting):
    order = sorted(range(len(B.components)), key=lambda i: B.components[i])
    comps = [B.components[i] for i in order]
    info = [B.info[i] for i in order]
    excluded = set(B.excluded)
    if find_cycle(G.n, ((j, G.edges[j][0], G.edges[j][1]) for j in sorted(excluded))) is not None:
        raise ContractError("cut edges formed a cycle")
    label = {}
    for i, P in enumerate(comps):
        for v in P:
            label[v] = i
    cut_edges = len(excluded)
    _complete_acyclic(G, excluded, label)
    scopes = sorted(B.scopes, key=B.scopes.get)
    stats = dict(B.stats)
    stats["trim_flips"] = {k: dict(sorted(v.items(), key=lambda kv: int(kv[0])))
                           for k, v in sorted(stats["trim_flips"].items())}
    stats["components"] = len(comps)
    stats["certificates"] = len(B.certs)
    stats["excluded_from_cuts"] = cut_edges
    stats["excluded_total"] = len(excluded)
    inter = inter_component_capacity(G, comps, excluded)
    stats["inter_capacity"] = inter
    stats["smaller_side_max"] = max(B.smaller_side, default=0)
    degV = 2 * G.total_capacity()
    lognw = math.log2(max(2, G.n * G.W))
    stats["inter_constant"] = (round(inter / (float(phi) * degV * lognw), 6) if degV else 0.0)
    phis = [c.phi_cert for c in info if c.phi_cert is not None]
    stats["certified_phi_min"] = _frac(min(phis)) if phis else None
    return DecompositionResult(mode, G.n, G.m, phi, Fraction(tau), int(seed), params, comps, info,
                               sorted(excluded), list(B.certs), scopes, weighting, stats)


def _complete_acyclic(G: Graph, excluded: set, label: dict):
    """Add inter-component edges to E_D, in edge-id order, whenever D stays acyclic."""
    out = [[] for _ in range(G.n)]
    for j in excluded:
        u, v, _ = G.edges[j]
        out[u].append(v)

    def reaches(src, dst):
        seen = {src}
        stack = [src]
        while stack:
            x = stack.pop()
            if x == dst:
                return True
            for y in out[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    for j, (u, v, _) in enumerate(G.edges):
        if j in excluded or label[u] == label[v]:
            continue
        if not reaches(v, u):
            excluded.add(j)
            out[u].append(v)


def _check_common(G, phi, tau):
    if not isinstance(G, Graph):
        raise InputError("expected a Graph")
    phi = as_fraction(phi)
    if not 0 < phi < 1:
        raise InputError("phi must lie in (0, 1)")
    tau = as_fraction(tau)
    if tau < 10 ** 4:
        raise InputError("tau must be at least 10^4")
    return phi, tau


def weak_decomposition(G: Graph, d=None, phi=Fraction(1, 100), seed: int = 0, tau=10 ** 4,
                       matching: str = "exact", c_T=10) -> DecompositionResult:
    """Near-expander decomposition under a fixed weighting ``d`` (default: regularized on G)."""
    phi, tau = _check_common(G, phi, tau)
    if d is None:
        d = regularized_weighting(G) if G.m else Weighting([0] * G.n, 1)
    d = as_weighting(d)
    if len(d) != G.n:
        raise InputError("weighting length does not match the graph")
    B = _decompose(G, "weak", phi, tau, seed, d, matching, c_T, None, 0)
    params = {"c_T": _jsonable(c_T), "matching": matching}
    return _assemble(G, B, "weak", phi, tau, seed, params, d)


def strong_decomposition(G: Graph, phi=Fraction(1, 100), seed: int = 0, tau=10 ** 4,
                         matching: str = "exact", c_T=10, c0=4096, trim_batches: int = 64) -> DecompositionResult:
    """Expander decomposition with certified components, regularized weighting per subgraph."""
    phi, tau = _check_common(G, phi, tau)
    B = _decompose(G, "strong", phi, tau, seed, None, matching, c_T, c0, trim_batches)
    params = {"c_T": _jsonable(c_T), "c0": _jsonable(c0), "matching": matching,
              "trim_batches": trim_batches}
    return _assemble(G, B, "strong", phi, tau, seed, params, None)


def reparameterized_phi(psi, n: int, W: int) -> Fraction:
    """φ = ψ / (log2²n·log2³(nW)): the input φ that targets an ψ-expander decomposition."""
    ln = max(1.0, math.log2(max(2, n)))
    lw = max(1.0, math.log2(max(2, n * W)))
    return Fraction(psi) / Fraction(ln * ln * lw ** 3).limit_denominator(10 ** 6)


def _jsonable(x):
    if isinstance(x, Fraction):
        return _frac(x)
    return x
