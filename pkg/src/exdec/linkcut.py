"""Link-cut forests with an additive edge weight and a 0/1 boundary tag.

Every non-root node stores the data of the edge to its parent.  Paths are
kept in splay trees ordered from the tree root (left) to the deep end
(right), so "ties toward the root" means "leftmost".

:class:`NaiveForest` implements the same interface with an explicit parent
array; the tests run both side by side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ReplayError, StructureError

INF = float("inf")


class LinkCutForest:
    def __init__(self, n: int):
        self.n = n
        self.left = [-1] * n
        self.right = [-1] * n
        self.par = [-1] * n  # splay parent or path-parent
        self.val = [INF] * n  # weight of the edge to the tree parent
        self.lazy = [0] * n
        self.aggv = [INF] * n
        self.aggn = list(range(n))
        self.mark = [INF] * n
        self.aggm = [INF] * n
        self.aggmn = list(range(n))
        self.eid = [-1] * n
        self.tree_parent = [-1] * n  # kept for structure checks only

    # splay machinery

    def _is_root(self, x):
        p = self.par[x]
        return p == -1 or (self.left[p] != x and self.right[p] != x)

    def _apply(self, x, d):
        if x != -1:
            self.val[x] += d
            self.aggv[x] += d
            self.lazy[x] += d

    def _push(self, x):
        d = self.lazy[x]
        if d:
            self._apply(self.left[x], d)
            self._apply(self.right[x], d)
            self.lazy[x] = 0

    def _update(self, x):
        L, R = self.left[x], self.right[x]
        bv, bn = self.val[x], x
        bm, bmn = self.mark[x], x
        if L != -1:
            if self.aggv[L] <= bv:
                bv, bn = self.aggv[L], self.aggn[L]
            if self.aggm[L] <= bm:
                bm, bmn = self.aggm[L], self.aggmn[L]
        if R != -1:
            if self.aggv[R] < bv:
                bv, bn = self.aggv[R], self.aggn[R]
            if self.aggm[R] < bm:
                bm, bmn = self.aggm[R], self.aggmn[R]
        self.aggv[x], self.aggn[x] = bv, bn
        self.aggm[x], self.aggmn[x] = bm, bmn

    def _rotate(self, x):
        p = self.par[x]
        g = self.par[p]
        if self.left[p] == x:
            b = self.right[x]
            self.left[p] = b
            self.right[x] = p
        else:
            b = self.left[x]
            self.right[p] = b
            self.left[x] = p
        if b != -1:
            self.par[b] = p
        if g != -1:
            if self.left[g] == p:
                self.left[g] = x
            elif self.right[g] == p:
                self.right[g] = x
        self.par[x] = g
        self.par[p] = x
        self._update(p)
        self._update(x)

    def _splay(self, x):
        stack = [x]
        y = x
        while not self._is_root(y):
            y = self.par[y]
            stack.append(y)
        for y in reversed(stack):
            self._push(y)
        while not self._is_root(x):
            p = self.par[x]
            if not self._is_root(p):
                g = self.par[p]
                if (self.left[g] == p) == (self.left[p] == x):
                    self._rotate(p)
                else:
                    self._rotate(x)
            self._rotate(x)

    def _access(self, x):
        last = -1
        y = x
        while y != -1:
            self._splay(y)
            self.right[y] = last
            self._update(y)
            last = y
            y = self.par[y]
        self._splay(x)

    def _check(self, u):
        if not (isinstance(u, int) and 0 <= u < self.n):
            raise StructureError(f"unknown node {u!r}")

    # public interface

    def find_root(self, u: int) -> int:
        self._check(u)
        self._access(u)
        x = u
        self._push(x)
        while self.left[x] != -1:
            x = self.left[x]
            self._push(x)
        self._splay(x)
        return x

    def is_root(self, u: int) -> bool:
        self._check(u)
        return self.tree_parent[u] == -1

    def parent(self, u: int) -> int:
        self._check(u)
        return self.tree_parent[u]

    def edge_of(self, u: int) -> int:
        """Graph-edge id attached to the tree edge from ``u`` to its parent."""
        return self.eid[u]

    def weight(self, u: int):
        self._check(u)
        if self.tree_parent[u] == -1:
            raise StructureError(f"{u} is a root")
        self._access(u)
        return self.val[u]

    def link(self, u: int, v: int, w0, eid: int = -1, mark: int = 1) -> None:
        self._check(u)
        self._check(v)
        if self.tree_parent[u] != -1:
            raise StructureError(f"link: {u} is not a root")
        if self.find_root(v) == u:
            raise StructureError(f"link: {u} and {v} are in the same tree")
        self._access(u)
        self.val[u] = w0
        self.mark[u] = mark
        self.eid[u] = eid
        self._update(u)
        self.par[u] = v
        self.tree_parent[u] = v

    def cut(self, u: int) -> None:
        self._check(u)
        if self.tree_parent[u] == -1:
            raise StructureError(f"cut: {u} has no parent edge")
        self._access(u)
        L = self.left[u]
        self.par[L] = -1
        self.left[u] = -1
        self.val[u] = INF
        self.mark[u] = INF
        self.eid[u] = -1
        self._update(u)
        self.tree_parent[u] = -1

    def add(self, u: int, psi) -> None:
        """Shift every edge weight on the path from ``u`` to its root by ``psi``."""
        self._check(u)
        self._access(u)
        # the root node carries INF, which absorbs the shift
        self._apply(u, psi)

    def find_min(self, u: int):
        """(tail node, weight) of the lightest root-path edge, ties toward the root.

        The edge is identified by its tail node; ``edge_of`` gives the graph
        edge id.  Returns ``None`` when ``u`` is a root.
        """
        self._check(u)
        if self.tree_parent[u] == -1:
            return None
        self._access(u)
        node = self.aggn[u]
        return node, self.aggv[u]

    def find_min_secondary(self, u: int):
        self._check(u)
        if self.tree_parent[u] == -1:
            return None
        self._access(u)
        node = self.aggmn[u]
        return node, self.aggm[u]


class NaiveForest:
    """Reference forest: parent pointers and O(depth) path walks."""

    def __init__(self, n: int):
        self.n = n
        self.tree_parent = [-1] * n
        self.w = [None] * n
        self.mark = [None] * n
        self.eid = [-1] * n

    def _check(self, u):
        if not (isinstance(u, int) and 0 <= u < self.n):
            raise StructureError(f"unknown node {u!r}")

    def _path(self, u):
        out = []
        while self.tree_parent[u] != -1:
            out.append(u)
            u = self.tree_parent[u]
        return out, u

    def find_root(self, u):
        self._check(u)
        return self._path(u)[1]

    def is_root(self, u):
        self._check(u)
        return self.tree_parent[u] == -1

    def parent(self, u):
        self._check(u)
        return self.tree_parent[u]

    def edge_of(self, u):
        return self.eid[u]

    def weight(self, u):
        self._check(u)
        if self.tree_parent[u] == -1:
            raise StructureError(f"{u} is a root")
        return self.w[u]

    def link(self, u, v, w0, eid=-1, mark=1):
        self._check(u)
        self._check(v)
        if self.tree_parent[u] != -1:
            raise StructureError(f"link: {u} is not a root")
        if self.find_root(v) == u:
            raise StructureError(f"link: {u} and {v} are in the same tree")
        self.tree_parent[u] = v
        self.w[u] = w0
        self.mark[u] = mark
        self.eid[u] = eid

    def cut(self, u):
        self._check(u)
        if self.tree_parent[u] == -1:
            raise StructureError(f"cut: {u} has no parent edge")
        self.tree_parent[u] = -1
        self.w[u] = self.mark[u] = None
        self.eid[u] = -1

    def add(self, u, psi):
        self._check(u)
        for x in self._path(u)[0]:
            self.w[x] += psi

    def _min(self, u, arr):
        self._check(u)
        path = self._path(u)[0]
        if not path:
            return None
        best = None
        for x in path:  # deep end first, so <= moves the answer toward the root
            if best is None or arr[x] <= arr[best]:
                best = x
        return best, arr[best]

    def find_min(self, u):
        return self._min(u, self.w)

    def find_min_secondary(self, u):
        return self._min(u, self.mark)


def root_path_edges(forest, u: int) -> list[int]:
    """Graph-edge ids on the tree path from ``u`` up to its root."""
    out = []
    while forest.tree_parent[u] != -1:
        out.append(forest.eid[u])
        u = forest.tree_parent[u]
    return out


@dataclass
class TranscriptLog:
    """Sealed record of forest operations keyed by graph-edge ids.

    Records are tuples:
    ``("link", eid, w)``, ``("cut", eid)``, ``("add", u, psi)``,
    ``("find_root", u, result)``, ``("find_min", u, eid_or_None)``,
    ``("emit", src, dst, amount)``.
    """

    edges: tuple  # (tail, head) per graph edge, for replay
    n: int
    records: list = field(default_factory=list)
    sealed: bool = False

    def append(self, rec):
        if self.sealed:
            raise ReplayError("transcript is sealed")
        self.records.append(rec)

    def seal(self):
        self.sealed = True
        self.records = tuple(self.records)
        return self

    def emissions(self):
        return [(r[1], r[2], r[3]) for r in self.records if r[0] == "emit"]


class RecordingForest:
    """Wraps a forest and logs every operation into a :class:`TranscriptLog`."""

    def __init__(self, forest, log: TranscriptLog):
        self.forest = forest
        self.log = log
        self.tree_parent = forest.tree_parent
        self.eid = forest.eid

    def link_edge(self, eid, w0):
        u, v = self.log.edges[eid]
        self.forest.link(u, v, w0, eid=eid)
        self.log.append(("link", eid, w0))

    def cut_edge(self, eid):
        u, _ = self.log.edges[eid]
        if self.forest.eid[u] != eid:
            raise StructureError(f"edge {eid} is not a tree edge")
        self.forest.cut(u)
        self.log.append(("cut", eid))

    def add(self, u, psi):
        self.forest.add(u, psi)
        self.log.append(("add", u, psi))

    def find_root(self, u):
        r = self.forest.find_root(u)
        self.log.append(("find_root", u, r))
        return r

    def find_min(self, u):
        res = self.forest.find_min(u)
        if res is None:
            self.log.append(("find_min", u, None))
            return None
        node, w = res
        eid = self.forest.eid[node]
        self.log.append(("find_min", u, eid))
        return eid, w

    def emit(self, src, dst, amount):
        self.log.append(("emit", src, dst, amount))


def replay_crossings(log: TranscriptLog, tagged: Iterable[int], forest_cls=LinkCutForest):
    """Re-run a transcript with boundary tags and report which emitted paths cross.

    Edges in ``tagged`` get secondary mark 0, all others 1.  Returns a list of
    ``((src, dst), amount, crosses)`` in emission order.
    """
    tagged = set(tagged)
    f = forest_cls(log.n)
    edges = log.edges
    out = []
    for rec in log.records:
        op = rec[0]
        try:
            if op == "link":
                _, eid, w = rec
                u, v = edges[eid]
                f.link(u, v, w, eid=eid, mark=0 if eid in tagged else 1)
            elif op == "cut":
                eid = rec[1]
                u, _ = edges[eid]
                if f.eid[u] != eid:
                    raise ReplayError(f"cut of non-tree edge {eid}")
                f.cut(u)
            elif op == "add":
                f.add(rec[1], rec[2])
            elif op == "find_root":
                if f.find_root(rec[1]) != rec[2]:
                    raise ReplayError(f"find_root({rec[1]}) diverged from the transcript")
            elif op == "find_min":
                res = f.find_min(rec[1])
                got = None if res is None else f.eid[res[0]]
                if got != rec[2]:
                    raise ReplayError(f"find_min({rec[1]}) diverged from the transcript")
            elif op == "emit":
                _, src, dst, amount = rec
                if f.find_root(src) != dst:
                    raise ReplayError(f"emission {src}->{dst} does not match the forest")
                sec = f.find_min_secondary(src)
                out.append(((src, dst), amount, sec is not None and sec[1] == 0))
            else:
                raise ReplayError(f"unknown record {rec!r}")
        except StructureError as exc:
            raise ReplayError(f"transcript does not fit the graph: {exc}") from exc
        except IndexError as exc:
            raise ReplayError(f"transcript references unknown edge or vertex: {rec!r}") from exc
    return out
