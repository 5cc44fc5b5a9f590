"""Rooted trees with the edge-length metric, the Y_r tree of a free product, and
a two-colour annulus cover of a tree."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

from ..errors import BudgetExceeded, ConfigError
from ..graphprod import EMPTY, ProductGraph, Word
from ..metric import WordMetric
from .families import SetFamily, covers, is_r_disjoint, mesh


class RootedTree:
    """A finite rooted tree given by a parent map; every edge has length 1."""

    def __init__(self, root: Hashable, parent: Dict[Hashable, Hashable]):
        self.root = root
        self.parent = dict(parent)
        self.parent.pop(root, None)
        self.children: Dict[Hashable, List[Hashable]] = {root: []}
        for v in self.parent:
            self.children.setdefault(v, [])
        for v, p in self.parent.items():
            if p not in self.children:
                raise ConfigError(f"parent {p!r} of {v!r} is not a vertex")
            self.children[p].append(v)
        self.depth: Dict[Hashable, int] = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for c in self.children[u]:
                self.depth[c] = self.depth[u] + 1
                queue.append(c)
        if len(self.depth) != len(self.children):
            raise ConfigError("parent map has a cycle or a component without the root")

    @property
    def vertices(self) -> List[Hashable]:
        return list(self.depth)

    def __len__(self):
        return len(self.depth)

    def ancestor(self, v, depth: int):
        while self.depth[v] > depth:
            v = self.parent[v]
        return v

    def distance(self, u, v) -> int:
        du, dv = self.depth[u], self.depth[v]
        steps = 0
        while du > dv:
            u, du, steps = self.parent[u], du - 1, steps + 1
        while dv > du:
            v, dv, steps = self.parent[v], dv - 1, steps + 1
        while u != v:
            u, v, steps = self.parent[u], self.parent[v], steps + 2
        return steps

    def neighbours(self, v, radius) -> List[Hashable]:
        seen = {v: 0}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            if seen[u] >= radius:
                continue
            adj = list(self.children[u])
            if u in self.parent:
                adj.append(self.parent[u])
            for w in adj:
                if w not in seen:
                    seen[w] = seen[u] + 1
                    queue.append(w)
        return list(seen)

    def edges(self) -> List[Tuple[Hashable, Hashable]]:
        return [(p, v) for v, p in self.parent.items()]


def _common_prefix(g: Word, h: Word) -> int:
    n = 0
    for s, t in zip(g, h):
        if s != t:
            break
        n += 1
    return n


class YrTree(RootedTree):
    """Free-product elements whose syllables all have norm <= r.

    ``y`` is joined to ``y * s`` for every syllable ``s`` of norm <= r from the
    other factor, and the identity is joined to every short syllable.  So the
    parent of a word is the word minus its last syllable, and ``d_e`` counts
    syllables off the common prefix.
    """

    def __init__(self, graph: ProductGraph, r, depth: int, *,
                 norm_cap=None, budget: int = 5_000_000):
        if len(graph.vertices) != 2 or graph.edges:
            raise ConfigError("the Y_r tree needs a free product of exactly two vertex groups")
        if depth < 0:
            raise ConfigError("depth bound must be non-negative")
        self.graph = graph
        self.r = r
        self.depth_bound = depth
        self.norm_cap = norm_cap
        short = {v: sorted(graph.groups[v].enumerate_ball(r, graph.weights[v]) - {graph.groups[v].identity})
                 for v in graph.vertices}
        parent: Dict[Word, Word] = {}
        layer: List[Word] = [EMPTY]
        for _ in range(depth):
            nxt = []
            for w in layer:
                base = graph.syllable_norm(w)
                for v in graph.vertices:
                    if w and w[-1][0] == v:
                        continue
                    for g in short[v]:
                        s = (v, g)
                        if norm_cap is not None and base + graph.syllable_weight(s) > norm_cap:
                            continue
                        child = w + (s,)
                        parent[child] = w
                        nxt.append(child)
                        if len(parent) > budget:
                            raise BudgetExceeded("Y_r tree enumeration exceeded the budget", budget)
            layer = nxt
        super().__init__(EMPTY, parent)

    def distance(self, g: Word, h: Word) -> int:
        return len(g) + len(h) - 2 * _common_prefix(g, h)

    def format(self, g: Word) -> str:
        return self.graph.format_word(g)

    def parse(self, text: str) -> Word:
        w = self.graph.reduce(self.graph.parse_word(text))
        if w not in self.depth:
            raise ConfigError(f"{text!r} is not a vertex of the enumerated tree")
        return w


@dataclass
class InequalityReport:
    pairs: int = 0
    upper_violations: List[tuple] = field(default_factory=list)
    lower_violations: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.upper_violations and not self.lower_violations


def build_Yr_tree(graph: ProductGraph, r, depth: int, **kw) -> YrTree:
    return YrTree(graph, r, depth, **kw)


def check_tree_quasi_isometry(tree: YrTree, limit: Optional[int] = None) -> InequalityReport:
    """Check ``d <= r * d_e`` and ``d_e <= 2 d`` on every pair of enumerated vertices."""
    metric = WordMetric(tree.graph)
    rep = InequalityReport()
    verts = sorted(tree.vertices, key=lambda w: (len(w), tree.format(w)))
    for g, h in itertools.combinations(verts, 2):
        d = metric.distance(g, h)
        de = tree.distance(g, h)
        rep.pairs += 1
        if d > tree.r * de:
            rep.upper_violations.append((g, h, d, de))
        if de > 2 * d:
            rep.lower_violations.append((g, h, d, de))
        if limit is not None and rep.pairs >= limit:
            break
    return rep


class AnnulusColouring:
    """Two-colour cover of a rooted tree at scale ``R``.

    Annulus ``m`` holds depths ``[mL, (m+1)L)`` with ``L = 2R``; inside it,
    vertices are grouped by their ancestor at depth ``max(0, mL - R)`` and the
    colour is the parity of ``m``.
    """

    def __init__(self, tree: RootedTree, R: int):
        if R < 1:
            raise ConfigError("tree cover scale must be at least 1")
        self.tree = tree
        self.R = R
        self.L = 2 * R

    def piece(self, v) -> Tuple[int, Hashable]:
        m = self.tree.depth[v] // self.L
        anchor = self.tree.ancestor(v, max(0, m * self.L - self.R))
        return m % 2, (m, anchor)


def tree_cover(tree: RootedTree, R: int, *, check: bool = True) -> List[SetFamily]:
    """Two families covering ``tree``, each ``R``-disjoint with mesh <= 6R."""
    col = AnnulusColouring(tree, R)
    groups: List[Dict[Hashable, list]] = [{}, {}]
    for v in tree.vertices:
        c, key = col.piece(v)
        groups[c].setdefault(key, []).append(v)
    fams = [SetFamily(f"tree annuli colour {c}", list(g.values())) for c, g in enumerate(groups)]
    if check:
        for fam in fams:
            if not is_r_disjoint(fam, R, tree):
                raise AssertionError(f"{fam.label} is not {R}-disjoint")
            if mesh(fam, tree) > 6 * R:
                raise AssertionError(f"{fam.label} has mesh above {6 * R}")
        ok, missed = covers(fams, tree.vertices)
        if not ok:
            raise AssertionError(f"tree vertex {missed!r} is not covered")
    return fams


def tree_cover_certificate(graph: ProductGraph, r, depth: int, R: int, *, norm_cap=None):
    from .certificate import certify
    tree = YrTree(graph, r, depth, norm_cap=norm_cap)
    fams = tree_cover(tree, R, check=False)
    ambient = {"kind": "yr_tree", "graph": graph.to_config(), "r": r, "depth": depth}
    if norm_cap is not None:
        ambient["norm_cap"] = norm_cap
    return certify("tree-annulus-cover", [R], ambient, tree, frozenset(tree.vertices),
                   fams, [R, R], {"mesh_limit": 6 * R, "vertices": len(tree)})
