"""Graph products of vertex groups: syllable words and their normal forms.

A word is a tuple of syllables ``(vertex_id, element)``.  Words returned by
:meth:`ProductGraph.reduce` are in the canonical normal form: reduced (no two
syllables of one vertex can be brought together) and, among all shuffles of
that reduced word, the one that is lexicographically least when syllables are
compared by vertex weight.  Equality of group elements is therefore tuple
equality of normal forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import BudgetExceeded, ConfigError, InvalidElement, ParseError
from .groups import VertexGroupSpec, _word_length, spec_from_config

Syllable = Tuple[str, object]
Word = Tuple[Syllable, ...]

EMPTY: Word = ()
DEFAULT_WORD_CAP = 32

_VID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ProductGraph:
    """A finite simplicial graph with a weighted vertex group at each vertex.

    ``injective=False`` admits repeated vertex weights (free products such as
    ``Z * Z`` with both factors of weight 1); ties in the normal form are then
    broken by declaration order.
    """

    def __init__(self, vertices: Sequence[str], weights: Mapping[str, int],
                 groups: Mapping[str, VertexGroupSpec], edges: Iterable[Sequence[str]] = (),
                 *, injective: bool = True, word_cap: int = DEFAULT_WORD_CAP):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ConfigError("vertex ids must be distinct")
        for v in self.vertices:
            if not isinstance(v, str) or not _VID.fullmatch(v):
                raise ConfigError(f"vertex id {v!r} must be an identifier")
            if v not in weights or v not in groups:
                raise ConfigError(f"vertex {v!r} needs a weight and a group")
            w = weights[v]
            if not isinstance(w, int) or isinstance(w, bool) or w < 1:
                raise ConfigError(f"weight of {v!r} must be a positive integer, got {w!r}")
        self.weights: Dict[str, int] = {v: weights[v] for v in self.vertices}
        if injective and len(set(self.weights.values())) != len(self.vertices):
            raise ConfigError("vertex weights must be injective")
        self.injective = injective
        self.groups: Dict[str, VertexGroupSpec] = {v: groups[v] for v in self.vertices}
        edge_set = set()
        for e in edges:
            a, b = tuple(e)
            if a == b:
                raise ConfigError(f"loop at {a!r} is not allowed")
            if a not in self.weights or b not in self.weights:
                raise ConfigError(f"edge {a!r}-{b!r} references an unknown vertex")
            edge_set.add(frozenset((a, b)))
        self.edges: FrozenSet[FrozenSet[str]] = frozenset(edge_set)
        self.adj: Dict[str, FrozenSet[str]] = {
            v: frozenset(u for e in self.edges if v in e for u in e if u != v) for v in self.vertices
        }
        order = sorted(self.vertices, key=lambda v: (self.weights[v], self.vertices.index(v)))
        self.rank = {v: i for i, v in enumerate(order)}
        self.word_cap = word_cap

    def __repr__(self):
        return f"ProductGraph(vertices={self.vertices!r}, edges={len(self.edges)})"

    # ---- graph structure ----------------------------------------------

    def adjacent(self, u: str, v: str) -> bool:
        return v in self.adj[u]

    def induced(self, vertices: Iterable[str]) -> "ProductGraph":
        wanted = set(vertices)
        keep = [v for v in self.vertices if v in wanted]
        return ProductGraph(keep, self.weights, self.groups,
                            [tuple(e) for e in self.edges if e <= set(keep)],
                            injective=self.injective, word_cap=self.word_cap)

    def gamma_r(self, r) -> "ProductGraph":
        """Induced subgraph on the vertices of weight at most ``r``."""
        if r < 0:
            raise ValueError("r must be non-negative")
        return self.induced(v for v in self.vertices if self.weights[v] <= r)

    def maximal_cliques(self) -> List[FrozenSet[str]]:
        out: List[FrozenSet[str]] = []

        def expand(clique, candidates, excluded):
            if not candidates and not excluded:
                out.append(frozenset(clique))
                return
            for v in sorted(candidates, key=self.rank.get):
                expand(clique | {v}, candidates & self.adj[v], excluded & self.adj[v])
                candidates = candidates - {v}
                excluded = excluded | {v}

        if self.vertices:
            expand(set(), set(self.vertices), set())
        return sorted(out, key=lambda c: sorted(self.rank[v] for v in c))

    def clique_number(self) -> int:
        return max((len(c) for c in self.maximal_cliques()), default=0)

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2

    # ---- words --------------------------------------------------------

    def check_syllable(self, syl) -> Syllable:
        try:
            v, g = syl
        except (TypeError, ValueError):
            raise InvalidElement(f"malformed syllable {syl!r}") from None
        if v not in self.groups:
            raise InvalidElement(f"syllable {syl!r} uses unknown vertex {v!r}")
        self.groups[v].validate(g)
        return (v, g)

    def reduce(self, word: Iterable[Syllable]) -> Word:
        out: List[Syllable] = []
        for syl in word:
            v, g = self.check_syllable(syl)
            self._insert(out, v, g)
        return self._canonical(out)

    def _insert(self, out: List[Syllable], v: str, g) -> None:
        spec = self.groups[v]
        if g == spec.identity:
            return
        adj = self.adj[v]
        i = len(out) - 1
        while i >= 0:
            u, h = out[i]
            if u == v:
                p = spec._mul(h, g)
                if p == spec.identity:
                    del out[i]
                else:
                    out[i] = (v, p)
                return
            if u in adj:
                i -= 1
                continue
            break
        out.append((v, g))

    def _canonical(self, syllables: List[Syllable]) -> Word:
        """Least shuffle of a reduced word, comparing syllables by vertex weight."""
        if len(syllables) > self.word_cap:
            raise BudgetExceeded(
                f"word has {len(syllables)} syllables, cap is {self.word_cap}", self.word_cap)
        rest = list(syllables)
        result = []
        rank = self.rank
        while rest:
            best = None
            for j, (v, _) in enumerate(rest):
                adj = self.adj[v]
                if all(rest[i][0] in adj for i in range(j)):
                    if best is None or rank[v] < rank[rest[best][0]]:
                        best = j
            result.append(rest.pop(best))
        return tuple(result)

    def is_normal(self, word: Word) -> bool:
        return self.reduce(word) == tuple(word)

    def multiply(self, w1: Iterable[Syllable], w2: Iterable[Syllable]) -> Word:
        out: List[Syllable] = []
        for syl in w1:
            self._insert(out, *self.check_syllable(syl))
        for syl in w2:
            self._insert(out, *self.check_syllable(syl))
        return self._canonical(out)

    def mul_syllable(self, word: Word, v: str, g) -> Word:
        """Right-multiply a normal-form word by one syllable (no validation)."""
        out = list(word)
        self._insert(out, v, g)
        return self._canonical(out)

    def invert(self, word: Iterable[Syllable]) -> Word:
        syls = [self.check_syllable(s) for s in word]
        return self.reduce((v, self.groups[v]._inv(g)) for v, g in reversed(syls))

    def syllable_weight(self, syl: Syllable) -> int:
        v, g = syl
        return self.weights[v] * self.groups[v].word_length(g)

    def syllable_norm(self, word: Word) -> int:
        """Weighted length of a normal-form word: sum of weighted syllable lengths.

        Reduced syllable expressions are geodesic in a graph product, so this
        equals the weighted word norm; :func:`gpcoarse.metric.gp_norm` computes
        the same value by search.
        """
        return sum(self.syllable_weight(s) for s in word)

    def quotient_norm(self, g: Word, h: Word) -> int:
        """``syllable_norm(g^-1 h)`` for normal-form ``g`` and ``h``, without validation.

        The common syllable prefix cancels outright; the rest is merged by
        right insertion, and the weight sum does not depend on shuffle order.
        """
        p = 0
        for s, t in zip(g, h):
            if s != t:
                break
            p += 1
        out = [(v, self.groups[v]._inv(a)) for v, a in reversed(g[p:])]
        for v, a in h[p:]:
            self._insert(out, v, a)
        w, grp = self.weights, self.groups
        return sum(w[v] * _word_length(grp[v], a) for v, a in out)

    def in_subgroup(self, word: Word, vertices) -> bool:
        vs = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
        return all(v in vs for v, _ in word)

    # ---- standard form / permissible elements -------------------------

    def light_vertices(self, r) -> FrozenSet[str]:
        return frozenset(v for v in self.vertices if self.weights[v] <= r)

    def _split_light_suffix(self, word: Word, r) -> Tuple[List[Syllable], List[Syllable]]:
        light = self.light_vertices(r)
        rest = list(enumerate(word))
        suffix = []
        moved = True
        while moved:
            moved = False
            for j in range(len(rest) - 1, -1, -1):
                v = rest[j][1][0]
                if v not in light:
                    continue
                adj = self.adj[v]
                if all(rest[i][1][0] in adj for i in range(j + 1, len(rest))):
                    suffix.append(rest.pop(j))
                    moved = True
                    break
        # extracted syllables keep their original relative order
        suffix.sort()
        return [s for _, s in rest], [s for _, s in suffix]

    def decompose_xb(self, word: Word, r) -> Tuple[Word, Word]:
        """Split ``word = x * b`` with ``x`` permissible and ``b`` supported on light vertices."""
        word = self.reduce(word)
        rest, suffix = self._split_light_suffix(word, r)
        return self._canonical(rest), self._canonical(suffix)

    def standard_form(self, word: Word, r) -> Word:
        """Reduced presentation with every light syllable pushed as far right as possible."""
        x, b = self.decompose_xb(word, r)
        return x + b

    def is_permissible(self, word: Word, r) -> bool:
        _, b = self.decompose_xb(word, r)
        return not b

    # ---- text form ----------------------------------------------------

    def format_syllable(self, syl: Syllable) -> str:
        v, g = syl
        spec = self.groups[v]
        if spec.kind == "cyclic":
            return f"{v}^{g}"
        if spec.kind == "free_abelian" and spec.rank == 1:
            return f"{v}^{g[0]}"
        return f"{v}[{spec.format_element(g)}]"

    def format_word(self, word: Iterable[Syllable]) -> str:
        return "*".join(self.format_syllable(s) for s in word)

    def parse_word(self, text: str) -> Word:
        """Parse ``syllable ("*" syllable)*``; the empty string is the identity."""
        s = text.strip()
        if s in ("", "e", "ε") and not (s == "e" and "e" in self.groups):
            return EMPTY
        pos = len(text) - len(text.lstrip())
        out = []
        n = len(text)
        while True:
            m = _VID.match(text, pos)
            if not m:
                raise ParseError("expected a vertex id", text, pos)
            v = m.group(0)
            if v not in self.groups:
                raise ParseError(f"unknown vertex {v!r}", text, pos)
            spec = self.groups[v]
            pos = m.end()
            caret_ok = spec.kind == "cyclic" or (spec.kind == "free_abelian" and spec.rank == 1)
            if pos < n and text[pos] == "^":
                if not caret_ok:
                    raise ParseError(f"vertex {v!r} needs a bracketed literal", text, pos)
                m2 = re.compile(r"[+-]?\d+").match(text, pos + 1)
                if not m2:
                    raise ParseError("expected an integer exponent", text, pos + 1)
                lit_pos = pos + 1
                literal = m2.group(0)
                pos = m2.end()
            elif pos < n and text[pos] == "[":
                if caret_ok:
                    raise ParseError(f"vertex {v!r} uses the '^' form", text, pos)
                close = text.find("]", pos)
                if close < 0:
                    raise ParseError("unterminated '['", text, pos)
                lit_pos = pos + 1
                literal = text[pos + 1:close]
                pos = close + 1
            else:
                raise ParseError("expected '^' or '['", text, pos)
            try:
                g = spec.parse_element(literal)
            except ParseError as exc:
                raise ParseError(f"bad element literal for {v!r}: {exc.args[0]}", text, lit_pos) from None
            if g == spec.identity:
                raise ParseError("trivial syllable", text, lit_pos)
            out.append((v, g))
            while pos < n and text[pos].isspace():
                pos += 1
            if pos == n:
                return tuple(out)
            if text[pos] != "*":
                raise ParseError("expected '*'", text, pos)
            pos += 1
            while pos < n and text[pos].isspace():
                pos += 1

    def to_config(self) -> dict:
        return {
            "vertices": [
                {"id": v, "weight": self.weights[v], "group": self.groups[v].to_config()}
                for v in self.vertices
            ],
            "edges": sorted(sorted(e) for e in self.edges),
            "injective": self.injective,
            "word_cap": self.word_cap,
        }


def graph_from_config(cfg: dict) -> ProductGraph:
    if not isinstance(cfg, dict) or "vertices" not in cfg:
        raise ConfigError("config needs a 'vertices' list")
    ids, weights, groups = [], {}, {}
    for entry in cfg["vertices"]:
        try:
            vid = entry["id"]
            weights[vid] = entry["weight"]
            groups[vid] = spec_from_config(entry["group"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"vertex entry {entry!r} is missing {exc}") from None
        ids.append(vid)
    return ProductGraph(ids, weights, groups, [tuple(e) for e in cfg.get("edges", [])],
                        injective=cfg.get("injective", True),
                        word_cap=cfg.get("word_cap", DEFAULT_WORD_CAP))


def path_graph(groups: Sequence[VertexGroupSpec], weights: Sequence[int], prefix="v",
               **kw) -> ProductGraph:
    ids = [f"{prefix}{i + 1}" for i in range(len(groups))]
    return ProductGraph(ids, dict(zip(ids, weights)), dict(zip(ids, groups)),
                        [(ids[i], ids[i + 1]) for i in range(len(ids) - 1)], **kw)


def edgeless_graph(groups: Sequence[VertexGroupSpec], weights: Sequence[int], prefix="v",
                   **kw) -> ProductGraph:
    ids = [f"{prefix}{i + 1}" for i in range(len(groups))]
    return ProductGraph(ids, dict(zip(ids, weights)), dict(zip(ids, groups)), [], **kw)


def complete_graph(groups: Sequence[VertexGroupSpec], weights: Sequence[int], prefix="v",
                   **kw) -> ProductGraph:
    ids = [f"{prefix}{i + 1}" for i in range(len(groups))]
    edges = [(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]
    return ProductGraph(ids, dict(zip(ids, weights)), dict(zip(ids, groups)), edges, **kw)
