"""Brute-force references that share no code with the library's reduction or search.

They only use each vertex group's own multiplication, so a bug in normal
forms, shuffling or the weighted metric shows up as a disagreement.
"""

from __future__ import annotations

import itertools
from collections import deque


def group_mul(spec, a, b):
    return spec._mul(a, b)


def merge_adjacent(graph, word):
    """Words reachable by one merge of neighbouring same-vertex syllables."""
    out = []
    for i in range(len(word) - 1):
        (u, a), (v, b) = word[i], word[i + 1]
        if u == v:
            spec = graph.groups[u]
            p = group_mul(spec, a, b)
            mid = () if p == spec.identity else ((u, p),)
            out.append(word[:i] + mid + word[i + 2:])
    return out


def swap_adjacent(graph, word):
    out = []
    for i in range(len(word) - 1):
        (u, _), (v, _) = word[i], word[i + 1]
        if u != v and frozenset((u, v)) in _edge_set(graph):
            out.append(word[:i] + (word[i + 1], word[i]) + word[i + 2:])
    return out


def _edge_set(graph):
    cache = getattr(graph, "_oracle_edges", None)
    if cache is None:
        cache = {frozenset(e) for e in graph.edges}
        graph._oracle_edges = cache
    return cache


def rewrite_closure(graph, word, depth=64):
    """Every word reachable by merges and commutations within ``depth`` steps."""
    word = tuple((v, a) for v, a in word if a != graph.groups[v].identity)
    seen = {word}
    frontier = deque([(word, 0)])
    while frontier:
        w, k = frontier.popleft()
        if k >= depth:
            continue
        for nxt in merge_adjacent(graph, w) + swap_adjacent(graph, w):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, k + 1))
    return seen


def shuffle_class(graph, word):
    """All rearrangements of ``word`` reachable by commuting neighbours."""
    seen = {tuple(word)}
    frontier = [tuple(word)]
    while frontier:
        w = frontier.pop()
        for nxt in swap_adjacent(graph, w):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def minimal_words(graph, word, depth=64):
    closure = rewrite_closure(graph, word, depth)
    m = min(len(w) for w in closure)
    return {w for w in closure if len(w) == m}


def brute_norms(graph, radius):
    """Element -> least weighted length over all generator strings of weight <= radius.

    Elements are keyed by the set of minimal rewritten forms, which is a
    canonical label independent of the library's normal form.
    """
    moves = [(v, s, graph.weights[v]) for v in graph.vertices for s in graph.groups[v].generators]
    best = {}
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for word, cost in frontier:
            for v, s, w in moves:
                c = cost + w
                if c > radius:
                    continue
                nw = word + ((v, s),)
                nxt.append((nw, c))
        for word, cost in nxt:
            key = canonical_label(graph, word)
            if key not in best or cost < best[key][0]:
                best[key] = (cost, word)
        frontier = nxt
    best[canonical_label(graph, ())] = (0, ())
    return best


_label_cache: dict = {}


def canonical_label(graph, word):
    """Smallest minimal rewritten form under a fixed total order (repr)."""
    key = (id(graph), tuple(word))
    if key not in _label_cache:
        _label_cache[key] = min(minimal_words(graph, word), key=repr)
    return _label_cache[key]


def all_strings(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)
