"""Explicit bounded, R-disjoint colourings of Z, Z^2 and finite clique products.

These are the base covers consumed by the graph-product cover builder.  Each
colouring assigns a point a ``(colour, key)`` pair; points sharing both lie in
one set.  Nothing here is trusted: the builders verify every family they emit.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Sequence, Tuple

from ..errors import Refusal
from .families import SetFamily


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class BrickColouring:
    """Colouring of Z^n (n <= 2) under a weighted l1 metric with n + 1 colours.

    n = 1: alternating intervals of length ``L = 2(R + 1)``.
    n = 2: a brick wall; rows of height ``H`` with bricks of length ``L``,
    each row shifted by ``L/2``, brick ``(j, m)`` coloured ``(m + 2j) mod 3``.
    """

    def __init__(self, weights: Sequence[int], R: int):
        self.weights = tuple(weights)
        self.R = R
        self.dim = len(self.weights)
        if self.dim > 2:
            raise Refusal(f"no verified base cover for free abelian rank {self.dim} > 2")
        if self.dim == 1:
            self.L = 2 * (R + 1)
        elif self.dim == 2:
            wx, wy = self.weights
            self.L = 2 * _ceil_div(R + 1, wx)
            self.H = _ceil_div(R + 1, wy)

    @property
    def colours(self) -> int:
        return self.dim + 1

    def piece(self, p: Sequence[int]) -> Tuple[int, Hashable]:
        if self.dim == 0:
            return 0, ()
        if self.dim == 1:
            m = p[0] // self.L
            return m % 2, m
        x, y = p
        j = y // self.H
        m = (x - j * (self.L // 2)) // self.L
        return (m + 2 * j) % 3, (j, m)

    def describe(self) -> dict:
        out = {"dim": self.dim, "weights": list(self.weights), "scale": self.R}
        if self.dim == 1:
            out["interval_length"] = self.L
        elif self.dim == 2:
            out.update(brick_length=self.L, row_height=self.H)
        return out


class CliqueBaseCover:
    """Base cover of the direct product attached to a complete graph.

    Free abelian factors (total rank <= 2) are covered by bricks; finite
    factors ride along as a bounded fibre.  Free groups and larger ranks are
    refused rather than guessed at.
    """

    def __init__(self, subgraph, R: int):
        if not subgraph.is_complete():
            raise Refusal(
                "the light subgraph at this scale is not complete; only direct-product "
                "base covers are supported")
        coords: List[Tuple[str, int]] = []
        weights: List[int] = []
        for v in sorted(subgraph.vertices, key=subgraph.rank.get):
            spec = subgraph.groups[v]
            if spec.kind == "free":
                raise Refusal(f"vertex {v!r} carries a free group; no base cover is available")
            if spec.kind == "free_abelian":
                for i in range(spec.rank):
                    coords.append((v, i))
                    weights.append(subgraph.weights[v])
        self.subgraph = subgraph
        self.coords = coords
        self.bricks = BrickColouring(weights, R)
        self.R = R

    @property
    def colours(self) -> int:
        return self.bricks.colours

    def coordinates(self, word) -> Tuple[int, ...]:
        syl = dict(word)
        out = []
        for v, i in self.coords:
            g = syl.get(v)
            out.append(0 if g is None else g[i])
        return tuple(out)

    def piece(self, word) -> Tuple[int, Hashable]:
        return self.bricks.piece(self.coordinates(word))

    def describe(self) -> dict:
        return {"vertices": sorted(self.subgraph.vertices), "bricks": self.bricks.describe()}


def build_base_cover(subgraph, R: int, ambient: Sequence) -> List[SetFamily]:
    """Families covering ``ambient`` (words of the light subgroup)."""
    base = CliqueBaseCover(subgraph, R)
    groups: List[Dict[Hashable, set]] = [dict() for _ in range(base.colours)]
    for b in ambient:
        c, key = base.piece(b)
        groups[c].setdefault(key, set()).add(b)
    return [SetFamily(f"base colour {c}", [frozenset(s) for _, s in sorted(g.items(), key=lambda kv: repr(kv[0]))])
            for c, g in enumerate(groups)]
