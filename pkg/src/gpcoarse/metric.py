"""Weighted word metric on a graph product, balls, and coarse-map checks.

Every generator of the vertex group at ``v`` costs ``w(v)``.  Distances are
integers; there are no tolerances anywhere.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded
from .graphprod import EMPTY, ProductGraph, Word

DEFAULT_BUDGET = 5_000_000


class CayleySearch:
    """Resumable uniform-cost search over the Cayley graph from the identity.

    Settled words are memoized, so repeated norm queries and ball requests
    share one exploration.  Going past ``budget`` settled nodes raises
    :class:`BudgetExceeded` instead of returning a partial answer.
    """

    def __init__(self, graph: ProductGraph, budget: int = DEFAULT_BUDGET):
        self.graph = graph
        self.budget = budget
        self.settled: Dict[Word, int] = {}
        self._best: Dict[Word, int] = {EMPTY: 0}
        self._tie = itertools.count()
        self._heap: List[Tuple[int, int, Word]] = [(0, next(self._tie), EMPTY)]
        self._moves = [(v, s, graph.weights[v]) for v in graph.vertices
                       for s in graph.groups[v].generators]

    @property
    def radius_done(self) -> int:
        """Every word of norm <= this value is settled."""
        if not self._heap:
            return 10 ** 18
        return self._heap[0][0] - 1

    def _step(self) -> Tuple[Word, int]:
        while self._heap:
            cost, _, word = heapq.heappop(self._heap)
            if word in self.settled:
                continue
            self.settled[word] = cost
            if len(self.settled) > self.budget:
                raise BudgetExceeded(
                    f"Cayley search settled more than {self.budget} elements", self.budget)
            g = self.graph
            for v, s, w in self._moves:
                nxt = g.mul_syllable(word, v, s)
                c = cost + w
                if nxt not in self.settled and c < self._best.get(nxt, c + 1):
                    self._best[nxt] = c
                    heapq.heappush(self._heap, (c, next(self._tie), nxt))
            return word, cost
        raise BudgetExceeded("Cayley graph exhausted")  # finite group fully explored

    def norm(self, word: Word) -> int:
        word = self.graph.reduce(word)
        while word not in self.settled:
            if not self._heap:
                raise BudgetExceeded(f"{word!r} not reachable")
            self._step()
        return self.settled[word]

    def ball(self, radius) -> Dict[Word, int]:
        """Words of norm <= radius, mapped to their norms."""
        while self._heap and self._heap[0][0] <= radius:
            if self._heap[0][2] in self.settled:
                heapq.heappop(self._heap)
                continue
            self._step()
        return {w: d for w, d in self.settled.items() if d <= radius}


class WordMetric:
    """Left-invariant proper metric ``d(g, h) = |g^-1 h|`` on a graph product.

    ``norm`` uses the syllable-sum formula for normal forms (exact because
    reduced syllable expressions are geodesic); ``search_norm`` runs the
    uniform-cost search and is used to cross-check it.  Balls always come
    from the search.
    """

    def __init__(self, graph: ProductGraph, budget: int = DEFAULT_BUDGET):
        self.graph = graph
        self.budget = budget
        self.search = CayleySearch(graph, budget)
        self._ball_cache: Dict[object, Dict[Word, int]] = {}

    def norm(self, word: Word) -> int:
        return self.graph.syllable_norm(word)

    def search_norm(self, word: Word) -> int:
        return self.search.norm(word)

    def distance(self, g: Word, h: Word) -> int:
        """Distance between normal-form words (use :func:`gp_distance` for raw input)."""
        return self.graph.quotient_norm(g, h)

    def ball_norms(self, radius) -> Dict[Word, int]:
        if radius not in self._ball_cache:
            self._ball_cache[radius] = self.search.ball(radius)
        return self._ball_cache[radius]

    def ball(self, center: Word = EMPTY, radius=0) -> set:
        if radius < 0:
            raise ValueError("radius must be non-negative")
        around_e = self.ball_norms(radius)
        if not center:
            return set(around_e)
        g = self.graph
        return {g.multiply(center, w) for w in around_e}

    def format(self, g: Word) -> str:
        return self.graph.format_word(g)

    def parse(self, text: str) -> Word:
        return self.graph.reduce(self.graph.parse_word(text))

    def neighbours(self, g: Word, radius) -> List[Word]:
        """All h with d(g, h) <= radius (left translates of the identity ball)."""
        gr = self.graph
        return [gr.multiply(g, c) for c in self.ball_norms(radius)]


def gp_norm(graph: ProductGraph, word: Word, budget: int = DEFAULT_BUDGET) -> int:
    """Exact weighted word norm by uniform-cost search."""
    return CayleySearch(graph, budget).norm(word)


def gp_distance(graph: ProductGraph, g: Word, h: Word, budget: int = DEFAULT_BUDGET) -> int:
    return gp_norm(graph, graph.multiply(graph.invert(g), h), budget)


def gp_ball(graph: ProductGraph, center: Word, radius, budget: int = DEFAULT_BUDGET) -> set:
    return WordMetric(graph, budget).ball(center, radius)


# ---- coarse maps ---------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseLinear:
    """Non-decreasing piecewise-linear function given by breakpoints.

    Beyond the last breakpoint the last segment's slope continues; a single
    breakpoint is a constant function.
    """

    points: Tuple[Tuple[Fraction, Fraction], ...]

    def __init__(self, points: Iterable[Sequence]):
        pts = sorted((Fraction(t), Fraction(v)) for t, v in points)
        if not pts:
            raise ValueError("need at least one breakpoint")
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 == t1:
                raise ValueError(f"duplicate breakpoint at {t0}")
            if v1 < v0:
                raise ValueError("control functions must be non-decreasing")
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def linear(cls, slope, intercept=0) -> "PiecewiseLinear":
        slope = Fraction(slope)
        return cls([(0, intercept), (1, Fraction(intercept) + slope)])

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        pts = self.points
        if len(pts) == 1:
            return pts[0][1]
        if t <= pts[0][0]:
            (t0, v0), (t1, v1) = pts[0], pts[1]
        elif t >= pts[-1][0]:
            (t0, v0), (t1, v1) = pts[-2], pts[-1]
        else:
            for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
                if t0 <= t <= t1:
                    break
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    @property
    def is_unbounded(self) -> bool:
        return len(self.points) > 1 and self.points[-1][1] > self.points[-2][1]

    def to_json(self):
        return [[str(t), str(v)] for t, v in self.points]


@dataclass(frozen=True)
class ControlPair:
    lower: Optional[PiecewiseLinear] = None
    upper: Optional[PiecewiseLinear] = None


@dataclass
class CoarseMapReport:
    checked: int = 0
    violations: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_coarse_map(samples: Iterable[Sequence], cp: ControlPair) -> CoarseMapReport:
    """Check ``lower(dX) <= dY <= upper(dX)`` on sample pairs.

    Each sample is ``(dX, dY)`` or ``(x, x2, dX, dY)``.
    """
    report = CoarseMapReport()
    for sample in samples:
        if len(sample) == 2:
            pair, (dx, dy) = None, sample
        else:
            pair, dx, dy = (sample[0], sample[1]), sample[2], sample[3]
        report.checked += 1
        if cp.lower is not None and cp.lower(dx) > dy:
            report.violations.append({"pair": pair, "d_source": dx, "d_target": dy,
                                      "violated": "lower", "bound": cp.lower(dx)})
        if cp.upper is not None and dy > cp.upper(dx):
            report.violations.append({"pair": pair, "d_source": dx, "d_target": dy,
                                      "violated": "upper", "bound": cp.upper(dx)})
    return report
