"""Metric families, R-decompositions and the straight decomposition game.

Items of a family are either symbolic boxes (:class:`Box`) or finite point
sets (:class:`FiniteSpace`).  A strategy maps ``(item, R)`` to an
:class:`RDecomposition`; :func:`run_game` plays a fixed scale sequence and
verifies every move before accepting it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

from ..covers.families import LatticeMetric, SetFamily, diameter, is_r_disjoint
from ..errors import GPCoarseError, Refusal
from .boxes import Box, Interval, Periodic, box_distance, self_distance


class StrategyFailure(GPCoarseError):
    exit_code = 5


@dataclass(frozen=True)
class FiniteSpace:
    """A finite set of lattice points; ``shape`` is an optional symbolic box on
    the coordinates ``coords`` that the set lives in (used to delegate to box
    strategies).  The set counts as unbounded when its shape is, or when it is
    a ``window`` onto an unbounded space and has no shape yet."""

    points: frozenset
    shape: Optional[Box] = None
    coords: Tuple[int, ...] = ()
    window: bool = False  # a finite window onto an unbounded space

    def project(self, p) -> tuple:
        return tuple(p[j] for j in self.coords)


Item = Union[Box, FiniteSpace]


@dataclass
class MetricFamily:
    items: List[Item]
    metric: LatticeMetric

    def __len__(self):
        return len(self.items)


@dataclass
class RDecomposition:
    """``source = Y^0 u Y^1``; each colour lists its pieces."""

    source: Item
    R: int
    colours: Tuple[List[Item], List[Item]]

    @property
    def pieces(self) -> List[Item]:
        return list(self.colours[0]) + list(self.colours[1])


@dataclass
class DecompositionReport:
    ok: bool = True
    problems: List[str] = field(default_factory=list)
    witness: Optional[tuple] = None

    def fail(self, msg: str, witness=None):
        if self.ok:
            self.witness = witness
        self.ok = False
        self.problems.append(msg)


# ---- verification ----------------------------------------------------------

def _axis_inside(piece_ax, src_ax) -> bool:
    if piece_ax == src_ax:
        return True
    if not isinstance(src_ax, Interval):
        return False
    if isinstance(piece_ax, Periodic):
        return piece_ax.clip == src_ax
    return ((src_ax.lo is None or (piece_ax.lo is not None and piece_ax.lo >= src_ax.lo))
            and (src_ax.hi is None or (piece_ax.hi is not None and piece_ax.hi <= src_ax.hi)))


def _covers_axis(src: Interval, axes: List) -> Optional[int]:
    """A coordinate of ``src`` missed by every axis in ``axes`` (``None`` if covered)."""
    if src.bounded:
        return next((x for x in range(src.lo, src.hi + 1)
                     if not any(a.contains(x) for a in axes)), None)
    periodic = [a for a in axes if isinstance(a, Periodic)]
    finite = [a for a in axes if isinstance(a, Interval) and a.bounded]
    rays = [a for a in axes if isinstance(a, Interval) and not a.bounded]
    ends = [e for a in finite for e in (a.lo, a.hi)] + [e for a in rays for e in (a.lo, a.hi) if e is not None]
    ends += [e for a in periodic for e in (a.lo, a.hi) if e is not None]
    ends += [e for e in (src.lo, src.hi) if e is not None]
    far_hi = max(ends, default=0) + 1
    far_lo = min(ends, default=0) - 1
    L = 1
    for a in periodic:
        L = L * a.period // math.gcd(L, a.period)
    # beyond every finite end the pattern is periodic, so one period per side decides
    probes = []
    if src.hi is None:
        probes.extend(range(far_hi, far_hi + L))
    if src.lo is None:
        probes.extend(range(far_lo - L + 1, far_lo + 1))
    span_lo = far_lo if src.lo is None else src.lo
    probes.extend(range(span_lo, far_hi + 1))
    for x in probes:
        if src.contains(x) and not any(a.contains(x) for a in axes):
            return x
    return None


def _verify_box(dec: RDecomposition, rep: DecompositionReport) -> None:
    X = dec.source
    pieces = dec.pieces
    split = set()
    for P in pieces:
        if not isinstance(P, Box) or P.dim != X.dim or P.weights != X.weights:
            rep.fail(f"piece {P} does not live in the ambient of {X}")
            return
        for j, (pa, xa) in enumerate(zip(P.axes, X.axes)):
            if pa != xa:
                if not _axis_inside(pa, xa):
                    rep.fail(f"piece {P} is not contained in {X} (axis {j})")
                    return
                split.add(j)
    if len(split) > 1:
        rep.fail(f"pieces of {X} split more than one axis {sorted(split)}; not supported")
        return
    if not split:
        if not any(P == X for P in pieces):
            rep.fail(f"{X} is not covered")
    else:
        j = split.pop()
        miss = _covers_axis(X.axes[j], [P.axes[j] for P in pieces])
        if miss is not None:
            rep.fail(f"coordinate {miss} on axis {j} of {X} is in no piece", ("uncovered", j, miss))
        axes = [j]
        for c, col in enumerate(dec.colours):
            for P in col:
                d = self_distance(P, axes)
                if d is not None and d <= dec.R:
                    ax = P.axes[j]
                    p = _sample_point(P)
                    q = list(p)
                    p = list(p)
                    p[j] = ax.offset + ax.width - 1
                    q[j] = ax.offset + ax.period
                    rep.fail(f"colour {c}: neighbouring slabs of {P} are {d} <= {dec.R} apart",
                             (tuple(p), tuple(q), d))
            for P, Q in itertools.combinations(col, 2):
                d = box_distance(P, Q)
                if d <= dec.R:
                    rep.fail(f"colour {c}: pieces {P} and {Q} are {d} <= {dec.R} apart", (str(P), str(Q), d))


def _sample_point(P: Box) -> tuple:
    out = []
    for a in P.axes:
        if isinstance(a, Periodic):
            out.append(a.offset)
        else:
            out.append(a.lo if a.lo is not None else (a.hi if a.hi is not None else 0))
    return tuple(out)


def _verify_finite(dec: RDecomposition, metric, rep: DecompositionReport) -> None:
    X = dec.source.points
    union = set()
    for P in dec.pieces:
        pts = P.points if isinstance(P, FiniteSpace) else P
        if not pts:
            rep.fail("empty piece")
        if not set(pts) <= X:
            extra = next(iter(set(pts) - X))
            rep.fail(f"piece point {extra} is outside the source", (extra,))
        union |= set(pts)
    if union != set(X):
        missed = min(set(X) - union)
        rep.fail(f"point {missed} is in no piece", (missed,))
    for c, col in enumerate(dec.colours):
        fam = SetFamily(f"colour {c}", [P.points if isinstance(P, FiniteSpace) else P for P in col])
        dis = is_r_disjoint(fam, dec.R, metric)
        if not dis:
            rep.fail(f"colour {c}: points {dis.witness[0]} and {dis.witness[1]} of different pieces "
                     f"are {dis.distance} <= {dec.R} apart", (*dis.witness, dis.distance))


def verify_decomposition(dec: RDecomposition, metric: Optional[LatticeMetric] = None) -> DecompositionReport:
    """Check that the pieces cover the source and each colour is ``R``-disjoint."""
    rep = DecompositionReport()
    if isinstance(dec.source, Box):
        _verify_box(dec, rep)
    else:
        if metric is None:
            raise ValueError("finite decompositions need the ambient metric")
        _verify_finite(dec, metric, rep)
    return rep


def item_diameter(item: Item, metric: Optional[LatticeMetric] = None) -> Optional[int]:
    if isinstance(item, Box):
        return item.diameter()
    if item.shape is not None:
        if item.shape.diameter() is None:
            return None
    elif item.window:
        return None
    return diameter(item.points, metric)


def is_uniformly_bounded(family: MetricFamily) -> Tuple[bool, Optional[int]]:
    """``(True, max diameter)`` or ``(False, None)`` if some box is unbounded."""
    best = 0
    for it in family.items:
        d = item_diameter(it, family.metric)
        if d is None:
            return False, None
        best = max(best, d)
    return True, best


# ---- strategies ------------------------------------------------------------

class Strategy:
    name = "strategy"

    def decompose(self, item: Item, R: int, metric: LatticeMetric) -> RDecomposition:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name}


def _split_box(X: Box, j: int, width: int) -> Tuple[Box, Box]:
    src = X.axes[j]
    lo, hi = (src.lo, src.hi) if isinstance(src, Interval) else (None, None)
    return (X.replace(j, Periodic(0, width, 2 * width, lo, hi)),
            X.replace(j, Periodic(width, width, 2 * width, lo, hi)))


def _finite_via_shape(item: FiniteSpace, dec: RDecomposition) -> RDecomposition:
    """Cut a finite set along a symbolic decomposition of its shape."""
    colours = ([], [])
    for c, col in enumerate(dec.colours):
        groups: Dict[Hashable, set] = {}
        for t, P in enumerate(col):
            for p in item.points:
                key = P.piece_of(item.project(p))
                if key is not None:
                    groups.setdefault((t, key), set()).add(p)
        for (t, _), pts in sorted(groups.items(), key=lambda kv: kv[0]):
            colours[c].append(FiniteSpace(frozenset(pts), col[t], item.coords, item.window))
    return RDecomposition(item, dec.R, colours)


class ZnStrategy(Strategy):
    """Split the lowest-index unbounded coordinate into alternating slabs."""

    name = "zn"

    def __init__(self, n: int, width: Optional[Callable[[int], int]] = None):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.width = width or (lambda R: 2 * (R + 1))

    def decompose_box(self, X: Box, R: int) -> RDecomposition:
        if X.bounded:
            return RDecomposition(X, R, ([X], []))
        j = next(j for j, a in enumerate(X.axes) if not a.bounded)
        a, b = _split_box(X, j, self.width(R))
        return RDecomposition(X, R, ([a], [b]))

    def decompose(self, item: Item, R: int, metric=None) -> RDecomposition:
        if isinstance(item, Box):
            return self.decompose_box(item, R)
        if item.shape is None:
            raise StrategyFailure("the Z^n strategy needs a box or a finite set with a box shape")
        return _finite_via_shape(item, self.decompose_box(item.shape, R))

    def describe(self) -> dict:
        return {"name": self.name, "n": self.n}


def strategy_zn(n: int) -> ZnStrategy:
    return ZnStrategy(n)


# ---- maps and pullbacks ----------------------------------------------------

@dataclass
class UniformlyExpansiveMap:
    """A map of lattices with control function ``rho``.

    ``coords`` set means the map is the coordinate projection onto those
    coordinates, which lets boxes be pulled back symbolically.
    """

    fn: Callable[[tuple], tuple]
    rho: Callable[[int], int]
    coords: Optional[Tuple[int, ...]] = None
    label: str = "map"

    @classmethod
    def projection(cls, coords: Sequence[int], rho=None) -> "UniformlyExpansiveMap":
        coords = tuple(coords)
        return cls(lambda p: tuple(p[j] for j in coords), rho or (lambda t: t), coords,
                   f"projection to {list(coords)}")

    @classmethod
    def identity(cls) -> "UniformlyExpansiveMap":
        return cls(lambda p: tuple(p), lambda t: t, None, "identity")

    def image(self, item: Item, metric=None) -> Item:
        if isinstance(item, Box):
            if self.label == "identity":
                return item
            if self.coords is None:
                raise StrategyFailure("boxes can only be pushed forward along coordinate projections")
            return Box(tuple(item.axes[j] for j in self.coords), tuple(item.weights[j] for j in self.coords))
        return FiniteSpace(frozenset(self.fn(p) for p in item.points))

    def check(self, pairs, src_metric, dst_metric) -> List[tuple]:
        """Pairs where ``d(f x, f y) > rho(d(x, y))``."""
        bad = []
        for x, y in pairs:
            dx = src_metric.distance(x, y)
            dy = dst_metric.distance(self.fn(x), self.fn(y))
            if dy > self.rho(dx):
                bad.append((x, y, dx, dy))
        return bad


def _preimage_box(X: Box, f: UniformlyExpansiveMap, V: Box) -> Box:
    if f.label == "identity":
        return V
    axes = list(X.axes)
    for k, j in enumerate(f.coords):
        axes[j] = V.axes[k]
    return Box(tuple(axes), X.weights)


def pullback_decomposition(f: UniformlyExpansiveMap, dec: RDecomposition, R: int, source: Item,
                           metric: Optional[LatticeMetric] = None,
                           image_metric: Optional[LatticeMetric] = None) -> RDecomposition:
    """Pull a decomposition of ``f(source)`` at scale ``rho(R)`` back to ``source`` at ``R``."""
    S = f.rho(R)
    if dec.R < S:
        raise StrategyFailure(f"decomposition scale {dec.R} is below rho({R}) = {S}")
    rep = verify_decomposition(dec, image_metric)
    if not rep.ok:
        raise StrategyFailure(f"image decomposition is invalid: {rep.problems[0]}")
    if isinstance(source, Box):
        colours = tuple([_preimage_box(source, f, V) for V in col] for col in dec.colours)
        return RDecomposition(source, R, colours)
    colours = ([], [])
    for c, col in enumerate(dec.colours):
        for V in col:
            if isinstance(V, Box):
                groups: Dict[Hashable, set] = {}
                for p in source.points:
                    key = V.piece_of(f.fn(p))
                    if key is not None:
                        groups.setdefault(key, set()).add(p)
                parts = [groups[k] for k in sorted(groups)]
            else:
                vp = V.points if isinstance(V, FiniteSpace) else V
                parts = [{p for p in source.points if f.fn(p) in vp}]
            shape, window = None, False
            if (isinstance(V, Box) and source.shape is not None and f.coords is not None
                    and source.coords == tuple(range(source.shape.dim))):
                shape, window = _preimage_box(source.shape, f, V), source.window
            colours[c].extend(FiniteSpace(frozenset(s), shape, source.coords if shape else (), window)
                              for s in parts if s)
    return RDecomposition(source, R, colours)


class FiberedStrategy(Strategy):
    """Decompose the image until it is bounded, then hand each fibre to its own strategy."""

    name = "fibered"

    def __init__(self, f: UniformlyExpansiveMap, base: Strategy,
                 fiber_factory: Callable[[Item], Strategy]):
        self.f = f
        self.base = base
        self.fiber_factory = fiber_factory

    def decompose(self, item: Item, R: int, metric=None) -> RDecomposition:
        Y = self.f.image(item, metric)
        if item_diameter(Y, metric) is None:
            dec = self.base.decompose(Y, self.f.rho(R), metric)
            return pullback_decomposition(self.f, dec, R, item, metric, metric)
        return self.fiber_factory(Y).decompose(item, R, metric)

    def describe(self) -> dict:
        return {"name": self.name, "map": self.f.label, "base": self.base.describe()}


def fibered_strategy(f, base, fiber_factory) -> FiberedStrategy:
    return FiberedStrategy(f, base, fiber_factory)


# ---- subgroup unions on a ball model ---------------------------------------

@dataclass
class Subgroup:
    """Subgroup of Z^M spanned by the coordinates ``coords``."""

    label: str
    coords: Tuple[int, ...]
    strategy: Strategy

    def contains(self, p) -> bool:
        return all(x == 0 for j, x in enumerate(p) if j not in self.coords)

    def coset_key(self, p) -> tuple:
        return tuple(x for j, x in enumerate(p) if j not in self.coords)


class SubgroupUnionStrategy(Strategy):
    """First move: cosets of the first subgroup containing the ``R_1``-ball.

    Later moves hand each coset to that subgroup's strategy, acting on the
    coset's coordinates through its symbolic shape.
    """

    name = "subgroup-union"

    def __init__(self, chain: Sequence[Subgroup], identity: tuple):
        self.chain = list(chain)
        self.identity = identity
        self.chosen: Optional[Subgroup] = None

    def decompose(self, item: Item, R: int, metric: LatticeMetric = None) -> RDecomposition:
        if not isinstance(item, FiniteSpace):
            raise StrategyFailure("the subgroup-union strategy works on a finite ball model")
        if item.shape is not None:
            if self.chosen is None:
                raise StrategyFailure("coset pieces appeared before the coset move")
            return self.chosen.strategy.decompose(item, R, metric)
        small = [p for p in item.points if metric.distance(p, self.identity) <= R]
        for G in self.chain:
            if all(G.contains(p) for p in small):
                self.chosen = G
                break
        else:
            raise Refusal(f"no subgroup in the chain contains the {R}-ball inside the model")
        G = self.chosen
        cosets: Dict[tuple, set] = {}
        for p in item.points:
            cosets.setdefault(G.coset_key(p), set()).add(p)
        w = tuple(metric.weights[j] for j in G.coords)
        shape = Box.full(len(G.coords), w)
        pieces = [FiniteSpace(frozenset(cosets[k]), shape, G.coords, item.window) for k in sorted(cosets)]
        return RDecomposition(item, R, (pieces, []))

    def describe(self) -> dict:
        return {"name": self.name, "chain": [g.label for g in self.chain],
                "chosen": self.chosen.label if self.chosen else None}


def subgroup_union_strategy(chain, identity) -> SubgroupUnionStrategy:
    return SubgroupUnionStrategy(chain, identity)


def direct_sum_ball(dim: int, radius: int) -> Tuple[frozenset, LatticeMetric]:
    """Ball of finitely supported vectors with generator ``e_j`` of weight ``j``."""
    metric = LatticeMetric(dim, list(range(1, dim + 1)))
    pts = [()]
    for j in range(1, dim + 1):
        nxt = []
        for p in pts:
            used = sum((i + 1) * abs(x) for i, x in enumerate(p))
            room = (radius - used) // j
            nxt.extend(p + (x,) for x in range(-room, room + 1))
        pts = nxt
    return frozenset(pts), metric


# ---- the game ----------------------------------------------------------------

@dataclass
class GameTranscript:
    scales: List[int]
    families: List[MetricFamily]
    decompositions: List[List[RDecomposition]]
    reports: List[List[DecompositionReport]]
    strategy: dict
    bounded: bool = False
    bound: Optional[int] = None
    failure: Optional[str] = None
    witness: Optional[tuple] = None

    @property
    def steps(self) -> int:
        return len(self.decompositions)

    @property
    def verified(self) -> bool:
        return self.failure is None and self.bounded and all(r.ok for step in self.reports for r in step)


def run_game(space: MetricFamily, strategy: Strategy, scales: Sequence[int]) -> GameTranscript:
    scales = [int(s) for s in scales]
    tr = GameTranscript(scales, [space], [], [], strategy.describe())
    if any(b < a for a, b in zip(scales, scales[1:])):
        tr.failure = "scale sequence must be non-decreasing"
        return tr
    current = space
    for R in scales:
        ok, bound = is_uniformly_bounded(current)
        if ok:
            break
        decs, reps = [], []
        try:
            for X in current.items:
                decs.append(strategy.decompose(X, R, current.metric))
        except (StrategyFailure, Refusal) as exc:
            tr.failure = f"strategy failed at scale {R}: {exc}"
            tr.strategy = strategy.describe()
            return tr
        for d in decs:
            reps.append(verify_decomposition(d, current.metric))
        tr.decompositions.append(decs)
        tr.reports.append(reps)
        bad = next((r for r in reps if not r.ok), None)
        if bad is not None:
            tr.failure = f"invalid move at scale {R}: {bad.problems[0]}"
            tr.witness = bad.witness
            tr.strategy = strategy.describe()
            return tr
        current = MetricFamily([P for d in decs for P in d.pieces], current.metric)
        tr.families.append(current)
    tr.strategy = strategy.describe()
    tr.bounded, tr.bound = is_uniformly_bounded(current)
    if not tr.bounded:
        tr.failure = "family is not uniformly bounded after the last scale"
    return tr
