"""Set families over finite pieces of a metric space and their checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from ..errors import ParseError


@dataclass
class SetFamily:
    label: str
    sets: List[frozenset] = field(default_factory=list)

    def __post_init__(self):
        self.sets = [frozenset(s) for s in self.sets]

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    @property
    def union(self) -> frozenset:
        return frozenset().union(*self.sets) if self.sets else frozenset()


@dataclass
class Disjointness:
    ok: bool
    witness: Optional[Tuple[Hashable, Hashable]] = None
    distance: Optional[int] = None

    def __bool__(self):
        return self.ok


# ---- metric spaces -------------------------------------------------------

class LatticeMetric:
    """Weighted l1 metric on Z^n (the word metric for the standard basis)."""

    def __init__(self, dim: int, weights: Optional[Sequence[int]] = None):
        self.dim = dim
        self.weights = tuple(weights) if weights is not None else (1,) * dim
        if len(self.weights) != dim or any(w < 1 for w in self.weights):
            raise ValueError("need one positive weight per coordinate")
        self._offsets: Dict[int, List[tuple]] = {}

    def distance(self, a, b) -> int:
        return sum(w * abs(x - y) for w, x, y in zip(self.weights, a, b))

    def offsets(self, radius) -> List[tuple]:
        radius = int(radius)
        if radius not in self._offsets:
            out = [()]
            for w in self.weights:
                out = [o + (c,) for o in out for c in range(-(radius // w), radius // w + 1)]
            self._offsets[radius] = [o for o in out if self.distance(o, (0,) * self.dim) <= radius]
        return self._offsets[radius]

    def neighbours(self, p, radius) -> List[tuple]:
        return [tuple(x + o for x, o in zip(p, off)) for off in self.offsets(radius)]

    def format(self, p) -> str:
        return "(" + ",".join(str(c) for c in p) + ")"

    def parse(self, text: str):
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ParseError("expected a point literal (a,b,...)", text, 0)
        try:
            p = tuple(int(c) for c in body[1:-1].split(","))
        except ValueError:
            raise ParseError("non-integer coordinate", text, 1) from None
        if len(p) != self.dim:
            raise ParseError(f"expected {self.dim} coordinates", text, 0)
        return p

    def to_json(self) -> dict:
        return {"kind": "lattice", "dim": self.dim, "weights": list(self.weights)}


class VertexGroupMetric:
    """Word metric on a single vertex group scaled by its weight."""

    def __init__(self, spec, weight: int = 1):
        self.spec = spec
        self.weight = weight

    def norm(self, a) -> int:
        return self.spec.norm_weighted(a, self.weight)

    def distance(self, a, b) -> int:
        s = self.spec
        return self.norm(s._mul(s._inv(a), b))

    def neighbours(self, p, radius):
        s = self.spec
        return [s._mul(p, c) for c in s.enumerate_ball(radius, self.weight)]

    def format(self, p) -> str:
        return self.spec.format_element(p)

    def parse(self, text: str):
        return self.spec.parse_element(text)


# ---- checks --------------------------------------------------------------

def set_distance(U, V, metric) -> int:
    return min(metric.distance(u, v) for u in U for v in V)


def diameter(U, metric) -> int:
    U = list(U)
    return max((metric.distance(a, b) for a, b in itertools.combinations(U, 2)), default=0)


def mesh(family, metric) -> int:
    sets = family.sets if isinstance(family, SetFamily) else family
    return max((diameter(U, metric) for U in sets), default=0)


def is_r_disjoint(family, r, metric, *, pairwise: Optional[bool] = None) -> Disjointness:
    """Exact check that distinct sets are more than ``r`` apart.

    Uses ``metric.neighbours`` (translates of the r-ball) when available, which
    is exhaustive for left-invariant metrics; otherwise scans all pairs.
    """
    sets = family.sets if isinstance(family, SetFamily) else list(family)
    owner: Dict[Hashable, int] = {}
    for i, U in enumerate(sets):
        for p in U:
            if p in owner and owner[p] != i:
                return Disjointness(False, (p, p), 0)
            owner[p] = i
    if pairwise is None:
        pairwise = not hasattr(metric, "neighbours")
    if not pairwise:
        for p, i in owner.items():
            for q in metric.neighbours(p, r):
                j = owner.get(q)
                if j is not None and j != i:
                    return Disjointness(False, (p, q), metric.distance(p, q))
        return Disjointness(True)
    for i, j in itertools.combinations(range(len(sets)), 2):
        for u in sets[i]:
            for v in sets[j]:
                d = metric.distance(u, v)
                if d <= r:
                    return Disjointness(False, (u, v), d)
    return Disjointness(True)


def covers(families: Iterable, target: Iterable) -> Tuple[bool, Optional[Hashable]]:
    """Whether the union of all families contains ``target``; returns a missed point."""
    covered = set()
    for fam in families:
        for U in (fam.sets if isinstance(fam, SetFamily) else fam):
            covered.update(U)
    for p in target:
        if p not in covered:
            return False, p
    return True, None


def saturated_union(V: SetFamily, U: SetFamily, d, metric, label: Optional[str] = None) -> SetFamily:
    """``V`` saturated by ``U`` at distance ``d``.

    Each ``V``-set absorbs every ``U``-set within distance ``d`` of it; the
    ``U``-sets far from every ``V``-set are kept as they are.
    """
    v_sets = V.sets if isinstance(V, SetFamily) else [frozenset(s) for s in V]
    u_sets = U.sets if isinstance(U, SetFamily) else [frozenset(s) for s in U]
    near = [[u for u in u_sets if set_distance(v, u, metric) <= d] for v in v_sets]
    out = [frozenset(v).union(*n) for v, n in zip(v_sets, near)]
    absorbed = {id(u) for n in near for u in n}
    out.extend(u for u in u_sets if id(u) not in absorbed)
    name = label or f"{getattr(V, 'label', 'V')} u_{d} {getattr(U, 'label', 'U')}"
    return SetFamily(name, out)


def translate_family(graph, x, U: SetFamily, label: Optional[str] = None) -> SetFamily:
    """Left-translate every set of ``U`` by the graph-product element ``x``."""
    return SetFamily(label or f"{graph.format_word(x) or 'e'}.{U.label}",
                     [frozenset(graph.multiply(x, u) for u in S) for S in U.sets])
