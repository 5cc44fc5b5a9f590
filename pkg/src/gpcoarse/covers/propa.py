"""Finite check of the three averaging conditions behind property A."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple


@dataclass
class PropertyAFamily:
    """Finite domain ``F`` with a finite set ``A_x`` of ``(point, label)`` pairs per ``x``."""

    domain: List[Hashable]
    sets: Dict[Hashable, frozenset]
    r: float
    eps: Fraction
    R: float

    @classmethod
    def from_function(cls, domain: Iterable, build: Callable[[Hashable], Iterable[Tuple[Hashable, int]]],
                      r, eps, R) -> "PropertyAFamily":
        dom = list(domain)
        return cls(dom, {x: frozenset(build(x)) for x in dom}, r, Fraction(eps), R)


@dataclass
class ConditionResult:
    ok: bool = True
    witness: Optional[tuple] = None


@dataclass
class PropertyAReport:
    conditions: Dict[int, ConditionResult] = field(default_factory=dict)
    pairs_checked: int = 0
    max_ratio: Fraction = Fraction(0)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions.values())

    def lines(self) -> List[str]:
        names = {1: "(x,1) in A_x", 2: "small symmetric difference", 3: "bounded range"}
        out = []
        for k in (1, 2, 3):
            c = self.conditions[k]
            tail = "" if c.ok else f" (first failure: {c.witness!r})"
            out.append(f"condition {k} [{names[k]}]: {'pass' if c.ok else 'FAIL'}{tail}")
        out.append(f"pairs checked: {self.pairs_checked}, max ratio: {self.max_ratio}")
        return out


def verify_property_A(fam: PropertyAFamily, metric) -> PropertyAReport:
    rep = PropertyAReport({k: ConditionResult() for k in (1, 2, 3)})
    for x in fam.domain:
        A = fam.sets[x]
        if rep.conditions[1].ok and (x, 1) not in A:
            rep.conditions[1] = ConditionResult(False, (x,))
        if rep.conditions[3].ok:
            for y, n in sorted(A, key=repr):
                if metric.distance(x, y) > fam.R:
                    rep.conditions[3] = ConditionResult(False, (x, (y, n), metric.distance(x, y)))
                    break
    eps = Fraction(fam.eps)
    for x, y in itertools.combinations_with_replacement(fam.domain, 2):
        if metric.distance(x, y) >= fam.r:
            continue
        rep.pairs_checked += 1
        Ax, Ay = fam.sets[x], fam.sets[y]
        inter = len(Ax & Ay)
        if inter == 0:
            if rep.conditions[2].ok:
                rep.conditions[2] = ConditionResult(False, (x, y, "empty intersection"))
            continue
        ratio = Fraction(len(Ax ^ Ay), inter)
        rep.max_ratio = max(rep.max_ratio, ratio)
        if ratio >= eps and rep.conditions[2].ok:
            rep.conditions[2] = ConditionResult(False, (x, y, ratio))
    return rep


def ball_family(domain: Iterable, metric, radius, r, eps) -> PropertyAFamily:
    """``A_x = B_radius(x) x {1}`` with balls taken through ``metric.neighbours``."""
    return PropertyAFamily.from_function(
        domain, lambda x: ((y, 1) for y in metric.neighbours(x, radius)), r, eps, radius)
