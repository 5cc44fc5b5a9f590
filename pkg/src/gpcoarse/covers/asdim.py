"""Finite-ball witness for the asymptotic dimension bound of a graph product.

Every ball element is split as ``g = x b`` with ``x`` permissible and ``b`` in
the light subgroup; the base colouring of ``b`` picks the family and the pair
``(x, piece of b)`` picks the set.  The sets are therefore translates ``xU``
of base pieces cut down to the ball.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Tuple

from ..graphprod import ProductGraph
from ..metric import DEFAULT_BUDGET, WordMetric
from .bricks import CliqueBaseCover
from .certificate import CoverCertificate, certify
from .families import SetFamily


def family_budget(graph: ProductGraph, R: Optional[int] = None) -> Tuple[int, int]:
    """``(n, k)``: the largest vertex dimension bound and the clique number of
    the light subgraph at scale ``R`` (of the whole graph when ``R`` is None)."""
    n = max((graph.groups[v].asdim_bound for v in graph.vertices), default=0)
    sub = graph if R is None else graph.gamma_r(R)
    return n, sub.clique_number() if sub.vertices else 0


def build_asdim_witness_graph_product(graph: ProductGraph, R: int, radius: int, *,
                                      budget: int = DEFAULT_BUDGET) -> CoverCertificate:
    metric = WordMetric(graph, budget)
    ball = metric.ball(radius=radius)
    base = CliqueBaseCover(graph.gamma_r(R), R)
    n, k = family_budget(graph, R)
    count = n * k + 1
    if base.colours > count:
        # only reachable if the base cover is wasteful; refuse to misreport
        raise AssertionError(f"base cover uses {base.colours} colours, more than {count}")
    buckets: List[Dict[Hashable, set]] = [dict() for _ in range(count)]
    permissible = set()
    for g in ball:
        x, b = graph.decompose_xb(g, R)
        if not b:
            permissible.add(g)
        c, key = base.piece(b)
        buckets[c].setdefault((x, key), set()).add(g)
    families = []
    for c, bucket in enumerate(buckets):
        label = f"translates of base colour {c}" if c < base.colours else f"unused colour {c}"
        families.append(SetFamily(label, list(bucket.values())))
    ambient = {"kind": "graph_product", "graph": graph.to_config(), "center": "",
               "radius": radius, "budget": budget}
    extra = {
        "n": n, "k": k,
        "base_cover": base.describe(),
        "permissible_in_ball": sorted(metric.format(x) for x in permissible),
    }
    return certify("graph-product-asdim", [R], ambient, metric, frozenset(ball),
                   families, [R] * count, extra)
