"""Finite-ball witnesses for asymptotic property C: vertex groups, free
products of two vertex groups, and unions of uniformly covered pieces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from ..errors import ConfigError, Refusal, VerificationFailure
from ..graphprod import ProductGraph, Word
from ..metric import DEFAULT_BUDGET, WordMetric
from .bricks import BrickColouring
from .certificate import CoverCertificate, certify
from .families import (SetFamily, VertexGroupMetric, covers, is_r_disjoint, mesh,
                       saturated_union)
from .trees import AnnulusColouring, YrTree


class VertexAPCWitness:
    """Families ``U^1..U^n`` covering one vertex group, ``U^i`` disjoint at ``scales[i]``.

    All families come from one brick colouring at the largest requested scale,
    so ``n = asdim bound + 1``.
    """

    def __init__(self, spec, weight: int, scales: Sequence[int]):
        if spec.kind == "free":
            raise Refusal("no property C witness is implemented for free vertex groups")
        self.spec = spec
        self.weight = weight
        self.count = spec.asdim_bound + 1
        if len(scales) != self.count:
            raise ConfigError(f"{spec.describe()} needs {self.count} scales, got {len(scales)}")
        self.scales = list(scales)
        rank = spec.rank if spec.kind == "free_abelian" else 0
        self.bricks = BrickColouring((weight,) * rank, max(scales))
        self.metric = VertexGroupMetric(spec, weight)

    @classmethod
    def family_count(cls, spec) -> int:
        if spec.kind == "free":
            raise Refusal("no property C witness is implemented for free vertex groups")
        return spec.asdim_bound + 1

    def piece(self, a) -> Tuple[int, Hashable]:
        if self.spec.kind == "free_abelian":
            return self.bricks.piece(a)
        return 0, ()

    def families_on(self, points) -> List[SetFamily]:
        buckets: List[Dict[Hashable, set]] = [dict() for _ in range(self.count)]
        for a in points:
            c, key = self.piece(a)
            buckets[c].setdefault(key, set()).add(a)
        return [SetFamily(f"{self.spec.describe()} colour {c}", list(b.values()))
                for c, b in enumerate(buckets)]

    def check(self, radius) -> None:
        """Verify the witness on the ``radius`` ball of the vertex group."""
        ball = self.spec.enumerate_ball(radius, self.weight)
        fams = self.families_on(ball)
        for fam, s in zip(fams, self.scales):
            dis = is_r_disjoint(fam, s, self.metric)
            if not dis:
                raise VerificationFailure(f"vertex witness {fam.label!r} is not {s}-disjoint: {dis.witness}")
        ok, missed = covers(fams, ball)
        if not ok:
            raise VerificationFailure(f"vertex witness misses {missed!r}")


def extend_scales(scales: Sequence[int], need: int) -> Tuple[List[int], bool]:
    scales = [int(s) for s in scales]
    if not scales:
        raise ConfigError("need at least one scale")
    if any(b < a for a, b in zip(scales, scales[1:])):
        raise ConfigError("scales must be non-decreasing")
    if len(scales) >= need:
        return scales[:need], False
    return scales + [scales[-1]] * (need - len(scales)), True


def build_free_product_apc_witness(graph: ProductGraph, scales: Sequence[int], radius: int, *,
                                   buffered: bool = True, budget: int = DEFAULT_BUDGET,
                                   a_witness: Optional[VertexAPCWitness] = None,
                                   b_witness: Optional[VertexAPCWitness] = None) -> CoverCertificate:
    """Property C witness for ``A * B`` restricted to a ball.

    Write ``g = x a y`` with ``a`` the last syllable of norm above ``r`` and
    ``y`` the tail after it.  Short tails (norm at most the buffer) put ``g``
    in the translate ``x (U y)`` of the vertex piece ``U`` containing ``a``;
    long tails and elements without a long syllable go to translates of the
    tree pieces of the tail.  With ``buffered=False`` the buffer is 0 and
    ``r`` is the last vertex scale, which is the unrepaired construction.
    """
    if len(graph.vertices) != 2 or graph.edges:
        raise ConfigError("a free product of exactly two vertex groups is required")
    va, vb = graph.vertices
    ga, gb = graph.groups[va], graph.groups[vb]
    n = VertexAPCWitness.family_count(ga)
    k = VertexAPCWitness.family_count(gb)
    full, extended = extend_scales(scales, n + k + 2)
    wa = a_witness or VertexAPCWitness(ga, graph.weights[va], full[:n])
    wb = b_witness or VertexAPCWitness(gb, graph.weights[vb], full[n:n + k])
    wa.check(radius)
    wb.check(radius)
    rho = max(full) if buffered else 0
    r = full[n + k - 1] + rho
    tree_scale = 2 * max(full[n + k], full[n + k + 1])
    min_w = min(graph.weights.values())
    tree = YrTree(graph, r, radius // min_w, norm_cap=radius, budget=budget)
    annuli = AnnulusColouring(tree, tree_scale)

    metric = WordMetric(graph, budget)
    ball = metric.ball(radius=radius)
    buckets: List[Dict[Hashable, set]] = [dict() for _ in range(n + k + 2)]
    for g in ball:
        j = max((i for i, s in enumerate(g) if graph.syllable_weight(s) > r), default=-1)
        if j < 0:
            x, y = (), g
        else:
            x, y = g[:j + 1], g[j + 1:]
        if j >= 0 and graph.syllable_norm(y) <= rho:
            v, a = g[j]
            c, key = (wa if v == va else wb).piece(a)
            fam = c if v == va else n + c
            buckets[fam].setdefault(("vertex", g[:j], key), set()).add(g)
        else:
            c, key = annuli.piece(y)
            buckets[n + k + c].setdefault(("tree", x, key), set()).add(g)
    labels = ([f"translated {va} pieces {i}" for i in range(n)]
              + [f"translated {vb} pieces {i}" for i in range(k)]
              + [f"translated tree annuli colour {c}" for c in range(2)])
    families = [SetFamily(lab, list(b.values())) for lab, b in zip(labels, buckets)]
    ambient = {"kind": "graph_product", "graph": graph.to_config(), "center": "",
               "radius": radius, "budget": budget}
    extra = {"mode": "buffered" if buffered else "literal", "r": r, "buffer": rho,
             "tree_scale": tree_scale, "input_scales": [int(s) for s in scales],
             "scales_extended": extended, "n": n, "k": k}
    return certify("free-product-property-c", full, ambient, metric, frozenset(ball),
                   families, full, extra)


# ---- unions of uniformly covered pieces ---------------------------------

@dataclass
class UniformAPCWitness:
    """Pieces ``X_a`` with, per scale index ``i``, families ``U^i_a`` sharing one bound."""

    pieces: List[frozenset]
    families: List[List[SetFamily]]  # families[a][i]
    disjoint: List[int]
    bounds: List[int] = field(default_factory=list)

    def check(self, metric) -> None:
        for a, fams in enumerate(self.families):
            for i, (fam, d) in enumerate(zip(fams, self.disjoint)):
                dis = is_r_disjoint(fam, d, metric)
                if not dis:
                    raise VerificationFailure(f"piece {a} family {i} is not {d}-disjoint: {dis.witness}")
                if self.bounds and mesh(fam, metric) > self.bounds[i]:
                    raise VerificationFailure(f"piece {a} family {i} exceeds bound {self.bounds[i]}")
            ok, missed = covers(fams, self.pieces[a])
            if not ok:
                raise VerificationFailure(f"piece {a} is not covered: {missed!r} missing")


def lattice_uniform_witness(pieces: Sequence[frozenset], metric, disjoint: Sequence[int]) -> UniformAPCWitness:
    """Brick families on each piece at the largest requested scale."""
    bricks = BrickColouring(metric.weights, max(disjoint))
    if bricks.colours != len(disjoint):
        raise ConfigError(f"lattice of rank {metric.dim} needs {bricks.colours} scales")
    per_piece = []
    for P in pieces:
        buckets: List[Dict[Hashable, set]] = [dict() for _ in range(bricks.colours)]
        for p in P:
            c, key = bricks.piece(p)
            buckets[c].setdefault(key, set()).add(p)
        per_piece.append([SetFamily(f"brick colour {c}", list(b.values())) for c, b in enumerate(buckets)])
    bounds = [max((mesh(fams[i], metric) for fams in per_piece), default=0) for i in range(len(disjoint))]
    return UniformAPCWitness([frozenset(P) for P in pieces], per_piece, list(disjoint), bounds)


def assemble_union_cover(witness: UniformAPCWitness, y_region: frozenset, y_cover: Sequence[SetFamily],
                         metric, *, ambient: Optional[dict] = None) -> CoverCertificate:
    """``W^i = V^i saturated-union_{d_i} (restricted U^i)`` over all pieces.

    Hypotheses are checked first and a failure raises with a witness pair.
    The result is made a partition of the union of pieces by keeping each
    point only in its first set; subsets of disjoint bounded sets stay so.
    """
    d = witness.disjoint
    witness.check(metric)
    domain = frozenset().union(*witness.pieces)
    stray = sorted(y_region - domain)
    if stray:
        raise VerificationFailure(f"Y contains {stray[0]!r}, which lies in no piece")
    bound_n = max(witness.bounds) if witness.bounds else 0
    r = 5 * bound_n
    outside = [P - y_region for P in witness.pieces]
    dis = is_r_disjoint(SetFamily("pieces minus Y", [P for P in outside if P]), r, metric)
    if not dis:
        raise VerificationFailure(f"pieces minus Y are not {r}-disjoint: {dis.witness} at {dis.distance}")
    checked = []
    for i, fam in enumerate(y_cover):
        need = 5 * witness.bounds[i] if i < len(witness.bounds) else 5 * bound_n
        ok = is_r_disjoint(fam, need, metric)
        if not ok:
            raise VerificationFailure(f"Y family {i} is not {need}-disjoint: {ok.witness}")
        checked.append(need)
    ok, missed = covers(y_cover, y_region)
    if not ok:
        raise VerificationFailure(f"Y cover misses {missed!r}")

    m = max(len(d), len(y_cover))
    scales = [d[i] if i < len(d) else d[-1] for i in range(m)]
    families = []
    for i in range(m):
        ubar = []
        if i < len(d):
            for a, fams in enumerate(witness.families):
                ubar.extend(S & outside[a] for S in fams[i].sets if S & outside[a])
        V = y_cover[i] if i < len(y_cover) else SetFamily("empty", [])
        U = SetFamily(f"restricted pieces {i}", ubar)
        families.append(saturated_union(V, U, scales[i], metric, label=f"saturated union {i}"))
    seen = set()
    trimmed = []
    for fam in families:
        sets = []
        for S in fam.sets:
            S2 = frozenset(p for p in S if p not in seen)
            seen |= S2
            if S2:
                sets.append(S2)
        trimmed.append(SetFamily(fam.label, sets))
    amb = ambient or {"kind": "lattice", "dim": metric.dim, "weights": list(metric.weights)}
    extra = {"y_scales_checked": checked, "pieces_gap_checked": r, "bounds": witness.bounds}
    return certify("union-property-c", scales, amb, metric, domain, trimmed, scales, extra)
