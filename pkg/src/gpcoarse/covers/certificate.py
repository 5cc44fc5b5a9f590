"""Cover certificates: JSON form, reconstruction of the ambient space, and
independent re-verification of every stored claim.

A certificate is only accepted when its families partition the stored domain.
That makes every single-element edit (drop, swap, duplicate, foreign element)
detectable, not just the ones that happen to break disjointness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from ..errors import ConfigError, ParseError, VerificationFailure
from ..graphprod import graph_from_config
from ..metric import DEFAULT_BUDGET, WordMetric
from .families import LatticeMetric, SetFamily, is_r_disjoint, mesh


@dataclass
class CertifiedFamily:
    label: str
    sets: List[frozenset]
    disjoint_gt: int
    mesh: int

    @property
    def family(self) -> SetFamily:
        return SetFamily(self.label, self.sets)


@dataclass
class CoverCertificate:
    theorem: str
    scales: List[int]
    ambient: dict
    families: List[CertifiedFamily]
    covers_ball: bool
    verified: bool
    extra: dict = field(default_factory=dict)

    def required_scale(self, i: int) -> int:
        return self.scales[0] if len(self.scales) == 1 else self.scales[i]

    def summary(self) -> str:
        n = len(self.families)
        scales = sorted({f.disjoint_gt for f in self.families})
        gt = ", ".join(str(s) for s in scales) if scales else "-"
        return (f"{n} {'family' if n == 1 else 'families'}, disjoint > {gt}, "
                f"mesh {max((f.mesh for f in self.families), default=0)}, "
                f"covering: {str(self.covers_ball).lower()}, verified: {str(self.verified).lower()}")

    def to_json(self, space) -> dict:
        fams = []
        for f in self.families:
            sets = sorted(sorted(space.format(p) for p in S) for S in f.sets)
            fams.append({"label": f.label, "sets": sets,
                         "verified_disjoint_gt": f.disjoint_gt, "mesh": f.mesh})
        out = {"theorem": self.theorem, "scales": list(self.scales), "ambient": self.ambient,
               "families": fams, "covers_ball": self.covers_ball, "verified": self.verified}
        if self.extra:
            out["extra"] = self.extra
        return out


# ---- ambient spaces --------------------------------------------------------

def ambient_space(ambient: dict):
    """Rebuild ``(space, domain)`` from a certificate's ambient description."""
    kind = ambient.get("kind")
    if kind == "graph_product":
        graph = graph_from_config(ambient["graph"])
        metric = WordMetric(graph, ambient.get("budget", DEFAULT_BUDGET))
        center = metric.parse(ambient.get("center", ""))
        return metric, frozenset(metric.ball(center, ambient["radius"]))
    if kind == "yr_tree":
        from .trees import YrTree
        graph = graph_from_config(ambient["graph"])
        tree = YrTree(graph, ambient["r"], ambient["depth"], norm_cap=ambient.get("norm_cap"))
        return tree, frozenset(tree.vertices)
    if kind == "lattice":
        metric = LatticeMetric(ambient["dim"], ambient.get("weights"))
        pts = set()
        for text in ambient["pieces"]:
            from ..decomp.boxes import parse_box
            pts.update(parse_box(text).points())
        return metric, frozenset(pts)
    raise ConfigError(f"unknown ambient kind {kind!r}")


def certify(theorem: str, scales: Sequence[int], ambient: dict, space, domain,
            families: Sequence[SetFamily], family_scales: Sequence[int],
            extra: Optional[dict] = None) -> CoverCertificate:
    """Verify ``families`` against ``domain`` and package the outcome."""
    out = []
    ok = True
    for fam, s in zip(families, family_scales):
        dis = is_r_disjoint(fam, s, space)
        out.append(CertifiedFamily(fam.label, list(fam.sets), s, mesh(fam, space)))
        ok = ok and bool(dis)
    problems = _partition_problems(out, domain)
    cov = not any(p.startswith("uncovered") for p in problems)
    verified = ok and not problems
    return CoverCertificate(theorem, list(scales), ambient, out, cov, verified, dict(extra or {}))


def _partition_problems(families: Sequence[CertifiedFamily], domain, fmt=repr) -> List[str]:
    seen: Dict[Hashable, str] = {}
    problems = []
    for f in families:
        for k, S in enumerate(f.sets):
            if not S:
                problems.append(f"empty set {k} in family {f.label!r}")
            for p in S:
                if p not in domain:
                    problems.append(f"element {fmt(p)} of family {f.label!r} set {k} lies outside the domain")
                elif p in seen:
                    problems.append(f"element {fmt(p)} appears twice ({seen[p]} and {f.label!r} set {k})")
                else:
                    seen[p] = f"{f.label!r} set {k}"
    missing = [p for p in domain if p not in seen]
    if missing:
        problems.append(f"uncovered element {min(fmt(p) for p in missing)}")
    return problems


@dataclass
class VerificationReport:
    ok: bool
    problems: List[str]

    def first(self) -> str:
        return self.problems[0] if self.problems else ""


def verify_certificate(data: dict) -> VerificationReport:
    """Recompute every flag and number stored in a certificate JSON object."""
    try:
        space, domain = ambient_space(data["ambient"])
        scales = list(data["scales"])
        fams_json = data["families"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed certificate: missing {exc}") from None
    problems: List[str] = []
    fams: List[CertifiedFamily] = []
    for i, fj in enumerate(fams_json):
        try:
            sets = [frozenset(space.parse(t) for t in S) for S in fj["sets"]]
        except (ParseError, ConfigError) as exc:
            problems.append(f"family {i}: unparsable element ({exc})")
            continue
        for S, raw in zip(sets, fj["sets"]):
            if len(S) != len(raw):
                problems.append(f"family {fj['label']!r}: repeated element in a set")
        fams.append(CertifiedFamily(fj["label"], sets, fj["verified_disjoint_gt"], fj["mesh"]))
        need = scales[0] if len(scales) == 1 else (scales[i] if i < len(scales) else None)
        if need is None or fj["verified_disjoint_gt"] != need:
            problems.append(f"family {fj['label']!r}: stored scale {fj['verified_disjoint_gt']} "
                            f"does not match required scale {need}")
    if problems:
        return VerificationReport(False, problems)
    for f in fams:
        dis = is_r_disjoint(f.family, f.disjoint_gt, space)
        if not dis:
            p, q = dis.witness
            problems.append(f"family {f.label!r}: {space.format(p)} and {space.format(q)} "
                            f"at distance {dis.distance} <= {f.disjoint_gt}")
        m = mesh(f.family, space)
        if m != f.mesh:
            problems.append(f"family {f.label!r}: stored mesh {f.mesh}, recomputed {m}")
    part = _partition_problems(fams, domain, fmt=space.format)
    problems.extend(part)
    problems.extend(_theorem_problems(data, space, domain, fams))
    cov = not any(p.startswith("uncovered") for p in part)
    if cov != data["covers_ball"]:
        problems.append(f"stored covering flag {data['covers_ball']}, recomputed {cov}")
    if not data.get("verified", False):
        problems.append("certificate is marked as not verified")
    return VerificationReport(not problems, problems)


def _theorem_problems(data: dict, space, domain, fams: List[CertifiedFamily]) -> List[str]:
    """Family counts and recorded parameters that follow from the ambient space."""
    theorem = data.get("theorem")
    scales = list(data["scales"])
    extra = data.get("extra", {})
    problems = []
    if any(b < a for a, b in zip(scales, scales[1:])):
        problems.append("scales are not non-decreasing")

    def expect(what, stored, recomputed):
        if stored != recomputed:
            problems.append(f"{what}: stored {stored!r}, recomputed {recomputed!r}")

    if theorem == "graph-product-asdim":
        from .asdim import family_budget
        graph = space.graph
        n, k = family_budget(graph, scales[0])
        expect("family count", len(fams), n * k + 1)
        expect("n", extra.get("n"), n)
        expect("k", extra.get("k"), k)
        perm = sorted(space.format(g) for g in domain if graph.is_permissible(g, scales[0]))
        expect("permissible elements", extra.get("permissible_in_ball"), perm)
    elif theorem == "free-product-property-c":
        from .apc import VertexAPCWitness, extend_scales
        graph = space.graph
        if len(graph.vertices) != 2:
            return problems + [f"free product needs two vertex groups, ambient has {len(graph.vertices)}"]
        n, k = (VertexAPCWitness.family_count(graph.groups[v]) for v in graph.vertices)
        expect("n", extra.get("n"), n)
        expect("k", extra.get("k"), k)
        expect("family count", len(fams), n + k + 2)
        full, extended = extend_scales(extra.get("input_scales", scales), n + k + 2)
        expect("scales", scales, full)
        expect("scales_extended", extra.get("scales_extended"), extended)
        rho = max(full) if extra.get("mode") == "buffered" else 0
        if extra.get("mode") not in ("buffered", "literal"):
            problems.append(f"unknown construction mode {extra.get('mode')!r}")
        expect("buffer", extra.get("buffer"), rho)
        expect("r", extra.get("r"), full[n + k - 1] + rho)
        expect("tree_scale", extra.get("tree_scale"), 2 * max(full[n + k], full[n + k + 1]))
    elif theorem == "tree-annulus-cover":
        expect("family count", len(fams), 2)
        limit = 6 * scales[0]
        expect("mesh_limit", extra.get("mesh_limit"), limit)
        expect("vertices", extra.get("vertices"), len(domain))
        for f in fams:
            if f.mesh > limit:
                problems.append(f"family {f.label!r}: mesh {f.mesh} exceeds {limit}")
    elif theorem == "union-property-c":
        expect("family count", len(fams), len(scales))
    else:
        problems.append(f"unknown theorem {theorem!r}")
    return problems


def require_verified(cert: CoverCertificate) -> CoverCertificate:
    if not cert.verified:
        raise VerificationFailure(f"{cert.theorem} certificate failed verification")
    return cert
