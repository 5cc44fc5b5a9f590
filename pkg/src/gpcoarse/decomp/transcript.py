"""JSON form of game transcripts and their step-by-step re-verification."""

from __future__ import annotations

from typing import List, Optional

from ..covers.families import LatticeMetric
from ..errors import ConfigError, ParseError
from .boxes import Box, parse_box
from .game import (FiniteSpace, GameTranscript, Item, MetricFamily, RDecomposition,
                   is_uniformly_bounded, verify_decomposition)


def _fmt_point(p) -> str:
    return "(" + ",".join(str(c) for c in p) + ")"


def item_to_json(item: Item) -> dict:
    if isinstance(item, Box):
        return {"box": str(item)}
    pts = sorted(item.points)
    return {"points": [_fmt_point(p) for p in pts],
            "shape": str(item.shape) if item.shape is not None else None,
            "coords": list(item.coords), "window": item.window}


def item_from_json(data: dict, metric: LatticeMetric) -> Item:
    if "box" in data:
        return parse_box(data["box"], metric.weights)
    coords = tuple(data.get("coords", ()))
    shape = None
    if data.get("shape") is not None:
        shape = parse_box(data["shape"], [metric.weights[j] for j in coords])
    pts = frozenset(metric.parse(t) for t in data["points"])
    if len(pts) != len(data["points"]):
        raise ConfigError("repeated point in a finite piece")
    return FiniteSpace(pts, shape, coords, bool(data.get("window", False)))


def transcript_to_json(tr: GameTranscript) -> dict:
    metric = tr.families[0].metric
    steps = []
    for R, decs, reps in zip(tr.scales, tr.decompositions, tr.reports):
        steps.append({
            "scale": R,
            "decompositions": [{"colours": [[item_to_json(P) for P in col] for col in d.colours]}
                               for d in decs],
            "verified": all(r.ok for r in reps),
        })
    return {
        "kind": "sfdc-transcript",
        "ambient": metric.to_json(),
        "strategy": tr.strategy,
        "scales": tr.scales,
        "families": [[item_to_json(X) for X in fam.items] for fam in tr.families],
        "steps": steps,
        "uniformly_bounded": tr.bounded,
        "bound": tr.bound,
        "failure": tr.failure,
        "verified": tr.verified,
    }


def verify_transcript(data: dict) -> List[str]:
    """Recompute every move of a transcript; returns the problems found (empty = valid)."""
    try:
        amb = data["ambient"]
        metric = LatticeMetric(amb["dim"], amb.get("weights"))
        scales = [int(s) for s in data["scales"]]
        fams_json = data["families"]
        steps = data["steps"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed transcript: missing {exc}") from None
    problems: List[str] = []
    if any(b < a for a, b in zip(scales, scales[1:])):
        problems.append("scale sequence is not non-decreasing")
    if len(steps) > len(scales):
        problems.append("more moves than scales")
    if len(fams_json) != len(steps) + 1:
        problems.append(f"{len(fams_json)} families for {len(steps)} moves")
        return problems
    try:
        families = [MetricFamily([item_from_json(x, metric) for x in fam], metric) for fam in fams_json]
    except (ParseError, ConfigError, ValueError) as exc:
        return problems + [f"unparsable item: {exc}"]
    for i, step in enumerate(steps):
        R = step["scale"]
        if i < len(scales) and R != scales[i]:
            problems.append(f"move {i + 1} is played at {R}, the sequence says {scales[i]}")
        src = families[i].items
        decs = step["decompositions"]
        if len(decs) != len(src):
            problems.append(f"move {i + 1}: {len(decs)} decompositions for {len(src)} spaces")
            continue
        pieces_json = []
        for k, (X, dj) in enumerate(zip(src, decs)):
            try:
                cols = tuple([item_from_json(P, metric) for P in col] for col in dj["colours"])
            except (ParseError, ConfigError, ValueError) as exc:
                problems.append(f"move {i + 1}, space {k}: unparsable piece ({exc})")
                continue
            if len(cols) != 2:
                problems.append(f"move {i + 1}, space {k}: expected two colours")
                continue
            rep = verify_decomposition(RDecomposition(X, R, cols), metric)
            for msg in rep.problems:
                problems.append(f"move {i + 1}, space {k}: {msg}")
            pieces_json.extend(P for col in dj["colours"] for P in col)
        if pieces_json != fams_json[i + 1]:
            problems.append(f"family {i + 1} is not the list of pieces produced by move {i + 1}")
    ok, bound = is_uniformly_bounded(families[-1])
    if ok != data.get("uniformly_bounded"):
        problems.append(f"stored boundedness {data.get('uniformly_bounded')}, recomputed {ok}")
    if bound != data.get("bound"):
        problems.append(f"stored bound {data.get('bound')}, recomputed {bound}")
    if not ok:
        problems.append("final family is not uniformly bounded")
    if data.get("failure"):
        problems.append(f"transcript records a failure: {data['failure']}")
    if not data.get("verified", False):
        problems.append("transcript is marked as not verified")
    return problems
