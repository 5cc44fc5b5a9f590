"""Command-line interface: word arithmetic, cover certificates, decomposition
games and their verification.

Exit codes: 0 success, 2 parse or config error, 3 refusal, 4 budget exceeded,
5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from fractions import Fraction
from typing import List, Optional, Sequence

from .covers.apc import assemble_union_cover, build_free_product_apc_witness, lattice_uniform_witness
from .covers.asdim import build_asdim_witness_graph_product
from .covers.bricks import BrickColouring
from .covers.certificate import verify_certificate
from .covers.families import LatticeMetric, SetFamily
from .covers.propa import ball_family, verify_property_A
from .covers.trees import YrTree, check_tree_quasi_isometry, tree_cover_certificate
from .decomp.boxes import Box, parse_box
from .decomp.game import (FiniteSpace, MetricFamily, Subgroup, UniformlyExpansiveMap, direct_sum_ball,
                          fibered_strategy, run_game, strategy_zn, subgroup_union_strategy)
from .decomp.transcript import transcript_to_json, verify_transcript
from .errors import ConfigError, GPCoarseError, ParseError, VerificationFailure
from .graphprod import graph_from_config
from .metric import DEFAULT_BUDGET, WordMetric, gp_norm

EXIT_OK, EXIT_CONFIG, EXIT_REFUSAL, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4, 5


# ---- config and output -------------------------------------------------------

def load_config(path: Optional[str]) -> dict:
    if path is None:
        raise ConfigError("this command needs --config")
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def graph_of(cfg: dict):
    return graph_from_config(cfg["graph"] if "graph" in cfg else cfg)


def write_atomic(path: str, data: dict) -> None:
    """Write JSON via a temporary file in the target directory and rename it into place."""
    text = json.dumps(data, indent=1, ensure_ascii=False) + "\n"
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_scales(text: Optional[str]) -> List[int]:
    if text is None:
        raise ConfigError("this command needs --scales")
    try:
        out = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ParseError("scales must be comma-separated integers", text, 0) from None
    if not out or any(s < 0 for s in out):
        raise ConfigError("scales must be non-negative and non-empty")
    return out


def _need(value, flag: str):
    if value is None:
        raise ConfigError(f"this command needs {flag}")
    return value


def _budget(args, cfg) -> int:
    return args.budget or cfg.get("budget", DEFAULT_BUDGET)


def _ball(args, cfg) -> int:
    return _need(args.ball if args.ball is not None else cfg.get("ball"), "--ball")


# ---- word commands -----------------------------------------------------------

def cmd_norm(args) -> int:
    cfg = load_config(args.config)
    g = graph_of(cfg)
    w = g.reduce(g.parse_word(args.word))
    print(gp_norm(g, w, _budget(args, cfg)) if args.search else g.syllable_norm(w))
    return EXIT_OK


def cmd_distance(args) -> int:
    cfg = load_config(args.config)
    m = WordMetric(graph_of(cfg), _budget(args, cfg))
    print(m.distance(m.parse(args.word1), m.parse(args.word2)))
    return EXIT_OK


def cmd_ball(args) -> int:
    cfg = load_config(args.config)
    m = WordMetric(graph_of(cfg), _budget(args, cfg))
    norms = m.ball_norms(_ball(args, cfg))
    rows = sorted((d, m.format(w)) for w, d in norms.items())
    if args.out:
        write_atomic(args.out, {"radius": _ball(args, cfg), "budget": m.budget, "size": len(rows),
                                "elements": [{"word": s, "norm": d} for d, s in rows]})
        print(f"{len(rows)} elements")
    else:
        for d, s in rows:
            print(f"{d}\t{s or 'e'}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    g = graph_of(load_config(args.config))
    print(g.format_word(g.reduce(g.parse_word(args.word))))
    return EXIT_OK


def cmd_standard_form(args) -> int:
    g = graph_of(load_config(args.config))
    w = g.reduce(g.parse_word(args.word))
    print(g.format_word(g.standard_form(w, _need(args.scale, "--scale"))))
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = graph_of(load_config(args.config))
    w = g.reduce(g.parse_word(args.word))
    x, b = g.decompose_xb(w, _need(args.scale, "--scale"))
    print(f"x = {g.format_word(x)}")
    print(f"b = {g.format_word(b)}")
    return EXIT_OK


# ---- certificates ------------------------------------------------------------

def _emit_certificate(cert, space, out: Optional[str]) -> int:
    if out:
        write_atomic(out, cert.to_json(space))
    print(cert.summary())
    return EXIT_OK if cert.verified else EXIT_VERIFY


def cmd_asdim_witness(args) -> int:
    cfg = load_config(args.config)
    g = graph_of(cfg)
    budget = _budget(args, cfg)
    cert = build_asdim_witness_graph_product(g, _need(args.scale, "--scale"), _ball(args, cfg), budget=budget)
    return _emit_certificate(cert, WordMetric(g, budget), args.out)


def cmd_apc_free(args) -> int:
    cfg = load_config(args.config)
    g = graph_of(cfg)
    budget = _budget(args, cfg)
    cert = build_free_product_apc_witness(g, parse_scales(args.scales), _ball(args, cfg),
                                          buffered=not args.literal, budget=budget)
    if cert.extra.get("scales_extended"):
        print(f"scales extended to {cert.scales}")
    return _emit_certificate(cert, WordMetric(g, budget), args.out)


def cmd_union_cover(args) -> int:
    cfg = load_config(args.config)
    u = cfg.get("union")
    if not isinstance(u, dict):
        raise ConfigError("union-cover needs a 'union' object in the config")
    dim = u.get("dim", 1)
    metric = LatticeMetric(dim, u.get("weights"))
    try:
        piece_text = list(u["pieces"])
        y_text = list(u.get("y_region", []))
    except (KeyError, TypeError):
        raise ConfigError("'union' needs a 'pieces' list of finite boxes") from None
    pieces = [frozenset(parse_box(t, metric.weights).points()) for t in piece_text]
    y_region = frozenset(p for t in y_text for p in parse_box(t, metric.weights).points())
    witness = lattice_uniform_witness(pieces, metric, parse_scales(args.scales))
    scale = 5 * max(witness.bounds)
    bricks = BrickColouring(metric.weights, scale)
    buckets = [dict() for _ in range(bricks.colours)]
    for p in sorted(y_region):
        c, key = bricks.piece(p)
        buckets[c].setdefault(key, set()).add(p)
    y_cover = [SetFamily(f"Y brick colour {c}", list(b.values())) for c, b in enumerate(buckets)]
    ambient = {"kind": "lattice", "dim": dim, "weights": list(metric.weights), "pieces": piece_text}
    cert = assemble_union_cover(witness, y_region, y_cover, metric, ambient=ambient)
    return _emit_certificate(cert, metric, args.out)


def cmd_tree_yr(args) -> int:
    cfg = load_config(args.config)
    g = graph_of(cfg)
    r = _need(args.r, "--r")
    depth = _need(args.depth, "--depth")
    tree = YrTree(g, r, depth, budget=_budget(args, cfg))
    rep = check_tree_quasi_isometry(tree)
    print(f"Y_{r} tree: {len(tree)} vertices, depth {depth}")
    print(f"d <= {r}*d_e on all {rep.pairs} pairs: {not rep.upper_violations}")
    print(f"d_e <= 2*d on all {rep.pairs} pairs: {not rep.lower_violations}")
    code = EXIT_OK if rep.ok else EXIT_VERIFY
    if args.scale is not None:
        cert = tree_cover_certificate(g, r, depth, args.scale)
        limit = 6 * args.scale
        ok_mesh = all(f.mesh <= limit for f in cert.families)
        print(f"mesh <= {limit}: {ok_mesh}")
        c2 = _emit_certificate(cert, tree, args.out)
        if c2 or not ok_mesh:
            code = EXIT_VERIFY
    return code


_SUM = re.compile(r"\s*oplusZ\^(\d+)\s+ball\s+(\d+)\s*$")
_ZN = re.compile(r"\s*Z\^(\d+)\s*$")


def _space_of(text: str):
    m = _SUM.match(text)
    if m:
        pts, metric = direct_sum_ball(int(m.group(1)), int(m.group(2)))
        return MetricFamily([FiniteSpace(pts, window=True)], metric), "sum"
    m = _ZN.match(text)
    if m:
        n = int(m.group(1))
        return MetricFamily([Box.full(n)], LatticeMetric(n)), "box"
    box = parse_box(text)
    return MetricFamily([box], LatticeMetric(box.dim)), "box"


def cmd_sfdc_play(args) -> int:
    space, kind = _space_of(args.space)
    metric = space.metric
    n = metric.dim
    if args.strategy == "zn":
        if kind == "sum":
            raise ConfigError("use the subgroup-union strategy on a direct-sum model")
        strat = strategy_zn(n)
    elif args.strategy == "fibered":
        if kind == "sum" or n < 2:
            raise ConfigError("the fibered strategy projects Z^n (n >= 2) to its first coordinate")
        f = UniformlyExpansiveMap.projection([0])
        strat = fibered_strategy(f, strategy_zn(1), lambda Y: strategy_zn(n))
    elif args.strategy == "subgroup-union":
        if kind != "sum":
            raise ConfigError("the subgroup-union strategy needs an 'oplusZ^M ball N' model")
        chain = [Subgroup(f"Z^{i}", tuple(range(i)), strategy_zn(i)) for i in range(1, n + 1)]
        strat = subgroup_union_strategy(chain, (0,) * n)
    else:
        raise ConfigError(f"unknown strategy {args.strategy!r}; use zn, fibered or subgroup-union")
    tr = run_game(space, strat, parse_scales(args.scales))
    if args.out:
        write_atomic(args.out, transcript_to_json(tr))
    status = "verified" if tr.verified else f"FAILED: {tr.failure}"
    print(f"{tr.steps}-step transcript, bound {tr.bound}, {status}")
    if tr.witness is not None:
        print(f"violating pair: {tr.witness}")
    return EXIT_OK if tr.verified else EXIT_VERIFY


def cmd_verify(args) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.path!r} is not valid JSON: {exc.msg}") from None
    if data.get("kind") == "sfdc-transcript":
        problems = verify_transcript(data)
    else:
        problems = verify_certificate(data).problems
    if problems:
        print(f"verification failed: {problems[0]}")
        if len(problems) > 1:
            print(f"({len(problems) - 1} further problems)")
        return EXIT_VERIFY
    print("verified")
    return EXIT_OK


def cmd_prop_a_check(args) -> int:
    lo, hi = (int(t) for t in args.domain.split(","))
    metric = LatticeMetric(1)
    fam = ball_family([(x,) for x in range(lo, hi + 1)], metric, args.radius, args.r, Fraction(args.eps))
    for x in args.drop or []:
        key = (x,)
        if key not in fam.sets:
            raise ConfigError(f"{x} is not in the domain")
        fam.sets[key] = fam.sets[key] - {(key, 1)}
    rep = verify_property_A(fam, metric)
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.ok else EXIT_VERIFY


# ---- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config with the graph and vertex groups")
    common.add_argument("--budget", type=int, help="node budget for searches and enumerations")
    common.add_argument("--out", help="write the JSON artifact here (atomically)")
    common.add_argument("--ball", type=int, help="ball radius")
    common.add_argument("--scale", type=int, help="scale R (or r)")
    common.add_argument("--scales", help="comma-separated non-decreasing scales")

    p = argparse.ArgumentParser(prog="gpcoarse", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("norm", cmd_norm, "weighted word norm")
    sp.add_argument("word")
    sp.add_argument("--search", action="store_true", help="compute by Cayley-graph search")
    sp = add("distance", cmd_distance, "left-invariant distance between two words")
    sp.add_argument("word1")
    sp.add_argument("word2")
    add("ball", cmd_ball, "list the ball around the identity")
    add("reduce", cmd_reduce, "normal form").add_argument("word")
    add("standard-form", cmd_standard_form, "light syllables pushed right").add_argument("word")
    add("decompose", cmd_decompose, "split g = x b").add_argument("word")
    add("asdim-witness", cmd_asdim_witness, "graph-product cover certificate")
    sp = add("apc-free", cmd_apc_free, "free-product property C certificate")
    sp.add_argument("--literal", action="store_true", help="build the unbuffered construction")
    add("union-cover", cmd_union_cover, "union of uniformly covered pieces")
    sp = add("tree-yr", cmd_tree_yr, "Y_r tree checks and its annulus cover")
    sp.add_argument("--r", type=int, help="syllable norm bound")
    sp.add_argument("--depth", type=int, help="syllable depth bound")
    sp = add("sfdc-play", cmd_sfdc_play, "play the straight decomposition game")
    sp.add_argument("space", help="'Z^n', a box like 'Z^2 box [0,inf)x[-3,3]', or 'oplusZ^M ball N'")
    sp.add_argument("strategy", help="zn, fibered or subgroup-union")
    add("verify", cmd_verify, "re-verify a certificate or transcript").add_argument("path")
    sp = add("prop-a-check", cmd_prop_a_check, "property A conditions for ball families on Z")
    sp.add_argument("--domain", default="-30,30", help="lo,hi")
    sp.add_argument("--radius", type=int, default=10, help="radius of each A_x")
    sp.add_argument("--r", type=float, default=1)
    sp.add_argument("--eps", default="1/4")
    sp.add_argument("--drop", type=int, action="append", help="remove (x,1) from A_x")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GPCoarseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
