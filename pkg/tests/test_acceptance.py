"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line and
the whole list is repeated in the terminal summary."""

import copy
import json
import random
from fractions import Fraction

import pytest

from gpcoarse import VertexGroupSpec
from gpcoarse.cli import main
from gpcoarse.covers.apc import build_free_product_apc_witness
from gpcoarse.covers.asdim import build_asdim_witness_graph_product
from gpcoarse.covers.families import LatticeMetric, SetFamily, diameter, is_r_disjoint, mesh, saturated_union
from gpcoarse.covers.propa import ball_family, verify_property_A
from gpcoarse.covers.trees import YrTree, check_tree_quasi_isometry, tree_cover_certificate
from gpcoarse.decomp import (Box, FiniteSpace, MetricFamily, UniformlyExpansiveMap, pullback_decomposition,
                             run_game, strategy_zn, verify_decomposition)
from gpcoarse.decomp.transcript import transcript_to_json, verify_transcript
from gpcoarse.graphprod import ProductGraph, complete_graph, edgeless_graph, path_graph
from gpcoarse.metric import WordMetric, gp_ball, gp_norm

from oracles import brute_norms, canonical_label, minimal_words, shuffle_class

Z = VertexGroupSpec.free_abelian(1)
Z2 = VertexGroupSpec.free_abelian(2)
C3 = VertexGroupSpec.cyclic(3)
C4 = VertexGroupSpec.cyclic(4)
F2 = VertexGroupSpec.free(2)
S3 = VertexGroupSpec.finite_table(
    ["e", "a", "b", "c", "d", "f"],
    [["e", "a", "b", "c", "d", "f"], ["a", "e", "d", "f", "b", "c"], ["b", "f", "e", "d", "c", "a"],
     ["c", "d", "f", "e", "a", "b"], ["d", "c", "a", "b", "f", "e"], ["f", "b", "c", "a", "e", "d"]])


def lemma_graphs():
    out = {}
    for tag, gs in (("Z,Z/4", [Z, C4, Z]), ("Z/4,Z", [C4, Z, C4])):
        for w in ((1, 2), (2, 7), (3, 9)):
            out[f"edge {tag} w={w}"] = path_graph(gs[:2], w)
        for w in ((1, 3, 7), (2, 1, 5), (1, 2, 9)):
            out[f"P3 {tag} w={w}"] = path_graph(gs, w)
        for w in ((1, 8), (3, 2)):
            out[f"edgeless {tag} w={w}"] = edgeless_graph(gs[:2], w)
    return out


def test_01_lemma_suite(criterion):
    violations = []
    cases = 0
    for name, g in lemma_graphs().items():
        metric = WordMetric(g)
        ball = metric.ball(radius=10)
        for r in (2, 6):
            light = g.light_vertices(r)
            sub = g.gamma_r(r)
            light_ball = [g.reduce(b) for b in WordMetric(sub).ball(radius=r)] if sub.vertices else [()]
            steps = list(metric.ball(radius=r))
            for w in ball:
                x, b = g.decompose_xb(w, r)
                # permissible: no shuffle of x ends in a light syllable
                ends_light = any(s and s[-1][0] in light for s in shuffle_class(g, x))
                if ends_light or any(v not in light for v, _ in b) or g.multiply(x, b) != w:
                    violations.append((name, r, w, "decomposition"))
            perm = [x for x in ball if not any(s and s[-1][0] in light for s in shuffle_class(g, x))]
            for x in perm:
                for b in light_ball:
                    xb = g.multiply(x, b)
                    cases += 1
                    # cosets of the light subgroup have one permissible representative
                    if g.decompose_xb(xb, r) != (x, b):
                        violations.append((name, r, x, b, "uniqueness"))
                    # any x'b' within r of xb is found by stepping from xb
                    for h in steps:
                        x2, b2 = g.decompose_xb(g.multiply(xb, h), r)
                        if x2 != x and g.syllable_norm(b2) <= r:
                            violations.append((name, r, x, b, x2, b2, "distance"))
    ok = not violations and cases > 0
    criterion(1, f"lemma suite over {len(lemma_graphs())} graphs, r in (2,6): "
                 f"{cases} (x,b) pairs, {len(violations)} violations", ok)
    assert ok, violations[:3]


def test_02_graph_product_asdim_certificate(criterion, tmp_path):
    g = path_graph([Z, Z, Z], [1, 2, 5])
    cert = build_asdim_witness_graph_product(g, 4, 14)
    cfg = tmp_path / "p3.json"
    cfg.write_text(json.dumps({"graph": g.to_config()}))
    out = tmp_path / "cert.json"
    code = main(["asdim-witness", "--config", str(cfg), "--scale", "4", "--ball", "14", "--out", str(out)])
    data = json.loads(out.read_text())
    ok = (code == 0 and cert.verified and len(cert.families) == 3
          and all(f.disjoint_gt == 4 for f in cert.families) and data["covers_ball"]
          and main(["verify", str(out)]) == 0)
    criterion(2, f"P3 Z^3 weights (1,2,5), R=4, ball 14: {cert.summary()}, exit {code}", ok)
    assert ok


def _interval_family(rng, d, R, lo, hi):
    """Random intervals of diameter <= R with gaps > d inside [lo, hi]."""
    sets, x = [], lo + rng.randint(0, 3)
    while x < hi:
        length = rng.randint(0, R)
        sets.append(frozenset((t,) for t in range(x, min(x + length, hi) + 1)))
        x += length + d + 1 + rng.randint(0, 4)
    return sets


def _saturated_instance(rng, dim):
    d = rng.randint(1, 4)
    R = rng.randint(d, 2 * d + 2)
    if dim == 1:
        U = _interval_family(rng, d, R, 0, 120)
        V, x = [], rng.randint(-10, 10)
        while x < 130:
            n = rng.randint(1, 3)
            V.append(frozenset((x + rng.randint(0, 2 * R),) for _ in range(n)))
            x += 2 * R + 5 * R + 1 + rng.randint(0, 10)
        return d, R, U, V
    # Z^2: squares of side s with sum of sides <= R on a grid of spacing > d
    side = R // 2
    step = side + d + 1 + rng.randint(0, 2)
    U = []
    for i in range(0, 40, step):
        for j in range(0, 40, step):
            if rng.random() < 0.8:
                U.append(frozenset((i + a, j + b) for a in range(side + 1) for b in range(side + 1)))
    V = []
    far = 5 * R + 7  # V-sets have diameter <= 6
    for i in range(-5, 45, far):
        for j in range(-5, 45, far):
            V.append(frozenset({(i + rng.randint(0, 3), j + rng.randint(0, 3)) for _ in range(2)}))
    return d, R, U, V


def test_03_saturated_union(criterion):
    rng = random.Random(20240601)
    passed = 0
    failures = []
    for t in range(200):
        dim = 1 if t % 2 == 0 else 2
        metric = LatticeMetric(dim)
        d, R, U, V = _saturated_instance(rng, dim)
        Uf, Vf = SetFamily("U", U), SetFamily("V", V)
        hyp = (is_r_disjoint(Uf, d, metric) and mesh(Uf, metric) <= R and R >= d
               and is_r_disjoint(Vf, 5 * R, metric))
        assert hyp, f"generator produced an instance outside the hypotheses (case {t})"
        W = saturated_union(Vf, Uf, d, metric)
        bound = mesh(Vf, metric) + 2 * d + 2 * mesh(Uf, metric)
        if is_r_disjoint(W, d, metric) and mesh(W, metric) <= bound:
            passed += 1
        else:
            failures.append(t)
    metric = LatticeMetric(1)
    U = SetFamily("U", [frozenset({(0,), (1,)}), frozenset({(5,)})])
    empty = SetFamily("empty", [])
    identity = (sorted(map(sorted, saturated_union(empty, U, 3, metric).sets)) == sorted(map(sorted, U.sets))
                and sorted(map(sorted, saturated_union(U, empty, 3, metric).sets)) == sorted(map(sorted, U.sets)))
    ok = passed == 200 and identity
    criterion(3, f"saturated union: {passed}/200 d-disjoint and bounded; empty-family identity {identity}", ok)
    assert ok, failures


def test_04_yr_tree(criterion):
    g = ProductGraph(["a", "b"], {"a": 1, "b": 1}, {"a": Z, "b": Z}, [], injective=False)
    tree = YrTree(g, 3, 3)
    rep = check_tree_quasi_isometry(tree)
    cert = tree_cover_certificate(g, 3, 3, 3)
    cover_ok = (cert.verified and len(cert.families) == 2
                and all(f.mesh <= 18 and f.disjoint_gt == 3 for f in cert.families))
    ok = rep.ok and rep.pairs == len(tree) * (len(tree) - 1) // 2 and cover_ok
    criterion(4, f"Y_3 tree depth 3, {len(tree)} vertices, {rep.pairs} pairs, "
                 f"{len(rep.upper_violations)}+{len(rep.lower_violations)} violations; "
                 f"tree cover: {cert.summary()}", ok)
    assert ok


def test_05_free_product_property_c(criterion, tmp_path):
    # weights (2, 3): the weight-1 ball of radius 15 has about 3e7 elements
    g = ProductGraph(["a", "b"], {"a": 2, "b": 3}, {"a": Z, "b": Z}, [])
    cert = build_free_product_apc_witness(g, (2, 3, 4, 5), 15)
    per_scale = all(f.disjoint_gt == s for f, s in zip(cert.families, cert.scales))
    out = tmp_path / "cfree.json"
    cert_json = cert.to_json(WordMetric(g))
    out.write_text(json.dumps(cert_json))
    code = main(["verify", str(out)])
    ok = cert.verified and len(cert.families) == 6 and per_scale and cert.covers_ball and code == 0
    criterion(5, f"Z*Z weights (2,3), scales (2,3,4,5), ball 15: {cert.summary()}, verify exit {code}", ok)
    assert ok


def norm_configs():
    return {
        "P3 Z,Z/4,Z w=(1,2,3)": path_graph([Z, C4, Z], [1, 2, 3]),
        "Z/4 * F2 w=(2,1)": edgeless_graph([C4, F2], [2, 1]),
        "K3 Z^2,Z/3,S3 w=(1,2,3)": complete_graph([Z2, C3, S3], [1, 2, 3]),
    }


def test_06_norm_oracle(criterion):
    total = agree = 0
    for name, g in norm_configs().items():
        brute = brute_norms(g, 5)
        ball = gp_ball(g, (), 5)
        by_label = {canonical_label(g, w): w for w in ball}
        assert set(by_label) == set(brute), name
        for label, (cost, _) in brute.items():
            total += 1
            agree += gp_norm(g, by_label[label]) == cost
    ok = total > 0 and agree == total
    criterion(6, f"norm oracle on 5-balls of 3 configurations: {agree}/{total} equal", ok)
    assert ok


def test_07_sfdc(criterion):
    lines, ok = [], True
    for n, scales in ((2, (2, 5)), (3, (2, 4, 8))):
        metric = LatticeMetric(n)
        tr = run_game(MetricFamily([Box.full(n)], metric), strategy_zn(n), scales)
        limit = 2 * n * (scales[-1] + 1)
        problems = verify_transcript(json.loads(json.dumps(transcript_to_json(tr))))
        good = tr.verified and tr.bounded and tr.bound <= limit and not problems
        ok &= good
        lines.append(f"Z^{n} {scales}: bound {tr.bound} <= {limit}: {good}")
    f = UniformlyExpansiveMap.projection([0])
    src = Box.full(2)
    ball = FiniteSpace(frozenset((x, y) for x in range(-8, 9) for y in range(-8, 9)), Box.full(2), (0, 1))
    for R in (2, 5):
        for source in (src, ball):
            image = f.image(source)
            dec = strategy_zn(1).decompose(image if isinstance(image, Box) else Box.full(1), f.rho(R),
                                           LatticeMetric(1))
            pulled = pullback_decomposition(f, dec, R, source, LatticeMetric(2), LatticeMetric(1))
            good = verify_decomposition(pulled, LatticeMetric(2)).ok
            ok &= good
        lines.append(f"pullback along projection at R={R}: {good}")
    criterion(7, "; ".join(lines), ok)
    assert ok


def test_08_property_a(criterion):
    metric = LatticeMetric(1)
    domain = [(x,) for x in range(-30, 31)]
    strict = verify_property_A(ball_family(domain, metric, 10, 1, Fraction(1, 4)), metric)
    wider = verify_property_A(ball_family(domain, metric, 10, 2, Fraction(1, 4)), metric)
    broken = ball_family(domain, metric, 10, 1, Fraction(1, 4))
    broken.sets[(3,)] = broken.sets[(3,)] - {((3,), 1)}
    rep = verify_property_A(broken, metric)
    ok = (strict.ok and wider.ok and wider.max_ratio == Fraction(1, 10)
          and not rep.conditions[1].ok and rep.conditions[1].witness == ((3,),))
    criterion(8, f"property A ball family: r=1 pass {strict.ok}, r=2 ratio {wider.max_ratio}; "
                 f"deleting (3,1) fails condition 1: {not rep.conditions[1].ok}", ok)
    assert ok


def random_element(spec, rng):
    while True:
        if spec.kind == "free_abelian":
            a = tuple(rng.randint(-3, 3) for _ in range(spec.rank))
        elif spec.kind == "cyclic":
            a = rng.randrange(spec.modulus)
        elif spec.kind == "free":
            a = spec.parse_element("".join(rng.choice("aAbB") for _ in range(rng.randint(1, 3))))
        else:
            a = rng.randrange(len(spec.labels))
        if a != spec.identity:
            return a


def soundness_graphs():
    C2 = VertexGroupSpec.cyclic(2)
    square = ProductGraph(["a", "b", "c", "d"], {"a": 1, "b": 2, "c": 3, "d": 4}, {x: C2 for x in "abcd"},
                          [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    out = dict(norm_configs())
    out["C4 square of Z/2"] = square
    return out


def test_09_normal_form_soundness(criterion):
    rng = random.Random(90210)
    total = agree = 0
    for name, g in soundness_graphs().items():
        for _ in range(1000):
            n = rng.randint(0, 6)
            w = tuple((v, random_element(g.groups[v], rng))
                      for v in (rng.choice(g.vertices) for _ in range(n)))
            nf = g.reduce(w)
            total += 1
            agree += minimal_words(g, w) == shuffle_class(g, nf)
    ok = agree == total
    criterion(9, f"normal forms of {total} random words match rewriting closure: {agree}/{total}", ok)
    assert ok


def _mutations(data):
    """Every single-element edit of a certificate: each set element dropped, replaced by a
    foreign word, replaced by an element of another set, or duplicated; plus each scalar."""
    sets = [(i, j) for i, f in enumerate(data["families"]) for j in range(len(f["sets"]))]
    for i, j in sets:
        S = data["families"][i]["sets"][j]
        for k, elem in enumerate(S):
            yield f"drop {elem}", lambda d, i=i, j=j, k=k: d["families"][i]["sets"][j].pop(k)
            yield f"foreign for {elem}", lambda d, i=i, j=j, k=k: d["families"][i]["sets"][j].__setitem__(k, "v3^40")
            yield f"duplicate {elem}", lambda d, i=i, j=j, k=k: d["families"][i]["sets"][j].append(
                d["families"][i]["sets"][j][k])
    for a, (i, j) in enumerate(sets):
        i2, j2 = sets[(a + 1) % len(sets)]
        yield (f"overwrite in set {i}/{j}",
               lambda d, i=i, j=j, i2=i2, j2=j2: d["families"][i]["sets"][j].__setitem__(
                   0, d["families"][i2]["sets"][j2][0]))
    for i in range(len(data["families"])):
        for key in ("verified_disjoint_gt", "mesh"):
            for delta in (-1, 1):
                yield f"{key}{delta:+d} in family {i}", \
                    lambda d, i=i, key=key, delta=delta: d["families"][i].__setitem__(key, d["families"][i][key] + delta)
        yield f"remove family {i}", lambda d, i=i: d["families"].pop(i)
    yield "scale +1", lambda d: d["scales"].__setitem__(0, d["scales"][0] + 1)
    yield "radius -1", lambda d: d["ambient"].__setitem__("radius", d["ambient"]["radius"] - 1)
    yield "radius +1", lambda d: d["ambient"].__setitem__("radius", d["ambient"]["radius"] + 1)
    yield "covering flag", lambda d: d.__setitem__("covers_ball", not d["covers_ball"])
    yield "verified flag", lambda d: d.__setitem__("verified", False)
    yield "n", lambda d: d["extra"].__setitem__("n", d["extra"]["n"] + 1)
    yield "permissible list", lambda d: d["extra"]["permissible_in_ball"].pop()
    yield "extra family", lambda d: d["families"].append(
        {"label": "extra", "sets": [], "verified_disjoint_gt": 4, "mesh": 0})


def test_10_tamper_detection(criterion, tmp_path, capsys):
    g = path_graph([Z, Z, Z], [1, 2, 5])
    cfg = tmp_path / "p3.json"
    cfg.write_text(json.dumps({"graph": g.to_config()}))
    good = tmp_path / "good.json"
    assert main(["asdim-witness", "--config", str(cfg), "--scale", "4", "--ball", "8", "--out", str(good)]) == 0
    assert main(["verify", str(good)]) == 0
    data = json.loads(good.read_text())
    bad = tmp_path / "bad.json"
    missed, total = [], 0
    for name, mutate in _mutations(data):
        d = copy.deepcopy(data)
        mutate(d)
        bad.write_text(json.dumps(d))
        total += 1
        if main(["verify", str(bad)]) != 5:
            missed.append(name)
    capsys.readouterr()
    ok = not missed and total > 0
    criterion(10, f"tamper detection: {total - len(missed)}/{total} single-element mutations exit 5", ok)
    assert ok, missed[:5]
