from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gpcoarse import VertexGroupSpec
from gpcoarse.covers.trees import YrTree
from gpcoarse.errors import BudgetExceeded
from gpcoarse.graphprod import ProductGraph, path_graph
from gpcoarse.metric import (ControlPair, PiecewiseLinear, WordMetric, gp_ball, gp_distance, gp_norm,
                             verify_coarse_map)

from oracles import brute_norms

Z = VertexGroupSpec.free_abelian(1)
C2 = VertexGroupSpec.cyclic(2)
C4 = VertexGroupSpec.cyclic(4)
EDGE = ProductGraph(["u", "v"], {"u": 1, "v": 5}, {"u": Z, "v": Z}, [("u", "v")])
P3 = path_graph([Z, C4, Z], [1, 2, 3])


def single(spec, weight):
    return ProductGraph(["v"], {"v": weight}, {"v": spec})


def test_norm_examples():
    assert gp_norm(EDGE, ()) == 0
    assert gp_norm(single(Z, 3), (("v", (5,)),)) == 15
    assert gp_norm(single(C2, 7), (("v", 1),)) == 7
    assert gp_norm(single(Z, 5), (("v", (2,)),)) == 10
    assert gp_norm(EDGE, (("u", (1,)), ("v", (1,)))) == 6


def test_ball_examples():
    g = single(Z, 1)
    assert gp_ball(g, (), 0) == {()}
    assert gp_ball(g, (), 3) == {()} | {(("v", (n,)),) for n in (-3, -2, -1, 1, 2, 3)}
    assert gp_ball(single(Z, 2), (), 5) == {()} | {(("v", (n,)),) for n in (-2, -1, 1, 2)}
    assert len(gp_ball(single(C4, 1), (), 10)) == 4


def test_free_product_ball_growth():
    # Z * Z with unit weights: |B_n| = 2 * 3^n - 1
    g = ProductGraph(["a", "b"], {"a": 1, "b": 1}, {"a": Z, "b": Z}, injective=False)
    m = WordMetric(g)
    assert [len(m.ball(radius=n)) for n in range(6)] == [2 * 3 ** n - 1 for n in range(6)]


def test_ball_matches_brute_force_norms():
    brute = brute_norms(P3, 5)
    m = WordMetric(P3)
    norms = m.ball_norms(5)
    assert sorted(norms.values()) == sorted(c for c, _ in brute.values())


def word_strategy(graph):
    def elem(spec):
        if spec.kind == "cyclic":
            return st.integers(1, spec.modulus - 1)
        return st.integers(-3, 3).filter(bool).map(lambda n: (n,))
    syl = st.sampled_from(graph.vertices).flatmap(lambda v: elem(graph.groups[v]).map(lambda a: (v, a)))
    return st.lists(syl, max_size=4).map(graph.reduce)


SEARCH = WordMetric(P3)


@settings(max_examples=60, deadline=None)
@given(word_strategy(P3))
def test_search_norm_equals_syllable_formula(w):
    # the search cost grows fast with the norm; the ball oracle covers radius <= 5
    assume(P3.syllable_norm(w) <= 9)
    assert SEARCH.search_norm(w) == SEARCH.norm(w)


@settings(max_examples=60, deadline=None)
@given(word_strategy(P3), word_strategy(P3), word_strategy(P3))
def test_metric_axioms(a, b, c):
    m = WordMetric(P3)
    assert m.distance(a, a) == 0
    assert m.distance(a, b) == m.distance(b, a)
    assert (m.distance(a, b) == 0) == (a == b)
    assert m.distance(a, c) <= m.distance(a, b) + m.distance(b, c)
    # left invariance
    assert m.distance(P3.multiply(c, a), P3.multiply(c, b)) == m.distance(a, b)
    if P3.syllable_norm(a) <= 8:
        assert gp_distance(P3, (), a) == gp_norm(P3, a) == m.norm(a)


def test_neighbours_are_the_translated_ball():
    m = WordMetric(P3)
    g = P3.reduce([("v1", (2,)), ("v3", (-1,))])
    near = set(m.neighbours(g, 3))
    # everything within 3 of g has norm <= |g| + 3 = 8
    assert near == {h for h in m.ball(radius=8) if m.distance(g, h) <= 3}
    assert near == m.ball(g, 3)


def test_budget_is_enforced():
    g = ProductGraph(["a", "b"], {"a": 1, "b": 2}, {"a": Z, "b": Z})
    with pytest.raises(BudgetExceeded):
        WordMetric(g, budget=50).ball(radius=10)


def test_piecewise_linear():
    f = PiecewiseLinear([(0, 0), (2, 4), (4, 5)])
    assert f(1) == 2 and f(3) == Fraction(9, 2) and f(6) == 6
    assert PiecewiseLinear.linear(Fraction(1, 3))(6) == 2
    assert not PiecewiseLinear([(0, 7)]).is_unbounded
    with pytest.raises(ValueError):
        PiecewiseLinear([(0, 3), (1, 2)])


def test_identity_map_passes():
    ident = PiecewiseLinear.linear(1)
    rep = verify_coarse_map([(d, d) for d in range(20)], ControlPair(ident, ident))
    assert rep.ok and rep.checked == 20


def test_constant_map_fails_properness():
    lower = PiecewiseLinear.linear(Fraction(1, 2))
    rep = verify_coarse_map([(x, y, abs(x - y), 0) for x in range(3) for y in range(3) if x != y],
                            ControlPair(lower=lower))
    assert not rep.ok
    assert rep.violations[0]["violated"] == "lower"


def test_tree_inclusion_control_functions():
    g = ProductGraph(["a", "b"], {"a": 1, "b": 1}, {"a": Z, "b": Z}, injective=False)
    tree = YrTree(g, 2, 2)
    m = WordMetric(g)
    verts = sorted(tree.vertices, key=tree.format)
    samples = [(x, y, m.distance(x, y), tree.distance(x, y)) for x in verts for y in verts]
    cp = ControlPair(PiecewiseLinear.linear(Fraction(1, 2)), PiecewiseLinear.linear(2))
    assert verify_coarse_map(samples, cp).ok
