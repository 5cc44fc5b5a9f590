import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpcoarse import VertexGroupSpec
from gpcoarse.errors import BudgetExceeded, ConfigError, InvalidElement, ParseError
from gpcoarse.graphprod import (ProductGraph, complete_graph, edgeless_graph, graph_from_config,
                                path_graph)

from oracles import minimal_words, shuffle_class

Z = VertexGroupSpec.free_abelian(1)
C4 = VertexGroupSpec.cyclic(4)
F2 = VertexGroupSpec.free(2)

EDGE = ProductGraph(["u", "v"], {"u": 1, "v": 5}, {"u": Z, "v": Z}, [("u", "v")])
PAIR = ProductGraph(["u", "v"], {"u": 1, "v": 5}, {"u": Z, "v": Z}, [])
P4 = path_graph([Z, C4, Z, F2], [2, 1, 4, 3])
SQUARE = ProductGraph(["a", "b", "c", "d"], {"a": 1, "b": 2, "c": 3, "d": 4}, {x: C4 for x in "abcd"},
                      [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])


def element(spec):
    if spec.kind == "free_abelian":
        return st.integers(-3, 3).filter(bool).map(lambda n: (n,))
    if spec.kind == "cyclic":
        return st.integers(1, spec.modulus - 1)
    return st.text(alphabet="aAbB", min_size=1, max_size=2).map(spec.parse_element).filter(bool)


def words(graph, max_size=6):
    syl = st.sampled_from(graph.vertices).flatmap(
        lambda v: element(graph.groups[v]).map(lambda a: (v, a)))
    return st.lists(syl, max_size=max_size).map(tuple)


# ---- examples --------------------------------------------------------------

def test_commuting_syllables_cancel():
    assert EDGE.reduce([("u", (1,)), ("v", (2,)), ("u", (-1,))]) == (("v", (2,)),)


def test_nonadjacent_word_is_already_reduced():
    w = (("u", (1,)), ("v", (1,)), ("u", (1,)))
    assert PAIR.reduce(w) == w
    assert minimal_words(PAIR, w) == {w}


def test_empty_word():
    assert EDGE.reduce(()) == ()
    assert EDGE.format_word(()) == ""
    assert EDGE.parse_word("") == ()


def test_gamma_r():
    g = path_graph([Z, Z, Z], [1, 9, 5])
    assert g.gamma_r(0).vertices == ()
    assert set(g.gamma_r(10).vertices) == set(g.vertices)
    light = g.gamma_r(6)
    assert light.vertices == ("v1", "v3")
    assert not light.edges  # v1 and v3 are not adjacent in the path


def test_standard_form_examples():
    w = EDGE.reduce([("u", (1,)), ("v", (1,))])
    assert EDGE.standard_form(w, 2) == (("v", (1,)), ("u", (1,)))
    assert EDGE.decompose_xb(w, 2) == ((("v", (1,)),), (("u", (1,)),))
    w2 = PAIR.reduce([("u", (1,)), ("v", (1,))])
    assert PAIR.standard_form(w2, 2) == w2


def test_permissible_examples():
    assert EDGE.is_permissible((), 2)
    assert not EDGE.is_permissible((("u", (3,)),), 2)
    assert EDGE.is_permissible((("v", (3,)),), 2)
    light = (("u", (2,)),)
    assert EDGE.decompose_xb(light, 2) == ((), light)


def test_clique_numbers():
    assert edgeless_graph([Z] * 4, [1, 2, 3, 4]).clique_number() == 1
    assert complete_graph([Z] * 3, [1, 2, 3]).clique_number() == 3
    assert path_graph([Z] * 3, [1, 2, 3]).clique_number() == 2
    assert SQUARE.clique_number() == 2


def test_format_syntax():
    w = EDGE.reduce([("u", (5,)), ("v", (-1,))])
    assert EDGE.format_word(w) == "u^5*v^-1"
    assert EDGE.parse_word("u^5*v^-1") == w


# ---- properties --------------------------------------------------------------

@pytest.mark.parametrize("graph", [EDGE, PAIR, P4, SQUARE], ids=["edge", "pair", "P4", "square"])
def test_group_laws(graph):
    @settings(max_examples=80, deadline=None)
    @given(words(graph), words(graph), words(graph))
    def check(a, b, c):
        ra, rb, rc = graph.reduce(a), graph.reduce(b), graph.reduce(c)
        assert graph.reduce(ra) == ra
        assert graph.multiply(graph.multiply(a, b), c) == graph.multiply(a, graph.multiply(b, c))
        assert graph.multiply(a, graph.invert(a)) == ()
        assert graph.multiply((), a) == ra
        assert graph.syllable_norm(graph.invert(a)) == graph.syllable_norm(ra)
    check()


@pytest.mark.parametrize("graph", [EDGE, PAIR, P4, SQUARE], ids=["edge", "pair", "P4", "square"])
def test_normal_form_matches_rewriting(graph):
    @settings(max_examples=80, deadline=None)
    @given(words(graph))
    def check(w):
        nf = graph.reduce(w)
        cls = shuffle_class(graph, nf)
        assert minimal_words(graph, w) == cls
        # every shuffle of the normal form reduces back to it
        assert all(graph.reduce(s) == nf for s in cls)
    check()


@pytest.mark.parametrize("graph", [EDGE, P4, SQUARE], ids=["edge", "P4", "square"])
def test_standard_form_pushes_light_syllables_right(graph):
    @settings(max_examples=80, deadline=None)
    @given(words(graph), st.sampled_from([1, 2, 3, 4]))
    def check(w, r):
        nf = graph.reduce(w)
        sf = graph.standard_form(nf, r)
        cls = shuffle_class(graph, nf)
        assert sf in cls
        light = graph.light_vertices(r)

        def last_heavy(word):
            return max((i for i, (v, _) in enumerate(word) if v not in light), default=-1)
        assert last_heavy(sf) == min(last_heavy(s) for s in cls)
        x, b = graph.decompose_xb(nf, r)
        assert graph.multiply(x, b) == nf
        assert all(v in light for v, _ in b)
        assert not any(s and s[-1][0] in light for s in shuffle_class(graph, x))
    check()


@pytest.mark.parametrize("graph", [EDGE, PAIR, P4, SQUARE], ids=["edge", "pair", "P4", "square"])
def test_format_parse_round_trip(graph):
    @settings(max_examples=60, deadline=None)
    @given(words(graph))
    def check(w):
        nf = graph.reduce(w)
        assert graph.reduce(graph.parse_word(graph.format_word(nf))) == nf
    check()


def test_quotient_norm_matches_inverse_product():
    @settings(max_examples=100, deadline=None)
    @given(words(P4), words(P4))
    def check(a, b):
        g, h = P4.reduce(a), P4.reduce(b)
        assert P4.quotient_norm(g, h) == P4.syllable_norm(P4.multiply(P4.invert(g), h))
    check()


# ---- configuration and errors ----------------------------------------------

def test_config_round_trip():
    for g in (EDGE, P4, SQUARE):
        again = graph_from_config(g.to_config())
        assert again.to_config() == g.to_config()
        assert again.reduce(again.parse_word("")) == ()


def test_weights_must_be_injective_unless_allowed():
    with pytest.raises(ConfigError):
        ProductGraph(["a", "b"], {"a": 1, "b": 1}, {"a": Z, "b": Z})
    g = ProductGraph(["a", "b"], {"a": 1, "b": 1}, {"a": Z, "b": Z}, injective=False)
    assert g.reduce([("b", (1,)), ("a", (1,))]) == (("b", (1,)), ("a", (1,)))


@pytest.mark.parametrize("kwargs", [
    dict(vertices=["a", "a"]),
    dict(edges=[("a", "a")]),
    dict(edges=[("a", "z")]),
    dict(weights={"a": 0, "b": 2}),
])
def test_bad_graphs(kwargs):
    base = dict(vertices=["a", "b"], weights={"a": 1, "b": 2}, groups={"a": Z, "b": Z}, edges=[])
    base.update(kwargs)
    with pytest.raises(ConfigError):
        ProductGraph(base["vertices"], base["weights"], base["groups"], base["edges"])


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as exc:
        EDGE.parse_word("u^1*w^2")
    assert exc.value.position == 4
    with pytest.raises(ParseError):
        EDGE.parse_word("u^x")
    with pytest.raises(InvalidElement):
        EDGE.reduce([("u", 3)])


def test_word_cap():
    g = ProductGraph(["a", "b"], {"a": 1, "b": 2}, {"a": Z, "b": Z}, word_cap=4)
    w = [("a", (1,)), ("b", (1,))] * 3
    with pytest.raises(BudgetExceeded):
        g.reduce(w)
    assert len(g.reduce(w[:4])) == 4


def test_all_short_words_agree_with_brute_force():
    # exhaustive over all words of <= 4 unit syllables on the square
    syls = [(v, a) for v in "abcd" for a in (1, 3)]
    for n in range(5):
        for w in itertools.product(syls, repeat=n):
            assert minimal_words(SQUARE, w) == shuffle_class(SQUARE, SQUARE.reduce(w))
