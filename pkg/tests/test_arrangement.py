from itertools import combinations

import pytest

from quiverarr import corpus
from quiverarr.arrangement import (
    Arrangement, Hyperplane, build_graph, discriminantal, epsilon,
    format_arrangement, format_vertex_key, leq, parse_arrangement,
    parse_vertex_key, specialization_graph, truncated_graph,
    verify_graph_properties, wedge, _canonicalize,
)
from quiverarr.errors import ParseError, ShapeError, UnsupportedError
from quiverarr.linalg import Matrix


def brute_force_vertices(arr):
    """Oracle: intersect every subset of hyperplanes, dedup by canonical form."""
    seen = set()
    for r in range(arr.size + 1):
        for subset in combinations(range(1, arr.size + 1), r):
            rows = [arr.hyperplane(j).equation_row() for j in subset]
            mat = Matrix.from_rows(rows, cols=arr.ambient_dim + 1)
            canon = _canonicalize(mat, arr.ambient_dim)
            if canon is not None:
                seen.add(canon[0].entries)
    return seen


def test_three_lines_graph():
    g = build_graph(corpus.three_lines())
    assert len(g.vertices) == 5
    assert sorted(g.vertices) == [(), (1,), (1, 2, 3), (2,), (3,)]
    assert len(g.edges) == 6
    assert g.level[(1, 2, 3)] == 2


def test_empty_arrangement_graph():
    g = build_graph(Arrangement(4, []))
    assert g.vertices == ((),)
    assert not g.edges


def test_boolean2_graph_matches_oracle():
    g = build_graph(corpus.boolean2())
    assert len(g.vertices) == 4
    assert len(g.edges) == 4
    assert set(g.vertices) == {(), (1,), (2,), (1, 2)}


@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_graph_matches_brute_force_oracle(name):
    arr = corpus.CORPUS[name]()
    if arr.size > 5:
        pytest.skip("oracle reserved for small arrangements")
    g = build_graph(arr)
    oracle = brute_force_vertices(arr)
    built = {g.vertex(k).equations.entries for k in g.vertices}
    assert built == oracle


@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_graph_properties_hold(name):
    verify_graph_properties(build_graph(corpus.CORPUS[name]()))


def test_wedge_three_lines():
    g = build_graph(corpus.three_lines())
    assert wedge(g, (1,), (2,)).id == (1, 2, 3)
    assert wedge(g, (1,), (1,)).id == (1,)
    assert leq(g, (1, 2, 3), (1,))
    assert epsilon(g, (), (1,)) == 1
    assert epsilon(g, (1,), ()) == -1
    assert epsilon(g, (1,), (2,)) == 0


def test_wedge_parallel_lines_absent():
    g = build_graph(corpus.parallel_lines())
    assert wedge(g, (1,), (2,)) is None


def test_truncated_graph_levels():
    g = build_graph(corpus.three_lines())
    t0 = truncated_graph(g, 0)
    assert len(t0.vertices) == 1
    assert len(t0.loops) == 3
    t1 = truncated_graph(g, 1)
    assert len(t1.vertices) == 4
    assert len(t1.edges) == 3
    assert len(t1.loops) == 3
    t2 = truncated_graph(g, 2)
    assert len(t2.vertices) == len(g.vertices)
    assert not t2.loops
    with pytest.raises(ShapeError):
        truncated_graph(g, 3)


def test_truncation_of_any_graph_at_zero_has_loops_per_hyperplane():
    for name in ("single", "boolean3", "c13"):
        arr = corpus.CORPUS[name]()
        g = build_graph(arr)
        t = truncated_graph(g, 0)
        assert len(t.vertices) == 1
        assert len(t.loops) == arr.size


def test_specialization_single_hyperplane_identity():
    g = build_graph(corpus.single_hyperplane())
    sp = specialization_graph(g, (1,))
    assert len(sp.classes) == 2
    assert all(len(m) == 1 for m in sp.classes.values())
    assert len(sp.graph.edges) == 1


def test_specialization_at_top_is_identity():
    g = build_graph(corpus.three_lines())
    sp = specialization_graph(g, ())
    assert len(sp.classes) == len(g.vertices)
    assert len(sp.graph.edges) == len(g.edges)


def test_specialization_three_lines_merges_other_lines():
    g = build_graph(corpus.three_lines())
    sp = specialization_graph(g, (1,))
    members = sorted(tuple(sorted(m)) for m in sp.classes.values())
    assert members == [((),), ((1,),), ((1, 2, 3),), ((2,), (3,))]
    assert len(sp.graph.edges) == 4
    assert sp.graph.level[sp.class_of((2,))] == 1


def test_specialization_requires_central():
    g = build_graph(corpus.parallel_lines())
    with pytest.raises(UnsupportedError):
        specialization_graph(g, (1,))


def test_discriminantal_weights_2_matches_three_lines():
    arr, pi = discriminantal([2])
    assert arr.size == 3
    assert pi == {1: 1, 2: 1}
    g = build_graph(arr)
    h = build_graph(corpus.three_lines())
    assert sorted(map(len, (g.vertices, h.vertices))) == [5, 5]
    assert len(g.edges) == len(h.edges) == 6


def test_discriminantal_single_weight():
    arr, pi = discriminantal([1])
    assert arr.ambient_dim == 1
    assert arr.size == 1
    assert pi == {1: 1}


def test_discriminantal_split_weights():
    arr, pi = discriminantal([1, 1])
    arr2, _ = discriminantal([2])
    assert [h.equation_row() for h in arr.hyperplanes] == \
        [h.equation_row() for h in arr2.hyperplanes]
    assert pi == {1: 1, 2: 2}


def test_discriminantal_rejects_empty():
    with pytest.raises(ShapeError):
        discriminantal([])


def test_c14_vertex_count():
    # strata of C_{1,4} = partitions of a 5-element set
    g = build_graph(corpus.c14())
    assert len(g.vertices) == 52


def test_arr_round_trip():
    arr = corpus.generic_lines()
    text = format_arrangement(arr)
    back = parse_arrangement(text)
    assert back.ambient_dim == arr.ambient_dim
    assert [h.equation_row() for h in back.hyperplanes] == \
        [h.equation_row() for h in arr.hyperplanes]


def test_arr_parse_errors():
    with pytest.raises(ParseError):
        parse_arrangement("H 1 1\n")
    with pytest.raises(ParseError):
        parse_arrangement("dim 2\nH 1 1\n")
    with pytest.raises(ParseError):
        parse_arrangement("dim 2\nH 0 x y\n")
    with pytest.raises(ParseError):
        parse_arrangement("dim 1\nH 0 1\nH 0 2\n")  # duplicate after normalization


def test_vertex_key_format():
    assert format_vertex_key(()) == "()"
    assert format_vertex_key((1, 3)) == "(1,3)"
    assert parse_vertex_key("(1,3)") == (1, 3)
    assert parse_vertex_key("()") == ()
    assert parse_vertex_key("(2)") == (2,)
    with pytest.raises(ParseError):
        parse_vertex_key("1,3")


def test_hyperplane_normalization_detects_duplicates():
    with pytest.raises(ShapeError):
        Arrangement(2, [Hyperplane(0, [2, 0]), Hyperplane(0, [1, 0])])


def test_maximal_ids():
    g = build_graph(corpus.generic_lines())
    # double points of the generic arrangement list exactly two lines
    deep = [k for k in g.vertices if g.level[k] == 2]
    assert sorted(deep) == [(1, 2), (1, 3), (2, 3)]
