import random
from fractions import Fraction

import pytest

from quiverarr import corpus
from quiverarr.arrangement import TruncatedGraph, build_graph, truncated_graph
from quiverarr.errors import (InvalidQuiverError, MissingLoopError, ShapeError)
from quiverarr.linalg import Matrix, betti, char_poly
from quiverarr.quiver import (
    LevelQuiver, Quiver, QuiverMorphism, Spectrum, c_minus, c_plus,
    check_nonresonance_class, check_quiver, dual, dual_level, global_S,
    hom_space, is_nonresonant_spectrum, level_zero_quiver, local_ops,
    morphism_from_coords, parse_quiver, quiver_to_json, sign_conjugate,
    spectrum_lambda,
)

import json


def graph(name):
    return build_graph(corpus.CORPUS[name]())


def M(rows):
    return Matrix.from_rows(rows)


def one_hyperplane_quiver(a, b, dim=1):
    """V_empty = V_alpha = Q^dim with scalar up/down maps."""
    g = graph("single")
    return Quiver(g, {(): dim, (1,): dim},
                  {((1,), ()): Matrix.identity(dim).scale(a),
                   ((), (1,)): Matrix.identity(dim).scale(b)})


def scalar_level0(g, values, dim=1, seed=None):
    """Level-zero quiver with loop operators a_j * M for one common M."""
    if seed is None:
        m = Matrix.identity(dim)
    else:
        rng = random.Random(seed)
        m = Matrix(dim, dim, [Fraction(rng.randint(-3, 3)) for _ in range(dim * dim)])
    ops = {j: m.scale(v) for j, v in values.items()}
    return level_zero_quiver(g, dim, ops)


def test_zero_quiver_passes():
    g = graph("three_lines")
    v = Quiver(g, {k: 1 for k in g.vertices}, {})
    assert check_quiver(v) == []


def test_three_lines_valid_quiver_passes():
    # down maps only, zero into the deep vertex: relations hold
    g = graph("three_lines")
    spaces = {(): 1, (1,): 1, (2,): 1, (3,): 1, (1, 2, 3): 0}
    maps = {((i,), ()): M([[i]]) for i in (1, 2, 3)}
    assert check_quiver(Quiver(g, spaces, maps)) == []


def test_three_lines_all_ones_violates_b():
    g = graph("three_lines")
    spaces = {k: 1 for k in g.vertices}
    maps = {}
    for i in (1, 2, 3):
        maps[((i,), ())] = M([[1]])
        maps[((), (i,))] = M([[1]])
        maps[((1, 2, 3), (i,))] = M([[1]])
        maps[((i,), (1, 2, 3))] = M([[1]])
    bad = check_quiver(Quiver(g, spaces, maps))
    assert ("(b)", ((1, 2, 3), ())) in bad


def test_map_on_non_adjacent_pair_rejected():
    g = graph("three_lines")
    with pytest.raises(ShapeError):
        Quiver(g, {k: 1 for k in g.vertices}, {((1, 2, 3), ()): M([[1]])})


def test_level_zero_relations():
    g = graph("three_lines")
    rng = random.Random(5)
    m = Matrix(2, 2, [Fraction(rng.randint(-3, 3)) for _ in range(4)])
    v = level_zero_quiver(g, 2, {1: m.scale(2), 2: m.scale(3), 3: m})
    assert check_quiver(v) == []
    # non-commuting loops violate relation (v)
    n1 = M([[0, 1], [0, 0]])
    n2 = M([[0, 0], [1, 0]])
    w = level_zero_quiver(g, 2, {1: n1, 2: n2, 3: Matrix.zero(2, 2)})
    assert any(name == "(v)" for name, _ in check_quiver(w))


def test_loop_on_missing_edge_rejected():
    g = graph("three_lines")
    t = truncated_graph(g, 1)
    with pytest.raises(MissingLoopError):
        LevelQuiver(t, {k: 1 for k in t.vertices}, {}, {((), (1,)): M([[1]])})


def test_dual_level_zero_is_transpose():
    g = graph("single")
    m = M([[1, 2], [3, 4]])
    v = level_zero_quiver(g, 2, {1: m})
    w = dual_level(v)
    assert w.loop((), (1,)) == -m.transpose()
    # tau^2 then sign conjugation recovers the original
    assert sign_conjugate(dual_level(dual_level(v))) == v


def test_dual_one_hyperplane_epsilon_table():
    a, b = Fraction(2), Fraction(5)
    v = one_hyperplane_quiver(a, b)
    w = dual(v)
    assert w.map((1,), ()) == M([[b]])
    assert w.map((), (1,)) == M([[-a]])


def test_dual_zero_quiver():
    g = graph("three_lines")
    v = Quiver(g, {k: 1 for k in g.vertices}, {})
    assert dual(v).maps == {}


def test_tau_squared_sign_conjugation():
    rng = random.Random(1)
    g = graph("three_lines")
    spaces = {(): 1, (1,): 1, (2,): 1, (3,): 1, (1, 2, 3): 0}
    maps = {((i,), ()): M([[rng.randint(1, 5)]]) for i in (1, 2, 3)}
    v = Quiver(g, spaces, maps)
    vv = dual(dual(v))
    for (a, b), m in v.maps.items():
        assert vv.map(a, b) == -m
    assert sign_conjugate(vv) == v


def test_c_plus_single_hyperplane_shape():
    a = Fraction(3, 100)
    v = one_hyperplane_quiver(a, Fraction(0))
    c = c_plus(v)
    assert c.dims == (1, 1)
    assert c.differentials[0] == M([[a]])


def test_c_plus_zero_maps():
    g = graph("three_lines")
    v = Quiver(g, {k: 2 for k in g.vertices}, {})
    c = c_plus(v)
    assert all(d.is_zero() for d in c.differentials)
    assert c.dims == (2, 6, 2)


def test_c_plus_three_lines_blocks():
    g = graph("three_lines")
    spaces = {(): 1, (1,): 1, (2,): 1, (3,): 1, (1, 2, 3): 0}
    maps = {((i,), ()): M([[10 + i]]) for i in (1, 2, 3)}
    v = Quiver(g, spaces, maps)
    c = c_plus(v)
    assert c.dims == (1, 3, 0)
    assert c.differentials[0].col(0) == (11, 12, 13)
    cm = c_minus(v)
    assert cm.min_degree == -2
    assert cm.dims == (0, 3, 1)


def test_c_plus_rejects_invalid():
    g = graph("three_lines")
    spaces = {k: 1 for k in g.vertices}
    maps = {}
    for i in (1, 2, 3):
        maps[((i,), ())] = M([[1]])
        maps[((1, 2, 3), (i,))] = M([[1]])
    with pytest.raises(InvalidQuiverError):
        c_plus(Quiver(g, spaces, maps))


def test_local_ops_one_hyperplane():
    a, b = Fraction(2), Fraction(7)
    v = one_hyperplane_quiver(a, b)
    ops_alpha = local_ops(v, (1,))
    assert ops_alpha.S == M([[a * b]])
    assert ops_alpha.T == M([[a * b]])
    assert ops_alpha.Tbar == Matrix.zero(1, 1)
    ops_top = local_ops(v, ())
    assert ops_top.S == Matrix.zero(1, 1)
    assert ops_top.Stilde == M([[a * b]])


def test_local_ops_zero_quiver():
    g = graph("three_lines")
    v = Quiver(g, {k: 1 for k in g.vertices}, {})
    for k in g.vertices:
        ops = local_ops(v, k)
        assert ops.S.is_zero() and ops.T.is_zero()
        assert ops.Tbar.is_zero() and ops.Stilde.is_zero()


def test_global_S_block_structure():
    v = one_hyperplane_quiver(Fraction(2), Fraction(3))
    s = global_S(v)
    assert s == M([[6, 0], [0, 6]])


def test_s_commutes_with_local_algebra():
    # S_beta is central: commutes with every A_beta^alpha
    rng = random.Random(9)
    g = graph("three_lines")
    m = Matrix(2, 2, [Fraction(rng.randint(-2, 2)) for _ in range(4)])
    v = scalar_level0(g, {1: Fraction(1), 2: Fraction(2), 3: Fraction(3)}, dim=2, seed=9)
    for k in v.graph.vertices:
        ops = local_ops(v, k)
        for a in v.graph.up(k):
            comp = v.map(k, a) * v.map(a, k)
            assert ops.S * comp == comp * ops.S


def test_spectrum_lambda_and_nonresonance():
    g = graph("three_lines")
    s = Spectrum({1: Fraction(1, 100), 2: Fraction(1, 100), 3: Fraction(2, 100)})
    assert spectrum_lambda(g, s, (1, 2, 3)) == Fraction(4, 100)
    assert spectrum_lambda(g, s, ()) == 0
    assert is_nonresonant_spectrum(g, s)
    zero = Spectrum({1: 0, 2: 0, 3: 0})
    assert is_nonresonant_spectrum(g, zero)
    g1 = graph("single")
    assert not is_nonresonant_spectrum(g1, Spectrum({1: 1}))


def test_nonresonance_report_zero_quiver():
    g = graph("three_lines")
    v = Quiver(g, {k: 2 for k in g.vertices}, {})
    rep = check_nonresonance_class(v)
    assert all(not r["tbar_has_positive_integer_eigenvalue"] for r in rep)
    assert all(r["t_nonresonant"] == "verified" for r in rep)


def test_nonresonance_report_flags_integer_monodromy():
    v = one_hyperplane_quiver(Fraction(1), Fraction(2))  # T at the deep vertex = 2
    rep = check_nonresonance_class(v)
    entry = {r["vertex"]: r for r in rep}[(1,)]
    assert entry["t_nonresonant"] == "violated"


def test_hom_space_identity_and_scalars():
    g = graph("single")
    v = level_zero_quiver(g, 1, {1: M([[Fraction(1, 2)]])})
    w = level_zero_quiver(g, 1, {1: M([[Fraction(1, 3)]])})
    assert hom_space(v, v).dim >= 1
    assert hom_space(v, w).dim == 0
    u = level_zero_quiver(g, 1, {1: M([[Fraction(1, 2)]])})
    assert hom_space(v, u).dim == 1


def test_hom_space_yields_valid_morphisms():
    g = graph("single")
    v = one_hyperplane_quiver(Fraction(2), Fraction(3))
    basis = hom_space(v, v)
    for i in range(basis.dim):
        morphism_from_coords(v, v, basis.basis.row(i))  # constructor validates


def test_morphism_validation():
    v = one_hyperplane_quiver(Fraction(2), Fraction(3))
    w = one_hyperplane_quiver(Fraction(2), Fraction(3))
    QuiverMorphism(v, w, {(): Matrix.identity(1), (1,): Matrix.identity(1)})
    with pytest.raises(InvalidQuiverError):
        QuiverMorphism(v, w, {(): Matrix.identity(1), (1,): M([[2]])})


def test_qvr_round_trip():
    g = graph("three_lines")
    v = scalar_level0(g, {1: Fraction(1, 2), 2: Fraction(3), 3: Fraction(-1, 7)})
    blob = json.dumps(quiver_to_json(v), sort_keys=True)
    w = parse_quiver(blob, g)
    assert w == v
    assert w.level == 0


def test_qvr_round_trip_full_quiver():
    v = one_hyperplane_quiver(Fraction(2), Fraction(-5, 3))
    blob = json.dumps(quiver_to_json(v), sort_keys=True)
    w = parse_quiver(blob, v.graph)
    assert w == v
    assert w.level is None


def test_char_poly_of_global_s_spectrum_case():
    g = graph("single")
    v = one_hyperplane_quiver(Fraction(1, 3), Fraction(1, 5))
    s = global_S(v)
    p = char_poly(s)
    lam = Fraction(1, 15)
    assert p == (lam * lam, -2 * lam, 1)
