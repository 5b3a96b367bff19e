import random
from fractions import Fraction

import pytest

from quiverarr.errors import InvalidComplexError, ShapeError
from quiverarr.linalg import (
    ChainComplex, ChainMap, Matrix, betti, char_poly, image_basis,
    image_complex, integer_roots, kernel_basis, poly_eval, poly_format,
    poly_mul, rank, rref, solve, solve_matrix,
)


def M(rows):
    return Matrix.from_rows(rows)


def rand_matrix(rng, rows, cols, lo=-4, hi=4):
    return Matrix(rows, cols, [Fraction(rng.randint(lo, hi)) for _ in range(rows * cols)])


def rand_invertible(rng, n):
    while True:
        p = rand_matrix(rng, n, n)
        if rank(p) == n:
            return p


def invert(m):
    x = solve_matrix(m, Matrix.identity(m.rows))
    assert x is not None
    return x


def test_rref_identity():
    r, piv = rref(Matrix.identity(2))
    assert r == Matrix.identity(2)
    assert piv == (0, 1)


def test_rref_rank_one():
    r, piv = rref(M([[2, 4], [1, 2]]))
    assert r == M([[1, 2], [0, 0]])
    assert piv == (0,)


def test_rref_zero():
    r, piv = rref(Matrix.zero(3, 2))
    assert r == Matrix.zero(3, 2)
    assert piv == ()


def test_kernel_of_identity_is_zero():
    assert kernel_basis(Matrix.identity(3)).dim == 0


def test_kernel_of_sum_functional():
    k = kernel_basis(M([[1, 1]]))
    assert k.dim == 1
    v = k.basis.row(0)
    assert v[0] + v[1] == 0 and v != (0, 0)


def test_solve_underdetermined():
    x = solve(M([[1, 0]]), (Fraction(3),))
    assert x is not None and x[0] == 3


def test_solve_inconsistent():
    assert solve(M([[1, 1], [1, 1]]), (0, 1)) is None


def test_rank_nullity_random():
    rng = random.Random(7)
    for _ in range(25):
        rows = rng.randint(0, 5)
        cols = rng.randint(0, 5)
        m = rand_matrix(rng, rows, cols)
        assert kernel_basis(m).dim + rank(m) == cols
        assert image_basis(m).dim == rank(m)


def test_matrix_shape_errors():
    with pytest.raises(ShapeError):
        M([[1, 2]]) * M([[1, 2]])
    with pytest.raises(ShapeError):
        char_poly(M([[1, 2]]))


def test_char_poly_basics():
    assert char_poly(Matrix.zero(3, 3)) == (0, 0, 0, 1)
    assert integer_roots(char_poly(Matrix.zero(3, 3))) == {0}
    assert char_poly(M([[2, 0], [0, 2]])) == (4, -4, 1)
    assert integer_roots((4, -4, 1)) == {2}
    assert char_poly(M([[0, 1], [0, 0]])) == (0, 0, 1)
    assert char_poly(Matrix.zero(0, 0)) == (1,)


def test_char_poly_conjugation_invariant():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n, n)
        p = rand_invertible(rng, n)
        assert char_poly(p * m * invert(p)) == char_poly(m)


def test_char_poly_known_factorization():
    # companion-style matrix of (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
    m = M([[1, 5, 0], [0, 2, 7], [0, 0, 3]])
    assert char_poly(m) == (-6, 11, -6, 1)
    assert integer_roots(char_poly(m)) == {1, 2, 3}


def test_integer_roots_rational_coefficients():
    # (x - 2)(x + 1/2) has the single integer root 2
    p = poly_mul((-2, 1), (Fraction(1, 2), 1))
    assert integer_roots(p) == {2}
    assert poly_eval(p, 2) == 0


def test_poly_format():
    assert poly_format((1, Fraction(-3, 2), 1)) == "x^2 - 3/2*x + 1"


def test_betti_rank_nullity():
    c = ChainComplex(0, (1, 1), (M([[Fraction(1, 2)]]),))
    assert betti(c) == (0, 0)
    c = ChainComplex(0, (1, 1), (Matrix.zero(1, 1),))
    assert betti(c) == (1, 1)
    c = ChainComplex(0, (1, 3, 2), (Matrix.zero(3, 1), Matrix.zero(2, 3)))
    assert betti(c) == (1, 3, 2)


def test_invalid_complex_rejected():
    with pytest.raises(InvalidComplexError):
        ChainComplex(0, (1, 1, 1), (M([[1]]), M([[1]])))


def test_betti_basis_change_invariant():
    rng = random.Random(3)
    d0 = M([[1, 0], [0, 0], [0, 0]])
    d1 = M([[0, 0, 1]])
    c = ChainComplex(0, (2, 3, 1), (d0, d1))
    b = betti(c)
    for _ in range(5):
        p0 = rand_invertible(rng, 2)
        p1 = rand_invertible(rng, 3)
        p2 = rand_invertible(rng, 1)
        cc = ChainComplex(0, (2, 3, 1), (p1 * d0 * invert(p0), p2 * d1 * invert(p1)))
        assert betti(cc) == b


def test_euler_characteristic_matches_betti():
    c = ChainComplex(-1, (2, 3, 1), (M([[1, 0], [0, 0], [0, 0]]), M([[0, 0, 1]])))
    b = betti(c)
    assert sum((-1) ** (d) * b[d - c.min_degree] for d in c.degrees) == c.euler_characteristic()


def test_image_complex():
    source = ChainComplex(0, (1, 2), (M([[1], [1]]),))
    target = ChainComplex(0, (2, 2), (M([[1, 0], [1, 0]]),))
    f = ChainMap(source, target, (M([[1], [0]]), Matrix.identity(2)))
    img = image_complex(f)
    assert img.dims == (1, 2)
    assert (img.differentials[0]).col(0) == (1, 1)
