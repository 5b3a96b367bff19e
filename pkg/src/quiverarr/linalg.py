"""Exact rational linear algebra.

Everything in the package reduces to the operations here: dense matrices
over `fractions.Fraction`, Gaussian elimination, kernels and images,
characteristic polynomials, and Betti numbers of finite complexes.  No
floating point anywhere.

Matrices are immutable values; operations return new matrices.  A vector
is a tuple of Fractions.  A polynomial is a tuple of Fractions, lowest
degree first.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import count

from .errors import InvalidComplexError, ShapeError

Q0 = Fraction(0)
Q1 = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/100', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class Matrix:
    """Dense row-major matrix over Q."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = tuple(x if type(x) is Fraction else Fraction(x) for x in entries)
        if len(entries) != rows * cols:
            raise ShapeError(f"expected {rows}x{cols}={rows*cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @staticmethod
    def _raw(rows, cols, entries):
        """Internal constructor for entries already known to be Fractions."""
        m = Matrix.__new__(Matrix)
        m.rows = rows
        m.cols = cols
        m.entries = entries
        return m

    @staticmethod
    def from_rows(rows_of_entries, cols=None):
        rows = list(rows_of_entries)
        if not rows:
            if cols is None:
                cols = 0
            return Matrix(0, cols, ())
        cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ShapeError("ragged rows")
        return Matrix(len(rows), cols, [x for r in rows for x in r])

    @staticmethod
    def identity(n):
        return Matrix(n, n, [Q1 if i == j else Q0 for i in range(n) for j in range(n)])

    @staticmethod
    def zero(rows, cols):
        return Matrix(rows, cols, [Q0] * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self):
        return Matrix._raw(self.cols, self.rows,
                           tuple(self.entries[i * self.cols + j]
                                 for j in range(self.cols) for i in range(self.rows)))

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("matrix addition shape mismatch")
        return Matrix._raw(self.rows, self.cols,
                           tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("matrix subtraction shape mismatch")
        return Matrix._raw(self.rows, self.cols,
                           tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return Matrix._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c):
        c = frac(c)
        return Matrix._raw(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            n, m, p = self.rows, self.cols, other.cols
            a, b = self.entries, other.entries
            out = [Q0] * (n * p)
            for i in range(n):
                arow = a[i * m:(i + 1) * m]
                base = i * p
                for k, aik in enumerate(arow):
                    if aik:
                        brow = b[k * p:(k + 1) * p]
                        for j in range(p):
                            if brow[j]:
                                out[base + j] += aik * brow[j]
            return Matrix._raw(n, p, tuple(out))
        return self.scale(other)

    __rmul__ = scale

    def apply(self, vec):
        """Matrix times column vector (tuple)."""
        if len(vec) != self.cols:
            raise ShapeError("vector length mismatch")
        return tuple(sum((self[i, j] * vec[j] for j in range(self.cols)), Q0)
                     for i in range(self.rows))

    def is_zero(self):
        return all(x == 0 for x in self.entries)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ShapeError("hstack row mismatch")
        rows = [list(self.row(i)) + list(other.row(i)) for i in range(self.rows)]
        return Matrix.from_rows(rows, cols=self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols:
            raise ShapeError("vstack column mismatch")
        return Matrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, row_idx, col_idx):
        return Matrix.from_rows([[self[i, j] for j in col_idx] for i in row_idx],
                                cols=len(col_idx))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.row_list()!r})"


def block_diag(blocks):
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    m = [[Q0] * cols for _ in range(rows)]
    r = c = 0
    for b in blocks:
        for i in range(b.rows):
            row = b.row(i)
            for j in range(b.cols):
                m[r + i][c + j] = row[j]
        r += b.rows
        c += b.cols
    return Matrix.from_rows(m, cols=cols)


def rref(m: Matrix):
    """Reduced row-echelon form.  Returns (rref_matrix, pivot_columns).

    Rows at or below the working row are zero left of the working column,
    as is the pivot row itself, so eliminations only touch the tail."""
    rows = m.row_list()
    nrows, ncols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        prow = rows[r]
        inv = Q1 / prow[c]
        if inv != 1:
            for k in range(c, ncols):
                if prow[k]:
                    prow[k] *= inv
        tail = prow[c:]
        for i in range(nrows):
            row = rows[i]
            if i != r and row[c] != 0:
                f = row[c]
                row[c:] = [x - f * y for x, y in zip(row[c:], tail)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return Matrix.from_rows(rows, cols=ncols), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


class Subspace:
    """A subspace of Q^n, stored as independent basis rows in RREF."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim, basis: Matrix):
        if basis.cols != ambient_dim:
            raise ShapeError("basis width differs from ambient dimension")
        r, piv = rref(basis)
        self.ambient_dim = ambient_dim
        self.basis = r.submatrix(range(len(piv)), range(ambient_dim))

    @property
    def dim(self):
        return self.basis.rows

    def contains(self, vec) -> bool:
        return in_row_space(self.basis, vec)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"


def in_row_space(m: Matrix, vec) -> bool:
    stacked = m.vstack(Matrix(1, m.cols, vec))
    return rank(stacked) == rank(m)


def kernel_basis(m: Matrix) -> Subspace:
    """Basis of {x : m x = 0}, one row per free column of the RREF."""
    r, pivots = rref(m)
    pivset = set(pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    rows = []
    for fc in free:
        v = [Q0] * m.cols
        v[fc] = Q1
        for i, pc in enumerate(pivots):
            v[pc] = -r[i, fc]
        rows.append(v)
    return Subspace(m.cols, Matrix.from_rows(rows, cols=m.cols))


def image_basis(m: Matrix) -> Subspace:
    """Column space of m, as a subspace of Q^rows."""
    return Subspace(m.rows, m.transpose())


def row_space(m: Matrix) -> Subspace:
    return Subspace(m.cols, m)


def solve(m: Matrix, rhs):
    """One solution x of m x = rhs, or None if inconsistent."""
    if len(rhs) != m.rows:
        raise ShapeError("rhs length differs from row count")
    aug = m.hstack(Matrix(m.rows, 1, rhs))
    r, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [Q0] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = r[i, m.cols]
    return tuple(x)


def solve_matrix(m: Matrix, rhs: Matrix):
    """One solution X of m X = rhs, or None if any column is inconsistent;
    a single elimination of the block-augmented matrix solves all columns."""
    if rhs.rows != m.rows:
        raise ShapeError("rhs row count mismatch")
    r, pivots = rref(m.hstack(rhs))
    if any(p >= m.cols for p in pivots):
        return None
    out = [[Q0] * rhs.cols for _ in range(m.cols)]
    for i, p in enumerate(pivots):
        row = r.row(i)
        for j in range(rhs.cols):
            out[p][j] = row[m.cols + j]
    return Matrix.from_rows(out, cols=rhs.cols)


# -- polynomials (tuple of Fractions, lowest degree first) --------------------

def poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_mul(p, q):
    out = [Q0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return poly_trim(out)


def poly_sub(p, q):
    n = max(len(p), len(q))
    p = list(p) + [Q0] * (n - len(p))
    q = list(q) + [Q0] * (n - len(q))
    return poly_trim([a - b for a, b in zip(p, q)])


def poly_eval(p, x):
    x = frac(x)
    acc = Q0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_degree(p):
    p = poly_trim(p)
    return len(p) - 1 if any(c != 0 for c in p) else -1


def poly_format(p):
    """Human-readable form, e.g. 'x^2 - 3/2*x + 1'."""
    p = poly_trim(p)
    if poly_degree(p) <= 0:
        return str(p[0])
    parts = []
    for d in range(len(p) - 1, -1, -1):
        c = p[d]
        if c == 0:
            continue
        if d == 0:
            term = str(abs(c))
        else:
            xs = "x" if d == 1 else f"x^{d}"
            term = xs if abs(c) == 1 else f"{abs(c)}*{xs}"
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts)


def _strongly_connected_components(n, succ):
    """Tarjan; returns components in reverse topological order."""
    index = count()
    idx = [None] * n
    low = [0] * n
    on = [False] * n
    stack = []
    comps = []

    def visit(v0):
        work = [(v0, iter(succ[v0]))]
        idx[v0] = low[v0] = next(index)
        stack.append(v0)
        on[v0] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if idx[w] is None:
                    idx[w] = low[w] = next(index)
                    stack.append(w)
                    on[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                elif on[w]:
                    low[v] = min(low[v], idx[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == idx[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)

    for v in range(n):
        if idx[v] is None:
            visit(v)
    return comps


def _char_poly_dense(m: Matrix):
    """Characteristic polynomial via exact Hessenberg reduction."""
    n = m.rows
    if n == 0:
        return (Q1,)
    h = m.row_list()
    # similarity transform to upper Hessenberg form
    for c in range(n - 2):
        pr = None
        for i in range(c + 1, n):
            if h[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != c + 1:
            h[c + 1], h[pr] = h[pr], h[c + 1]
            for i in range(n):
                h[i][c + 1], h[i][pr] = h[i][pr], h[i][c + 1]
        piv = h[c + 1][c]
        for i in range(c + 2, n):
            if h[i][c] != 0:
                f = h[i][c] / piv
                h[i] = [x - f * y for x, y in zip(h[i], h[c + 1])]
                for k in range(n):
                    h[k][c + 1] += f * h[k][i]
    # p_k = char poly of the leading k x k block of the Hessenberg matrix
    polys = [(Q1,)]
    for k in range(1, n + 1):
        p = poly_mul(polys[k - 1], (-h[k - 1][k - 1], Q1))
        coef = Q1
        for i in range(k - 1, 0, -1):
            coef *= h[i][i - 1]
            if coef == 0:
                break
            term = coef * h[i - 1][k - 1]
            if term:
                p = poly_sub(p, tuple(term * c for c in polys[i - 1]))
        polys.append(p)
    return poly_trim(polys[n])


def _linear_factor_power(value, m):
    """(x - value)^m by the binomial theorem."""
    out = [Q0] * (m + 1)
    c = 1
    power = Q1
    for k in range(m, -1, -1):
        # coefficient of x^k is C(m, k) (-value)^(m-k)
        out[k] = Fraction(c) * power
        c = c * k // (m - k + 1) if k else c
        power *= -value
    return poly_trim(out)


def char_poly(m: Matrix):
    """Monic characteristic polynomial det(xI - m), exact over Q.

    The nonzero pattern is condensed into strongly connected components
    first; char polys of the diagonal blocks multiply, with repeated 1x1
    blocks grouped into binomial powers."""
    if m.rows != m.cols:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    n = m.rows
    if n == 0:
        return (Q1,)
    succ = [[j for j in range(n) if j != i and m[i, j] != 0] for i in range(n)]
    comps = _strongly_connected_components(n, succ)
    scalar_counts = {}
    p = (Q1,)
    for comp in comps:
        if len(comp) == 1:
            v = m[comp[0], comp[0]]
            scalar_counts[v] = scalar_counts.get(v, 0) + 1
            continue
        block = m.submatrix(comp, comp)
        p = poly_mul(p, _char_poly_dense(block))
    for v, count in sorted(scalar_counts.items()):
        p = poly_mul(p, _linear_factor_power(v, count))
    return p


def _divisors(n):
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return out


def integer_roots(p):
    """The set of integer roots of p, exact (rational root theorem)."""
    p = poly_trim(p)
    if all(c == 0 for c in p):
        raise ShapeError("integer_roots of the zero polynomial")
    roots = set()
    coeffs = list(p)
    low = 0
    while coeffs[low] == 0:
        low += 1
    if low > 0:
        roots.add(0)
        coeffs = coeffs[low:]
    if len(coeffs) == 1:
        return roots
    denom_lcm = 1
    for c in coeffs:
        denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in coeffs]
    for d in _divisors(ints[0]):
        for r in (d, -d):
            if poly_eval(p, r) == 0:
                roots.add(r)
    return roots


def det(m: Matrix) -> Fraction:
    """Determinant by exact Gaussian elimination."""
    if m.rows != m.cols:
        raise ShapeError("determinant of a non-square matrix")
    n = m.rows
    rows = m.row_list()
    out = Q1
    for c in range(n):
        pr = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pr is None:
            return Q0
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            out = -out
        out *= rows[c][c]
        inv = Q1 / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return out


def poly_monic(p):
    p = poly_trim(p)
    lead = p[-1]
    if lead == 1:
        return p
    return tuple(c / lead for c in p)


def poly_mod(p, q):
    """Remainder of p modulo q (q nonzero), both lowest-degree-first."""
    p = list(poly_trim(p))
    q = poly_trim(q)
    dq = len(q) - 1
    lead = q[-1]
    while len(p) - 1 >= dq and any(c != 0 for c in p):
        f = p[-1] / lead
        shift = len(p) - 1 - dq
        for i, c in enumerate(q):
            p[shift + i] -= f * c
        while len(p) > 1 and p[-1] == 0:
            p.pop()
    return poly_trim(p)


def poly_gcd(p, q):
    """Monic gcd over Q."""
    p, q = poly_trim(p), poly_trim(q)
    while any(c != 0 for c in q):
        p, q = q, poly_mod(p, q)
        q = poly_trim(q)
        if any(c != 0 for c in q):
            q = poly_monic(q)
    return poly_monic(p)


def poly_derivative(p):
    return poly_trim(tuple(Fraction(i) * c for i, c in enumerate(p)))[1:] or (Q0,)


def _squarefree_part(p):
    d = poly_derivative(p)
    if poly_degree(d) < 0 or all(c == 0 for c in d):
        return poly_monic(p)
    g = poly_gcd(p, d)
    if poly_degree(g) == 0:
        return poly_monic(p)
    # exact division p / g by synthetic long division
    out = []
    rem = list(poly_trim(p))
    dg = poly_degree(g)
    while len(rem) - 1 >= dg:
        f = rem[-1] / g[-1]
        out.append(f)
        shift = len(rem) - 1 - dg
        for i, c in enumerate(g):
            rem[shift + i] -= f * c
        rem.pop()
    out.reverse()
    return poly_monic(tuple(out))


def _deflate(coeffs, root):
    """Synthetic division by (x - root); assumes root is a root."""
    q = [Q0] * (len(coeffs) - 1)
    q[-1] = coeffs[-1]
    for i in range(len(coeffs) - 2, 0, -1):
        q[i - 1] = coeffs[i] + q[i] * root
    return q


def rational_roots(p):
    """All rational roots of p with multiplicity.  Returns (roots,
    fully_split).  Candidates come from the rational root theorem applied
    to the squarefree part, which keeps the integers to factor small even
    when p has high-multiplicity roots."""
    p = poly_trim(p)
    if all(c == 0 for c in p):
        raise ShapeError("rational_roots of the zero polynomial")
    roots = []
    coeffs = list(p)
    while len(coeffs) > 1 and coeffs[0] == 0:
        roots.append(Q0)
        coeffs = coeffs[1:]
    if len(coeffs) == 1:
        return roots, True
    sf = _squarefree_part(tuple(coeffs))
    denom_lcm = 1
    for c in sf:
        denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in sf]
    low = 0
    while ints[low] == 0:
        low += 1
    candidates = set()
    for pn in _divisors(ints[low]):
        for qd in _divisors(ints[-1]):
            candidates.add(Fraction(pn, qd))
            candidates.add(Fraction(-pn, qd))
    simple_roots = sorted(r for r in candidates if poly_eval(sf, r) == 0)
    for r in simple_roots:
        while len(coeffs) > 1 and poly_eval(tuple(coeffs), r) == 0:
            coeffs = _deflate(coeffs, r)
            roots.append(r)
    return roots, len(coeffs) == 1


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# -- chain complexes -----------------------------------------------------------

class ChainComplex:
    """A finite complex of Q-vector spaces, cochain convention (d raises
    degree).  differentials[k] maps degree min_degree+k to min_degree+k+1
    and has shape dims[k+1] x dims[k]."""

    __slots__ = ("min_degree", "dims", "differentials")

    def __init__(self, min_degree, dims, differentials):
        dims = tuple(int(d) for d in dims)
        differentials = tuple(differentials)
        if len(differentials) != max(len(dims) - 1, 0):
            raise ShapeError("need one differential per consecutive degree pair")
        for k, d in enumerate(differentials):
            if (d.rows, d.cols) != (dims[k + 1], dims[k]):
                raise ShapeError(f"differential {k} has shape {d.rows}x{d.cols}, "
                                 f"expected {dims[k+1]}x{dims[k]}")
        for k in range(len(differentials) - 1):
            if not (differentials[k + 1] * differentials[k]).is_zero():
                raise InvalidComplexError(f"d_{k+1} d_{k} != 0")
        self.min_degree = min_degree
        self.dims = dims
        self.differentials = differentials

    @property
    def degrees(self):
        return range(self.min_degree, self.min_degree + len(self.dims))

    def differential(self, degree) -> Matrix:
        """d: degree -> degree+1 (zero matrix outside the stored range)."""
        k = degree - self.min_degree
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        src = self.dims[k] if 0 <= k < len(self.dims) else 0
        tgt = self.dims[k + 1] if 0 <= k + 1 < len(self.dims) else 0
        return Matrix.zero(tgt, src)

    def shift(self, s):
        """Same data with degrees shifted down by s (degree k of the result
        holds old degree k+s)."""
        return ChainComplex(self.min_degree - s, self.dims, self.differentials)

    def euler_characteristic(self):
        return sum((-1) ** d * self.dims[d - self.min_degree] for d in self.degrees)

    def __eq__(self, other):
        return (isinstance(other, ChainComplex) and self.min_degree == other.min_degree
                and self.dims == other.dims and self.differentials == other.differentials)


def betti(c: ChainComplex):
    """Betti numbers, indexed like c.dims: b[k] = dim ker d_k - rank d_{k-1}."""
    out = []
    for k in range(len(c.dims)):
        d_out = c.differential(c.min_degree + k)
        d_in = c.differential(c.min_degree + k - 1)
        out.append((c.dims[k] - rank(d_out)) - rank(d_in))
    return tuple(out)


class ChainMap:
    """A degreewise map of complexes commuting with the differentials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: ChainComplex, target: ChainComplex, components):
        if source.min_degree != target.min_degree or len(source.dims) != len(target.dims):
            raise ShapeError("chain map requires equal gradings")
        components = tuple(components)
        if len(components) != len(source.dims):
            raise ShapeError("need one component per degree")
        for k, f in enumerate(components):
            if (f.rows, f.cols) != (target.dims[k], source.dims[k]):
                raise ShapeError(f"component {k} shape mismatch")
        for k in range(len(components) - 1):
            lhs = components[k + 1] * source.differentials[k]
            rhs = target.differentials[k] * components[k]
            if lhs != rhs:
                raise InvalidComplexError(f"does not commute with d in degree {k}")
        self.source = source
        self.target = target
        self.components = components


def image_complex(f: ChainMap) -> ChainComplex:
    """The image of a chain map, with the differential induced from the target."""
    bases = [image_basis(comp) for comp in f.components]
    dims = [b.dim for b in bases]
    diffs = []
    for k in range(len(dims) - 1):
        inc_k = bases[k].basis.transpose()
        inc_k1 = bases[k + 1].basis.transpose()
        d = solve_matrix(inc_k1, f.target.differentials[k] * inc_k)
        if d is None:
            raise InvalidComplexError("image not preserved by the differential")
        diffs.append(d)
    return ChainComplex(f.source.min_degree, dims, diffs)
