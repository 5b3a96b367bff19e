"""Orlik-Solomon algebra, flag spaces, and the scalar complexes built on
them: the flag complex, the Aomoto complex, the duality pairing between
them, the Shapovalov chain map, and its image, the complex of flag forms.

Both algebras are presented by generators and relations read off the
arrangement graph.  Bases are the lexicographically least independent
generator subsets, so coordinates are deterministic across runs; the
quotient bookkeeping lives in `_PresentedSpace`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

from .arrangement import ArrangementGraph, format_vertex_key
from .errors import ParseError, ShapeError
from .linalg import (ChainComplex, ChainMap, Matrix, Q0, Q1, frac,
                     image_complex, rref, solve_matrix)


class _SparseRREF:
    """Row space in reduced echelon form, rows stored as sparse dicts
    keyed by column; supports the incremental membership tests the basis
    selection needs."""

    def __init__(self):
        self.rows = {}  # pivot column -> {column: value}

    def reduce(self, vec):
        vec = {c: v for c, v in vec.items() if v}
        for c in sorted(vec):
            v = vec.get(c)
            if not v or c not in self.rows:
                continue
            for cc, val in self.rows[c].items():
                nv = vec.get(cc, Q0) - v * val
                if nv:
                    vec[cc] = nv
                else:
                    vec.pop(cc, None)
        return vec

    def add(self, vec):
        """Insert the vector; returns its pivot column, or None if it was
        already in the span."""
        r = self.reduce(vec)
        if not r:
            return None
        pivot = min(r)
        inv = Q1 / r[pivot]
        r = {c: v * inv for c, v in r.items()}
        for p, row in self.rows.items():
            f = row.get(pivot)
            if f:
                for cc, val in r.items():
                    nv = row.get(cc, Q0) - f * val
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
        self.rows[pivot] = r
        return pivot


class _PresentedSpace:
    """A quotient of the free span of `generators` by sparse relation
    rows, with the lexicographically least generator subset as basis and
    a precomputed expansion of every generator in that basis."""

    def __init__(self, generators, relation_rows):
        self.generators = list(generators)
        ngen = len(self.generators)
        self._relation_rows = [dict(r) for r in relation_rows]
        span = _SparseRREF()
        for r in self._relation_rows:
            span.add(r)
        reduced = [span.reduce({i: Q1}) for i in range(ngen)]
        chooser = _SparseRREF()
        basis = [i for i in range(ngen) if chooser.add(dict(reduced[i])) is not None]
        self.basis_indices = basis
        self.basis = [self.generators[i] for i in basis]
        self.dim = len(basis)
        free_cols = sorted(set(range(ngen)) - set(span.rows))
        col_index = {c: i for i, c in enumerate(free_cols)}
        b = Matrix.from_rows(
            [[reduced[basis[j]].get(c, Q0) for j in range(self.dim)] for c in free_cols],
            cols=self.dim)
        binv = solve_matrix(b, Matrix.identity(self.dim)) if self.dim else None
        if self.dim and binv is None:
            raise ShapeError("quotient basis selection failed")
        self._gen_coords = []
        for i in range(ngen):
            dense = [Q0] * self.dim
            for c, v in reduced[i].items():
                dense[col_index[c]] = v
            if self.dim:
                self._gen_coords.append(binv.apply(tuple(dense)))
            else:
                self._gen_coords.append(())
        self._gen_index = {q: i for i, q in enumerate(self.generators)}

    @property
    def relation_space(self):
        rows = []
        for r in self._relation_rows:
            dense = [Q0] * len(self.generators)
            for c, v in r.items():
                dense[c] = v
            rows.append(dense)
        return Matrix.from_rows(rows, cols=len(self.generators))

    def coords_of_generator(self, gen):
        return tuple(self._gen_coords[self._gen_index[gen]])


def _sort_with_sign(tup):
    """Sort a tuple, tracking the permutation sign; None sign for repeats."""
    items = list(tup)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(items)):
        if items[i - 1] == items[i]:
            return tuple(items), None
    return tuple(items), sign


class OSBasis:
    """Degree-p component of the Orlik-Solomon algebra, organized per
    vertex of codimension p.

    generators: sorted general-position p-subsets, grouped by their
    intersection vertex; expand() resolves any p-tuple of hyperplane
    indices (with skew sign, zero for degenerate tuples) into basis
    coordinates."""

    def __init__(self, graph: ArrangementGraph, p):
        self.graph = graph
        self.degree = p
        self.vertex_keys = graph.levels(p)
        js = range(1, graph.arrangement.size + 1)
        per_vertex_gens = {vk: [] for vk in self.vertex_keys}
        for comb in combinations(js, p):
            vk = _tuple_vertex(graph, comb)
            if vk is not None and graph.level[vk] == p:
                per_vertex_gens[vk].append(comb)
        self.spaces = {}
        for vk in self.vertex_keys:
            gens = per_vertex_gens[vk]
            gen_index = {t: i for i, t in enumerate(gens)}
            rel_rows = []
            for comb in combinations(js, p + 1):
                wk = _tuple_vertex(graph, comb)
                if wk != vk:
                    continue
                row = {}
                for k in range(p + 1):
                    sub = comb[:k] + comb[k + 1:]
                    idx = gen_index.get(sub)
                    if idx is not None:
                        row[idx] = row.get(idx, Q0) + Fraction((-1) ** (k + 1))
                if any(v != 0 for v in row.values()):
                    rel_rows.append(row)
            self.spaces[vk] = _PresentedSpace(gens, rel_rows)
        self.offsets = {}
        total = 0
        for vk in self.vertex_keys:
            self.offsets[vk] = total
            total += self.spaces[vk].dim
        self.dim = total

    @property
    def generators(self):
        return [t for vk in self.vertex_keys for t in self.spaces[vk].generators]

    @property
    def basis(self):
        return [t for vk in self.vertex_keys for t in self.spaces[vk].basis]

    def expand(self, tup):
        """Coordinates of the class of (H_{j_1},...,H_{j_p}) in the basis."""
        if len(tup) != self.degree:
            raise ShapeError("tuple degree mismatch")
        srt, sign = _sort_with_sign(tuple(tup))
        out = [Q0] * self.dim
        if sign is None:
            return tuple(out)
        vk = _tuple_vertex(self.graph, srt)
        if vk is None or self.graph.level[vk] != self.degree:
            return tuple(out)
        space = self.spaces[vk]
        off = self.offsets[vk]
        for i, c in enumerate(space.coords_of_generator(srt)):
            out[off + i] = sign * c
        return tuple(out)


def _tuple_vertex(graph: ArrangementGraph, tup):
    """Key of the intersection vertex of a hyperplane index tuple, or None."""
    if not tup:
        return graph.top()
    return graph.wedge_tuple([(j,) for j in tup])


def os_space(graph: ArrangementGraph, p) -> OSBasis:
    cache = _graph_cache(graph)
    if ("os", p) not in cache:
        cache[("os", p)] = OSBasis(graph, p)
    return cache[("os", p)]


class FlagBasis:
    """The flag space of one vertex: complete flags from the open stratum
    down to the vertex, modulo the incomplete-flag relations."""

    def __init__(self, graph, vertex_key):
        self.graph = graph
        self.vertex_key = vertex_key
        p = graph.level[vertex_key]
        self.degree = p
        flags = []
        top = graph.top()

        def grow(chain):
            last = chain[-1]
            if graph.level[last] == p:
                flags.append(tuple(chain))
                return
            for w in graph.down(last):
                if graph.geq(w, vertex_key):
                    grow(chain + [w])

        grow([top])
        gen_index = {f: i for i, f in enumerate(flags)}
        incomplete = set()
        for f in flags:
            for k in range(1, p):
                incomplete.add((f[:k], f[k + 1:]))
        rel_rows = []
        for prefix, suffix in sorted(incomplete):
            row = {}
            for b in graph.down(prefix[-1]):
                f = prefix + (b,) + suffix
                idx = gen_index.get(f)
                if idx is not None:
                    row[idx] = row.get(idx, Q0) + Q1
            rel_rows.append(row)
        self.space = _PresentedSpace(flags, rel_rows)

    @property
    def generators(self):
        return self.space.generators

    @property
    def basis(self):
        return self.space.basis

    @property
    def dim(self):
        return self.space.dim

    def expand(self, flag):
        return self.space.coords_of_generator(tuple(flag))


def flag_space(graph, vertex) -> FlagBasis:
    vk = graph.key(vertex)
    cache = _graph_cache(graph)
    if ("flag", vk) not in cache:
        cache[("flag", vk)] = FlagBasis(graph, vk)
    return cache[("flag", vk)]


class FlagDegree:
    """All flag spaces of one codimension, concatenated in vertex order."""

    def __init__(self, graph, p):
        self.graph = graph
        self.degree = p
        self.vertex_keys = graph.levels(p)
        self.spaces = {vk: flag_space(graph, vk) for vk in self.vertex_keys}
        self.offsets = {}
        total = 0
        for vk in self.vertex_keys:
            self.offsets[vk] = total
            total += self.spaces[vk].dim
        self.dim = total

    def expand(self, flag):
        vk = tuple(flag)[-1]
        out = [Q0] * self.dim
        off = self.offsets[vk]
        for i, c in enumerate(self.spaces[vk].expand(flag)):
            out[off + i] = c
        return tuple(out)


def flag_degree(graph, p) -> FlagDegree:
    cache = _graph_cache(graph)
    if ("flagdeg", p) not in cache:
        cache[("flagdeg", p)] = FlagDegree(graph, p)
    return cache[("flagdeg", p)]


def _graph_cache(graph):
    cache = getattr(graph, "_quiverarr_cache", None)
    if cache is None:
        cache = {}
        graph._quiverarr_cache = cache
    return cache


def flag_complex(graph) -> ChainComplex:
    """(F^., d_F) with d_F extending a flag by one step, sign (-1)^p."""
    top_level = graph.max_level
    degs = [flag_degree(graph, p) for p in range(top_level + 1)]
    dims = [d.dim for d in degs]
    diffs = []
    for p in range(top_level):
        src, tgt = degs[p], degs[p + 1]
        cols = []
        for vk in src.vertex_keys:
            for f in src.spaces[vk].basis:
                vec = [Q0] * tgt.dim
                for b in graph.down(vk):
                    for i, c in enumerate(tgt.expand(f + (b,))):
                        vec[i] += Fraction((-1) ** p) * c
                cols.append(vec)
        diffs.append(Matrix.from_rows(
            [[cols[j][i] for j in range(dims[p])] for i in range(dims[p + 1])],
            cols=dims[p]))
    return ChainComplex(0, dims, diffs)


class ExponentAssignment:
    """Exponent a(H) per hyperplane, with an optional common divisor kappa;
    the effective exponent is a(H)/kappa."""

    def __init__(self, values, kappa=None):
        self.values = {int(j): frac(v) for j, v in values.items()}
        self.kappa = None if kappa is None else frac(kappa)
        if self.kappa is not None and self.kappa <= 0:
            raise ShapeError("kappa must be positive")

    def of(self, j):
        v = self.values[j]
        return v if self.kappa is None else v / self.kappa

    def for_arrangement(self, arrangement):
        missing = [j for j in range(1, arrangement.size + 1) if j not in self.values]
        if missing:
            raise ShapeError(f"exponents missing for hyperplanes {missing}")
        return self

    @staticmethod
    def zero(arrangement):
        return ExponentAssignment({j: 0 for j in range(1, arrangement.size + 1)})


def aomoto_complex(graph: ArrangementGraph, a: ExponentAssignment) -> ChainComplex:
    """(A^., multiplication by omega(a))."""
    a.for_arrangement(graph.arrangement)
    top_level = graph.max_level
    degs = [os_space(graph, p) for p in range(top_level + 1)]
    dims = [d.dim for d in degs]
    js = range(1, graph.arrangement.size + 1)
    diffs = []
    for p in range(top_level):
        src, tgt = degs[p], degs[p + 1]
        cols = []
        for t in src.basis:
            vec = [Q0] * tgt.dim
            for j in js:
                aj = a.of(j)
                if aj == 0:
                    continue
                for i, c in enumerate(tgt.expand((j,) + t)):
                    vec[i] += aj * c
            cols.append(vec)
        diffs.append(Matrix.from_rows(
            [[cols[jj][i] for jj in range(dims[p])] for i in range(dims[p + 1])],
            cols=dims[p]))
    return ChainComplex(0, dims, diffs)


def duality_pairing(os: OSBasis, fl: FlagDegree) -> Matrix:
    """Pairing matrix <os basis, flag basis>; rows run over the OS basis."""
    if os.degree != fl.degree:
        raise ShapeError("pairing requires equal degrees")
    rows = []
    flag_basis = [f for vk in fl.vertex_keys for f in fl.spaces[vk].basis]
    for t in os.basis:
        rows.append([_pair_generators(os.graph, t, f) for f in flag_basis])
    return Matrix.from_rows(rows, cols=fl.dim)


def _pair_generators(graph, tup, flag):
    """<(H_{j_1},..,H_{j_p}), F_{a_0,..,a_p}> = sign of the unique ordering
    of the tuple tracing the flag, else 0."""
    p = len(tup)
    remaining = set(tup)
    perm = []
    for k in range(1, p + 1):
        ids = set(graph.vertex(flag[k]).id)
        stage = [j for j in tup if j in ids]
        if len(stage) != k:
            return Q0
        new = [j for j in stage if j in remaining]
        if len(new) != 1:
            return Q0
        perm.append(new[0])
        remaining.discard(new[0])
    positions = [tup.index(j) for j in perm]
    sign = 1
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if positions[i] > positions[j]:
                sign = -sign
    return Fraction(sign)


def shapovalov_scalar(graph: ArrangementGraph, a: ExponentAssignment) -> ChainMap:
    """The Shapovalov chain map from the flag complex to the Aomoto complex:
    a flag goes to the sum over hyperplane tuples tracing it, weighted by
    the product of their exponents."""
    a.for_arrangement(graph.arrangement)
    f = flag_complex(graph)
    am = aomoto_complex(graph, a)
    comps = []
    for p in range(graph.max_level + 1):
        fd = flag_degree(graph, p)
        osd = os_space(graph, p)
        cols = []
        for vk in fd.vertex_keys:
            for flag in fd.spaces[vk].basis:
                vec = [Q0] * osd.dim
                id_sets = [graph.vertex(flag[k]).id for k in range(1, p + 1)]
                for tup in product(*id_sets):
                    coef = Q1
                    for j in tup:
                        coef *= a.of(j)
                    if coef == 0:
                        continue
                    for i, c in enumerate(osd.expand(tup)):
                        vec[i] += coef * c
                cols.append(vec)
        comps.append(Matrix.from_rows(
            [[cols[j][i] for j in range(fd.dim)] for i in range(osd.dim)],
            cols=fd.dim))
    return ChainMap(f, am, comps)


def flag_form_complex(graph: ArrangementGraph, a: ExponentAssignment) -> ChainComplex:
    """The image of the Shapovalov map inside the Aomoto complex."""
    return image_complex(shapovalov_scalar(graph, a))


# -- text format ----------------------------------------------------------------

def parse_exponents(text, path=None) -> ExponentAssignment:
    """Parse the .exp format: `a <hyperplane-index> <rational>` lines and an
    optional `kappa <rational>` line."""
    values = {}
    kappa = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "a" and len(parts) == 3:
            try:
                j = int(parts[1])
                v = Fraction(parts[2])
            except ValueError:
                raise ParseError("bad exponent line", path, lineno)
            if j in values:
                raise ParseError(f"duplicate exponent for hyperplane {j}", path, lineno)
            values[j] = v
        elif parts[0] == "kappa" and len(parts) == 2:
            try:
                kappa = Fraction(parts[1])
            except ValueError:
                raise ParseError("bad kappa", path, lineno)
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", path, lineno)
    try:
        return ExponentAssignment(values, kappa)
    except ShapeError as exc:
        raise ParseError(str(exc), path)


def format_exponents(a: ExponentAssignment) -> str:
    lines = [f"a {j} {a.values[j]}" for j in sorted(a.values)]
    if a.kappa is not None:
        lines.append(f"kappa {a.kappa}")
    return "\n".join(lines) + "\n"
