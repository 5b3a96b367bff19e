"""Quivers of an arrangement graph and of its truncations.

A quiver attaches a finite-dimensional Q-vector space to every vertex and
a matrix to every oriented edge, subject to quadratic relations; a level-n
quiver lives on the truncated graph and carries an extra loop operator per
forgotten adjacency.  This module owns the relation checker, the duality
tau, the complexes C+ and C-, the local and monodromy operators with their
spectra, non-resonance reports, and Hom spaces.

Maps (and loop operators) absent from the data tables are implicitly zero.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arrangement import (AdmissibleGraph, ArrangementGraph, TruncatedGraph,
                          format_vertex_key, parse_vertex_key)
from .errors import (InvalidQuiverError, MissingLoopError, ParseError,
                     ShapeError)
from .linalg import (ChainComplex, Matrix, Q0, Q1, Subspace, block_diag,
                     char_poly, frac, kernel_basis, poly_format,
                     rational_roots)


class Quiver:
    """Spaces V_alpha and maps A_{alpha,beta}: V_beta -> V_alpha on
    adjacent ordered pairs of an admissible graph."""

    def __init__(self, graph: AdmissibleGraph, spaces, maps):
        self.graph = graph
        self.spaces = {graph.key(v): int(d) for v, d in spaces.items()}
        for v in graph.vertices:
            self.spaces.setdefault(v, 0)
            if self.spaces[v] < 0:
                raise ShapeError("negative dimension")
        unknown = set(self.spaces) - set(graph.vertices)
        if unknown:
            raise ShapeError(f"spaces at unknown vertices {sorted(unknown)}")
        self.maps = {}
        for (a, b), m in maps.items():
            a, b = graph.key(a), graph.key(b)
            if not graph.adjacent(a, b):
                raise ShapeError(f"map on non-adjacent pair {a}, {b}")
            if (m.rows, m.cols) != (self.spaces[a], self.spaces[b]):
                raise ShapeError(f"map {a},{b} has shape {m.rows}x{m.cols}, "
                                 f"expected {self.spaces[a]}x{self.spaces[b]}")
            if not m.is_zero():
                self.maps[(a, b)] = m

    @property
    def level(self):
        return None

    def dim(self, v):
        return self.spaces[self.graph.key(v)]

    def map(self, a, b) -> Matrix:
        """A_{a,b}: V_b -> V_a (zero when absent)."""
        a, b = self.graph.key(a), self.graph.key(b)
        m = self.maps.get((a, b))
        if m is None:
            return Matrix.zero(self.spaces[a], self.spaces[b])
        return m

    def vertices(self):
        return self.graph.vertices

    def down(self, v):
        return self.graph.down(v)

    def up(self, v):
        return self.graph.up(v)

    def total_dim(self):
        return sum(self.spaces.values())

    def is_zero(self):
        return all(d == 0 for d in self.spaces.values())

    def __eq__(self, other):
        return (isinstance(other, Quiver) and self.level == other.level
                and self.graph.vertices == other.graph.vertices
                and self.spaces == other.spaces and self.maps == other.maps
                and getattr(self, "loop_ops", {}) == getattr(other, "loop_ops", {}))

    def __repr__(self):
        return f"Quiver(dims {[self.spaces[v] for v in self.graph.vertices]})"


class LevelQuiver(Quiver):
    """A quiver of a truncated graph, with loop operators at the boundary
    level."""

    def __init__(self, tgraph: TruncatedGraph, spaces, maps, loop_ops=None):
        self.tgraph = tgraph
        # reuse the Quiver plumbing against the truncated adjacency
        self.graph = tgraph
        self.spaces = {tgraph.full.key(v): int(d) for v, d in spaces.items()}
        for v in tgraph.vertices:
            self.spaces.setdefault(v, 0)
        unknown = set(self.spaces) - set(tgraph.vertices)
        if unknown:
            raise ShapeError(f"spaces at unknown vertices {sorted(unknown)}")
        self.maps = {}
        loops = set(tgraph.loops)
        for (a, b), m in maps.items():
            a, b = tgraph.full.key(a), tgraph.full.key(b)
            if not (frozenset((a, b)) in tgraph.edges):
                raise ShapeError(f"map on non-adjacent pair {a}, {b}")
            if (m.rows, m.cols) != (self.spaces[a], self.spaces[b]):
                raise ShapeError(f"map {a},{b} shape mismatch")
            if not m.is_zero():
                self.maps[(a, b)] = m
        self.loop_ops = {}
        for (at, via), m in (loop_ops or {}).items():
            at, via = tgraph.full.key(at), tgraph.full.key(via)
            if (at, via) not in loops:
                raise MissingLoopError(f"no loop ({at},{at})^{via} in the level-"
                                       f"{tgraph.n} graph")
            if (m.rows, m.cols) != (self.spaces[at], self.spaces[at]):
                raise ShapeError(f"loop {at}^{via} shape mismatch")
            if not m.is_zero():
                self.loop_ops[(at, via)] = m

    @property
    def level(self):
        return self.tgraph.n

    def loop(self, at, via) -> Matrix:
        at = self.tgraph.full.key(at)
        via = self.tgraph.full.key(via)
        if (at, via) not in set(self.tgraph.loops):
            raise MissingLoopError(f"no loop ({at},{at})^{via}")
        m = self.loop_ops.get((at, via))
        if m is None:
            return Matrix.zero(self.spaces[at], self.spaces[at])
        return m

    def __repr__(self):
        return (f"LevelQuiver(level {self.level}, "
                f"dims {[self.spaces[v] for v in self.graph.vertices]})")


def level_zero_quiver(graph, dim, operators) -> LevelQuiver:
    """Convenience: the level-0 quiver with one space of dimension `dim`
    and loop operator `operators[j]` on the loop through hyperplane j."""
    t = TruncatedGraph(graph, 0)
    top = graph.top()
    loops = {}
    for via, m in operators.items():
        via_key = via if isinstance(via, tuple) else (via,)
        loops[(top, via_key)] = m
    return LevelQuiver(t, {top: dim}, {}, loops)


class QuiverMorphism:
    """A vertex-indexed family f_alpha: V_alpha -> W_alpha intertwining
    two quivers over the same graph (and their loops, at level)."""

    def __init__(self, source, target, components, check=True):
        if source.graph is not target.graph and source.graph.vertices != target.graph.vertices:
            raise ShapeError("morphism between quivers on different graphs")
        self.source = source
        self.target = target
        self.components = {}
        for v in source.graph.vertices:
            f = components.get(v)
            if f is None:
                f = Matrix.zero(target.dim(v), source.dim(v))
            if (f.rows, f.cols) != (target.dim(v), source.dim(v)):
                raise ShapeError(f"component {v} shape mismatch")
            self.components[v] = f
        if check:
            bad = self.violations()
            if bad:
                raise InvalidQuiverError(f"not a morphism: fails at {bad[:3]}")

    def violations(self):
        out = []
        g = self.source.graph
        for a in g.vertices:
            for b in _neighbors(g, a):
                lhs = self.components[a] * self.source.map(a, b)
                rhs = self.target.map(a, b) * self.components[b]
                if lhs != rhs:
                    out.append((a, b))
        if isinstance(self.source, LevelQuiver):
            for (at, via) in self.source.tgraph.loops:
                lhs = self.components[at] * self.source.loop(at, via)
                rhs = self.target.loop(at, via) * self.components[at]
                if lhs != rhs:
                    out.append((at, at, via))
        return out

    def component(self, v):
        return self.components[self.source.graph.key(v)]

    def is_identity(self):
        return all(f == Matrix.identity(f.rows) for f in self.components.values())


def _neighbors(g, a):
    return list(g.up(a)) + list(g.down(a))


# -- relation checking -----------------------------------------------------------

def check_quiver(v: Quiver):
    """All violated defining relations, as (name, vertex-tuple) pairs;
    empty when v is a valid quiver."""
    out = []
    g = v.graph
    verts = list(g.vertices)
    lv = g.level
    by_level = {}
    for k in verts:
        by_level.setdefault(lv[k], []).append(k)
    for a in verts:
        for c in verts:
            if abs(lv[a] - lv[c]) == 2:
                mids = [b for b in _neighbors(g, a) if b in set(_neighbors(g, c))]
                if _sum_comp(v, a, mids, c) is not None:
                    out.append(("(b)", (a, c)))
            elif lv[a] == lv[c] and a != c:
                if any(set(g.down(a)) & set(g.down(c))):
                    mids = [b for b in _neighbors(g, a) if b in set(_neighbors(g, c))]
                    if _sum_comp(v, a, mids, c) is not None:
                        out.append(("(c)", (a, c)))
    if isinstance(v, LevelQuiver):
        out.extend(_check_loops(v))
    return out


def _sum_comp(v, a, mids, c):
    """Sum of A_{a,b} A_{b,c} over the given mids; None when zero."""
    total = Matrix.zero(v.dim(a), v.dim(c))
    for b in mids:
        total = total + v.map(a, b) * v.map(b, c)
    return None if total.is_zero() else total


def _check_loops(v: LevelQuiver):
    out = []
    g = v.tgraph
    full = g.full
    n = g.n
    for (at, via) in g.loops:
        for d in full.up(at):
            mids = [c for c in full.down(d)
                    if c != at and full.level[c] == n and full.adjacent(c, via)]
            s = Matrix.zero(v.dim(d), v.dim(d))
            for c in mids:
                s = s + v.map(d, c) * v.map(c, d)
            if v.loop(at, via) * v.map(at, d) != v.map(at, d) * s:
                out.append(("(iv)", (at, via, d)))
            if v.map(d, at) * v.loop(at, via) != s * v.map(d, at):
                out.append(("(iv)*", (at, via, d)))
    for at in [k for k in g.vertices if g.level[k] == n]:
        deep = {c for b in full.down(at) for c in full.down(b)}
        for c in deep:
            betas = [b for b in full.down(at) if full.adjacent(b, c)]
            s = Matrix.zero(v.dim(at), v.dim(at))
            for b in betas:
                s = s + v.loop(at, b)
            for b in betas:
                lb = v.loop(at, b)
                if lb * s != s * lb:
                    out.append(("(v)", (at, b, c)))
    return out


def require_valid(v: Quiver):
    bad = check_quiver(v)
    if bad:
        raise InvalidQuiverError(f"quiver relations fail: {bad[:5]}")
    return v


# -- duality -----------------------------------------------------------------------

def dual(v: Quiver) -> Quiver:
    """tau: V_alpha -> V_alpha^*, A_{a,b} -> eps(b,a) A_{b,a}^t."""
    if isinstance(v, LevelQuiver):
        return dual_level(v)
    g = v.graph
    maps = {}
    for a in g.vertices:
        for b in _neighbors(g, a):
            m = v.map(b, a)
            if not m.is_zero():
                maps[(a, b)] = m.transpose().scale(g.epsilon(b, a))
    return Quiver(g, dict(v.spaces), maps)


def dual_level(v: LevelQuiver) -> LevelQuiver:
    g = v.tgraph
    maps = {}
    for a in g.vertices:
        for b in _neighbors(g, a):
            m = v.map(b, a)
            if not m.is_zero():
                maps[(a, b)] = m.transpose().scale(g.full.epsilon(b, a))
    loops = {}
    for (at, via) in g.loops:
        m = v.loop(at, via)
        if not m.is_zero():
            loops[(at, via)] = -m.transpose()
    return LevelQuiver(g, dict(v.spaces), maps, loops)


def sign_conjugate(v):
    """Conjugation by diag((-1)^level): recovers v from tau(tau(v))."""
    g = v.graph
    lv = g.level
    maps = {}
    for (a, b), m in v.maps.items():
        maps[(a, b)] = m.scale(Fraction((-1) ** (lv[a] + lv[b])))
    if isinstance(v, LevelQuiver):
        return LevelQuiver(v.tgraph, dict(v.spaces), maps, dict(v.loop_ops))
    return Quiver(g, dict(v.spaces), maps)


# -- complexes --------------------------------------------------------------------

def _level_blocks(v: Quiver):
    g = v.graph
    lv = g.level
    top = max(lv[k] for k in g.vertices)
    by_level = [sorted([k for k in g.vertices if lv[k] == p]) for p in range(top + 1)]
    return by_level


def c_plus(v: Quiver) -> ChainComplex:
    """(C(V), d): degree k holds the sum of the level-k spaces, d collects
    the maps toward deeper vertices."""
    return _complex_from(v, downward=True)


def c_minus(v: Quiver) -> ChainComplex:
    """(C(V), boundary), stored as a cochain complex by negating degrees."""
    return _complex_from(v, downward=False)


def _complex_from(v, downward):
    from .errors import InvalidComplexError
    by_level = _level_blocks(v)
    dims = [sum(v.dim(k) for k in level) for level in by_level]
    diffs = []
    for p in range(len(by_level) - 1):
        src, tgt = by_level[p], by_level[p + 1]
        if not downward:
            src, tgt = by_level[p + 1], by_level[p]
        blocks = []
        for t in tgt:
            row = []
            for s in src:
                row.append(v.map(t, s) if v.graph.adjacent(t, s)
                           else Matrix.zero(v.dim(t), v.dim(s)))
            blocks.append(row)
        m = _assemble(blocks, sum(v.dim(t) for t in tgt), sum(v.dim(s) for s in src))
        diffs.append(m)
    try:
        if downward:
            return ChainComplex(0, dims, diffs)
        top = len(dims) - 1
        return ChainComplex(-top, tuple(reversed(dims)), tuple(reversed(diffs)))
    except InvalidComplexError as exc:
        raise InvalidQuiverError(f"quiver relations fail: {exc}") from exc


def _assemble(blocks, rows, cols):
    if not blocks or rows == 0 or cols == 0:
        return Matrix.zero(rows, cols)
    out = []
    for brow in blocks:
        for i in range(brow[0].rows):
            row = []
            for b in brow:
                row.extend(b.row(i))
            out.append(row)
    return Matrix.from_rows(out, cols=cols)


def vertex_offsets(v: Quiver, level):
    """Offset of each level-`level` vertex inside its C(V) degree block."""
    keys = sorted([k for k in v.graph.vertices if v.graph.level[k] == level])
    out = {}
    pos = 0
    for k in keys:
        out[k] = pos
        pos += v.dim(k)
    return out, pos


# -- local and monodromy operators ---------------------------------------------------

class LocalOps:
    __slots__ = ("S", "T", "Tbar", "Stilde", "up_keys")

    def __init__(self, S, T, Tbar, Stilde, up_keys):
        self.S = S
        self.T = T
        self.Tbar = Tbar
        self.Stilde = Stilde
        self.up_keys = up_keys


def local_ops(v: Quiver, beta) -> LocalOps:
    """S, T, Tbar, Stilde at a vertex; T and Tbar act on the sum of the
    spaces one level up, in sorted vertex order."""
    g = v.graph
    b = g.key(beta)
    ups = sorted(g.up(b))
    s = Matrix.zero(v.dim(b), v.dim(b))
    for a in ups:
        s = s + v.map(b, a) * v.map(a, b)
    t_blocks = [[v.map(a, b) * v.map(b, a2) for a2 in ups] for a in ups]
    tbar_blocks = []
    for a in ups:
        row = []
        for a2 in ups:
            acc = Matrix.zero(v.dim(a), v.dim(a2))
            for d in set(_ups_of(v, a)) & set(_ups_of(v, a2)):
                acc = acc + v.map(a, d) * v.map(d, a2)
            row.append(acc)
        tbar_blocks.append(row)
    updim = sum(v.dim(a) for a in ups)
    t = _assemble(t_blocks, updim, updim)
    tbar = _assemble(tbar_blocks, updim, updim)
    stilde = _stilde(v, b)
    return LocalOps(s, t, tbar, stilde, tuple(ups))


def _ups_of(v, a):
    return v.graph.up(a)


def _stilde(v: Quiver, b):
    g = v.graph
    out = Matrix.zero(v.dim(b), v.dim(b))
    if isinstance(v, LevelQuiver) and g.level[b] == v.level:
        for (at, via) in v.tgraph.loops:
            if at == b:
                out = out + v.loop(at, via)
        return out
    for a in g.down(b):
        out = out + v.map(b, a) * v.map(a, b)
    return out


def global_S(v: Quiver) -> Matrix:
    """S = sum over vertices of (S_alpha + Stilde_alpha), block diagonal on
    the sum of all vertex spaces in canonical order."""
    blocks = []
    for k in v.graph.vertices:
        ops = local_ops(v, k)
        blocks.append(ops.S + ops.Stilde)
    return block_diag(blocks)


class Spectrum:
    """One eigenvalue per hyperplane of a scalar level-zero quiver."""

    def __init__(self, values):
        self.values = {int(j): frac(x) for j, x in values.items()}

    def of(self, j):
        return self.values[j]


def spectrum_lambda(g: ArrangementGraph, s: Spectrum, alpha) -> Fraction:
    """lambda_alpha = sum of lambda_i over hyperplanes containing the stratum."""
    key = g.key(alpha)
    return sum((s.of(j) for j in key), Q0)


def lambda_infinity(g: ArrangementGraph, s: Spectrum) -> Fraction:
    return sum((s.of(j) for j in range(1, g.arrangement.size + 1)), Q0)


def is_nonresonant_spectrum(g: ArrangementGraph, s: Spectrum) -> bool:
    """No lambda_alpha is a nonzero integer."""
    for k in g.vertices:
        lam = spectrum_lambda(g, s, k)
        if lam != 0 and lam.denominator == 1:
            return False
    return True


def check_nonresonance_class(v: Quiver):
    """Per-vertex monodromy report: characteristic polynomials of T and
    Tbar, the positive-integer-eigenvalue flag for Tbar, and whether the
    eigenvalues of T fit in some non-resonant set (decidable only when the
    polynomial splits over Q)."""
    g = v.graph
    report = []
    for b in g.vertices:
        if g.level[b] == 0:
            continue
        ops = local_ops(v, b)
        pt = char_poly(ops.T)
        ptbar = char_poly(ops.Tbar)
        tbar_roots, _ = rational_roots(ptbar)
        tbar_flag = any(r > 0 and r.denominator == 1 for r in tbar_roots)
        t_roots, split = rational_roots(pt)
        if not split:
            status = "undetermined"
        else:
            vals = set(t_roots)
            ok = all(x == 0 or x.denominator != 1 for x in vals)
            ok = ok and all((x - y == 0) or (x - y).denominator != 1
                            for x in vals for y in vals if x != y)
            status = "verified" if ok else "violated"
        report.append({
            "vertex": b,
            "char_poly_T": poly_format(pt),
            "char_poly_Tbar": poly_format(ptbar),
            "tbar_has_positive_integer_eigenvalue": tbar_flag,
            "t_nonresonant": status,
        })
    return report


# -- Hom spaces ------------------------------------------------------------------

def hom_space(v: Quiver, w: Quiver) -> Subspace:
    """The solution space of all intertwining equations for morphisms
    v -> w, in coordinates running over vertices in canonical order and
    the entries of each component row-major."""
    g = v.graph
    if w.graph is not g and w.graph.vertices != g.vertices:
        raise ShapeError("hom between quivers on different graphs")
    if isinstance(v, LevelQuiver) != isinstance(w, LevelQuiver):
        raise ShapeError("hom between quivers of different kinds")
    if isinstance(v, LevelQuiver) and v.level != w.level:
        raise ShapeError("hom between quivers of different levels")
    offsets = {}
    total = 0
    for k in g.vertices:
        offsets[k] = total
        total += w.dim(k) * v.dim(k)
    rows = []

    def add_equation(a, b, va, wa):
        # f_a * A(a,b) = A'(a,b) * f_b, one scalar equation per (i, j)
        A = v.map(a, b)
        Ap = w.map(a, b)
        for i in range(w.dim(a)):
            for j in range(v.dim(b)):
                row = [Q0] * total
                for k2 in range(v.dim(a)):
                    row[offsets[a] + i * v.dim(a) + k2] += A[k2, j]
                for k2 in range(w.dim(b)):
                    row[offsets[b] + k2 * v.dim(b) + j] -= Ap[i, k2]
                rows.append(row)

    for a in g.vertices:
        for b in _neighbors(g, a):
            add_equation(a, b, v, w)
    if isinstance(v, LevelQuiver):
        for (at, via) in v.tgraph.loops:
            A = v.loop(at, via)
            Ap = w.loop(at, via)
            for i in range(w.dim(at)):
                for j in range(v.dim(at)):
                    row = [Q0] * total
                    for k2 in range(v.dim(at)):
                        row[offsets[at] + i * v.dim(at) + k2] += A[k2, j]
                    for k2 in range(w.dim(at)):
                        row[offsets[at] + k2 * v.dim(at) + j] -= Ap[i, k2]
                    rows.append(row)
    return kernel_basis(Matrix.from_rows(rows, cols=total))


def morphism_from_coords(v: Quiver, w: Quiver, coords, check=True) -> QuiverMorphism:
    """Materialize a morphism from a hom_space coordinate vector."""
    g = v.graph
    components = {}
    pos = 0
    for k in g.vertices:
        n = w.dim(k) * v.dim(k)
        block = coords[pos:pos + n]
        components[k] = Matrix(w.dim(k), v.dim(k), block)
        pos += n
    return QuiverMorphism(v, w, components, check=check)


def hom_dim(v, w) -> int:
    return hom_space(v, w).dim


# -- serialization (.qvr) ----------------------------------------------------------

def _format_key(key):
    if key and isinstance(key[0], tuple):
        return "|".join(format_vertex_key(k) for k in key)
    return format_vertex_key(key)


def _matrix_json(m: Matrix):
    return [[str(x) for x in m.row(i)] for i in range(m.rows)]


def _matrix_from_json(data, rows, cols):
    try:
        entries = [Fraction(x) for row in data for x in row]
    except (ValueError, TypeError):
        raise ParseError("bad matrix entry")
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ParseError(f"matrix should be {rows}x{cols}")
    return Matrix(rows, cols, entries)


def quiver_to_json(v: Quiver, witness=None):
    out = {
        "level": v.level,
        "spaces": {_format_key(k): v.dim(k) for k in v.graph.vertices},
        "maps": [{"from": _format_key(b), "to": _format_key(a),
                  "matrix": _matrix_json(m)}
                 for (a, b), m in sorted(v.maps.items())],
    }
    if isinstance(v, LevelQuiver):
        out["loops"] = [{"at": _format_key(at), "via": _format_key(via),
                         "matrix": _matrix_json(m)}
                        for (at, via), m in sorted(v.loop_ops.items())]
    if witness is not None:
        out["witness"] = witness
    return out


def quiver_from_json(graph: AdmissibleGraph, data):
    """Load a .qvr object against a built graph; level null gives a plain
    quiver, an integer gives a level quiver of that truncation."""
    try:
        level = data.get("level")
        spaces = {parse_vertex_key(k): int(d) for k, d in data["spaces"].items()}
        dims = dict(spaces)
        maps = {}
        for item in data.get("maps", []):
            a = parse_vertex_key(item["to"])
            b = parse_vertex_key(item["from"])
            maps[(a, b)] = _matrix_from_json(item["matrix"],
                                             dims.get(a, 0), dims.get(b, 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed quiver JSON: {exc}")
    if level is None:
        return Quiver(graph, spaces, maps)
    t = TruncatedGraph(graph, int(level))
    loops = {}
    for item in data.get("loops", []):
        at = parse_vertex_key(item["at"])
        via = parse_vertex_key(item["via"])
        loops[(at, via)] = _matrix_from_json(item["matrix"],
                                             dims.get(at, 0), dims.get(at, 0))
    return LevelQuiver(t, spaces, maps, loops)


def parse_quiver(text, graph, path=None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}", path)
    try:
        return quiver_from_json(graph, data)
    except ParseError as exc:
        raise ParseError(str(exc), path)
