"""Stratification combinatorics of affine hyperplane arrangements.

An arrangement in C^N determines a labeled graph: vertices are the
nonempty intersections of hyperplanes (closed strata), labeled by their
codimension, with edges between strata adjacent in codimension one.  This
module builds that graph, its truncations (which carry loops), the
specialization graph at a stratum of a central arrangement, and the
discriminantal family.

A vertex is identified by its *maximal* set of hyperplane indices: every
hyperplane containing the stratum is listed.  Hyperplane indices are
1-based throughout, matching the text file formats; the open stratum is
the empty tuple ().
"""

from __future__ import annotations

import warnings
from fractions import Fraction

from .errors import ParseError, ShapeError, UnsupportedError
from .linalg import Matrix, Q0, Q1, frac, rref


class Hyperplane:
    """The affine hyperplane {c0 + sum c_i z_i = 0}, stored normalized so
    the first nonzero normal coefficient is 1."""

    __slots__ = ("constant", "normal")

    def __init__(self, constant, normal):
        normal = tuple(frac(x) for x in normal)
        constant = frac(constant)
        lead = next((x for x in normal if x != 0), None)
        if lead is None:
            raise ShapeError("hyperplane normal vector is zero")
        self.constant = constant / lead
        self.normal = tuple(x / lead for x in normal)

    def equation_row(self):
        """Row (c_1 .. c_N, c_0): z-coefficients first, constant last."""
        return self.normal + (self.constant,)

    def is_central(self):
        return self.constant == 0

    def __eq__(self, other):
        return (isinstance(other, Hyperplane) and self.constant == other.constant
                and self.normal == other.normal)

    def __hash__(self):
        return hash((self.constant, self.normal))

    def __repr__(self):
        return f"Hyperplane({self.constant}, {self.normal})"


class Arrangement:
    __slots__ = ("ambient_dim", "hyperplanes")

    def __init__(self, ambient_dim, hyperplanes):
        hyperplanes = list(hyperplanes)
        for h in hyperplanes:
            if len(h.normal) != ambient_dim:
                raise ShapeError("hyperplane dimension differs from ambient dimension")
        if len(set(hyperplanes)) != len(hyperplanes):
            raise ShapeError("duplicate hyperplanes after normalization")
        self.ambient_dim = ambient_dim
        self.hyperplanes = hyperplanes

    @property
    def size(self):
        return len(self.hyperplanes)

    def hyperplane(self, j):
        """1-based lookup."""
        return self.hyperplanes[j - 1]

    def is_central(self):
        return all(h.is_central() for h in self.hyperplanes)

    def __repr__(self):
        return f"Arrangement(dim {self.ambient_dim}, {self.size} hyperplanes)"


class Vertex:
    """A closed stratum: maximal id set, codimension, canonical equations.

    `equations` is the RREF of the defining affine system with columns
    (z_1 .. z_N, 1); its entry tuple is the canonical dedup key."""

    __slots__ = ("id", "codim", "equations")

    def __init__(self, id, codim, equations):
        self.id = tuple(sorted(id))
        self.codim = codim
        self.equations = equations

    def __repr__(self):
        return f"Vertex{self.id}"


def _stack_row(eqs: Matrix, row):
    return eqs.vstack(Matrix(1, eqs.cols, row))


def _canonicalize(eqs: Matrix, ambient_dim):
    """RREF of an affine system; returns (matrix, codim) or None if the
    solution set is empty (a pivot lands in the constant column)."""
    r, pivots = rref(eqs)
    if ambient_dim in pivots:
        return None
    r = r.submatrix(range(len(pivots)), range(ambient_dim + 1))
    return r, len(pivots)


_UNSET = object()


class AdmissibleGraph:
    """The combinatorial core: vertices with levels, edges with level gap
    one, and the closure partial order generated by the edges.

    Quivers, flags, and the Orlik-Solomon algebra depend only on this
    structure, so specialization graphs reuse it with synthetic keys."""

    def __init__(self, levels, edges):
        self.level = dict(levels)
        self.vertices = tuple(sorted(self.level, key=lambda k: (self.level[k], k)))
        self._edges = set()
        for a, b in edges:
            if abs(self.level[a] - self.level[b]) != 1:
                raise ShapeError(f"edge {a},{b} does not change level by one")
            self._edges.add(frozenset((a, b)))
        self._down = {v: [] for v in self.vertices}
        self._up = {v: [] for v in self.vertices}
        for e in self._edges:
            a, b = tuple(e)
            if self.level[a] > self.level[b]:
                a, b = b, a
            self._down[a].append(b)
            self._up[b].append(a)
        for v in self.vertices:
            self._down[v].sort()
            self._up[v].sort()
        self._descendants = {}
        for v in sorted(self.vertices, key=lambda k: -self.level[k]):
            acc = {v}
            for w in self._down[v]:
                acc |= self._descendants[w]
            self._descendants[v] = frozenset(acc)
        self._wedge_cache = {}

    @property
    def max_level(self):
        return max(self.level.values())

    def key(self, v):
        return v.id if isinstance(v, Vertex) else v

    def levels(self, n):
        return [v for v in self.vertices if self.level[v] == n]

    def down(self, v):
        """Vertices one level deeper, adjacent to v (v > them)."""
        return self._down[self.key(v)]

    def up(self, v):
        """Vertices one level shallower, adjacent to v (them > v)."""
        return self._up[self.key(v)]

    def adjacent(self, a, b):
        return frozenset((self.key(a), self.key(b))) in self._edges

    @property
    def edges(self):
        return self._edges

    def geq(self, a, b):
        """a >= b: the closure of stratum a contains stratum b."""
        return self.key(b) in self._descendants[self.key(a)]

    def leq(self, a, b):
        return self.geq(b, a)

    def epsilon(self, a, b):
        a, b = self.key(a), self.key(b)
        if self.adjacent(a, b):
            if self.level[a] < self.level[b]:
                return 1
            return -1
        return 0

    def wedge_key(self, a, b):
        """Key of the unique maximal common lower vertex, or None."""
        a, b = self.key(a), self.key(b)
        if a > b:
            a, b = b, a
        cached = self._wedge_cache.get((a, b), _UNSET)
        if cached is not _UNSET:
            return cached
        common = self._descendants[a] & self._descendants[b]
        if not common:
            out = None
        else:
            best = min(common, key=lambda k: (self.level[k], k))
            out = best if all(self.geq(best, c) for c in common) else None
        self._wedge_cache[(a, b)] = out
        return out

    def wedge_tuple(self, keys):
        """Iterated wedge of a sequence of vertex keys, or None."""
        keys = list(keys)
        acc = keys[0]
        for k in keys[1:]:
            acc = self.wedge_key(acc, k)
            if acc is None:
                return None
        return acc

    def top(self):
        """The unique level-0 vertex."""
        tops = self.levels(0)
        if len(tops) != 1:
            raise ShapeError("graph has no unique level-0 vertex")
        return tops[0]


class ArrangementGraph(AdmissibleGraph):
    """AdmissibleGraph plus the geometry: Vertex objects keyed by their
    maximal id tuples."""

    def __init__(self, arrangement, vertices):
        self.arrangement = arrangement
        self.vertex_by_key = {v.id: v for v in vertices}
        super().__init__({v.id: v.codim for v in vertices},
                         _containment_edges(vertices))

    def vertex(self, key):
        if isinstance(key, Vertex):
            return key
        return self.vertex_by_key[tuple(key)]

    def is_central(self):
        return self.arrangement.is_central()

    def __repr__(self):
        return f"ArrangementGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


def _containment_edges(vertices):
    edges = []
    for a in vertices:
        for b in vertices:
            if a.codim + 1 == b.codim and set(a.id) <= set(b.id):
                edges.append((a.id, b.id))
    return edges


def build_graph(arrangement: Arrangement) -> ArrangementGraph:
    """Enumerate all nonempty intersections of hyperplanes by breadth-first
    closure, deduplicated by the canonical equation row space."""
    n = arrangement.ambient_dim
    empty = Matrix(0, n + 1, ())
    seen = {empty.entries: (empty, 0)}
    frontier = [empty]
    while frontier:
        nxt = []
        for eqs in frontier:
            for h in arrangement.hyperplanes:
                canon = _canonicalize(_stack_row(eqs, h.equation_row()), n)
                if canon is None:
                    continue
                mat, codim = canon
                if mat.entries not in seen:
                    seen[mat.entries] = (mat, codim)
                    nxt.append(mat)
        frontier = nxt
    vertices = []
    for mat, codim in seen.values():
        ids = [j for j in range(1, arrangement.size + 1)
               if _canonicalize(_stack_row(mat, arrangement.hyperplane(j).equation_row()), n)
               == (mat, codim)]
        vertices.append(Vertex(ids, codim, mat))
    return ArrangementGraph(arrangement, vertices)


def wedge(g: AdmissibleGraph, a, b):
    """The intersection vertex a ^ b, or None when the closures miss."""
    k = g.wedge_key(a, b)
    if k is None:
        return None
    return g.vertex(k) if isinstance(g, ArrangementGraph) else k


def leq(g: AdmissibleGraph, a, b):
    return g.leq(a, b)


def epsilon(g: AdmissibleGraph, a, b):
    return g.epsilon(a, b)


class TruncatedGraph:
    """The level-n truncation: vertices of level <= n, inherited edges,
    plus one loop (a, a)^b per pair a > b with level(a) = n.

    Keeps the full graph around: the defining relations of level-n quivers
    read the adjacency of levels n+1 and n+2."""

    def __init__(self, full: AdmissibleGraph, n):
        self.full = full
        self.n = n
        self.level = {v: l for v, l in full.level.items() if l <= n}
        self.vertices = tuple(v for v in full.vertices if full.level[v] <= n)
        self.edges = {e for e in full.edges
                      if all(full.level[v] <= n for v in e)}
        self.loops = tuple((a, b) for a in full.levels(n) for b in full.down(a))

    def key(self, v):
        return self.full.key(v)

    def adjacent(self, a, b):
        return frozenset((self.key(a), self.key(b))) in self.edges

    def epsilon(self, a, b):
        return self.full.epsilon(a, b)

    def down(self, v):
        return [w for w in self.full.down(v) if self.full.level[w] <= self.n]

    def up(self, v):
        return self.full.up(v)

    def levels(self, k):
        return [v for v in self.vertices if self.level[v] == k]

    def has_loop(self, at, via):
        return (at, via) in set(self.loops)

    def __repr__(self):
        return (f"TruncatedGraph(level {self.n}: {len(self.vertices)} vertices, "
                f"{len(self.edges)} edges, {len(self.loops)} loops)")


def truncated_graph(g: AdmissibleGraph, n) -> TruncatedGraph:
    if not 0 <= n <= max(g.max_level, 0):
        raise ShapeError(f"truncation level {n} out of range 0..{g.max_level}")
    return TruncatedGraph(g, n)


class SpecializationGraph:
    """Vertices of the base graph merged along the specialization
    equivalence at a fixed vertex of a central arrangement."""

    def __init__(self, base_vertex, classes, graph):
        self.base_vertex = base_vertex
        self.classes = classes          # class key (tuple of member ids) -> member ids
        self.graph = graph              # AdmissibleGraph on class keys

    def class_of(self, member_key):
        for ck, members in self.classes.items():
            if member_key in members:
                return ck
        raise KeyError(member_key)


def specialization_graph(g: ArrangementGraph, alpha) -> SpecializationGraph:
    if not g.is_central():
        raise UnsupportedError("specialization requires a central arrangement")
    alpha = g.vertex(g.key(alpha))
    n = g.arrangement.ambient_dim

    def signature(beta):
        v = g.vertex(beta)
        inter = _canonicalize(alpha.equations.vstack(v.equations), n)
        upset = frozenset(d for d in g.vertices if g.geq(d, alpha.id) and g.geq(d, beta))
        return (inter[0].entries, upset)

    groups = {}
    for bk in g.vertices:
        groups.setdefault(signature(bk), []).append(bk)
    classes = {}
    levels = {}
    for members in groups.values():
        members = tuple(sorted(members))
        ck = members
        ls = {g.level[m] for m in members}
        if len(ls) != 1:
            raise UnsupportedError("specialization classes mix codimensions")
        classes[ck] = members
        levels[ck] = ls.pop()
    keys = list(classes)
    edges = []
    for a in keys:
        for b in keys:
            if levels[a] + 1 == levels[b] and any(
                    g.adjacent(x, y) for x in classes[a] for y in classes[b]):
                edges.append((a, b))
    return SpecializationGraph(alpha, classes, AdmissibleGraph(levels, edges))


def discriminantal(weights):
    """The arrangement C_{1,N}, N = sum of weights: hyperplanes t_i = 0
    for 1 <= i <= N and t_i - t_j = 0 for i < j.  Returns the arrangement
    and the map sending each coordinate to its root index (1-based)."""
    weights = list(weights)
    if not weights:
        raise ShapeError("empty weight list")
    if any(k < 0 for k in weights):
        raise ShapeError("weights must be nonnegative")
    n = sum(weights)
    hyps = []
    for i in range(n):
        normal = [Q0] * n
        normal[i] = Q1
        hyps.append(Hyperplane(0, normal))
    for i in range(n):
        for j in range(i + 1, n):
            normal = [Q0] * n
            normal[i] = Q1
            normal[j] = -Q1
            hyps.append(Hyperplane(0, normal))
    pi = {}
    coord = 1
    for root_index, k in enumerate(weights, start=1):
        for _ in range(k):
            pi[coord] = root_index
            coord += 1
    return Arrangement(n, hyps), pi


def verify_graph_properties(g: AdmissibleGraph):
    """Re-verify the defining properties of an admissible graph; raises on
    violation of (i)-(iii), warns on the opportunistic part of (iv)."""
    g.top()
    for e in g.edges:
        a, b = tuple(e)
        if abs(g.level[a] - g.level[b]) != 1:
            raise ShapeError(f"edge {a},{b} violates the level gap")
    for a in g.vertices:
        for b in g.vertices:
            common = [c for c in g.vertices if g.geq(a, c) and g.geq(b, c)]
            if not common:
                continue
            w = g.wedge_key(a, b)
            if w is None or not all(g.geq(w, c) for c in common):
                raise ShapeError(f"no unique maximal intersection for {a}, {b}")
            if g.level[w] > g.level[a] + g.level[b]:
                raise ShapeError(f"wedge level bound fails at {a}, {b}")
            bound = g.level[a] + g.level[b] - g.level[w]
            upper = [d for d in g.vertices if g.geq(d, a) and g.geq(d, b)]
            for d in upper:
                if g.level[d] > bound:
                    raise ShapeError(f"upper-set level bound fails at {a}, {b}, {d}")
            tight = [d for d in upper if g.level[d] == bound]
            if tight:
                minimal = [d for d in tight if all(g.geq(e, d) for e in upper)]
                if len(minimal) != 1:
                    warnings.warn(f"minimal upper element not unique for {a}, {b}")
    if isinstance(g, ArrangementGraph):
        n = g.arrangement.ambient_dim
        for v in g.vertex_by_key.values():
            for j in range(1, g.arrangement.size + 1):
                row = g.arrangement.hyperplane(j).equation_row()
                contains = _canonicalize(_stack_row(v.equations, row), n) == \
                    (v.equations, v.codim)
                if contains != (j in v.id):
                    raise ShapeError(f"id of {v.id} is not the maximal containment set")


# -- text format ----------------------------------------------------------------

def parse_arrangement(text, path=None) -> Arrangement:
    """Parse the .arr format: a `dim N` line, then `H c0 c1 ... cN` lines;
    `#` starts a comment."""
    dim = None
    hyps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dim":
            if dim is not None:
                raise ParseError("duplicate dim line", path, lineno)
            try:
                dim = int(parts[1])
            except (IndexError, ValueError):
                raise ParseError("malformed dim line", path, lineno)
        elif parts[0] == "H":
            if dim is None:
                raise ParseError("H line before dim line", path, lineno)
            if len(parts) != dim + 2:
                raise ParseError(f"expected {dim + 1} coefficients", path, lineno)
            try:
                coeffs = [Fraction(p) for p in parts[1:]]
            except ValueError:
                raise ParseError("bad rational", path, lineno)
            try:
                hyps.append(Hyperplane(coeffs[0], coeffs[1:]))
            except ShapeError as exc:
                raise ParseError(str(exc), path, lineno)
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", path, lineno)
    if dim is None:
        raise ParseError("missing dim line", path)
    try:
        return Arrangement(dim, hyps)
    except ShapeError as exc:
        raise ParseError(str(exc), path)


def format_arrangement(arr: Arrangement) -> str:
    lines = [f"dim {arr.ambient_dim}"]
    for h in arr.hyperplanes:
        lines.append("H " + " ".join(str(x) for x in (h.constant,) + h.normal))
    return "\n".join(lines) + "\n"


def format_vertex_key(key) -> str:
    return "(" + ",".join(str(j) for j in key) + ")"


def parse_vertex_key(text):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"bad vertex reference {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return ()
    try:
        return tuple(int(p) for p in inner.split(","))
    except ValueError:
        raise ParseError(f"bad vertex reference {text!r}")
