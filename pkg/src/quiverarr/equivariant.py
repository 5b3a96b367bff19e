"""Finite symmetry groups of an arrangement and the invariant-subcomplex
cohomology endpoints.

A group element is an affine map preserving the arrangement; it permutes
hyperplanes, hence strata, hence flag and Orlik-Solomon generators (the
latter pick up the skew-symmetry sign when re-sorted).  Tensoring with a
representation on the level-zero space gives chain automorphisms of the
C+ complexes of the direct-image quivers, and averaging against the
determinant character projects onto the invariants of the twisted
complex."""

from __future__ import annotations

from fractions import Fraction

from .arrangement import ArrangementGraph, format_vertex_key
from .cohomology import CohomologyReport, _betti_map, smallness_status
from .errors import (NotFiniteError, ParseError, ShapeError, SymmetryError,
                     UnsupportedError)
from .functors import j0_shriek, j0_star, macpherson
from .linalg import (ChainComplex, ChainMap, Matrix, Q0, Q1, det,
                     image_complex, rank, solve_matrix)
from .oscomplex import flag_space, os_space
from .quiver import LevelQuiver, Quiver, c_plus


class AffineMap:
    """z -> linear z + translation with invertible linear part."""

    __slots__ = ("linear", "translation")

    def __init__(self, linear: Matrix, translation=None):
        if linear.rows != linear.cols:
            raise ShapeError("linear part must be square")
        if translation is None:
            translation = tuple([Q0] * linear.rows)
        translation = tuple(Fraction(x) for x in translation)
        if len(translation) != linear.rows:
            raise ShapeError("translation length mismatch")
        if linear.rows and rank(linear) != linear.rows:
            raise ShapeError("linear part must be invertible")
        self.linear = linear
        self.translation = translation

    def compose(self, other):
        """self after other."""
        lin = self.linear * other.linear
        tr = tuple(x + y for x, y in zip(self.linear.apply(other.translation),
                                         self.translation))
        return AffineMap(lin, tr)

    def is_identity(self):
        return (self.linear == Matrix.identity(self.linear.rows)
                and all(x == 0 for x in self.translation))

    def key(self):
        return (self.linear.entries, self.translation)

    @staticmethod
    def identity(n):
        return AffineMap(Matrix.identity(n))

    @staticmethod
    def permutation(perm):
        """Coordinate permutation z_i -> z_{perm^{-1}(i)}; perm is a tuple
        with perm[i] = image of coordinate i+1 (1-based values)."""
        n = len(perm)
        rows = [[Q0] * n for _ in range(n)]
        for i in range(n):
            rows[perm[i] - 1][i] = Q1
        return AffineMap(Matrix.from_rows(rows, cols=n))


class GroupAction:
    """A finite group of affine symmetries: closed element list with the
    identity first, induced hyperplane permutations, multiplication table."""

    def __init__(self, arrangement, elements, hyperplane_perm, table):
        self.arrangement = arrangement
        self.elements = list(elements)
        self.hyperplane_perm = [dict(p) for p in hyperplane_perm]
        self.table = [list(r) for r in table]
        if not self.elements or not self.elements[0].is_identity():
            raise SymmetryError("identity must come first")

    @property
    def order(self):
        return len(self.elements)

    def perm(self, gi, j):
        return self.hyperplane_perm[gi][j]

    def vertex_image(self, gi, key):
        return tuple(sorted(self.perm(gi, j) for j in key))

    def mul(self, gi, gj):
        return self.table[gi][gj]


def _hyperplane_image(arrangement, amap: AffineMap, j):
    """Index of the image hyperplane T(H_j), or None."""
    h = arrangement.hyperplane(j)
    n = arrangement.ambient_dim
    linv = solve_matrix(amap.linear, Matrix.identity(n))
    row = Matrix(1, n, h.normal) * linv
    normal = row.row(0)
    const = h.constant - sum(x * t for x, t in zip(normal, amap.translation))
    from .arrangement import Hyperplane
    img = Hyperplane(const, normal)
    for k in range(1, arrangement.size + 1):
        if arrangement.hyperplane(k) == img:
            return k
    return None


def build_action(arrangement, maps, bound=4096) -> GroupAction:
    """Close the given affine maps under composition, verify the
    arrangement is preserved, and compute the induced permutations."""
    n = arrangement.ambient_dim
    elements = [AffineMap.identity(n)]
    index = {elements[0].key(): 0}
    frontier = []
    for m in maps:
        if m.key() not in index:
            index[m.key()] = len(elements)
            elements.append(m)
            frontier.append(m)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(elements):
                for c in (a.compose(b), b.compose(a)):
                    if c.key() not in index:
                        if len(elements) >= bound:
                            raise NotFiniteError(f"group closure exceeds {bound}")
                        index[c.key()] = len(elements)
                        elements.append(c)
                        nxt.append(c)
        frontier = nxt
    perms = []
    for e in elements:
        p = {}
        for j in range(1, arrangement.size + 1):
            img = _hyperplane_image(arrangement, e, j)
            if img is None:
                raise SymmetryError(f"map does not preserve hyperplane {j}")
            p[j] = img
        if sorted(p.values()) != list(range(1, arrangement.size + 1)):
            raise SymmetryError("hyperplane images are not a permutation")
        perms.append(p)
    table = [[index[a.compose(b).key()] for b in elements] for a in elements]
    return GroupAction(arrangement, elements, perms, table)


def det_character(act: GroupAction):
    """Determinant of the linear part, per element; multiplicative."""
    return {gi: det(e.linear) for gi, e in enumerate(act.elements)}


class EquivariantLevelZero:
    """A level-zero quiver with a compatible representation on its space:
    rho(g) B^j = B^{g(j)} rho(g)."""

    def __init__(self, graph: ArrangementGraph, base: LevelQuiver, rho,
                 action: GroupAction):
        self.graph = graph
        self.base = base
        self.action = action
        top = graph.top()
        dim = base.dim(top)
        self.rho = {int(g): m for g, m in rho.items()}
        for gi in range(action.order):
            if gi not in self.rho:
                raise ShapeError(f"missing representation matrix for element {gi}")
            m = self.rho[gi]
            if (m.rows, m.cols) != (dim, dim):
                raise ShapeError("representation matrix shape mismatch")
        for gi in range(action.order):
            for gj in range(action.order):
                if self.rho[gi] * self.rho[gj] != self.rho[action.mul(gi, gj)]:
                    raise SymmetryError("rho is not a representation")
        for gi in range(action.order):
            for j in range(1, graph.arrangement.size + 1):
                lhs = self.rho[gi] * base.loop(top, (j,))
                rhs = base.loop(top, (action.perm(gi, j),)) * self.rho[gi]
                if lhs != rhs:
                    raise SymmetryError(f"rho does not intertwine the loop at {j}")

    @staticmethod
    def trivial(graph, base, action):
        top = graph.top()
        ident = Matrix.identity(base.dim(top))
        return EquivariantLevelZero(graph, base,
                                    {gi: ident for gi in range(action.order)},
                                    action)


def _sort_sign(tup):
    items = list(tup)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return tuple(items), sign


FUNCTORS = ("star", "shriek", "macpherson")


def _functor_quiver(graph, eq: EquivariantLevelZero, functor):
    if functor == "star":
        return j0_star(graph, eq.base), None
    if functor == "shriek":
        return j0_shriek(graph, eq.base), None
    if functor == "macpherson":
        mac = macpherson(graph, eq.base)
        return mac.quiver, mac
    raise ShapeError(f"unknown functor {functor!r}; expected one of {FUNCTORS}")


def _degree_action_star(graph, eq, gi, p):
    """Action matrix on the degree-p piece of C+(j0_star): permuted and
    re-sorted OS generators tensored with rho."""
    osd = os_space(graph, p)
    act = eq.action
    dw = eq.rho[gi].rows
    keys = sorted(k for k in graph.vertices if graph.level[k] == p)
    offsets = {}
    pos = 0
    for k in keys:
        offsets[k] = pos
        pos += osd.spaces[k].dim * dw
    dim = pos
    rows = [[Q0] * dim for _ in range(dim)]
    for k in keys:
        space = osd.spaces[k]
        for si, t in enumerate(space.basis):
            img = tuple(act.perm(gi, j) for j in t)
            srt, sign = _sort_sign(img)
            k2 = act.vertex_image(gi, k)
            tgt_space = osd.spaces[k2]
            coords = tgt_space.coords_of_generator(srt)
            for ti, c in enumerate(coords):
                if c == 0:
                    continue
                for a_ in range(dw):
                    for b_ in range(dw):
                        val = eq.rho[gi][a_, b_]
                        if val:
                            rows[offsets[k2] + ti * dw + a_][
                                offsets[k] + si * dw + b_] += sign * c * val
    return Matrix.from_rows(rows, cols=dim)


def _degree_action_shriek(graph, eq, gi, p):
    """Action on the degree-p piece of C+(j0_shriek): permuted flags (no
    sign) tensored with rho."""
    act = eq.action
    dw = eq.rho[gi].rows
    keys = sorted(k for k in graph.vertices if graph.level[k] == p)
    fb = {k: flag_space(graph, k) for k in keys}
    offsets = {}
    pos = 0
    for k in keys:
        offsets[k] = pos
        pos += fb[k].dim * dw
    dim = pos
    rows = [[Q0] * dim for _ in range(dim)]
    for k in keys:
        for si, f in enumerate(fb[k].basis):
            img = tuple(act.vertex_image(gi, v) for v in f)
            k2 = img[-1]
            coords = fb[k2].expand(img)
            for ti, c in enumerate(coords):
                if c == 0:
                    continue
                for a_ in range(dw):
                    for b_ in range(dw):
                        val = eq.rho[gi][a_, b_]
                        if val:
                            rows[offsets[k2] + ti * dw + a_][
                                offsets[k] + si * dw + b_] += c * val
    return Matrix.from_rows(rows, cols=dim)


def equivariant_c_plus(act: GroupAction, eq: EquivariantLevelZero, functor):
    """C+ of the chosen direct image together with the chain automorphism
    of every group element.  Returns (complex, list over elements of lists
    of per-degree matrices)."""
    graph = eq.graph
    quiver, mac = _functor_quiver(graph, eq, functor)
    comp = c_plus(quiver)
    degs = list(range(len(comp.dims)))
    autos = []
    for gi in range(act.order):
        per_degree = []
        for p in degs:
            if functor == "star":
                m = _degree_action_star(graph, eq, gi, p)
            elif functor == "shriek":
                m = _degree_action_shriek(graph, eq, gi, p)
            else:
                star_m = _degree_action_star(graph, eq, gi, p)
                inc = _degree_inclusion(graph, mac, p)
                sol = solve_matrix(inc, star_m * inc)
                if sol is None:
                    raise SymmetryError("group action does not preserve the image")
                m = sol
            per_degree.append(m)
        autos.append(per_degree)
    for gi in range(act.order):
        for p in range(len(comp.dims) - 1):
            if autos[gi][p + 1] * comp.differentials[p] != \
                    comp.differentials[p] * autos[gi][p]:
                raise SymmetryError("action does not commute with the differential")
    for gi in range(act.order):
        for gj in range(act.order):
            gk = act.mul(gi, gj)
            for p in degs:
                if autos[gi][p] * autos[gj][p] != autos[gk][p]:
                    raise SymmetryError("chain maps do not compose as the group")
    return comp, autos


def _degree_inclusion(graph, mac, p):
    from .linalg import block_diag
    keys = sorted(k for k in graph.vertices if graph.level[k] == p)
    return block_diag([mac.witness[k]["matrix"] for k in keys])


def equivariant_cohomology(act: GroupAction, eq: EquivariantLevelZero,
                           functor, twist_by_det=False) -> CohomologyReport:
    """Betti numbers of the invariant subcomplex of C+ (optionally
    twisted by the determinant character), realized as the image of the
    Reynolds projector."""
    graph = eq.graph
    if not graph.is_central():
        raise UnsupportedError("endpoint requires a central arrangement")
    comp, autos = equivariant_c_plus(act, eq, functor)
    chars = det_character(act) if twist_by_det else {gi: Q1 for gi in range(act.order)}
    inv_order = Fraction(1, act.order)
    projectors = []
    for p in range(len(comp.dims)):
        acc = Matrix.zero(comp.dims[p], comp.dims[p])
        for gi in range(act.order):
            acc = acc + autos[gi][p].scale(chars[gi])
        projectors.append(acc.scale(inv_order))
    for p, pr in enumerate(projectors):
        if pr * pr != pr:
            raise SymmetryError("Reynolds projector is not idempotent")
    proj_map = ChainMap(comp, comp, projectors)   # validates d P = P d
    invariants = image_complex(proj_map)
    n = graph.arrangement.ambient_dim
    model = {"star": "local_system", "shriek": "flag",
             "macpherson": "intersection"}[functor]
    hyps = [("central arrangement", "verified"),
            ("equivariant structure", "verified"),
            ("maps close to zero", smallness_status(graph, eq.base))]
    note = f"invariants of (C+ tensor {'det' if twist_by_det else 'trivial'})"
    return CohomologyReport(model, _betti_map(invariants, 0, n), hyps, note)


# -- text format (.grp) -----------------------------------------------------------------

def parse_group(text, arrangement, path=None) -> GroupAction:
    """Parse the .grp format: blocks starting `g`, then N rows of the
    linear matrix and one translation row; identity required.  The loader
    closes and verifies the action."""
    n = arrangement.ambient_dim
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    maps = []
    i = 0
    while i < len(lines):
        lineno, ln = lines[i]
        if ln != "g":
            raise ParseError("expected a `g` block header", path, lineno)
        rows = []
        try:
            for r in range(n):
                rows.append([Fraction(x) for x in lines[i + 1 + r][1].split()])
            translation = [Fraction(x) for x in lines[i + 1 + n][1].split()]
        except (IndexError, ValueError):
            raise ParseError("malformed group block", path, lineno)
        if any(len(r) != n for r in rows) or len(translation) != n:
            raise ParseError("group block has wrong width", path, lineno)
        try:
            maps.append(AffineMap(Matrix.from_rows(rows, cols=n), translation))
        except ShapeError as exc:
            raise ParseError(str(exc), path, lineno)
        i += n + 2
    if not any(m.is_identity() for m in maps):
        raise ParseError("identity element required", path)
    try:
        return build_action(arrangement, maps)
    except (SymmetryError, NotFiniteError) as exc:
        raise ParseError(str(exc), path)


def format_group(act: GroupAction) -> str:
    out = []
    for e in act.elements:
        out.append("g")
        for i in range(e.linear.rows):
            out.append(" ".join(str(x) for x in e.linear.row(i)))
        out.append(" ".join(str(x) for x in e.translation))
    return "\n".join(out) + "\n"
