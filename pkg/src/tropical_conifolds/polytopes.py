"""Integral polytopes, face lattices, tangent wedges, normal fans, Newton
polytopes and support minima (exact, ambient dimension <= 3).

Polytopes may be marked as truncations of unbounded polyhedra: vertices carry
an ``artificial`` flag when they come from a bounding box rather than from the
geometry.  Only local computations (tangent wedges at real vertices, normal
cones, support minima) are meaningful for truncated polytopes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .lattice import (Cone, Fan, dot, is_zero, make_primitive, mat_from_cols,
                      matvec, rank, saturation_basis, solve_rational, vadd,
                      vneg, vsub, integer_kernel, transpose)


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


class IntegralPolytope:
    """Convex polytope with integer vertices, stored by its vertex list.

    ``artificial`` is an optional set of vertex indices marking bounding-box
    vertices of a truncated unbounded polyhedron.  ``dual_space`` tags whether
    the polytope lives in M or in the dual lattice M* (to prevent silent
    mixing by the Legendre-transform machinery).
    """

    def __init__(self, vertices, artificial=None, dual_space=False, check=True):
        self.vertices = tuple(tuple(v) for v in vertices)
        if not self.vertices:
            raise ValueError("empty polytope")
        self.dim_ambient = len(self.vertices[0])
        self.artificial = frozenset(artificial or ())
        self.dual_space = bool(dual_space)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertices")
        self._faces = None
        self._facet_data = None
        self._span = None
        if check:
            self._check_extreme()

    def __repr__(self):
        return "IntegralPolytope(%d vertices, dim %d)" % (len(self.vertices), self.dim)

    # -- span handling -----------------------------------------------------

    def _span_coords(self):
        """(origin, basis, coords): integer coordinates of the vertices in a
        saturated basis of the affine span."""
        if self._span is not None:
            return self._span
        o = self.vertices[0]
        diffs = [vsub(v, o) for v in self.vertices[1:]]
        basis = saturation_basis(diffs) if diffs else []
        if not basis:
            coords = [() for _ in self.vertices]
            self._span = (o, (), tuple(coords))
            return self._span
        B = mat_from_cols(basis)  # n x d
        coords = []
        for v in self.vertices:
            sol = solve_rational(B, vsub(v, o))
            coords.append(tuple(int(x) for x in sol))
        self._span = (o, tuple(basis), tuple(coords))
        return self._span

    @property
    def dim(self):
        return len(self._span_coords()[1])

    # -- facets ------------------------------------------------------------

    def _facets(self):
        """List of (vertex index frozenset, inner normal in span coords)."""
        if self._facet_data is not None:
            return self._facet_data
        o, basis, pts = self._span_coords()
        d = self.dim
        n = len(pts)
        facets = []
        if d == 0:
            facets = []
        elif d == 1:
            xs = [p[0] for p in pts]
            lo = xs.index(min(xs))
            hi = xs.index(max(xs))
            facets = [(frozenset([lo]), (1,)), (frozenset([hi]), (-1,))]
        elif d == 2:
            for i, j in itertools.combinations(range(n), 2):
                e = vsub(pts[j], pts[i])
                nrm = (-e[1], e[0])
                vals = [dot(nrm, vsub(pts[k], pts[i])) for k in range(n)]
                if all(x >= 0 for x in vals):
                    pass
                elif all(x <= 0 for x in vals):
                    nrm = vneg(nrm)
                    vals = [-x for x in vals]
                else:
                    continue
                idx = frozenset(k for k in range(n) if vals[k] == 0)
                nrm = make_primitive(nrm)
                if (idx, nrm) not in facets:
                    facets.append((idx, nrm))
        elif d == 3:
            seen = set()
            for combo in itertools.combinations(range(n), 3):
                i, j, k = combo
                nrm = _cross(vsub(pts[j], pts[i]), vsub(pts[k], pts[i]))
                if is_zero(nrm):
                    continue
                vals = [dot(nrm, vsub(pts[m], pts[i])) for m in range(n)]
                if all(x >= 0 for x in vals):
                    pass
                elif all(x <= 0 for x in vals):
                    nrm = vneg(nrm)
                    vals = [-x for x in vals]
                else:
                    continue
                idx = frozenset(m for m in range(n) if vals[m] == 0)
                nrm = make_primitive(nrm)
                if (idx, nrm) not in seen:
                    seen.add((idx, nrm))
            facets = sorted(seen, key=lambda t: (sorted(t[0]), t[1]))
        else:
            raise ValueError("dimension > 3 not supported")
        self._facet_data = facets
        return facets

    def _check_extreme(self):
        d = self.dim
        if d == 0:
            return
        facets = self._facets()
        for i in range(len(self.vertices)):
            active = [nrm for idx, nrm in facets if i in idx]
            if rank(active) < d:
                raise ValueError("vertex %r is not an extreme point" % (self.vertices[i],))

    # -- face lattice ------------------------------------------------------

    def face_lattice(self):
        """All faces as a list of (dim, frozenset of vertex indices), from the
        empty face (dim -1) up to the polytope itself."""
        if self._faces is not None:
            return self._faces
        d = self.dim
        n = len(self.vertices)
        faces = {(-1): {frozenset()}, d: {frozenset(range(n))}}
        if d >= 1:
            faces[0] = {frozenset([i]) for i in range(n)}
        facets = self._facets()
        if d >= 1:
            faces[d - 1] = {idx for idx, _ in facets}
        if d == 3:
            edges = set()
            for (ia, _), (ib, _) in itertools.combinations(facets, 2):
                common = ia & ib
                if len(common) == 2:
                    edges.add(common)
            faces[1] = edges
        out = []
        for dim in sorted(faces):
            for idx in sorted(faces[dim], key=sorted):
                out.append((dim, idx))
        self._faces = out
        return out

    def faces_of_dim(self, k):
        return [idx for dim, idx in self.face_lattice() if dim == k]

    def face_vertices(self, idx):
        return [self.vertices[i] for i in sorted(idx)]

    def edges_at_vertex(self, i):
        """Indices j such that [i, j] is an edge (1-face)."""
        d = self.dim
        if d == 1:
            return [j for j in range(len(self.vertices)) if j != i]
        if d == 2:
            out = []
            for idx, _ in self._facets():
                if i in idx:
                    out.extend(j for j in idx if j != i)
            return sorted(set(out))
        out = []
        for e in self.faces_of_dim(1):
            if i in e:
                out.extend(j for j in e if j != i)
        return sorted(set(out))

    def tangent_wedge(self, i):
        """Cone of primitive edge directions at vertex index i (ambient coords)."""
        if i < 0 or i >= len(self.vertices):
            raise ValueError("not a vertex index")
        v = self.vertices[i]
        gens = [make_primitive(vsub(self.vertices[j], v)) for j in self.edges_at_vertex(i)]
        return Cone(gens, self.dim_ambient)

    def real_vertex_indices(self):
        return [i for i in range(len(self.vertices)) if i not in self.artificial]

    # -- support -----------------------------------------------------------

    def support_min(self, y):
        """-inf over (real) vertices of <x, y>."""
        return -min(dot(v, y) for i, v in enumerate(self.vertices)
                    if i not in self.artificial)

    def normal_fan(self):
        """Complete fan of inner normal cones of the (real) vertices.

        Lives in the dual lattice.  For truncated polytopes the fan is the
        normal fan of the underlying unbounded polyhedron and is not complete.
        """
        if self.dim != self.dim_ambient:
            raise ValueError("normal fan requires a full-dimensional polytope")
        cones = []
        for i in self.real_vertex_indices():
            w = self.tangent_wedge(i)
            gens = _dual_cone_generators(w)
            cones.append(Cone(gens, self.dim_ambient))
        return Fan(cones, complete=None if self.artificial else True)

    def normal_cone_of_vertex(self, i):
        return Cone(_dual_cone_generators(self.tangent_wedge(i)), self.dim_ambient)

    def contains_point(self, p):
        o, basis, pts = self._span_coords()
        # p must lie in the affine span
        if basis:
            B = mat_from_cols(basis)
            sol = solve_rational(B, vsub(p, o))
            if sol is None:
                return False
            q = tuple(sol)
        else:
            return tuple(p) == o
        for idx, nrm in self._facets():
            i0 = min(idx)
            if dot(nrm, vsub(q, pts[i0])) < 0:
                return False
        return True

    def translate(self, t):
        return IntegralPolytope([vadd(v, t) for v in self.vertices],
                                artificial=self.artificial,
                                dual_space=self.dual_space, check=False)


def _dual_cone_generators(cone):
    """Generators of the dual cone {y : <y,x> >= 0 for x in cone} of a
    full-dimensional cone (dim <= 3)."""
    ineqs, eqs = cone.hrep()
    if eqs:
        raise ValueError("dual cone of a non-full-dimensional cone")
    return list(ineqs)


def polytopes_equal_up_to_translation(P, Q):
    if len(P.vertices) != len(Q.vertices):
        return False
    sp = sorted(P.vertices)
    sq = sorted(Q.vertices)
    t = vsub(sq[0], sp[0])
    return all(vadd(v, t) == w for v, w in zip(sp, sq))


# ---------------------------------------------------------------------------
# PL functions on fans


class PLFunctionOnFan:
    """Integral PL function given by its values on the primitive ray generators
    of a fan; on each maximal cone the values must extend to a single linear
    functional m_C."""

    def __init__(self, fan, ray_values):
        self.fan = fan
        self.ray_values = {tuple(r): v for r, v in ray_values.items()}
        for r in fan.rays():
            if tuple(r) not in self.ray_values:
                raise ValueError("missing value for ray %r" % (r,))
        self._m = {}
        for c in fan.maximal_cones:
            self._m[c.key()] = self._linearize(c)

    def _linearize(self, cone):
        gens = cone.generators
        vals = [self.ray_values[g] for g in gens]
        sol = solve_rational(tuple(gens), vals)
        if sol is None:
            raise ValueError("values on cone %r do not extend to a linear functional" % (cone,))
        return tuple(sol)

    def m_of_cone(self, cone):
        return self._m[cone.key()]

    def value(self, p):
        c = self.fan.cone_containing(p)
        if c is None:
            raise ValueError("point %r outside the fan support" % (p,))
        return dot(self._m[c.key()], p)

    def is_integral(self):
        return all(Fraction(x).denominator == 1
                   for m in self._m.values() for x in m)


def wall_kink(plf, coneA, coneB):
    """Convexity jump h across the shared facet of two maximal cones.

    h > 0 on every wall certifies strict convexity.  Computed as
    <m_A - m_B, u> where u is a lattice vector on the A-side at lattice
    distance 1 from the wall.
    """
    inter = coneA.intersect(coneB)
    if inter.dim != coneA.dim - 1:
        raise ValueError("cones do not share a facet")
    wall_span = list(inter.generators)
    if wall_span:
        eqs_all = list(integer_kernel(tuple(wall_span)))
    else:
        # wall is the origin (one-dimensional fan)
        eqs_all = [tuple(r) for r in _identity_rows(coneA.dim_ambient)]
    # primitive functional vanishing on wall, positive on A
    nrm = None
    for q in eqs_all:
        s = [dot(q, g) for g in coneA.generators]
        if any(x != 0 for x in s):
            nrm = q if all(x >= 0 for x in s) else vneg(q)
            break
    if nrm is None:
        raise ValueError("degenerate wall")
    # lattice vector u with <nrm, u> = 1
    u = tuple(_bezout(list(nrm)))
    mA = plf.m_of_cone(coneA)
    mB = plf.m_of_cone(coneB)
    h = dot(vsub(mA, mB), u)
    return int(h) if Fraction(h).denominator == 1 else h


def _identity_rows(n):
    return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]


def _bezout(xs):
    """Integer coefficients c with sum c_i x_i = gcd(xs) = 1."""
    from math import gcd
    if len(xs) == 1:
        return [1 if xs[0] > 0 else -1]
    a, b = xs[0], xs[1]
    # extended euclid for two
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    g2 = old_r
    if len(xs) == 2:
        if g2 < 0:
            return [-old_s, -old_t]
        return [old_s, old_t]
    rest = _bezout([g2] + xs[2:])
    return [rest[0] * old_s, rest[0] * old_t] + rest[1:]


def pl_is_strictly_convex(plf):
    """Certificate dict: {'convex': bool, 'kinks': {(keyA,keyB): h}, 'first_violation': ...}"""
    fan = plf.fan
    kinks = {}
    first = None
    cones = fan.maximal_cones
    for a, b in itertools.combinations(cones, 2):
        inter = a.intersect(b)
        if inter.dim == a.dim - 1:
            h = wall_kink(plf, a, b)
            kinks[(a.key(), b.key())] = h
            if h <= 0 and first is None:
                first = (a, b, h)
    return {"convex": first is None, "kinks": kinks, "first_violation": first}


def newton_polytope(plf, box=None):
    """Newton polytope {x : <x,y> >= -phi(y)} of a convex PL function.

    Returns (polytope, vertex_cone_map) where vertex_cone_map maps a vertex
    (tuple) to the maximal cone it is dual to.  For incomplete fans the result
    is a truncated polytope with artificial vertices on the given bounding box
    (an automatic box is chosen if none is given).  Vertices -m_C must be
    integral; non-integral linearizations raise (rescale the function first).
    """
    fan = plf.fan
    n = fan.dim_ambient
    # ray constraints <x, g> >= -phi(g)
    constraints = [(tuple(g), -plf.ray_values[tuple(g)]) for g in fan.rays()]
    verts = {}
    for c in fan.maximal_cones:
        m = plf.m_of_cone(c)
        if any(Fraction(x).denominator != 1 for x in m):
            raise ValueError("non-integral vertex; rescale the function")
        v = tuple(-int(x) for x in m)
        verts.setdefault(v, c)
    complete = fan.is_complete()
    if complete:
        P = IntegralPolytope(sorted(verts), dual_space=not_dual_default(fan))
        return P, dict(verts)
    # incomplete: truncate
    if box is None:
        big = 1
        for v in verts:
            for x in v:
                big = max(big, abs(x))
        for _, b in constraints:
            big = max(big, abs(b))
        box = 2 * big + 2
    all_cons = list(constraints)
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        all_cons.append((e, -box))
        all_cons.append((vneg(e), -box))
    pts = set()
    for combo in itertools.combinations(all_cons, n):
        A = tuple(c[0] for c in combo)
        rhs = tuple(c[1] for c in combo)  # boundary: <x,g> = bound
        sol = solve_rational(A, rhs)
        if sol is None:
            continue
        ok = True
        for g, bnd in all_cons:
            if dot(g, sol) < bnd:
                ok = False
                break
        if ok:
            pts.add(tuple(sol))
    # keep extreme points only, classify artificial
    pts = sorted(pts)
    int_pts = []
    for p in pts:
        if all(Fraction(x).denominator == 1 for x in p):
            int_pts.append(tuple(int(x) for x in p))
        else:
            raise ValueError("non-integral truncation vertex; enlarge box")
    hull = _extreme_subset(int_pts)
    artificial = set()
    for i, p in enumerate(hull):
        if p not in verts:
            artificial.add(i)
    P = IntegralPolytope(hull, artificial=artificial,
                         dual_space=not_dual_default(fan), check=False)
    return P, dict(verts)


def not_dual_default(fan):
    return True  # Newton polytopes land in the dual lattice


def _extreme_subset(pts):
    """Extreme points of a finite point set (dim <= 3), preserving order."""
    out = []
    for i, p in enumerate(pts):
        others = [q for j, q in enumerate(pts) if j != i]
        if not others or not _in_hull(p, others):
            out.append(p)
    return out


def _in_hull(p, pts):
    """Is p a convex combination of pts?  Exact, small instances only."""
    n = len(p)
    # solve sum l_i q_i = p, sum l_i = 1, l_i >= 0 by Caratheodory enumeration
    for size in range(1, n + 2):
        for combo in itertools.combinations(pts, size):
            A = [list(col) for col in zip(*combo)]
            A.append([1] * size)
            b = list(p) + [1]
            sol = solve_rational(tuple(tuple(r) for r in A), tuple(b))
            if sol is not None and all(x >= 0 for x in sol):
                return True
    return False
