"""Assembly of tropical complexes from glued lattice polytopes.

A complex is specified by cells (integral polytopes, possibly with recession
rays for unbounded local models), a global vertex label per polytope vertex
(gluing identifies faces whose label sets coincide), and a fan structure at
each vertex label (a complete-or-partial fan, an assignment of incident cells
to maximal cones, and an edge matching that pins down the chart map).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .lattice import (Cone, Fan, MatchingError, det, dot, identity,
                      make_primitive, map_from_generator_matching,
                      mat_from_cols, matvec, rank, saturation_basis,
                      solve_rational, vadd, vneg, vsub)
from .polytopes import IntegralPolytope


class AssemblyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cell geometry (bounded polytope + optional recession rays)


class CellGeometry:
    """conv(vertices) + cone(rays), dim <= 3, full-dimensional in its chart."""

    def __init__(self, vertices, rays=()):
        self.vertices = tuple(tuple(v) for v in vertices)
        self.rays = tuple(make_primitive(r) for r in rays)
        self.dim_ambient = len(self.vertices[0])
        self._faces = None
        self._facets = None

    def is_bounded(self):
        return not self.rays

    def _real_facets(self):
        """[(vertex idx frozenset, ray idx frozenset, inner normal)]"""
        if self._facets is not None:
            return self._facets
        n = self.dim_ambient
        pts = list(self.vertices)
        M = 1
        for v in self.vertices:
            M = max(M, *(abs(x) for x in v))
        M = 4 * M + 8
        aux = []
        for v in self.vertices:
            for r in self.rays:
                aux.append(vadd(v, tuple(M * x for x in r)))
        hull_pts = []
        for p in pts + aux:
            if p not in hull_pts:
                hull_pts.append(p)
        P = IntegralPolytope(hull_pts, check=False)
        if P.dim != n:
            raise AssemblyError("cell is not full-dimensional in its chart")
        out = []
        for idx, _ in P._facets():
            vs = [hull_pts[i] for i in sorted(idx)]
            nrm = _affine_hyperplane_normal(vs, n)
            if nrm is None:
                continue
            x0 = vs[0]
            vals = [dot(nrm, vsub(p, x0)) for p in hull_pts]
            if all(x >= 0 for x in vals):
                pass
            elif all(x <= 0 for x in vals):
                nrm = vneg(nrm)
            else:
                continue
            if any(dot(nrm, r) < 0 for r in self.rays):
                continue  # artificial truncation facet
            vidx = frozenset(i for i, v in enumerate(self.vertices)
                             if dot(nrm, vsub(v, x0)) == 0)
            ridx = frozenset(k for k, r in enumerate(self.rays)
                             if dot(nrm, r) == 0)
            offset = dot(nrm, x0)
            item = (vidx, ridx, nrm, offset)
            if item not in out:
                out.append(item)
        self._facets = out
        return out

    def faces(self):
        """All proper nonempty faces as (dim, vidx frozenset, ridx frozenset),
        plus the cell itself with dim == dim_ambient."""
        if self._faces is not None:
            return self._faces
        facets = self._real_facets()
        found = {}
        allv = frozenset(range(len(self.vertices)))
        allr = frozenset(range(len(self.rays)))
        for size in range(1, len(facets) + 1):
            for combo in itertools.combinations(range(len(facets)), size):
                vidx = allv
                ridx = allr
                for i in combo:
                    vidx &= facets[i][0]
                    ridx &= facets[i][1]
                if not vidx and not ridx:
                    continue
                key = (vidx, ridx)
                if key not in found:
                    found[key] = self._face_dim(vidx, ridx)
        out = [(d, v, r) for (v, r), d in found.items()]
        out.append((self.dim_ambient, allv, allr))
        self._faces = sorted(out, key=lambda t: (t[0], sorted(t[1]), sorted(t[2])))
        return self._faces

    def _face_dim(self, vidx, ridx):
        vs = [self.vertices[i] for i in sorted(vidx)]
        dirs = []
        if vs:
            for v in vs[1:]:
                dirs.append(vsub(v, vs[0]))
        dirs.extend(self.rays[k] for k in sorted(ridx))
        return rank(dirs)

    def edge_neighbors(self, i):
        """1-faces at vertex i: list of ('v', j) or ('r', k)."""
        out = []
        for d, vidx, ridx in self.faces():
            if d == 1 and i in vidx:
                for j in vidx:
                    if j != i:
                        out.append(("v", j))
                for k in ridx:
                    out.append(("r", k))
        return out

    def direction_to(self, i, nb):
        kind, j = nb
        if kind == "v":
            return make_primitive(vsub(self.vertices[j], self.vertices[i]))
        return self.rays[j]

    def barycenter(self, vidx, ridx=frozenset()):
        """Barycenter of a bounded face (Fractions); None if the face has rays."""
        if ridx:
            return None
        vs = [self.vertices[i] for i in sorted(vidx)]
        n = len(vs)
        return tuple(Fraction(sum(c), n) for c in zip(*vs))


def _affine_hyperplane_normal(pts, n):
    dirs = [vsub(p, pts[0]) for p in pts[1:]]
    if rank(dirs) != n - 1:
        return None
    from .lattice import integer_kernel
    ker = integer_kernel(tuple(dirs))
    if len(ker) != 1:
        return None
    return make_primitive(ker[0])


# ---------------------------------------------------------------------------
# gluing specification and fan structures


class GluingSpec:
    def __init__(self, dimension):
        self.dimension = dimension
        self.cells = {}  # cid -> (CellGeometry, vlabels tuple, rlabels tuple)
        self.order = []

    def add_cell(self, cid, vertices, vlabels, rays=(), rlabels=()):
        geom = CellGeometry(vertices, rays)
        vlabels = tuple(vlabels)
        rlabels = tuple(rlabels)
        if len(vlabels) != len(geom.vertices):
            raise AssemblyError("one label per vertex required")
        if len(set(vlabels)) != len(vlabels):
            raise AssemblyError("labels within a polytope must be distinct")
        if len(rlabels) != len(geom.rays):
            raise AssemblyError("one label per ray required")
        if cid in self.cells:
            raise AssemblyError("duplicate cell id %r" % (cid,))
        self.cells[cid] = (geom, vlabels, rlabels)
        self.order.append(cid)
        return self


class VertexFan:
    """Fan structure at one vertex label: the fan, the cone assigned to each
    incident cell, and the edge matching (neighbor label -> ray of the cone)."""

    def __init__(self, fan, cone_of, matching):
        self.fan = fan
        self.cone_of = dict(cone_of)        # cid -> Cone
        self.matching = {c: {k: tuple(r) for k, r in m.items()}
                         for c, m in matching.items()}


class FaceRecord:
    __slots__ = ("key", "dim", "incident", "interior", "bounded")

    def __init__(self, key, dim, incident, interior, bounded):
        self.key = key
        self.dim = dim
        self.incident = incident  # list of (cid, vidx frozenset, ridx frozenset)
        self.interior = interior
        self.bounded = bounded


class TropicalComplex:
    """Assembled complex; immutable after construction.  Use assemble()."""

    def __init__(self, dimension, cells, faces, vertex_fans, psi, boundary):
        self.dimension = dimension
        self.cells = cells            # cid -> (geom, vlabels, rlabels)
        self.faces = faces            # key -> FaceRecord
        self.vertex_fans = vertex_fans
        self.psi = psi                # (label, cid) -> matrix cell-chart -> vertex-chart
        self.boundary = boundary
        self._vertex_cells = {}
        for cid, (geom, vls, rls) in cells.items():
            for i, lb in enumerate(vls):
                self._vertex_cells.setdefault(lb, []).append((cid, i))

    # -- lookups -----------------------------------------------------------

    def cell_geom(self, cid):
        return self.cells[cid][0]

    def vertex_labels(self):
        return sorted(self._vertex_cells, key=repr)

    def cells_at_vertex(self, label):
        return list(self._vertex_cells.get(label, []))

    def vertex_index_in(self, label, cid):
        for c, i in self._vertex_cells[label]:
            if c == cid:
                return i
        raise KeyError((label, cid))

    def face_key(self, vlabels, rlabels=frozenset()):
        return (frozenset(vlabels), frozenset(rlabels))

    def faces_of_dim(self, k):
        return [f for f in self.faces.values() if f.dim == k]

    def maximal_cells_of_face(self, frec):
        return sorted({cid for cid, _, _ in frec.incident}, key=repr)

    def chart(self, label, cid):
        """Linear chart map: cell chart -> vertex chart (integer matrix)."""
        return self.psi[(label, cid)]

    def has_fan(self, label):
        return label in self.vertex_fans

    def cell_labels(self, cid):
        return self.cells[cid][1]

    # -- derived geometry --------------------------------------------------

    def face_barycenter_in_cell(self, frec, cid):
        for c, vidx, ridx in frec.incident:
            if c == cid:
                return self.cell_geom(cid).barycenter(vidx, ridx)
        raise KeyError(cid)


def assemble(spec, fans):
    """Build a TropicalComplex.  ``fans`` maps vertex label -> VertexFan.

    Raises AssemblyError with messages including "label mismatch",
    "fan incompatibility" or "non-manifold" on invalid input.
    """
    if not spec.cells:
        raise AssemblyError("no cells")
    dim = spec.dimension
    # 1. collect faces by label key
    faces = {}
    for cid in spec.order:
        geom, vls, rls = spec.cells[cid]
        for d, vidx, ridx in geom.faces():
            if d == dim:
                continue
            key = (frozenset(vls[i] for i in vidx),
                   frozenset(rls[k] for k in ridx))
            rec = faces.get(key)
            if rec is None:
                rec = FaceRecord(key, d, [], False, not ridx)
                faces[key] = rec
            elif rec.dim != d:
                raise AssemblyError(
                    "label mismatch: faces with labels %r have different dimensions" % (key,))
            rec.incident.append((cid, vidx, ridx))
    # 2. manifold check on codim-1 faces
    boundary = False
    for rec in faces.values():
        if rec.dim == dim - 1:
            n_inc = len(rec.incident)
            if n_inc > 2:
                raise AssemblyError(
                    "non-manifold: face %r lies in %d maximal cells" % (rec.key, n_inc))
            rec.interior = n_inc == 2
            if n_inc == 1:
                boundary = True
        else:
            # interior if every containing codim-1 chain is interior; cheap
            # version: leave False, not used
            rec.interior = len(rec.incident) > 1
    # 3. verify each glued face identification is integral affine
    for rec in faces.values():
        if len(rec.incident) < 2 or rec.dim == 0:
            continue
        base = rec.incident[0]
        for other in rec.incident[1:]:
            _check_face_identification(spec, rec, base, other)
    # 4. fan structures and chart maps
    psi = {}
    for label, vf in fans.items():
        incident = []
        for cid in spec.order:
            geom, vls, rls = spec.cells[cid]
            if label in vls:
                incident.append((cid, vls.index(label)))
        assigned = set(vf.cone_of)
        if assigned != {cid for cid, _ in incident}:
            raise AssemblyError(
                "fan incompatibility: assignment at %r does not cover the incident cells" % (label,))
        for cid, i in incident:
            geom, vls, rls = spec.cells[cid]
            cone = vf.cone_of[cid]
            match = vf.matching[cid]
            pairs = []
            for nb in geom.edge_neighbors(i):
                nb_label = vls[nb[1]] if nb[0] == "v" else rls[nb[1]]
                if nb_label not in match:
                    raise AssemblyError(
                        "fan incompatibility: no matched ray for edge %r-%r in cell %r"
                        % (label, nb_label, cid))
                pairs.append((geom.direction_to(i, nb), match[nb_label]))
            ray_targets = {tuple(r) for _, r in pairs}
            if ray_targets != set(cone.generators):
                raise AssemblyError(
                    "fan incompatibility: matched rays at %r in %r are not the cone generators"
                    % (label, cid))
            try:
                A = map_from_generator_matching(pairs)
            except MatchingError as e:
                raise AssemblyError(
                    "fan incompatibility: chart at %r in %r: %s" % (label, cid, e))
            if abs(det(A)) != 1:
                raise AssemblyError(
                    "fan incompatibility: chart at %r in %r is not unimodular" % (label, cid))
            psi[(label, cid)] = A
        # matching consistency across cells sharing an edge at this vertex
        by_edge = {}
        for cid, i in incident:
            geom, vls, rls = spec.cells[cid]
            for nb in geom.edge_neighbors(i):
                nb_label = vls[nb[1]] if nb[0] == "v" else rls[nb[1]]
                by_edge.setdefault(nb_label, set()).add(vf.matching[cid][nb_label])
        for nb_label, rays in by_edge.items():
            if len(rays) != 1:
                raise AssemblyError(
                    "fan incompatibility: edge %r-%r matched to different rays" % (label, nb_label))
    cells = {cid: spec.cells[cid] for cid in spec.order}
    return TropicalComplex(dim, cells, faces, dict(fans), psi, boundary)


def _check_face_identification(spec, rec, inc_a, inc_b):
    """The label correspondence between two glued faces must be an integral
    affine isomorphism of the faces (in saturated span coordinates)."""
    (ca, va, ra) = inc_a
    (cb, vb, rb) = inc_b
    ga, la, rla = spec.cells[ca]
    gb, lb, rlb = spec.cells[cb]
    la_map = {la[i]: ga.vertices[i] for i in va}
    lb_map = {lb[i]: gb.vertices[i] for i in vb}
    ra_map = {rla[k]: ga.rays[k] for k in ra}
    rb_map = {rlb[k]: gb.rays[k] for k in rb}
    if set(la_map) != set(lb_map) or set(ra_map) != set(rb_map):
        raise AssemblyError("label mismatch: faces %r do not carry the same labels" % (rec.key,))
    labels = sorted(la_map, key=repr)
    if not labels:
        return
    o_a = la_map[labels[0]]
    o_b = lb_map[labels[0]]
    dirs_a = [vsub(la_map[l], o_a) for l in labels[1:]]
    dirs_b = [vsub(lb_map[l], o_b) for l in labels[1:]]
    for rl in sorted(ra_map, key=repr):
        dirs_a.append(ra_map[rl])
        dirs_b.append(rb_map[rl])
    basis_a = saturation_basis(dirs_a)
    basis_b = saturation_basis(dirs_b)
    if len(basis_a) != len(basis_b):
        raise AssemblyError("label mismatch: faces %r have different dimensions" % (rec.key,))
    if not basis_a:
        return
    coords_a = _coords_in(basis_a, dirs_a)
    coords_b = _coords_in(basis_b, dirs_b)
    # need integer matrix A (in span coords) with A a_i = b_i, unimodular
    d = len(basis_a)
    if rank(coords_a) < d:
        raise AssemblyError("label mismatch: degenerate face %r" % (rec.key,))
    try:
        from .lattice import map_from_generator_matching
        A = map_from_generator_matching(list(zip(coords_a, coords_b)))
    except MatchingError:
        raise AssemblyError(
            "label mismatch: face %r identification is not integral affine" % (rec.key,))
    if abs(det(A)) != 1:
        raise AssemblyError(
            "label mismatch: face %r identification is not unimodular" % (rec.key,))


def _coords_in(basis, vecs):
    B = mat_from_cols(basis)
    out = []
    for v in vecs:
        sol = solve_rational(B, v)
        out.append(tuple(int(x) for x in sol))
    return out


# ---------------------------------------------------------------------------
# discriminant


class Stratum:
    """One barycentric discriminant segment: inside 2-face ``face_key``,
    running from the face barycenter toward the barycenter of the cell-complex
    edge ``edge_key`` (a 1-face of the 2-face)."""

    __slots__ = ("face_key", "edge_key", "monodromy", "base_label",
                 "multiplicity", "pruned", "tag")

    def __init__(self, face_key, edge_key, monodromy, base_label):
        self.face_key = face_key
        self.edge_key = edge_key
        self.monodromy = monodromy
        self.base_label = base_label
        n = len(monodromy)
        from .lattice import content
        TmI = [monodromy[i][j] - (1 if i == j else 0)
               for i in range(n) for j in range(n)]
        self.multiplicity = content(TmI)
        self.pruned = self.multiplicity == 0
        self.tag = None

    def __repr__(self):
        return "Stratum(%s -> %s, mult %d%s)" % (
            sorted(self.face_key[0], key=repr),
            sorted(self.edge_key[0], key=repr),
            self.multiplicity, ", pruned" if self.pruned else "")


class DiscriminantGraph:
    def __init__(self, strata, skipped):
        self.strata = strata          # list of Stratum (pruned ones included)
        self.skipped = skipped        # [(face_key, edge_key, reason)]

    def active(self):
        return [s for s in self.strata if not s.pruned]

    def node_positions(self):
        """Delta-vertices: barycenter ids ('face', key) / ('edge', key) with the
        incident active strata."""
        inc = {}
        for s in self.active():
            inc.setdefault(("face", s.face_key), []).append(s)
            inc.setdefault(("edge", s.edge_key), []).append(s)
        return inc

    def components(self):
        """Connected components of the active strata (via shared barycenters)."""
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for s in self.active():
            for node in (("face", s.face_key), ("edge", s.edge_key)):
                parent.setdefault(node, node)
            union(("face", s.face_key), ("edge", s.edge_key))
        comps = {}
        for s in self.active():
            root = find(("face", s.face_key))
            comps.setdefault(root, []).append(s)
        return list(comps.values())


def discriminant(cx):
    """Compute the discriminant graph of an assembled complex.

    Candidate strata live in interior codim-1 faces when dim == 2 (a point at
    the barycenter of an interior edge) or, when dim == 3, run from the
    barycenter of an interior 2-face to the barycenter of each of its edges.
    A stratum is pruned when the canonical loop around it is the identity.
    """
    from .monodromy import loop_around_keys
    strata = []
    skipped = []
    if cx.dimension == 2:
        for rec in cx.faces_of_dim(1):
            if not rec.interior:
                continue
            vlabels = sorted(rec.key[0], key=repr)
            if len(vlabels) != 2 or rec.key[1]:
                skipped.append((rec.key, rec.key, "unbounded edge"))
                continue
            if not all(cx.has_fan(l) for l in vlabels):
                skipped.append((rec.key, rec.key, "missing fan structure"))
                continue
            T, base = loop_around_keys(cx, rec.key, rec.key)
            strata.append(Stratum(rec.key, rec.key, T, base))
        return DiscriminantGraph(strata, skipped)
    if cx.dimension != 3:
        raise ValueError("discriminant implemented for dimensions 2 and 3")
    edge_lookup = {k: r for k, r in cx.faces.items() if r.dim == 1}
    for rec in cx.faces_of_dim(2):
        if not rec.interior:
            continue
        # edges of this 2-face: 1-faces of the complex whose labels are a
        # subset of the face labels and which lie on the face in each cell
        cid, vidx, ridx = rec.incident[0]
        geom, vls, rls = cx.cells[cid]
        for d, fv, fr in geom.faces():
            if d != 1 or not (fv <= vidx and fr <= ridx):
                continue
            ekey = (frozenset(vls[i] for i in fv), frozenset(rls[k] for k in fr))
            if ekey[1] or len(ekey[0]) != 2:
                skipped.append((rec.key, ekey, "unbounded edge"))
                continue
            if not all(cx.has_fan(l) for l in ekey[0]):
                skipped.append((rec.key, ekey, "missing fan structure"))
                continue
            T, base = loop_around_keys(cx, rec.key, ekey)
            strata.append(Stratum(rec.key, ekey, T, base))
    return DiscriminantGraph(strata, skipped)


# ---------------------------------------------------------------------------
# structural validation


def validate_structure(cx, disc=None):
    """Report: orientation (consistent transition signs), toric condition
    (monodromy around a stratum fixes the crossed edge and shifts only along
    the containing 2-face), and the pruning soundness of Delta' strata."""
    report = {"orientation": True, "orientation_detail": None,
              "toric": [], "boundary": cx.boundary, "ok": True}
    # orientation: exists sign choice per chart making all psi dets positive
    sign = {}
    ok = True
    detail = None
    adj = {}
    for (label, cid), A in cx.psi.items():
        adj.setdefault(("v", label), []).append((("c", cid), det(A)))
        adj.setdefault(("c", cid), []).append((("v", label), det(A)))
    for start in sorted(adj, key=repr):
        if start in sign:
            continue
        sign[start] = 1
        queue = [start]
        while queue:
            node = queue.pop()
            for other, d in adj[node]:
                want = sign[node] * (1 if d > 0 else -1)
                if other not in sign:
                    sign[other] = want
                    queue.append(other)
                elif sign[other] != want:
                    ok = False
                    detail = (node, other)
    report["orientation"] = ok
    report["orientation_detail"] = detail
    if disc is None:
        disc = discriminant(cx)
    from .lattice import integer_kernel
    for s in disc.strata:
        T = s.monodromy
        n = len(T)
        base = s.base_label
        # tangent direction of the crossed edge in the base chart
        other = next(l for l in s.edge_key[0] if l != base)
        edge_ray = _matched_ray(cx, base, other)
        fixed = matvec(T, edge_ray) == tuple(edge_ray)
        # tangent plane of the containing 2-face at base chart
        plane = _face_plane_at(cx, s.face_key, base)
        shifts_ok = True
        for j in range(n):
            e = tuple(1 if t == j else 0 for t in range(n))
            diff = vsub(matvec(T, e), e)
            if not _in_span(diff, plane):
                shifts_ok = False
        entry = {"face": sorted(s.face_key[0], key=repr),
                 "edge": sorted(s.edge_key[0], key=repr),
                 "fixes_edge": fixed, "parallel_to_face": shifts_ok}
        if not (fixed and shifts_ok):
            report["ok"] = False
        report["toric"].append(entry)
    if not report["orientation"]:
        report["ok"] = False
    return report


def _matched_ray(cx, base, other):
    vf = cx.vertex_fans[base]
    for cid, m in vf.matching.items():
        if other in m:
            return m[other]
    raise KeyError((base, other))


def _face_plane_at(cx, face_key, base):
    """Basis of the tangent plane of the 2-face in the chart at ``base``."""
    rec = cx.faces[face_key]
    cid, vidx, ridx = rec.incident[0]
    geom, vls, rls = cx.cells[cid]
    i = vls.index(base)
    A = cx.chart(base, cid)
    dirs = []
    for j in vidx:
        if j != i:
            dirs.append(matvec(A, vsub(geom.vertices[j], geom.vertices[i])))
    for k in ridx:
        dirs.append(matvec(A, geom.rays[k]))
    return saturation_basis([tuple(int(x) for x in d) for d in dirs])


def _in_span(v, basis):
    if all(x == 0 for x in v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [tuple(v)]) == len(basis)
