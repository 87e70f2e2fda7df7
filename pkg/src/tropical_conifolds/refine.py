"""Refinement engine: subdivide cells of a complex and re-assemble.

A refinement replaces selected maximal cells by lists of sub-polytopes
(given as vertex lists in each cell's own coordinates) while keeping the
affine structure: fans at new vertices are induced by parallel transport
from nearby original vertex charts, and the polarization is carried over
by evaluating the local convex germ of the original function.

Two override hooks support the node surgeries, which deliberately change
the structure at a few vertices:

* ``fan_overrides``: {vertex label: {neighbor label: ray}} installs an
  explicit matching (hence fan) at a vertex instead of the induced one.
* ``phi_overrides``: {vertex label: {ray: value}} installs explicit
  polarization values at a vertex.
"""

from fractions import Fraction

from .complex import GluingSpec, assemble
from .examples import fans_from_matchings
from .lattice import (Cone, identity, int_mat, make_primitive, mat_inverse,
                      matmul, matvec, transpose, vsub)
from .mpl import MPLFunction


class RefinementError(ValueError):
    pass


def _point_in_hull(p, verts, rays=()):
    """Exact membership of p in conv(verts)+cone(rays), by homogenization."""
    n = len(p)
    gens = [tuple(v) + (1,) for v in verts] + [tuple(r) + (0,) for r in rays]
    return Cone(gens, n + 1).contains_point(tuple(p) + (1,))


def _canonical_coeffs(point, ordered_verts):
    """Affine coefficients of ``point`` over a greedy basis of the ordered
    vertex list; canonical across integral-affine identifications that match
    the ordering."""
    from .lattice import mat_from_cols, solve_rational, rank
    o = ordered_verts[0]
    dirs = []
    picked = []
    for i, w in enumerate(ordered_verts[1:], start=1):
        d = vsub(w, o)
        if rank(dirs + [d]) > len(dirs):
            dirs.append(d)
            picked.append(i)
    if not dirs:
        if tuple(point) != tuple(o):
            raise RefinementError("point %r outside its face" % (point,))
        return ()
    B = mat_from_cols([list(d) for d in dirs])
    sol = solve_rational(B, vsub(point, o))
    if sol is None:
        raise RefinementError("point %r outside the affine hull of its face"
                              % (point,))
    return tuple(Fraction(x) for x in sol)


def extract_matchings(cx):
    """Recover one matching dict per vertex label from an assembled complex."""
    out = {}
    for lab, vf in cx.vertex_fans.items():
        m = {}
        for cid, mm in vf.matching.items():
            for nb, ray in mm.items():
                if m.setdefault(nb, tuple(ray)) != tuple(ray):
                    raise RefinementError(
                        "edge %r-%r carries two rays" % (lab, nb))
        out[lab] = m
    return out


def rescale_complex(cx, phi, s):
    """Dilate every cell by the integer factor ``s``.

    The affine structure and the slopes of the polarization along primitive
    directions are unchanged; the point is to create interior integral points
    on edges where a surgery needs them.
    """
    if s == 1:
        return cx, phi
    spec = GluingSpec(cx.dimension)
    for cid in sorted(cx.cells, key=repr):
        geom, vls, rls = cx.cells[cid]
        spec.add_cell(cid, [[s * x for x in v] for v in geom.vertices],
                      list(vls), [list(r) for r in geom.rays], list(rls))
    fans = fans_from_matchings(spec, extract_matchings(cx))
    new_cx = assemble(spec, fans)
    return new_cx, MPLFunction(new_cx, phi.values)


class _NewPoint:
    __slots__ = ("key", "parent_face", "positions")

    def __init__(self, key, parent_face):
        self.key = key                  # canonical identity
        self.parent_face = parent_face  # face key of cx, or ('cell', cid)
        self.positions = {}             # original cid -> coords in that cell


def _classify_point(cx, cid, p):
    """Return (existing label) or (None, minimal original face containing p)."""
    geom, vls, rls = cx.cells[cid]
    tp = tuple(p)
    for i, v in enumerate(geom.vertices):
        if v == tp:
            return vls[i], None
    best = None
    for d, fv, fr in geom.faces():
        if d == geom.dim_ambient:
            continue
        if _point_in_hull(tp, [geom.vertices[i] for i in fv],
                          [geom.rays[k] for k in fr]):
            if best is None or d < best[0]:
                best = (d, fv, fr)
    if best is None:
        if not _point_in_hull(tp, geom.vertices, geom.rays):
            raise RefinementError("point %r outside cell %r" % (tp, cid))
        return None, ("cell", cid)
    if best[2] and not _point_in_hull(tp, [geom.vertices[i] for i in best[1]]):
        raise RefinementError(
            "new vertex %r beyond the bounded part of an unbounded face" % (tp,))
    fkey = (frozenset(vls[i] for i in best[1]),
            frozenset(rls[k] for k in best[2]))
    return None, fkey


def _face_ordered_verts(cx, fkey, cid):
    """Vertices of face ``fkey`` inside cell ``cid``, sorted by label repr."""
    geom, vls, rls = cx.cells[cid]
    pairs = sorted(((vls[i], geom.vertices[i]) for i in range(len(vls))
                    if vls[i] in fkey[0]), key=lambda t: repr(t[0]))
    return [pos for _, pos in pairs]


def _chart_tree(cx, parents, face_labels):
    """Charts chi_C (cell coords -> reference chart) for each parent cell of a
    new point, consistent across the walls containing its parent face."""
    parents = sorted(parents, key=repr)
    c0 = parents[0]
    vls0 = cx.cell_labels(c0)
    anchors = sorted((l for l in vls0 if cx.has_fan(l)), key=repr)
    if not anchors:
        raise RefinementError("no fan-bearing vertex in cell %r" % (c0,))
    b = anchors[0]
    chi = {c0: cx.chart(b, c0)}
    anchor_of = {c0: (b, None)}      # cell -> (anchor vertex, entry wall info)
    walls = [rec for rec in cx.faces.values()
             if rec.dim == cx.dimension - 1 and len(rec.incident) == 2
             and face_labels <= rec.key[0]]
    pending = set(parents) - {c0}
    frontier = [c0]
    tree = {c0: None}                # cell -> (previous cell, shared wall vertex)
    while frontier:
        cur = frontier.pop()
        for rec in walls:
            cids = {cc for cc, _, _ in rec.incident}
            if cur not in cids:
                continue
            other = (cids - {cur}).pop() if len(cids) == 2 else cur
            if other not in pending:
                continue
            u = None
            for lab in sorted(rec.key[0], key=repr):
                if cx.has_fan(lab):
                    u = lab
                    break
            if u is None:
                continue
            trans = matmul(int_mat(mat_inverse(cx.chart(u, other))),
                           cx.chart(u, cur))
            # x_other = trans^{-1} x_cur;  chi_other = chi_cur * inverse(trans)?
            # chi maps cell coords to the reference chart:
            # x_cur = psi_{u,cur}^{-1} psi_{u,other} x_other
            chi[other] = matmul(chi[cur],
                                matmul(int_mat(mat_inverse(cx.chart(u, cur))),
                                       cx.chart(u, other)))
            tree[other] = (cur, u)
            pending.discard(other)
            frontier.append(other)
    if pending:
        raise RefinementError(
            "parent cells %r of a new vertex are not wall-connected" %
            (sorted(pending, key=repr),))
    return chi, tree, b, c0


def _germ_covectors(cx, phi, parents, chi, tree, b, c0):
    """Covector of the local representative of phi on each parent cell,
    expressed in the reference chart of the new point."""
    mvals = {}
    plf_b = phi.vertex_plf(b)
    cone_b = cx.vertex_fans[b].cone_of[c0]
    mvals[c0] = tuple(plf_b.m_of_cone(cone_b))
    order = sorted(tree, key=lambda c: 0 if tree[c] is None else 1)
    done = {c0}
    progress = True
    while progress:
        progress = False
        for c, entry in tree.items():
            if c in done or entry is None:
                continue
            prev, u = entry
            if prev not in done:
                continue
            plf_u = phi.vertex_plf(u)
            mu_c = plf_u.m_of_cone(cx.vertex_fans[u].cone_of[c])
            mu_p = plf_u.m_of_cone(cx.vertex_fans[u].cone_of[prev])
            delta = [mu_c[i] - mu_p[i] for i in range(len(mu_c))]
            # delta is a covector in u's chart vanishing on the shared wall;
            # express it in the reference chart: delta . psi_{u,c} . chi_c^{-1}
            M = matmul(cx.chart(u, c), int_mat(mat_inverse(chi[c])))
            drow = matvec(transpose(M), delta)
            mvals[c] = tuple(mvals[prev][i] + drow[i] for i in range(len(drow)))
            done.add(c)
            progress = True
    return mvals


def refine_complex(cx, phi, subdivisions, point_labels=None,
                   fan_overrides=None, phi_overrides=None):
    """Subdivide cells of ``cx`` and reassemble with carried polarization.

    subdivisions: {cid: [[vertex coords, ...], ...]} in cell coordinates.
    point_labels: {(cid, point tuple): label} naming new vertices.
    Returns (new complex, new MPLFunction, info dict).
    """
    if cx.dimension != 3:
        raise RefinementError("refinement implemented for dimension 3")
    point_labels = dict(point_labels or {})
    fan_overrides = dict(fan_overrides or {})
    phi_overrides = dict(phi_overrides or {})
    for cid in subdivisions:
        if cid not in cx.cells:
            raise RefinementError("unknown cell %r" % (cid,))

    # -- identify all sub-cell vertices ------------------------------------
    new_points = {}          # canonical key -> _NewPoint
    user_names = {}          # canonical key -> user label
    cell_map = {}
    sub_cells = []           # (new cid, parent cid, [coords], [point ids])
    for cid in sorted(subdivisions, key=repr):
        geomP, vlsP, rlsP = cx.cells[cid]
        ray_label = {make_primitive(r): rlsP[k]
                     for k, r in enumerate(geomP.rays)}
        normed = []
        for poly in subdivisions[cid]:
            if isinstance(poly, tuple) and len(poly) == 2:
                verts, prays = poly
            else:
                verts, prays = poly, ()
            vv = sorted(tuple(map(int, v)) for v in verts)
            rr = []
            for r in prays:
                pr = make_primitive(tuple(map(int, r)))
                if pr not in ray_label:
                    raise RefinementError(
                        "sub-cell ray %r is not a ray of cell %r" % (r, cid))
                rr.append(pr)
            normed.append((vv, sorted(rr)))
        polys = sorted(normed)
        ids = []
        for k, (poly, prays) in enumerate(polys):
            pts = []
            for p in poly:
                label, parent = _classify_point(cx, cid, p)
                if label is not None:
                    pts.append(("old", label))
                    continue
                if parent[0] == "cell":
                    ordered = _face_ordered_verts(
                        cx, (frozenset(cx.cell_labels(cid)), frozenset()), cid)
                    ckey = ("cellpt", cid, _canonical_coeffs(p, ordered))
                else:
                    ordered = _face_ordered_verts(cx, parent, cid)
                    ckey = ("facept", tuple(sorted(parent[0], key=repr)),
                            _canonical_coeffs(p, ordered))
                np_ = new_points.get(ckey)
                if np_ is None:
                    np_ = _NewPoint(ckey, parent)
                    new_points[ckey] = np_
                prev = np_.positions.get(cid)
                if prev is not None and prev != p:
                    raise RefinementError(
                        "two distinct points of cell %r share identity %r"
                        % (cid, ckey))
                np_.positions[cid] = p
                if (cid, p) in point_labels:
                    name = point_labels[(cid, p)]
                    if user_names.get(ckey, name) != name:
                        raise RefinementError(
                            "conflicting names for new point %r" % (ckey,))
                    user_names[ckey] = name
                pts.append(("new", ckey))
            ids.append(((cid, k), poly, pts,
                        prays, [ray_label[r] for r in prays]))
        cell_map[cid] = [nid for nid, _, _, _, _ in ids]
        sub_cells.extend(ids)

    # assign labels to new points
    label_of = {}
    auto = 0
    for ckey in sorted(new_points, key=repr):
        if ckey in user_names:
            label_of[ckey] = user_names[ckey]
        else:
            label_of[ckey] = ("q", auto)
            auto += 1
    existing = set(cx.vertex_labels())
    clash = existing & set(label_of.values())
    if clash:
        raise RefinementError("new vertex labels collide with existing: %r"
                              % (sorted(clash, key=repr),))

    # -- build the gluing spec ---------------------------------------------
    spec = GluingSpec(cx.dimension)
    for cid in sorted(cx.cells, key=repr):
        if cid in subdivisions:
            continue
        geom, vls, rls = cx.cells[cid]
        spec.add_cell(cid, [list(v) for v in geom.vertices], list(vls),
                      [list(r) for r in geom.rays], list(rls))
    for nid, poly, pts, prays, prlabels in sub_cells:
        vlabels = [lab if kind == "old" else label_of[lab]
                   for kind, lab in pts]
        spec.add_cell(nid, [list(v) for v in poly], vlabels,
                      [list(r) for r in prays], list(prlabels))

    # -- charts and germ covectors at new points ---------------------------
    chart_info = {}   # new label -> (chi {orig cid: matrix}, mvals, anchor)
    for ckey, np_ in new_points.items():
        if np_.parent_face[0] == "cell":
            parents = [np_.parent_face[1]]
            face_labels = frozenset()
        else:
            rec = cx.faces[np_.parent_face]
            parents = sorted({cc for cc, _, _ in rec.incident}, key=repr)
            face_labels = np_.parent_face[0]
        chi, tree, b, c0 = _chart_tree(cx, parents, face_labels)
        mvals = _germ_covectors(cx, phi, parents, chi, tree, b, c0)
        # positions of the point in every parent cell's coordinates: needed
        # for cells where the point lies only on the closure
        chart_info[label_of[ckey]] = (np_, chi, mvals)

    # -- matchings ----------------------------------------------------------
    matchings = {}
    values = {}
    nbr_vals = {}            # fan-overridden label -> {neighbor label: slope}

    def add_match(label, nb_label, ray, value):
        m = matchings.setdefault(label, {})
        if m.get(nb_label, ray) != ray:
            raise RefinementError(
                "edge %r-%r receives two different rays (%r, %r)"
                % (label, nb_label, m[nb_label], ray))
        m[nb_label] = ray
        vv = values.setdefault(label, {})
        if vv.get(ray, value) != value:
            raise RefinementError(
                "polarization mismatch at %r on ray %r" % (label, ray))
        vv[ray] = value

    for cid in spec.order:
        geom, vls, rls = spec.cells[cid]
        parent = cid[0] if cid not in cx.cells else cid
        refined = cid not in cx.cells
        C = parent if refined else cid
        for i, lab in enumerate(vls):
            nbs = geom.edge_neighbors(i)
            if lab in chart_info:
                np_, chi, mvals = chart_info[lab]
                T = chi[C]
                m = mvals[C]
                for nb in nbs:
                    nb_label = vls[nb[1]] if nb[0] == "v" else rls[nb[1]]
                    d = geom.direction_to(i, nb)
                    val = sum(m[t] * x for t, x in enumerate(matvec(T, d)))
                    if Fraction(val).denominator != 1:
                        raise RefinementError(
                            "non-integral polarization slope at %r; rescale "
                            "the polarization" % (lab,))
                    if lab in fan_overrides:
                        prev = nbr_vals.setdefault(lab, {})
                        if prev.setdefault(nb_label, int(val)) != int(val):
                            raise RefinementError(
                                "inconsistent slope toward %r at %r"
                                % (nb_label, lab))
                        continue
                    add_match(lab, nb_label, tuple(matvec(T, d)), int(val))
            else:
                if not cx.has_fan(lab):
                    continue
                T = cx.chart(lab, C)
                plf = phi.vertex_plf(lab)
                for nb in nbs:
                    nb_label = vls[nb[1]] if nb[0] == "v" else rls[nb[1]]
                    d = geom.direction_to(i, nb)
                    ray = tuple(matvec(T, d))
                    val = plf.value(ray)
                    if Fraction(val).denominator != 1:
                        raise RefinementError(
                            "non-integral polarization slope at %r; rescale "
                            "the polarization" % (lab,))
                    if lab in fan_overrides:
                        prev = nbr_vals.setdefault(lab, {})
                        if prev.setdefault(nb_label, int(val)) != int(val):
                            raise RefinementError(
                                "inconsistent slope toward %r at %r"
                                % (nb_label, lab))
                        continue
                    add_match(lab, nb_label, ray, int(val))

    # -- overrides ----------------------------------------------------------
    for lab, override in fan_overrides.items():
        matchings[lab] = {nb: tuple(r) for nb, r in override.items()}
        if lab in phi_overrides:
            continue
        got = nbr_vals.get(lab, {})
        new_vals = {}
        for nb_label, ray in matchings[lab].items():
            if nb_label not in got:
                raise RefinementError(
                    "fan override at %r needs explicit polarization values"
                    % (lab,))
            v = got[nb_label]
            if new_vals.setdefault(ray, v) != v:
                raise RefinementError(
                    "polarization mismatch at %r on ray %r" % (lab, ray))
            new_vals[ray] = v
        values[lab] = new_vals
    for lab, vv in phi_overrides.items():
        values[lab] = {tuple(r): int(v) for r, v in vv.items()}

    fans = fans_from_matchings(spec, matchings)
    new_cx = assemble(spec, fans)
    new_phi = MPLFunction(new_cx, values)
    info = {
        "cell_map": cell_map,
        "new_labels": {ckey: label_of[ckey] for ckey in new_points},
        "matchings": matchings,
        "spec": spec,
    }
    return new_cx, new_phi, info
