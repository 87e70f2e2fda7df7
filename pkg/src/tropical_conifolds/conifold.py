"""Classification of discriminant vertices and node surgeries.

The discriminant graph of a 3-dimensional complex is a trivalent-free graph
whose vertices sit at barycenters of 2-faces and edges.  Each vertex is
tagged by inspecting the monodromy transformations of its incident legs,
all conjugated into one common vertex chart:

* valency 2          -> generic point of the discriminant
* valency 3 at a face barycenter, joint invariant rank 2 -> negative vertex
* valency 3 at an edge barycenter, joint invariant rank 1 -> positive vertex
* valency 4 at a face barycenter, joint invariant rank 2 -> negative node
* valency 4 at an edge barycenter, joint invariant rank 1,
  legs splitting into two transverse invariant planes     -> positive node

Anything else is reported as unrecognized.  The verdict summarises the
census: a complex with only generic points and 3-valent vertices is a
smooth tropical manifold, one with nodes on top of that is a tropical
conifold.
"""

from fractions import Fraction

from .lattice import (identity, int_mat, make_primitive, mat_inverse, matmul,
                      matvec, rank, vsub)
from .monodromy import invariant_sublattice, transport


class SurgeryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# classification


def _face_node_monodromies(cx, face_key, legs):
    """Leg monodromies of a face-barycenter node, all in one common chart.

    Each leg's loop is based at an endpoint of its crossed edge; conjugating
    by a transport inside the lexicographically-first incident cell moves
    every leg to the chart of the first vertex of the face.
    """
    rec = cx.faces[face_key]
    c1 = min(cid for cid, _, _ in rec.incident)
    base = min(face_key[0], key=repr)
    out = []
    for s in legs:
        if s.base_label == base:
            out.append(s.monodromy)
            continue
        W = transport(cx, [base, c1, s.base_label])
        Winv = int_mat(mat_inverse(W))
        out.append(matmul(matmul(W, s.monodromy), Winv))
    return out, base


def _edge_node_monodromies(cx, edge_key, legs):
    """Leg monodromies of an edge-barycenter node (shared base already)."""
    bases = {s.base_label for s in legs}
    if len(bases) != 1:
        raise SurgeryError("inconsistent leg bases at edge %r" % (edge_key,))
    return [s.monodromy for s in legs], bases.pop()


def _plane_key(basis):
    """Canonical key of a saturated rank-2 sublattice given by basis rows."""
    from .lattice import smith_normal_form
    # Hermite-like canonical form via sorting the reduced basis is fragile;
    # use the kernel of the plane (its normal direction) instead, which is
    # unique up to sign for rank-2 sublattices of Z^3.
    from .lattice import integer_kernel, transpose
    normal = integer_kernel(tuple(tuple(r) for r in transpose(list(basis))))
    if len(normal) != 1:
        return tuple(sorted(tuple(b) for b in basis))
    n = make_primitive(normal[0])
    if n < tuple(-x for x in n):
        n = tuple(-x for x in n)
    return n


def _edge_direction_at(cx, edge_key, base):
    labels = sorted(edge_key[0], key=repr)
    other = labels[1] if labels[0] == base else labels[0]
    for cid, _ in cx.cells_at_vertex(base):
        vls = cx.cell_labels(cid)
        if other not in vls:
            continue
        geom = cx.cell_geom(cid)
        i, j = vls.index(base), vls.index(other)
        d = vsub(geom.vertices[j], geom.vertices[i])
        return make_primitive(matvec(cx.chart(base, cid), d))
    raise SurgeryError("edge %r has no common cell" % (edge_key,))


def _in_lattice_span(v, basis):
    from .lattice import solve_rational, mat_from_cols
    if not basis:
        return all(x == 0 for x in v)
    B = mat_from_cols([list(b) for b in basis])
    try:
        sol = solve_rational(B, v)
    except Exception:
        sol = None
    if sol is None:
        # underdetermined cannot occur (saturated independent basis)
        return False
    return True


def classify_delta(cx):
    """Tag every discriminant vertex and stratum; attach a verdict.

    Returns the DiscriminantGraph with ``stratum.tag`` set to
    ``("generic", multiplicity)``, plus two extra attributes:
    ``node_tags`` ({('face'|'edge', key): tag}) and ``verdict``.
    """
    from .complex import discriminant
    disc = discriminant(cx)
    for s in disc.active():
        s.tag = ("generic", s.multiplicity)
    node_tags = {}
    if cx.dimension == 2:
        # isolated focus-focus points; no further singular structure
        disc.node_tags = node_tags
        disc.verdict = "smooth tropical manifold"
        return disc
    for node, legs in disc.node_positions().items():
        kind, key = node
        val = len(legs)
        if val <= 2:
            node_tags[node] = "generic"
            continue
        try:
            if kind == "face":
                mats, base = _face_node_monodromies(cx, key, legs)
            else:
                mats, base = _edge_node_monodromies(cx, key, legs)
        except SurgeryError:
            node_tags[node] = "unrecognized"
            continue
        joint = invariant_sublattice(mats)
        r = len(joint)
        if kind == "face" and val == 3 and r == 2:
            node_tags[node] = "negative_vertex"
        elif kind == "edge" and val == 3 and r == 1:
            node_tags[node] = "positive_vertex"
        elif kind == "face" and val == 4 and r == 2:
            node_tags[node] = "negative_node"
        elif kind == "edge" and val == 4 and r == 1:
            planes = {}
            for T in mats:
                inv = invariant_sublattice([T])
                if len(inv) != 2:
                    planes = None
                    break
                planes.setdefault(_plane_key(inv), []).append(T)
            ok = (planes is not None and len(planes) == 2
                  and all(len(g) == 2 for g in planes.values()))
            if ok:
                d = _edge_direction_at(cx, key, base)
                ok = _in_lattice_span(d, joint)
            node_tags[node] = "positive_node" if ok else "unrecognized"
        else:
            node_tags[node] = "unrecognized"
    disc.node_tags = node_tags
    if any(t == "unrecognized" for t in node_tags.values()):
        disc.verdict = "unrecognized singularities present"
    elif any(t in ("positive_node", "negative_node") for t in node_tags.values()):
        disc.verdict = "tropical conifold"
    else:
        disc.verdict = "smooth tropical manifold"
    return disc


def tag_census(disc):
    """Counts of node tags, e.g. {'negative_node': 9, 'generic': 12}."""
    out = {}
    for t in disc.node_tags.values():
        out[t] = out.get(t, 0) + 1
    return out


# ---------------------------------------------------------------------------
# local smoothing of a positive node


def _edge_lattice_length(cx, ekey):
    a, b = sorted(ekey[0], key=repr)
    for cid, _, _ in cx.faces[ekey].incident:
        vls = cx.cell_labels(cid)
        if a in vls and b in vls:
            geom = cx.cell_geom(cid)
            d = vsub(geom.vertices[vls.index(b)], geom.vertices[vls.index(a)])
            from .lattice import content
            return content(d)
    raise SurgeryError("edge %r not found in any cell" % (ekey,))


def _node_edge_star(cx, ekey):
    """Ring structure of the four cells around a model positive-node edge.

    Requires each incident cell to be edge + 2-ray wedge (the local model
    shape).  Returns (a, b, ring) where ring = [(cid, wall neighbor label to
    the next cell), ...] in cyclic order.
    """
    rec = cx.faces.get(ekey)
    if rec is None:
        raise SurgeryError("neighborhood mismatch: unknown edge %r" % (ekey,))
    cids = sorted({cid for cid, _, _ in rec.incident}, key=repr)
    if len(cids) != 4:
        raise SurgeryError("neighborhood mismatch: edge star has %d cells"
                           % len(cids))
    a, b = sorted(ekey[0], key=repr)
    for cid in cids:
        geom, vls, rls = cx.cells[cid]
        if sorted(vls, key=repr) != [a, b] or len(rls) != 2:
            raise SurgeryError(
                "neighborhood mismatch: cell %r is not an edge-wedge" % (cid,))
    # walls: 2-faces ({a,b}, {one ray label})
    walls = {}
    for key, frec in cx.faces.items():
        if frec.dim != 2 or key[0] != frozenset((a, b)) or len(key[1]) != 1:
            continue
        wc = sorted({cid for cid, _, _ in frec.incident}, key=repr)
        if len(wc) != 2:
            raise SurgeryError("neighborhood mismatch: wall %r not interior"
                               % (key,))
        walls[next(iter(key[1]))] = (wc[0], wc[1])
    if len(walls) != 4:
        raise SurgeryError("neighborhood mismatch: expected 4 walls, got %d"
                           % len(walls))
    ring = []
    cur = cids[0]
    used = set()
    for _ in range(4):
        step = None
        for rl, (c1, c2) in walls.items():
            if rl in used or cur not in (c1, c2):
                continue
            step = (rl, c2 if c1 == cur else c1)
            break
        if step is None:
            raise SurgeryError("neighborhood mismatch: wall ring is broken")
        ring.append((cur, step[0]))
        used.add(step[0])
        cur = step[1]
    if cur != cids[0]:
        raise SurgeryError("neighborhood mismatch: wall ring does not close")
    return a, b, ring


_E1, _E2, _E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)

import math as _math

_VARIANTS = {
    "A": {
        "scale": lambda L: 1 if L % 2 == 0 and L >= 2 else 2,
        "height": lambda L: L // 2,
        "ends": lambda a, b: {a: (-1, 0, 0), b: _E1},
        "ring": [(0, 0, 1), (0, -1, 0), (0, 0, -1), (0, 1, 0)],
    },
    "B": {
        "scale": lambda L: 4 // _math.gcd(L, 4),
        "height": lambda L: L // 4,
        "ends": lambda a, b: {a: _E1, b: (-1, 0, 0)},
        "ring": [(1, -1, 0), (0, 0, -1), (0, 1, 0), (-1, 0, 1)],
    },
}


def _solve_kink_agreement(new_cx, phi_values, fixed, free_labels):
    """Complete a partially prescribed support function so that its kinks
    agree at every fan vertex of every interior wall.

    ``fixed`` prescribes ray values at some vertices; the values at
    ``free_labels`` are unknowns solved over the integers (all remaining
    vertices carry the zero function).  Kinks of a piecewise-linear function
    are linear in its ray values, so the agreement system is assembled by
    unit probes.  Raises SurgeryError when no integral solution exists."""
    from .lattice import integer_kernel, integer_solve
    from .mpl import MPLFunction, _fan_vertices
    from .polytopes import wall_kink

    zero = {lab: {r: 0 for r in d} for lab, d in phi_values.items()}
    for lab, vals in fixed.items():
        for r, x in vals.items():
            zero[lab][r] += x
    variables = [(lab, ray) for lab in free_labels
                 for ray in sorted(zero[lab])
                 if ray not in fixed.get(lab, {})]
    touched = set(fixed) | set(free_labels)
    var_index = {v: i for i, v in enumerate(variables)}

    # On a non-simplicial cone an arbitrary ray-value assignment need not
    # extend to a linear functional, so restrict the unknowns to the lattice
    # of assignments that are linear on every maximal cone of every touched
    # vertex fan before probing kinks.
    crows, cconst = [], []
    for lab in sorted(touched, key=repr):
        vf = new_cx.vertex_fans[lab]
        for cone in vf.fan.maximal_cones:
            gens = [tuple(g) for g in cone.generators]
            gmat = [[g[k] for g in gens] for k in range(len(gens[0]))]
            for rel in integer_kernel(gmat):
                row = [0] * len(variables)
                c0 = 0
                for coeff, g in zip(rel, gens):
                    if (lab, g) in var_index:
                        row[var_index[(lab, g)]] = coeff
                    else:
                        c0 += coeff * zero[lab][g]
                crows.append(row)
                cconst.append(c0)
    if crows:
        x0 = integer_solve(crows, [-c for c in cconst])
        if x0 is None:
            raise SurgeryError(
                "no integral support function matches the prescription at %r"
                % (sorted(fixed, key=repr),))
        hbasis = integer_kernel(crows)
    else:
        x0 = (0,) * len(variables)
        hbasis = [tuple(1 if j == i else 0 for j in range(len(variables)))
                  for i in range(len(variables))]

    def apply_vec(vec):
        out = {l: dict(d) for l, d in zero.items()}
        for (lab, ray), x in zip(variables, vec):
            out[lab][ray] += x
        return out

    walls = []
    for rec in new_cx.faces_of_dim(new_cx.dimension - 1):
        if not rec.interior:
            continue
        fverts = _fan_vertices(new_cx, rec.key)
        if len(fverts) >= 2 and (touched & set(fverts)):
            c1, c2 = sorted({cid for cid, _, _ in rec.incident}, key=repr)
            walls.append((rec.key, fverts, c1, c2))

    def disagreement_rows(values):
        phi = MPLFunction(new_cx, values)
        rows = []
        for _key, fverts, c1, c2 in walls:
            ks = []
            for label in fverts:
                vf = new_cx.vertex_fans[label]
                ks.append(wall_kink(phi.vertex_plf(label),
                                    vf.cone_of[c1], vf.cone_of[c2]))
            rows.extend(k - ks[0] for k in ks[1:])
        return rows

    const = disagreement_rows(apply_vec(x0))
    cols = []
    for h in hbasis:
        probe = apply_vec([a + b for a, b in zip(x0, h)])
        cols.append([r - c for r, c in zip(disagreement_rows(probe), const)])
    A = [[cols[j][i] for j in range(len(hbasis))]
         for i in range(len(const))]
    t = integer_solve(A, [-c for c in const]) if const else ()
    if t is None:
        raise SurgeryError(
            "no integral support function matches the prescription at %r"
            % (sorted(fixed, key=repr),))
    vec = list(x0)
    for coeff, h in zip(t, hbasis):
        for i, hv in enumerate(h):
            vec[i] += coeff * hv
    return apply_vec(vec)


def _tilde_values(new_cx, qlab, a, b, phi_values):
    """Support function of the smoothing: value 1 on one edge ray at the new
    vertex, zero on its other rays, and whatever integral values at the two
    edge endpoints make the kinks agree along every wall touching the edge."""
    return _solve_kink_agreement(new_cx, phi_values,
                                 {qlab: {_E1: 1}}, (a, b))


def smooth_positive_node_local(cx, phi, node, variant="A"):
    """Smooth a positive node whose star is the standard local model.

    The node's edge is subdivided at an interior integral point carrying a
    new fan structure (variant "A": the eight octants; variant "B": the
    asymmetric eight-cone fan), after a minimal uniform dilation when the
    edge is too short.  Returns ``(new complex, new polarization)`` where the
    polarization is ``N*phi + phi_tilde`` with minimal ``N``.
    """
    from .mpl import MPLFunction, combine_min_n
    from .refine import RefinementError, refine_complex, rescale_complex
    if variant not in _VARIANTS:
        raise SurgeryError("variant must be 'A' or 'B'")
    data = _VARIANTS[variant]
    if isinstance(node, tuple) and node and node[0] == "edge":
        ekey = node[1]
    else:
        ekey = node
    if not (isinstance(ekey, tuple) and len(ekey) == 2):
        ekey = (frozenset(ekey), frozenset())
    disc = classify_delta(cx)
    tag = disc.node_tags.get(("edge", ekey))
    if tag != "positive_node":
        raise SurgeryError(
            "neighborhood mismatch: stratum at %r is %r, not a positive node"
            % (sorted(ekey[0], key=repr), tag))
    a, b, ring = _node_edge_star(cx, ekey)
    L = _edge_lattice_length(cx, ekey)
    s = data["scale"](L)
    cx2, phi2 = rescale_complex(cx, phi, s)
    h = data["height"](s * L)
    # subdivision of each ring cell at height h along the edge
    subs = {}
    point_labels = {}
    qlab = ("smooth_q", tuple(sorted(ekey[0], key=repr)))
    for cid, _ in ring:
        geom, vls, rls = cx2.cells[cid]
        va = geom.vertices[vls.index(a)]
        vb = geom.vertices[vls.index(b)]
        d = make_primitive(vsub(vb, va))
        q = tuple(va[i] + h * d[i] for i in range(3))
        subs[cid] = [([va, q], list(geom.rays)), ([q, vb], list(geom.rays))]
        point_labels[(cid, tuple(map(int, q)))] = qlab
    # The ring walk has no canonical starting wall or orientation, so try
    # each cyclic placement of the template's wall rays and keep the one
    # whose monodromy actually splits the node into two generic lines.
    sub_edges = [("edge", (frozenset((a, qlab)), frozenset())),
                 ("edge", (frozenset((qlab, b)), frozenset()))]
    failure = None
    for shift in range(4):
        rays = data["ring"][shift:] + data["ring"][:shift]
        override = dict(data["ends"](a, b))
        for (cid, wall_label), ray in zip(ring, rays):
            override[wall_label] = ray
        try:
            new_cx, new_phi, info = refine_complex(
                cx2, phi2, subs, point_labels=point_labels,
                fan_overrides={qlab: override})
        except RefinementError as e:
            if "rescale" in str(e):
                raise SurgeryError("integrality failure: %s" % e)
            failure = SurgeryError("neighborhood mismatch: %s" % e)
            continue
        tags = classify_delta(new_cx).node_tags
        if any(tags.get(se) not in (None, "generic") for se in sub_edges):
            failure = SurgeryError(
                "neighborhood mismatch: fan placement leaves the node intact")
            continue
        break
    else:
        raise failure
    # phi' = N*phi + phi_tilde, minimal N
    tilde_values = _tilde_values(new_cx, qlab, a, b, new_phi.values)
    tilde = MPLFunction(new_cx, tilde_values)
    _, combined, _cert = combine_min_n(new_cx, new_phi, tilde)
    return new_cx, combined


# ---------------------------------------------------------------------------
# global resolution of positive nodes on a prism ring


class SurgeryPlan:
    """Record of an applied node surgery.

    Carries the resulting complex and polarization, the dual-side pair the
    construction was performed on, the targeted node positions, the uniform
    dilation factor applied beforehand, and the convexity multiplier N used
    in ``N*phi + phi_tilde``.
    """

    def __init__(self, kind, targets, rescale, n_min, complex, phi,
                 dual_complex=None, dual_phi=None):
        self.kind = kind
        self.targets = targets
        self.rescale = rescale
        self.n_min = n_min
        self.complex = complex
        self.phi = phi
        self.dual_complex = dual_complex
        self.dual_phi = dual_phi


def _exact_multiple(v, d):
    """Integer t with v == t*d (d primitive), else None."""
    i = next((i for i, x in enumerate(d) if x != 0), None)
    if i is None:
        return None
    if v[i] % d[i] != 0:
        return None
    t = v[i] // d[i]
    return t if all(x == t * y for x, y in zip(v, d)) else None


def _prism_data(cx, P):
    """Combinatorics of a prism cell P = L x [0, m].

    Returns a dict with the axis direction, axis length m, the cyclically
    ordered bottom/top vertex labels, and the vertical edge keys.  Raises
    SurgeryError when P is not a prism or L is not Delzant.
    """
    from .lattice import elementary_divisors
    if P not in cx.cells:
        raise SurgeryError("unknown cell %r" % (P,))
    geom, vls, rls = cx.cells[P]
    if rls:
        raise SurgeryError("cell %r is unbounded, not a prism" % (P,))
    verts = geom.vertices
    nv = len(verts)
    edges = {tuple(sorted(f[1])) for f in geom.faces()
             if f[0] == 1 and not f[2]}
    axis = None
    for (i, j) in sorted(edges):
        d = make_primitive(vsub(verts[j], verts[i]))
        pair = {}
        ok = True
        for u in range(nv):
            mates = []
            for w in range(nv):
                if w == u:
                    continue
                t = _exact_multiple(vsub(verts[w], verts[u]), d)
                if t is not None and t > 0:
                    mates.append((w, t))
            if len(mates) == 1 and tuple(sorted((u, mates[0][0]))) in edges:
                pair[u] = mates[0]
        bottoms = [u for u in pair if pair[u][0] not in pair]
        tops = {pair[u][0] for u in bottoms}
        if (len(bottoms) * 2 == nv and len(tops) == len(bottoms)
                and len({pair[u][1] for u in bottoms}) == 1
                and set(range(nv)) == set(bottoms) | tops):
            axis = (d, pair, bottoms)
            break
    if axis is None:
        raise SurgeryError("cell %r is not a prism L x [0, m]" % (P,))
    d, pair, bottoms = axis
    m = pair[bottoms[0]][1]
    # cyclic order of the bottom polygon via its horizontal edges
    nbrs = {u: [w for w in bottoms if tuple(sorted((u, w))) in edges]
            for u in bottoms}
    if any(len(ns) != 2 for ns in nbrs.values()):
        raise SurgeryError("bottom face of %r is not a polygon" % (P,))
    cyc = [bottoms[0]]
    prev = None
    while True:
        nxt = [w for w in nbrs[cyc[-1]] if w != prev]
        if not nxt:
            raise SurgeryError("bottom cycle of %r is broken" % (P,))
        prev = cyc[-1]
        if nxt[0] == cyc[0]:
            break
        cyc.append(nxt[0])
    if len(cyc) != len(bottoms):
        raise SurgeryError("bottom cycle of %r is broken" % (P,))
    # Delzant: the corner directions of L generate the plane lattice
    for idx, u in enumerate(cyc):
        u1 = make_primitive(vsub(verts[cyc[(idx + 1) % len(cyc)]], verts[u]))
        u2 = make_primitive(vsub(verts[cyc[idx - 1]], verts[u]))
        if list(elementary_divisors([list(u1), list(u2)])) != [1, 1]:
            raise SurgeryError(
                "base polygon of %r is not Delzant at corner %r"
                % (P, vls[u]))
    bottom = [vls[u] for u in cyc]
    top = [vls[pair[u][0]] for u in cyc]
    ekeys = [(frozenset((b, t)), frozenset()) for b, t in zip(bottom, top)]
    return {"axis": d, "m": m, "k": len(cyc), "bottom": bottom,
            "top": top, "edge_keys": ekeys}


def _require_positive_nodes(cx, edge_keys):
    disc = classify_delta(cx)
    for ek in edge_keys:
        tag = disc.node_tags.get(("edge", ek))
        if tag != "positive_node":
            raise SurgeryError(
                "edge %r carries %r, not a positive node"
                % (sorted(ek[0], key=repr), tag))


def _dual_edge_of_face(dmap, labels):
    key = (frozenset(labels), frozenset())
    dk = dmap.face_map.get(key)
    if dk is None:
        raise SurgeryError("face %r has no dual edge"
                           % (sorted(labels, key=repr),))
    return dk


def _edge_far_vertex(key, v0):
    vs = set(key[0])
    if v0 not in vs or len(vs) != 2:
        raise SurgeryError("edge %r does not contain %r" % (key, v0))
    (other,) = vs - {v0}
    return other


def _dual_ring_data(dcx, dmap, P, prism):
    """Locate, on the dual side, the vertex fan of the ring construction:
    v0 (dual of P), the far vertices v_j of the edges between consecutive
    node faces, and the two transversal edges with their far endpoints."""
    v0 = P
    k = prism["k"]
    efaces = [dmap.face_map.get(ek) for ek in prism["edge_keys"]]
    if any(f is None for f in efaces):
        raise SurgeryError("node edge of %r has no dual face" % (P,))
    vj = []
    for j in range(k):
        common = (efaces[j - 1][0] & efaces[j][0]) - {v0}
        if len(common) != 1:
            raise SurgeryError(
                "dual faces of %r do not meet along edges at %r" % (P, v0))
        vj.append(next(iter(common)))
    for j in range(k):
        if not {v0, vj[j], vj[(j + 1) % k]} <= set(efaces[j][0]):
            raise SurgeryError("dual face %d of %r is not a quadrilateral"
                               % (j, P))
    lplus = _dual_edge_of_face(dmap, prism["top"])
    lminus = _dual_edge_of_face(dmap, prism["bottom"])
    uplus = _edge_far_vertex(lplus, v0)
    uminus = _edge_far_vertex(lminus, v0)
    return {"v0": v0, "vj": vj, "uplus": uplus, "uminus": uminus}


def _vertex_coord(cx, cid, label):
    geom, vls, rls = cx.cells[cid]
    return geom.vertices[vls.index(label)]


def _corner_point(dcx, cid, v0, far):
    """Coordinate of v0 in cell cid and of the first interior integral point
    of the edge v0-far."""
    c0 = _vertex_coord(dcx, cid, v0)
    cf = _vertex_coord(dcx, cid, far)
    step = make_primitive(vsub(cf, c0))
    if _exact_multiple(vsub(cf, c0), step) < 2:
        raise SurgeryError(
            "rescale required: no interior integral point between "
            "%r and %r" % (v0, far))
    return c0, tuple(a + b for a, b in zip(c0, step))


def _ring_subdivision(dcx, P, prism, ring, subs, point_labels, skip=()):
    """Cut the corner simplex conv(v^pm, v0, v_j, v_{j+1}) off each cell
    around the ring, recording the two new edge points.  Cells in ``skip``
    are left for a dedicated joint subdivision."""
    v0, vj = ring["v0"], ring["vj"]
    k = len(vj)
    labels = {}
    for sign, side, far in (("+", prism["top"], ring["uplus"]),
                            ("-", prism["bottom"], ring["uminus"])):
        plab = ("ring_pt", P, sign)
        labels[sign] = plab
        for j in range(k):
            cid = side[j]
            if cid in skip:
                continue
            if cid in subs:
                raise SurgeryError(
                    "cell %r targeted by two ring subdivisions" % (cid,))
            geom, vls, rls = dcx.cells[cid]
            c0, vp = _corner_point(dcx, cid, v0, far)
            ca = _vertex_coord(dcx, cid, vj[j])
            cb = _vertex_coord(dcx, cid, vj[(j + 1) % k])
            corner = [vp, c0, ca, cb]
            rest = [v for v, l in zip(geom.vertices, vls) if l != v0] + [vp]
            subs[cid] = [corner, rest]
            point_labels[(cid, vp)] = plab
    return labels


def _covector(gens, vals):
    """Rational covector m with m . g_i = vals_i, from three independent
    generators; remaining generators must be consistent."""
    from .lattice import solve_rational, mat_from_cols
    idx = []
    for i in range(len(gens)):
        trial = idx + [i]
        if rank([list(gens[t]) for t in trial]) == len(trial):
            idx = trial
        if len(idx) == len(gens[0]):
            break
    if len(idx) != len(gens[0]):
        raise SurgeryError("degenerate cone in kink computation")
    rows = [list(gens[t]) for t in idx]
    m = solve_rational(rows, [vals[t] for t in idx])
    for g, v in zip(gens, vals):
        if sum(a * b for a, b in zip(m, g)) != v:
            raise SurgeryError("covector mismatch on cone generators")
    return tuple(m)


def _pair_kink(mA, mB, wall_gens, insideA):
    """Kink of the piecewise linear pair (mA on side A, mB on the other)
    across the wall spanned by wall_gens, oriented toward side A."""
    from .lattice import integer_kernel
    normal = integer_kernel([list(g) for g in wall_gens])
    if len(normal) != 1:
        raise SurgeryError("degenerate wall in kink computation")
    n = normal[0]
    num = sum((a - b) * x for a, b, x in zip(mA, mB, insideA))
    den = sum(a * b for a, b in zip(n, insideA))
    if den == 0:
        raise SurgeryError("degenerate wall in kink computation")
    return Fraction(num, abs(den))


def _transversal_monodromy(dcx, v0, far):
    """Monodromy around the edge v0-far, conjugated into the chart at v0;
    the identity when the edge is not singular."""
    from .complex import discriminant
    ekey = (frozenset((v0, far)), frozenset())
    for s in discriminant(dcx).active():
        if s.edge_key != ekey:
            continue
        if s.base_label == v0:
            return s.monodromy
        rec = dcx.faces[s.face_key]
        c1 = min(cid for cid, _, _ in rec.incident)
        W = transport(dcx, [v0, c1, s.base_label])
        Winv = int_mat(mat_inverse(W))
        return matmul(matmul(W, s.monodromy), Winv)
    n = len(next(iter(dcx.cells.values()))[0].vertices[0])
    return identity(n)


def _cell_point_neighbors(dcx, cid, vp, subs, point_labels):
    """Edge neighbors of the new point ``vp`` over all sub-pieces of cell
    ``cid`` containing it, as {label: coordinate in the cell chart}."""
    from .complex import CellGeometry
    geom, vls, rls = dcx.cells[cid]
    coord_label = {tuple(v): l for v, l in zip(geom.vertices, vls)}
    vp = tuple(vp)
    out = {}
    for piece in subs[cid]:
        pv = [tuple(map(int, p)) for p in piece]
        if vp not in pv:
            continue
        g = CellGeometry(pv)
        i = g.vertices.index(vp)
        for kind, j in g.edge_neighbors(i):
            if kind != "v":
                continue
            c = g.vertices[j]
            lab = coord_label.get(c, point_labels.get((cid, c)))
            if lab is None:
                raise SurgeryError(
                    "unlabeled vertex %r in the subdivision of %r" % (c, cid))
            if out.setdefault(lab, c) != c:
                raise SurgeryError(
                    "two positions for %r in cell %r" % (lab, cid))
    return out


def _solve_point_gauge(dcx, dphi, v0, far, cells, vp_of, nbrs_of):
    """Fan and slope values at a new point on the edge v0-far.

    The edge carries monodromy, so no induced fan exists at an interior
    point.  Rays toward all sub-piece neighbors are carried into the chart
    at v0 through each surrounding cell; this parallel gauge is corrected
    by powers of the edge monodromy per cell, chosen so that the
    polarization's kinks at the new point across the pieces of the original
    walls reproduce the kinks of those walls.  The slope values are
    reported in the same gauge as the rays."""
    from itertools import product as iproduct
    from .lattice import transpose
    k = len(cells)
    plf0 = dphi.vertex_plf(v0)
    M = _transversal_monodromy(dcx, v0, far)
    Minv = int_mat(mat_inverse(M))
    rays_cell, vals, mcell = [], {}, []
    for i, cid in enumerate(cells):
        T = dcx.chart(v0, cid)
        cone0 = dcx.vertex_fans[v0].cone_of[cid]
        mC = _covector(cone0.generators,
                       [plf0.value(g) for g in cone0.generators])
        mcell.append(mC)
        rr = {}
        for lab, coord in nbrs_of[i].items():
            ray = tuple(matvec(T, make_primitive(vsub(coord, vp_of[i]))))
            rr[lab] = ray
            val = sum(a * b for a, b in zip(mC, ray))
            if vals.setdefault(lab, val) != val:
                raise SurgeryError(
                    "polarization slope is ambiguous toward %r" % (lab,))
        rays_cell.append(rr)
    # kink targets across the walls between consecutive cells
    walls = []
    for i in range(k):
        a, b = i, (i - 1) % k
        common = sorted(set(rays_cell[a]) & set(rays_cell[b]), key=repr)
        gens = [rays_cell[a][l] for l in common]
        if rank([list(g) for g in gens]) != 2:
            raise SurgeryError(
                "wall between %r and %r is degenerate at the new point"
                % (cells[a], cells[b]))
        inside = None
        for lab in sorted(set(rays_cell[a]) - set(common), key=repr):
            if rank([list(g) for g in gens + [rays_cell[a][lab]]]) == 3:
                inside = lab
                break
        if inside is None:
            raise SurgeryError(
                "cell %r is degenerate at the new point" % (cells[a],))
        target = _pair_kink(mcell[a], mcell[b], gens, rays_cell[a][inside])
        walls.append((a, b, common, inside, target))

    def shear(u, x):
        A = M if u > 0 else Minv
        y = tuple(x)
        for _ in range(abs(u)):
            y = tuple(matvec(A, y))
        return y

    def mshear(u, m):
        A = Minv if u > 0 else M        # covector composed with M^(-u)
        y = tuple(m)
        for _ in range(abs(u)):
            y = tuple(matvec(transpose(A), y))
        return y

    best = None
    for u in iproduct((0, 1, -1), repeat=k):
        fan = {}
        ok = True
        for i in range(k):
            for lab, ray in rays_cell[i].items():
                s = shear(u[i], ray)
                if fan.setdefault(lab, s) != s:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        for a, b, common, inside, target in walls:
            gens = [fan[l] for l in common]
            try:
                kink = _pair_kink(mshear(u[a], mcell[a]),
                                  mshear(u[b], mcell[b]), gens,
                                  shear(u[a], rays_cell[a][inside]))
            except SurgeryError:
                ok = False
                break
            if kink != target:
                ok = False
                break
        if ok:
            cost = sum(abs(x) for x in u)
            if best is None or cost < best[0]:
                best = (cost, fan)
    if best is None:
        raise SurgeryError(
            "no fan at the new point of the edge %r-%r reproduces the "
            "original wall kinks" % (v0, far))
    fan = best[1]
    vv = {}
    for lab, ray in fan.items():
        v = Fraction(vals[lab])
        if v.denominator != 1:
            raise SurgeryError(
                "non-integral polarization slope toward %r; rescale the "
                "polarization" % (lab,))
        if vv.setdefault(ray, int(v)) != int(v):
            raise SurgeryError(
                "polarization slope is ambiguous toward %r" % (lab,))
    return fan, vv


def _ring_point_fans(dcx, dphi, prism, ring, plabels, subs, point_labels):
    """Fan and slope overrides at the two new transversal edge points of a
    ring, solved from the recorded subdivision pieces."""
    v0 = ring["v0"]
    overrides, phi_values = {}, {}
    for sign, side, far in (("+", prism["top"], ring["uplus"]),
                            ("-", prism["bottom"], ring["uminus"])):
        vp_of, nbrs_of = [], []
        for cid in side:
            _c0, vp = _corner_point(dcx, cid, v0, far)
            vp_of.append(vp)
            nbrs_of.append(_cell_point_neighbors(dcx, cid, vp, subs,
                                                 point_labels))
        fan, vv = _solve_point_gauge(dcx, dphi, v0, far, side, vp_of,
                                     nbrs_of)
        overrides[plabels[sign]] = fan
        phi_values[plabels[sign]] = vv
    return overrides, phi_values


def _ring_tilde(new_cx, phi_values, matchings, ring_specs):
    """Ring support function: at each v0 the value is -1 toward each of its
    v_j, 1-2n toward its upper edge point and 0 toward the lower one; 1
    toward v0 at each v_j; n toward v0 at the two new edge points.  Several
    rings are superimposed into one prescription; the values on the
    remaining rays at the new edge points are solved for."""
    fixed = {}
    free = []
    for ring, plabels, n, w in ring_specs:
        v0, vj = ring["v0"], ring["vj"]
        f0 = fixed.setdefault(v0, {})
        for v in vj:
            r = matchings[v0][v]
            f0[r] = f0.get(r, 0) - w
            fv = fixed.setdefault(v, {})
            rv = matchings[v][v0]
            fv[rv] = fv.get(rv, 0) + w
        rp = matchings[v0][plabels["+"]]
        f0[rp] = f0.get(rp, 0) + w * (1 - 2 * n)
        for sign in ("+", "-"):
            p = plabels[sign]
            fp = fixed.setdefault(p, {})
            r0 = matchings[p][v0]
            fp[r0] = fp.get(r0, 0) + w * n
            if p not in free:
                free.append(p)
    # rays not pinned by the prescription are solved for: non-simplicial
    # cones of the refined fans force values on them by linearity
    for lab in sorted(fixed, key=repr):
        if lab not in free:
            free.append(lab)
    return _solve_kink_agreement(new_cx, phi_values, fixed, free)


def _transversal_scale(dcx, rings):
    """Uniform dilation making every transversal edge long enough to carry
    an interior integral point."""
    for ring in rings:
        for far in (ring["uplus"], ring["uminus"]):
            ln = _edge_lattice_length(dcx, (frozenset((ring["v0"], far)),
                                            frozenset()))
            if ln < 2:
                return 2
    return 1


def _ring_edge_length(dcx, ring):
    """Common lattice length n of the edges from v0 to its ring vertices."""
    lens = {_edge_lattice_length(dcx, (frozenset((ring["v0"], v)),
                                       frozenset()))
            for v in ring["vj"]}
    if len(lens) != 1:
        raise SurgeryError(
            "edges at %r have unequal lattice lengths" % (ring["v0"],))
    return lens.pop()


def _apply_ring_surgery(kind, targets, scale, dcx, dphi, ring_specs, subs,
                        point_labels, overrides, phi_values):
    """Refine, solve for the ring support function, polarize and transform
    back; common tail of the prism-ring surgeries."""
    from .legendre import discrete_legendre
    from .mpl import MPLFunction, combine_min_n
    from .refine import RefinementError, refine_complex, extract_matchings
    try:
        new_cx, new_phi, info = refine_complex(dcx, dphi, subs,
                                               point_labels=point_labels,
                                               fan_overrides=overrides,
                                               phi_overrides=phi_values)
    except RefinementError as e:
        raise SurgeryError("ring refinement failed: %s" % e)
    matchings = extract_matchings(new_cx)
    tilde_values = _ring_tilde(new_cx, new_phi.values, matchings, ring_specs)
    tilde = MPLFunction(new_cx, tilde_values)
    N, combined, _cert = combine_min_n(new_cx, new_phi, tilde)
    res_cx, res_phi, _ = discrete_legendre(new_cx, combined)
    return SurgeryPlan(kind, targets, scale, N, res_cx, res_phi,
                       new_cx, combined)


def resolve_positive_ring(cx, phi, P):
    """Resolve the positive nodes sitting on the vertical edges of the prism
    cell ``P = L x [0, m]``.

    The construction runs on the dual side: the faces dual to the node
    edges are cut by the diagonals avoiding the vertex dual to P, the cells
    around that vertex are split by corner simplices through the closest
    interior integral points of the two transversal edges, and a support
    function makes the refinement polarized.  Transforming back yields the
    resolution, where each node is replaced by two positive 3-valent
    vertices.
    """
    from .legendre import discrete_legendre
    from .refine import rescale_complex
    prism = _prism_data(cx, P)
    _require_positive_nodes(cx, prism["edge_keys"])
    dcx, dphi, dmap = discrete_legendre(cx, phi)
    ring = _dual_ring_data(dcx, dmap, P, prism)
    scale = _transversal_scale(dcx, [ring])
    dcx, dphi = rescale_complex(dcx, dphi, scale)
    n = _ring_edge_length(dcx, ring)
    subs, point_labels = {}, {}
    plabels = _ring_subdivision(dcx, P, prism, ring, subs, point_labels)
    overrides, phi_values = _ring_point_fans(dcx, dphi, prism, ring, plabels,
                                             subs, point_labels)
    return _apply_ring_surgery(
        "prism-ring", [("edge", ek) for ek in prism["edge_keys"]],
        scale, dcx, dphi, [(ring, plabels, n, 1)], subs, point_labels,
        overrides, phi_values)


def _shared_point_cut(dcx, cid, ringA, ringB, sign, pa, pb, va, vb, subs,
                      point_labels):
    """Joint subdivision of a cell shared by two rings: one corner simplex
    per ring vertex through its new transversal edge point, both resting on
    the diagonal va-vb, plus the closure of the complement."""
    if cid in subs:
        raise SurgeryError("cell %r targeted by two ring subdivisions"
                           % (cid,))
    farA = ringA["uplus"] if sign == "+" else ringA["uminus"]
    farB = ringB["uplus"] if sign == "+" else ringB["uminus"]
    c0, vp = _corner_point(dcx, cid, ringA["v0"], farA)
    w0, wp = _corner_point(dcx, cid, ringB["v0"], farB)
    ca = _vertex_coord(dcx, cid, va)
    cb = _vertex_coord(dcx, cid, vb)
    geom, vls, rls = dcx.cells[cid]
    rest = [v for v, l in zip(geom.vertices, vls)
            if l not in (ringA["v0"], ringB["v0"])] + [vp, wp]
    subs[cid] = [[vp, c0, ca, cb], [wp, w0, ca, cb], rest]
    point_labels[(cid, vp)] = pa
    point_labels[(cid, wp)] = pb


def resolve_shared_point(cx, phi, P, P2):
    """Simultaneously resolve the positive nodes of two prism cells whose
    node edges share at most one edge.

    When the prisms share one node edge, the face dual to it receives the
    diagonal avoiding both prism duals and the two cells around it are cut
    by one corner simplex per prism; otherwise the two ring constructions
    run independently in a single refinement.  The polarization is
    ``N*phi + phi_tilde_1 + phi_tilde_2``.
    """
    from .legendre import discrete_legendre
    from .refine import rescale_complex
    if P == P2:
        raise SurgeryError("the two prism cells must be distinct")
    prismA = _prism_data(cx, P)
    prismB = _prism_data(cx, P2)
    shared = [ek for ek in prismA["edge_keys"]
              if ek in set(prismB["edge_keys"])]
    if len(shared) > 1:
        raise SurgeryError(
            "use resolve_shared_edge: %r and %r share %d node edges"
            % (P, P2, len(shared)))
    _require_positive_nodes(cx, prismA["edge_keys"] + prismB["edge_keys"])
    if shared:
        # orient the second prism along the first across the shared edge
        jA = prismA["edge_keys"].index(shared[0])
        jB = prismB["edge_keys"].index(shared[0])
        if prismB["top"][jB] != prismA["top"][jA]:
            prismB = dict(prismB, bottom=prismB["top"],
                          top=prismB["bottom"])
    dcx, dphi, dmap = discrete_legendre(cx, phi)
    ringA = _dual_ring_data(dcx, dmap, P, prismA)
    ringB = _dual_ring_data(dcx, dmap, P2, prismB)
    scale = _transversal_scale(dcx, [ringA, ringB])
    dcx, dphi = rescale_complex(dcx, dphi, scale)
    nA = _ring_edge_length(dcx, ringA)
    nB = _ring_edge_length(dcx, ringB)
    subs, point_labels = {}, {}
    if shared:
        kA, kB = len(ringA["vj"]), len(ringB["vj"])
        va, vb = ringA["vj"][jA], ringA["vj"][(jA + 1) % kA]
        if {va, vb} != {ringB["vj"][jB], ringB["vj"][(jB + 1) % kB]}:
            raise SurgeryError(
                "configuration mismatch: the dual face of the shared edge "
                "is not a common quadrilateral of %r and %r" % (P, P2))
        shared_cells = {"+": prismA["top"][jA], "-": prismA["bottom"][jA]}
        skip = set(shared_cells.values())
        plabA = _ring_subdivision(dcx, P, prismA, ringA, subs, point_labels,
                                  skip=skip)
        plabB = _ring_subdivision(dcx, P2, prismB, ringB, subs, point_labels,
                                  skip=skip)
        for sign, cid in shared_cells.items():
            _shared_point_cut(dcx, cid, ringA, ringB, sign, plabA[sign],
                              plabB[sign], va, vb, subs, point_labels)
    else:
        plabA = _ring_subdivision(dcx, P, prismA, ringA, subs, point_labels)
        plabB = _ring_subdivision(dcx, P2, prismB, ringB, subs, point_labels)
    overrides, phi_values = _ring_point_fans(dcx, dphi, prismA, ringA, plabA,
                                             subs, point_labels)
    ovB, pvB = _ring_point_fans(dcx, dphi, prismB, ringB, plabB,
                                subs, point_labels)
    overrides.update(ovB)
    phi_values.update(pvB)
    targets = [("edge", ek) for ek in prismA["edge_keys"]]
    targets += [("edge", ek) for ek in prismB["edge_keys"]
                if ek not in set(prismA["edge_keys"])]
    return _apply_ring_surgery(
        "shared-point", targets, scale, dcx, dphi,
        [(ringA, plabA, nA, 1), (ringB, plabB, nB, 1)], subs, point_labels,
        overrides, phi_values)


def _shared_edge_cut(dcx, cid, ringA, ringB, sign, pa, pb, vk, wk, subs,
                     point_labels):
    """Joint subdivision of a cell shared by two rings meeting along the
    edge v0-w0: the tetrahedron conv(v0, w0, w_k, w^s), the polytope
    conv(v0, v_k, w_k, v^s, w^s), and the closure of the complement.  The
    shared square faces acquire the diagonal from v0 to w_k."""
    if cid in subs:
        raise SurgeryError("cell %r targeted by two ring subdivisions"
                           % (cid,))
    farA = ringA["uplus"] if sign == "+" else ringA["uminus"]
    farB = ringB["uplus"] if sign == "+" else ringB["uminus"]
    c0, vp = _corner_point(dcx, cid, ringA["v0"], farA)
    w0c, wp = _corner_point(dcx, cid, ringB["v0"], farB)
    ck = _vertex_coord(dcx, cid, vk)
    cwk = _vertex_coord(dcx, cid, wk)
    geom, vls, rls = dcx.cells[cid]
    rest = [v for v, l in zip(geom.vertices, vls)
            if l not in (ringA["v0"], ringB["v0"])] + [vp, wp]
    subs[cid] = [[c0, w0c, cwk, wp], [c0, ck, cwk, vp, wp], rest]
    point_labels[(cid, vp)] = pa
    point_labels[(cid, wp)] = pb


def resolve_shared_edge(cx, phi, P, P2):
    """Simultaneously resolve the positive nodes of two prism cells whose
    node edge sets share exactly two edges (adjacent corners of both base
    polygons, i.e. the prisms share a square face carrying two nodes).

    On the dual side the two ring vertices v0 and w0 are joined by an edge;
    the two cells around that edge are cut jointly so that the shared
    square faces acquire the diagonal through v0, and the polarization is
    ``N*phi + phi_tilde_1 + phi_tilde_2``, realized as the weighted
    superposition of the two ring support functions (the second with
    weight 2).
    """
    from .legendre import discrete_legendre
    from .refine import rescale_complex
    if P == P2:
        raise SurgeryError("the two prism cells must be distinct")
    prismA = _prism_data(cx, P)
    prismB = _prism_data(cx, P2)
    sharedset = set(prismB["edge_keys"])
    shared = [ek for ek in prismA["edge_keys"] if ek in sharedset]
    if len(shared) < 2:
        raise SurgeryError(
            "use resolve_shared_point: %r and %r share %d node edges"
            % (P, P2, len(shared)))
    if len(shared) > 2:
        raise SurgeryError(
            "unsupported configuration: %r and %r share %d node edges"
            % (P, P2, len(shared)))
    _require_positive_nodes(cx, prismA["edge_keys"] + prismB["edge_keys"])
    # orient the second prism along the first across a shared edge
    jA0 = prismA["edge_keys"].index(shared[0])
    jB0 = prismB["edge_keys"].index(shared[0])
    if prismB["top"][jB0] != prismA["top"][jA0]:
        prismB = dict(prismB, bottom=prismB["top"], top=prismB["bottom"])
    dcx, dphi, dmap = discrete_legendre(cx, phi)
    ringA = _dual_ring_data(dcx, dmap, P, prismA)
    ringB = _dual_ring_data(dcx, dmap, P2, prismB)
    scale = _transversal_scale(dcx, [ringA, ringB])
    dcx, dphi = rescale_complex(dcx, dphi, scale)
    nA = _ring_edge_length(dcx, ringA)
    nB = _ring_edge_length(dcx, ringB)
    if nA != nB:
        raise SurgeryError(
            "the rings of %r and %r have different edge lengths" % (P, P2))
    kA, kB = len(ringA["vj"]), len(ringB["vj"])
    jsA = sorted(prismA["edge_keys"].index(ek) for ek in shared)
    # order the two shared indices consecutively: j2 == j1 + 1 (mod kA)
    j1, j2 = jsA
    if (j1 + 1) % kA != j2:
        if (j2 + 1) % kA == j1:
            j1, j2 = j2, j1
        else:
            raise SurgeryError(
                "configuration mismatch: the shared node edges of %r and %r "
                "are not adjacent corners" % (P, P2))
    if ringA["vj"][j2] != ringB["v0"]:
        raise SurgeryError(
            "configuration mismatch: the dual rings of %r and %r do not "
            "meet along an edge" % (P, P2))
    subs, point_labels = {}, {}
    skip = {prismA["top"][j] for j in (j1, j2)}
    skip |= {prismA["bottom"][j] for j in (j1, j2)}
    plabA = _ring_subdivision(dcx, P, prismA, ringA, subs, point_labels,
                              skip=skip)
    plabB = _ring_subdivision(dcx, P2, prismB, ringB, subs, point_labels,
                              skip=skip)
    for sign in ("+", "-"):
        sideA = prismA["top"] if sign == "+" else prismA["bottom"]
        sideB = prismB["top"] if sign == "+" else prismB["bottom"]
        for j in (j1, j2):
            cid = sideA[j]
            if cid not in sideB:
                raise SurgeryError(
                    "configuration mismatch: %r is not a ring cell of %r"
                    % (cid, P2))
            iB = sideB.index(cid)
            # non-partner flanking ring vertices of the cell in each ring
            vk = (ringA["vj"][j]
                  if ringA["vj"][(j + 1) % kA] == ringB["v0"]
                  else ringA["vj"][(j + 1) % kA])
            wk = (ringB["vj"][iB]
                  if ringB["vj"][(iB + 1) % kB] == ringA["v0"]
                  else ringB["vj"][(iB + 1) % kB])
            _shared_edge_cut(dcx, cid, ringA, ringB, sign, plabA[sign],
                             plabB[sign], vk, wk, subs, point_labels)
    overrides, phi_values = _ring_point_fans(dcx, dphi, prismA, ringA, plabA,
                                             subs, point_labels)
    ovB, pvB = _ring_point_fans(dcx, dphi, prismB, ringB, plabB,
                                subs, point_labels)
    overrides.update(ovB)
    phi_values.update(pvB)
    targets = [("edge", ek) for ek in prismA["edge_keys"]]
    targets += [("edge", ek) for ek in prismB["edge_keys"]
                if ek not in set(prismA["edge_keys"])]
    return _apply_ring_surgery(
        "shared-edge", targets, scale, dcx, dphi,
        [(ringA, plabA, nA, 1), (ringB, plabB, nB, 2)], subs, point_labels,
        overrides, phi_values)
