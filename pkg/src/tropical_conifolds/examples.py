"""Builders for the standard local models and the prism-torus family.

Each builder returns a Model holding the assembled complex and the
polarization data (per-vertex ray values of the piecewise linear function).
"""

from .complex import GluingSpec, VertexFan, assemble
from .lattice import Cone, Fan


class Model:
    def __init__(self, cx, polarization, spec=None, matchings=None):
        self.complex = cx
        self.polarization = polarization  # label -> {ray tuple: int}
        self.spec = spec
        self.matchings = matchings


def fans_from_matchings(spec, matchings):
    """Build VertexFan structures from one matching dict per vertex label
    (neighbor label -> ray).  The cone of each incident cell is generated by
    the matched rays of its edges at the vertex."""
    fans = {}
    for label, match in matchings.items():
        cone_of = {}
        per_cell = {}
        for cid in spec.order:
            geom, vls, rls = spec.cells[cid]
            if label not in vls:
                continue
            i = vls.index(label)
            rays = []
            cell_match = {}
            for nb in geom.edge_neighbors(i):
                nb_label = vls[nb[1]] if nb[0] == "v" else rls[nb[1]]
                ray = match[nb_label]
                rays.append(ray)
                cell_match[nb_label] = ray
            n = len(rays[0])
            cone_of[cid] = Cone(rays, n)
            per_cell[cid] = cell_match
        cones = []
        for c in cone_of.values():
            if all(c.key() != d.key() for d in cones):
                cones.append(c)
        fans[label] = VertexFan(Fan(cones), cone_of, per_cell)
    return fans


def _build(dimension, cells, matchings, polarization):
    spec = GluingSpec(dimension)
    for cid, vertices, vlabels, rays, rlabels in cells:
        spec.add_cell(cid, vertices, vlabels, rays, rlabels)
    fans = fans_from_matchings(spec, matchings)
    cx = assemble(spec, fans)
    return Model(cx, polarization, spec, matchings)


# ---------------------------------------------------------------------------
# dimension 2: focus-focus


def focus_focus():
    """Triangle and unit square glued along one edge; one interior singular
    point with monodromy [[1,1],[0,1]]."""
    cells = [
        ("t", [(0, 0), (1, 0), (0, 1)], ["v1", "v2", "a"], (), ()),
        ("s", [(0, 0), (1, 0), (0, 1), (1, 1)], ["v1", "v2", "b", "c"], (), ()),
    ]
    e1, e2 = (1, 0), (0, 1)
    m1 = (-1, 0)
    m2 = (0, -1)
    matchings = {
        "v1": {"v2": e1, "a": e2, "b": m2},
        "v2": {"v1": e1, "a": e2, "c": m2},
    }
    pol = {v: {e1: 0, e2: 1, m2: 0} for v in ("v1", "v2")}
    return _build(2, cells, matchings, pol)


# ---------------------------------------------------------------------------
# dimension 3 local models


def negative_vertex():
    """Simplex and triangular prism glued along a triangle; Y-shaped
    discriminant with a trivalent negative vertex."""
    P3 = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    prism = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)]
    cells = [
        ("simplex", P3, ["v1", "v2", "v3", "a"], (), ()),
        ("prism", prism, ["v1", "v2", "v3", "u1", "u2", "u3"], (), ()),
    ]
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    m3 = (0, 0, -1)
    matchings = {
        "v1": {"v2": e1, "v3": e2, "a": e3, "u1": m3},
        "v2": {"v1": e1, "v3": e2, "a": e3, "u2": m3},
        "v3": {"v1": e1, "v2": e2, "a": e3, "u3": m3},
    }
    pol = {v: {e1: 0, e2: 0, e3: 1, m3: 0} for v in ("v1", "v2", "v3")}
    return _build(3, cells, matchings, pol)


def positive_vertex():
    """Three unbounded vertical slabs over a fan of three plane sectors;
    trivalent positive vertex on the common vertical edge."""
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    w0 = (-1, -1, -1)
    w1 = (0, -1, -1)
    p0, p1 = (0, 0, 0), (0, 0, 1)
    cells = [
        # Q1 = {x >= max(y, 0)}: sector between (1,1) and (0,-1)
        ("Q1", [p0, p1], ["p0", "p1"], [(1, 1, 0), (0, -1, 0)], ["rd", "rmy"]),
        # Q2 = {y >= max(x, 0)}: sector between (1,1) and (-1,0)
        ("Q2", [p0, p1], ["p0", "p1"], [(1, 1, 0), (-1, 0, 0)], ["rd", "rmx"]),
        # Q3 = third quadrant
        ("Q3", [p0, p1], ["p0", "p1"], [(-1, 0, 0), (0, -1, 0)], ["rmx", "rmy"]),
    ]
    matchings = {
        "p0": {"p1": e1, "rmx": e2, "rmy": e3, "rd": w0},
        "p1": {"p0": e1, "rmx": e2, "rmy": e3, "rd": w1},
    }
    pol = {
        "p0": {e1: 0, e2: 0, e3: 0, w0: 1},
        "p1": {e1: 0, e2: 0, e3: 0, w1: 1},
    }
    return _build(3, cells, matchings, pol)


def negative_node():
    """Two triangular prisms glued along their slanted square faces; the
    discriminant is a 4-valent cross inside the shared square (negative node)."""
    T = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)]
    # slanted square face x + y = 1: (1,0,0), (0,1,0), (0,1,1), (1,0,1);
    # the two squares are identified by the half-turn swapping v2 and v4
    lab1 = {(0, 1, 0): "v1", (0, 1, 1): "v2", (1, 0, 1): "v3", (1, 0, 0): "v4",
            (0, 0, 0): "a1", (0, 0, 1): "a2"}
    lab2 = {(0, 1, 0): "v1", (1, 0, 0): "v2", (1, 0, 1): "v3", (0, 1, 1): "v4",
            (0, 0, 0): "b1", (0, 0, 1): "b2"}
    cells = [
        ("T1", T, [lab1[v] for v in T], (), ()),
        ("T2", T, [lab2[v] for v in T], (), ()),
    ]
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    m2 = (0, -1, 0)
    # at each square vertex: previous square vertex -> e1, next -> e3,
    # off-square edge -> e2 in the first prism / -e2 in the second
    off2 = {"v1": "b1", "v2": "b1", "v3": "b2", "v4": "b2"}
    matchings = {
        "v1": {"v4": e1, "v2": e3, "a1": e2, off2["v1"]: m2},
        "v2": {"v1": e1, "v3": e3, "a2": e2, off2["v2"]: m2},
        "v3": {"v2": e1, "v4": e3, "a2": e2, off2["v3"]: m2},
        "v4": {"v3": e1, "v1": e3, "a1": e2, off2["v4"]: m2},
    }
    pol = {v: {e1: 0, e2: 1, e3: 0, m2: 0} for v in ("v1", "v2", "v3", "v4")}
    return _build(3, cells, matchings, pol)


def positive_node():
    """Four vertical slabs over the plane quadrants; the discriminant is an
    X shape crossing at the midpoint of the common vertical edge."""
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    w = (-1, -1, 0)
    m3 = (0, 0, -1)
    p0, p1 = (0, 0, 0), (0, 0, 1)
    rx, ry, rmx, rmy = (1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)
    cells = [
        ("L1", [p0, p1], ["p0", "p1"], [rx, ry], ["rx", "ry"]),
        ("L2", [p0, p1], ["p0", "p1"], [rmx, ry], ["rmx", "ry"]),
        ("L3", [p0, p1], ["p0", "p1"], [rmx, rmy], ["rmx", "rmy"]),
        ("L4", [p0, p1], ["p0", "p1"], [rx, rmy], ["rx", "rmy"]),
    ]
    matchings = {
        "p0": {"p1": e1, "ry": e3, "rmx": e2, "rmy": m3, "rx": w},
        "p1": {"p0": e1, "ry": w, "rmx": m3, "rmy": e2, "rx": e3},
    }
    pol = {
        "p0": {e1: 0, e2: 0, w: 1, e3: 0, m3: 1},
        "p1": {e1: 0, e2: 0, w: 1, e3: 0, m3: 1},
    }
    return _build(3, cells, matchings, pol)


# ---------------------------------------------------------------------------
# the prism-torus family


# rays of the plane fan seen at the core vertices, clockwise, first cone
# generated by (-1,-1), (0,1); for 3, 4 and 6 the rays sum to zero and the
# dual polygon below has unimodular edges
CORE_RAYS = {
    3: ((-1, -1), (0, 1), (1, 0)),
    4: ((-1, -1), (0, 1), (1, 1), (0, -1)),
    5: ((-1, -1), (0, 1), (1, 0), (0, -1), (-1, -2)),
    6: ((-1, -1), (0, 1), (1, 2), (1, 1), (0, -1), (-1, -2)),
}

CORE_VALUES = {
    3: (1, 0, 0),
    4: (1, 0, 0, 1),
    5: (4, 0, 0, 2, 5),
    6: (1, 0, 0, 1, 2, 2),
}


def grid_conifold(L, M):
    """Two solid tori of triangular prisms (2·L·M cells) glued along their
    boundary torus; the result carries L·M negative nodes.  Valid for
    3 <= L, M <= 6 (beyond 6 the core cross-sections lose convexity).

    The bundled polarization is globally well defined exactly when the core
    fans have rays summing to zero, i.e. for L, M in {3, 4, 6}; no smooth
    5-ray plane fan has that property, so for valency 5 the per-vertex data
    is strictly convex locally but the well-definedness check reports the
    core-edge mismatches."""
    if not (3 <= L <= 6 and 3 <= M <= 6):
        raise ValueError(
            "grid parameters out of range: convexity of the core "
            "cross-section fails beyond 6 (at the point (4,0))")
    T = [(0, 0, 0), (4, 0, 0), (0, 4, 0), (0, 0, 4), (4, 0, 4), (0, 4, 4)]

    def mod(i, n):
        return ((i - 1) % n) + 1

    def P(j, m):
        # m == 0 is the core-circle vertex of row j; other columns are cyclic
        return "P%d,%d" % (mod(j, L), 0 if m == 0 else mod(m, M))

    def Pb(j, m):
        return "P%d,%d" % (mod(j, L), mod(m, M))

    def Q(k):
        return "Q0,%d" % (mod(k, M),)

    cells = []
    for j in range(1, L + 1):
        for k in range(1, M + 1):
            labels = [P(j + 1, 0), P(j + 1, k + 1), P(j + 1, k + 2),
                      P(j + 2, 0), P(j + 2, k + 1), P(j + 2, k + 2)]
            cells.append(("sigma%d,%d" % (j, k), T, labels, (), ()))
    for j in range(1, L + 1):
        for k in range(1, M + 1):
            labels = [Q(k + 1), P(j + 1, k + 1), P(j + 2, k + 1),
                      Q(k + 2), P(j + 1, k + 2), P(j + 2, k + 2)]
            cells.append(("tau%d,%d" % (j, k), T, labels, (), ()))

    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    m1, m2, m3 = (-1, 0, 0), (0, -1, 0), (0, 0, -1)
    gM = [r + (0,) for r in CORE_RAYS[M]]
    gL = [r + (0,) for r in CORE_RAYS[L]]

    matchings = {}
    pol = {}
    for j in range(1, L + 1):
        match = {P(j + 1, 0): e3, P(j - 1, 0): m3}
        for m in range(1, M + 1):
            match[P(j, m)] = gM[(m - 1 - 1) % M]
        matchings[P(j, 0)] = match
        values = {e3: 1, m3: 0}
        for i in range(M):
            values[gM[i]] = CORE_VALUES[M][i]
        pol[P(j, 0)] = values
    for k in range(1, M + 1):
        match = {Q(k + 1): e3, Q(k - 1): m3}
        for j in range(1, L + 1):
            match[P(j, k)] = gL[(j - 1 - 1) % L]
        matchings[Q(k)] = match
        values = {e3: 1, m3: 0}
        for i in range(L):
            values[gL[i]] = CORE_VALUES[L][i]
        pol[Q(k)] = values
    for j in range(1, L + 1):
        for m in range(1, M + 1):
            matchings[Pb(j, m)] = {
                P(j, 0): e3, Q(m): m3,
                Pb(j, m - 1): e1, Pb(j, m + 1): m1,
                Pb(j - 1, m): e2, Pb(j + 1, m): m2,
            }
            pol[Pb(j, m)] = {e1: 0, e2: 0, e3: 0, m1: 1, m2: 1, m3: 1}
    return _build(3, cells, matchings, pol)
