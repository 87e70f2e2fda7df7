"""Multivalued piecewise linear polarizations on tropical complexes.

A polarization is stored as one integral PL function per vertex fan (ray
values on the generators of the fan at that vertex), considered modulo linear
functions.  Well-definedness means that along every edge of the complex the
quotient functions seen from the two endpoints agree modulo linear functions;
strict convexity means every wall kink is positive.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .lattice import (Cone, Fan, det, dot, identity, int_mat, integer_kernel,
                      is_integral, make_primitive, matvec, saturation_basis,
                      solve_rational, transpose, vsub)
from .polytopes import PLFunctionOnFan, wall_kink


class MPLError(ValueError):
    pass


class MPLFunction:
    """Per-vertex ray values on the vertex fans of a complex."""

    def __init__(self, cx, values):
        self.cx = cx
        self.values = {lbl: {tuple(r): v for r, v in d.items()}
                       for lbl, d in values.items()}
        self._plf = {}

    @classmethod
    def from_model(cls, model):
        return cls(model.complex, model.polarization)

    def vertex_labels(self):
        return sorted(self.values, key=repr)

    def vertex_plf(self, label):
        if label not in self._plf:
            fan = self.cx.vertex_fans[label].fan
            self._plf[label] = PLFunctionOnFan(fan, self.values[label])
        return self._plf[label]

    def combine(self, a, other=None, b=0):
        """a * self + b * other (other defaults to zero)."""
        out = {}
        for lbl, d in self.values.items():
            new = {r: a * v for r, v in d.items()}
            if other is not None:
                od = other.values.get(lbl)
                if od is None or set(od) != set(new):
                    raise MPLError(
                        "functions live on different fans at vertex %r" % (lbl,))
                for r in new:
                    new[r] += b * od[r]
            out[lbl] = new
        return MPLFunction(self.cx, out)


# ---------------------------------------------------------------------------
# quotient fans and quotient functions along a face


def _face_cone_at(cx, face_key, label):
    """Generators (matched fan rays) of the cone of the face in the fan at
    ``label``, plus the id of the cell used to read them off."""
    rec = cx.faces[face_key]
    match_all = cx.vertex_fans[label].matching
    for cid, vidx, ridx in rec.incident:
        geom, vls, rls = cx.cells[cid]
        if label not in vls:
            continue
        i = vls.index(label)
        if i not in vidx:
            continue
        gens = []
        for kind, j in geom.edge_neighbors(i):
            if (kind == "v" and j in vidx) or (kind == "r" and j in ridx):
                nb_label = vls[j] if kind == "v" else rls[j]
                gens.append(match_all[cid][nb_label])
        return gens, cid
    raise MPLError("vertex %r does not lie on face %r" % (label, face_key))


class _QuotientData:
    __slots__ = ("label", "proj", "span", "pairs", "fan")

    def __init__(self, label, proj, span, pairs, fan):
        self.label = label
        self.proj = proj    # rows of the quotient projection
        self.span = span    # saturated basis of the face tangent space
        self.pairs = pairs  # [(cone in the vertex fan, projected cone)]
        self.fan = fan


def _project(rows, x):
    return tuple(dot(r, x) for r in rows)


def _quotient_at(cx, face_key, label):
    n = cx.dimension
    gens, _cid = _face_cone_at(cx, face_key, label)
    span = saturation_basis(gens)
    if len(span) >= n:
        raise MPLError("face %r is maximal; no quotient fan" % (face_key,))
    proj = integer_kernel(tuple(span)) if span else [tuple(r) for r in identity(n)]
    kappa = Cone(gens, n) if gens else None
    vf = cx.vertex_fans[label]
    pairs = []
    seen = set()
    for cone in vf.fan.maximal_cones:
        if kappa is not None and not cone.contains_cone(kappa):
            continue
        img = []
        for g in cone.generators:
            p = _project(proj, g)
            if any(x != 0 for x in p):
                img.append(make_primitive(p))
        qc = Cone(img, len(proj))
        pairs.append((cone, qc))
        seen.add(qc.key())
    if not pairs:
        raise MPLError("no maximal cone at %r contains the face cone" % (label,))
    distinct = []
    used = set()
    for _, qc in pairs:
        if qc.key() not in used:
            used.add(qc.key())
            distinct.append(qc)
    return _QuotientData(label, proj, span, pairs, Fan(distinct))


def _fan_vertices(cx, face_key):
    """Real vertex labels of the face that carry a fan structure, sorted."""
    return sorted((l for l in face_key[0] if cx.has_fan(l)), key=repr)


def _quotient_identification(cx, face_key, qa, qb):
    """Integer matrix M mapping the quotient coordinates at qb.label to the
    quotient coordinates at qa.label, induced by transport through the
    lexicographically-first shared maximal cell."""
    from .monodromy import transport
    rec = cx.faces[face_key]
    cid0 = sorted({cid for cid, _, _ in rec.incident}, key=repr)[0]
    T = transport(cx, [qa.label, cid0, qb.label])  # chart at b -> chart at a
    k = len(qa.proj)
    rows_r = [_project(qa.proj, matvec_cols(T, i, cx.dimension)) for i in range(cx.dimension)]
    # rows_r[i] = Q_a (T e_i); we need M with M Q_b = Q_a T (as maps)
    R = transpose(rows_r)  # k x n: row j = (Q_a T)_j
    A = transpose(qb.proj)  # n x k
    M = []
    for j in range(k):
        sol = solve_rational(A, R[j])
        if sol is None:
            raise MPLError(
                "quotient identification along %r is inconsistent" % (face_key,))
        M.append(tuple(sol))
    if not is_integral(M):
        raise MPLError("quotient identification along %r is not integral" % (face_key,))
    M = int_mat(M)
    if abs(det(M)) != 1:
        raise MPLError("quotient identification along %r is not unimodular" % (face_key,))
    keys_a = {qc.key() for _, qc in qa.pairs}
    keys_b = {Cone([matvec(M, g) for g in qc.generators], k).key()
              for _, qc in qb.pairs}
    if keys_a != keys_b:
        raise MPLError(
            "quotient fans along %r do not correspond under transport" % (face_key,))
    return M


def matvec_cols(T, i, n):
    return tuple(T[j][i] for j in range(n))


def quotient_fan(cx, face_key, at=None, check_independence=True):
    """Complete fan in the quotient of the vertex lattice by the tangent space
    of the face, computed at a vertex of the face; asserted independent of the
    chosen vertex via transport through a shared maximal cell."""
    vertices = _fan_vertices(cx, face_key)
    if not vertices:
        raise MPLError("face %r has no fan-bearing vertex" % (face_key,))
    base = at if at is not None else vertices[0]
    qa = _quotient_at(cx, face_key, base)
    if check_independence:
        for w in vertices:
            if w == base:
                continue
            qb = _quotient_at(cx, face_key, w)
            _quotient_identification(cx, face_key, qa, qb)
    return qa.fan


def quotient_function(cx, phi, face_key, at=None):
    """PL function induced on the quotient fan along a face, with the
    canonical representative zeroing the lexicographically-first maximal cone."""
    vertices = _fan_vertices(cx, face_key)
    if not vertices:
        raise MPLError("face %r has no fan-bearing vertex" % (face_key,))
    base = at if at is not None else vertices[0]
    qd = _quotient_at(cx, face_key, base)
    plf = phi.vertex_plf(base)
    pairs = sorted(qd.pairs, key=lambda p: p[1].key())
    m0 = plf.m_of_cone(pairs[0][0])
    ray_values = {}
    for cone, qc in pairs:
        delta = vsub(plf.m_of_cone(cone), m0)
        for l in qd.span:
            if dot(delta, l) != 0:
                raise MPLError(
                    "values do not descend along %r: not constant on the face"
                    % (face_key,))
        mbar = solve_rational(transpose(qd.proj), delta)
        if mbar is None:
            raise MPLError("values do not descend along %r" % (face_key,))
        for g in qc.generators:
            val = dot(mbar, g)
            if g in ray_values and ray_values[g] != val:
                raise MPLError(
                    "inconsistent quotient values along %r" % (face_key,))
            ray_values[g] = val
    return PLFunctionOnFan(qd.fan, ray_values)


# ---------------------------------------------------------------------------
# well-definedness


def _compare_along_edge(cx, phi, edge_key):
    """Mismatching walls between the quotient functions at the two endpoints
    of a bounded edge; empty list when they agree modulo linear functions."""
    a, b = sorted(edge_key[0], key=repr)
    qa = _quotient_at(cx, edge_key, a)
    qb = _quotient_at(cx, edge_key, b)
    M = _quotient_identification(cx, edge_key, qa, qb)
    fa = quotient_function(cx, phi, edge_key, at=a)
    fb = quotient_function(cx, phi, edge_key, at=b)
    # push fb to the quotient coordinates at a
    pushed = {}
    for r, v in fb.ray_values.items():
        pushed[make_primitive(matvec(M, r))] = v
    fb_at_a = PLFunctionOnFan(qa.fan, pushed)
    mismatches = []
    for ca, cb in itertools.combinations(qa.fan.maximal_cones, 2):
        inter = ca.intersect(cb)
        if inter.dim != ca.dim - 1:
            continue
        h1 = wall_kink(fa, ca, cb)
        h2 = wall_kink(fb_at_a, ca, cb)
        if h1 != h2:
            mismatches.append({"edge": sorted(edge_key[0], key=repr),
                               "wall": (ca.key(), cb.key()),
                               "kinks": (h1, h2)})
    return mismatches


def mpl_is_well_defined(cx, phi):
    """Report: per bounded edge with fans at both endpoints, compare the two
    quotient functions modulo linear functions (as wall-kink agreement)."""
    mismatches = []
    skipped = []
    checked = 0
    for rec in cx.faces_of_dim(1):
        if rec.key[1] or len(rec.key[0]) != 2:
            skipped.append((rec.key, "unbounded edge"))
            continue
        if not all(cx.has_fan(l) for l in rec.key[0]):
            skipped.append((rec.key, "missing fan structure"))
            continue
        checked += 1
        mismatches.extend(_compare_along_edge(cx, phi, rec.key))
    return {"well_defined": not mismatches, "mismatches": mismatches,
            "checked": checked, "skipped": skipped}


# ---------------------------------------------------------------------------
# strict convexity and combined functions


def face_kinks(cx, phi, require_agreement=True):
    """Kink of the polarization across every interior codimension-one face,
    computed at each fan-bearing vertex of the face.

    Returns (kinks, disagreements): kinks maps face key -> value (from the
    first fan-bearing vertex), disagreements lists faces whose vertices give
    different values (a well-definedness failure)."""
    kinks = {}
    disagreements = []
    for rec in cx.faces_of_dim(cx.dimension - 1):
        if not rec.interior:
            continue
        c1, c2 = sorted({cid for cid, _, _ in rec.incident}, key=repr)
        values = []
        for label in _fan_vertices(cx, rec.key):
            vf = cx.vertex_fans[label]
            plf = phi.vertex_plf(label)
            values.append(wall_kink(plf, vf.cone_of[c1], vf.cone_of[c2]))
        if not values:
            continue
        if require_agreement and len(set(values)) > 1:
            disagreements.append((rec.key, values))
        kinks[rec.key] = values[0]
    return kinks, disagreements


def is_strictly_convex(cx, phi):
    """Certificate: the kink across every interior codimension-one face, with
    the verdict that all are positive (computed at every fan-bearing vertex,
    which must agree)."""
    kinks, disagreements = face_kinks(cx, phi)
    first = None
    for key in sorted(kinks, key=repr):
        if kinks[key] <= 0:
            first = (key, kinks[key])
            break
    convex = first is None and not disagreements
    return {"convex": convex, "kinks": kinks,
            "first_violation": first, "disagreements": disagreements}


def combine_min_n(cx, phi, phi_tilde):
    """Minimal N >= 1 with N*phi + phi_tilde strictly convex, assuming phi is
    convex on the coarse decomposition (kink 0 only on walls interior to its
    old cells, where phi_tilde must take up the slack)."""
    kphi, dis1 = face_kinks(cx, phi)
    ktil, dis2 = face_kinks(cx, phi_tilde)
    if dis1 or dis2:
        raise MPLError("kink disagreement: function not well defined: %r"
                       % (dis1 + dis2,))
    n_min = 1
    for key in sorted(kphi, key=repr):
        h, ht = kphi[key], ktil[key]
        if h < 0:
            raise MPLError("base function is not convex across %r" % (key,))
        if h == 0:
            if ht <= 0:
                raise MPLError("unresolvable wall: %r has kink %r independent of N"
                               % (sorted(key[0], key=repr), ht))
            continue
        if ht <= 0:
            n_min = max(n_min, math.floor(Fraction(-ht, h)) + 1)
    phi_prime = phi.combine(n_min, phi_tilde, 1)
    cert = is_strictly_convex(cx, phi_prime)
    if not cert["convex"]:
        raise MPLError("combined function failed its own certificate: %r"
                       % (cert["first_violation"],))
    return n_min, phi_prime, cert
