"""Discrete Legendre transform of a polarized tropical complex.

The dual complex has one maximal cell per (fan-bearing) vertex of the primal
complex -- the Newton polyhedron of the local polarization -- and one vertex
per primal maximal cell, carrying the normal fan of that cell.  Applying the
transform twice reproduces the primal complex up to relabeling; the checker
verifies this exactly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .complex import GluingSpec, VertexFan, assemble, discriminant
from .lattice import (Cone, Fan, det, dot, elementary_divisors, identity,
                      int_mat, is_integral, make_primitive,
                      map_from_generator_matching, mat_inverse, matmul, matvec,
                      rank, rays_from_hrep, solve_rational, transpose, vsub)
from .mpl import (MPLFunction, _face_cone_at, is_strictly_convex,
                  mpl_is_well_defined)
from .polytopes import _dual_cone_generators


class LegendreError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dual cells (Newton polyhedra of the local polarization)


class _DualCellData:
    __slots__ = ("vertices", "vlabels", "rays", "rlabels", "label_of_cone")

    def __init__(self, vertices, vlabels, rays, rlabels, label_of_cone):
        self.vertices = vertices
        self.vlabels = vlabels
        self.rays = rays
        self.rlabels = rlabels
        self.label_of_cone = label_of_cone  # cone key -> vertex label


def _boundary_ray_label(cx, v, r):
    """Stable label for a recession ray of the dual cell at ``v``: the set of
    boundary codimension-one faces at ``v`` whose tangent cone it annihilates."""
    keys = []
    for rec in cx.faces_of_dim(cx.dimension - 1):
        if rec.interior or v not in rec.key[0]:
            continue
        try:
            gens, _ = _face_cone_at(cx, rec.key, v)
        except Exception:
            continue
        if gens and all(dot(r, g) == 0 for g in gens):
            keys.append(rec.key)
    if keys:
        return ("rb", frozenset(keys))
    return ("rb", v, tuple(r))


def _dual_cell(cx, phi, v):
    """Newton polyhedron of the polarization at ``v`` in the dual of the
    vertex chart, with vertices labeled by the primal maximal cells."""
    n = cx.dimension
    vf = cx.vertex_fans[v]
    plf = phi.vertex_plf(v)
    cons = [(tuple(g), -plf.ray_values[tuple(g)]) for g in vf.fan.rays()]
    pts = set()
    for combo in itertools.combinations(cons, n):
        sol = solve_rational(tuple(c[0] for c in combo),
                             tuple(c[1] for c in combo))
        if sol is None:
            continue
        if all(dot(g, sol) >= rhs for g, rhs in cons):
            pts.add(sol)
    verts = []
    for p in sorted(pts):
        if any(Fraction(x).denominator != 1 for x in p):
            raise LegendreError(
                "non-integral dual vertex at %r; rescale the polarization" % (v,))
        verts.append(tuple(int(x) for x in p))
    label_of_cone = {}
    expected = {}
    aux = getattr(vf, "aux", {})
    assigned = {cone.key(): cid for cid, cone in vf.cone_of.items()}
    for cone in vf.fan.maximal_cones:
        m = plf.m_of_cone(cone)
        if any(Fraction(x).denominator != 1 for x in m):
            raise LegendreError(
                "non-integral support vertex at %r; rescale the polarization" % (v,))
        p = tuple(-int(x) for x in m)
        label = assigned.get(cone.key())
        if label is None:
            label = aux.get(cone.key())
        if label is None:
            label = ("x", v, cone.key())
        if p in expected and expected[p] != label:
            raise LegendreError(
                "polarization at %r is not strictly convex: cones %r and %r "
                "share a dual vertex" % (v, expected[p], label))
        expected[p] = label
        label_of_cone[cone.key()] = label
    for p, label in expected.items():
        if p not in verts:
            raise LegendreError(
                "support vertex %r at %r is not extreme; polarization "
                "not strictly convex" % (p, v))
    vlabels = []
    cut = 0
    for p in verts:
        if p in expected:
            vlabels.append(expected[p])
        else:
            vlabels.append(("cut", v, cut))
            cut += 1
    rays = rays_from_hrep([g for g, _ in cons], [], n)
    rays = sorted(make_primitive(r) for r in rays)
    rlabels = [_boundary_ray_label(cx, v, r) for r in rays]
    if len(set(rlabels)) != len(rlabels):
        rlabels = [("rb", v, tuple(r)) for r in rays]
    return _DualCellData(verts, vlabels, tuple(rays), rlabels, label_of_cone)


# ---------------------------------------------------------------------------
# the transform


class DualityMap:
    """Inclusion-reversing correspondence between primal and dual cells."""

    def __init__(self, primal, dual, face_map, vertex_to_cell, cell_to_vertex):
        self.primal = primal
        self.dual = dual
        self.face_map = face_map          # primal face key -> dual face key
        self.vertex_to_cell = vertex_to_cell
        self.cell_to_vertex = cell_to_vertex

    def dual_stratum_key(self, face_key, edge_key):
        """Dual (face, edge) pair of a primal discriminant stratum."""
        if self.primal.dimension == 2:
            d = self.face_map.get(face_key)
            return (d, d) if d is not None else None
        df = self.face_map.get(edge_key)   # dual 2-face of the primal edge
        de = self.face_map.get(face_key)   # dual edge of the primal 2-face
        if df is None or de is None:
            return None
        return (df, de)


def discrete_legendre(cx, phi, strict=True, check=True):
    """Discrete Legendre transform: (complex, polarization) -> dual complex,
    dual polarization and the cell correspondence.

    strict=True rejects complexes with boundary or missing/incomplete vertex
    fans (the closed-manifold setting); strict=False additionally handles
    local models, producing unbounded dual cells where the primal fans are
    incomplete."""
    n = cx.dimension
    if check:
        wd = mpl_is_well_defined(cx, phi)
        if not wd["well_defined"]:
            raise LegendreError(
                "polarization is not well defined: %r" % (wd["mismatches"][:3],))
        sc = is_strictly_convex(cx, phi)
        if not sc["convex"]:
            raise LegendreError(
                "polarization is not strictly convex: %r" % (sc["first_violation"],))
    fan_vertices = [v for v in cx.vertex_labels() if cx.has_fan(v)]
    if strict:
        missing = [v for v in cx.vertex_labels() if not cx.has_fan(v)]
        incomplete = [v for v in fan_vertices
                      if not cx.vertex_fans[v].fan.is_complete()]
        if cx.boundary or missing or incomplete:
            raise LegendreError(
                "complex has boundary (missing fans %r, incomplete fans %r); "
                "use strict=False for local models" % (missing, incomplete))
    if not fan_vertices:
        raise LegendreError("no fan-bearing vertices")
    clash = set(fan_vertices) & set(cx.cells)
    if clash:
        raise LegendreError(
            "vertex labels and cell ids must be disjoint for the transform: %r"
            % (sorted(clash, key=repr),))
    cell_data = {}
    spec = GluingSpec(n)
    for v in fan_vertices:
        data = _dual_cell(cx, phi, v)
        cell_data[v] = data
        spec.add_cell(v, data.vertices, data.vlabels, data.rays, data.rlabels)
    # dual fan structures: the normal fan of each primal maximal cell, with the
    # cone dual to each fan-bearing vertex assigned to that vertex's dual cell
    fans = {}
    dual_values = {}
    for cid in sorted(cx.cells, key=repr):
        geom, vls, rls = cx.cells[cid]
        cones = []
        cone_of = {}
        aux = {}
        for i, vl in enumerate(vls):
            tangent = Cone([geom.direction_to(i, nb)
                            for nb in geom.edge_neighbors(i)], n)
            ncone = Cone(_dual_cone_generators(tangent), n)
            cones.append(ncone)
            if cx.has_fan(vl):
                cone_of[vl] = ncone
            else:
                aux[ncone.key()] = vl
        distinct = []
        seen = set()
        for c in cones:
            if c.key() not in seen:
                seen.add(c.key())
                distinct.append(c)
        matching = {}
        for vl in cone_of:
            data = cell_data[vl]
            dgeom_labels = data.vlabels
            j = dgeom_labels.index(cid)
            from .complex import CellGeometry
            dgeom = CellGeometry(data.vertices, data.rays)
            Mt = transpose(cx.chart(vl, cid))
            match = {}
            for kind, k in dgeom.edge_neighbors(j):
                nb_label = data.vlabels[k] if kind == "v" else data.rlabels[k]
                d = dgeom.direction_to(j, (kind, k))
                match[nb_label] = make_primitive(matvec(Mt, d))
            matching[vl] = match
        vf = VertexFan(Fan(distinct), cone_of, matching)
        vf.aux = aux
        fans[cid] = vf
        # dual polarization: support function of the primal cell
        values = {}
        fan_rays = vf.fan.rays()
        for y in fan_rays:
            values[tuple(y)] = -min(dot(x, y) for x in geom.vertices)
        dual_values[cid] = values
    dual_cx = assemble(spec, fans)
    dual_phi = MPLFunction(dual_cx, dual_values)
    face_map = _build_face_map(cx, cell_data, fan_vertices)
    dmap = DualityMap(cx, dual_cx,
                      face_map,
                      {v: v for v in fan_vertices},
                      {cid: cid for cid in cx.cells})
    return dual_cx, dual_phi, dmap


def _build_face_map(cx, cell_data, fan_vertices):
    """Primal face key -> dual face key, computed at the first fan-bearing
    vertex of each face (faces without one are left out)."""
    face_map = {}
    for key, rec in cx.faces.items():
        vs = [l for l in sorted(rec.key[0], key=repr)
              if l in cx.vertex_fans and l in cell_data]
        if not vs:
            continue
        v = vs[0]
        data = cell_data[v]
        try:
            gens, _ = _face_cone_at(cx, key, v)
        except Exception:
            continue
        vf = cx.vertex_fans[v]
        kappa = Cone(gens, cx.dimension) if gens else None
        dual_vls = set()
        for cone in vf.fan.maximal_cones:
            if kappa is None or cone.contains_cone(kappa):
                dual_vls.add(data.label_of_cone[cone.key()])
        dual_rls = set()
        for r, rl in zip(data.rays, data.rlabels):
            if all(dot(r, g) == 0 for g in gens):
                dual_rls.add(rl)
        face_map[key] = (frozenset(dual_vls), frozenset(dual_rls))
    return face_map


# ---------------------------------------------------------------------------
# involution and monodromy duality


def _cell_iso(geomP, vlsP, rlsP, geomD, vlsD, rlsD):
    """Integral affine isomorphism mapping the second cell onto the first,
    respecting vertex labels; rays are matched geometrically.  Returns the
    linear part, or raises LegendreError."""
    if set(vlsP) != set(vlsD):
        raise LegendreError("vertex label sets differ: %r vs %r"
                            % (sorted(set(vlsP) - set(vlsD), key=repr),
                               sorted(set(vlsD) - set(vlsP), key=repr)))
    posP = {l: geomP.vertices[i] for i, l in enumerate(vlsP)}
    posD = {l: geomD.vertices[i] for i, l in enumerate(vlsD)}
    labels = sorted(posP, key=repr)
    o = labels[0]
    pairs = [(vsub(posD[l], posD[o]), vsub(posP[l], posP[o]))
             for l in labels[1:]]
    srcs = [p[0] for p in pairs]
    n = geomP.dim_ambient
    if rank(srcs) < n:
        # match rays geometrically to pin down the map
        if len(geomP.rays) != len(geomD.rays):
            raise LegendreError("ray counts differ")
        for perm in itertools.permutations(range(len(geomP.rays))):
            trial = pairs + [(geomD.rays[k], geomP.rays[perm[k]])
                             for k in range(len(geomP.rays))]
            try:
                T = map_from_generator_matching(trial)
            except Exception:
                continue
            if abs(det(T)) == 1:
                return T
        raise LegendreError("no unimodular identification")
    T = map_from_generator_matching(pairs)
    if abs(det(T)) != 1:
        raise LegendreError("identification is not unimodular")
    if set(geomP.rays) != {tuple(make_primitive(matvec(T, r)))
                           for r in geomD.rays}:
        raise LegendreError("recession rays do not correspond")
    return T


def check_involution(cx, phi):
    """Apply the transform twice and compare with the original complex:
    same cell ids, per-cell label-respecting integral affine isomorphism,
    chart compatibility at every fan-bearing vertex, and matching stratum
    multiplicities.  Returns a report dict."""
    report = {"ok": True, "obstructions": [], "cells": 0}
    try:
        d1, p1, _ = discrete_legendre(cx, phi, strict=False)
        d2, p2, _ = discrete_legendre(d1, p1, strict=False, check=False)
    except LegendreError as e:
        report["ok"] = False
        report["obstructions"].append("transform failed: %s" % (e,))
        return report
    if set(d2.cells) != set(cx.cells):
        report["ok"] = False
        report["obstructions"].append(
            "cell id sets differ: %r vs %r"
            % (sorted(cx.cells, key=repr), sorted(d2.cells, key=repr)))
        return report
    linear = {}
    for cid in sorted(cx.cells, key=repr):
        geomP, vlsP, rlsP = cx.cells[cid]
        geomD, vlsD, rlsD = d2.cells[cid]
        try:
            linear[cid] = _cell_iso(geomP, vlsP, rlsP, geomD, vlsD, rlsD)
            report["cells"] += 1
        except LegendreError as e:
            report["ok"] = False
            report["obstructions"].append("cell %r: %s" % (cid, e))
    if not report["ok"]:
        return report
    # chart compatibility: the induced map in each vertex chart must not
    # depend on the cell used to compute it
    for v in cx.vertex_labels():
        if not (cx.has_fan(v) and d2.has_fan(v)):
            continue
        maps = set()
        for cid, _ in cx.cells_at_vertex(v):
            Tc = linear[cid]
            Mv = matmul(cx.chart(v, cid),
                        matmul(Tc, int_mat(mat_inverse(d2.chart(v, cid)))))
            maps.add(tuple(map(tuple, Mv)))
        if len(maps) > 1:
            report["ok"] = False
            report["obstructions"].append(
                "chart identification at %r depends on the cell" % (v,))
    primal_mult = _stratum_multiset(cx)
    double_mult = _stratum_multiset(d2)
    if primal_mult != double_mult:
        report["ok"] = False
        report["obstructions"].append("stratum multiplicities differ")
    return report


def _stratum_multiset(cx):
    out = {}
    for s in discriminant(cx).strata:
        out[(s.face_key, s.edge_key)] = s.multiplicity
    return out


def monodromy_duality(cx, dual_cx, dmap):
    """Per primal stratum: locate the dual stratum through the duality map and
    compare its monodromy with the inverse transpose of the primal one via
    conjugacy invariants (elementary divisors of T - I, trace, determinant)."""
    prim = discriminant(cx)
    dual = discriminant(dual_cx)
    dual_by = {(s.face_key, s.edge_key): s for s in dual.strata}
    entries = []
    ok = True
    n = cx.dimension
    for s in prim.strata:
        key = dmap.dual_stratum_key(s.face_key, s.edge_key)
        entry = {"face": sorted(s.face_key[0], key=repr),
                 "edge": sorted(s.edge_key[0], key=repr)}
        ds = dual_by.get(key) if key is not None else None
        if ds is None:
            entry["status"] = "no dual stratum"
            ok = False
            entries.append(entry)
            continue
        T = s.monodromy
        D = ds.monodromy
        inv_t = transpose(int_mat(mat_inverse(T)))
        same = (ds.multiplicity == s.multiplicity
                and _tm1_divisors(D) == _tm1_divisors(inv_t)
                and sum(D[i][i] for i in range(n)) ==
                    sum(inv_t[i][i] for i in range(n))
                and det(D) == det(inv_t))
        entry["status"] = "ok" if same else "mismatch"
        entry["multiplicity"] = (s.multiplicity, ds.multiplicity)
        if not same:
            ok = False
        entries.append(entry)
    return {"ok": ok, "strata": entries}


def _tm1_divisors(T):
    n = len(T)
    A = tuple(tuple(T[i][j] - (1 if i == j else 0) for j in range(n))
              for i in range(n))
    return tuple(elementary_divisors(A))
