"""Parallel transport of integral tangent vectors between vertex charts.

A path alternates vertex labels and cell ids: ``[v0, c1, v1, c2, v2, ...]``
where consecutive vertices are both corners of the cell between them.  The
transport matrix maps the chart at the final vertex to the chart at the first
one; a closed path yields the monodromy at its base vertex.
"""

from .lattice import (identity, int_mat, integer_kernel, mat_inverse, matmul)


class PathError(ValueError):
    pass


def transport(cx, path):
    """Composite chart transition along a vertex path (end chart -> start chart)."""
    if len(path) < 1 or len(path) % 2 == 0:
        raise PathError("path must alternate vertex, cell, vertex, ...")
    n = cx.dimension
    T = identity(n)
    for i in range(0, len(path) - 1, 2):
        v, c, w = path[i], path[i + 1], path[i + 2]
        for lbl in (v, w):
            if (lbl, c) not in cx.psi:
                raise PathError("no chart for vertex %r in cell %r" % (lbl, c))
        step = matmul(cx.psi[(v, c)], int_mat(mat_inverse(cx.psi[(w, c)])))
        T = matmul(T, step)
    return T


def loop_around_keys(cx, face_key, edge_key):
    """Monodromy around the stratum (face barycenter -> edge barycenter).

    Convention: the base vertex is the smaller endpoint label of the crossed
    edge, and the loop first passes through the lexicographically-first of the
    two maximal cells incident to the containing codim-1 face.  Returns
    ``(matrix, base_label)``.
    """
    rec = cx.faces[face_key]
    if len(rec.incident) != 2:
        raise PathError("stratum face %r is not interior" % (face_key,))
    endpoints = sorted(edge_key[0], key=repr)
    if len(endpoints) != 2:
        raise PathError("crossed edge must have two real endpoints")
    base, other = endpoints
    c1, c2 = sorted({cid for cid, _, _ in rec.incident}, key=repr)
    T = transport(cx, [base, c1, other, c2, base])
    return T, base


def loop_around(cx, face_key, edge_key):
    T, _ = loop_around_keys(cx, face_key, edge_key)
    return T


def invariant_sublattice(mats):
    """Saturated sublattice fixed by every matrix in ``mats`` (basis rows)."""
    if not mats:
        raise ValueError("need at least one matrix")
    n = len(mats[0])
    rows = []
    for T in mats:
        for i in range(n):
            rows.append(tuple(T[i][j] - (1 if i == j else 0) for j in range(n)))
    return integer_kernel(tuple(rows))
