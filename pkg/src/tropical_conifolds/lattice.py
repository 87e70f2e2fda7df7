"""Exact integer/rational linear algebra, lattice vectors, cones and fans.

Everything here works over arbitrary-precision integers and ``fractions.Fraction``;
no floating point is used anywhere.  Ambient dimension is a runtime value, but the
cone/fan machinery is only guaranteed for dimensions <= 3.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

Vec = tuple  # tuple of int (or Fraction for affine points)
Mat = tuple  # tuple of row tuples


# ---------------------------------------------------------------------------
# vectors


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vneg(a):
    return tuple(-x for x in a)


def vscale(k, a):
    return tuple(k * x for x in a)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def is_zero(a):
    return all(x == 0 for x in a)


def content(a):
    """gcd of the integer entries (0 for the zero vector)."""
    g = 0
    for x in a:
        g = math.gcd(g, abs(x))
    return g


def make_primitive(v):
    """Divide a nonzero integer vector by the gcd of its entries."""
    if is_zero(v):
        raise ValueError("zero vector has no primitive representative")
    if any(not isinstance(x, int) for x in v):
        # rational direction: clear denominators first
        denom = 1
        for x in v:
            denom = denom * Fraction(x).denominator // math.gcd(denom, Fraction(x).denominator)
        v = tuple(int(x * denom) for x in v)
    g = math.gcd(*[abs(x) for x in v])
    return tuple(x // g for x in v)


# ---------------------------------------------------------------------------
# matrices (tuples of rows, acting on column vectors)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def matvec(A, v):
    return tuple(dot(row, v) for row in A)


def matmul(A, B):
    Bt = tuple(zip(*B))
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def transpose(A):
    return tuple(zip(*A))


def mat_from_cols(cols):
    return tuple(zip(*cols))


def det(A):
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if n == 3:
        return (A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
                - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
                + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]))
    # Bareiss for larger sizes (used only incidentally)
    M = [list(map(Fraction, row)) for row in A]
    sign = 1
    for i in range(n):
        if M[i][i] == 0:
            for k in range(i + 1, n):
                if M[k][i] != 0:
                    M[i], M[k] = M[k], M[i]
                    sign = -sign
                    break
            else:
                return 0
        for k in range(i + 1, n):
            f = M[k][i] / M[i][i]
            for j in range(i, n):
                M[k][j] -= f * M[i][j]
    p = Fraction(sign)
    for i in range(n):
        p *= M[i][i]
    return int(p) if p.denominator == 1 else p


def rank(rows):
    M = [list(map(Fraction, r)) for r in rows if r]
    if not M:
        return 0
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                for j in range(c, ncols):
                    M[i][j] -= f * M[r][j]
        r += 1
        if r == len(M):
            break
    return r


def mat_inverse(A):
    """Exact inverse; entries are Fractions unless A is unimodular."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        f = M[c][c]
        M[c] = [x / f for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                g = M[i][c]
                M[i] = [x - g * y for x, y in zip(M[i], M[c])]
    out = []
    for i in range(n):
        row = M[i][n:]
        if all(x.denominator == 1 for x in row):
            row = [int(x) for x in row]
        out.append(tuple(row))
    return tuple(out)


def is_integral(A):
    return all(Fraction(x).denominator == 1 for row in A for x in row)


def int_mat(A):
    return tuple(tuple(int(x) for x in row) for row in A)


# ---------------------------------------------------------------------------
# Smith / Hermite normal forms


def smith_normal_form(A):
    """Return (D, U, V) with D = U*A*V in Smith normal form, U, V unimodular.

    D is returned as a full matrix (tuple of rows) of the same shape as A.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [list(row) for row in A]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in M:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(i, j, k):  # row_i += k * row_j
        M[i] = [a + k * b for a, b in zip(M[i], M[j])]
        U[i] = [a + k * b for a, b in zip(U[i], U[j])]

    def add_col(i, j, k):  # col_i += k * col_j
        for r in M:
            r[i] += k * r[j]
        for r in V:
            r[i] += k * r[j]

    def negate_row(i):
        M[i] = [-a for a in M[i]]
        U[i] = [-a for a in U[i]]

    t = 0
    while t < min(m, n):
        # find pivot: smallest nonzero |entry| in the remaining block
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if M[i][j] != 0 and (best is None or abs(M[i][j]) < best):
                    best = abs(M[i][j])
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        done = True
        for i in range(t + 1, m):
            if M[i][t] != 0:
                q = M[i][t] // M[t][t]
                add_row(i, t, -q)
                if M[i][t] != 0:
                    done = False
        for j in range(t + 1, n):
            if M[t][j] != 0:
                q = M[t][j] // M[t][t]
                add_col(j, t, -q)
                if M[t][j] != 0:
                    done = False
        if not done:
            continue
        # divisibility condition
        entry = M[t][t]
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if M[i][j] % entry != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if M[t][t] < 0:
            negate_row(t)
        t += 1
    D = tuple(tuple(r) for r in M)
    return D, tuple(tuple(r) for r in U), tuple(tuple(r) for r in V)


def elementary_divisors(A):
    D, _, _ = smith_normal_form(A)
    out = []
    for i in range(min(len(D), len(D[0]) if D else 0)):
        if D[i][i] != 0:
            out.append(abs(D[i][i]))
    return out


def integer_kernel(A):
    """Saturated basis of {v : A v = 0} over Z (list of primitive tuples)."""
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [tuple(r) for r in identity(n)]
    D, U, V = smith_normal_form(A)
    r = len(elementary_divisors(A))
    cols = transpose(V)
    return [tuple(cols[i]) for i in range(r, n)]


def saturation_basis(vs):
    """Basis of the saturation (span over Q intersected with Z^n) of the lattice
    generated by the given integer vectors."""
    vs = [v for v in vs if not is_zero(v)]
    if not vs:
        return []
    n = len(vs[0])
    A = tuple(tuple(v) for v in vs)
    D, U, V = smith_normal_form(A)
    r = len(elementary_divisors(A))
    Vinv = mat_inverse(V)
    # rows of A generate; saturation is generated by the first r rows of Vinv^T
    # (A = U^-1 D V^-1; row space over Q = span of first r rows of V^-1)
    rows = [tuple(int(x) for x in Vinv[i]) for i in range(r)]
    return rows


def sublattice_index(vs, against="full"):
    """Index of the lattice generated by ``vs``.

    against="full": index in the full ambient lattice Z^n (math.inf if the rank
    is deficient).  against="saturation": index inside the saturation (always a
    positive integer).
    """
    vs = [tuple(v) for v in vs]
    if not vs:
        raise ValueError("empty generating set")
    n = len(vs[0])
    divs = elementary_divisors(tuple(vs))
    prod = 1
    for d in divs:
        prod *= d
    if against == "saturation":
        return prod
    if len(divs) < n:
        return math.inf
    return prod


# ---------------------------------------------------------------------------
# solving / matching


def integer_solve(A, b):
    """One integer solution x of A x = b, or None if none exists.

    Works for any shape (underdetermined systems included) via the Smith
    normal form D = U A V: solve D y = U b, then x = V y."""
    m = len(A)
    n = len(A[0]) if m else 0
    D, U, V = smith_normal_form(A)
    c = matvec(U, b)
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    return tuple(matvec(V, y))


def solve_rational(A, b):
    """Solve A x = b exactly; returns tuple of Fractions, or None if inconsistent.
    A may be non-square (least constraints used); requires full column rank."""
    m = len(A)
    n = len(A[0])
    M = [list(map(Fraction, row)) + [Fraction(bb)] for row, bb in zip(A, b)]
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        f = M[r][c]
        M[r] = [x / f for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                g = M[i][c]
                M[i] = [x - g * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if M[i][n] != 0:
            return None
    if len(pivots) < n:
        return None  # underdetermined
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = M[i][n]
    return tuple(x)


class MatchingError(ValueError):
    pass


def map_from_generator_matching(pairs):
    """Unique integer matrix A with A*src = dst for every (src, dst) pair.

    Raises MatchingError with message "underdetermined", "non-integral" or
    "inconsistent matching".
    """
    pairs = [(tuple(s), tuple(d)) for s, d in pairs]
    if not pairs:
        raise MatchingError("underdetermined")
    dim = len(pairs[0][0])
    srcs = [p[0] for p in pairs]
    if rank(srcs) < dim:
        raise MatchingError("underdetermined")
    # pick dim independent sources
    base = None
    for combo in itertools.combinations(range(len(pairs)), dim):
        S = mat_from_cols([srcs[i] for i in combo])
        if det(S) != 0:
            base = combo
            break
    S = mat_from_cols([srcs[i] for i in base])
    Dm = mat_from_cols([pairs[i][1] for i in base])
    A = matmul(Dm, mat_inverse(S))
    if not is_integral(A):
        raise MatchingError("non-integral")
    A = int_mat(A)
    for s, d in pairs:
        if matvec(A, s) != d:
            raise MatchingError("inconsistent matching")
    return A


# ---------------------------------------------------------------------------
# cones


def _dedupe_rays(gens):
    seen = []
    for g in gens:
        g = make_primitive(g)
        if g not in seen:
            seen.append(g)
    return tuple(seen)


class Cone:
    """Rational polyhedral cone given by primitive generators (dim <= 3)."""

    def __init__(self, generators, dim_ambient=None):
        gens = [tuple(g) for g in generators]
        if not gens and dim_ambient is None:
            raise ValueError("need dim_ambient for the zero cone")
        self.dim_ambient = dim_ambient if dim_ambient is not None else len(gens[0])
        gens = _dedupe_rays(gens) if gens else ()
        self.generators = self._extreme_rays(gens)
        self._hrep = None

    @staticmethod
    def _extreme_rays(gens):
        """Drop generators that are nonnegative combinations of the others,
        so that equal cones share a canonical generator set."""
        if len(gens) <= 2:
            return tuple(gens)
        gens = list(gens)
        changed = True
        while changed:
            changed = False
            for i, g in enumerate(gens):
                others = gens[:i] + gens[i + 1:]
                sub = Cone.__new__(Cone)
                sub.dim_ambient = len(g)
                sub.generators = tuple(others)
                sub._hrep = None
                if sub.contains_point(g):
                    gens.pop(i)
                    changed = True
                    break
        return tuple(gens)

    def __repr__(self):
        return "Cone(%s)" % (list(self.generators),)

    def key(self):
        return frozenset(self.generators)

    def __eq__(self, other):
        if not isinstance(other, Cone):
            return NotImplemented
        return self.dim_ambient == other.dim_ambient and self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self):
        return hash((self.dim_ambient, self.key()))

    @property
    def dim(self):
        return rank(self.generators)

    def span_basis(self):
        return saturation_basis(self.generators)

    def contains_point(self, p):
        """Exact membership: p = nonnegative rational combination of generators."""
        p = tuple(p)
        if is_zero(p):
            return True
        gens = self.generators
        r = rank(gens)
        for combo in itertools.combinations(gens, min(r, len(gens))):
            if rank(combo) < len(combo):
                continue
            sol = solve_rational(mat_from_cols(combo), p)
            if sol is not None and all(x >= 0 for x in sol):
                return True
        # Caratheodory with smaller subsets (p on a face)
        for size in range(1, min(r, len(gens))):
            for combo in itertools.combinations(gens, size):
                if rank(combo) < size:
                    continue
                sol = solve_rational(mat_from_cols(combo), p)
                if sol is not None and all(x >= 0 for x in sol):
                    return True
        return False

    def contains_cone(self, other):
        return all(self.contains_point(g) for g in other.generators)

    def interior_point(self):
        """An (integer) point in the relative interior."""
        if not self.generators:
            return tuple([0] * self.dim_ambient)
        s = self.generators[0]
        for g in self.generators[1:]:
            s = vadd(s, g)
        return s

    def strongly_convex(self):
        p = self.interior_point()
        if is_zero(p) and self.generators:
            return False
        for g in self.generators:
            if self.contains_point(vneg(g)):
                return False
        return True

    def hrep(self):
        """(inequalities, equations): integer functionals with
        cone = {x : <ineq,x> >= 0, <eq,x> = 0}."""
        if self._hrep is not None:
            return self._hrep
        n = self.dim_ambient
        gens = self.generators
        if not gens:
            self._hrep = ((), tuple(identity(n)))
            return self._hrep
        eqs = tuple(integer_kernel(tuple(gens)))  # functionals vanishing on span
        d = self.dim
        ineqs = []
        if d == 1:
            # ray: span cut to half-line.  any functional positive on the gen
            g = gens[0]
            ineqs.append(g)  # <g, x> >= 0 works within the span
        elif d >= 2:
            basis = self.span_basis()
            # coordinates in the span: x = B^T y?  We use projection via solving
            B = tuple(basis)
            proj = _span_projector(B)
            gens2 = [matvec(proj, g) for g in gens]
            gens2 = [tuple(int(x) for x in g) for g in gens2]
            for nrm in _fulldim_facet_normals(gens2, d):
                # pull back through the span projector: (P^T nrm) . x = nrm . (P x)
                amb = matvec(transpose(proj), nrm)
                ineqs.append(make_primitive(amb))
        self._hrep = (tuple(ineqs), eqs)
        return self._hrep

    def facets(self):
        """Codim-1 faces, as Cones (within the span)."""
        ineqs, _ = self.hrep()
        out = []
        if self.dim == 1:
            return [Cone([], dim_ambient=self.dim_ambient)]
        for nrm in ineqs:
            face_gens = [g for g in self.generators if dot(nrm, g) == 0]
            if face_gens:
                out.append(Cone(face_gens, self.dim_ambient))
        return out

    def faces(self):
        """All nonzero proper faces plus self, by repeated facet taking."""
        seen = {self.key(): self}
        frontier = [self]
        while frontier:
            nxt = []
            for c in frontier:
                if c.dim <= 1:
                    continue
                for f in c.facets():
                    if f.generators and f.key() not in seen:
                        seen[f.key()] = f
                        nxt.append(f)
            frontier = nxt
        return list(seen.values())

    def intersect(self, other):
        """Intersection cone (dim <= 3 ambient)."""
        i1, e1 = self.hrep()
        i2, e2 = other.hrep()
        ineqs = list(i1) + list(i2)
        eqs = list(e1) + list(e2)
        rays = rays_from_hrep(ineqs, eqs, self.dim_ambient)
        return Cone(rays, self.dim_ambient)

    def is_face_of(self, other):
        """Is self a face of other (including other itself)?"""
        if not other.contains_cone(self):
            return False
        if self == other:
            return True
        ineqs, _ = other.hrep()
        active = [nrm for nrm in ineqs
                  if all(dot(nrm, g) == 0 for g in self.generators)]
        if self.dim < other.dim and not active and self.generators:
            return False
        face_gens = [g for g in other.generators
                     if all(dot(nrm, g) == 0 for nrm in active)]
        face = Cone(face_gens, self.dim_ambient) if face_gens else Cone([], self.dim_ambient)
        return face == self


def _span_projector(basis):
    """Integer-ish projector: matrix P (d x n) with P*x = coordinates of x in the
    saturated basis, valid for x in the span."""
    d = len(basis)
    n = len(basis[0])
    # Solve for each unit... use pseudo: coordinates y solve B^T y = x restricted.
    # Build left inverse of B^T (n x d) via solving on d independent columns.
    Bt = mat_from_cols(basis)  # n x d
    # find d independent rows of Bt
    rows_idx = None
    for combo in itertools.combinations(range(n), d):
        sub = tuple(Bt[i] for i in combo)
        if det(sub) != 0:
            rows_idx = combo
            break
    sub = tuple(Bt[i] for i in rows_idx)
    subinv = mat_inverse(sub)  # d x d, rational
    P = []
    for i in range(d):
        row = [Fraction(0)] * n
        for j, ri in enumerate(rows_idx):
            row[ri] = Fraction(subinv[i][j])
        P.append(tuple(row))
    return tuple(P)


def _fulldim_facet_normals(gens, d):
    """Facet normals of a full-dimensional strongly convex cone in dim d (2 or 3).
    Returns primitive integer normals n with <n, g> >= 0 for all gens."""
    out = []
    if d == 1:
        return [make_primitive(gens[0])]
    if d == 2:
        for g in gens:
            nrm = (-g[1], g[0])
            pos = [dot(nrm, h) for h in gens]
            if all(x >= 0 for x in pos):
                out.append(make_primitive(nrm))
            elif all(x <= 0 for x in pos):
                out.append(make_primitive(vneg(nrm)))
        return _dedupe_rays(out) if out else out
    if d == 3:
        for a, b in itertools.combinations(gens, 2):
            nrm = (a[1] * b[2] - a[2] * b[1],
                   a[2] * b[0] - a[0] * b[2],
                   a[0] * b[1] - a[1] * b[0])
            if is_zero(nrm):
                continue
            vals = [dot(nrm, h) for h in gens]
            if all(x >= 0 for x in vals):
                out.append(make_primitive(nrm))
            elif all(x <= 0 for x in vals):
                out.append(make_primitive(vneg(nrm)))
        return _dedupe_rays(out)
    raise ValueError("dimension > 3 not supported")


def rays_from_hrep(ineqs, eqs, n):
    """Extreme rays of {x : <ineq,x> >= 0, <eq,x> = 0} in ambient dim n <= 3."""
    cands = []
    constraints = [(q, 0) for q in eqs] + [(q, 1) for q in ineqs]

    def ok(v):
        return (all(dot(q, v) == 0 for q in eqs)
                and all(dot(q, v) >= 0 for q in ineqs))

    lin_dim = n - rank(list(eqs)) if eqs else n
    if lin_dim <= 0:
        return []
    # candidate directions: kernels of (n-1)-subsets of all constraint functionals
    allf = list(eqs) + list(ineqs)
    if n == 1:
        cands = [(1,), (-1,)]
    else:
        for combo in itertools.combinations(allf, n - 1):
            if rank(combo) != n - 1:
                continue
            ker = integer_kernel(tuple(combo))
            if len(ker) != 1:
                continue
            v = ker[0]
            cands.append(v)
            cands.append(vneg(v))
    out = []
    for v in cands:
        if not is_zero(v) and ok(v):
            p = make_primitive(v)
            if p not in out:
                out.append(p)
    # drop non-extreme rays: a ray is extreme iff it is not a positive
    # combination of the others (equivalently, active set has rank n-1... for
    # dim<=3 we can test by membership in the cone of the others)
    extreme = []
    for i, v in enumerate(out):
        others = [w for j, w in enumerate(out) if j != i]
        if not others or not Cone(others, n).contains_point(v):
            extreme.append(v)
    return extreme


# ---------------------------------------------------------------------------
# fans


class Fan:
    """A fan given by its maximal cones."""

    def __init__(self, maximal_cones, complete=None):
        self.maximal_cones = tuple(maximal_cones)
        if not self.maximal_cones:
            raise ValueError("empty fan")
        self.dim_ambient = self.maximal_cones[0].dim_ambient
        self._complete = complete

    def __repr__(self):
        return "Fan(%d maximal cones, dim %d)" % (len(self.maximal_cones), self.dim_ambient)

    def rays(self):
        out = []
        for c in self.maximal_cones:
            for g in c.generators:
                if g not in out:
                    out.append(g)
        return out

    def cone_containing(self, p):
        for c in self.maximal_cones:
            if c.contains_point(p):
                return c
        return None

    def is_complete(self):
        if self._complete is None:
            self._complete = not fan_validate(self)["errors"] and _fan_wall_complete(self)
        return self._complete


def _fan_wall_complete(fan):
    if any(c.dim != fan.dim_ambient for c in fan.maximal_cones):
        return False
    counts = {}
    for c in fan.maximal_cones:
        for f in c.facets():
            counts[f.key()] = counts.get(f.key(), 0) + 1
    return all(v == 2 for v in counts.values())


def fan_validate(fan):
    """Validation report: dict with 'errors' (list of strings) and 'complete'."""
    errors = []
    cones = fan.maximal_cones
    for c in cones:
        if not c.strongly_convex():
            errors.append("cone %r is not strongly convex" % (c,))
    for a, b in itertools.combinations(cones, 2):
        inter = a.intersect(b)
        if inter.dim == fan.dim_ambient and a.dim == fan.dim_ambient:
            errors.append("overlapping cone interiors: %r, %r" % (a, b))
            continue
        if inter.generators:
            if not inter.is_face_of(a) or not inter.is_face_of(b):
                errors.append("non-face intersection: %r, %r" % (a, b))
    complete = not errors and _fan_wall_complete(fan)
    if fan._complete is True and not complete:
        errors.append("completeness failure")
    return {"errors": errors, "complete": complete}
