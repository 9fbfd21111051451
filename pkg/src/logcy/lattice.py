"""Exact rank-2 lattice geometry: wedge products, primitive vectors, angular
order of rays, and small integral matrices.

Conventions used throughout the package:

* lattice vectors are pairs of Python ints ``(x, y)``;
* the wedge product ``u ^ v = u.x*v.y - u.y*v.x`` orients the plane
  counterclockwise;
* a 2x2 integral matrix is a pair of rows ``((a, b), (c, d))`` acting on
  column vectors.

No floating point is used anywhere: angular comparisons are done with a
half-plane split plus wedge signs.
"""

from fractions import Fraction
from functools import cmp_to_key
from math import gcd


# ---------------------------------------------------------------------------
# vectors


def wedge(u, v):
    """Determinant u ∧ v; positive iff (u, v) is counterclockwise."""
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def vadd(u, v):
    return (u[0] + v[0], u[1] + v[1])


def vsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def vneg(u):
    return (-u[0], -u[1])


def vscale(c, u):
    return (c * u[0], c * u[1])


def is_zero(u):
    return u[0] == 0 and u[1] == 0


def primitive(v):
    """Return ``(v/g, g)`` with ``g = gcd(|x|, |y|)``.

    The first component is primitive and keeps the direction of ``v``.
    Raises ValueError on the zero vector.
    """
    if is_zero(v):
        raise ValueError("zero vector has no primitive direction")
    g = gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g), g


def parallel_positive(u, v):
    """True if v is a positive multiple of u (both nonzero)."""
    return wedge(u, v) == 0 and dot(u, v) > 0


# ---------------------------------------------------------------------------
# angular order

def _halfplane(v, base):
    # 0: along base; 1: strictly ccw of base by < pi; 2: opposite to base;
    # 3: the remaining open half turn.
    w = wedge(base, v)
    d = dot(base, v)
    if w == 0:
        return 0 if d > 0 else 2
    return 1 if w > 0 else 3


def angle_cmp(u, v, base=(1, 0)):
    """Compare directions by ccw angle from ``base``; 0 iff parallel same way."""
    hu, hv = _halfplane(u, base), _halfplane(v, base)
    if hu != hv:
        return -1 if hu < hv else 1
    w = wedge(u, v)
    if w > 0:
        return -1
    if w < 0:
        return 1
    return 0


def angular_order(rays, base=(1, 0)):
    """Sort ray directions counterclockwise starting from ``base``.

    Input directions need not be primitive; rays with the same support stay
    adjacent in the output (grouped, in stable input order).
    """
    prims = [primitive(r)[0] for r in rays]
    idx = sorted(range(len(rays)),
                 key=cmp_to_key(lambda i, j: angle_cmp(prims[i], prims[j], base)))
    return [rays[i] for i in idx]


def strictly_between_ccw(u, w, v):
    """True if direction v lies strictly inside the ccw arc from u to w (< 2pi).

    Assumes u and w are not parallel-equal; the arc is the set of directions
    swept rotating u counterclockwise onto w.
    """
    if angle_cmp(v, u) == 0 or angle_cmp(v, w) == 0:
        return False
    # measure ccw position of v and of w relative to u
    cv = _pos(v, u)
    cw = _pos(w, u)
    return cv < cw


def _pos(v, base):
    """Total ccw order key of v relative to base: a pair sortable exactly."""
    h = _halfplane(v, base)
    # within a half plane, later angle  <=>  smaller wedge with a fixed probe;
    # use the wedge with base rotated into the half plane.
    if h == 0:
        return (0, 0)
    if h == 2:
        return (2, 0)
    # fraction wedge/dot is monotone in angle within an open half-plane
    return (h, Fraction(-dot(base, v), abs(wedge(base, v))))


# ---------------------------------------------------------------------------
# 2x2 integral matrices, rows ((a, b), (c, d))

IDENTITY = ((1, 0), (0, 1))


def mat_mul(m, n):
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def mat_apply(m, v):
    (a, b), (c, d) = m
    return (a * v[0] + b * v[1], c * v[0] + d * v[1])


def mat_det(m):
    (a, b), (c, d) = m
    return a * d - b * c


def mat_inv(m):
    """Inverse of a matrix with determinant +-1."""
    (a, b), (c, d) = m
    det = a * d - b * c
    if det not in (1, -1):
        raise ValueError("matrix not invertible over Z")
    return ((d // det, -b // det), (-c // det, a // det))


def mat_pow(m, k):
    if k < 0:
        return mat_pow(mat_inv(m), -k)
    out = IDENTITY
    while k:
        if k & 1:
            out = mat_mul(out, m)
        m = mat_mul(m, m)
        k >>= 1
    return out


def mat_from_columns(u, v):
    return ((u[0], v[0]), (u[1], v[1]))


def shear_fixing(w, n):
    """The map x -> x - n*(w ∧ x)*w for primitive w; det 1, fixes w."""
    wx, wy = w
    # on e1: w ∧ e1 = -wy ; on e2: w ∧ e2 = wx
    c1 = (1 + n * wy * wx, n * wy * wy)
    c2 = (-n * wx * wx, 1 - n * wx * wy)
    return mat_from_columns(c1, c2)


# ---------------------------------------------------------------------------
# small exact linear algebra helpers (used for ample tuples and gauges)


def solve2(a, b, c, d, e, f):
    """Solve [[a,b],[c,d]] (x,y)^T = (e,f)^T exactly; None if singular."""
    det = a * d - b * c
    if det == 0:
        return None
    x = Fraction(e * d - b * f, det)
    y = Fraction(a * f - e * c, det)
    return (x, y)


def fourier_motzkin_feasible(ineqs, nvars):
    """Find an exact rational point satisfying ``sum a_i x_i + c >= 0`` rows.

    ``ineqs`` is a list of tuples (a_1, ..., a_nvars, c) with Fraction/int
    entries.  Returns a list of Fractions or None if infeasible.  Intended for
    tiny systems (a handful of variables); eliminates variables one at a time.
    """
    rows = [tuple(Fraction(x) for x in r) for r in ineqs]
    stack = []
    for var in range(nvars - 1, -1, -1):
        lows, highs, rest = [], [], []
        for r in rows:
            a = r[var]
            if a > 0:
                lows.append(r)      # x_var >= -(rest)/a
            elif a < 0:
                highs.append(r)     # x_var <= -(rest)/a
            else:
                rest.append(r)
        stack.append((var, lows, highs))
        new_rows = list(rest)
        for lo in lows:
            for hi in highs:
                # eliminate: a_lo > 0, a_hi < 0
                a_lo, a_hi = lo[var], hi[var]
                comb = tuple(a_lo * hi[i] - a_hi * lo[i] for i in range(nvars + 1))
                new_rows.append(comb)
        rows = new_rows
    for r in rows:
        if r[nvars] < 0:
            return None
    # back-substitute
    point = [Fraction(0)] * nvars
    for var, lows, highs in reversed(stack):
        lo_bound, hi_bound = None, None
        for r in lows:
            val = -(sum(r[i] * point[i] for i in range(nvars) if i != var) + r[nvars])
            val = val / r[var]
            if lo_bound is None or val > lo_bound:
                lo_bound = val
        for r in highs:
            val = -(sum(r[i] * point[i] for i in range(nvars) if i != var) + r[nvars])
            val = val / r[var]
            if hi_bound is None or val < hi_bound:
                hi_bound = val
        if lo_bound is None and hi_bound is None:
            point[var] = Fraction(0)
        elif lo_bound is None:
            point[var] = hi_bound - 1
        elif hi_bound is None:
            point[var] = lo_bound + 1
        else:
            if lo_bound > hi_bound:
                return None
            point[var] = (lo_bound + hi_bound) / 2
    return point
