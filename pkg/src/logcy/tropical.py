"""The tropicalization of a Looijenga pair given by a toric model.

A pair is specified by a complete smooth fan with rays ``mbar_0 .. mbar_{n-1}``
in counterclockwise order (the fan of the toric model) together with the
number ``l_i`` of interior points blown up on each boundary divisor.  The
integral affine surface ``B`` is glued from the cones of the fan, with charts
around the ray ``rho_i`` determined by the self-intersections
``D_i^2 = Dbar_i^2 - l_i``.

Indices are 0-based and cyclic; cone ``i`` is spanned by ``(v_i, v_{i+1})``,
and a chart point ``(i, (a, b))`` means ``a*v_i + b*v_{i+1}``.  Points and
tangent vectors on the universal cover use "unrolled" integer cone indices.

Pairs with n < 3 are entered by their boundary self-intersection sequence and
are refined by corner subdivision until a toric model with n >= 3 exists; the
new rays carry bending class 0 (they are exceptionals of toric blowups), which
is recorded in ``orig_ray``.
"""

from fractions import Fraction
from itertools import combinations

from .lattice import (IDENTITY, mat_apply, mat_inv, mat_mul, primitive,
                      shear_fixing, solve2, vadd, wedge)


class PairError(ValueError):
    """Invalid pair specification."""


# ---------------------------------------------------------------------------
# specification


class PairSpec:
    """Toric-model input data.

    Either ``fan_rays`` (n >= 3, primitive, counterclockwise, consecutive
    wedge 1) with ``blowups``, or ``self_intersections`` for n < 3.
    ``ample`` optionally gives coefficients h_i of an ample divisor
    ``sum h_i Dbar_i`` on the model.
    """

    def __init__(self, fan_rays=None, blowups=None, ample=None,
                 self_intersections=None):
        self.fan_rays = [tuple(int(c) for c in r) for r in fan_rays] if fan_rays else None
        self.blowups = [int(x) for x in blowups] if blowups is not None else None
        self.ample = [int(x) for x in ample] if ample is not None else None
        self.self_intersections = ([int(x) for x in self_intersections]
                                   if self_intersections is not None else None)

    @classmethod
    def from_dict(cls, data):
        return cls(fan_rays=data.get("fan_rays"),
                   blowups=data.get("blowups"),
                   ample=data.get("ample"),
                   self_intersections=data.get("self_intersections"))

    def to_dict(self):
        out = {}
        if self.fan_rays is not None:
            out["fan_rays"] = [list(r) for r in self.fan_rays]
        if self.blowups is not None:
            out["blowups"] = list(self.blowups)
        if self.ample is not None:
            out["ample"] = list(self.ample)
        if self.self_intersections is not None:
            out["self_intersections"] = list(self.self_intersections)
        return out


def _check_fan(rays):
    n = len(rays)
    if n < 3:
        raise PairError("a complete smooth fan needs at least 3 rays")
    for r in rays:
        if r == (0, 0):
            raise PairError("zero ray")
        if primitive(r)[1] != 1:
            raise PairError("fan rays must be primitive: %r" % (r,))
    for i in range(n):
        if wedge(rays[i], rays[(i + 1) % n]) != 1:
            raise PairError(
                "consecutive rays %r, %r do not form an oriented basis"
                % (rays[i], rays[(i + 1) % n]))
    # consecutive wedge 1 gives local convexity; a single winding needs the
    # directions pairwise distinct.
    for i, j in combinations(range(n), 2):
        if rays[i] == rays[j]:
            raise PairError("duplicate ray %r" % (rays[i],))
    return n


def _selfint_from_fan(rays):
    n = len(rays)
    out = []
    for i in range(n):
        s = vadd(rays[(i - 1) % n], rays[(i + 1) % n])
        m = rays[i]
        # s = -Dbar_i^2 * m
        if m[0] != 0:
            if s[0] % m[0] != 0 or s[1] * m[0] != s[0] * m[1]:
                raise PairError("fan is not smooth at ray %d" % i)
            out.append(-s[0] // m[0])
        else:
            if s[0] != 0 or s[1] % m[1] != 0:
                raise PairError("fan is not smooth at ray %d" % i)
            out.append(-s[1] // m[1])
    return out


def develop_cycle(d2, count, v0=(1, 0), v1=(0, 1)):
    """Develop boundary rays ``v_0 .. v_count`` of the cycle with the given
    self-intersections: ``v_{j+1} = -v_{j-1} - d2[j mod n] * v_j``."""
    n = len(d2)
    vs = [v0, v1]
    for j in range(1, count):
        a, b = vs[j - 1], vs[j]
        c = d2[j % n]
        vs.append((-a[0] - c * b[0], -a[1] - c * b[1]))
    return vs


def _fan_from_selfints(dbar2):
    """Reconstruct a complete smooth fan with given self-intersections, or
    None if the development does not close up into a single winding."""
    n = len(dbar2)
    vs = develop_cycle(dbar2, n + 1)
    if vs[n] != vs[0] or vs[n + 1] != vs[1]:
        return None
    rays = vs[:n]
    try:
        _check_fan(rays)
        if _selfint_from_fan(rays) != list(dbar2):
            return None
    except PairError:
        return None
    return rays


class TropicalPair:
    """B_{(Y,D)} together with its toric model."""

    def __init__(self, rays, blowups, orig_ray=None, origin_note=None):
        self.rays = [tuple(r) for r in rays]
        self.n = len(self.rays)
        self.blowups = list(blowups)
        if len(self.blowups) != self.n:
            raise PairError("need one blowup count per ray")
        if any(l < 0 for l in self.blowups):
            raise PairError("blowup counts must be non-negative")
        self.dbar2 = _selfint_from_fan(self.rays)
        self.self_int = [self.dbar2[i] - self.blowups[i] for i in range(self.n)]
        self.orig_ray = list(orig_ray) if orig_ray is not None else [True] * self.n
        self.origin_note = origin_note
        # exceptional index pairs (i, j), j = 0..l_i-1, in a fixed flat order
        self.exc_pairs = [(i, j) for i in range(self.n)
                          for j in range(self.blowups[i])]

    # -- chart transitions --------------------------------------------------

    def crossing_matrix(self, i):
        """Tangent transport across ray ``rho_i``, from the chart of cone
        ``i-1`` (basis v_{i-1}, v_i) to the chart of cone ``i`` (basis
        v_i, v_{i+1}): (a, b) -> (b - a*D_i^2, -a)."""
        d = self.self_int[i % self.n]
        return ((-d, 1), (-1, 0))

    def transport_across_ray(self, i, vec, direction="ccw"):
        m = self.crossing_matrix(i)
        if direction == "ccw":
            return mat_apply(m, vec)
        if direction == "cw":
            return mat_apply(mat_inv(m), vec)
        raise ValueError("direction must be 'ccw' or 'cw'")

    def monodromy(self):
        """The deck transformation T of the universal cover in the basis
        (v_0, v_1) of cone 0; T(v_j) = v_{j+n} on the developed cover."""
        phi = IDENTITY
        for i in range(1, self.n + 1):
            phi = mat_mul(self.crossing_matrix(i % self.n), phi)
        return mat_inv(phi)

    def develop(self, j_from, j_to):
        """Developed boundary vectors v_j (cone-0 coordinates, v_0 = (1,0),
        v_1 = (0,1)) for j in [j_from, j_to], via
        v_{j+1} = -v_{j-1} - D_{j mod n}^2 v_j."""
        n = self.n
        fwd = {0: (1, 0), 1: (0, 1)}
        j = 1
        while j < j_to:
            a, b = fwd[j - 1], fwd[j]
            c = self.self_int[j % n]
            fwd[j + 1] = (-a[0] - c * b[0], -a[1] - c * b[1])
            j += 1
        j = 0
        while j > j_from:
            a, b = fwd[j + 1], fwd[j]
            c = self.self_int[j % n]
            fwd[j - 1] = (-a[0] - c * b[0], -a[1] - c * b[1])
            j -= 1
        return [fwd[j] for j in range(j_from, j_to + 1)]

    # -- nu ----------------------------------------------------------------

    def nu_point_to_plane(self, cone_index, coords):
        """a*v_i + b*v_{i+1} -> a*mbar_i + b*mbar_{i+1} in R^2 (exact)."""
        i = cone_index % self.n
        a, b = coords
        u, w = self.rays[i], self.rays[(i + 1) % self.n]
        return (a * u[0] + b * w[0], a * u[1] + b * w[1])

    def nu_plane_to_point(self, xy):
        """Inverse of ``nu_point_to_plane``: locate the cone and solve."""
        if xy[0] == 0 and xy[1] == 0:
            raise PairError("the origin is not a point of B_0")
        i = self.cone_of_direction(xy)
        u, w = self.rays[i], self.rays[(i + 1) % self.n]
        ab = solve2(u[0], w[0], u[1], w[1], xy[0], xy[1])
        return (i, ab)

    def cone_of_direction(self, xy):
        """Index i with xy in the cone spanned by mbar_i, mbar_{i+1} (the
        smallest such i when xy lies on a ray)."""
        for i in range(self.n):
            u, w = self.rays[i], self.rays[(i + 1) % self.n]
            if wedge(u, xy) >= 0 and wedge(xy, w) > 0:
                return i
            if wedge(u, xy) == 0 and wedge(xy, w) == 0:
                # xy on both edges: impossible for a genuine fan
                continue
        for i in range(self.n):
            u = self.rays[i]
            if wedge(u, xy) == 0 and (u[0] * xy[0] + u[1] * xy[1]) > 0:
                return i
        raise PairError("direction %r not located in the fan" % (xy,))

    # -- boundary classification --------------------------------------------

    def intersection_matrix(self):
        """Cycle intersection matrix of D_1..D_n (n >= 3)."""
        n = self.n
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = self.self_int[i]
            j = (i + 1) % n
            m[i][j] += 1
            m[j][i] += 1
        return m

    def classify_boundary(self, with_witness=False):
        m = self.intersection_matrix()
        verdict, witness = _classify_symmetric(m)
        if with_witness:
            return verdict, witness
        return verdict

    def __repr__(self):
        return "TropicalPair(rays=%r, blowups=%r)" % (self.rays, self.blowups)


def _classify_symmetric(m):
    """Classify the symmetric integer matrix of a boundary cycle.

    Returns ('positive'|'semidefinite'|'definite', witness) where the witness
    is an integer vector x with x^T m x > 0 in the positive case.
    """
    n = len(m)
    a = [[Fraction(-m[i][j]) for j in range(n)] for i in range(n)]
    # track expressions of current coordinates in terms of original ones
    basis = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
             for i in range(n)]
    active = list(range(n))
    pivots = 0
    while active:
        pivot = None
        for i in active:
            if a[i][i] > 0:
                pivot = i
                break
        if pivot is None:
            for i in active:
                if a[i][i] < 0:
                    return "positive", _integerize(basis[i])
            # all diagonal zero: off-diagonal nonzero entries break PSD
            for i in active:
                for j in active:
                    if i != j and a[i][j] != 0:
                        # (e_i + e_j) or (e_i - e_j) has nonzero value
                        s = 1 if a[i][j] < 0 else -1
                        vec = [basis[i][k] + s * basis[j][k] for k in range(n)]
                        return "positive", _integerize(vec)
            break  # zero matrix on the active block: PSD, done
        pivots += 1
        p = a[pivot][pivot]
        others = [i for i in active if i != pivot]
        for i in others:
            c = a[i][pivot] / p
            if c != 0:
                for j in range(n):
                    a[i][j] -= c * a[pivot][j]
                    basis[i][j] -= c * basis[pivot][j]
                for j in range(n):
                    a[j][i] = a[i][j]
        active = others
    if pivots == n:
        return "definite", None
    return "semidefinite", None


def _integerize(vec):
    from math import gcd
    den = 1
    for f in vec:
        den = den * f.denominator // gcd(den, f.denominator)
    out = [int(f * den) for f in vec]
    g = 0
    for x in out:
        g = gcd(g, abs(x))
    if g > 1:
        out = [x // g for x in out]
    return out


# ---------------------------------------------------------------------------
# building, with n < 3 refinement


def build_pair(spec):
    """Construct the tropical pair from a specification."""
    if spec.fan_rays is not None:
        rays = [tuple(r) for r in spec.fan_rays]
        if len(rays) < 3:
            raise PairError("fans with fewer than 3 rays do not exist; "
                            "use self_intersections for n < 3 pairs")
        _check_fan(rays)
        blowups = spec.blowups if spec.blowups is not None else [0] * len(rays)
        pair = TropicalPair(rays, blowups)
        if spec.self_intersections is not None:
            if list(spec.self_intersections) != pair.self_int:
                raise PairError("self_intersections inconsistent with fan and blowups")
        return pair
    if spec.self_intersections is None:
        raise PairError("specify fan_rays or self_intersections")
    d = list(spec.self_intersections)
    if len(d) >= 3:
        raise PairError("n >= 3 pairs must be given by their toric model fan")
    if spec.blowups is not None and any(x != 0 for x in spec.blowups):
        raise PairError("interior blowups are not supported for n < 3 input; "
                        "give the toric model of a refinement instead")
    return _build_small_n(d)


def _refine_once(d, orig, pos):
    """Corner subdivision of cone (pos, pos+1) of a boundary cycle; returns
    the new cycle and flags.  Handles the n = 1 self-glued cone."""
    n = len(d)
    if n == 1:
        # the unique cone is glued to itself along the single ray: the chart
        # rule there uses d[0] - 2, and subdividing costs the ray twice.
        return [d[0] - 4, -1], [orig[0], False]
    nxt = (pos + 1) % n
    out_d, out_f = [], []
    for i in range(n):
        di = d[i]
        if i == pos:
            di -= 1
        if i == nxt:
            di -= 1
        out_d.append(di)
        out_f.append(orig[i])
        if i == pos:
            out_d.append(-1)
            out_f.append(False)
    if pos == n - 1 and n > 1:
        # inserted after the last entry: already appended in the loop
        pass
    return out_d, out_f


def _model_search(d, orig, max_total=14):
    """Find blowup counts l >= 0 with d_i + l_i the self-intersections of a
    complete smooth fan.  Returns (rays, l) or None."""
    n = len(d)
    target = 12 - 3 * n  # sum of self-intersections of any smooth complete fan
    total = target - sum(d)
    if total < 0:
        return None
    if total > max_total:
        return None

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for l in compositions(total, n):
        rays = _fan_from_selfints([d[i] + l[i] for i in range(n)])
        if rays is not None:
            return rays, list(l)
    return None


def _build_small_n(d):
    """Refine an n < 3 boundary cycle until a toric model exists."""
    states = [(list(d), [True] * len(d))]
    seen = set()
    for _ in range(40):
        new_states = []
        for cyc, orig in states:
            key = (tuple(cyc), tuple(orig))
            if key in seen:
                continue
            seen.add(key)
            if len(cyc) >= 3:
                found = _model_search(cyc, orig)
                if found is not None:
                    rays, l = found
                    return TropicalPair(rays, l, orig_ray=orig,
                                        origin_note={"self_intersections": d})
            for pos in range(len(cyc)):
                new_states.append(_refine_once(cyc, orig, pos))
        if not new_states:
            break
        states = new_states
    raise PairError("no toric model found for boundary cycle %r" % (d,))


# ---------------------------------------------------------------------------
# Looijenga factorization


def looijenga_check(t_inverse, factors):
    """Check T^{-1} = T_r ... T_1 for T_i x = x - n_i (w_i ∧ x) w_i.

    ``factors`` is a list of (w_i, n_i) with w_i primitive, in counterclockwise
    cyclic order; the product is taken in the listed order (T_1 first).
    """
    prod = IDENTITY
    for w, k in factors:
        w = tuple(w)
        if primitive(w)[0] != w:
            raise ValueError("factor direction %r is not primitive" % (w,))
        if k <= 0:
            raise ValueError("factor multiplicity must be positive")
        prod = mat_mul(shear_fixing(w, k), prod)
    return prod == tuple(map(tuple, t_inverse))


def model_factorization(pair):
    """The factorization of T^{-1} read off the toric model: one factor
    (mbar_i, l_i) for each ray with l_i > 0, in counterclockwise order,
    expressed in the basis of cone 0 (v_0, v_1) via the nu identification."""
    base = ((pair.rays[0][0], pair.rays[1][0]),
            (pair.rays[0][1], pair.rays[1][1]))
    binv = mat_inv(base)
    out = []
    for i in range(pair.n):
        if pair.blowups[i] > 0:
            w = mat_apply(binv, pair.rays[i])
            out.append((w, pair.blowups[i]))
    return out
