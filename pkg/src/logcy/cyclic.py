"""Deformations of cyclic quotient singularities from chain configurations.

A chain is a smooth toric surface proper over the affine line: its fan has
support a half-plane, boundary rays mbar_0 and mbar_{n+1} = -mbar_0, and
interior rays mbar_1 .. mbar_n carrying the blowup counts.  The multiplicity
of the central fibre along the i-th divisor is alpha_i = mbar_0 ∧ mbar_i.

Everything here is elementary lattice geometry: the deformation-family chart
equations, the P-resolution read off the polytope cut out at height one, and
the dual singularity type from the developed cone, cross-checked against
Hirzebruch-Jung continued fractions.
"""

from fractions import Fraction
from math import gcd

from .lattice import mat_apply, primitive, wedge
from .tropical import PairError, develop_cycle


class ChainSpec:
    def __init__(self, fan_rays, blowups):
        self.fan_rays = [tuple(int(c) for c in r) for r in fan_rays]
        self.blowups = [int(x) for x in blowups]

    @classmethod
    def from_dict(cls, data):
        return cls(data["fan_rays"], data.get("blowups", []))

    def to_dict(self):
        return {"fan_rays": [list(r) for r in self.fan_rays],
                "blowups": list(self.blowups),
                "proper_over_line": True}


class ChainPair:
    """Validated chain data."""

    def __init__(self, spec):
        rays = spec.fan_rays
        if len(rays) < 3:
            raise PairError("a chain needs the two boundary rays and at "
                            "least one interior ray")
        self.rays = rays
        self.n = len(rays) - 2
        if tuple(rays[-1]) != (-rays[0][0], -rays[0][1]):
            raise PairError("boundary rays must span a half-plane")
        for r in rays:
            if primitive(r)[1] != 1:
                raise PairError("rays must be primitive")
        for i in range(len(rays) - 1):
            if wedge(rays[i], rays[i + 1]) != 1:
                raise PairError("consecutive rays must form oriented bases")
        self.blowups = list(spec.blowups)
        if len(self.blowups) != self.n:
            raise PairError("need one blowup count per interior ray")
        if any(l < 0 for l in self.blowups):
            raise PairError("blowup counts must be non-negative")
        # interior self-intersections from the toric relation
        self.dbar2 = []
        for i in range(1, self.n + 1):
            s = (rays[i - 1][0] + rays[i + 1][0], rays[i - 1][1] + rays[i + 1][1])
            m = rays[i]
            if m[0] != 0:
                if s[0] % m[0] != 0 or s[1] * m[0] != s[0] * m[1]:
                    raise PairError("fan not smooth at interior ray %d" % i)
                self.dbar2.append(-s[0] // m[0])
            else:
                if s[0] != 0 or s[1] % m[1] != 0:
                    raise PairError("fan not smooth at interior ray %d" % i)
                self.dbar2.append(-s[1] // m[1])
        self.self_int = [self.dbar2[i] - self.blowups[i]
                         for i in range(self.n)]
        # central-fibre multiplicities, alpha_0 = alpha_{n+1} = 0
        self.alphas = [wedge(rays[0], rays[i]) for i in range(len(rays))]
        if self.alphas[0] != 0 or self.alphas[-1] != 0 or \
                any(a <= 0 for a in self.alphas[1:-1]):
            raise PairError("fan is not proper over the line")

    def develop_interior(self):
        """Developed boundary vectors v_0 .. v_{n+1} of B (chart of the first
        cone), using D_i^2 on the interior rays."""
        vs = [(1, 0), (0, 1)]
        for j in range(1, self.n + 1):
            a, b = vs[j - 1], vs[j]
            c = self.self_int[j - 1]
            vs.append((-a[0] - c * b[0], -a[1] - c * b[1]))
        return vs


class TSingularity:
    """Quotient singularity of type (1/(d n^2))(1, d n a - 1)."""

    def __init__(self, d, n, a):
        self.d, self.n, self.a = int(d), int(n), int(a)
        if self.d <= 0 or self.n <= 0 or gcd(self.a, self.n) != 1 and self.n > 1:
            raise ValueError("invalid T-singularity data")

    def index(self):
        return self.d * self.n * self.n

    def label(self):
        r = self.index()
        if r == 1:
            return "smooth"
        return "1/%d(1,%d)" % (r, (self.d * self.n * self.a - 1) % r)

    def __repr__(self):
        return "TSingularity(d=%d, n=%d, a=%d)" % (self.d, self.n, self.a)

    def __eq__(self, other):
        return (self.d, self.n, self.a % self.n) == \
            (other.d, other.n, other.a % other.n)


def family_equations(chain):
    """Chart equations x_{i-1} x_{i+1} = x_i^{-D_i^2 - l_i} (x_i^{l_i} +
    a_{i1} x_i^{l_i - 1} + ... + a_{il_i}), one per interior ray."""
    out = []
    for i in range(chain.n):
        expo = -chain.self_int[i] - chain.blowups[i]
        if expo < 0:
            raise PairError("invalid chain: negative exponent at ray %d" % (i + 1,))
        out.append({
            "i": i + 1,
            "exponent": expo,
            "l": chain.blowups[i],
            "text": _equation_text(i + 1, expo, chain.blowups[i]),
        })
    return out


def _equation_text(i, expo, l):
    lhs = "x%d*x%d" % (i - 1, i + 1)
    monic = ["x%d^%d" % (i, l - j) if l - j > 1 else
             ("x%d" % i if l - j == 1 else "1") for j in range(l + 1)]
    terms = []
    for j, mon in enumerate(monic):
        if j == 0:
            terms.append(mon)
        elif mon == "1":
            terms.append("a%d%d" % (i, j))
        else:
            terms.append("a%d%d*%s" % (i, j, mon))
    poly = " + ".join(terms)
    if expo == 0:
        return "%s = %s" % (lhs, poly)
    xpart = "x%d^%d" % (i, expo) if expo > 1 else "x%d" % i
    if l == 0:
        return "%s = %s" % (lhs, xpart)
    return "%s = %s*(%s)" % (lhs, xpart, poly)


# ---------------------------------------------------------------------------
# cones, normal forms and Hirzebruch-Jung resolutions


def normalize_cone(u, w):
    """Bring the strictly convex cone <u, w> (counterclockwise) to the form
    <(0,1), (r, -a)> with 0 <= a < r; returns (r, a)."""
    u = tuple(u)
    w = tuple(w)
    r = wedge(u, w)
    if r <= 0:
        raise PairError("cone is not strictly convex and oriented")
    # row1 kills u and is positive on w; row2 pairs to 1 with u
    row1 = (-u[1], u[0])
    row2 = _dual_vector(u)
    c = row2[0] * w[0] + row2[1] * w[1]
    # after the map, u = (0,1) and w = (r, c); shear to 0 <= a < r
    a = (-c) % r
    return (int(r), int(a))


def _dual_vector(u):
    """Integer t with t . u = 1 for primitive u (extended gcd)."""
    x, y = u
    if x == 0:
        return (0, 1 // y) if y in (1, -1) else _bezout(x, y)
    return _bezout(x, y)


def _bezout(x, y):
    a0, a1 = abs(x), abs(y)
    s0, s1, t0, t1 = 1, 0, 0, 1
    while a1:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    s = s0 if x >= 0 else -s0
    t = t0 if y >= 0 else -t0
    assert s * x + t * y == 1
    return (s, t)


def hj_resolve(u, w):
    """The minimal chain of primitive generators along the boundary of the
    convex hull of (cone<u, w> ∩ Z^2) \\ {0}, endpoints included.  The cone
    must be strictly convex and counterclockwise."""
    u = primitive(tuple(u))[0]
    w = primitive(tuple(w))[0]
    if wedge(u, w) <= 0:
        raise PairError("cone must be strictly convex, counterclockwise")
    chain = [u]
    cur = u
    guard = 0
    while wedge(cur, w) > 1:
        guard += 1
        if guard > 10000:
            raise RuntimeError("runaway continued fraction")
        # the next hull vertex: wedge(cur, t) = 1 and 0 <= wedge(t, w) < d
        t = _dual_vector((-cur[1], cur[0]))
        d = wedge(cur, w)
        while wedge(t, w) < 0:
            t = (t[0] + cur[0], t[1] + cur[1])
        while wedge(t, w) >= d:
            t = (t[0] - cur[0], t[1] - cur[1])
        chain.append(t)
        cur = t
    if cur != w:
        chain.append(w)
    return chain


def hj_continued_fraction(r, a):
    """Coefficients [b_1, b_2, ...] of r/a = b_1 - 1/(b_2 - 1/(...)),
    all b_i >= 2 (the minimal resolution self-intersections are -b_i)."""
    if not (0 < a < r):
        raise ValueError("need 0 < a < r")
    out = []
    while a:
        b = -(-r // a)  # ceil
        out.append(b)
        r, a = a, b * a - r
    return out


def chain_selfints(chain_rays):
    """Self-intersections -b_j of the interior rays of a chain of primitive
    vectors with unimodular consecutive pairs."""
    out = []
    for j in range(1, len(chain_rays) - 1):
        s = (chain_rays[j - 1][0] + chain_rays[j + 1][0],
             chain_rays[j - 1][1] + chain_rays[j + 1][1])
        m = chain_rays[j]
        if m[0] != 0:
            out.append(-s[0] // m[0])
        else:
            out.append(-s[1] // m[1])
    return out


def dual_singularity_type(chain):
    """The cyclic quotient type (r, a) of the developed cone of the chain,
    normalized to <(0,1),(r,-a)>; r = 1 means a smooth point."""
    if all(l == 0 for l in chain.blowups):
        raise PairError("purely toric chain develops to a half-plane")
    vs = chain.develop_interior()
    u, w = vs[0], vs[-1]
    if wedge(u, w) <= 0 and not (wedge(u, w) == 0 and
                                 (u[0] * w[0] + u[1] * w[1]) < 0):
        raise PairError("developed cone is not strictly convex")
    if wedge(u, w) <= 0:
        raise PairError("developed cone is not strictly convex")
    r, a = normalize_cone(u, w)
    # oracle: the hull chain of the developed cone realizes the minimal
    # resolution of the contracted singularity; its self-intersections must
    # match the continued fraction of r/a
    if r > 1:
        sl = chain_selfints(hj_resolve(u, w))
        if a == 0:
            raise AssertionError("non-smooth cone normalized to a = 0")
        cf = hj_continued_fraction(r, a)
        if sl != [-b for b in cf]:
            raise AssertionError(
                "continued-fraction oracle mismatch: %r vs %r" % (sl, cf))
    return (r, a)


# ---------------------------------------------------------------------------
# P-resolutions


class PResolution:
    def __init__(self, vertices, singularities, pair_dim, sing_dim,
                 k_ample):
        self.vertices = vertices
        self.singularities = singularities
        self.pair_dim = pair_dim
        self.sing_dim = sing_dim
        self.k_ample = k_ample

    def serialize(self):
        return {
            "vertices": [{"ray": i, "point": [str(c) for c in pt]}
                         for i, pt in self.vertices],
            "singularities": [{"d": s.d, "n": s.n, "a": s.a % s.n,
                               "label": s.label()}
                              for s in self.singularities],
            "pair_dim": self.pair_dim,
            "sing_dim": self.sing_dim,
            "k_ample": self.k_ample,
        }


def p_resolution(chain):
    """The P-resolution cut out by the polytope at central-fibre height one.

    Vertices sit on the rays with blowups; the vertex on ray i carries a
    T-singularity of type (1/(l_i n_i^2))(1, l_i n_i a_i - 1) where
    (n_i, a_i) are the half-plane coordinates of mbar_i.
    """
    if all(l == 0 for l in chain.blowups):
        raise PairError("no singularity to resolve (all blowups zero)")
    vs = chain.develop_interior()
    n = chain.n
    # half-plane coordinates: n_i = alpha_i, a_i = mbar_i ∧ mbar_1 mod n_i
    sing = []
    vertices = []
    vertex_rays = [i for i in range(1, n + 1) if chain.blowups[i - 1] > 0]
    for i in vertex_rays:
        ni = chain.alphas[i]
        ai = wedge(chain.rays[i], chain.rays[1]) % ni if ni > 1 else 0
        if ni > 1 and gcd(ai, ni) != 1:
            raise AssertionError("non-primitive half-plane coordinates")
        sing.append(TSingularity(chain.blowups[i - 1], ni,
                                 ai if ni > 1 else 1))
        vertices.append((i, (Fraction(vs[i][0], ni), Fraction(vs[i][1], ni))))
    pair_dim = sum(chain.blowups)
    # polygon boundary of Xi, traversed from the mbar_0 end to the
    # mbar_{n+1} end; edge directions, then outer normals
    pts = [v for _, v in vertices]
    edge_dirs = [(-vs[0][0], -vs[0][1])]
    for k in range(1, len(pts)):
        d = (pts[k][0] - pts[k - 1][0], pts[k][1] - pts[k - 1][1])
        den = d[0].denominator * d[1].denominator // gcd(
            d[0].denominator, d[1].denominator)
        di = (int(d[0] * den), int(d[1] * den))
        edge_dirs.append(primitive(di)[0])
    edge_dirs.append(tuple(vs[-1]))
    # K-ampleness: for each bounded edge the neighbouring bend lines meet on
    # the opposite side (they all pass through the origin here)
    k_ample = True
    for k in range(1, len(edge_dirs) - 1):
        v0, v1 = pts[k - 1], pts[k]
        if not _kample_edge(v0, v1, edge_dirs[k - 1], edge_dirs[k],
                            edge_dirs[k + 1]):
            k_ample = False
    # the traversal is clockwise around Xi (interior above), so reverse the
    # outer-normal chain to make consecutive corner cones counterclockwise
    normals = [(d[1], -d[0]) for d in edge_dirs][::-1]
    full_chain = [normals[0]]
    corner_types = []
    for k in range(len(normals) - 1):
        piece = hj_resolve(normals[k], normals[k + 1])
        corner_types.append(normalize_cone(normals[k], normals[k + 1]))
        full_chain.extend(piece[1:])
    corner_types.reverse()  # back to vertex order along the rays
    selfints = chain_selfints(full_chain)
    # positions of the original bounded-edge normals inside the full chain
    eprime_sq = []
    pos = 0
    for k in range(1, len(normals) - 1):
        pos = full_chain.index(normals[k], pos + 1)
        eprime_sq.append(selfints[pos - 1])
    s_count = sum(1 for t in sing if t.n == 1)
    sing_dim = pair_dim - s_count + sum(-e - 1 for e in eprime_sq)
    res = PResolution(vertices, sing, pair_dim, sing_dim, k_ample)
    res.corner_types = corner_types
    res.eprime_sq = eprime_sq
    # second oracle: each corner cone presents exactly the stated
    # T-singularity index 1/(l n^2)
    for t, (r, a) in zip(sing, corner_types):
        if r != t.index():
            raise AssertionError("corner index %d does not match type %r"
                                 % (r, t))
    return res


def _kample_edge(v0, v1, u_prev, u_cur, u_next):
    """Criterion for K positive on the divisor of the bounded edge (v0, v1):
    the lines v0 + R(u_cur - u_prev) and v1 + R(u_next - u_cur) meet on the
    opposite side of the edge from the polytope."""
    d0 = (u_cur[0] - u_prev[0], u_cur[1] - u_prev[1])
    d1 = (u_next[0] - u_cur[0], u_next[1] - u_cur[1])
    den = d0[0] * d1[1] - d0[1] * d1[0]
    if den == 0:
        return False
    # v0 + t d0 = v1 + s d1
    rx, ry = v1[0] - v0[0], v1[1] - v0[1]
    t = Fraction(rx * d1[1] - ry * d1[0], den)
    x = (v0[0] + t * d0[0], v0[1] + t * d0[1])
    # the polytope contains v0 + alpha*(u_cur) + small inward; the inward
    # side of the edge is where the origin is NOT (Xi = height >= 1)
    nrm = (-(v1[1] - v0[1]), v1[0] - v0[0])
    side_origin = nrm[0] * (0 - v0[0]) + nrm[1] * (0 - v0[1])
    side_x = nrm[0] * (x[0] - v0[0]) + nrm[1] * (x[1] - v0[1])
    if side_origin == 0 or side_x == 0:
        return False
    return (side_origin > 0) == (side_x > 0)
