"""Curve classes of the blown-up surface and the truncation functional.

A class is a pair ``(tor, exc)`` of integer tuples: ``tor`` has one entry per
fan ray and records the intersection numbers with the toric boundary divisors
of the model (so it lies in the kernel of ``sum a_i * mbar_i``), while ``exc``
has one entry per blown-up point.  The class of the exceptional curve over
point j on ray i is the unit vector at slot (i, j); the strict transform of
the boundary divisor is ``[D_i] = p^*[Dbar_i] - sum_j E_ij``.

The degree functional lambda is linear, positive on all wall classes, and
used everywhere as the truncation grading: a monomial survives at order k iff
``lambda(class above phi) <= k * unit``, where ``unit`` normalizes one
boundary-class step to order one.
"""

from fractions import Fraction
from math import gcd

from .lattice import fourier_motzkin_feasible, wedge


def _tuple_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _tuple_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _tuple_scale(c, a):
    return tuple(c * x for x in a)


class ClassLattice:
    """Arithmetic of curve classes attached to a tropical pair."""

    def __init__(self, pair):
        self.pair = pair
        self.n = pair.n
        self.exc_pairs = list(pair.exc_pairs)
        self.exc_index = {p: k for k, p in enumerate(self.exc_pairs)}
        self.nexc = len(self.exc_pairs)

    # -- constructors --------------------------------------------------------

    def zero(self):
        return ((0,) * self.n, (0,) * self.nexc)

    def from_toric(self, tor):
        tor = tuple(int(x) for x in tor)
        s = [0, 0]
        for a, m in zip(tor, self.pair.rays):
            s[0] += a * m[0]
            s[1] += a * m[1]
        if s != [0, 0]:
            raise ValueError("tuple %r is not in ker s" % (tor,))
        return (tor, (0,) * self.nexc)

    def exc_class(self, i, j):
        k = self.exc_index[(i, j)]
        exc = [0] * self.nexc
        exc[k] = 1
        return ((0,) * self.n, tuple(exc))

    def dbar_class(self, i):
        """p^*[Dbar_i] as a class tuple (row of the intersection matrix)."""
        n = self.n
        tor = [0] * n
        tor[i] += self.pair.dbar2[i]
        tor[(i - 1) % n] += 1
        tor[(i + 1) % n] += 1
        return (tuple(tor), (0,) * self.nexc)

    def boundary_class(self, i):
        """[D_i] = p^*[Dbar_i] - sum_j E_ij."""
        tor, exc = self.dbar_class(i)
        exc = list(exc)
        for j in range(self.pair.blowups[i]):
            exc[self.exc_index[(i, j)]] -= 1
        return (tor, tuple(exc))

    # -- arithmetic -----------------------------------------------------------

    def add(self, a, b):
        return (_tuple_add(a[0], b[0]), _tuple_add(a[1], b[1]))

    def sub(self, a, b):
        return (_tuple_sub(a[0], b[0]), _tuple_sub(a[1], b[1]))

    def scale(self, c, a):
        return (_tuple_scale(c, a[0]), _tuple_scale(c, a[1]))

    def linear_gauge_class(self, e):
        """The class with toric tuple (<e, mbar_i>)_i, for e in Z^2; these
        tuples span the ambiguity of the piecewise-linear function."""
        tor = tuple(e[0] * m[0] + e[1] * m[1] for m in self.pair.rays)
        return (tor, (0,) * self.nexc)

    # -- the multivalued function phi -----------------------------------------

    def phibar_value(self, cone_index, m):
        """Value of the model's piecewise linear function on cone
        ``cone_index`` at the (integral) vector m, normalized to vanish on the
        last cone: sum_{k <= cone} (mbar_k ∧ m) p^*[Dbar_k]."""
        j = cone_index % self.n
        out = self.zero()
        for k in range(j + 1):
            c = wedge(self.pair.rays[k], m)
            if c:
                out = self.add(out, self.scale(c, self.dbar_class(k)))
        return out

    # -- weights ---------------------------------------------------------------

    def boundary_weights(self, cls):
        """w_i = C . D_i, using D_i = p^*Dbar_i - sum_j E_ij."""
        tor, exc = cls
        w = list(tor)
        for k, (i, _) in enumerate(self.exc_pairs):
            w[i] += exc[k]
        return tuple(w)

    def weight_of_point(self, cone_index, coords):
        """w of a point a*v_i + b*v_{i+1} in B(Z): a*e_i + b*e_{i+1}."""
        i = cone_index % self.n
        a, b = coords
        w = [0] * self.n
        w[i] += a
        w[(i + 1) % self.n] += b
        return tuple(w)

    # -- presentations -----------------------------------------------------------

    def to_boundary_presentation(self, cls):
        """Express a class as sum d_i [D_i] + sum e_ij [E_ij] with the gauge
        d_0 = d_1 = 0; returns (d, e) tuples."""
        tor, exc = cls
        n = self.n
        d = [Fraction(0)] * n
        # recursion d_{i+1} = tor_i - d_{i-1} - Dbar_i^2 d_i (with d0 = d1 = 0)
        for i in range(1, n - 1):
            d[i + 1] = Fraction(tor[i]) - d[i - 1] - self.pair.dbar2[i] * d[i]
        for i in (n - 1, 0):
            lhs = d[(i - 1) % n] + self.pair.dbar2[i] * d[i] + d[(i + 1) % n]
            if lhs != tor[i]:
                raise ValueError("class %r is not in the boundary span/gauge" % (cls,))
        if any(x.denominator != 1 for x in d):
            raise ValueError("class %r has no integral boundary presentation" % (cls,))
        d = [int(x) for x in d]
        e = list(exc)
        for k, (i, _) in enumerate(self.exc_pairs):
            e[k] += d[i]
        return tuple(d), tuple(e)

    def serialize(self, cls):
        tor, exc = cls
        out = {"toric": list(tor)}
        nz = {}
        for k, (i, j) in enumerate(self.exc_pairs):
            if exc[k]:
                nz["%d,%d" % (i, j)] = exc[k]
        out["exc"] = nz
        return out

    def deserialize(self, data):
        tor = tuple(int(x) for x in data["toric"])
        self.from_toric(tor)  # validates membership in ker s
        exc = [0] * self.nexc
        for key, val in data.get("exc", {}).items():
            i, j = (int(t) for t in key.split(","))
            exc[self.exc_index[(i, j)]] = int(val)
        return (tor, tuple(exc))


def _solve3(rows):
    """Solve a 3x3 rational system given as rows (a, b, c, rhs); None if
    singular."""
    m = [[Fraction(x) for x in r] for r in rows]
    for col in range(3):
        piv = None
        for r in range(col, 3):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col]
        m[col] = [x / inv for x in m[col]]
        for r in range(3):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return (m[0][3], m[1][3], m[2][3])


class DegreeFunctional:
    """The truncation grading of a pair.

    ``ample`` is an optional integer tuple h with H = sum h_i Dbar_i ample on
    the model; a canonical ample divisor is chosen when omitted.  ``epsilon``
    weights the exceptional directions and defaults to a value small enough
    that every wall class has positive degree and every bend raises the degree
    by at least epsilon.
    """

    def __init__(self, pair, ample=None, epsilon=None):
        self.pair = pair
        self.lattice = ClassLattice(pair)
        n = pair.n
        if ample is not None:
            b = [int(x) for x in ample]
            if len(b) != n:
                raise ValueError("ample tuple must have one slope per ray")
            c = self._pairings(b)
            if any(x <= 0 for x in c):
                raise ValueError("given divisor is not ample: pairings %r" % (c,))
            self.b = b
            self.c = c
        else:
            self.c = self._default_ample()
            self.b = self._divisor_coeffs(self.c)
        # h_i = degree of the PL function at ray i (base-cone normalization)
        self.h_rays = [self._h_value(i, pair.rays[i]) for i in range(n)]
        self.ell, self.eta_min = self._gauge()
        total_l = sum(pair.blowups)
        default_eps = min(Fraction(1, 2 * (1 + total_l)), self.eta_min / 2)
        if epsilon is None:
            self.epsilon = default_eps
        else:
            self.epsilon = Fraction(epsilon)
            if not 0 < self.epsilon <= default_eps:
                raise ValueError(
                    "epsilon must lie in (0, %s] for this pair" % (default_eps,))
        self.delta = self.eta_min - self.epsilon
        unit = Fraction(1)
        for i in range(n):
            unit = max(unit, self.lam(self.lattice.boundary_class(i)))
        self.unit = unit

    # -- ample divisor helpers -------------------------------------------------

    def _pairings(self, b):
        """Intersection numbers (sum_rho b_rho Dbar_rho) . Dbar_i."""
        n = self.pair.n
        out = []
        for i in range(n):
            out.append(b[(i - 1) % n] + self.pair.dbar2[i] * b[i] + b[(i + 1) % n])
        return out

    def _default_ample(self):
        n = self.pair.n
        anti = [2 + d for d in self.pair.dbar2]
        if all(x > 0 for x in anti):
            g = 0
            for x in anti:
                g = gcd(g, x)
            return [x // g for x in anti]
        # general case: find a positive integer point of ker s exactly
        rays = self.pair.rays
        # express x_0, x_1 through the free variables using the basis
        # (mbar_0, mbar_1): mbar_k = alpha_k mbar_0 + beta_k mbar_1
        alphas, betas = [], []
        for k in range(2, n):
            m = rays[k]
            alpha = wedge(m, rays[1])  # coefficient on mbar_0
            beta = wedge(rays[0], m)   # coefficient on mbar_1
            alphas.append(alpha)
            betas.append(beta)
        nf = n - 2
        ineqs = []
        for k in range(nf):
            row = [0] * nf + [-1]
            row[k] = 1
            ineqs.append(tuple(row))
        ineqs.append(tuple([-a for a in alphas] + [-1]))
        ineqs.append(tuple([-b for b in betas] + [-1]))
        pt = fourier_motzkin_feasible(ineqs, nf)
        if pt is None:
            raise ValueError("no ample divisor found (fan not projective?)")
        den = 1
        for f in pt:
            den = den * f.denominator // gcd(den, f.denominator)
        free = [int(f * den) for f in pt]
        x0 = -sum(a * z for a, z in zip(alphas, free))
        x1 = -sum(b * z for b, z in zip(betas, free))
        c = [x0, x1] + free
        g = 0
        for x in c:
            g = gcd(g, x)
        c = [x // g for x in c]
        if any(x <= 0 for x in c):
            raise ValueError("ample search failed: %r" % (c,))
        s = [0, 0]
        for a, m in zip(c, rays):
            s[0] += a * m[0]
            s[1] += a * m[1]
        if s != [0, 0]:
            raise AssertionError("ample tuple not in ker s")
        return c

    def _divisor_coeffs(self, c):
        """Integer b with (sum b_rho Dbar_rho).Dbar_i = c_i, gauge b_0=b_1=0."""
        n = self.pair.n
        b = [0] * n
        for i in range(1, n - 1):
            b[(i + 1) % n] = c[i] - b[i - 1] - self.pair.dbar2[i] * b[i]
        got = self._pairings(b)
        if got != list(c):
            raise AssertionError("divisor coefficient recursion failed")
        return b

    # -- the PL height and its positive gauge ----------------------------------

    def _h_value(self, cone_index, m):
        """H-degree of phibar on cone ``cone_index`` at m (exact)."""
        j = cone_index % self.pair.n
        tot = 0
        for k in range(j + 1):
            tot += wedge(self.pair.rays[k], m) * self.c[k]
        return Fraction(tot)

    def _gauge(self):
        """Rational ell maximizing min_i (h(mbar_i) - <ell, mbar_i>)."""
        n = self.pair.n
        rays = self.pair.rays
        best = None
        rows_all = [(rays[i][0], rays[i][1], 1, self.h_rays[i]) for i in range(n)]
        from itertools import combinations
        for trip in combinations(range(n), 3):
            sol = _solve3([rows_all[t] for t in trip])
            if sol is None:
                continue
            l1, l2, z = sol
            if all(l1 * rays[i][0] + l2 * rays[i][1] + z <= self.h_rays[i]
                   for i in range(n)):
                if best is None or z > best[2]:
                    best = (l1, l2, z)
        if best is None or best[2] <= 0:
            raise AssertionError("gauge search failed (non-convex heights?)")
        return (best[0], best[1]), best[2]

    # -- degrees -----------------------------------------------------------------

    def lam(self, cls):
        tor, exc = cls
        val = Fraction(sum(b * a for b, a in zip(self.b, tor)))
        val += self.epsilon * sum(exc)
        return val

    def keep(self, cls, order):
        """Truncation predicate: the class survives at the given order."""
        return self.lam(cls) <= order * self.unit

    def t_degree_bound(self, order):
        """Engine degree in the exceptional variables needed for this order."""
        return int((order * self.unit) / self.delta) + 1

    def describe(self):
        return {
            "ample_pairings": list(self.c),
            "ample_coeffs": list(self.b),
            "epsilon": str(self.epsilon),
            "unit": str(self.unit),
        }
