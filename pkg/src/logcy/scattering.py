"""Scattering diagrams on the plane of the toric model and their completion.

The completion engine works in the ring Q[x^{\pm1}, y^{\pm1}][t_1, ..., t_L]
with one variable t_k per blown-up point, truncated by total degree in the
t's.  The initial diagram has one incoming wall per blown-up ray i with
function prod_j (1 + t_ij x^{mbar_i}); every monomial ever produced then has
x-part equal to a fixed character plus ``w(P) = sum p_k mbar_{i(k)}``, so
elements are stored as maps P -> coefficient with the x-part implicit.

Corrections are inserted order by order in t-degree: the full
counterclockwise loop is applied to both characters x and y, the degree-d
defect is decomposed into monomials, and each monomial is cancelled by a term
on the unique outgoing ray in its direction.  The loop being the identity
afterwards is asserted, and is the module's primary contract.

Conventions: a counterclockwise loop crossing the support ray through
direction s acts on z^q by f^{<n, r(q)>} with n = -(s ∧ .).
"""

from fractions import Fraction
from functools import cmp_to_key

from .lattice import angle_cmp, primitive, vscale, wedge
from .series import TruncatedElement, WallFunction

# ---------------------------------------------------------------------------
# dict-based truncated polynomials in the t variables


def _dmul(a, b, cap):
    out = {}
    for p1, c1 in a.items():
        d1 = sum(p1)
        for p2, c2 in b.items():
            if d1 + sum(p2) > cap:
                continue
            key = tuple(x + y for x, y in zip(p1, p2))
            v = out.get(key)
            c = c1 * c2
            if v is None:
                out[key] = c
            else:
                v += c
                if v == 0:
                    del out[key]
                else:
                    out[key] = v
    return out


def _done(L):
    return {(0,) * L: Fraction(1)}


def _dinv(f, L, cap):
    one = (0,) * L
    c0 = f.get(one, Fraction(0))
    if c0 != 1:
        raise ValueError("engine functions must have constant term 1")
    u = {p: c for p, c in f.items() if p != one}
    out = dict(_done(L))
    power = dict(_done(L))
    sign = -1
    while True:
        power = _dmul(power, u, cap)
        if not power:
            break
        for p, c in power.items():
            v = out.get(p, Fraction(0)) + sign * c
            if v == 0:
                out.pop(p, None)
            else:
                out[p] = v
        sign = -sign
    return out


def _dpow(f, k, L, cap):
    if k < 0:
        return _dpow(_dinv(f, L, cap), -k, L, cap)
    out = dict(_done(L))
    base = f
    while k:
        if k & 1:
            out = _dmul(out, base, cap)
        if k > 1:
            base = _dmul(base, base, cap)
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# the engine


class ScatterEngine:
    """Kontsevich-Soibelman completion over the exceptional variables."""

    def __init__(self, rays, slots, tmax):
        self.rays = [tuple(r) for r in rays]
        self.slots = list(slots)
        self.tmax = int(tmax)
        self.pairs = [(i, j) for i in range(len(rays))
                      for j in range(self.slots[i])]
        self.L = len(self.pairs)
        self.slot_ray = [self.rays[i] for (i, _) in self.pairs]
        # wall store: support direction -> {"in": poly or None, "out": poly}
        self.walls = {}
        for i, l in enumerate(self.slots):
            if l == 0:
                continue
            poly = _done(self.L)
            for k, (ri, _) in enumerate(self.pairs):
                if ri != i:
                    continue
                unit = [0] * self.L
                unit[k] = 1
                factor = {(0,) * self.L: Fraction(1),
                          tuple(unit): Fraction(1)}
                poly = _dmul(poly, factor, self.tmax)
            self.walls[self.rays[i]] = {"in": poly, "out": _done(self.L)}
        self.completed_to = 0

    def wvec(self, P):
        x = y = 0
        for p, m in zip(P, self.slot_ray):
            if p:
                x += p * m[0]
                y += p * m[1]
        return (x, y)

    def _f_total(self, s, cap):
        w = self.walls[s]
        f = w["out"]
        if w["in"] is not None:
            f = _dmul(f, w["in"], cap)
        return f

    def _sorted_supports(self):
        sup = list(self.walls.keys())
        base = self.rays[0]
        sup.sort(key=cmp_to_key(lambda u, v: angle_cmp(u, v, base)))
        return sup

    def loop_multiplier(self, e, cap):
        """theta_loop(x^e) / x^e as a P-indexed polynomial (full ccw loop
        starting just clockwise of ray 0)."""
        elt = _done(self.L)
        for s in self._sorted_supports():
            f = self._f_total(s, cap)
            if len(f) == 1:
                continue
            powers = {0: _done(self.L)}
            finv = None
            out = {}
            for P, c in elt.items():
                m = self.wvec(P)
                spow = -wedge(s, (e[0] + m[0], e[1] + m[1]))
                if spow not in powers:
                    if spow > 0:
                        powers[spow] = _dpow(f, spow, self.L, cap)
                    else:
                        if finv is None:
                            finv = _dinv(f, self.L, cap)
                        powers[spow] = _dpow(finv, -spow, self.L, cap)
                fp = powers[spow]
                dP = sum(P)
                for P2, c2 in fp.items():
                    if dP + sum(P2) > cap:
                        continue
                    key = tuple(a + b for a, b in zip(P, P2))
                    v = out.get(key, Fraction(0)) + c * c2
                    if v == 0:
                        out.pop(key, None)
                    else:
                        out[key] = v
            elt = out
        return elt

    def complete(self, upto=None):
        """Insert outgoing corrections order by order up to t-degree."""
        upto = self.tmax if upto is None else min(upto, self.tmax)
        one = (0,) * self.L
        e1, e2 = (1, 0), (0, 1)
        for deg in range(self.completed_to + 1, upto + 1):
            gx = self.loop_multiplier(e1, deg)
            gy = self.loop_multiplier(e2, deg)
            defects = {}
            for g, tag in ((gx, "x"), (gy, "y")):
                for P, c in g.items():
                    if P == one:
                        if c != 1:
                            raise AssertionError("loop constant term drifted")
                        continue
                    if sum(P) < deg:
                        raise AssertionError(
                            "uncancelled defect below current order: %r" % (P,))
                    defects.setdefault(P, {})[tag] = c
            corrections = {}
            for P, comp in sorted(defects.items()):
                m = self.wvec(P)
                if m == (0, 0):
                    raise AssertionError("defect with zero direction")
                mprim, _ = primitive(m)
                s = (-mprim[0], -mprim[1])
                cx = comp.get("x", Fraction(0))
                cy = comp.get("y", Fraction(0))
                # inserting chi * t^P x^{w(P)} on support s changes the loop
                # defect on x^e by -(s ∧ e) chi
                wx = -wedge(s, e1)
                wy = -wedge(s, e2)
                chi = -cx / wx if wx != 0 else -cy / wy
                if cx != -wx * chi or cy != -wy * chi:
                    raise AssertionError(
                        "defect at %r is not cancellable by one ray" % (P,))
                if chi != 0:
                    corrections.setdefault(s, {})[P] = chi
            for s, terms in corrections.items():
                poly = dict(_done(self.L))
                poly.update(terms)
                if s not in self.walls:
                    self.walls[s] = {"in": None, "out": poly}
                else:
                    self.walls[s]["out"] = _dmul(self.walls[s]["out"], poly,
                                                 self.tmax)
            if corrections:
                for e in (e1, e2):
                    g = self.loop_multiplier(e, deg)
                    if g != _done(self.L):
                        raise AssertionError(
                            "loop defect survives correction at degree %d" % deg)
            self.completed_to = deg
        return self

    def loop_is_identity(self, cap=None):
        cap = self.completed_to if cap is None else cap
        return (self.loop_multiplier((1, 0), cap) == _done(self.L)
                and self.loop_multiplier((0, 1), cap) == _done(self.L))


# ---------------------------------------------------------------------------
# presented diagrams


class Wall:
    """A wall of a presented scattering diagram.

    On the model plane ('Bbar' side) ``support`` is a primitive direction and
    the wall function's tangents are plane vectors.  On B ('B' side)
    ``support`` is (cone_index, coords) and tangents are in the chart of that
    cone; every canonical wall is outgoing.
    """

    def __init__(self, support, orientation, f, side):
        self.support = support
        self.orientation = orientation
        self.f = f
        self.side = side

    def __repr__(self):
        return "Wall(%r, %s, %r)" % (self.support, self.orientation,
                                     self.f.element)

    def serialize(self):
        sup = list(self.support) if self.side == "Bbar" else \
            {"cone": self.support[0], "coords": list(self.support[1])}
        return {"support": sup, "orientation": self.orientation,
                "f": self.f.element.serialize()}


class ScatteringDiagram:
    def __init__(self, walls, order, functional, side, pair=None, engine=None):
        self.walls = walls
        self.order = order
        self.functional = functional
        self.side = side
        self.pair = pair
        self.engine = engine

    def wall_at(self, support):
        for w in self.walls:
            if w.support == support:
                return w
        return None

    def serialize(self):
        return [w.serialize() for w in self.walls]


def initial_diagram(pair, functional, order):
    """One incoming wall per blown-up ray, with the binomial product."""
    walls = []
    lat = functional.lattice
    for i in range(pair.n):
        l = pair.blowups[i]
        if l == 0:
            continue
        m = pair.rays[i]
        f = TruncatedElement.one(functional, order)
        for j in range(l):
            term = TruncatedElement.one(functional, order)
            ecls = lat.scale(-1, lat.exc_class(i, j))
            term = term + TruncatedElement.monomial(functional, order, m, ecls)
            f = f * term
        walls.append(Wall(m, "in", WallFunction(f, m), "Bbar"))
    return ScatteringDiagram(walls, order, functional, "Bbar", pair=pair)


def _phi_class(lat, i):
    """Class of phibar(mbar_i) (evaluated on a cone containing the ray)."""
    return lat.phibar_value(i, lat.pair.rays[i])


def engine_for(pair, functional, order):
    return ScatterEngine(pair.rays, pair.blowups,
                         functional.t_degree_bound(order))


def scatter_complete(diagram, order=None):
    """Kontsevich-Soibelman completion of an initial diagram.

    Returns a diagram on the model plane containing the input, whose
    full-loop path-ordered product is the identity modulo the truncation.
    """
    pair = diagram.pair
    functional = diagram.functional
    if order is None:
        order = diagram.order
    for w in diagram.walls:
        if w.orientation != "in":
            raise ValueError("completion input must consist of incoming walls")
    engine = engine_for(pair, functional, order)
    engine.complete()
    return present_completed(pair, functional, order, engine)


def present_completed(pair, functional, order, engine):
    lat = functional.lattice
    phi = [_phi_class(lat, i) for i in range(pair.n)]

    def abs_class(P):
        out = lat.zero()
        for k, p in enumerate(P):
            if p:
                i, j = engine.pairs[k]
                out = lat.add(out, lat.scale(p, lat.sub(phi[i],
                                                        lat.exc_class(i, j))))
        return out

    walls = []
    init = initial_diagram(pair, functional, order)
    ray_dirs = {tuple(r): idx for idx, r in enumerate(pair.rays)}
    for s in engine._sorted_supports():
        spoly = engine.walls[s]["out"]
        cone = pair.cone_of_direction(s)
        f = TruncatedElement.one(functional, order)
        one = (0,) * engine.L
        for P, c in sorted(spoly.items()):
            if P == one:
                continue
            m = engine.wvec(P)
            above = lat.sub(abs_class(P), lat.phibar_value(cone, m))
            if not functional.keep(above, order):
                continue
            if functional.lam(above) < functional.epsilon:
                raise AssertionError(
                    "wall class of degree < epsilon: %r" % (above,))
            f = f + TruncatedElement.monomial(functional, order, m, above, c)
        if not f.is_one():
            direction = primitive((-s[0], -s[1]))[0]
            walls.append(Wall(s, "out", WallFunction(f, direction), "Bbar"))
    walls.extend(init.walls)
    return ScatteringDiagram(walls, order, functional, "Bbar", pair=pair,
                             engine=engine)


def pull_back_canonical(completed, pair=None):
    """Invert the moving-worms dictionary: the completed diagram on the model
    plane becomes the canonical diagram on B, all walls outgoing."""
    pair = pair or completed.pair
    functional = completed.functional
    order = completed.order
    lat = functional.lattice
    ray_index = {tuple(r): i for i, r in enumerate(pair.rays)}

    by_support = {}
    for w in completed.walls:
        entry = by_support.setdefault(tuple(w.support), {})
        entry[w.orientation] = w

    walls = []
    for s, entry in by_support.items():
        i = ray_index.get(s)
        if i is not None:
            # combined wall on the fan ray: dictionary factors times the
            # transported outgoing part
            f = TruncatedElement.one(functional, order)
            for j in range(pair.blowups[i]):
                term = TruncatedElement.one(functional, order) + \
                    TruncatedElement.monomial(functional, order, (-1, 0),
                                              lat.exc_class(i, j))
                f = f * term
            out = entry.get("out")
            if out is not None:
                g = TruncatedElement.one(functional, order)
                for (m, cls), c in out.f.element.terms.items():
                    if m == (0, 0):
                        continue
                    coords = _cone_coords(pair, i, m)
                    g = g + TruncatedElement.monomial(functional, order,
                                                      coords, cls, c)
                f = f * g
            if f.is_one():
                continue
            support = (i, (1, 0))
            walls.append(Wall(support, "out", WallFunction(f, (-1, 0)), "B"))
        else:
            out = entry.get("out")
            if out is None:
                continue
            cone = pair.cone_of_direction(s)
            scoords = _cone_coords(pair, cone, s)
            f = TruncatedElement.one(functional, order)
            for (m, cls), c in out.f.element.terms.items():
                if m == (0, 0):
                    continue
                coords = _cone_coords(pair, cone, m)
                f = f + TruncatedElement.monomial(functional, order, coords,
                                                  cls, c)
            if f.is_one():
                continue
            prim = primitive((-scoords[0], -scoords[1]))[0]
            walls.append(Wall((cone, scoords), "out", WallFunction(f, prim),
                              "B"))
    walls.sort(key=lambda w: (w.support[0], w.support[1]))
    return ScatteringDiagram(walls, order, functional, "B", pair=pair,
                             engine=completed.engine)


def _cone_coords(pair, cone, xy):
    """Coordinates of a plane vector in the basis (mbar_cone, mbar_cone+1);
    integral for integral input by smoothness."""
    i = cone % pair.n
    u = pair.rays[i]
    w = pair.rays[(i + 1) % pair.n]
    # unimodular: a = xy ∧ w / (u ∧ w) etc with u ∧ w = 1
    a = wedge(xy, w)
    b = wedge(u, xy)
    return (a, b)


def nu_forward(canonical, pair=None):
    """The dictionary from the canonical diagram on B back to the model plane
    (inverse of ``pull_back_canonical``); used as a consistency check."""
    pair = pair or canonical.pair
    functional = canonical.functional
    order = canonical.order
    lat = functional.lattice
    walls = []
    for w in canonical.walls:
        cone, scoords = w.support
        i = cone % pair.n
        s = pair.nu_point_to_plane(cone, scoords)
        s = primitive((int(s[0]), int(s[1])))[0]
        on_ray = scoords[1] == 0
        if on_ray:
            # split off the dictionary factors
            dict_f = TruncatedElement.one(functional, order)
            for j in range(pair.blowups[i]):
                term = TruncatedElement.one(functional, order) + \
                    TruncatedElement.monomial(functional, order, (-1, 0),
                                              lat.exc_class(i, j))
                dict_f = dict_f * term
            g = w.f.element * dict_f.inverse()
            gbar = TruncatedElement.one(functional, order)
            for (m, cls), c in g.terms.items():
                if m == (0, 0):
                    continue
                mbar = pair.nu_point_to_plane(cone, m)
                gbar = gbar + TruncatedElement.monomial(
                    functional, order, (int(mbar[0]), int(mbar[1])), cls, c)
            if not gbar.is_one():
                walls.append(Wall(s, "out", WallFunction(
                    gbar, (-s[0], -s[1])), "Bbar"))
            fin = TruncatedElement.one(functional, order)
            for j in range(pair.blowups[i]):
                term = TruncatedElement.one(functional, order) + \
                    TruncatedElement.monomial(functional, order,
                                              pair.rays[i],
                                              lat.scale(-1, lat.exc_class(i, j)))
                fin = fin * term
            if not fin.is_one():
                walls.append(Wall(s, "in", WallFunction(fin, s), "Bbar"))
        else:
            fbar = TruncatedElement.one(functional, order)
            for (m, cls), c in w.f.element.terms.items():
                if m == (0, 0):
                    continue
                mbar = pair.nu_point_to_plane(cone, m)
                fbar = fbar + TruncatedElement.monomial(
                    functional, order, (int(mbar[0]), int(mbar[1])), cls, c)
            walls.append(Wall(s, "out", WallFunction(fbar, (-s[0], -s[1])),
                              "Bbar"))
    return ScatteringDiagram(walls, order, functional, "Bbar", pair=pair)


def extract_invariants(wall):
    """Log of an outgoing wall function: pairs (class, k_beta * N_beta).

    The tangent multiplicity of each term of log f is the cover degree
    k_beta, so the returned coefficient is k_beta * N_beta.
    """
    if wall.orientation != "out":
        raise ValueError("invariants live on outgoing walls")
    logf = wall.f.element.log()
    functional = wall.f.element.functional
    out = []
    for (m, cls), c in logf.sorted_items():
        out.append((cls, c))
    return out


def loop_identity_holds(diagram):
    """Check the full-loop contract on both chart characters, on the engine
    when available (exact to its t-degree)."""
    if diagram.engine is not None:
        return diagram.engine.loop_is_identity()
    raise ValueError("diagram has no attached engine")
