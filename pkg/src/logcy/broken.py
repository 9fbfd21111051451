"""Broken lines on B for a canonical scattering diagram.

Because every wall and every fan ray passes through the origin, the angular
momentum (position ∧ travel direction) is a nonzero constant along a broken
line, so the line sweeps rays in a fixed rotational sense and the *sequence*
of rays and walls it crosses is purely combinatorial.  Enumeration therefore
walks the combinatorial tree forward from infinity (branching over bend terms,
pruned by the truncation degree), and each completed branch is pinned to the
endpoint Q afterwards by reconstructing all crossing points backwards from Q
and checking exact positivity of every crossing parameter.

The same walker runs on B (canonical diagram, chart transitions from D_i^2,
ray bending classes [D_i]) and on the model plane (completed diagram,
transitions from Dbar_i^2, bending classes p^*[Dbar_i]); the two sides are
related by the moving-worms dictionary, which is exercised in the tests.
"""

from fractions import Fraction

from .lattice import mat_apply, mat_inv, strictly_between_ccw, wedge
from .series import TruncatedElement, apply_wall_crossing
from .tropical import PairError

_HARD_CROSSING_CAP = 400


class Geometry:
    """Chart transitions and ray bending classes for one of the two sides."""

    def __init__(self, pair, functional, side="B"):
        self.pair = pair
        self.functional = functional
        self.lattice = functional.lattice
        self.side = side
        if side == "B":
            self.d2 = pair.self_int
            self._ray_cls = [self.lattice.boundary_class(i)
                             for i in range(pair.n)]
        elif side == "Bbar":
            self.d2 = pair.dbar2
            self._ray_cls = [self.lattice.dbar_class(i)
                             for i in range(pair.n)]
        else:
            raise ValueError("side must be 'B' or 'Bbar'")
        self.n = pair.n

    def crossing_matrix(self, i):
        d = self.d2[i % self.n]
        return ((-d, 1), (-1, 0))

    def transport_vec(self, i, vec, direction):
        m = self.crossing_matrix(i)
        if direction == "cw":
            m = mat_inv(m)
        return mat_apply(m, vec)

    def transport_key(self, ray_index, key, direction):
        """Transport (tangent, class-above) across ray ``ray_index``; the
        class gains the positive multiple of the ray's bending class."""
        m, cls = key
        i = ray_index % self.n
        dcls = self._ray_cls[i]
        if direction == "ccw":
            new_cls = self.lattice.add(cls, self.lattice.scale(m[0], dcls))
        else:
            new_cls = self.lattice.add(cls, self.lattice.scale(m[1], dcls))
        return (self.transport_vec(i, m, direction), new_cls)


class _Wrap:
    """Minimal wall-like carrier for chart-converted functions."""

    def __init__(self, elt):
        self.element = elt


class DiagramIndex:
    """Per-cone wall lists of a diagram, in chart coordinates."""

    def __init__(self, geometry, diagram):
        self.geometry = geometry
        self.functional = diagram.functional
        self.order = diagram.order
        n = geometry.n
        self.interior = {i: [] for i in range(n)}
        self.ray = {}
        if diagram.side == "B":
            for w in diagram.walls:
                cone, coords = w.support
                if coords[1] == 0:
                    self.ray[cone % n] = _Wrap(w.f.element)
                else:
                    self.interior[cone % n].append((tuple(coords),
                                                    _Wrap(w.f.element)))
        else:
            ray_index = {tuple(r): i for i, r in enumerate(geometry.pair.rays)}
            combined = {}
            for w in diagram.walls:
                s = tuple(w.support)
                if s in combined:
                    combined[s] = combined[s] * w.f.element
                else:
                    combined[s] = w.f.element.copy()
            for s, f in combined.items():
                i = ray_index.get(s)
                if i is not None:
                    elt = TruncatedElement.zero_elt(self.functional, self.order)
                    for (m, cls), c in f.terms.items():
                        elt._accumulate(
                            (_plane_to_cone(geometry.pair, i, m), cls), c)
                    self.ray[i] = _Wrap(elt)
                else:
                    cone = geometry.pair.cone_of_direction(s)
                    coords = _plane_to_cone(geometry.pair, cone, s)
                    elt = TruncatedElement.zero_elt(self.functional, self.order)
                    for (m, cls), c in f.terms.items():
                        elt._accumulate(
                            (_plane_to_cone(geometry.pair, cone, m), cls), c)
                    self.interior[cone].append((coords, _Wrap(elt)))
        for i in range(n):
            self.interior[i].sort(key=_angle_key)
        self._pow = {}

    def interior_power(self, cone, u, s):
        key = ("int", cone, u, s)
        if key not in self._pow:
            f = None
            for coords, w in self.interior[cone]:
                if coords == u:
                    f = w.element
                    break
            self._pow[key] = f.pow(s)
        return self._pow[key]

    def ray_function(self, ray_index, chart):
        """The ray wall function with tangents in the chart of ``chart``
        (either ray_index or ray_index - 1 mod n); None if no wall."""
        n = self.geometry.n
        key = ("rayf", ray_index % n, chart % n)
        if key not in self._pow:
            w = self.ray.get(ray_index % n)
            if w is None:
                self._pow[key] = None
            elif chart % n == ray_index % n:
                self._pow[key] = w.element
            else:
                elt = TruncatedElement.zero_elt(self.functional, self.order)
                for (m, cls), c in w.element.terms.items():
                    mm = self.geometry.transport_vec(ray_index, m, "cw")
                    elt._accumulate((mm, cls), c)
                self._pow[key] = elt
        return self._pow[key]

    def ray_power(self, ray_index, chart, s):
        key = ("raypow", ray_index % self.geometry.n, chart % self.geometry.n, s)
        if key not in self._pow:
            f = self.ray_function(ray_index, chart)
            self._pow[key] = None if f is None else f.pow(s)
        return self._pow[key]


def _angle_key(entry):
    u = entry[0]
    return Fraction(u[1], u[0] + u[1])


def _plane_to_cone(pair, cone, xy):
    i = cone % pair.n
    u = pair.rays[i]
    w = pair.rays[(i + 1) % pair.n]
    return (wedge(xy, w), wedge(u, xy))


class BrokenLine:
    """A completed broken line: per-segment chart data with exact crossing
    points, ordered from infinity to the endpoint."""

    def __init__(self, q, endpoint, segments, coeff, mono):
        self.q = q
        self.endpoint = endpoint
        self.segments = segments
        self.coeff = coeff
        self.mono = mono

    def bends(self):
        return sum(1 for s in self.segments if s["bent"])

    def serialize(self, lattice):
        return {
            "coeff": str(self.coeff),
            "mono": {"m": list(self.mono[0]),
                     "class": lattice.serialize(self.mono[1])},
            "segments": [
                {"cone": s["cone"], "m": list(s["m"]),
                 "class": lattice.serialize(s["cls"]),
                 "start": None if s["start"] is None
                 else [str(c) for c in s["start"]],
                 "end": [str(c) for c in s["end"]],
                 "bent": s["bent"]}
                for s in self.segments],
        }


def enumerate_broken_lines(pair, diagram, q, Q, order=None, side="B"):
    """All broken lines for q with endpoint Q surviving the truncation.

    ``q`` is (cone_index, (a, b)) with integers a, b >= 0 not both zero;
    ``Q`` is (cone_index, (x, y)) with positive rational coordinates not on
    any wall of its cone.
    """
    geometry = Geometry(pair, diagram.functional, side)
    idx = DiagramIndex(geometry, diagram)
    order = diagram.order if order is None else order
    q_cone, q_vec = q[0] % pair.n, tuple(int(c) for c in q[1])
    if q_vec == (0, 0) or q_vec[0] < 0 or q_vec[1] < 0:
        raise PairError("q must be a nonzero point of a closed cone")
    iQ, Qco = Q[0] % pair.n, (Fraction(Q[1][0]), Fraction(Q[1][1]))
    _check_endpoint(idx, iQ, Qco)
    # a direction on a ray bounds two cones and must be walked from both
    # chart representatives (each feeds exactly one sweep family)
    reps = [(q_cone, q_vec)]
    if q_vec[1] == 0:
        reps.append(((q_cone - 1) % pair.n, (0, q_vec[0])))
    elif q_vec[0] == 0:
        reps = [((q_cone + 1) % pair.n, (q_vec[1], 0)), (q_cone, q_vec)]
    out = []
    for cone_rep, vec_rep in reps:
        for sweep in (1, -1):
            out.extend(_walk_family(geometry, idx, cone_rep, vec_rep, iQ,
                                    Qco, order, sweep))
    out.sort(key=lambda bl: (diagram.functional.lam(bl.mono[1]),
                             bl.mono[0], bl.mono[1]))
    return out


def _check_endpoint(idx, iQ, Qco):
    if Qco[0] <= 0 or Qco[1] <= 0:
        raise PairError("endpoint must be interior to its cone")
    for u, _ in idx.interior[iQ]:
        if Qco[0] * u[1] - Qco[1] * u[0] == 0:
            raise PairError("endpoint lies on a wall")


def lift(pair, diagram, q, Q, order=None, side="B"):
    """Sum of final monomials over all broken lines, in the chart of Q."""
    order = diagram.order if order is None else order
    lines = enumerate_broken_lines(pair, diagram, q, Q, order, side)
    out = TruncatedElement.zero_elt(diagram.functional, order)
    for bl in lines:
        out._accumulate(bl.mono, bl.coeff)
    return out


# ---------------------------------------------------------------------------
# the combinatorial walk


def _walk_family(geometry, idx, q_cone, q_vec, iQ, Qco, order, sweep):
    functional = geometry.functional
    lattice = geometry.lattice
    unit_cap = order * functional.unit
    n = geometry.n
    results = []
    # events record (kind, index mod n, tangent and class before the event)
    start = (q_cone, q_vec, lattice.zero(), Fraction(1), q_vec, ())
    stack = [start]
    while stack:
        abs_cone, m, cls, coeff, pos_dir, events = stack.pop()
        if len(events) > _HARD_CROSSING_CAP:
            raise RuntimeError("broken line search exceeded crossing cap")
        if (abs_cone - iQ) % n == 0:
            bl = _try_terminate(geometry, q_cone, q_vec, iQ, Qco,
                                m, cls, coeff, events, sweep)
            if bl is not None:
                results.append(bl)
        d = (-m[0], -m[1])
        walls = idx.interior[abs_cone % n]
        if sweep == 1:
            cands = [("wall", u) for u, _ in walls] + [("ray", (0, 1))]
        else:
            cands = [("wall", u) for u, _ in reversed(walls)] + \
                [("ray", (1, 0))]
        nxt = None
        for kind, u in cands:
            if _after(pos_dir, u, sweep) and _crosses(pos_dir, d, u, sweep):
                nxt = (kind, u)
                break
        if nxt is None:
            continue
        kind, u = nxt
        if kind == "wall":
            s = -wedge(u, m) if sweep == 1 else wedge(u, m)
            if s <= 0:
                raise AssertionError("non-positive wall pairing on a crossing")
            fpow = idx.interior_power(abs_cone % n, u, s)
            ev = events + (("wall", abs_cone % n, u, m, cls),)
            for (mw, cw), c in fpow.terms.items():
                m2 = (m[0] + mw[0], m[1] + mw[1])
                cls2 = lattice.add(cls, cw)
                if functional.lam(cls2) > unit_cap:
                    continue
                stack.append((abs_cone, m2, cls2, coeff * c, u, ev))
        else:
            ray_abs = abs_cone + 1 if sweep == 1 else abs_cone
            s = m[0] if sweep == 1 else m[1]
            if s <= 0:
                raise AssertionError("non-positive ray pairing on a crossing")
            fpow = idx.ray_power(ray_abs, abs_cone, s)
            if fpow is None:
                branches = [((0, 0), lattice.zero(), Fraction(1))]
            else:
                branches = [(mw, cw, c)
                            for (mw, cw), c in fpow.terms.items()]
            ev = events + (("ray", ray_abs % n, m, cls),)
            direction = "ccw" if sweep == 1 else "cw"
            pos2 = (1, 0) if sweep == 1 else (0, 1)
            for mw, cw, c in branches:
                m2 = (m[0] + mw[0], m[1] + mw[1])
                cls2 = lattice.add(cls, cw)
                m3, cls3 = geometry.transport_key(ray_abs, (m2, cls2),
                                                  direction)
                if functional.lam(cls3) > unit_cap:
                    continue
                stack.append((abs_cone + sweep, m3, cls3, coeff * c,
                              pos2, ev))
    return results


def _after(pos, u, sweep):
    """u strictly later than pos in the sweep, within one chart quadrant."""
    w = wedge(pos, u)
    if w == 0:
        return False
    return w > 0 if sweep == 1 else w < 0


def _crosses(pos, d, u, sweep):
    """The path (angular position pos, travel asymptote d) sweeps over u."""
    if sweep == 1:
        return strictly_between_ccw(pos, d, u)
    return strictly_between_ccw(d, pos, u)


def _try_terminate(geometry, q_cone, q_vec, iQ, Qco, m, cls, coeff, events,
                   sweep):
    """Pin a branch to the endpoint: reconstruct crossing points backwards
    from Q with exact positivity checks; returns a BrokenLine or None."""
    n = geometry.n
    travel = (-m[0], -m[1])
    mom = Qco[0] * travel[1] - Qco[1] * travel[0]
    if mom == 0 or (mom > 0) != (sweep == 1):
        return None
    cur_point = Qco
    cur_m, cur_cls = m, cls
    abs_cone_mod = iQ
    segments = [{"cone": abs_cone_mod, "m": m, "cls": cls, "end": Qco,
                 "start": None, "bent": False}]
    for ev in reversed(events):
        if ev[0] == "wall":
            _, cone_mod, u, m_before, cls_before = ev
            x = _backward_hit(cur_point, cur_m, u)
            if x is None:
                return None
            segments[-1]["start"] = x
            segments[-1]["bent"] = (m_before != cur_m)
            cur_point, cur_m, cur_cls = x, m_before, cls_before
            segments.append({"cone": cone_mod, "m": cur_m, "cls": cur_cls,
                             "end": x, "start": None, "bent": False})
        else:
            _, ray_mod, m_before, cls_before = ev
            u = (1, 0) if sweep == 1 else (0, 1)
            x = _backward_hit(cur_point, cur_m, u)
            if x is None:
                return None
            segments[-1]["start"] = x
            back = "cw" if sweep == 1 else "ccw"
            x_prev = geometry.transport_vec(ray_mod, x, back)
            bent_m = geometry.transport_vec(ray_mod, cur_m, back)
            segments[-1]["bent"] = (m_before != bent_m)
            cur_point = (Fraction(x_prev[0]), Fraction(x_prev[1]))
            cur_m, cur_cls = m_before, cls_before
            cone_mod = (ray_mod - 1) % n if sweep == 1 else ray_mod % n
            segments.append({"cone": cone_mod, "m": cur_m, "cls": cur_cls,
                             "end": cur_point, "start": None, "bent": False})
    if cur_m != q_vec:
        raise AssertionError("walker lost the initial direction")
    if cur_point[0] < 0 or cur_point[1] < 0:
        return None
    segments[-1]["cone"] = q_cone
    segments.reverse()
    return BrokenLine((q_cone, q_vec), (iQ, Qco), segments, coeff, (m, cls))


def _backward_hit(point, m, u):
    """Exact intersection of the backward ray point + t*m (t > 0) with the
    open ray R_{>0} u; None if there is no valid crossing."""
    den = m[0] * u[1] - m[1] * u[0]
    if den == 0:
        return None
    t = -(point[0] * u[1] - point[1] * u[0]) / Fraction(den)
    if t <= 0:
        return None
    x = (point[0] + t * m[0], point[1] + t * m[1])
    if x[0] * u[1] - x[1] * u[0] != 0 or (x[0] * u[0] + x[1] * u[1]) <= 0:
        return None
    return x


# ---------------------------------------------------------------------------
# transport of lifts and consistency


def transport_lift(pair, diagram, elt, from_Q, to_Q, side="B"):
    """Parallel transport of a chart element between generic endpoints.

    Crossings are applied in angular order; within a single cone the direct
    arc is used (clockwise if needed), otherwise the counterclockwise arc
    from the chart of ``from_Q`` to the chart of ``to_Q``.
    """
    geometry = Geometry(pair, diagram.functional, side)
    idx = DiagramIndex(geometry, diagram)
    n = geometry.n
    cone_a, A = from_Q[0] % n, (Fraction(from_Q[1][0]), Fraction(from_Q[1][1]))
    cone_b, B = to_Q[0] % n, (Fraction(to_Q[1][0]), Fraction(to_Q[1][1]))
    _check_endpoint(idx, cone_a, A)
    _check_endpoint(idx, cone_b, B)
    cur = elt
    if cone_a == cone_b:
        ccw = wedge(A, B) > 0
        for u, w in sorted(idx.interior[cone_a], key=_angle_key,
                           reverse=not ccw):
            between = (strictly_between_ccw(A, B, u) if ccw
                       else strictly_between_ccw(B, A, u))
            if not between:
                continue
            normal = (u[1], -u[0]) if ccw else (-u[1], u[0])
            cur = apply_wall_crossing(w.element, normal, cur)
        return cur
    steps = (cone_b - cone_a) % n
    cone = cone_a
    pos = A
    for step in range(steps + 1):
        last = (step == steps)
        for u, w in idx.interior[cone % n]:
            if not _after(pos, u, 1):
                continue
            if last and not _after(u, B, 1):
                continue
            cur = apply_wall_crossing(w.element, (u[1], -u[0]), cur)
            pos = u
        if last:
            break
        ray_idx = (cone + 1) % n
        f = idx.ray_function(ray_idx, cone)
        if f is not None:
            cur = apply_wall_crossing(f, (1, 0), cur)
        out = TruncatedElement.zero_elt(cur.functional, cur.order)
        for key, c in cur.terms.items():
            out._accumulate(geometry.transport_key(ray_idx, key, "ccw"), c)
        cur = out
        cone += 1
        pos = (1, 0)
    return cur


def check_consistency(pair, diagram, q, Q, Qp, order=None, side="B"):
    """True iff the lift at Q' equals the path-ordered transport of the lift
    at Q (wall functions taken invertible modulo the truncation)."""
    order = diagram.order if order is None else order
    la = lift(pair, diagram, q, Q, order, side)
    lb = lift(pair, diagram, q, Qp, order, side)
    moved = transport_lift(pair, diagram, la, Q, Qp, side)
    return moved == lb
