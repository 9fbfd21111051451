"""Sparse truncated Laurent elements with exact rational coefficients.

A monomial is ``c * z^(m, p)`` where ``m`` is the tangent part (an integer
pair in the chart of some cone) and ``p`` is the curve class lying above the
piecewise linear function in that chart ("class above phi").  Within a fixed
chart the class-above parts add under multiplication because the comparison
function is linear there.

Elements are always truncated: a term is stored only while
``lambda(p) <= order * unit`` for the element's degree functional.
"""

from fractions import Fraction

from .classes import _tuple_add


def _key_sort(functional):
    def key(item):
        (m, cls), coeff = item
        return (functional.lam(cls), m, cls)
    return key


class TruncatedElement:
    """Finite sum of monomials keyed by (tangent, class-above)."""

    __slots__ = ("functional", "order", "terms")

    def __init__(self, functional, order, terms=None):
        self.functional = functional
        self.order = order
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                self._accumulate(key, coeff)

    def _accumulate(self, key, coeff):
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        m, cls = key
        if not self.functional.keep(cls, self.order):
            return
        cur = self.terms.get(key)
        if cur is None:
            self.terms[key] = coeff
        else:
            cur += coeff
            if cur == 0:
                del self.terms[key]
            else:
                self.terms[key] = cur

    # -- constructors ---------------------------------------------------------

    @classmethod
    def monomial(cls, functional, order, m, p, coeff=1):
        return cls(functional, order, {(tuple(m), p): Fraction(coeff)})

    @classmethod
    def one(cls, functional, order):
        zero = functional.lattice.zero()
        return cls(functional, order, {((0, 0), zero): Fraction(1)})

    @classmethod
    def zero_elt(cls, functional, order):
        return cls(functional, order)

    def copy(self):
        out = TruncatedElement(self.functional, self.order)
        out.terms = dict(self.terms)
        return out

    # -- ring operations --------------------------------------------------------

    def _check_compatible(self, other):
        if self.functional is not other.functional or self.order != other.order:
            raise ValueError("mismatched truncation data")

    def __add__(self, other):
        self._check_compatible(other)
        out = self.copy()
        for key, coeff in other.terms.items():
            out._accumulate(key, coeff)
        return out

    def __sub__(self, other):
        self._check_compatible(other)
        out = self.copy()
        for key, coeff in other.terms.items():
            out._accumulate(key, -coeff)
        return out

    def __neg__(self):
        out = TruncatedElement(self.functional, self.order)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def scale(self, coeff):
        coeff = Fraction(coeff)
        out = TruncatedElement(self.functional, self.order)
        if coeff != 0:
            out.terms = {k: c * coeff for k, c in self.terms.items()}
        return out

    def __mul__(self, other):
        self._check_compatible(other)
        out = TruncatedElement(self.functional, self.order)
        add = self.functional.lattice.add
        for (m1, p1), c1 in self.terms.items():
            for (m2, p2), c2 in other.terms.items():
                key = ((m1[0] + m2[0], m1[1] + m2[1]), add(p1, p2))
                out._accumulate(key, c1 * c2)
        return out

    def mul_monomial(self, m, p, coeff=1):
        out = TruncatedElement(self.functional, self.order)
        add = self.functional.lattice.add
        for (m1, p1), c1 in self.terms.items():
            out._accumulate(((m1[0] + m[0], m1[1] + m[1]), add(p1, p)),
                            c1 * coeff)
        return out

    def __eq__(self, other):
        return (isinstance(other, TruncatedElement)
                and self.order == other.order and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("unhashable")

    def is_zero(self):
        return not self.terms

    def is_one(self):
        zero = self.functional.lattice.zero()
        return self.terms == {((0, 0), zero): Fraction(1)}

    def constant_coefficient(self):
        zero = self.functional.lattice.zero()
        return self.terms.get(((0, 0), zero), Fraction(0))

    def nonconstant_part(self):
        out = self.copy()
        zero = self.functional.lattice.zero()
        out.terms.pop(((0, 0), zero), None)
        return out

    # -- series operations ---------------------------------------------------------

    def pow(self, k):
        if k < 0:
            return self.inverse().pow(-k)
        out = TruncatedElement.one(self.functional, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            if k > 1:
                base = base * base
            k >>= 1
        return out

    def inverse(self):
        """Inverse of an element with nonzero constant term, all of whose
        nonconstant terms have positive degree (geometric series)."""
        c0 = self.constant_coefficient()
        if c0 == 0:
            raise ValueError("element is not invertible (no constant term)")
        u = self.nonconstant_part().scale(Fraction(1, 1) / c0)
        for (_, cls), _ in u.terms.items():
            if self.functional.lam(cls) <= 0:
                raise ValueError("nonconstant term of non-positive degree")
        out = TruncatedElement.one(self.functional, self.order)
        power = TruncatedElement.one(self.functional, self.order)
        sign = -1
        while True:
            power = power * u
            if power.is_zero():
                break
            out = out + power.scale(sign)
            sign = -sign
        return out.scale(Fraction(1, 1) / c0)

    def exp(self):
        """exp of an element with zero constant term (positive degrees)."""
        if self.constant_coefficient() != 0:
            raise ValueError("exp needs zero constant term")
        out = TruncatedElement.one(self.functional, self.order)
        power = TruncatedElement.one(self.functional, self.order)
        k = 0
        while True:
            k += 1
            power = power * self
            if power.is_zero():
                break
            out = out + power.scale(Fraction(1, _factorial(k)))
        return out

    def log(self):
        """log of an element with constant term 1."""
        if self.constant_coefficient() != 1:
            raise ValueError("log needs constant term 1")
        u = self.nonconstant_part()
        out = TruncatedElement.zero_elt(self.functional, self.order)
        power = TruncatedElement.one(self.functional, self.order)
        k = 0
        while True:
            k += 1
            power = power * u
            if power.is_zero():
                break
            out = out + power.scale(Fraction((-1) ** (k - 1), k))
        return out

    def mderiv(self, axis):
        """The derivation x_axis d/dx_axis on tangent parts (m -> m[axis]*m)."""
        out = TruncatedElement(self.functional, self.order)
        for (m, p), c in self.terms.items():
            out._accumulate((m, p), c * m[axis])
        return out

    # -- presentation -----------------------------------------------------------

    def sorted_items(self):
        return sorted(self.terms.items(), key=_key_sort(self.functional))

    def serialize(self):
        lat = self.functional.lattice
        return [{"m": list(m), "class": lat.serialize(p), "coeff": str(c)}
                for (m, p), c in self.sorted_items()]

    def __repr__(self):
        if not self.terms:
            return "<0>"
        bits = []
        for (m, p), c in self.sorted_items():
            bits.append("%s*z^(%s;%s)" % (c, m, p))
        return "<" + " + ".join(bits) + ">"


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


class WallFunction:
    """A wall-crossing function: element with constant term 1 whose terms'
    tangents are positive multiples of a primitive ``direction``."""

    def __init__(self, element, direction):
        self.element = element
        self.direction = tuple(direction)
        if element.constant_coefficient() != 1:
            raise ValueError("wall function must have constant term 1")
        dx, dy = self.direction
        for (m, _), _ in element.terms.items():
            if m == (0, 0):
                continue
            if m[0] * dy != m[1] * dx or (m[0] * dx + m[1] * dy) <= 0:
                raise ValueError("wall term %r not a positive multiple of %r"
                                 % (m, self.direction))

    def order(self):
        return self.element.order


def apply_wall_crossing(f, normal, x):
    """Apply z^q -> z^q f^{<normal, r(q)>} to each term of x.

    ``normal`` is an integer covector (pair); negative powers are taken by the
    geometric series, which requires f to be invertible mod truncation.
    """
    elt = f.element if isinstance(f, WallFunction) else f
    out = TruncatedElement.zero_elt(x.functional, x.order)
    powers = {0: TruncatedElement.one(x.functional, x.order)}

    def fpow(s):
        if s not in powers:
            if s > 0:
                powers[s] = fpow(s - 1) * elt
            else:
                if -1 not in powers:
                    powers[-1] = elt.inverse()
                powers[s] = fpow(s + 1) * powers[-1]
        return powers[s]

    for (m, p), c in x.terms.items():
        s = normal[0] * m[0] + normal[1] * m[1]
        out = out + fpow(s).mul_monomial(m, p, c)
    return out


def transport_monomial(pair, lattice, ray_index, key, direction="ccw"):
    """Transport an exponent (tangent, class-above) across the ray.

    ``direction='ccw'`` moves from the chart of cone ``ray_index - 1`` to the
    chart of cone ``ray_index``; the absolute exponent is unchanged, so the
    class above phi gains ``<n, -r> [D_ray]`` where n is the covector cut out
    by the ray, positive on the entered cone.
    """
    m, cls = key
    i = ray_index % pair.n
    dcls = lattice.boundary_class(i)
    if direction == "ccw":
        # in the source chart (v_{i-1}, v_i) the covector positive on the
        # target cone is -(first coordinate); <n, -r> = m[0]
        new_m = pair.transport_across_ray(i, m, "ccw")
        new_cls = lattice.add(cls, lattice.scale(m[0], dcls))
    elif direction == "cw":
        # source chart (v_i, v_{i+1}); the covector vanishing on the ray and
        # positive on cone i-1 is -(second coordinate); <n, -r> = m[1]
        new_m = pair.transport_across_ray(i, m, "cw")
        new_cls = lattice.add(cls, lattice.scale(m[1], dcls))
    else:
        raise ValueError("direction must be 'ccw' or 'cw'")
    return (tuple(new_m), new_cls)


def transport_element(pair, ray_index, x, direction="ccw"):
    """Transport every exponent of an element across a ray of the fan."""
    lattice = x.functional.lattice
    out = TruncatedElement.zero_elt(x.functional, x.order)
    for key, c in x.terms.items():
        out._accumulate(transport_monomial(pair, lattice, ray_index, key,
                                           direction), c)
    return out
