"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are dense coefficient vectors over the power basis
1, zeta, ..., zeta^(phi(m)-1) with Fraction coefficients; zeta satisfies the
m-th cyclotomic polynomial.  Everything is immutable and exact.  No float
ever appears: equality of two expressions is decidable and is decided.

The conductor is never enlarged behind the caller's back.  Asking for a root
of unity the field does not contain raises OrderNotSupported with the
conductor that would suffice.
"""

from fractions import Fraction
from math import gcd

from .errors import FieldMismatch, OrderNotSupported

_ZERO = Fraction(0)
_ONE = Fraction(1)


def rational_to_str(q) -> str:
    """Serialize a rational as the reduced string "p/q" with q > 0."""
    q = Fraction(q)
    return "%d/%d" % (q.numerator, q.denominator)


def rational_from_str(s: str) -> Fraction:
    """Parse "p/q" (or a bare integer string "p") into a Fraction."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def _poly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_mul_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_div_exact_int(num, den):
    """Divide integer polynomials exactly; den is monic.  Remainder must be 0."""
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            out[k - dd] = c
            for j, dj in enumerate(den):
                num[k - dd + j] -= c * dj
    assert all(c == 0 for c in num), "inexact polynomial division"
    return out


_CYCLOTOMIC_CACHE = {}


def cyclotomic_polynomial(m: int):
    """Integer coefficients of the m-th cyclotomic polynomial, low degree first."""
    if m < 1:
        raise ValueError("conductor must be a positive integer")
    cached = _CYCLOTOMIC_CACHE.get(m)
    if cached is not None:
        return cached
    # x^m - 1 divided by the cyclotomic polynomials of all proper divisors.
    f = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            f = _poly_div_exact_int(f, cyclotomic_polynomial(d))
    f = tuple(f)
    _CYCLOTOMIC_CACHE[m] = f
    return f


class CycloField:
    """Descriptor of Q(zeta_m): conductor, degree and reduction data.

    Use the cyclo_field(m) factory so that equal conductors share one object.
    """

    def __init__(self, conductor: int):
        if conductor < 1:
            raise ValueError("conductor must be a positive integer")
        self.conductor = conductor
        modulus = cyclotomic_polynomial(conductor)
        self.modulus = modulus
        self.degree = len(modulus) - 1
        # rep[k] = coefficients of zeta^k reduced mod the cyclotomic polynomial,
        # for every exponent reachable while multiplying two reduced elements
        # or while applying a Galois map (k < max(m, 2*degree - 1)).
        deg = self.degree
        top = max(conductor, 2 * deg - 1)
        rep = []
        for k in range(deg):
            vec = [0] * deg
            vec[k] = 1
            rep.append(tuple(vec))
        for k in range(deg, top):
            prev = rep[k - 1]
            shifted = [0] + list(prev[: deg - 1])
            lead = prev[deg - 1]
            if lead:
                for j in range(deg):
                    shifted[j] -= lead * modulus[j]
            rep.append(tuple(shifted))
        self._power_rep = rep
        self.zero = FieldElement(self, (_ZERO,) * deg, _validated=True)
        one = [_ZERO] * deg
        one[0] = _ONE
        self.one = FieldElement(self, tuple(one), _validated=True)
        # The group of roots of unity of Q(zeta_m) is cyclic of order m for
        # even m and 2m for odd m (adjoin the sign).
        self.root_group_order = conductor if conductor % 2 == 0 else 2 * conductor

    def __repr__(self):
        return "CycloField(%d)" % self.conductor

    def __eq__(self, other):
        return isinstance(other, CycloField) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("CycloField", self.conductor))

    def element(self, coeffs) -> "FieldElement":
        """Element from an iterable of rationals over the power basis."""
        vec = [Fraction(c) for c in coeffs]
        if len(vec) > self.degree:
            raise ValueError(
                "coefficient vector longer than the field degree %d" % self.degree
            )
        vec.extend([_ZERO] * (self.degree - len(vec)))
        return FieldElement(self, tuple(vec), _validated=True)

    def from_rational(self, q) -> "FieldElement":
        vec = [_ZERO] * self.degree
        vec[0] = Fraction(q)
        return FieldElement(self, tuple(vec), _validated=True)

    def zeta(self) -> "FieldElement":
        """The distinguished generator zeta_m (equals 1 when m = 1)."""
        return FieldElement(self, self._power_rep[1 % self.conductor]
                            if self.conductor > 1 else self._power_rep[0],
                            _validated=True)

    def zeta_power(self, k: int) -> "FieldElement":
        return FieldElement(self, self._power_rep[k % self.conductor], _validated=True)

    def aut(self, k: int) -> "FieldAut":
        return FieldAut(self, k)

    def identity_aut(self) -> "FieldAut":
        return FieldAut(self, 1)

    def roots_of_unity(self):
        """All roots of unity of the field, in a fixed deterministic order."""
        out = [self.zeta_power(j) for j in range(self.conductor)]
        if self.conductor % 2 == 1:
            out.extend(-x for x in list(out))
        return out

    def element_from_strings(self, strings) -> "FieldElement":
        return self.element([rational_from_str(s) for s in strings])


_FIELD_CACHE = {}


def cyclo_field(m: int) -> CycloField:
    field = _FIELD_CACHE.get(m)
    if field is None:
        field = CycloField(m)
        _FIELD_CACHE[m] = field
    return field


def _check_same_field(a, b):
    if a.field is not b.field and a.field != b.field:
        raise FieldMismatch(
            "operands live in Q(zeta_%d) and Q(zeta_%d); embed explicitly first"
            % (a.field.conductor, b.field.conductor)
        )


class FieldElement:
    """An element of Q(zeta_m) as a dense power-basis coefficient vector."""

    __slots__ = ("field", "coeffs", "_nonzero")

    def __init__(self, field: CycloField, coeffs, _validated=False):
        if not _validated:
            vec = [Fraction(c) for c in coeffs]
            if len(vec) != field.degree:
                raise ValueError("expected %d coefficients" % field.degree)
            coeffs = tuple(vec)
        self.field = field
        self.coeffs = coeffs
        self._nonzero = None

    def _support(self):
        # Cached list of indices with nonzero coefficient; most elements that
        # appear in practice (roots of unity, structure constants) are sparse.
        if self._nonzero is None:
            self._nonzero = [i for i, c in enumerate(self.coeffs) if c]
        return self._nonzero

    def is_zero(self) -> bool:
        return not self._support()

    def is_one(self) -> bool:
        return self == self.field.one

    def is_rational(self) -> bool:
        return all(i == 0 for i in self._support())

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def __add__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        _check_same_field(self, other)
        a, b = self.coeffs, other.coeffs
        return FieldElement(self.field, tuple(x + y for x, y in zip(a, b)),
                            _validated=True)

    def __sub__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        _check_same_field(self, other)
        a, b = self.coeffs, other.coeffs
        return FieldElement(self.field, tuple(x - y for x, y in zip(a, b)),
                            _validated=True)

    def __neg__(self):
        return FieldElement(self.field, tuple(-x for x in self.coeffs),
                            _validated=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return FieldElement(self.field, tuple(c * q for c in self.coeffs),
                                _validated=True)
        if not isinstance(other, FieldElement):
            return NotImplemented
        _check_same_field(self, other)
        field = self.field
        deg = field.degree
        sup_a = self._support()
        sup_b = other._support()
        if not sup_a or not sup_b:
            return field.zero
        a, b = self.coeffs, other.coeffs
        acc = [_ZERO] * (2 * deg - 1)
        for i in sup_a:
            ai = a[i]
            for j in sup_b:
                acc[i + j] += ai * b[j]
        rep = field._power_rep
        out = acc[:deg]
        for k in range(deg, 2 * deg - 1):
            ck = acc[k]
            if ck:
                rk = rep[k]
                for j in range(deg):
                    if rk[j]:
                        out[j] += ck * rk[j]
        return FieldElement(field, tuple(out), _validated=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by zero rational")
            return self * (1 / q)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse, by solving the linear system a*x = 1."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_%d)"
                                    % self.field.conductor)
        field = self.field
        deg = field.degree
        if deg == 1:
            return field.from_rational(1 / self.coeffs[0])
        # Columns of the matrix are the coefficient vectors of a * zeta^j.
        cols = []
        cur = self
        zeta = field.zeta()
        for _ in range(deg):
            cols.append(cur.coeffs)
            cur = cur * zeta
        # Gaussian elimination on the augmented system M x = e_0.
        mat = [[cols[j][i] for j in range(deg)] for i in range(deg)]
        rhs = [_ONE if i == 0 else _ZERO for i in range(deg)]
        for col in range(deg):
            pivot = next((r for r in range(col, deg) if mat[r][col]), None)
            assert pivot is not None, "singular multiplication matrix in a field"
            if pivot != col:
                mat[col], mat[pivot] = mat[pivot], mat[col]
                rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
            inv_p = 1 / mat[col][col]
            mat[col] = [c * inv_p for c in mat[col]]
            rhs[col] = rhs[col] * inv_p
            for r in range(deg):
                if r != col and mat[r][col]:
                    f = mat[r][col]
                    mat[r] = [c - f * d for c, d in zip(mat[r], mat[col])]
                    rhs[r] = rhs[r] - f * rhs[col]
        result = FieldElement(field, tuple(rhs), _validated=True)
        assert (result * self).is_one(), "inverse failed to verify"
        return result

    def multiplicative_order(self):
        """Order as a root of unity, or None if the element is not one."""
        if self.is_zero():
            return None
        bound = self.field.root_group_order
        cur = self
        for k in range(1, bound + 1):
            if cur.is_one():
                return k
            cur = cur * self
        return None

    def minimal_polynomial(self):
        """Monic minimal polynomial over Q as a tuple of Fractions, low first.

        The coefficients are rational; clearing denominators gives the
        integer-coefficient polynomial up to scaling.
        """
        field = self.field
        deg = field.degree
        # Incremental echelon on the powers 1, a, a^2, ... over Q.
        rows = []  # (pivot index, vector, combination over added powers)
        cur = field.one
        k = 0
        while True:
            vec = list(cur.coeffs)
            combo = [_ZERO] * (k + 1)
            combo[k] = _ONE
            for pivot, pvec, pcombo in rows:
                f = vec[pivot]
                if f:
                    vec = [c - f * d for c, d in zip(vec, pvec)]
                    padded = pcombo + [_ZERO] * (len(combo) - len(pcombo))
                    combo = [c - f * d for c, d in zip(combo, padded)]
            pivot = next((i for i, c in enumerate(vec) if c), None)
            if pivot is None:
                # combo expresses the dependency sum combo[i] * a^i = 0.
                lead = combo[-1]
                return tuple(c / lead for c in combo)
            inv_p = 1 / vec[pivot]
            rows.append((pivot,
                         [c * inv_p for c in vec],
                         [c * inv_p for c in combo]))
            cur = cur * self
            k += 1
            assert k <= deg, "minimal polynomial exceeded the field degree"

    def to_strings(self):
        return tuple(rational_to_str(c) for c in self.coeffs)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.conductor, self.coeffs))

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                if i == 0:
                    parts.append(str(c))
                elif i == 1:
                    parts.append("%s*z" % c if c != 1 else "z")
                else:
                    parts.append("%s*z^%d" % (c, i) if c != 1 else "z^%d" % i)
        body = " + ".join(parts) if parts else "0"
        return "<%s in Q(zeta_%d)>" % (body, self.field.conductor)


class FieldAut:
    """Galois automorphism zeta -> zeta^k of Q(zeta_m), gcd(k, m) = 1."""

    __slots__ = ("field", "exponent")

    def __init__(self, field: CycloField, k: int):
        m = field.conductor
        k = k % m if m > 1 else 1
        if gcd(k, m) != 1:
            raise ValueError("exponent %d is not a unit mod %d" % (k, m))
        self.field = field
        self.exponent = k

    def is_identity(self) -> bool:
        return self.exponent == 1

    def __call__(self, elem: FieldElement) -> FieldElement:
        if elem.field != self.field:
            raise FieldMismatch("automorphism of Q(zeta_%d) applied to Q(zeta_%d)"
                                % (self.field.conductor, elem.field.conductor))
        if self.is_identity():
            return elem
        field = self.field
        m = field.conductor
        deg = field.degree
        rep = field._power_rep
        out = [_ZERO] * deg
        for j in elem._support():
            cj = elem.coeffs[j]
            rv = rep[(j * self.exponent) % m]
            for i in range(deg):
                if rv[i]:
                    out[i] += cj * rv[i]
        return FieldElement(field, tuple(out), _validated=True)

    def compose(self, other: "FieldAut") -> "FieldAut":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        if other.field != self.field:
            raise FieldMismatch("automorphisms of different fields")
        return FieldAut(self.field, self.exponent * other.exponent)

    def inverse(self) -> "FieldAut":
        m = self.field.conductor
        if m == 1:
            return self
        return FieldAut(self.field, pow(self.exponent, -1, m))

    def power(self, n: int) -> "FieldAut":
        m = self.field.conductor
        if m == 1 or self.is_identity():
            return self
        if n < 0:
            return self.inverse().power(-n)
        return FieldAut(self.field, pow(self.exponent, n, m))

    def __eq__(self, other):
        return (isinstance(other, FieldAut) and other.field == self.field
                and other.exponent == self.exponent)

    def __hash__(self):
        return hash(("FieldAut", self.field.conductor, self.exponent))

    def __repr__(self):
        return "FieldAut(zeta_%d -> zeta_%d^%d)" % (
            self.field.conductor, self.field.conductor, self.exponent)


def root_of_unity(field: CycloField, order: int) -> FieldElement:
    """The canonical primitive root of unity of the given order.

    For order dividing the conductor m this is zeta_m^(m/order).  Odd-conductor
    fields also contain -1, so orders dividing 2m are served there as well.
    Anything else raises OrderNotSupported naming a sufficient conductor.
    """
    if order < 1:
        raise ValueError("order must be a positive integer")
    m = field.conductor
    if m % order == 0:
        return field.zeta_power(m // order)
    if m % 2 == 1 and (2 * m) % order == 0:
        # order = 2 * odd divisor of m; take -1 times the odd part's root.
        odd_part = order // 2
        return -field.zeta_power(m // odd_part)
    needed = m * order // gcd(m, order)
    raise OrderNotSupported(
        "Q(zeta_%d) has no root of unity of order %d; conductor %d suffices"
        % (m, order, needed),
        suggested_conductor=needed,
    )


def apply_aut(aut: FieldAut, elem: FieldElement) -> FieldElement:
    return aut(elem)
