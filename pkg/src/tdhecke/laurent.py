"""Finite-level models of groups that are compact-by-Z.

The group G = L x| <t> (L a finite level quotient of the compact part, t of
infinite order acting by an automorphism phi of L) has Hecke elements that
are finitely supported across the t-grading.  Two pictures are implemented:

  * CovirtZElement: a function on G stored as finitely many slices, slice n
    being the function l -> x(l t^n) on L; multiplication is the measured
    convolution over the transversal {t^m l'} computed directly;
  * TwistedLaurentElement: a Laurent polynomial over the level crossed
    product A with multiplication (a t^m)(b t^n) = a alpha^m(b) t^{m+n},
    where alpha is the algebra automorphism induced by phi.

xi translates the second picture into the first; the content of the
isomorphism lemma is that xi turns laurent multiplication into direct
convolution, which the tests certify on monomial pairs.
"""

from fractions import Fraction

from .cyclotomic import FieldAut
from .errors import (
    CompatibilityViolation,
    InstanceMismatch,
    WorkbenchError,
)
from .groups import GroupHom, NormalCharacter, RhoAction, Subgroup
from .hecke import HeckeElement, HeckeInstance
from .crossed import CPElement, CrossedProduct, build_level, cp_to_hecke, hecke_to_cp


class LevelAutomorphism:
    """An automorphism of a finite-model Hecke algebra.

    Built from a group automorphism (conjugation by the distinguished
    generator) and an optional coefficient-field automorphism applied
    alongside.  Validity conditions checked here: the group map is bijective,
    the normal subgroup and every subgroup listed in `preserve` are invariant,
    the character and the coefficient action are invariant, and the
    coefficient twist fixes all character values.  Together these make

        (phi s)(l) = rho_t(s(phi^-1(l)))

    a ring automorphism of the level algebras.
    """

    def __init__(self, instance: HeckeInstance, grp_aut: GroupHom,
                 rho_t: FieldAut = None, preserve=()):
        grp = instance.group
        if grp_aut.src is not grp or grp_aut.dst is not grp:
            raise InstanceMismatch("group map does not act on the instance group")
        if not grp_aut.is_bijective():
            raise CompatibilityViolation("group map is not bijective")
        if rho_t is None:
            rho_t = instance.field.identity_aut()
        if rho_t.field != instance.field:
            raise CompatibilityViolation(
                "coefficient twist lives in a different field"
            )

        normal = instance.normal
        if {grp_aut(n) for n in normal.elements} != normal.elements:
            raise CompatibilityViolation(
                "group map does not preserve the normal subgroup"
            )
        preserve = tuple(preserve)
        for sub in preserve:
            if {grp_aut(k) for k in sub.elements} != sub.elements:
                raise CompatibilityViolation(
                    "group map does not preserve a required level subgroup"
                )
        for n in normal.sorted_elements():
            if instance.omega(grp_aut(n)) != instance.omega(n):
                raise CompatibilityViolation(
                    f"character is not invariant: omega(phi({n})) != omega({n})"
                )
            if rho_t(instance.omega(n)) != instance.omega(n):
                raise CompatibilityViolation(
                    f"coefficient twist moves the character value at {n}"
                )
        m = instance.field.conductor
        for g in grp.elements:
            if (instance.rho.exponents[grp_aut(g)]
                    - instance.rho.exponents[g]) % m:
                raise CompatibilityViolation(
                    f"coefficient action is not invariant at {g}"
                )

        self.instance = instance
        self.grp_aut = grp_aut
        self.grp_inv = grp_aut.inverse()
        self.rho_t = rho_t
        self.preserve = preserve
        self._pow_cache = {0: tuple(grp.elements), 1: grp_aut.mapping,
                           -1: self.grp_inv.mapping}

    def group_power(self, n: int):
        """The mapping tuple of the n-th power of the group automorphism."""
        cached = self._pow_cache.get(n)
        if cached is not None:
            return cached
        step = self._pow_cache[1] if n > 0 else self._pow_cache[-1]
        mapping = self.group_power(n - 1 if n > 0 else n + 1)
        out = tuple(step[x] for x in mapping)
        self._pow_cache[n] = out
        return out

    def on_element(self, s: HeckeElement) -> HeckeElement:
        """(phi s)(l) = rho_t(s(phi^-1(l)))."""
        if s.instance is not self.instance:
            raise InstanceMismatch("element belongs to a different instance")
        inv = self.grp_inv.mapping
        rho_t = self.rho_t
        values = [rho_t(s.values[inv[l]]) for l in self.instance.group.elements]
        level = Subgroup(self.instance.group,
                         {self.grp_aut(k) for k in s.level.elements})
        return HeckeElement(self.instance, level, values)

    def on_cp(self, cp: CrossedProduct, x: CPElement) -> CPElement:
        """The induced map on crossed-product coordinates of a level."""
        if x.parent is not cp:
            raise InstanceMismatch("element does not live in the given algebra")
        return hecke_to_cp(cp, self.on_element(cp_to_hecke(x)))

    def inverse(self) -> "LevelAutomorphism":
        return LevelAutomorphism(self.instance, self.grp_inv,
                                 rho_t=self.rho_t.inverse(),
                                 preserve=self.preserve)

    def power(self, n: int) -> "LevelAutomorphism":
        if n == 1:
            return self
        grp = self.instance.group
        mapping = self.group_power(n)
        return LevelAutomorphism(self.instance,
                                 GroupHom(grp, grp, mapping,
                                          name=f"{self.grp_aut.name}^{n}"),
                                 rho_t=self.rho_t.power(n),
                                 preserve=self.preserve)

    def __eq__(self, other):
        return (
            isinstance(other, LevelAutomorphism)
            and self.instance is other.instance
            and self.grp_aut.mapping == other.grp_aut.mapping
            and self.rho_t == other.rho_t
        )

    def __hash__(self):
        return hash((id(self.instance), self.grp_aut.mapping, self.rho_t))

    def __repr__(self):
        return (f"LevelAutomorphism({self.grp_aut.name or 'phi'} "
                f"on {self.instance.name})")


def phi_hecke(auto: LevelAutomorphism, s: HeckeElement) -> HeckeElement:
    """Apply the level automorphism to an element (function form)."""
    return auto.on_element(s)


class TwistedLaurentRing:
    """Laurent polynomials over a level crossed product, twisted by alpha."""

    def __init__(self, cp: CrossedProduct, auto: LevelAutomorphism):
        if cp.instance is None:
            raise WorkbenchError(
                "the base algebra must carry Hecke provenance (build_level)"
            )
        if cp.instance is not auto.instance:
            raise InstanceMismatch(
                "base algebra and automorphism use different instances"
            )
        if {auto.grp_aut(k) for k in cp.level.elements} != cp.level.elements:
            raise CompatibilityViolation(
                "automorphism does not preserve the base algebra's level"
            )
        self.cp = cp
        self.auto = auto
        self._basis_images = {0: [cp.basis(d) for d in cp.group.elements]}

    def _images(self, n: int):
        cached = self._basis_images.get(n)
        if cached is not None:
            return cached
        step = 1 if n > 0 else -1
        prev = self._images(n - step)
        auto = self.auto if step == 1 else self.auto.inverse()
        out = [auto.on_cp(self.cp, img) for img in prev]
        self._basis_images[n] = out
        return out

    def alpha(self, x: CPElement, n: int = 1) -> CPElement:
        """alpha^n applied to a base element (semilinear over the twist)."""
        if x.parent is not self.cp:
            raise InstanceMismatch("element does not live in the base algebra")
        if n == 0:
            return x
        images = self._images(n)
        rho_n = self.auto.rho_t.power(n)
        out = self.cp.zero()
        for d, r in enumerate(x.coeffs):
            if not r.is_zero():
                out = out + rho_n(r) * images[d]
        return out

    def element(self, slices) -> "TwistedLaurentElement":
        return TwistedLaurentElement(self, slices)

    def monomial(self, a: CPElement, n: int) -> "TwistedLaurentElement":
        return TwistedLaurentElement(self, {n: a})

    def one(self) -> "TwistedLaurentElement":
        return self.monomial(self.cp.one(), 0)

    def zero(self) -> "TwistedLaurentElement":
        return TwistedLaurentElement(self, {})

    def __repr__(self):
        return f"TwistedLaurentRing(over {self.cp.name})"


class TwistedLaurentElement:
    """A finite sum of monomials a_n t^n with a_n in the base algebra."""

    __slots__ = ("parent", "slices")

    def __init__(self, parent: TwistedLaurentRing, slices):
        clean = {}
        for n, a in dict(slices).items():
            if not isinstance(n, int):
                raise WorkbenchError(f"degree {n!r} is not an integer")
            if not isinstance(a, CPElement) or a.parent is not parent.cp:
                raise InstanceMismatch(
                    f"slice at degree {n} is not in the base algebra"
                )
            if not a.is_zero():
                clean[n] = a
        self.parent = parent
        self.slices = clean

    def degrees(self):
        return tuple(sorted(self.slices))

    def slice(self, n: int) -> CPElement:
        return self.slices.get(n, self.parent.cp.zero())

    def is_zero(self) -> bool:
        return not self.slices

    def _require_same_parent(self, other):
        if self.parent is not other.parent:
            raise InstanceMismatch("elements belong to different rings")

    def __add__(self, other):
        if not isinstance(other, TwistedLaurentElement):
            return NotImplemented
        self._require_same_parent(other)
        out = dict(self.slices)
        for n, a in other.slices.items():
            out[n] = out[n] + a if n in out else a
        return TwistedLaurentElement(self.parent, out)

    def __sub__(self, other):
        if not isinstance(other, TwistedLaurentElement):
            return NotImplemented
        self._require_same_parent(other)
        out = dict(self.slices)
        for n, a in other.slices.items():
            out[n] = out[n] - a if n in out else -a
        return TwistedLaurentElement(self.parent, out)

    def __neg__(self):
        return TwistedLaurentElement(self.parent,
                                     {n: -a for n, a in self.slices.items()})

    def __mul__(self, other):
        if not isinstance(other, TwistedLaurentElement):
            return NotImplemented
        self._require_same_parent(other)
        ring = self.parent
        out = {}
        for m, a in self.slices.items():
            for n, b in other.slices.items():
                term = a * ring.alpha(b, m)
                key = m + n
                out[key] = out[key] + term if key in out else term
        return TwistedLaurentElement(ring, out)

    def __eq__(self, other):
        return (
            isinstance(other, TwistedLaurentElement)
            and self.parent is other.parent
            and self.slices == other.slices
        )

    def __hash__(self):
        return hash((id(self.parent), tuple(sorted(self.slices.items()))))

    def __repr__(self):
        if not self.slices:
            return "0"
        return " + ".join(f"({self.slices[n]!r})t^{n}" for n in self.degrees())


class CovirtZElement:
    """A function on L x| <t> stored as finitely many level slices."""

    __slots__ = ("parent", "slices")

    def __init__(self, parent: "CovirtLevelModel", slices):
        clean = {}
        for n, s in dict(slices).items():
            if not isinstance(n, int):
                raise WorkbenchError(f"degree {n!r} is not an integer")
            if not isinstance(s, HeckeElement) or s.instance is not parent.instance:
                raise InstanceMismatch(
                    f"slice at degree {n} is not an element of the level model"
                )
            if not s.is_zero():
                clean[n] = s if s.level == parent.level else s.with_level(parent.level)
        self.parent = parent
        self.slices = clean

    def degrees(self):
        return tuple(sorted(self.slices))

    def slice(self, n: int) -> HeckeElement:
        got = self.slices.get(n)
        return got if got is not None else self.parent.instance.zero_element(
            self.parent.level)

    def evaluate(self, l: int, n: int):
        """The value at the group point l t^n."""
        return self.slice(n).values[l]

    def is_zero(self) -> bool:
        return not self.slices

    def _require_same_parent(self, other):
        if self.parent is not other.parent:
            raise InstanceMismatch("elements belong to different models")

    def __add__(self, other):
        if not isinstance(other, CovirtZElement):
            return NotImplemented
        self._require_same_parent(other)
        out = dict(self.slices)
        for n, s in other.slices.items():
            out[n] = out[n] + s if n in out else s
        return CovirtZElement(self.parent, out)

    def __sub__(self, other):
        if not isinstance(other, CovirtZElement):
            return NotImplemented
        self._require_same_parent(other)
        out = dict(self.slices)
        for n, s in other.slices.items():
            out[n] = out[n] - s if n in out else -s
        return CovirtZElement(self.parent, out)

    def __neg__(self):
        return CovirtZElement(self.parent,
                              {n: -s for n, s in self.slices.items()})

    def __mul__(self, other):
        """Direct convolution on the semidirect product.

        The transversal of G over N K is {t^m l'} for l' in the level
        transversal, so the measured product collapses to

            (x y)(l t^m) = mu(pr K) * sum over a + b = m, l' in T of
                x_a(l phi^a(l')) [rho(l phi^a(l')) rho_t^a](y_b(l'^-1))

        with x_a, y_b the slices.
        """
        if not isinstance(other, CovirtZElement):
            return NotImplemented
        self._require_same_parent(other)
        model = self.parent
        inst = model.instance
        grp = inst.group
        trans = inst.transversal(model.level)
        mu = inst.measure_of_level(model.level)
        rho = inst.rho
        auto = model.auto
        zero = inst.field.zero

        raw = {}
        for a, xs in self.slices.items():
            phi_a = auto.group_power(a)
            rho_t_a = auto.rho_t.power(a)
            for b, ys in other.slices.items():
                m = a + b
                acc = raw.get(m)
                if acc is None:
                    acc = [zero] * grp.order
                    raw[m] = acc
                for l in grp.elements:
                    total = zero
                    for lp in trans:
                        arg = grp.mul(l, phi_a[lp])
                        xv = xs.values[arg]
                        if xv.is_zero():
                            continue
                        yv = ys.values[grp.inv(lp)]
                        if yv.is_zero():
                            continue
                        total = total + xv * rho(arg)(rho_t_a(yv))
                    if not total.is_zero():
                        acc[l] = acc[l] + total
        out = {}
        for m, acc in raw.items():
            elem = HeckeElement(inst, model.level, [mu * v for v in acc])
            if not elem.is_zero():
                out[m] = elem
        return CovirtZElement(model, out)

    def __eq__(self, other):
        return (
            isinstance(other, CovirtZElement)
            and self.parent is other.parent
            and self.slices == other.slices
        )

    def __hash__(self):
        return hash((id(self.parent), tuple(sorted(
            (n, s.values) for n, s in self.slices.items()))))

    def __repr__(self):
        if not self.slices:
            return "0"
        return " + ".join(f"[{self.slices[n]!r}]t^{n}" for n in self.degrees())


class CovirtLevelModel:
    """One finite level of a compact-by-Z group, with both pictures wired up.

    Carries the finite instance for the level quotient L, the distinguished
    automorphism (conjugation by t plus an optional coefficient twist), the
    crossed-product picture of the level subalgebra, and the twisted Laurent
    ring over it.
    """

    def __init__(self, instance: HeckeInstance, auto: LevelAutomorphism,
                 level: Subgroup = None):
        if auto.instance is not instance:
            raise InstanceMismatch("automorphism acts on a different instance")
        if level is None:
            level = Subgroup.trivial(instance.group)
        if {auto.grp_aut(k) for k in level.elements} != level.elements:
            raise CompatibilityViolation(
                "automorphism does not preserve the level subgroup"
            )
        instance.require_admissible_class(level)
        self.instance = instance
        self.auto = auto
        self.level = level
        self.cp = build_level(instance, level)
        self.laurent = TwistedLaurentRing(self.cp, auto)

    @staticmethod
    def from_tower(twist, j: int, field) -> "CovirtLevelModel":
        """The level-j model of a unit-twisted abelian tower.

        The finite part is the level quotient with trivial character data;
        the distinguished generator acts by the tower's power map and the
        tower's optional coefficient twist.
        """
        grp = twist.tower.level(j)
        omega = NormalCharacter.trivial(grp, Subgroup.trivial(grp), field)
        rho = RhoAction.trivial(grp, field)
        instance = HeckeInstance(grp, omega, rho,
                                 name=f"level{j}[{grp.name}]")
        auto = LevelAutomorphism(instance, twist.level_aut(j),
                                 rho_t=twist.coefficient_aut(field))
        return CovirtLevelModel(instance, auto)

    # -- constructors -----------------------------------------------------------

    def element(self, slices) -> CovirtZElement:
        return CovirtZElement(self, slices)

    def point_mass(self, l: int, n: int, value=1) -> CovirtZElement:
        """The function supported at the single point l t^n (requires a
        trivial normal subgroup and level, where no completion is needed)."""
        field = self.instance.field
        v = value if not isinstance(value, (int, Fraction)) else \
            field.from_rational(Fraction(value))
        vals = [field.zero] * self.instance.group.order
        vals[l] = v
        return CovirtZElement(self, {n: HeckeElement(self.instance, self.level,
                                                     vals)})

    def laurent_monomial(self, a: CPElement, n: int) -> TwistedLaurentElement:
        return self.laurent.monomial(a, n)

    # -- the translation ---------------------------------------------------------

    def xi(self, x: TwistedLaurentElement) -> CovirtZElement:
        """Realize a t^n as the function supported on the slice L t^n."""
        if x.parent is not self.laurent:
            raise InstanceMismatch("element does not live in this model's ring")
        return CovirtZElement(
            self, {n: cp_to_hecke(a) for n, a in x.slices.items()}
        )

    def xi_inv(self, x: CovirtZElement) -> TwistedLaurentElement:
        if x.parent is not self:
            raise InstanceMismatch("element does not live in this model")
        return TwistedLaurentElement(
            self.laurent,
            {n: hecke_to_cp(self.cp, s) for n, s in x.slices.items()},
        )

    # -- semidirect-product arithmetic for tests ---------------------------------

    def group_mul(self, a, b):
        """(l1, n1)(l2, n2) = (l1 phi^n1(l2), n1 + n2)."""
        l1, n1 = a
        l2, n2 = b
        return (self.instance.group.mul(l1, self.auto.group_power(n1)[l2]),
                n1 + n2)

    def group_inv(self, a):
        """(l, n)^-1 = (phi^-n(l^-1), -n)."""
        l, n = a
        grp = self.instance.group
        return (self.auto.group_power(-n)[grp.inv(l)], -n)

    def __repr__(self):
        return f"CovirtLevelModel({self.instance.name}, u-aut {self.auto!r})"
