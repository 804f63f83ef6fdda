"""Finite-model Hecke algebras: equivariant functions under convolution.

An instance fixes a finite group G, a normal subgroup N carrying a character
omega into the coefficient field, and an action rho of G on the field by
automorphisms.  Elements are functions s: G -> F with

    s(n g) = omega(n) s(g),   s(g n) = s(g) omega(n)   for n in N,
    s(k g) = s(g k) = s(g)                              for k in K,

where K is the element's declared level subgroup.  Levels must lie in the
admissible class: the coefficient action is trivial on K and the character is
trivial on the intersection of N with K.  The product is the measured
convolution over a transversal of G/NK; its well-definedness is re-checked on
every result.

The measure on Q = G/N is determined by one rational, the total mass mu(Q)
(default 1), so mu(pr K) = mu(Q) * |NK| / |G|.
"""

import hashlib
from fractions import Fraction

from .cyclotomic import FieldElement
from .errors import (
    CompatibilityViolation,
    FieldMismatch,
    InconsistentValues,
    InstanceMismatch,
    InvalidNormalCharacter,
    LevelNotAdmissibleClass,
    WellDefinednessFailure,
    WorkbenchError,
)
from .groups import (
    GroupHom,
    NormalCharacter,
    RhoAction,
    Subgroup,
    coset_transversal,
    factor_in_product,
    validate_normal_character,
)


class HeckeInstance:
    """A finite group model with validated character data and a measure."""

    def __init__(self, group, omega: NormalCharacter, rho: RhoAction,
                 measure_total=Fraction(1), name=""):
        if omega.group is not group or rho.group is not group:
            raise InstanceMismatch("character or action lives on another group")
        if omega.field != rho.field:
            raise FieldMismatch(
                "character and coefficient action use different fields"
            )
        report = validate_normal_character(omega, rho)
        if not report.ok:
            raise InvalidNormalCharacter(
                "character data fails compatibility laws:\n" + report.summary(),
                report=report,
            )
        measure_total = Fraction(measure_total)
        if measure_total <= 0:
            raise WorkbenchError("total measure must be positive")
        self.group = group
        self.normal = omega.domain
        self.omega = omega
        self.rho = rho
        self.field = omega.field
        self.measure_total = measure_total
        self.name = name or f"hecke[{group.name}]"
        self._nk_cache = {}
        self._transversal_cache = {}

    # -- levels ---------------------------------------------------------------

    def admissibility_failures(self, level: Subgroup):
        """Reasons the subgroup is outside the admissible class (empty = ok)."""
        if level.group is not self.group:
            raise InstanceMismatch("level subgroup belongs to a different group")
        reasons = []
        for k in level.sorted_elements():
            if not self.rho(k).is_identity():
                reasons.append(f"coefficient action is nontrivial at {k} in K")
                break
        for n in sorted(self.normal.elements & level.elements):
            if not self.omega(n).is_one():
                reasons.append(f"character is nontrivial at {n} in N "
                               "intersected with K")
                break
        return reasons

    def is_admissible_class(self, level: Subgroup) -> bool:
        return not self.admissibility_failures(level)

    def require_admissible_class(self, level: Subgroup):
        reasons = self.admissibility_failures(level)
        if reasons:
            raise LevelNotAdmissibleClass("; ".join(reasons))

    def nk(self, level: Subgroup) -> Subgroup:
        """The subgroup N*K for a level K (cached)."""
        cached = self._nk_cache.get(level)
        if cached is None:
            cached = self.normal.product_with(level)
            self._nk_cache[level] = cached
        return cached

    def measure_of_level(self, level: Subgroup) -> Fraction:
        """mu(pr(K)) = mu(Q) * |NK| / |G|."""
        return self.measure_total * Fraction(self.nk(level).order,
                                             self.group.order)

    def transversal(self, level: Subgroup):
        """Canonical transversal of G -> G/NK: minimal coset representatives."""
        cached = self._transversal_cache.get(level)
        if cached is None:
            cached = tuple(coset_transversal(self.group, self.nk(level)))
            self._transversal_cache[level] = cached
        return cached

    # -- distinguished elements ------------------------------------------------

    def unit(self, level: Subgroup) -> "HeckeElement":
        """The two-sided unit of the level subalgebra.

        Its value is omega(n) / mu(pr K) at g = n k in NK and zero elsewhere;
        triviality of omega on N meet K makes this independent of the
        factorization.
        """
        self.require_admissible_class(level)
        scale = 1 / self.measure_of_level(level)
        nk = self.nk(level)
        values = []
        for g in self.group.elements:
            if g in nk.elements:
                n, _ = factor_in_product(self.group, self.normal, level, g)
                values.append(scale * self.omega(n))
            else:
                values.append(self.field.zero)
        return HeckeElement(self, level, values)

    def zero_element(self, level: Subgroup) -> "HeckeElement":
        return HeckeElement(self, level,
                            [self.field.zero] * self.group.order,
                            _trusted=True)

    def rescaled(self, factor) -> "HeckeInstance":
        """The same data with the total measure multiplied by factor > 0."""
        return HeckeInstance(self.group, self.omega, self.rho,
                             measure_total=self.measure_total * Fraction(factor),
                             name=self.name + f"*mu{factor}")

    def fingerprint(self) -> str:
        payload = repr((
            self.group.table_fingerprint(),
            self.normal.sorted_elements(),
            tuple((n, self.omega(n).to_strings())
                  for n in self.normal.sorted_elements()),
            self.rho.exponents,
            self.field.conductor,
            str(self.measure_total),
        ))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def __repr__(self):
        return (f"HeckeInstance({self.group.name}, |N|={self.normal.order}, "
                f"field=Q(zeta_{self.field.conductor}))")


class HeckeElement:
    """A coefficient function on the group with a declared admissible level.

    Equality compares value tables (the declared level is bookkeeping, not
    part of the function's identity).
    """

    __slots__ = ("instance", "level", "values")

    def __init__(self, instance: HeckeInstance, level: Subgroup, values,
                 _trusted=False):
        values = tuple(values)
        if len(values) != instance.group.order:
            raise WorkbenchError(
                f"value table has {len(values)} entries, expected "
                f"{instance.group.order}"
            )
        for g, v in enumerate(values):
            if not isinstance(v, FieldElement) or v.field != instance.field:
                raise FieldMismatch(f"value at {g} is not in the instance field")
        instance.require_admissible_class(level)
        self.instance = instance
        self.level = level
        self.values = values
        if not _trusted:
            self._validate()

    def _validate(self):
        grp = self.instance.group
        omega = self.instance.omega
        vals = self.values
        for n in self.instance.normal.elements:
            if n == 0:
                continue
            w = omega(n)
            for g in grp.elements:
                if vals[grp.mul(n, g)] != w * vals[g]:
                    raise InconsistentValues(
                        f"s({n}*{g}) != omega({n})*s({g}): "
                        "left equivariance fails"
                    )
                # The right-handed law is a consequence of the left one and
                # conjugation invariance; check it anyway as a tripwire.
                if vals[grp.mul(g, n)] != vals[g] * w:
                    raise InconsistentValues(
                        f"s({g}*{n}) != s({g})*omega({n}): "
                        "right equivariance fails"
                    )
        for k in self.level.elements:
            if k == 0:
                continue
            for g in grp.elements:
                if vals[grp.mul(k, g)] != vals[g] or vals[grp.mul(g, k)] != vals[g]:
                    raise InconsistentValues(
                        f"values are not bi-invariant under level element {k}"
                    )

    # -- ring / module structure ----------------------------------------------

    def _require_same_instance(self, other: "HeckeElement"):
        if self.instance is not other.instance:
            raise InstanceMismatch("elements belong to different instances")

    def _common_level(self, other: "HeckeElement") -> Subgroup:
        if self.level == other.level:
            return self.level
        return self.level.intersection(other.level)

    def __add__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        self._require_same_instance(other)
        return HeckeElement(
            self.instance,
            self._common_level(other),
            [a + b for a, b in zip(self.values, other.values)],
            _trusted=True,
        )

    def __sub__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        self._require_same_instance(other)
        return HeckeElement(
            self.instance,
            self._common_level(other),
            [a - b for a, b in zip(self.values, other.values)],
            _trusted=True,
        )

    def __neg__(self):
        return HeckeElement(self.instance, self.level,
                            [-a for a in self.values], _trusted=True)

    def scaled(self, scalar) -> "HeckeElement":
        """Multiply every value by a scalar from the coefficient field."""
        if isinstance(scalar, FieldElement):
            if scalar.field != self.instance.field:
                raise FieldMismatch("scalar lives in a different field")
            factor = scalar
        else:
            factor = self.instance.field.from_rational(Fraction(scalar))
        return HeckeElement(self.instance, self.level,
                            [factor * v for v in self.values], _trusted=True)

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction, FieldElement)):
            return self.scaled(scalar)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return convolve(self, other)
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scaled(other)
        return NotImplemented

    def __eq__(self, other):
        return (
            isinstance(other, HeckeElement)
            and self.instance is other.instance
            and self.values == other.values
        )

    def __hash__(self):
        return hash((id(self.instance), self.values))

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def support(self):
        return tuple(g for g, v in enumerate(self.values) if not v.is_zero())

    def with_level(self, level: Subgroup) -> "HeckeElement":
        """Re-declare the level; all invariance laws are re-validated."""
        return HeckeElement(self.instance, level, self.values)

    def invariant_under(self, level: Subgroup) -> bool:
        """True when the level is admissible for this element."""
        if not self.instance.is_admissible_class(level):
            return False
        grp = self.instance.group
        vals = self.values
        return all(
            vals[grp.mul(k, g)] == vals[g] and vals[grp.mul(g, k)] == vals[g]
            for k in level.elements
            for g in grp.elements
        )

    def to_dict(self):
        return {
            "level": list(self.level.sorted_elements()),
            "values": [v.to_strings() for v in self.values],
        }

    @staticmethod
    def from_dict(instance: HeckeInstance, data) -> "HeckeElement":
        level = Subgroup(instance.group, data["level"])
        values = [instance.field.element_from_strings(v)
                  for v in data["values"]]
        return HeckeElement(instance, level, values)

    def __repr__(self):
        body = ", ".join(
            f"{g}:{v!r}" for g, v in enumerate(self.values) if not v.is_zero()
        )
        return f"HeckeElement({{{body or '0'}}})"


def make_element(instance: HeckeInstance, level: Subgroup, assignments):
    """Build an element from values on a few points, completed by the laws.

    Values propagate along left/right translation by the normal subgroup
    (with character factors) and the level subgroup; clashes raise
    InconsistentValues with the offending point.  Unreached points get zero.
    """
    instance.require_admissible_class(level)
    grp = instance.group
    field = instance.field
    omega = instance.omega
    table = {}
    frontier = []
    for g, v in assignments.items():
        if not isinstance(v, FieldElement):
            v = field.from_rational(Fraction(v))
        elif v.field != field:
            raise FieldMismatch(f"assignment at {g} is not in the instance field")
        if not isinstance(g, int) or not 0 <= g < grp.order:
            raise WorkbenchError(f"{g!r} is not a group element")
        _record(table, frontier, g, v)
    while frontier:
        g, v = frontier.pop()
        for n in instance.normal.elements:
            w = omega(n)
            _record(table, frontier, grp.mul(n, g), w * v)
            _record(table, frontier, grp.mul(g, n), v * w)
        for k in level.elements:
            _record(table, frontier, grp.mul(k, g), v)
            _record(table, frontier, grp.mul(g, k), v)
    values = [table.get(g, field.zero) for g in grp.elements]
    return HeckeElement(instance, level, values)


def _record(table, frontier, g, v):
    seen = table.get(g)
    if seen is None:
        table[g] = v
        frontier.append((g, v))
    elif seen != v:
        raise InconsistentValues(
            f"completion assigns two different values at element {g}"
        )


def _validate_transversal(instance: HeckeInstance, level: Subgroup, trans):
    grp = instance.group
    nk = instance.nk(level)
    trans = tuple(trans)
    if 0 not in trans:
        raise WellDefinednessFailure("a transversal must contain the identity")
    expected = grp.order // nk.order
    if len(trans) != expected:
        raise WellDefinednessFailure(
            f"transversal has {len(trans)} entries, expected {expected}"
        )
    seen = set()
    for t in trans:
        if not isinstance(t, int) or not 0 <= t < grp.order:
            raise WellDefinednessFailure(f"{t!r} is not a group element")
        coset = min(grp.mul(t, h) for h in nk.elements)
        if coset in seen:
            raise WellDefinednessFailure(
                f"transversal hits the coset of {coset} twice"
            )
        seen.add(coset)
    return trans


def convolve(s: HeckeElement, t: HeckeElement, level: Subgroup = None,
             transversal=None) -> HeckeElement:
    """The measured convolution product.

    (s * t)(g) = mu(pr K) * sum over g' in T of s(g g') rho(g g')(t(g'^-1)),
    computed at a level K admissible for both factors (their intersection by
    default) over a transversal T of G/NK (canonical by default).  The result
    carries the declared level K and is re-validated, so a broken
    precondition cannot produce a silently malformed element.
    """
    if s.instance is not t.instance:
        raise InstanceMismatch("cannot convolve elements of different instances")
    inst = s.instance
    grp = inst.group
    if level is None:
        level = s._common_level(t)
    else:
        inst.require_admissible_class(level)
        if not (s.invariant_under(level) and t.invariant_under(level)):
            raise WellDefinednessFailure(
                "declared level is not admissible for both factors"
            )
    if transversal is None:
        trans = inst.transversal(level)
    else:
        trans = _validate_transversal(inst, level, transversal)
    mu = inst.measure_of_level(level)
    rho = inst.rho
    sv, tv = s.values, t.values
    zero = inst.field.zero
    values = []
    for g in grp.elements:
        acc = zero
        for gp in trans:
            left = sv[grp.mul(g, gp)]
            if left.is_zero():
                continue
            right = tv[grp.inv(gp)]
            if right.is_zero():
                continue
            acc = acc + left * rho(grp.mul(g, gp))(right)
        values.append(mu * acc)
    return HeckeElement(inst, level, values)


def pushforward(phi: GroupHom, s: HeckeElement,
                target: HeckeInstance) -> HeckeElement:
    """Transport an element along a group homomorphism into another instance.

    Preconditions (each raises CompatibilityViolation): phi maps the source
    normal subgroup onto the target one, the source action is the pullback
    of the target action, and the source character is the pullback of the
    target character.  The value at g is

        [mu'(pr'(K')) / mu(pr(phi(K')))] * sum over g' in T'(g) of
            s(g') * omega(phi(n')),

    where T'(g) collects the transversal points of G'/N'K' landing in the
    coset g phi(N'K') and g' n' k' is any point of phi^-1(g) adjusted inside
    N'K'.  For injective phi this is the measure-ratio rescaling of s
    transported along phi.
    """
    source = s.instance
    if phi.src is not source.group or phi.dst is not target.group:
        raise InstanceMismatch(
            "homomorphism does not connect the source and target groups"
        )
    if source.field != target.field:
        raise FieldMismatch("source and target use different coefficient fields")
    if {phi(n) for n in source.normal.elements} != target.normal.elements:
        raise CompatibilityViolation(
            "homomorphism does not map the normal subgroup onto the target one"
        )
    m = source.field.conductor
    for g in source.group.elements:
        if (source.rho.exponents[g] - target.rho.exponents[phi(g)]) % m:
            raise CompatibilityViolation(
                f"source action at {g} is not the pullback of the target action"
            )
    for n in source.normal.sorted_elements():
        if source.omega(n) != target.omega(phi(n)):
            raise CompatibilityViolation(
                f"source character at {n} is not the pullback of the target one"
            )

    k_src = s.level
    k_img = Subgroup(target.group, {phi(k) for k in k_src.elements})
    target.require_admissible_class(k_img)
    ratio = source.measure_of_level(k_src) / target.measure_of_level(k_img)

    src_grp, tgt_grp = source.group, target.group
    nk_src = source.nk(k_src)
    nk_img = {phi(x) for x in nk_src.elements}
    trans = source.transversal(k_src)
    n_sorted = source.normal.sorted_elements()
    k_sorted = k_src.sorted_elements()

    values = []
    for g in tgt_grp.elements:
        acc = target.field.zero
        for gp in trans:
            # g' contributes iff phi(g')^-1 g lies in phi(N'K').
            rest = tgt_grp.mul(tgt_grp.inv(phi(gp)), g)
            if rest not in nk_img:
                continue
            value = s.values[gp]
            if value.is_zero():
                continue
            adjust = None
            for n in n_sorted:
                for k in k_sorted:
                    if phi(src_grp.mul(src_grp.mul(gp, n), k)) == g:
                        adjust = n
                        break
                if adjust is not None:
                    break
            assert adjust is not None, "coset membership promised a factorization"
            acc = acc + value * target.omega(phi(adjust))
        values.append(ratio * acc)
    return HeckeElement(target, k_img, values)
