"""Crossed products F *_{c,w} D and the level dictionary.

A level subalgebra of a finite-model Hecke algebra is a crossed product of
the coefficient field by the finite quotient group D = G/NK: the scaled
indicator functions b_d multiply by

    b_{d1} b_{d2} = w(d1, d2) b_{d1 d2},
    b_d r = c_d(r) b_d   (coefficients pass through the Galois action),

where the cocycle value w(d1, d2) is the character evaluated on the normal
part of sigma(d1 d2) sigma(d2)^-1 sigma(d1)^-1 for the canonical transversal
sigma.  build_level constructs this picture from an instance and a level;
hecke_to_cp / cp_to_hecke translate both ways and iso_check certifies that
the translation is a ring isomorphism on every basis pair.

embed_level realizes the inclusion of a coarser level into a finer one and
certifies the corner identity; maschke_section builds the averaging
splitting of the module multiplication map.
"""

from fractions import Fraction

from .cyclotomic import CycloField, FieldAut, FieldElement
from .errors import (
    FieldMismatch,
    InstanceMismatch,
    LevelNotAdmissibleClass,
    NotNormal,
    NotNested,
    WorkbenchError,
)
from .groups import FiniteGroup, Subgroup, ValidationReport, factor_in_product, quotient
from .hecke import HeckeElement, HeckeInstance, convolve
from .linalg import LinearSpan


class CrossedProduct:
    """The data (D, F, w, c), validated, with optional Hecke provenance.

    Validation performed on construction: c is a homomorphism into the field
    automorphisms with c_e = id, w takes unit values with the normalization
    w(e, d) = w(d, e) = 1, and the twisted cocycle identity

        w(d1, d2) w(d1 d2, d3) = c_{d1}(w(d2, d3)) w(d1, d2 d3)

    holds on all triples (this is exactly associativity of the product).
    """

    def __init__(self, group_d: FiniteGroup, field: CycloField, w_table, c_auts,
                 instance: HeckeInstance = None, level: Subgroup = None,
                 sigma=None, hecke_basis=None, name=""):
        n = group_d.order
        w_table = tuple(tuple(row) for row in w_table)
        c_auts = tuple(c_auts)
        if len(w_table) != n or any(len(row) != n for row in w_table):
            raise WorkbenchError("cocycle table must be |D| by |D|")
        if len(c_auts) != n:
            raise WorkbenchError("need one coefficient automorphism per element")
        for d, aut in enumerate(c_auts):
            if not isinstance(aut, FieldAut) or aut.field != field:
                raise FieldMismatch(f"c[{d}] is not an automorphism of the field")
        if not c_auts[0].is_identity():
            raise WorkbenchError("c at the identity must be the identity map")
        for d1 in group_d.elements:
            for d2 in group_d.elements:
                if c_auts[d1].compose(c_auts[d2]) != c_auts[group_d.mul(d1, d2)]:
                    raise WorkbenchError(
                        f"coefficient action is not multiplicative at ({d1}, {d2})"
                    )
        for d1 in group_d.elements:
            for d2 in group_d.elements:
                v = w_table[d1][d2]
                if not isinstance(v, FieldElement) or v.field != field:
                    raise FieldMismatch(f"w({d1}, {d2}) is not in the field")
                if v.is_zero():
                    raise WorkbenchError(f"w({d1}, {d2}) is not a unit")
        for d in group_d.elements:
            if not w_table[0][d].is_one() or not w_table[d][0].is_one():
                raise WorkbenchError(
                    f"cocycle is not normalized at the identity (d = {d})"
                )
        for d1 in group_d.elements:
            for d2 in group_d.elements:
                w12 = w_table[d1][d2]
                d12 = group_d.mul(d1, d2)
                for d3 in group_d.elements:
                    lhs = w12 * w_table[d12][d3]
                    rhs = c_auts[d1](w_table[d2][d3]) * w_table[d1][group_d.mul(d2, d3)]
                    if lhs != rhs:
                        raise WorkbenchError(
                            f"cocycle identity fails at ({d1}, {d2}, {d3})"
                        )
        self.group = group_d
        self.field = field
        self.w_table = w_table
        self.c_auts = c_auts
        self.instance = instance
        self.level = level
        self.sigma = tuple(sigma) if sigma is not None else None
        self.hecke_basis = list(hecke_basis) if hecke_basis is not None else None
        self.name = name or f"F*{group_d.name}"
        self._binv_cache = {}
        self._commutative = None

    # -- structure ------------------------------------------------------------

    @property
    def dimension(self) -> int:
        return self.group.order

    def w(self, d1: int, d2: int) -> FieldElement:
        return self.w_table[d1][d2]

    def c(self, d: int) -> FieldAut:
        return self.c_auts[d]

    def is_commutative(self) -> bool:
        if self._commutative is None:
            self._commutative = (
                self.group.is_abelian()
                and all(a.is_identity() for a in self.c_auts)
                and all(
                    self.w_table[d1][d2] == self.w_table[d2][d1]
                    for d1 in self.group.elements
                    for d2 in self.group.elements
                )
            )
        return self._commutative

    def action_is_trivial(self) -> bool:
        return all(a.is_identity() for a in self.c_auts)

    # -- elements -------------------------------------------------------------

    def element(self, coeffs) -> "CPElement":
        return CPElement(self, coeffs)

    def zero(self) -> "CPElement":
        return CPElement(self, [self.field.zero] * self.dimension)

    def basis(self, d: int, coeff=None) -> "CPElement":
        coeffs = [self.field.zero] * self.dimension
        coeffs[d] = self.field.one if coeff is None else coeff
        return CPElement(self, coeffs)

    def one(self) -> "CPElement":
        return self.basis(0)

    def basis_inverse(self, d: int) -> "CPElement":
        """The inverse of b_d: c_d^-1(w(d, d^-1)^-1) b_{d^-1}, verified."""
        cached = self._binv_cache.get(d)
        if cached is not None:
            return cached
        dinv = self.group.inv(d)
        coeff = self.c_auts[d].inverse()(self.w_table[d][dinv].inverse())
        out = self.basis(dinv, coeff)
        b = self.basis(d)
        if not (b * out).is_one() or not (out * b).is_one():
            raise WorkbenchError(f"computed inverse of basis element {d} fails")
        self._binv_cache[d] = out
        return out

    def __repr__(self):
        flavor = []
        if not self.action_is_trivial():
            flavor.append("twisted action")
        if any(
            not self.w_table[d1][d2].is_one()
            for d1 in self.group.elements
            for d2 in self.group.elements
        ):
            flavor.append("nontrivial cocycle")
        tag = ", ".join(flavor) if flavor else "plain"
        return f"CrossedProduct({self.name}, dim={self.dimension}, {tag})"


class CPElement:
    """An element sum_d r_d b_d with left coefficients r_d in the field."""

    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: CrossedProduct, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != parent.dimension:
            raise WorkbenchError(
                f"need {parent.dimension} coefficients, got {len(coeffs)}"
            )
        for d, r in enumerate(coeffs):
            if not isinstance(r, FieldElement) or r.field != parent.field:
                raise FieldMismatch(f"coefficient at {d} is not in the field")
        self.parent = parent
        self.coeffs = coeffs

    def _require_same_parent(self, other: "CPElement"):
        if self.parent is not other.parent:
            raise InstanceMismatch("elements belong to different crossed products")

    def support(self):
        return tuple(d for d, r in enumerate(self.coeffs) if not r.is_zero())

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.coeffs)

    def is_one(self) -> bool:
        return all(
            (r.is_one() if d == 0 else r.is_zero())
            for d, r in enumerate(self.coeffs)
        )

    def __add__(self, other):
        if not isinstance(other, CPElement):
            return NotImplemented
        self._require_same_parent(other)
        return CPElement(self.parent,
                         [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if not isinstance(other, CPElement):
            return NotImplemented
        self._require_same_parent(other)
        return CPElement(self.parent,
                         [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return CPElement(self.parent, [-a for a in self.coeffs])

    def scaled(self, scalar) -> "CPElement":
        if isinstance(scalar, FieldElement):
            if scalar.field != self.parent.field:
                raise FieldMismatch("scalar lives in a different field")
            factor = scalar
        else:
            factor = self.parent.field.from_rational(Fraction(scalar))
        return CPElement(self.parent, [factor * r for r in self.coeffs])

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction, FieldElement)):
            return self.scaled(scalar)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            # Right multiplication by a scalar passes through the action:
            # (r b_d) s = r c_d(s) b_d.
            if isinstance(other, FieldElement):
                if other.field != self.parent.field:
                    raise FieldMismatch("scalar lives in a different field")
                s = other
            else:
                s = self.parent.field.from_rational(Fraction(other))
            return CPElement(
                self.parent,
                [r * self.parent.c_auts[d](s) for d, r in enumerate(self.coeffs)],
            )
        if not isinstance(other, CPElement):
            return NotImplemented
        self._require_same_parent(other)
        cp = self.parent
        grp = cp.group
        zero = cp.field.zero
        acc = [zero] * cp.dimension
        for d1, r1 in enumerate(self.coeffs):
            if r1.is_zero():
                continue
            c1 = cp.c_auts[d1]
            w_row = cp.w_table[d1]
            g_row = grp.table[d1]
            for d2, r2 in enumerate(other.coeffs):
                if r2.is_zero():
                    continue
                target = g_row[d2]
                term = r1 * c1(r2) * w_row[d2]
                acc[target] = acc[target] + term
        return CPElement(cp, acc)

    def __eq__(self, other):
        return (
            isinstance(other, CPElement)
            and self.parent is other.parent
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.parent), self.coeffs))

    def to_strings(self):
        return [r.to_strings() for r in self.coeffs]

    def __repr__(self):
        terms = [
            f"({r!r})b{d}" for d, r in enumerate(self.coeffs) if not r.is_zero()
        ]
        return " + ".join(terms) if terms else "0"


# -- the dictionary -----------------------------------------------------------


def build_level(instance: HeckeInstance, level: Subgroup) -> CrossedProduct:
    """Construct the crossed-product picture of the level subalgebra.

    Requires NK to be normal in G so that D = G/NK is a group; the finite
    models in this package arrange that by construction.  The b_d basis is
    built explicitly as Hecke elements and the crossed-product laws are
    validated against it.
    """
    instance.require_admissible_class(level)
    grp = instance.group
    nk = instance.nk(level)
    if not nk.is_normal():
        raise NotNormal(
            "N*K is not normal in the group; rechoose the level so the "
            "quotient exists"
        )
    group_d, pr, reps = quotient(grp, nk)
    sigma = tuple(reps)
    assert sigma == instance.transversal(level), \
        "quotient transversal must agree with the instance transversal"

    c_auts = [instance.rho(sigma[d]) for d in group_d.elements]
    field = instance.field
    omega = instance.omega

    w_rows = []
    for d1 in group_d.elements:
        row = []
        for d2 in group_d.elements:
            x = grp.mul(
                grp.mul(sigma[group_d.mul(d1, d2)], grp.inv(sigma[d2])),
                grp.inv(sigma[d1]),
            )
            n, _ = factor_in_product(grp, instance.normal, level, x)
            row.append(omega(n))
        w_rows.append(row)

    scale = 1 / instance.measure_of_level(level)
    basis = []
    for d in group_d.elements:
        values = []
        for g in grp.elements:
            if pr(g) != d:
                values.append(field.zero)
                continue
            x = grp.mul(g, grp.inv(sigma[d]))
            n, _ = factor_in_product(grp, instance.normal, level, x)
            values.append(scale * omega(n))
        basis.append(HeckeElement(instance, level, values))
    assert basis[0] == instance.unit(level), \
        "identity basis vector must be the level unit"

    return CrossedProduct(
        group_d,
        field,
        w_rows,
        c_auts,
        instance=instance,
        level=level,
        sigma=sigma,
        hecke_basis=basis,
        name=f"{instance.name}//K{len(level)}",
    )


def _require_dictionary(cp: CrossedProduct):
    if cp.instance is None or cp.hecke_basis is None:
        raise WorkbenchError(
            "this crossed product carries no Hecke provenance; "
            "build it with build_level to use the dictionary"
        )


def hecke_to_cp(cp: CrossedProduct, s: HeckeElement) -> CPElement:
    """Expand a level element over the b_d basis: coeffs are mu * s(sigma(d))."""
    _require_dictionary(cp)
    if s.instance is not cp.instance:
        raise InstanceMismatch("element belongs to a different instance")
    if s.level != cp.level and not s.invariant_under(cp.level):
        raise LevelNotAdmissibleClass(
            "element is not bi-invariant at the crossed product's level"
        )
    mu = cp.instance.measure_of_level(cp.level)
    coeffs = [mu * s.values[rep] for rep in cp.sigma]
    out = CPElement(cp, coeffs)
    assert cp_to_hecke(out) == s, "basis expansion failed to reproduce the element"
    return out


def cp_to_hecke(x: CPElement) -> HeckeElement:
    """Realize sum_d r_d b_d as a function on the group."""
    cp = x.parent
    _require_dictionary(cp)
    field = cp.field
    zero = field.zero
    values = [zero] * cp.instance.group.order
    for d, r in enumerate(x.coeffs):
        if r.is_zero():
            continue
        for g, bval in enumerate(cp.hecke_basis[d].values):
            if not bval.is_zero():
                values[g] = values[g] + r * bval
    return HeckeElement(cp.instance, cp.level, values)


def iso_check(cp: CrossedProduct) -> ValidationReport:
    """Certify that the dictionary is a ring isomorphism onto the level algebra.

    Checks, exhaustively over the basis: the b_d supports partition the
    group, b_e is the level unit, convolution of basis functions matches the
    crossed-product law b_{d1} b_{d2} = w(d1,d2) b_{d1 d2}, expansion is a
    two-sided inverse to realization, and both maps are compatible with
    coefficient scaling.  Returns a report; empty means the lemma holds on
    this instance.
    """
    _require_dictionary(cp)
    report = ValidationReport()
    inst = cp.instance
    grp = inst.group
    basis = cp.hecke_basis

    seen = {}
    for d in cp.group.elements:
        for g in basis[d].support():
            if g in seen:
                report.add(
                    "basis-supports-partition",
                    f"element {g} is in the support of both b_{seen[g]} and b_{d}",
                )
            seen[g] = d
    for g in grp.elements:
        if g not in seen:
            report.add("basis-supports-partition",
                       f"element {g} is in no basis support")

    if basis[0] != inst.unit(cp.level):
        report.add("unit-is-basis-identity", "b at the identity is not the unit")

    for d1 in cp.group.elements:
        for d2 in cp.group.elements:
            via_hecke = convolve(basis[d1], basis[d2], level=cp.level)
            via_cp = cp_to_hecke(cp.basis(d1) * cp.basis(d2))
            if via_hecke != via_cp:
                report.add(
                    "product-dictionary",
                    f"convolution disagrees with the crossed product "
                    f"at ({d1}, {d2})",
                )

    for d in cp.group.elements:
        if hecke_to_cp(cp, basis[d]) != cp.basis(d):
            report.add("expansion-roundtrip",
                       f"expansion of b_{d} is not the basis vector")
    aggregate = cp.zero()
    for d in cp.group.elements:
        aggregate = aggregate + cp.basis(d, cp.field.from_rational(d + 1))
    if hecke_to_cp(cp, cp_to_hecke(aggregate)) != aggregate:
        report.add("expansion-roundtrip",
                   "aggregate element fails the round trip")

    if cp.field.conductor > 1:
        z = cp.field.zeta()
        scaled = z * basis[0]
        if hecke_to_cp(cp, scaled) != cp.basis(0, z):
            report.add("scalar-compatibility",
                       "expansion does not commute with coefficient scaling")

    return report


class LevelEmbedding:
    """The inclusion of a coarser level subalgebra into a finer one.

    Both sides are crossed products over the same instance with nested level
    subgroups (fine inside coarse).  The embedding is determined by the
    images of the coarse basis vectors; map() extends linearly.
    """

    def __init__(self, coarse: CrossedProduct, fine: CrossedProduct):
        _require_dictionary(coarse)
        _require_dictionary(fine)
        if coarse.instance is not fine.instance:
            raise InstanceMismatch("levels belong to different instances")
        if not fine.level.is_subgroup_of(coarse.level):
            raise NotNested(
                "the fine level subgroup must be contained in the coarse one"
            )
        self.coarse = coarse
        self.fine = fine
        self.images = [
            hecke_to_cp(fine, b) for b in coarse.hecke_basis
        ]
        self.unit_image = self.images[0]

    def map(self, x: CPElement) -> CPElement:
        if x.parent is not self.coarse:
            raise InstanceMismatch("element does not live in the coarse algebra")
        out = self.fine.zero()
        for d, r in enumerate(x.coeffs):
            if not r.is_zero():
                out = out + r * self.images[d]
        return out

    def verify(self) -> ValidationReport:
        """Certify multiplicativity, the idempotent unit, and the corner law.

        The corner law states that conjugating the fine algebra by the image
        e of the coarse unit lands exactly on the image of the coarse
        algebra: e A' e = image(A).
        """
        report = ValidationReport()
        coarse, fine = self.coarse, self.fine
        e = self.unit_image

        for d1 in coarse.group.elements:
            for d2 in coarse.group.elements:
                lhs = self.images[d1] * self.images[d2]
                rhs = coarse.w(d1, d2) * self.images[coarse.group.mul(d1, d2)]
                if lhs != rhs:
                    report.add("multiplicative",
                               f"embedding breaks the product at ({d1}, {d2})")

        if e * e != e:
            report.add("unit-idempotent", "image of the coarse unit not idempotent")

        for d in coarse.group.elements:
            img = self.images[d]
            if e * img * e != img:
                report.add("corner-absorbs",
                           f"corner does not absorb the image of b_{d}")

        span = LinearSpan([img.coeffs for img in self.images], fine.field)
        if span.dimension != coarse.dimension:
            report.add("image-independent",
                       "images of the coarse basis are linearly dependent")
        for x in fine.group.elements:
            cornered = e * fine.basis(x) * e
            if cornered.coeffs not in span:
                report.add(
                    "corner-equals-image",
                    f"corner element from fine basis {x} is outside the image",
                )

        return report


def embed_level(coarse: CrossedProduct, fine: CrossedProduct) -> LevelEmbedding:
    return LevelEmbedding(coarse, fine)


# -- averaging splitting ------------------------------------------------------


class TensorElement:
    """An element of A tensor M over the coefficients, M = A^rank.

    Canonical form: one component vector m_d in M per basis direction,
    representing sum_d b_d tensor m_d.  Scalars pass across the tensor sign
    through the inverse coefficient action: r b_d tensor m = b_d tensor
    c_d^-1(r) m.
    """

    __slots__ = ("splitting", "components")

    def __init__(self, splitting: "MaschkeSplitting", components):
        components = tuple(tuple(vec) for vec in components)
        cp = splitting.cp
        if len(components) != cp.dimension:
            raise WorkbenchError("need one component vector per basis direction")
        for vec in components:
            if len(vec) != splitting.rank:
                raise WorkbenchError("component vector has the wrong rank")
            for entry in vec:
                if not isinstance(entry, CPElement) or entry.parent is not cp:
                    raise InstanceMismatch("component entry is foreign")
        self.splitting = splitting
        self.components = components

    def __add__(self, other):
        if not isinstance(other, TensorElement) or other.splitting is not self.splitting:
            return NotImplemented
        return TensorElement(
            self.splitting,
            [
                tuple(a + b for a, b in zip(va, vb))
                for va, vb in zip(self.components, other.components)
            ],
        )

    def __eq__(self, other):
        return (
            isinstance(other, TensorElement)
            and self.splitting is other.splitting
            and self.components == other.components
        )

    def __hash__(self):
        return hash((id(self.splitting), self.components))

    def __repr__(self):
        nonzero = sum(
            1 for vec in self.components for entry in vec if not entry.is_zero()
        )
        return f"TensorElement({nonzero} nonzero entries)"


class MaschkeSplitting:
    """The averaging section of the multiplication map A tensor M -> M.

    M is the free module A^rank.  project realizes multiplication
    p(sum b_d tensor m_d) = sum b_d m_d, and insert is the section
    i(x) = (1/|D|) sum_d b_d tensor b_d^-1 x, which satisfies
    project(insert(x)) = x and is linear over the whole crossed product.
    """

    def __init__(self, cp: CrossedProduct, rank: int = 1):
        if rank < 1:
            raise WorkbenchError("module rank must be at least 1")
        self.cp = cp
        self.rank = rank
        self._binv = [cp.basis_inverse(d) for d in cp.group.elements]
        self._scale = Fraction(1, cp.dimension)

    def module_zero(self):
        return tuple(self.cp.zero() for _ in range(self.rank))

    def module_basis(self):
        """The R-basis of M = A^rank: b_d in each slot."""
        out = []
        for j in range(self.rank):
            for d in self.cp.group.elements:
                vec = [self.cp.zero()] * self.rank
                vec[j] = self.cp.basis(d)
                out.append(tuple(vec))
        return out

    def module_act(self, a: CPElement, x):
        """The action of the algebra on M, slotwise left multiplication."""
        return tuple(a * entry for entry in x)

    def insert(self, x) -> TensorElement:
        """The section i(x) = (1/|D|) sum_d b_d tensor (b_d^-1 x)."""
        x = tuple(x)
        if len(x) != self.rank:
            raise WorkbenchError("module element has the wrong rank")
        components = [
            tuple(self._scale * (binv * entry) for entry in x)
            for binv in self._binv
        ]
        return TensorElement(self, components)

    def project(self, t: TensorElement):
        """The multiplication map p(sum b_d tensor m_d) = sum b_d m_d."""
        if t.splitting is not self:
            raise InstanceMismatch("tensor element belongs to another splitting")
        out = list(self.module_zero())
        for d, vec in enumerate(t.components):
            b = self.cp.basis(d)
            for j, entry in enumerate(vec):
                if not entry.is_zero():
                    out[j] = out[j] + b * entry
        return tuple(out)

    def act(self, a: CPElement, t: TensorElement) -> TensorElement:
        """The algebra action on the tensor side: a (b_d tensor m) moves a b_d
        into canonical form and pushes coefficients across the tensor sign."""
        if t.splitting is not self:
            raise InstanceMismatch("tensor element belongs to another splitting")
        cp = self.cp
        acc = [
            [cp.zero() for _ in range(self.rank)] for _ in cp.group.elements
        ]
        for d, vec in enumerate(t.components):
            if all(entry.is_zero() for entry in vec):
                continue
            moved = a * cp.basis(d)
            for dp, r in enumerate(moved.coeffs):
                if r.is_zero():
                    continue
                passed = cp.c_auts[dp].inverse()(r)
                for j, entry in enumerate(vec):
                    if not entry.is_zero():
                        acc[dp][j] = acc[dp][j] + passed * entry
        return TensorElement(self, [tuple(vec) for vec in acc])


def maschke_section(cp: CrossedProduct, rank: int = 1) -> MaschkeSplitting:
    return MaschkeSplitting(cp, rank)
