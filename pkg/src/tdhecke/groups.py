"""Finite groups, subgroups, homomorphisms, and coefficient data.

Groups are multiplication tables over elements 0..n-1 with 0 the identity.
Everything is validated eagerly: a constructed object is a correct object.
The one deliberate exception is NormalCharacter, whose constructor only
checks shape so that invalid character data can be represented and then
examined with validate_normal_character, which returns a report instead of
raising.
"""

import itertools
import random
from dataclasses import dataclass, field as dataclass_field
from math import gcd, lcm

from .cyclotomic import CycloField, FieldAut, FieldElement
from .errors import (
    BoundsExceeded,
    CompatibilityViolation,
    FieldMismatch,
    InstanceMismatch,
    NotNormal,
    WorkbenchError,
)

MAX_GROUP_ORDER = 256
_FULL_ASSOC_LIMIT = 64
_ASSOC_SAMPLES = 20000


class FiniteGroup:
    """A finite group given by its multiplication table.

    Elements are the integers 0..order-1 and 0 is the identity.  The table
    is validated on construction: identity behaviour, Latin-square property,
    existence of inverses, and associativity (exhaustively up to order 64,
    by seeded random sampling above that).
    """

    def __init__(self, table, name="G", _trusted=False):
        table = tuple(tuple(row) for row in table)
        n = len(table)
        if n == 0:
            raise WorkbenchError("a group needs at least the identity element")
        if n > MAX_GROUP_ORDER:
            raise BoundsExceeded(
                f"group order {n} exceeds the supported bound {MAX_GROUP_ORDER}"
            )
        for g, row in enumerate(table):
            if len(row) != n:
                raise WorkbenchError(f"row {g} has length {len(row)}, expected {n}")
            for h, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < n:
                    raise WorkbenchError(f"table[{g}][{h}] = {v!r} is not an element")
        for g in range(n):
            if table[0][g] != g or table[g][0] != g:
                raise WorkbenchError("element 0 does not act as the identity")
        inv = [None] * n
        for g in range(n):
            if len(set(table[g])) != n or len({table[x][g] for x in range(n)}) != n:
                raise WorkbenchError(f"row or column {g} is not a permutation")
            for h in range(n):
                if table[g][h] == 0:
                    inv[g] = h
        if any(i is None for i in inv):
            raise WorkbenchError("some element has no inverse")
        if not _trusted:
            self._check_associativity(table, n)
        self.table = table
        self.order = n
        self.name = name
        self._inv = tuple(inv)
        self._abelian = None

    @staticmethod
    def _check_associativity(table, n):
        if n <= _FULL_ASSOC_LIMIT:
            rng = range(n)
            triples = itertools.product(rng, rng, rng)
        else:
            rnd = random.Random(0xA55)
            triples = (
                (rnd.randrange(n), rnd.randrange(n), rnd.randrange(n))
                for _ in range(_ASSOC_SAMPLES)
            )
        for a, b, c in triples:
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise WorkbenchError(
                    f"multiplication is not associative at ({a}, {b}, {c})"
                )

    # -- basic operations ---------------------------------------------------

    @property
    def identity(self) -> int:
        return 0

    @property
    def elements(self):
        return range(self.order)

    def __len__(self) -> int:
        return self.order

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.table[self.table[g][x]][self._inv[g]]

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self._inv[g], -k
        out = 0
        while k:
            if k & 1:
                out = self.table[out][g]
            g = self.table[g][g]
            k >>= 1
        return out

    def element_order(self, g: int) -> int:
        order, x = 1, g
        while x != 0:
            x = self.table[x][g]
            order += 1
        return order

    def exponent(self) -> int:
        return lcm(*(self.element_order(g) for g in self.elements))

    def is_abelian(self) -> bool:
        if self._abelian is None:
            t = self.table
            self._abelian = all(
                t[a][b] == t[b][a]
                for a in range(self.order)
                for b in range(a + 1, self.order)
            )
        return self._abelian

    def table_fingerprint(self) -> str:
        import hashlib

        return hashlib.sha256(repr(self.table).encode()).hexdigest()[:16]

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_table(table, name="G") -> "FiniteGroup":
        return FiniteGroup(table, name=name)

    @staticmethod
    def cyclic(n: int, name=None) -> "FiniteGroup":
        if n < 1:
            raise WorkbenchError("cyclic group order must be positive")
        if n > MAX_GROUP_ORDER:
            raise BoundsExceeded(
                f"group order {n} exceeds the supported bound {MAX_GROUP_ORDER}"
            )
        table = [[(a + b) % n for b in range(n)] for a in range(n)]
        return FiniteGroup(table, name=name or f"Z/{n}", _trusted=True)

    @staticmethod
    def direct_product(a: "FiniteGroup", b: "FiniteGroup", name=None) -> "FiniteGroup":
        """Product group on pairs, with (x, y) encoded as x * len(b) + y."""
        n = a.order * b.order
        if n > MAX_GROUP_ORDER:
            raise BoundsExceeded(
                f"group order {n} exceeds the supported bound {MAX_GROUP_ORDER}"
            )
        nb = b.order
        table = [
            [
                a.table[x1][x2] * nb + b.table[y1][y2]
                for x2 in a.elements
                for y2 in b.elements
            ]
            for x1 in a.elements
            for y1 in b.elements
        ]
        return FiniteGroup(table, name=name or f"{a.name}x{b.name}", _trusted=True)

    @staticmethod
    def semidirect(n_grp: "FiniteGroup", h_grp: "FiniteGroup", action, name=None):
        """Semidirect product N x| H for a right-to-left action of H on N.

        `action[h]` is the mapping tuple of an automorphism alpha_h of N, and
        (n1, h1)(n2, h2) = (n1 * alpha_h1(n2), h1 h2).  Pairs are encoded as
        n * len(h_grp) + h, so N embeds as the block of multiples of |H|.
        """
        if len(action) != h_grp.order:
            raise CompatibilityViolation("need one automorphism per element of H")
        maps = [tuple(m) for m in action]
        for h, m in enumerate(maps):
            _require_automorphism(n_grp, m, f"action[{h}]")
        if maps[0] != tuple(n_grp.elements):
            raise CompatibilityViolation("identity of H must act as the identity")
        for h1 in h_grp.elements:
            for h2 in h_grp.elements:
                composed = tuple(maps[h1][maps[h2][x]] for x in n_grp.elements)
                if composed != maps[h_grp.mul(h1, h2)]:
                    raise CompatibilityViolation(
                        f"action is not a homomorphism at ({h1}, {h2})"
                    )
        total = n_grp.order * h_grp.order
        if total > MAX_GROUP_ORDER:
            raise BoundsExceeded(
                f"group order {total} exceeds the supported bound {MAX_GROUP_ORDER}"
            )
        nh = h_grp.order
        table = []
        for n1 in n_grp.elements:
            for h1 in h_grp.elements:
                row = []
                for n2 in n_grp.elements:
                    for h2 in h_grp.elements:
                        row.append(
                            n_grp.mul(n1, maps[h1][n2]) * nh + h_grp.mul(h1, h2)
                        )
                table.append(row)
        return FiniteGroup(table, name=name or f"{n_grp.name}x|{h_grp.name}",
                           _trusted=True)

    @staticmethod
    def symmetric(n: int, name=None) -> "FiniteGroup":
        """Symmetric group on n letters; element 0 is the identity permutation.

        Permutations are numbered in lexicographic order of their mapping
        tuples, and multiplication is composition: (p q)(x) = p(q(x)).
        """
        if n < 1:
            raise WorkbenchError("symmetric group needs at least one letter")
        perms = sorted(itertools.permutations(range(n)))
        if len(perms) > MAX_GROUP_ORDER:
            raise BoundsExceeded(
                f"group order {len(perms)} exceeds the supported bound "
                f"{MAX_GROUP_ORDER}"
            )
        index = {p: i for i, p in enumerate(perms)}
        table = [
            [index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms
        ]
        return FiniteGroup(table, name=name or f"S{n}", _trusted=True)


def _require_automorphism(group: FiniteGroup, mapping, label: str):
    if len(mapping) != group.order or sorted(mapping) != list(group.elements):
        raise CompatibilityViolation(f"{label} is not a permutation of the group")
    if mapping[0] != 0:
        raise CompatibilityViolation(f"{label} does not fix the identity")
    for a in group.elements:
        for b in group.elements:
            if mapping[group.mul(a, b)] != group.mul(mapping[a], mapping[b]):
                raise CompatibilityViolation(
                    f"{label} is not multiplicative at ({a}, {b})"
                )


class Subgroup:
    """A validated subgroup, stored as a frozenset of elements."""

    def __init__(self, group: FiniteGroup, elements):
        elems = frozenset(elements)
        if not elems:
            raise WorkbenchError("a subgroup cannot be empty")
        for x in elems:
            if not isinstance(x, int) or not 0 <= x < group.order:
                raise WorkbenchError(f"{x!r} is not an element of {group.name}")
        if 0 not in elems:
            raise WorkbenchError("subgroup must contain the identity")
        for a in elems:
            if group.inv(a) not in elems:
                raise WorkbenchError(f"subgroup is not closed under inverse at {a}")
            for b in elems:
                if group.mul(a, b) not in elems:
                    raise WorkbenchError(
                        f"subgroup is not closed under product at ({a}, {b})"
                    )
        self.group = group
        self.elements = elems
        self._normal = None

    @staticmethod
    def from_generators(group: FiniteGroup, generators) -> "Subgroup":
        seen = {0}
        frontier = [0]
        gens = [g for g in generators] + [group.inv(g) for g in generators]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = group.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return Subgroup(group, seen)

    @staticmethod
    def trivial(group: FiniteGroup) -> "Subgroup":
        return Subgroup(group, {0})

    @staticmethod
    def full(group: FiniteGroup) -> "Subgroup":
        return Subgroup(group, group.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def sorted_elements(self):
        return tuple(sorted(self.elements))

    def intersection(self, other: "Subgroup") -> "Subgroup":
        self._require_same_group(other)
        return Subgroup(self.group, self.elements & other.elements)

    def product_set(self, other: "Subgroup") -> frozenset:
        self._require_same_group(other)
        g = self.group
        return frozenset(g.mul(a, b) for a in self.elements for b in other.elements)

    def product_with(self, other: "Subgroup") -> "Subgroup":
        """The subgroup generated set-wise as HK; raises if HK is not closed."""
        return Subgroup(self.group, self.product_set(other))

    def conjugate_by(self, g: int) -> "Subgroup":
        grp = self.group
        return Subgroup(grp, {grp.conjugate(g, x) for x in self.elements})

    def is_normal(self) -> bool:
        if self._normal is None:
            grp = self.group
            self._normal = all(
                grp.conjugate(g, x) in self.elements
                for g in grp.elements
                for x in self.elements
            )
        return self._normal

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        self._require_same_group(other)
        return self.elements <= other.elements

    def _require_same_group(self, other: "Subgroup"):
        if self.group is not other.group:
            raise InstanceMismatch("subgroups live in different groups")

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.group is other.group
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((id(self.group), self.elements))

    def __repr__(self):
        return f"Subgroup(order={self.order}, of={self.group.name})"


class GroupHom:
    """A validated homomorphism between finite groups."""

    def __init__(self, src: FiniteGroup, dst: FiniteGroup, mapping, name=""):
        mapping = tuple(mapping)
        if len(mapping) != src.order:
            raise WorkbenchError("mapping length does not match the source order")
        for g, v in enumerate(mapping):
            if not isinstance(v, int) or not 0 <= v < dst.order:
                raise WorkbenchError(f"mapping[{g}] = {v!r} is not in the target")
        if mapping[0] != 0:
            raise WorkbenchError("homomorphism must send identity to identity")
        for a in src.elements:
            for b in src.elements:
                if mapping[src.mul(a, b)] != dst.mul(mapping[a], mapping[b]):
                    raise WorkbenchError(
                        f"mapping is not multiplicative at ({a}, {b})"
                    )
        self.src = src
        self.dst = dst
        self.mapping = mapping
        self.name = name

    @staticmethod
    def identity(group: FiniteGroup) -> "GroupHom":
        return GroupHom(group, group, tuple(group.elements), name="id")

    def __call__(self, g: int) -> int:
        return self.mapping[g]

    def kernel(self) -> Subgroup:
        return Subgroup(self.src, {g for g in self.src.elements if self.mapping[g] == 0})

    def image(self) -> Subgroup:
        return Subgroup(self.dst, set(self.mapping))

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other."""
        if other.dst is not self.src:
            raise InstanceMismatch("homomorphisms do not compose: ranges differ")
        return GroupHom(
            other.src,
            self.dst,
            tuple(self.mapping[other.mapping[g]] for g in other.src.elements),
            name=f"{self.name}*{other.name}",
        )

    def is_bijective(self) -> bool:
        return self.src.order == self.dst.order and len(set(self.mapping)) == self.src.order

    def inverse(self) -> "GroupHom":
        if not self.is_bijective():
            raise WorkbenchError("only a bijective homomorphism can be inverted")
        inv = [0] * self.dst.order
        for g, v in enumerate(self.mapping):
            inv[v] = g
        return GroupHom(self.dst, self.src, tuple(inv), name=f"{self.name}^-1")

    def __eq__(self, other):
        return (
            isinstance(other, GroupHom)
            and self.src is other.src
            and self.dst is other.dst
            and self.mapping == other.mapping
        )

    def __hash__(self):
        return hash((id(self.src), id(self.dst), self.mapping))

    def __repr__(self):
        label = self.name or "hom"
        return f"GroupHom({label}: {self.src.name} -> {self.dst.name})"


def conjugation_aut(group: FiniteGroup, g: int) -> GroupHom:
    """The inner automorphism x -> g x g^-1."""
    return GroupHom(
        group,
        group,
        tuple(group.conjugate(g, x) for x in group.elements),
        name=f"conj[{g}]",
    )


def coset_transversal(group: FiniteGroup, sub: Subgroup):
    """Minimal representatives of the left cosets g*H, ascending.

    The identity coset comes first because its representative is 0.
    """
    if sub.group is not group:
        raise InstanceMismatch("subgroup belongs to a different group")
    rep_of = {}
    for g in group.elements:
        if g in rep_of:
            continue
        coset = sorted(group.mul(g, h) for h in sub.elements)
        rep = coset[0]
        for x in coset:
            rep_of[x] = rep
    return sorted(set(rep_of.values()))


def quotient(group: FiniteGroup, normal: Subgroup):
    """Quotient by a normal subgroup.

    Returns (Q, pr, transversal): the quotient group, the projection
    homomorphism, and the list of minimal coset representatives indexed by
    the elements of Q.  Cosets are numbered by ascending representative, so
    the identity coset is element 0.
    """
    if normal.group is not group:
        raise InstanceMismatch("subgroup belongs to a different group")
    if not normal.is_normal():
        raise NotNormal(f"{normal!r} is not normal in {group.name}")
    reps = coset_transversal(group, normal)
    index_of_rep = {rep: i for i, rep in enumerate(reps)}
    coset_index = [0] * group.order
    for rep in reps:
        for h in normal.elements:
            coset_index[group.mul(rep, h)] = index_of_rep[rep]
    table = [
        [coset_index[group.mul(a, b)] for b in reps]
        for a in reps
    ]
    q = FiniteGroup(table, name=f"{group.name}/{normal.order}", _trusted=True)
    pr = GroupHom(group, q, tuple(coset_index), name="pr")
    return q, pr, list(reps)


def factor_in_product(group: FiniteGroup, left: Subgroup, right: Subgroup, g: int):
    """Write g = a*b with a in `left`, b in `right`; smallest such a wins.

    Raises WorkbenchError when g is outside the product set.
    """
    for a in sorted(left.elements):
        b = group.mul(group.inv(a), g)
        if b in right:
            return a, b
    raise WorkbenchError(f"element {g} is not in the product of the subgroups")


# -- coefficient data -------------------------------------------------------


class RhoAction:
    """An action of a group on the coefficient field by field automorphisms.

    Stored as one Galois exponent per group element; the constructor checks
    that the assignment is a homomorphism into the automorphism group.
    """

    def __init__(self, group: FiniteGroup, field: CycloField, exponents):
        exponents = tuple(int(e) % field.conductor if field.conductor > 1 else 1
                          for e in exponents)
        if len(exponents) != group.order:
            raise CompatibilityViolation(
                "need one Galois exponent per group element"
            )
        m = field.conductor
        for g, e in enumerate(exponents):
            if gcd(e, m) != 1:
                raise CompatibilityViolation(
                    f"exponent {e} at element {g} is not invertible mod {m}"
                )
        if exponents[0] % m != 1 % max(m, 2) and m > 1:
            raise CompatibilityViolation("identity must act as the identity")
        for a in group.elements:
            for b in group.elements:
                if (exponents[a] * exponents[b] - exponents[group.mul(a, b)]) % m:
                    raise CompatibilityViolation(
                        f"coefficient action is not a homomorphism at ({a}, {b})"
                    )
        self.group = group
        self.field = field
        self.exponents = exponents
        self._auts = tuple(field.aut(e) for e in exponents)

    @staticmethod
    def trivial(group: FiniteGroup, field: CycloField) -> "RhoAction":
        return RhoAction(group, field, (1,) * group.order)

    def __call__(self, g: int) -> FieldAut:
        return self._auts[g]

    def is_trivial(self) -> bool:
        return all(a.is_identity() for a in self._auts)

    def trivial_on(self, sub: Subgroup) -> bool:
        return all(self._auts[x].is_identity() for x in sub.elements)

    def __eq__(self, other):
        return (
            isinstance(other, RhoAction)
            and self.group is other.group
            and self.field == other.field
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((id(self.group), self.field, self.exponents))

    def __repr__(self):
        kind = "trivial" if self.is_trivial() else str(self.exponents)
        return f"RhoAction({self.group.name}, exponents={kind})"


class NormalCharacter:
    """Character data on a subgroup: a value in the field for each element.

    Only the shape is checked here (domain matches the subgroup, values live
    in the stated field).  The algebraic laws — normality of the domain,
    multiplicativity, conjugation invariance, compatibility with a
    coefficient action — are checked by validate_normal_character, which
    returns a report rather than raising, so bad data can be inspected.
    """

    def __init__(self, group: FiniteGroup, domain: Subgroup, field: CycloField,
                 values):
        if domain.group is not group:
            raise InstanceMismatch("character domain belongs to a different group")
        values = dict(values)
        if set(values) != domain.elements:
            raise WorkbenchError(
                "character values must be given exactly on the domain subgroup"
            )
        for n, v in values.items():
            if not isinstance(v, FieldElement):
                raise FieldMismatch(f"value at {n} is not a field element")
            if v.field != field:
                raise FieldMismatch(
                    f"value at {n} lives in Q(zeta_{v.field.conductor}), "
                    f"expected Q(zeta_{field.conductor})"
                )
        self.group = group
        self.domain = domain
        self.field = field
        self.values = values

    @staticmethod
    def trivial(group: FiniteGroup, domain: Subgroup, field: CycloField):
        return NormalCharacter(group, domain, field,
                               {n: field.one for n in domain.elements})

    @staticmethod
    def cyclic(group: FiniteGroup, domain: Subgroup, field: CycloField,
               generator: int, root: FieldElement) -> "NormalCharacter":
        """Character on a cyclic domain sending `generator` to `root`.

        Requires the domain to be generated by `generator` and the order of
        `root` to divide the order of the generator, so the assignment is
        well defined.
        """
        if generator not in domain:
            raise WorkbenchError("generator is not in the domain")
        order = group.element_order(generator)
        if Subgroup.from_generators(group, [generator]).elements != domain.elements:
            raise WorkbenchError("domain is not generated by the given element")
        if not (root ** order).is_one():
            raise WorkbenchError(
                f"root^{order} != 1, so the character is not well defined"
            )
        values = {}
        x = 0
        v = field.one
        for _ in range(order):
            values[x] = v
            x = group.mul(x, generator)
            v = v * root
        return NormalCharacter(group, domain, field, values)

    def __call__(self, n: int) -> FieldElement:
        try:
            return self.values[n]
        except KeyError:
            raise WorkbenchError(
                f"element {n} is outside the character's domain"
            ) from None

    def is_trivial(self) -> bool:
        return all(v.is_one() for v in self.values.values())

    def restrict(self, sub: Subgroup) -> "NormalCharacter":
        if not sub.is_subgroup_of(self.domain):
            raise WorkbenchError("can only restrict to a smaller domain")
        return NormalCharacter(self.group, sub, self.field,
                               {n: self.values[n] for n in sub.elements})

    def __repr__(self):
        kind = "trivial" if self.is_trivial() else f"{len(self.values)} values"
        return f"NormalCharacter(domain order {self.domain.order}, {kind})"


@dataclass(frozen=True)
class Violation:
    law: str
    witness: str

    def __str__(self):
        return f"[{self.law}] {self.witness}"


@dataclass
class ValidationReport:
    violations: list = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def laws_broken(self):
        return sorted({v.law for v in self.violations})

    def add(self, law: str, witness: str):
        self.violations.append(Violation(law, witness))

    def summary(self, per_law: int = 5) -> str:
        if self.ok:
            return "ok"
        lines = []
        for law in self.laws_broken():
            hits = [v for v in self.violations if v.law == law]
            for v in hits[:per_law]:
                lines.append(str(v))
            if len(hits) > per_law:
                lines.append(f"[{law}] ... and {len(hits) - per_law} more")
        return "\n".join(lines)


def validate_normal_character(omega: NormalCharacter, rho: RhoAction) -> ValidationReport:
    """Check the compatibility laws between a character and a coefficient action.

    Laws checked, with their report tags:
      - domain-normal: the character's domain is a normal subgroup;
      - values-are-units: every character value is invertible;
      - multiplicative: omega(n n') = omega(n) omega(n') and omega(e) = 1;
      - conjugation-invariant: omega(g n g^-1) = omega(n) for all g;
      - action-fixes-values: rho(g)(omega(n)) = omega(n) for all g;
      - kernel-acts-trivially: rho(n) is the identity for n in the domain.

    Returns a ValidationReport listing every broken law with a witness.
    """
    if omega.group is not rho.group:
        raise InstanceMismatch("character and action live on different groups")
    if omega.field != rho.field:
        raise FieldMismatch("character and action use different coefficient fields")
    group = omega.group
    dom = omega.domain
    report = ValidationReport()

    if not dom.is_normal():
        bad = next(
            (g, x)
            for g in group.elements
            for x in dom.elements
            if group.conjugate(g, x) not in dom
        )
        report.add("domain-normal",
                   f"conjugating {bad[1]} by {bad[0]} leaves the domain")

    units = True
    for n in dom.sorted_elements():
        if omega(n).is_zero():
            report.add("values-are-units", f"omega({n}) = 0 is not a unit")
            units = False

    if units:
        for a in dom.sorted_elements():
            for b in dom.sorted_elements():
                if omega(group.mul(a, b)) != omega(a) * omega(b):
                    report.add(
                        "multiplicative",
                        f"omega({a}*{b}) != omega({a})*omega({b})",
                    )
        if not omega(0).is_one():
            report.add("multiplicative", "omega(identity) != 1")

    if dom.is_normal():
        for g in group.elements:
            for n in dom.sorted_elements():
                if omega(group.conjugate(g, n)) != omega(n):
                    report.add(
                        "conjugation-invariant",
                        f"omega({g}*{n}*{g}^-1) != omega({n})",
                    )

    for g in group.elements:
        act = rho(g)
        if act.is_identity():
            continue
        for n in dom.sorted_elements():
            if act(omega(n)) != omega(n):
                report.add(
                    "action-fixes-values",
                    f"rho({g}) moves omega({n})",
                )

    for n in dom.sorted_elements():
        if not rho(n).is_identity():
            report.add("kernel-acts-trivially", f"rho({n}) is not the identity")

    return report
