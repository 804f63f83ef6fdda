"""Descending level towers of finite quotients and unit twists.

A TowerSpec records the finite quotients E_0 <- E_1 <- ... <- E_depth of a
profinite limit together with the connecting surjections.  All level
bookkeeping happens inside the top group: kernel_at(j) is the kernel of the
composite surjection from the top level down to level j, so the level-j
algebra lives at level subgroup kernel_at(j).

UnitTwist equips an abelian tower with the compatible automorphisms
x -> x^u, one per level, as needed for the twisted Laurent picture.
"""

from math import gcd

from .cyclotomic import CycloField, FieldAut
from .errors import CompatibilityViolation, NotAUnit, WorkbenchError
from .groups import FiniteGroup, GroupHom, Subgroup


class TowerSpec:
    """Levels E_0, ..., E_depth with surjections down[j]: E_{j+1} -> E_j."""

    def __init__(self, levels, downs, name="tower"):
        levels = list(levels)
        downs = list(downs)
        if not levels:
            raise WorkbenchError("a tower needs at least one level")
        if len(downs) != len(levels) - 1:
            raise WorkbenchError(
                f"{len(levels)} levels need {len(levels) - 1} connecting maps, "
                f"got {len(downs)}"
            )
        for j, hom in enumerate(downs):
            if hom.src is not levels[j + 1] or hom.dst is not levels[j]:
                raise CompatibilityViolation(
                    f"connecting map {j} does not go from level {j + 1} "
                    f"to level {j}"
                )
            if hom.image().order != levels[j].order:
                raise CompatibilityViolation(
                    f"connecting map {j} is not surjective"
                )
        self.levels = levels
        self.downs = downs
        self.name = name

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def top(self) -> FiniteGroup:
        return self.levels[-1]

    def level(self, j: int) -> FiniteGroup:
        return self.levels[j]

    def composite(self, j_from: int, j_to: int) -> GroupHom:
        """The composite surjection from level j_from down to level j_to."""
        if not 0 <= j_to <= j_from <= self.depth:
            raise WorkbenchError(
                f"composite needs depth >= j_from >= j_to >= 0, "
                f"got {j_from} -> {j_to}"
            )
        hom = GroupHom.identity(self.levels[j_from])
        for j in range(j_from - 1, j_to - 1, -1):
            hom = self.downs[j].compose(hom)
        return hom

    def kernel_at(self, j: int) -> Subgroup:
        """Kernel of the surjection from the top level down to level j.

        These are the nested level subgroups of the top group:
        kernel_at(depth) is trivial and kernel_at(0) is everything above E_0.
        """
        return self.composite(self.depth, j).kernel()

    def __repr__(self):
        orders = ", ".join(str(g.order) for g in self.levels)
        return f"TowerSpec({self.name}: orders {orders})"


def cyclic_tower(p: int, depth: int, name=None) -> TowerSpec:
    """The tower of cyclic quotients Z/p^0 <- Z/p^1 <- ... <- Z/p^depth."""
    if p < 2:
        raise WorkbenchError("the base of a cyclic tower must be at least 2")
    if depth < 0:
        raise WorkbenchError("depth must be nonnegative")
    levels = [FiniteGroup.cyclic(p ** j) for j in range(depth + 1)]
    downs = [
        GroupHom(
            levels[j + 1],
            levels[j],
            tuple(x % (p ** j) for x in range(p ** (j + 1))),
            name=f"mod p^{j}",
        )
        for j in range(depth)
    ]
    return TowerSpec(levels, downs, name=name or f"Z_{p} tower, depth {depth}")


class UnitTwist:
    """Compatible power automorphisms x -> x^u on every level of a tower.

    Optionally carries a coefficient-field automorphism rho_t applied by the
    distinguished infinite-order generator alongside the group twist.
    """

    def __init__(self, tower: TowerSpec, u: int, level_auts, rho_t=None):
        self.tower = tower
        self.u = u
        self._auts = list(level_auts)
        self.rho_t = rho_t

    def level_aut(self, j: int) -> GroupHom:
        return self._auts[j]

    def coefficient_aut(self, field: CycloField) -> FieldAut:
        """The coefficient twist as an automorphism of the given field."""
        if self.rho_t is None:
            return field.identity_aut()
        if self.rho_t.field != field:
            raise WorkbenchError(
                "configured coefficient twist lives in a different field"
            )
        return self.rho_t

    def __repr__(self):
        extra = "" if self.rho_t is None else ", with coefficient twist"
        return f"UnitTwist(u={self.u} on {self.tower.name}{extra})"


def attach_unit_twist(tower: TowerSpec, u: int, rho_t: FieldAut = None) -> UnitTwist:
    """Equip an abelian tower with the automorphisms x -> x^u.

    Raises NotAUnit when u is not invertible modulo the exponent of some
    level, and CompatibilityViolation when the squares against the
    connecting surjections fail to commute (they always do for power maps,
    but the check keeps hand-built towers honest).
    """
    auts = []
    for j, grp in enumerate(tower.levels):
        if not grp.is_abelian():
            raise WorkbenchError(
                f"level {j} is not abelian; power twists need abelian levels"
            )
        exponent = grp.exponent()
        if gcd(u, exponent) != 1:
            raise NotAUnit(
                f"{u} is not a unit modulo the exponent {exponent} of level {j}"
            )
        auts.append(
            GroupHom(grp, grp, tuple(grp.power(x, u) for x in grp.elements),
                     name=f"pow{u}@{j}")
        )
    for j, down in enumerate(tower.downs):
        lhs = down.compose(auts[j + 1])
        rhs = auts[j].compose(down)
        if lhs.mapping != rhs.mapping:
            raise CompatibilityViolation(
                f"power twist does not commute with the surjection at level {j}"
            )
    return UnitTwist(tower, u, auts, rho_t=rho_t)
