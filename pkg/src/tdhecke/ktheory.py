"""Exact K-theoretic bookkeeping for level algebras.

Pipeline, all over exact cyclotomic arithmetic:

  * certify_semisimple: nondegeneracy of the trace form of a level crossed
    product (closed form when the coefficient action is trivial, restriction
    of scalars to the rationals otherwise);
  * block_decompose: the central idempotents of a split semisimple level
    algebra, found by refining along the center with exactly-verified
    Lagrange idempotents; every block is certified to be a full matrix
    algebra over the coefficient field, or NonSplitBlock is raised with a
    conductor suggestion;
  * k0_class: the class of an idempotent (element or matrix) in the free
    abelian group on the blocks;
  * induced_k0 / aut_k0: the maps on those groups induced by a level
    embedding and by an algebra automorphism, with Smith-form certificates
    of split injectivity;
  * build_level_stack / colim_k0 / wang_assemble: the filtration of a
    compact-by-Z group by finite levels, the truncated colimit of the
    K-groups, and the Wang boundary data (cokernel of id - K0(phi^-1)).

Integer matrix work (Smith normal form, unimodular certificates) is done on
plain Python ints; semisimple algebra work reuses the exact field tools.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Optional

from .crossed import CPElement, CrossedProduct, LevelEmbedding, build_level
from .cyclotomic import CycloField, FieldElement, cyclo_field
from .errors import (
    BoundsExceeded,
    CompatibilityViolation,
    InstanceMismatch,
    NonSplitBlock,
    NotAUnit,
    NotIdempotent,
    NotNested,
    NotPermutation,
    WellDefinednessFailure,
    WorkbenchError,
)
from .linalg import EchelonTracker, det_bareiss, nullspace, rank_bareiss

_RATIONAL_ROOT_LIMIT = 10 ** 9


# ---------------------------------------------------------------------------
# integer matrices and Smith normal form
# ---------------------------------------------------------------------------


def matrix_identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matrix_product(a, b):
    if not a or not b:
        return []
    inner = len(b)
    if any(len(row) != inner for row in a):
        raise WorkbenchError("matrix shapes do not compose")
    cols = len(b[0])
    return [
        [sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for row in a
    ]


def matrix_equal(a, b) -> bool:
    return len(a) == len(b) and all(ra == rb for ra, rb in zip(a, b))


def matrix_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


@dataclass
class SmithForm:
    """s = diagonal form with u * s * v == source and u, v unimodular."""

    source: list
    s: list
    u: list
    v: list
    u_inv: list
    v_inv: list
    diagonal: list
    rank: int

    @property
    def invariant_factors(self):
        return [d for d in self.diagonal if d]

    def to_dict(self):
        return {
            "diagonal": list(self.diagonal),
            "rank": self.rank,
            "invariant_factors": self.invariant_factors,
        }


def smith_normal_form(matrix) -> SmithForm:
    """Diagonalize an integer matrix with tracked unimodular factors.

    Returns SmithForm with source == u * s * v, u * u_inv == id,
    v * v_inv == id, and the diagonal entries nonnegative with each dividing
    the next.  The factorization is re-verified before returning.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if any(len(r) != cols for r in matrix):
        raise WorkbenchError("ragged integer matrix")
    src = [[int(x) for x in r] for r in matrix]
    s = [list(r) for r in src]
    u = matrix_identity(rows)
    u_inv = matrix_identity(rows)
    v = matrix_identity(cols)
    v_inv = matrix_identity(cols)

    def row_swap(i, j):
        s[i], s[j] = s[j], s[i]
        for r in u:
            r[i], r[j] = r[j], r[i]
        u_inv[i], u_inv[j] = u_inv[j], u_inv[i]

    def col_swap(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        v[i], v[j] = v[j], v[i]
        for r in v_inv:
            r[i], r[j] = r[j], r[i]

    def row_add(i, j, q):
        # row_i += q * row_j on s
        s[i] = [a + q * b for a, b in zip(s[i], s[j])]
        for r in u:
            r[j] -= q * r[i]
        u_inv[i] = [a + q * b for a, b in zip(u_inv[i], u_inv[j])]

    def col_add(j, i, q):
        # col_j += q * col_i on s
        for r in s:
            r[j] += q * r[i]
        v[i] = [a - q * b for a, b in zip(v[i], v[j])]
        for r in v_inv:
            r[j] += q * r[i]

    def row_negate(i):
        s[i] = [-a for a in s[i]]
        for r in u:
            r[i] = -r[i]
        u_inv[i] = [-a for a in u_inv[i]]

    def pick_pivot(t):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                a = s[i][j]
                if a and (best is None or abs(a) < abs(best[0])):
                    best = (a, i, j)
        return best

    t = 0
    limit = min(rows, cols)
    while t < limit:
        best = pick_pivot(t)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        if s[t][t] < 0:
            row_negate(t)
        while True:
            pivot = s[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if s[i][t]:
                    q = s[i][t] // pivot
                    if q:
                        row_add(i, t, -q)
                    if s[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if s[t][j]:
                    q = s[t][j] // pivot
                    if q:
                        col_add(j, t, -q)
                    if s[t][j]:
                        dirty = True
            if dirty:
                _, pi, pj = pick_pivot(t)
                if pi != t:
                    row_swap(t, pi)
                if pj != t:
                    col_swap(t, pj)
                if s[t][t] < 0:
                    row_negate(t)
                continue
            offender = None
            for i in range(t + 1, rows):
                if any(s[i][j] % pivot for j in range(t + 1, cols)):
                    offender = i
                    break
            if offender is None:
                break
            row_add(t, offender, 1)
        t += 1

    diagonal = [s[i][i] for i in range(limit)]
    rank = sum(1 for d in diagonal if d)
    if not matrix_equal(matrix_product(matrix_product(u, s), v), src):
        raise WorkbenchError("internal: diagonal factorization does not multiply back")
    if rows and not matrix_equal(matrix_product(u, u_inv), matrix_identity(rows)):
        raise WorkbenchError("internal: row transform inverse is wrong")
    if cols and not matrix_equal(matrix_product(v, v_inv), matrix_identity(cols)):
        raise WorkbenchError("internal: column transform inverse is wrong")
    for i in range(rank - 1):
        if diagonal[i + 1] % diagonal[i]:
            raise WorkbenchError("internal: divisibility chain broken")
    return SmithForm(src, s, u, v, u_inv, v_inv, diagonal, rank)


def split_left_inverse(smith: SmithForm):
    """Integer left inverse of the source matrix, or None.

    Exists exactly when the diagonal is all ones through the full column
    count (split injectivity over the integers); verified by multiplying
    back before returning.
    """
    rows = len(smith.source)
    cols = len(smith.source[0]) if rows else 0
    if smith.rank < cols or any(d != 1 for d in smith.invariant_factors):
        return None
    selector = [[1 if i == j else 0 for j in range(rows)] for i in range(cols)]
    left = matrix_product(smith.v_inv, matrix_product(selector, smith.u_inv))
    if not matrix_equal(matrix_product(left, smith.source), matrix_identity(cols)):
        raise WorkbenchError("internal: certified left inverse failed to verify")
    return left


# ---------------------------------------------------------------------------
# semisimplicity certificate
# ---------------------------------------------------------------------------


@dataclass
class SemisimplicityCertificate:
    algebra: str
    dimension: int
    method: str
    determinant: object  # FieldElement (trivial action) or Fraction
    ok: bool

    def to_dict(self):
        det = self.determinant
        det_str = str(det.rational_value() if isinstance(det, FieldElement)
                      and det.is_rational() else det)
        return {
            "algebra": self.algebra,
            "dimension": self.dimension,
            "method": self.method,
            "trace_form_determinant": det_str,
            "nondegenerate": self.ok,
        }


def certify_semisimple(cp: CrossedProduct) -> SemisimplicityCertificate:
    """Nondegeneracy of the trace form T(x, y) = tr(L_x L_y).

    With a trivial coefficient action left multiplication is linear and
    tr(L_{b_k}) = dim * [k == identity], so the Gram matrix in the basis is
    the monomial matrix dim * w(i, i^-1) along the inversion permutation and
    the determinant has a closed form.  Otherwise the algebra is restricted
    to scalars in the rationals (bounded size) and the determinant is
    computed exactly.
    """
    field = cp.field
    n = cp.dimension
    grp = cp.group
    if cp.action_is_trivial():
        fixed = sum(1 for d in grp.elements if grp.inv(d) == d)
        sign = -1 if ((n - fixed) // 2) % 2 else 1
        det = field.from_rational(Fraction(sign))
        scale = field.from_rational(Fraction(n))
        for d in grp.elements:
            det = det * scale * cp.w(d, grp.inv(d))
        return SemisimplicityCertificate(cp.name, n, "closed-form", det,
                                         not det.is_zero())
    deg = field.degree
    dim = n * deg
    if dim > 64:
        raise BoundsExceeded(
            f"rational restriction of a {dim}-dimensional algebra is out of "
            f"the supported range (64)"
        )
    unit_vecs = [
        field.element([0] * k + [1] + [0] * (deg - 1 - k)) for k in range(deg)
    ]
    basis = [cp.basis(d, coeff=vec) for d in grp.elements for vec in unit_vecs]

    def flat(x):
        out = []
        for c in x.coeffs:
            out.extend(c.coeffs)
        return out

    def trace(gamma):
        total = Fraction(0)
        for r, beta in enumerate(basis):
            total += flat(gamma * beta)[r]
        return total

    rat = cyclo_field(1)
    gram = [
        [rat.from_rational(trace(bp * bq)) for bq in basis]
        for bp in basis
    ]
    det = det_bareiss(gram, rat)
    return SemisimplicityCertificate(cp.name, dim, "rational-restriction",
                                     det.rational_value(),
                                     not det.is_zero())


# ---------------------------------------------------------------------------
# block decomposition
# ---------------------------------------------------------------------------


def suggested_conductor(cp: CrossedProduct) -> Optional[int]:
    """A coefficient conductor that should split every block.

    Least common multiple of the current conductor and the group exponent
    times the orders of the twisting values; None when some twisting value
    is not a root of unity.
    """
    orders = [1]
    for d1 in cp.group.elements:
        for d2 in cp.group.elements:
            val = cp.w(d1, d2)
            if val.is_one():
                continue
            order = val.multiplicative_order()
            if order is None:
                return None
            orders.append(order)
    w_order = 1
    for o in orders:
        w_order = w_order * o // gcd(w_order, o)
    target = cp.group.exponent() * w_order
    return cp.field.conductor * target // gcd(cp.field.conductor, target)


def _coeff_vec(x: CPElement):
    return list(x.coeffs)


def _center_basis(cp: CrossedProduct):
    """A deterministic basis of the center, as algebra elements."""
    if cp.is_commutative():
        return [cp.basis(d) for d in cp.group.elements]
    n = cp.dimension
    grp = cp.group
    field = cp.field
    rows = []
    for g in grp.elements:
        for tau in grp.elements:
            row = [field.zero] * n
            touched = False
            for d in grp.elements:
                if grp.mul(d, g) == tau:
                    row[d] = row[d] + cp.w(d, g)
                    touched = True
                if grp.mul(g, d) == tau:
                    row[d] = row[d] - cp.w(g, d)
                    touched = True
            if touched and any(not c.is_zero() for c in row):
                rows.append(row)
    vecs = nullspace(rows, n, field)
    return [cp.element(vec) for vec in vecs]


def _corner_min_poly(cp: CrossedProduct, u: CPElement, e: CPElement):
    """Minimal polynomial of u inside the corner with unit e.

    Coefficients ascending, monic; x^0 is interpreted as e.
    """
    field = cp.field
    tracker = EchelonTracker(field)
    tracker.add(_coeff_vec(e))
    power = e
    while True:
        power = power * u
        dep = tracker.add(_coeff_vec(power))
        if dep is not None:
            k = tracker.count - 1
            coeffs = [field.zero] * k + [field.one]
            for i, c in dep.items():
                coeffs[i] = coeffs[i] - c
            return coeffs
        if tracker.count > cp.dimension + 1:
            raise WorkbenchError("internal: minimal polynomial did not terminate")


def _poly_eval(poly, x: FieldElement, field: CycloField) -> FieldElement:
    acc = field.zero
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def _synthetic_div(poly, lam: FieldElement, field: CycloField):
    """Quotient coefficients of poly / (x - lam); remainder must vanish."""
    k = len(poly) - 1
    q = [field.zero] * k
    q[k - 1] = poly[k]
    for j in range(k - 1, 0, -1):
        q[j - 1] = poly[j] + lam * q[j]
    rem = poly[0] + lam * q[0]
    if not rem.is_zero():
        raise WorkbenchError("internal: claimed root is not a root")
    return q


def _divisors(n: int):
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _rational_root_candidates(poly):
    """Rational candidates for roots of a monic polynomial, when all of its
    coefficients are rational (empty list otherwise)."""
    if any(not c.is_rational() for c in poly):
        return []
    coeffs = [c.rational_value() for c in poly]
    shift = 0
    while shift < len(coeffs) - 1 and coeffs[shift] == 0:
        shift += 1
    reduced = coeffs[shift:]
    cands = [Fraction(0)] if shift else []
    lead_den = 1
    for c in reduced:
        lead_den = lead_den * c.denominator // gcd(lead_den, c.denominator)
    ints = [int(c * lead_den) for c in reduced]
    const = ints[0]
    lead = ints[-1]
    if const == 0 or abs(const) > _RATIONAL_ROOT_LIMIT:
        return cands
    for p in _divisors(const):
        for q in _divisors(lead):
            cands.append(Fraction(p, q))
            cands.append(Fraction(-p, q))
    return cands


def _find_roots(poly, field: CycloField):
    """Distinct roots of poly found among the candidate scalars.

    Candidates: the roots of unity of the field, rational candidates from
    the coefficients, and their pairwise products.  May find fewer roots
    than the degree; the caller treats the rest as unsplittable.
    """
    units = field.roots_of_unity()
    rationals = _rational_root_candidates(poly)
    candidates = {}
    for r in units:
        candidates[r] = None
    for q in rationals:
        candidates[field.from_rational(q)] = None
        for r in units:
            candidates[field.from_rational(q) * r] = None
    roots = []
    for cand in candidates:
        if _poly_eval(poly, cand, field).is_zero():
            roots.append(cand)
    return roots


def _split_idempotent(cp: CrossedProduct, z: CPElement, e: CPElement):
    """Refine the central idempotent e along the central element z.

    Splits off one verified Lagrange idempotent per simple eigenvalue of
    z e found in the coefficient field; whatever does not split stays as a
    single remainder piece.
    """
    u = z * e
    poly = _corner_min_poly(cp, u, e)
    k = len(poly) - 1
    if k <= 1:
        return [e]
    roots = _find_roots(poly, cp.field)
    if not roots:
        return [e]
    powers = [e]
    for _ in range(k - 1):
        powers.append(powers[-1] * u)
    deriv = poly[1:]
    for j, c in enumerate(deriv[1:], start=1):
        deriv[j] = c * cp.field.from_rational(Fraction(j + 1))
    pieces = []
    used = cp.zero()
    for lam in roots:
        denom = _poly_eval(deriv, lam, cp.field)
        if denom.is_zero():
            raise WorkbenchError(
                "central element has a repeated eigenvalue; the algebra "
                "is not semisimple"
            )
        quotient = _synthetic_div(poly, lam, cp.field)
        scale = denom.inverse()
        piece = cp.zero()
        for j, c in enumerate(quotient):
            if not c.is_zero():
                piece = piece + (c * scale) * powers[j]
        if (piece * piece) != piece:
            raise WorkbenchError("internal: eigenprojection is not idempotent")
        pieces.append(piece)
        used = used + piece
    rest = e - used
    if not rest.is_zero():
        if (rest * rest) != rest:
            raise WorkbenchError("internal: residual projection is not idempotent")
        pieces.append(rest)
    if len(pieces) <= 1:
        return [e]
    return pieces


@dataclass
class Block:
    """One simple factor of a level algebra: a matrix algebra over the
    coefficient field, located by its central idempotent."""

    index: int
    idempotent: CPElement
    dimension: int
    matrix_size: int
    fingerprint: tuple
    character: Optional[tuple]

    def to_dict(self):
        return {
            "index": self.index,
            "dimension": self.dimension,
            "matrix_size": self.matrix_size,
        }


class BlockDecomposition:
    """The verified block structure of a split semisimple level algebra."""

    def __init__(self, cp: CrossedProduct, blocks, center_dim: int,
                 certificate: SemisimplicityCertificate):
        self.cp = cp
        self.blocks = list(blocks)
        self.center_dim = center_dim
        self.certificate = certificate

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def units(self):
        return [b.idempotent for b in self.blocks]

    def all_rank_one(self) -> bool:
        return all(b.matrix_size == 1 for b in self.blocks)

    def to_dict(self):
        return {
            "algebra": self.cp.name,
            "block_count": self.block_count,
            "blocks": [b.to_dict() for b in self.blocks],
            "semisimplicity": self.certificate.to_dict(),
        }

    def __repr__(self):
        shape = " + ".join(f"M{b.matrix_size}" for b in self.blocks)
        return f"BlockDecomposition({self.cp.name}: {shape})"


def _block_fingerprint(cp, center, e):
    """Deterministic sort key: for each center basis element, the serialized
    coefficients of its minimal polynomial in the corner at e."""
    fp = []
    for z in center:
        poly = _corner_min_poly(cp, z * e, e)
        fp.append(tuple(tuple(c.to_strings()) for c in poly))
    return tuple(fp)


def _block_character(cp, e):
    """For a one-dimensional block F e: the scalar b_d e = chi(d) e."""
    pivot = next(d for d, c in enumerate(e.coeffs) if not c.is_zero())
    inv = e.coeffs[pivot].inverse()
    chi = []
    for d in cp.group.elements:
        prod = cp.basis(d) * e
        val = prod.coeffs[pivot] * inv
        if (val * e) != prod:
            raise WorkbenchError("internal: one-dimensional block is not scalar")
        chi.append(val)
    return tuple(chi)


def block_decompose(cp: CrossedProduct) -> BlockDecomposition:
    """Decompose a level algebra into verified simple blocks.

    Requires a trivial coefficient action (so that the algebra is linear
    over its coefficient field).  Raises NonSplitBlock, with a suggested
    larger conductor, when some block is not a matrix algebra over the
    field itself.
    """
    if not cp.action_is_trivial():
        raise WorkbenchError(
            "block decomposition needs a trivial coefficient action at this "
            "level; restrict scalars before decomposing"
        )
    certificate = certify_semisimple(cp)
    if not certificate.ok:
        raise WorkbenchError(
            "the trace form is degenerate, so the level algebra is not "
            "semisimple and has no block decomposition"
        )
    center = _center_basis(cp)
    idempotents = [cp.one()]
    changed = True
    while changed:
        changed = False
        for z in center:
            refined = []
            for e in idempotents:
                pieces = _split_idempotent(cp, z, e)
                if len(pieces) > 1:
                    changed = True
                refined.extend(pieces)
            idempotents = refined

    total = cp.zero()
    for e in idempotents:
        total = total + e
    if not total.is_one():
        raise WorkbenchError("internal: block units do not sum to the unit")
    for i, ei in enumerate(idempotents):
        for ej in idempotents[i + 1:]:
            if not (ei * ej).is_zero() or not (ej * ei).is_zero():
                raise WorkbenchError("internal: block units are not orthogonal")
        for d in cp.group.elements:
            bd = cp.basis(d)
            if (bd * ei) != (ei * bd):
                raise WorkbenchError("internal: block unit is not central")

    hint = suggested_conductor(cp)
    records = []
    for e in idempotents:
        span = EchelonTracker(cp.field)
        for d in cp.group.elements:
            span.add(_coeff_vec(cp.basis(d) * e))
        dim = span.dimension
        ztracker = EchelonTracker(cp.field)
        for z in center:
            ztracker.add(_coeff_vec(z * e))
        if ztracker.dimension != 1:
            raise NonSplitBlock(
                f"a block of {cp.name} has a {ztracker.dimension}-dimensional "
                f"center over the coefficient field; enlarging the conductor "
                f"to {hint} should split it",
                suggested_conductor=hint,
            )
        size = isqrt(dim)
        if size * size != dim:
            raise NonSplitBlock(
                f"a block of {cp.name} has dimension {dim}, which is not a "
                f"perfect square over the coefficient field; enlarging the "
                f"conductor to {hint} should split it",
                suggested_conductor=hint,
            )
        character = _block_character(cp, e) if dim == 1 else None
        records.append((dim, _block_fingerprint(cp, center, e), e, size,
                        character))
    records.sort(key=lambda rec: (rec[0], rec[1]))
    blocks = [
        Block(i, e, dim, size, fp, character)
        for i, (dim, fp, e, size, character) in enumerate(records)
    ]
    return BlockDecomposition(cp, blocks, len(center), certificate)


# ---------------------------------------------------------------------------
# K0 classes and induced maps
# ---------------------------------------------------------------------------


def _as_idempotent_matrix(cp: CrossedProduct, x):
    if isinstance(x, CPElement):
        mat = [[x]]
    else:
        mat = [list(row) for row in x]
        if not mat or any(len(row) != len(mat) for row in mat):
            raise WorkbenchError("idempotent matrices must be square")
    for row in mat:
        for entry in row:
            if not isinstance(entry, CPElement) or entry.parent is not cp:
                raise InstanceMismatch(
                    "matrix entry does not live in the decomposed algebra"
                )
    m = len(mat)
    square = [
        [sum((mat[i][k] * mat[k][j] for k in range(m)), cp.zero())
         for j in range(m)]
        for i in range(m)
    ]
    if square != mat:
        raise NotIdempotent("the given element/matrix is not idempotent")
    return mat


def k0_class(decomp: BlockDecomposition, x) -> tuple:
    """The class of an idempotent in the free abelian group on the blocks.

    Component at a block: the rank of left multiplication on that block's
    column space, divided by the block's matrix size.  When every block is
    one-dimensional the classes come from evaluating the block characters,
    which is exact and fast.
    """
    cp = decomp.cp
    mat = _as_idempotent_matrix(cp, x)
    m = len(mat)
    field = cp.field
    if decomp.all_rank_one():
        out = []
        for block in decomp.blocks:
            chi = block.character
            fmat = [
                [
                    sum((entry.coeffs[d] * chi[d]
                         for d in cp.group.elements
                         if not entry.coeffs[d].is_zero()), field.zero)
                    for entry in row
                ]
                for row in mat
            ]
            out.append(rank_bareiss(fmat, field))
        return tuple(out)
    out = []
    for block in decomp.blocks:
        z = block.idempotent
        column_basis = []
        tracker = EchelonTracker(field)
        for d in cp.group.elements:
            vec = cp.basis(d) * z
            if tracker.add(_coeff_vec(vec)) is None:
                column_basis.append(vec)
        image = EchelonTracker(field)
        rank = 0
        for j in range(m):
            for vec in column_basis:
                flat = []
                for i in range(m):
                    flat.extend((mat[i][j] * vec).coeffs)
                if image.add(flat) is None:
                    rank += 1
        if rank % block.matrix_size:
            raise WorkbenchError(
                "internal: image rank is not a multiple of the matrix size"
            )
        out.append(rank // block.matrix_size)
    return tuple(out)


@dataclass
class K0Map:
    """An integer matrix on block bases with its Smith-form certificates."""

    matrix: list
    smith: SmithForm
    left_inverse: Optional[list]

    @property
    def is_split_injective(self) -> bool:
        return self.left_inverse is not None

    def apply(self, vec):
        return [sum(row[j] * vec[j] for j in range(len(vec)))
                for row in self.matrix]

    def to_dict(self):
        return {
            "matrix": [list(r) for r in self.matrix],
            "smith": self.smith.to_dict(),
            "split_injective": self.is_split_injective,
            "left_inverse": self.left_inverse,
        }


def induced_k0(embedding: LevelEmbedding, coarse: BlockDecomposition,
               fine: BlockDecomposition) -> K0Map:
    """The map on K0 induced by a corner embedding of level algebras.

    Columns are the classes of the images of the coarse block units.  The
    Smith form certifies split injectivity with an explicit integer left
    inverse whenever all invariant factors are one.
    """
    if embedding.coarse is not coarse.cp or embedding.fine is not fine.cp:
        raise InstanceMismatch(
            "decompositions do not match the embedding's algebras"
        )
    cols = []
    for i, block in enumerate(coarse.blocks):
        if block.matrix_size != 1:
            raise WorkbenchError(
                "induced K0 maps need one-dimensional coarse blocks (the "
                "block unit is then a rank-one generator)"
            )
        expected = tuple(1 if j == i else 0 for j in range(coarse.block_count))
        if k0_class(coarse, block.idempotent) != expected:
            raise WorkbenchError("internal: block unit is not a basis generator")
        cols.append(k0_class(fine, embedding.map(block.idempotent)))
    rows = fine.block_count
    matrix = [[cols[c][r] for c in range(len(cols))] for r in range(rows)]
    smith = smith_normal_form(matrix)
    return K0Map(matrix, smith, split_left_inverse(smith))


@dataclass
class AutK0:
    """The permutation action of an algebra automorphism on the blocks."""

    permutation: tuple
    matrix: list

    @property
    def orbit_count(self) -> int:
        seen = [False] * len(self.permutation)
        count = 0
        for start in range(len(self.permutation)):
            if seen[start]:
                continue
            count += 1
            x = start
            while not seen[x]:
                seen[x] = True
                x = self.permutation[x]
        return count

    def orbits(self):
        seen = [False] * len(self.permutation)
        out = []
        for start in range(len(self.permutation)):
            if seen[start]:
                continue
            orb = []
            x = start
            while not seen[x]:
                seen[x] = True
                orb.append(x)
                x = self.permutation[x]
            out.append(tuple(sorted(orb)))
        return out


def aut_k0(decomp: BlockDecomposition, auto) -> AutK0:
    """How an algebra automorphism permutes the block units.

    Raises NotPermutation when some block unit is not carried onto another
    block unit (then the map does not act on this basis).
    """
    cp = decomp.cp
    units = [b.idempotent for b in decomp.blocks]
    perm = []
    for i, unit in enumerate(units):
        image = auto.on_cp(cp, unit)
        j = next((k for k, other in enumerate(units) if other == image), None)
        if j is None:
            raise NotPermutation(
                f"the automorphism does not carry block unit {i} onto a "
                f"block unit"
            )
        perm.append(j)
    if len(set(perm)) != len(perm):
        raise NotPermutation("the automorphism collapses two block units")
    n = len(perm)
    matrix = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        matrix[j][i] = 1
    return AutK0(tuple(perm), matrix)


# ---------------------------------------------------------------------------
# orbit oracle
# ---------------------------------------------------------------------------


def unit_action_orbits(modulus: int, u: int):
    """Orbits of multiplication by a unit on the integers mod modulus.

    Brute force; used as an independent check of the block-orbit counts.
    """
    if modulus < 1:
        raise WorkbenchError("modulus must be positive")
    if gcd(u, modulus) != 1:
        raise NotAUnit(f"{u} is not a unit mod {modulus}")
    seen = [False] * modulus
    orbits = []
    for a in range(modulus):
        if seen[a]:
            continue
        orb = []
        x = a
        while not seen[x]:
            seen[x] = True
            orb.append(x)
            x = (u * x) % modulus
        orbits.append(tuple(sorted(orb)))
    return orbits


def unit_action_orbit_count(modulus: int, u: int) -> int:
    return len(unit_action_orbits(modulus, u))


# ---------------------------------------------------------------------------
# level stacks, colimits, and the boundary assembly
# ---------------------------------------------------------------------------


@dataclass
class LevelAlgebra:
    index: int
    level: object  # Subgroup
    cp: CrossedProduct
    decomposition: BlockDecomposition


class LevelStack:
    """A descending chain of levels of one instance, with all K0 data.

    levels[0] is the coarsest (largest subgroup, smallest algebra); each
    embedding and induced map goes from index j to j + 1.
    """

    def __init__(self, instance, levels, auto=None):
        levels = list(levels)
        if not levels:
            raise WorkbenchError("a level stack needs at least one level")
        for j in range(len(levels) - 1):
            if not (levels[j + 1].elements <= levels[j].elements):
                raise NotNested(
                    f"level {j + 1} is not contained in level {j}"
                )
        if auto is not None:
            if auto.instance is not instance:
                raise InstanceMismatch(
                    "automorphism acts on a different instance"
                )
            for j, lev in enumerate(levels):
                if {auto.grp_aut(k) for k in lev.elements} != lev.elements:
                    raise CompatibilityViolation(
                        f"automorphism does not preserve level {j}"
                    )
        self.instance = instance
        self.auto = auto
        self.levels = []
        for j, lev in enumerate(levels):
            cp = build_level(instance, lev)
            self.levels.append(LevelAlgebra(j, lev, cp, block_decompose(cp)))
        self.embeddings = []
        self.maps = []
        for j in range(len(levels) - 1):
            emb = LevelEmbedding(self.levels[j].cp, self.levels[j + 1].cp)
            report = emb.verify()
            if not report.ok:
                raise WellDefinednessFailure(
                    "level embedding failed verification: " + report.summary()
                )
            self.embeddings.append(emb)
            self.maps.append(induced_k0(emb, self.levels[j].decomposition,
                                        self.levels[j + 1].decomposition))

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def block_counts(self):
        return [la.decomposition.block_count for la in self.levels]


def build_level_stack(instance, levels, auto=None) -> LevelStack:
    return LevelStack(instance, levels, auto)


@dataclass
class ColimitPresentation:
    """The truncated colimit of the level K0 groups along split injections."""

    level_ranks: list
    coker_ranks: list
    all_split: bool
    torsion_free: bool
    summands: list
    description: str

    def to_dict(self):
        return {
            "level_ranks": list(self.level_ranks),
            "cokernel_ranks": list(self.coker_ranks),
            "all_split_injective": self.all_split,
            "torsion_free": self.torsion_free,
            "presentation": self.description,
        }


def colim_k0(stack: LevelStack) -> ColimitPresentation:
    """Present the top K0 as the base summand plus one free cokernel per
    connecting map, certified by the Smith forms of the induced maps."""
    ranks = stack.block_counts()
    cokers = []
    all_split = True
    torsion_free = True
    for j, k0map in enumerate(stack.maps):
        rows = len(k0map.matrix)
        cols = len(k0map.matrix[0]) if k0map.matrix else 0
        split = k0map.is_split_injective
        all_split = all_split and split
        if any(d not in (0, 1) for d in k0map.smith.diagonal):
            torsion_free = False
        coker = rows - k0map.smith.rank
        if split and coker != ranks[j + 1] - ranks[j]:
            raise WorkbenchError("internal: cokernel rank bookkeeping is off")
        cokers.append(coker)
    summands = [ranks[0]] + cokers
    description = " + ".join(f"Z^{r}" for r in summands)
    return ColimitPresentation(ranks, cokers, all_split, torsion_free,
                               summands, description)


@dataclass
class WangLevel:
    index: int
    block_count: int
    k0_rank: int
    boundary_rank: int
    torsion_free: bool
    permutation: tuple
    orbits: list

    def to_dict(self):
        return {
            "level": self.index,
            "block_count": self.block_count,
            "k0_rank": self.k0_rank,
            "boundary_rank": self.boundary_rank,
            "torsion_free": self.torsion_free,
            "block_orbits": [list(o) for o in self.orbits],
        }


@dataclass
class WangResult:
    levels: list
    stabilization: list
    negative_k: dict

    def top(self) -> WangLevel:
        return self.levels[-1]

    def to_dict(self):
        return {
            "levels": [w.to_dict() for w in self.levels],
            "embedding_compatible": list(self.stabilization),
            "negative_k": dict(self.negative_k),
        }


def wang_assemble(stack: LevelStack) -> WangResult:
    """K0 of the big algebra, one truncation per level, via the boundary
    sequence of the distinguished automorphism.

    At each level the group is the cokernel of id - K0(phi^-1) on the block
    basis; since the action permutes blocks the cokernel is free of rank the
    number of orbits, and the Smith form certifies the absence of torsion.
    The negative-K record states the vanishing that closes the sequence,
    justified by the per-level semisimplicity certificates.
    """
    if stack.auto is None:
        raise WorkbenchError("the level stack carries no automorphism")
    inverse = stack.auto.inverse()
    per_level = []
    actions = []
    for la in stack.levels:
        action = aut_k0(la.decomposition, inverse)
        actions.append(action)
        n = la.decomposition.block_count
        boundary = matrix_sub(matrix_identity(n), action.matrix)
        smith = smith_normal_form(boundary)
        k0_rank = n - smith.rank
        torsion_free = all(d == 1 for d in smith.invariant_factors)
        if k0_rank != action.orbit_count:
            raise WorkbenchError(
                "internal: cokernel rank disagrees with the orbit count"
            )
        per_level.append(WangLevel(la.index, n, k0_rank, smith.rank,
                                   torsion_free, action.permutation,
                                   action.orbits()))
    stabilization = []
    for j, k0map in enumerate(stack.maps):
        lhs = matrix_product(actions[j + 1].matrix, k0map.matrix)
        rhs = matrix_product(k0map.matrix, actions[j].matrix)
        stabilization.append(matrix_equal(lhs, rhs))
    negative_k = {
        "claim": "K_n vanishes for every n <= -1",
        "value": 0,
        "reason": (
            "every level algebra carries a nondegenerate trace form "
            "(certificates below), hence is semisimple and in particular "
            "regular; negative K-groups of regular rings vanish, and the "
            "vanishing passes to the colimit and through the boundary "
            "sequence"
        ),
        "certificates": [
            la.decomposition.certificate.to_dict() for la in stack.levels
        ],
    }
    return WangResult(per_level, stabilization, negative_k)
