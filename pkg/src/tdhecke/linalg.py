"""Exact linear algebra over cyclotomic fields.

Vectors and matrices are plain Python lists of FieldElement.  Rank and
determinant use fraction-free (Bareiss) elimination so coefficient growth
stays polynomial; solving and nullspaces use ordinary Gauss-Jordan, which is
exact over a field.
"""

from .cyclotomic import CycloField, FieldElement


def rank_bareiss(rows, field: CycloField) -> int:
    """Rank of the matrix by fraction-free Gaussian elimination."""
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev_inv = field.one
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pivot = m[r][c]
        for i in range(r + 1, nrows):
            row_i, row_r = m[i], m[r]
            head = row_i[c]
            if head.is_zero():
                # Still rescale per Bareiss so later exact divisions hold.
                for j in range(c + 1, ncols):
                    if not row_i[j].is_zero():
                        row_i[j] = pivot * row_i[j] * prev_inv
            else:
                for j in range(c + 1, ncols):
                    row_i[j] = (pivot * row_i[j] - head * row_r[j]) * prev_inv
                row_i[c] = field.zero
        prev_inv = pivot.inverse()
        r += 1
    return r


def det_bareiss(rows, field: CycloField) -> FieldElement:
    """Determinant of a square matrix by fraction-free elimination."""
    n = len(rows)
    if n == 0:
        return field.one
    assert all(len(r) == n for r in rows), "determinant needs a square matrix"
    m = [list(r) for r in rows]
    sign = 1
    prev_inv = field.one
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
        if piv is None:
            return field.zero
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, row_k = m[i], m[k]
            head = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - head * row_k[j]) * prev_inv
        prev_inv = pivot.inverse()
    result = m[n - 1][n - 1]
    return -result if sign < 0 else result


class EchelonTracker:
    """Incremental echelon form with dependency tracking.

    add(vec) returns None while vectors stay independent.  The first dependent
    vector returns a dict {index: coefficient} expressing it as a combination
    of previously added vectors (indices count every add call, in order).
    """

    def __init__(self, field: CycloField):
        self.field = field
        self.rows = []  # (pivot index, normalized vector, combo dict)
        self.count = 0

    def reduce(self, vec):
        """Reduce vec against the stored rows.

        Returns (residual, coeffs) with vec = residual + sum of
        coeffs[i] * added_vector[i].
        """
        coeffs = {}
        v = list(vec)
        for pivot, pvec, pcombo in self.rows:
            f = v[pivot]
            if not f.is_zero():
                v = [a - f * b for a, b in zip(v, pvec)]
                for idx, c in pcombo.items():
                    prev = coeffs.get(idx)
                    coeffs[idx] = f * c if prev is None else prev + f * c
        return v, coeffs

    def add(self, vec):
        v, coeffs = self.reduce(vec)
        k = self.count
        self.count += 1
        pivot = next((i for i, c in enumerate(v) if not c.is_zero()), None)
        if pivot is None:
            return {i: c for i, c in coeffs.items() if not c.is_zero()}
        inv = v[pivot].inverse()
        pvec = [c * inv for c in v]
        pcombo = {idx: -(c * inv) for idx, c in coeffs.items() if not c.is_zero()}
        pcombo[k] = inv
        self.rows.append((pivot, pvec, pcombo))
        return None

    @property
    def dimension(self) -> int:
        return len(self.rows)


class LinearSpan:
    """Span of a fixed list of vectors with exact membership tests."""

    def __init__(self, vectors, field: CycloField):
        self.field = field
        self.vectors = list(vectors)
        self._tracker = EchelonTracker(field)
        for v in self.vectors:
            self._tracker.add(v)

    @property
    def dimension(self) -> int:
        return self._tracker.dimension

    def coordinates(self, vec):
        """Coefficients over the spanning list, or None if vec is outside."""
        residual, coeffs = self._tracker.reduce(vec)
        if any(not c.is_zero() for c in residual):
            return None
        out = [self.field.zero] * len(self.vectors)
        for idx, c in coeffs.items():
            out[idx] = c
        return out

    def __contains__(self, vec):
        return self.coordinates(vec) is not None


def solve_linear(rows, rhs, field: CycloField):
    """One exact solution x of A x = b, or None if the system is inconsistent.

    Free variables are set to zero, which makes the answer deterministic.
    """
    if not rows:
        return [] if all(c.is_zero() for c in rhs) else None
    nrows, ncols = len(rows), len(rows[0])
    m = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, nrows):
        if not m[i][ncols].is_zero():
            return None
    x = [field.zero] * ncols
    for row_idx, c in enumerate(pivots):
        x[c] = m[row_idx][ncols]
    return x


def nullspace(rows, ncols: int, field: CycloField):
    """Basis of {x : A x = 0} as a list of length-ncols vectors."""
    if not rows:
        basis = []
        for j in range(ncols):
            v = [field.zero] * ncols
            v[j] = field.one
            basis.append(v)
        return basis
    m = [list(r) for r in rows]
    nrows = len(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [field.zero] * ncols
        v[free] = field.one
        for row_idx, c in enumerate(pivots):
            v[c] = -m[row_idx][free]
        basis.append(v)
    return basis
