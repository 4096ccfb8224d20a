"""Exact linear algebra over a cyclotomic field.

Vectors are tuples of Cyclo; matrices are row-major tuples of tuples with
the row convention M[i][j] = coefficient of basis_j in F(basis_i).  Under
this convention the matrix of (G after F), i.e. x -> G(F(x)), is F . G.
"""

from __future__ import annotations

from .exactfield import Cyclo


def zeros(order: int, n: int):
    z = Cyclo.zero(order)
    return [z] * n


def identity_matrix(order: int, n: int):
    z, o = Cyclo.zero(order), Cyclo.one(order)
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def mat_mul(a, b):
    """Plain matrix product a . b (row convention preserved)."""
    n, m = len(a), len(b[0])
    k = len(b)
    order = a[0][0].order
    z = Cyclo.zero(order)
    out = []
    for i in range(n):
        row = [z] * m
        for t in range(k):
            c = a[i][t]
            if not c:
                continue
            bt = b[t]
            for j in range(m):
                if bt[j]:
                    row[j] = row[j] + c * bt[j]
        out.append(tuple(row))
    return tuple(out)


def mat_pow(a, k: int):
    n = len(a)
    order = a[0][0].order
    result = identity_matrix(order, n)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def apply_row_matrix(m, vec):
    """Image of a vector under the endomorphism m (row convention)."""
    n = len(vec)
    order = vec[0].order if vec else m[0][0].order
    z = Cyclo.zero(order)
    out = [z] * len(m[0])
    for i, c in enumerate(vec):
        if not c:
            continue
        row = m[i]
        for j in range(len(row)):
            if row[j]:
                out[j] = out[j] + c * row[j]
    return tuple(out)


def precompose_covector(m, cov):
    """The covector cov . F where m is the row-convention matrix of F."""
    n = len(m)
    order = cov[0].order
    z = Cyclo.zero(order)
    out = [z] * n
    for i in range(n):
        row = m[i]
        acc = z
        for j, c in enumerate(row):
            if c and cov[j]:
                acc = acc + c * cov[j]
        out[i] = acc
    return tuple(out)


def invert_matrix(m):
    """Inverse of a square matrix, or None if singular."""
    n = len(m)
    order = m[0][0].order
    z, o = Cyclo.zero(order), Cyclo.one(order)
    a = [list(row) for row in m]
    inv = [[o if i == j else z for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        c = a[col][col].inv()
        a[col] = [x * c for x in a[col]]
        inv[col] = [x * c for x in inv[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return tuple(tuple(row) for row in inv)


class KernelSolver:
    """Incremental kernel computation for a homogeneous system.

    Rows are fed one at a time as sparse dicts {col: coeff}.  Internally
    keeps a reduced pivot basis of the row space.  Once the rank reaches
    n - 1 the caller can extract the (at most) one-dimensional kernel and
    verify remaining rows cheaply against it.
    """

    def __init__(self, order: int, ncols: int):
        self.order = order
        self.n = ncols
        self.pivots: dict[int, dict[int, Cyclo]] = {}

    def add_row(self, row: dict) -> None:
        row = {j: c for j, c in row.items() if c}
        while row:
            lead = min(row)
            piv = self.pivots.get(lead)
            if piv is None:
                c = row[lead].inv()
                self.pivots[lead] = {j: v * c for j, v in row.items()}
                return
            f = row[lead]
            new = {}
            for j, v in row.items():
                w = v - f * piv.get(j, Cyclo.zero(self.order))
                if w:
                    new[j] = w
            for j, v in piv.items():
                if j not in row:
                    w = -f * v
                    if w:
                        new[j] = w
            row = new

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel_basis(self) -> list[tuple]:
        """Basis of the solution space of all rows added so far."""
        z, o = Cyclo.zero(self.order), Cyclo.one(self.order)
        free = [j for j in range(self.n) if j not in self.pivots]
        basis = []
        for f in free:
            vec = [z] * self.n
            vec[f] = o
            # back-substitute pivot rows (they are reduced against each other
            # only partially, so substitute from the largest pivot down)
            for lead in sorted(self.pivots, reverse=True):
                row = self.pivots[lead]
                acc = z
                for j, c in row.items():
                    if j != lead and vec[j]:
                        acc = acc + c * vec[j]
                if acc:
                    vec[lead] = -acc
        # note: with partially reduced pivots the loop above must run in
        # decreasing pivot order so every dependency is already final
            basis.append(tuple(vec))
        return basis

    def satisfies(self, row: dict, vec) -> bool:
        acc = Cyclo.zero(self.order)
        for j, c in row.items():
            if vec[j]:
                acc = acc + c * vec[j]
        return acc.is_zero()
