"""Exact linear algebra over the integers and over prime fields.

Matrices are lists of lists of Python ints, row major.  Everything is
arbitrary precision; nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NoSolution, RankMismatch


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a):
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    """Product of two integer matrices."""
    if a and b and len(a[0]) != len(b):
        raise RankMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}")
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, x):
    if a and len(a[0]) != len(x):
        raise RankMismatch("matrix/vector size mismatch")
    return [sum(r * v for r, v in zip(row, x)) for row in a]


def vec_mat(x, a):
    return mat_vec(transpose(a), x)


def neg(a):
    return [[-x for x in row] for row in a]


def mat_eq(a, b):
    return [list(r) for r in a] == [list(r) for r in b]


def is_skew_symmetric(a):
    n = len(a)
    return all(len(row) == n for row in a) and all(
        a[i][j] == -a[j][i] for i in range(n) for j in range(n)
    )


def solve_exact(a, b):
    """Solve a x = b exactly over the rationals.

    a may be rectangular with full column rank; every equation is checked,
    so an inconsistent overdetermined system raises NoSolution.  Returns a
    list of Fractions.  Fraction-free forward elimination (Bareiss) keeps
    the pivots integral; only the back substitution divides.
    """
    m = len(a)
    n = len(a[0]) if a else 0
    if len(b) != m:
        raise RankMismatch("rhs length does not match row count")
    # augmented working copy
    w = [list(row) + [bv] for row, bv in zip(a, b)]
    prev = 1
    row = 0
    pivots = []
    for col in range(n):
        piv = next((r for r in range(row, m) if w[r][col] != 0), None)
        if piv is None:
            continue
        w[row], w[piv] = w[piv], w[row]
        for r in range(row + 1, m):
            for c in range(col + 1, n + 1):
                w[r][c] = (w[row][col] * w[r][c] - w[r][col] * w[row][c]) // prev
            w[r][col] = 0
        prev = w[row][col]
        pivots.append(col)
        row += 1
        if row == m:
            break
    rank = len(pivots)
    # rows below the staircase must be identically zero on the rhs too
    for r in range(rank, m):
        if any(w[r][c] != 0 for c in range(n)):
            raise NoSolution("elimination left a nonzero row outside the staircase")
        if w[r][n] != 0:
            raise NoSolution("inconsistent system")
    if rank < n:
        raise NoSolution("matrix does not have full column rank")
    x = [Fraction(0)] * n
    for r in range(rank - 1, -1, -1):
        col = pivots[r]
        acc = Fraction(w[r][n])
        for c in range(col + 1, n):
            acc -= w[r][c] * x[c]
        x[col] = acc / w[r][col]
    return x


def solve_int(a, b):
    """Solve a x = b over the integers; raise NoSolution if the rational
    solution is not integral (or does not exist)."""
    x = solve_exact(a, b)
    out = []
    for v in x:
        if v.denominator != 1:
            raise NoSolution("solution is rational but not integral")
        out.append(int(v))
    return out


def rank(a):
    """Rank of an integer matrix (exact)."""
    m = len(a)
    if m == 0:
        return 0
    n = len(a[0])
    w = [list(row) for row in a]
    prev = 1
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if w[r][col] != 0), None)
        if piv is None:
            continue
        w[row], w[piv] = w[piv], w[row]
        for r in range(row + 1, m):
            for c in range(col + 1, n):
                w[r][c] = (w[row][col] * w[r][c] - w[r][col] * w[row][c]) // prev
            w[r][col] = 0
        prev = w[row][col]
        row += 1
        if row == m:
            break
    return row


def kernel_basis(a, ncols=None):
    """Basis of the integer kernel lattice {x in Z^n : a x = 0}.

    Column reduction with a unimodular bookkeeping matrix; the returned
    vectors generate the full (saturated) kernel lattice.
    """
    m = len(a)
    if ncols is None:
        if not a:
            raise RankMismatch("column count needed for an empty matrix")
        ncols = len(a[0])
    n = ncols
    c = [list(row) for row in a] if a else []
    u = identity(n)
    pivot_cols = set()
    for r in range(m):
        active = [j for j in range(n) if j not in pivot_cols]
        while True:
            nz = [j for j in active if c[r][j] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: (abs(c[r][j]), j))
            for j in nz:
                if j == j0:
                    continue
                q = c[r][j] // c[r][j0]
                if q:
                    for i in range(m):
                        c[i][j] -= q * c[i][j0]
                    for i in range(n):
                        u[i][j] -= q * u[i][j0]
        nz = [j for j in active if c[r][j] != 0]
        if nz:
            pivot_cols.add(nz[0])
    free = [j for j in range(n) if j not in pivot_cols]
    return [[u[i][j] for i in range(n)] for j in free]


# ---------------------------------------------------------------------------
# prime field helpers


def mat_mod(a, p):
    return [[x % p for x in row] for row in a]


def rref_mod(a, p):
    """Reduced row echelon form over F_p.  Returns (rref, pivot_columns)."""
    w = [[x % p for x in row] for row in a]
    m = len(w)
    n = len(w[0]) if w else 0
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if w[r][col] != 0), None)
        if piv is None:
            continue
        w[row], w[piv] = w[piv], w[row]
        inv = pow(w[row][col], p - 2, p)
        w[row] = [(x * inv) % p for x in w[row]]
        for r in range(m):
            if r != row and w[r][col] != 0:
                f = w[r][col]
                w[r] = [(x - f * y) % p for x, y in zip(w[r], w[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return w, pivots


def rank_mod(a, p):
    if not a or not a[0]:
        return 0
    return len(rref_mod(a, p)[1])


def nullspace_mod(a, p, ncols=None):
    """Basis (list of vectors) of the right kernel of a over F_p."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    w, pivots = rref_mod(a, p)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        v = [0] * ncols
        v[j] = 1
        for r, col in enumerate(pivots):
            v[col] = (-w[r][j]) % p
        basis.append(v)
    return basis


def reduce_against_rref(vec, rref_rows, pivots, p):
    """Reduce a vector modulo the row space spanned by an rref basis.
    Returns the reduced vector (zero iff vec lies in the span)."""
    v = [x % p for x in vec]
    for row, col in zip(rref_rows, pivots):
        if v[col] != 0:
            f = v[col]
            v = [(x - f * y) % p for x, y in zip(v, row)]
    return v
