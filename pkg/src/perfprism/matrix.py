"""Small dense-matrix helpers over arbitrary commutative coefficient objects.

Matrices are plain lists of lists.  Entries only need +, -, * (and inverse()
where stated); this keeps one implementation usable over Z_q/p^L, finite
fields, perfect series and Witt truncations alike.
"""

from __future__ import annotations


def dim(A):
    return len(A), len(A[0]) if A else 0


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_mul(A, B):
    n, k = len(A), len(B)
    m = len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                term = A[i][l] * B[l][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def mat_scalar(s, A):
    return [[s * a for a in row] for row in A]


def mat_int_scalar(k: int, A, zero):
    """k * A by repeated addition (works without an int action)."""
    if k == 0:
        return [[zero for _ in row] for row in A]
    out = A
    for _ in range(abs(k) - 1):
        out = mat_add(out, A)
    if k < 0:
        out = [[zero - a for a in row] for row in out]
    return out


def identity(n, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_map(f, A):
    return [[f(a) for a in row] for row in A]


def kronecker(A, B, n_b=None):
    nb = len(B)
    mb = len(B[0])
    out = []
    for i in range(len(A)):
        for ib in range(nb):
            row = []
            for j in range(len(A[0])):
                for jb in range(mb):
                    row.append(A[i][j] * B[ib][jb])
            out.append(row)
    return out


def block_diag(blocks, zero):
    n = sum(len(b) for b in blocks)
    out = [[zero] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return out


def berkowitz_charpoly(A, one, zero):
    """Division-free characteristic polynomial det(X*I - A).

    Returns coefficients [c_0, ..., c_n] with c_n = 1, via the Berkowitz
    vector recurrence (no divisions, valid over any commutative ring).
    """
    n = len(A)
    if n == 0:
        return [one]
    # Berkowitz: iteratively build the char poly of leading principal minors.
    # V holds the coefficients (highest degree first) of the current minor.
    V = [one, zero - A[0][0]]
    for k in range(1, n):
        R = [A[k][j] for j in range(k)]          # row vector
        C = [A[i][k] for i in range(k)]          # column vector
        Akk = A[k][k]
        sub = [[A[i][j] for j in range(k)] for i in range(k)]
        # Toeplitz column: [1, -A_kk, -R C, -R sub C, -R sub^2 C, ...]
        toep = [one, zero - Akk]
        vec = C
        for _ in range(k - 1 if k > 1 else 0):
            acc = zero
            for r, v in zip(R, vec):
                acc = acc + r * v
            toep.append(zero - acc)
            vec = [sum_prod(row, vec, zero) for row in sub]
        if k >= 1:
            acc = zero
            for r, v in zip(R, vec):
                acc = acc + r * v
            toep.append(zero - acc)
        newV = []
        for i in range(len(V) + 1):
            acc = zero
            for j in range(len(toep)):
                if 0 <= i - j < len(V):
                    acc = acc + toep[j] * V[i - j]
            newV.append(acc)
        V = newV
    V.reverse()  # lowest degree first
    return V


def sum_prod(row, vec, zero):
    acc = zero
    for r, v in zip(row, vec):
        acc = acc + r * v
    return acc


def det(A, one, zero):
    """Determinant via the characteristic polynomial's constant term."""
    n = len(A)
    cp = berkowitz_charpoly(A, one, zero)
    c0 = cp[0]
    # det(XI - A) at X = 0 is (-1)^n det(A)
    if n % 2 == 1:
        return zero - c0
    return c0


def mat_inverse(A, one, zero):
    """Inverse via Gauss-Jordan; entries need .inverse() on pivots."""
    n = len(A)
    M = [list(row) + [one if i == j else zero for j in range(n)]
         for i, row in enumerate(A)]

    def is_invertible(x):
        try:
            x.inverse()
            return True
        except Exception:
            return False

    for col in range(n):
        piv = None
        for r in range(col, n):
            if is_invertible(M[r][col]):
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("matrix not invertible at this precision")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [inv * x for x in M[col]]
        for r in range(n):
            if r != col:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]
