"""Independent reference implementations used only by the tests.

Nothing here touches python-flint or the package's elimination code: ranks
and echelon forms come from schoolbook Gauss-Jordan on Python ints and
Fractions, and small Hom spaces over GF(2)/GF(3) are enumerated outright.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def _norm(x, p):
    return Fraction(x) if p is None else int(x) % p


def _inv(x, p):
    return 1 / x if p is None else pow(x, -1, p)


def rref_oracle(rows, p=None):
    """Gauss-Jordan with leftmost-column, topmost-row pivoting."""
    m = [[_norm(x, p) for x in row] for row in rows]
    if not m:
        return m, []
    nr, nc = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv(m[r][c], p)
        m[r] = [_norm(x * inv, p) for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [_norm(a - f * b, p) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def rank_oracle(rows, p=None) -> int:
    return len(rref_oracle(rows, p)[1])


def matmul(a, b, p=None):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[_norm(sum(a[i][k] * b[k][j] for k in range(inner)), p) for j in range(cols)] for i in range(len(a))]


def identity(d):
    return [[1 if i == j else 0 for j in range(d)] for i in range(d)]


def matpow(a, k, p=None):
    out = identity(len(a))
    for _ in range(k):
        out = matmul(out, a, p)
    return out


def commutation_system(eps_x, eps_y, p=None):
    """Rows of the linear system F eps_X - eps_Y F = 0 in the entries of F (dy x dx)."""
    dx, dy = len(eps_x), len(eps_y)
    rows = []
    for i in range(dy):
        for j in range(dx):
            row = [0] * (dy * dx)
            # (F eps_X)_{ij} = sum_k F_{ik} eps_X_{kj}
            for k in range(dx):
                row[i * dx + k] += eps_x[k][j]
            # (eps_Y F)_{ij} = sum_k eps_Y_{ik} F_{kj}
            for k in range(dy):
                row[k * dx + j] -= eps_y[i][k]
            rows.append([_norm(v, p) for v in row])
    return rows


def hom_dim_oracle(eps_x, eps_y, p=None) -> int:
    dx, dy = len(eps_x), len(eps_y)
    if dx * dy == 0:
        return 0
    return dx * dy - rank_oracle(commutation_system(eps_x, eps_y, p), p)


def null_image_rank(eps_x, eps_y, n, p=None) -> int:
    """rank of s -> sum_k eps_Y^{n-1-k} s eps_X^k, built by applying it to unit matrices."""
    dx, dy = len(eps_x), len(eps_y)
    if dx * dy == 0:
        return 0
    px = [matpow(eps_x, k, p) for k in range(n)]
    py = [matpow(eps_y, k, p) for k in range(n)]
    columns = []
    for a in range(dy):
        for b in range(dx):
            s = [[1 if (i, j) == (a, b) else 0 for j in range(dx)] for i in range(dy)]
            total = [[0] * dx for _ in range(dy)]
            for k in range(n):
                term = matmul(matmul(py[n - 1 - k], s, p), px[k], p)
                total = [[_norm(u + v, p) for u, v in zip(r1, r2)] for r1, r2 in zip(total, term)]
            columns.append([x for row in total for x in row])
    return rank_oracle(columns, p)


def hom_k_dim_oracle(eps_x, eps_y, n, p=None) -> int:
    return hom_dim_oracle(eps_x, eps_y, p) - null_image_rank(eps_x, eps_y, n, p)


def homology_dim_oracle(eps, n, r, p=None) -> int:
    d = len(eps)
    if d == 0:
        return 0
    return (d - rank_oracle(matpow(eps, r, p), p)) - rank_oracle(matpow(eps, n - r, p), p)


def shift_block(size):
    return [[1 if i == j + 1 else 0 for j in range(size)] for i in range(size)]


def jordan_eps(parts):
    d = sum(parts)
    out = [[0] * d for _ in range(d)]
    off = 0
    for size in parts:
        for i in range(1, size):
            out[off + i][off + i - 1] = 1
        off += size
    return out


def enumerate_homs(eps_x, eps_y, p):
    """Every matrix F over GF(p) with F eps_X = eps_Y F (tiny sizes only)."""
    dx, dy = len(eps_x), len(eps_y)
    if dx * dy == 0:
        return [[[0] * dx for _ in range(dy)]]
    found = []
    for flat in itertools.product(range(p), repeat=dx * dy):
        f = [list(flat[i * dx:(i + 1) * dx]) for i in range(dy)]
        if matmul(f, eps_x, p) == matmul(eps_y, f, p):
            found.append(f)
    return found


def is_null_homotopic_bruteforce(f, eps_x, eps_y, n, p) -> bool:
    """Search every s over GF(p) for f = sum_k eps_Y^{n-1-k} s eps_X^k."""
    dx, dy = len(eps_x), len(eps_y)
    if dx * dy == 0:
        return True
    px = [matpow(eps_x, k, p) for k in range(n)]
    py = [matpow(eps_y, k, p) for k in range(n)]
    target = [[x % p for x in row] for row in f]
    for flat in itertools.product(range(p), repeat=dx * dy):
        s = [list(flat[i * dx:(i + 1) * dx]) for i in range(dy)]
        total = [[0] * dx for _ in range(dy)]
        for k in range(n):
            term = matmul(matmul(py[n - 1 - k], s, p), px[k], p)
            total = [[(u + v) % p for u, v in zip(r1, r2)] for r1, r2 in zip(total, term)]
        if total == target:
            return True
    return False


def homotopy_equivalent_bruteforce(eps_x, eps_y, n, p) -> bool:
    """Search Hom(X, Y) x Hom(Y, X) for a pair inverse up to homotopy."""
    dx, dy = len(eps_x), len(eps_y)
    ix, iy = identity(dx), identity(dy)

    def minus(a, b):
        return [[(u - v) % p for u, v in zip(r1, r2)] for r1, r2 in zip(a, b)]

    def compose(a, b, rows, cols):
        if not a or not b or not b[0]:
            return [[0] * cols for _ in range(rows)]
        if not a[0]:
            return [[0] * cols for _ in range(rows)]
        return matmul(a, b, p)

    forward = enumerate_homs(eps_x, eps_y, p)
    backward = enumerate_homs(eps_y, eps_x, p)
    for a in forward:
        for b in backward:
            ba = compose(b, a, dx, dx)
            ab = compose(a, b, dy, dy)
            if is_null_homotopic_bruteforce(minus(ba, ix), eps_x, eps_x, n, p) and is_null_homotopic_bruteforce(
                minus(ab, iy), eps_y, eps_y, n, p
            ):
                return True
    return False
