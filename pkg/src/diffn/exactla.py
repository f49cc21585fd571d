"""Exact dense linear algebra over GF(p) and the rationals.

Matrices are immutable wrappers around python-flint matrices (``nmod_mat``
for GF(p), ``fmpq_mat`` for Q).  Every other module in the package goes
through :class:`Matrix` and the four elimination routines below; nothing
else touches flint directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import flint

from .errors import DimensionError, FieldMismatch, InvariantFailure, NotContained

__all__ = [
    "FieldSpec",
    "Matrix",
    "Subspace",
    "rref",
    "kernel_basis",
    "image_basis",
    "solve_linear",
    "solve_matrix",
    "quotient_dim",
    "kron",
    "hstack",
    "vstack",
    "block_diag",
    "block_matrix",
]

# nmod_mat works on machine words.
_MAX_PRIME = 2**63


def _is_prime(p: int) -> bool:
    return p >= 2 and bool(flint.fmpz(p).is_prime())


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: GF(p) when ``p`` is set, otherwise Q."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int):
                raise ValueError(f"{self.p!r} is not a prime")
            if self.p >= _MAX_PRIME:
                raise ValueError(f"prime {self.p} exceeds the supported range (< 2**63)")
            if not _is_prime(self.p):
                raise ValueError(f"{self.p!r} is not a prime")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``"Q"`` or a decimal prime such as ``"97"``."""
        text = text.strip()
        if text in ("Q", "q", "QQ"):
            return cls(None)
        try:
            return cls(int(text))
        except ValueError as exc:
            raise ValueError(f"bad field {text!r}: {exc}") from None

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "Q" if self.p is None else str(self.p)

    def __repr__(self) -> str:
        return "FieldSpec(Q)" if self.p is None else f"FieldSpec(GF({self.p}))"

    def canonical(self, x) -> int | Fraction:
        """Canonical representative: an int in [0, p) or a reduced Fraction."""
        if self.p is None:
            if isinstance(x, flint.fmpq):
                return Fraction(int(x.p), int(x.q))
            if isinstance(x, str):
                return Fraction(x)
            return Fraction(x)
        if isinstance(x, flint.nmod):
            return int(x)
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            num, den = x.numerator % self.p, x.denominator % self.p
            if den == 0:
                raise ValueError(f"{x} has no image in GF({self.p})")
            return num * pow(den, -1, self.p) % self.p
        return int(x) % self.p

    def _flint_entry(self, x):
        if self.p is None:
            x = self.canonical(x)
            return flint.fmpq(x.numerator, x.denominator)
        return self.canonical(x)

    def _zero(self, rows: int, cols: int):
        if self.p is None:
            return flint.fmpq_mat(rows, cols)
        return flint.nmod_mat(rows, cols, self.p)

    def _new(self, rows: int, cols: int, flat: list):
        if self.p is None:
            return flint.fmpq_mat(rows, cols, flat)
        return flint.nmod_mat(rows, cols, flat, self.p)


class Matrix:
    """Immutable exact matrix over a :class:`FieldSpec`."""

    def __init__(self, field: FieldSpec, rows: int, cols: int, raw):
        self.field = field
        self.rows = rows
        self.cols = cols
        self._m = raw

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        r = len(rows)
        c = len(rows[0]) if r else (cols or 0)
        if any(len(row) != c for row in rows):
            raise DimensionError("ragged rows")
        flat = [field._flint_entry(x) for row in rows for x in row]
        return cls(field, r, c, field._new(r, c, flat))

    @classmethod
    def from_flat(cls, field: FieldSpec, rows: int, cols: int, flat: Sequence) -> "Matrix":
        if len(flat) != rows * cols:
            raise DimensionError("flat entry count does not match shape")
        return cls(field, rows, cols, field._new(rows, cols, [field._flint_entry(x) for x in flat]))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols, field._zero(rows, cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        raw = field._zero(n, n)
        for i in range(n):
            raw[i, i] = 1
        return cls(field, n, n, raw)

    @classmethod
    def lower_shift(cls, field: FieldSpec, n: int) -> "Matrix":
        """n x n matrix with ones on the subdiagonal (e_k -> e_{k+1})."""
        raw = field._zero(n, n)
        for i in range(1, n):
            raw[i, i - 1] = 1
        return cls(field, n, n, raw)

    @classmethod
    def column(cls, field: FieldSpec, values: Sequence) -> "Matrix":
        return cls.from_flat(field, len(values), 1, list(values))

    @classmethod
    def unit(cls, field: FieldSpec, n: int, k: int) -> "Matrix":
        flat = [0] * n
        flat[k] = 1
        return cls(field, n, 1, field._new(n, 1, flat))

    def _wrap(self, raw, rows: int, cols: int) -> "Matrix":
        return Matrix(self.field, rows, cols, raw)

    def _raw_rows(self) -> list[list]:
        if self.rows == 0 or self.cols == 0:
            return [[] for _ in range(self.rows)]
        return self._m.tolist()

    @classmethod
    def _from_raw_rows(cls, field: FieldSpec, rows: list[list], cols: int) -> "Matrix":
        flat = [x for row in rows for x in row]
        return cls(field, len(rows), cols, field._new(len(rows), cols, flat))

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def tolist(self) -> list[list]:
        """Canonical entries, row-major."""
        if self.rows == 0 or self.cols == 0:
            return [[] for _ in range(self.rows)]
        can = self.field.canonical
        return [[can(x) for x in row] for row in self._m.tolist()]

    def entries(self) -> tuple:
        return tuple(x for row in self.tolist() for x in row)

    def __getitem__(self, idx):
        i, j = idx
        return self.field.canonical(self._m[i, j])

    @cached_property
    def _hash(self) -> int:
        # hashing every rational entry is slow; a strided sample is enough since
        # equality is always confirmed by an exact comparison
        if not (self.rows and self.cols):
            return hash((self.field, self.rows, self.cols))
        flat = self._m.entries()
        step = max(1, len(flat) // 48)
        return hash((self.field, self.rows, self.cols, tuple(flat[::step])))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            return False
        if self.rows == 0 or self.cols == 0:
            return True
        return self._m == other._m

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.tolist())
        return f"Matrix[{self.field}]({self.rows}x{self.cols}: {body})"

    def is_zero(self) -> bool:
        if self.rows == 0 or self.cols == 0:
            return True
        return self._m == self.field._zero(self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        if self.rows == 0 or self.cols == 0:
            return self
        return self._wrap(self._m + other._m, self.rows, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        if self.rows == 0 or self.cols == 0:
            return self
        return self._wrap(self._m - other._m, self.rows, self.cols)

    def __neg__(self) -> "Matrix":
        if self.rows == 0 or self.cols == 0:
            return self
        return self._wrap(-self._m, self.rows, self.cols)

    def scale(self, c) -> "Matrix":
        c = self.field._flint_entry(c)
        if self.rows == 0 or self.cols == 0:
            return self
        return self._wrap(self._m * c, self.rows, self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if self.rows == 0 or other.cols == 0:
            return Matrix.zeros(self.field, self.rows, other.cols)
        if self.cols == 0:
            return Matrix.zeros(self.field, self.rows, other.cols)
        return self._wrap(self._m * other._m, self.rows, other.cols)

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square():
            raise DimensionError("power of a non-square matrix")
        result = Matrix.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    @property
    def T(self) -> "Matrix":
        if self.rows == 0 or self.cols == 0:
            return Matrix.zeros(self.field, self.cols, self.rows)
        return self._wrap(self._m.transpose(), self.cols, self.rows)

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        return self._m.rank()

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise DimensionError("inverse of a non-square matrix")
        if self.rows == 0:
            return self
        if self.rank() != self.rows:
            raise ZeroDivisionError("matrix is singular")
        return self._wrap(self._m.inv(), self.rows, self.cols)

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.rows

    # -- slicing ------------------------------------------------------
    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        rows = self._raw_rows()[r0:r1]
        return Matrix._from_raw_rows(self.field, [row[c0:c1] for row in rows], max(c1 - c0, 0))

    def select_columns(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        rows = self._raw_rows()
        return Matrix._from_raw_rows(self.field, [[row[j] for j in idx] for row in rows], len(idx))

    def select_rows(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        rows = self._raw_rows()
        return Matrix._from_raw_rows(self.field, [rows[i] for i in idx], self.cols)

    def col(self, j: int) -> "Matrix":
        return self.select_columns([j])

    def vec(self) -> list:
        """Row-major flattening (the ordering used by :func:`kron`)."""
        return list(self.entries())

    def reshape(self, rows: int, cols: int) -> "Matrix":
        if rows * cols != self.rows * self.cols:
            raise DimensionError("reshape changes the entry count")
        flat = [x for row in self._raw_rows() for x in row]
        return Matrix(self.field, rows, cols, self.field._new(rows, cols, flat))


def hstack(field: FieldSpec, mats: Sequence[Matrix], rows: int | None = None) -> Matrix:
    if not mats:
        return Matrix.zeros(field, rows or 0, 0)
    r = mats[0].rows
    if any(m.rows != r for m in mats):
        raise DimensionError("hstack row mismatch")
    lists = [m._raw_rows() for m in mats]
    out = [[x for lst in lists for x in lst[i]] for i in range(r)]
    return Matrix._from_raw_rows(field, out, sum(m.cols for m in mats))


def vstack(field: FieldSpec, mats: Sequence[Matrix], cols: int | None = None) -> Matrix:
    if not mats:
        return Matrix.zeros(field, 0, cols or 0)
    c = mats[0].cols
    if any(m.cols != c for m in mats):
        raise DimensionError("vstack column mismatch")
    out = [row for m in mats for row in m._raw_rows()]
    return Matrix._from_raw_rows(field, out, c)


def block_matrix(field: FieldSpec, blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a matrix from a grid of blocks with consistent shapes."""
    return vstack(
        field,
        [hstack(field, list(row)) for row in blocks],
        cols=sum(b.cols for b in blocks[0]) if blocks else 0,
    )


def block_diag(field: FieldSpec, mats: Sequence[Matrix]) -> Matrix:
    total_r = sum(m.rows for m in mats)
    total_c = sum(m.cols for m in mats)
    raw = field._zero(total_r, total_c)
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m._raw_rows()):
            for j, x in enumerate(row):
                if x != 0:
                    raw[r0 + i, c0 + j] = x
        r0 += m.rows
        c0 += m.cols
    return Matrix(field, total_r, total_c, raw)


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; ``vec(A @ S @ B) == kron(A, B.T) @ vec(S)`` for row-major vec."""
    a._check(b)
    r, c = a.rows * b.rows, a.cols * b.cols
    raw = a.field._zero(r, c)
    # operands are typically sparse (identities, shifts), so only nonzeros are visited
    a_nz = [(i, j, x) for i, row in enumerate(a._raw_rows()) for j, x in enumerate(row) if x != 0]
    b_nz = [(k, l, y) for k, row in enumerate(b._raw_rows()) for l, y in enumerate(row) if y != 0]
    br, bc = b.rows, b.cols
    for i, j, x in a_nz:
        for k, l, y in b_nz:
            raw[i * br + k, j * bc + l] = x * y
    return Matrix(a.field, r, c, raw)


@dataclass(frozen=True)
class Subspace:
    """Column span of ``basis``; columns are required to be independent."""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_dim:
            raise DimensionError("basis rows must equal the ambient dimension")
        if self.basis.rank() != self.basis.cols:
            raise InvariantFailure("subspace basis is not linearly independent")

    @classmethod
    def _trusted(cls, ambient_dim: int, basis: Matrix) -> "Subspace":
        """Skip the independence check for bases that are independent by construction."""
        sub = object.__new__(cls)
        object.__setattr__(sub, "ambient_dim", ambient_dim)
        object.__setattr__(sub, "basis", basis)
        return sub

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    def contains(self, vectors: Matrix) -> bool:
        if vectors.cols == 0:
            return True
        joined = hstack(self.field, [self.basis, vectors], rows=self.ambient_dim)
        return joined.rank() == self.dim

    @classmethod
    def zero(cls, field: FieldSpec, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.zeros(field, ambient, 0))

    @classmethod
    def full(cls, field: FieldSpec, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.identity(field, ambient))


def rref(m: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form, pivot columns (left to right) and rank."""
    if m.rows == 0 or m.cols == 0:
        return m, [], 0
    raw, rank = m._m.rref()
    r = Matrix(m.field, m.rows, m.cols, raw)
    pivots = []
    table = raw.tolist()
    j = 0
    # pivot of row i is its first nonzero entry
    for i in range(rank):
        row = table[i]
        while row[j] == 0:
            j += 1
        pivots.append(j)
        j += 1
    return r, pivots, rank


def kernel_basis(m: Matrix) -> Subspace:
    """Basis of Ker(m), one vector per free column of the RREF."""
    r, pivots, rank = rref(m)
    field = m.field
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    if not free:
        return Subspace.zero(field, m.cols)
    table = r._raw_rows()
    flat = [[0] * len(free) for _ in range(m.cols)]
    for k, f in enumerate(free):
        flat[f][k] = 1
        for i, pc in enumerate(pivots):
            x = table[i][f]
            if x != 0:
                flat[pc][k] = -x
    # independent by construction: each vector owns a distinct free coordinate
    return Subspace._trusted(m.cols, Matrix._from_raw_rows(field, flat, len(free)))


def image_basis(m: Matrix) -> Subspace:
    """Basis of Im(m): the pivot columns of m itself."""
    _, pivots, _ = rref(m)
    basis = m.select_columns(pivots) if pivots else Matrix.zeros(m.field, m.rows, 0)
    return Subspace._trusted(m.rows, basis)


def solve_matrix(a: Matrix, b: Matrix) -> Matrix | None:
    """Some X with a @ X == b, or None when inconsistent."""
    if a.rows != b.rows:
        raise DimensionError(f"solve: {a.shape} vs rhs {b.shape}")
    field = a.field
    if b.cols == 0:
        return Matrix.zeros(field, a.cols, 0)
    if a.cols == 0:
        return Matrix.zeros(field, 0, b.cols) if b.is_zero() else None
    aug = hstack(field, [a, b])
    r, pivots, rank = rref(aug)
    if pivots and pivots[-1] >= a.cols:
        return None
    table = r._raw_rows()
    out = [[0] * b.cols for _ in range(a.cols)]
    for i, pc in enumerate(pivots):
        out[pc] = table[i][a.cols:]
    x = Matrix._from_raw_rows(field, out, b.cols)
    if a @ x != b:
        raise InvariantFailure("solve_linear produced a non-solution")
    return x


def solve_linear(a: Matrix, b: Matrix) -> Matrix | None:
    """Some column x with a @ x == b, or None when b is not in Im(a)."""
    if b.cols != 1:
        raise DimensionError("right-hand side must be a single column")
    return solve_matrix(a, b)


def quotient_dim(v: Subspace, w: Subspace) -> tuple[int, Matrix]:
    """dim(V/W) and the columns of V.basis that extend W.basis to a basis of V."""
    if v.ambient_dim != w.ambient_dim:
        raise DimensionError("subspaces live in different ambient spaces")
    if not v.contains(w.basis):
        raise NotContained("W not contained in V")
    field = v.field
    joined = hstack(field, [w.basis, v.basis], rows=v.ambient_dim)
    _, pivots, _ = rref(joined)
    picked = [j - w.dim for j in pivots if j >= w.dim]
    if len(picked) != v.dim - w.dim:
        raise InvariantFailure("quotient representatives have the wrong count")
    reps = v.basis.select_columns(picked) if picked else Matrix.zeros(field, v.ambient_dim, 0)
    return v.dim - w.dim, reps
