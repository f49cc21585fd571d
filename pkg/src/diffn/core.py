"""n-th differential objects over a field and the maps between them.

An object is a finite-dimensional vector space with a nilpotent endomorphism
``eps`` satisfying ``eps**n == 0``; equivalently a module over k[t]/(t^n).
Besides the category itself this module holds the forgetful/augmenting
adjunctions, the two canonical exact sequences through ``T(X)``, Jordan
classification and the idempotent-splitting algorithm on ``T(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import (
    DegreeMismatch,
    DimensionError,
    FieldMismatch,
    InvariantFailure,
    NilpotencyError,
    NotAMorphism,
    NotAugmented,
    NotExact,
    NotIdempotent,
)
from .exactla import (
    FieldSpec,
    Matrix,
    Subspace,
    block_diag,
    block_matrix,
    hstack,
    image_basis,
    kernel_basis,
    kron,
    quotient_dim,
    solve_linear,
    vstack,
)


class DiffObject:
    """A pair (X, eps) with eps**n == 0.

    ``block`` is set only on objects built by :func:`augment`; it records the
    size d of the underlying space so that the adjunction maps can read off
    individual blocks of ``X^{+n}``.
    """

    def __init__(self, field: FieldSpec, n: int, eps: Matrix, block: int | None = None):
        if n < 2:
            raise DegreeMismatch(f"nilpotency degree must be >= 2, got {n}")
        if eps.field != field:
            raise FieldMismatch(f"eps lives over {eps.field}, object over {field}")
        if not eps.is_square():
            raise DimensionError(f"eps must be square, got {eps.rows}x{eps.cols}")
        if block is not None and block * n != eps.rows:
            raise DimensionError("augmented block size does not divide the dimension")
        self.field = field
        self.n = n
        self.eps = eps
        self.block = block
        if not self.power(n).is_zero():
            raise NilpotencyError(f"eps^{n} != 0")

    @property
    def dim(self) -> int:
        return self.eps.rows

    @property
    def is_augmented(self) -> bool:
        return self.block is not None

    @cached_property
    def _powers(self) -> list[Matrix]:
        powers = [Matrix.identity(self.field, self.dim)]
        for _ in range(self.n):
            powers.append(powers[-1] @ self.eps)
        return powers

    def power(self, k: int) -> Matrix:
        """eps**k; cached for 0 <= k <= n."""
        if 0 <= k <= self.n:
            return self._powers[k]
        return Matrix.zeros(self.field, self.dim, self.dim)

    def identity(self) -> "DiffMorphism":
        return DiffMorphism(self, self, Matrix.identity(self.field, self.dim), check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffObject):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self.eps == other.eps

    def __hash__(self) -> int:
        return hash((self.field, self.n, self.eps))

    def __repr__(self) -> str:
        tag = f", block={self.block}" if self.block is not None else ""
        return f"DiffObject(field={self.field}, n={self.n}, dim={self.dim}{tag})"


def _same_category(x: DiffObject, y: DiffObject):
    if x.field != y.field:
        raise FieldMismatch(f"{x.field} vs {y.field}")
    if x.n != y.n:
        raise DegreeMismatch(f"n={x.n} vs n={y.n}")


class DiffMorphism:
    """A linear map f: X -> Y with f eps_X == eps_Y f."""

    def __init__(self, src: DiffObject, dst: DiffObject, mat: Matrix, *, check: bool = True):
        _same_category(src, dst)
        if mat.shape != (dst.dim, src.dim):
            raise DimensionError(f"morphism matrix must be {dst.dim}x{src.dim}, got {mat.rows}x{mat.cols}")
        if check and mat @ src.eps != dst.eps @ mat:
            raise NotAMorphism("f eps_X != eps_Y f")
        self.src = src
        self.dst = dst
        self.mat = mat

    @property
    def field(self) -> FieldSpec:
        return self.src.field

    @property
    def n(self) -> int:
        return self.src.n

    def _parallel(self, other: "DiffMorphism"):
        if self.src != other.src or self.dst != other.dst:
            raise DimensionError("morphisms do not share source and target")

    def __matmul__(self, other: "DiffMorphism") -> "DiffMorphism":
        """Composition: ``g @ f`` is g after f."""
        if other.dst != self.src:
            raise DimensionError("morphisms are not composable")
        return DiffMorphism(other.src, self.dst, self.mat @ other.mat, check=False)

    def __add__(self, other: "DiffMorphism") -> "DiffMorphism":
        self._parallel(other)
        return DiffMorphism(self.src, self.dst, self.mat + other.mat, check=False)

    def __sub__(self, other: "DiffMorphism") -> "DiffMorphism":
        self._parallel(other)
        return DiffMorphism(self.src, self.dst, self.mat - other.mat, check=False)

    def __neg__(self) -> "DiffMorphism":
        return DiffMorphism(self.src, self.dst, -self.mat, check=False)

    def scale(self, c) -> "DiffMorphism":
        return DiffMorphism(self.src, self.dst, self.mat.scale(c), check=False)

    def is_zero(self) -> bool:
        return self.mat.is_zero()

    def is_iso(self) -> bool:
        return self.mat.is_invertible()

    def inverse(self) -> "DiffMorphism":
        return DiffMorphism(self.dst, self.src, self.mat.inverse(), check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffMorphism):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.mat == other.mat

    def __hash__(self) -> int:
        return hash((self.src, self.dst, self.mat))

    def __repr__(self) -> str:
        return f"DiffMorphism({self.src.dim}->{self.dst.dim}, {self.mat!r})"


def zero_morphism(x: DiffObject, y: DiffObject) -> DiffMorphism:
    return DiffMorphism(x, y, Matrix.zeros(x.field, y.dim, x.dim), check=False)


@dataclass(frozen=True)
class JordanType:
    """Multiset of Jordan block sizes, stored in decreasing order."""

    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))
        if any(p < 1 for p in self.parts):
            raise ValueError("Jordan parts must be positive")

    @property
    def dim(self) -> int:
        return sum(self.parts)

    def stable(self, n: int) -> "JordanType":
        """Drop the free parts (size n); these vanish up to homotopy."""
        return JordanType(tuple(p for p in self.parts if p != n))

    def count(self, size: int) -> int:
        return self.parts.count(size)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.parts)) + "}"


def make_diff_object(field: FieldSpec, n: int, eps: Matrix) -> DiffObject:
    return DiffObject(field, n, eps)


def jordan_block(field: FieldSpec, n: int, size: int) -> DiffObject:
    """J_size: the lower shift on k^size (requires size <= n)."""
    return DiffObject(field, n, Matrix.lower_shift(field, size))


def canonical_object(field: FieldSpec, n: int, parts: Iterable[int]) -> DiffObject:
    """Direct sum of Jordan blocks in the given order."""
    parts = list(parts)
    return DiffObject(field, n, block_diag(field, [Matrix.lower_shift(field, h) for h in parts]))


# -- linear operators on matrix spaces ---------------------------------------

def sandwich_operator(field: FieldSpec, terms: Sequence[tuple[Matrix, Matrix]], rows: int, cols: int) -> Matrix:
    """Matrix of s |-> sum(A @ s @ B) acting on row-major vec(s), s of shape rows x cols."""
    total = None
    for a, b in terms:
        term = kron(a, b.T)
        total = term if total is None else total + term
    if total is None:
        return Matrix.zeros(field, rows * cols, rows * cols)
    return total


@lru_cache(maxsize=1024)
def hom_matrix(x: DiffObject, y: DiffObject) -> Matrix:
    """Columns are vec(f) for a basis f of Hom(X, Y)."""
    _same_category(x, y)
    field = x.field
    op = sandwich_operator(
        field,
        [
            (Matrix.identity(field, y.dim), x.eps),
            (-y.eps, Matrix.identity(field, x.dim)),
        ],
        y.dim,
        x.dim,
    )
    return kernel_basis(op).basis


def hom_space_basis(x: DiffObject, y: DiffObject) -> list[DiffMorphism]:
    """Basis of Hom(X, Y), solved as the linear system f eps_X = eps_Y f."""
    basis = hom_matrix(x, y)
    return [
        DiffMorphism(x, y, basis.col(k).reshape(y.dim, x.dim))
        for k in range(basis.cols)
    ]


def combine(x: DiffObject, y: DiffObject, coeffs: Matrix) -> DiffMorphism:
    """The morphism with the given coordinates in the hom_matrix basis."""
    basis = hom_matrix(x, y)
    if basis.cols == 0:
        return zero_morphism(x, y)
    return DiffMorphism(x, y, (basis @ coeffs).reshape(y.dim, x.dim), check=False)


def solve_in_hom(x: DiffObject, y: DiffObject, op: Matrix, target: Matrix) -> DiffMorphism | None:
    """Find g in Hom(X, Y) with op @ vec(g) == vec(target), op acting on row-major vec."""
    basis = hom_matrix(x, y)
    size = target.rows * target.cols
    if basis.cols == 0:
        return zero_morphism(x, y) if target.is_zero() else None
    coeffs = solve_linear(op @ basis, target.reshape(size, 1))
    if coeffs is None:
        return None
    return combine(x, y, coeffs)


# -- the functors F and T ----------------------------------------------------

def augment(d: int, field: FieldSpec, n: int) -> DiffObject:
    """T(k^d) = (k^{dn}, block lower shift with identity blocks)."""
    eps = kron(Matrix.lower_shift(field, n), Matrix.identity(field, d))
    return DiffObject(field, n, eps, block=d)


def augment_morphism(f: Matrix, n: int) -> DiffMorphism:
    """T(f) = diag(f, ..., f): T(k^cols) -> T(k^rows)."""
    field = f.field
    mat = kron(Matrix.identity(field, n), f)
    return DiffMorphism(augment(f.cols, field, n), augment(f.rows, field, n), mat)


def adjoint_phi(x: DiffObject, f: Matrix) -> DiffMorphism:
    """phi(f) = (f eps^{n-1}; ...; f eps; f): X -> T(Y) for a linear f: F(X) -> Y."""
    if f.cols != x.dim or f.field != x.field:
        raise DimensionError(f"f must have {x.dim} columns over {x.field}")
    n = x.n
    blocks = [f @ x.power(n - 1 - k) for k in range(n)]
    mat = vstack(x.field, blocks, cols=x.dim)
    return DiffMorphism(x, augment(f.rows, x.field, n), mat)


def adjoint_phi_inv(g: DiffMorphism) -> Matrix:
    """Bottom block g_n of a morphism X -> T(Y)."""
    d = g.dst.block
    if d is None:
        raise NotAugmented("target of g carries no augmented block structure")
    n = g.n
    return g.mat.submatrix((n - 1) * d, n * d, 0, g.src.dim)


def adjoint_psi(f: DiffMorphism) -> Matrix:
    """First block column f_1 of a morphism T(Y) -> X."""
    d = f.src.block
    if d is None:
        raise NotAugmented("source of f carries no augmented block structure")
    return f.mat.submatrix(0, f.dst.dim, 0, d)


def adjoint_psi_inv(x: DiffObject, h: Matrix) -> DiffMorphism:
    """(h, eps h, ..., eps^{n-1} h): T(Y) -> X for a linear h: Y -> F(X)."""
    if h.rows != x.dim or h.field != x.field:
        raise DimensionError(f"h must have {x.dim} rows over {x.field}")
    n = x.n
    mat = hstack(x.field, [x.power(k) @ h for k in range(n)], rows=x.dim)
    return DiffMorphism(augment(h.cols, x.field, n), x, mat)


# -- exact sequences -------------------------------------------------------

def check_ses(i: DiffMorphism, p: DiffMorphism) -> bool:
    """True iff A -i-> B -p-> C is short exact on underlying spaces."""
    if i.dst != p.src:
        raise DimensionError("i and p are not composable")
    if not (p.mat @ i.mat).is_zero():
        return False
    ri, rp = i.mat.rank(), p.mat.rank()
    return ri == i.src.dim and rp == p.dst.dim and ri + rp == i.dst.dim


@dataclass(frozen=True)
class ShortExactSeq:
    i: DiffMorphism
    p: DiffMorphism

    def __post_init__(self):
        if not check_ses(self.i, self.p):
            raise NotExact("(i, p) is not a short exact sequence")

    @property
    def a(self) -> DiffObject:
        return self.i.src

    @property
    def b(self) -> DiffObject:
        return self.i.dst

    @property
    def c(self) -> DiffObject:
        return self.p.dst


def coshift_eps(x: DiffObject) -> Matrix:
    """eps of X' = X^{+(n-1)}: first block column -eps^k, identities above the diagonal."""
    field, n, d = x.field, x.n, x.dim
    zero, one = Matrix.zeros(field, d, d), Matrix.identity(field, d)
    rows = []
    for i in range(n - 1):
        row = [zero] * (n - 1)
        row[0] = -x.power(i + 1)
        if i + 1 < n - 1:
            row[i + 1] = one
        rows.append(row)
    return block_matrix(field, rows) if d else Matrix.zeros(field, 0, 0)


def shift_eps(x: DiffObject) -> Matrix:
    """eps of X'' = X^{+(n-1)}: identities above the diagonal, bottom row -eps^{n-1}, ..., -eps."""
    field, n, d = x.field, x.n, x.dim
    zero, one = Matrix.zeros(field, d, d), Matrix.identity(field, d)
    rows = []
    for i in range(n - 2):
        row = [zero] * (n - 1)
        row[i + 1] = one
        rows.append(row)
    rows.append([-x.power(n - 1 - j) for j in range(n - 1)])
    return block_matrix(field, rows) if d else Matrix.zeros(field, 0, 0)


def ses_proj(x: DiffObject) -> ShortExactSeq:
    """X' -> T(X) -> X with p' = (1, eps, ..., eps^{n-1})."""
    field, n, d = x.field, x.n, x.dim
    zero, one = Matrix.zeros(field, d, d), Matrix.identity(field, d)
    x1 = DiffObject(field, n, coshift_eps(x))
    tx = augment(d, field, n)
    grid = [[zero] * (n - 1) for _ in range(n)]
    for j in range(n - 1):
        grid[n - 1 - j][j] = one
        grid[n - 2 - j][j] = -x.eps
    i_mat = block_matrix(field, grid) if d else Matrix.zeros(field, 0, 0)
    p_mat = hstack(field, [x.power(k) for k in range(n)], rows=d)
    return ShortExactSeq(DiffMorphism(x1, tx, i_mat), DiffMorphism(tx, x, p_mat))


def ses_inj(x: DiffObject) -> ShortExactSeq:
    """X -> T(X) -> X'' with i'' = (eps^{n-1}; ...; eps; 1)."""
    field, n, d = x.field, x.n, x.dim
    zero, one = Matrix.zeros(field, d, d), Matrix.identity(field, d)
    x2 = DiffObject(field, n, shift_eps(x))
    tx = augment(d, field, n)
    i_mat = vstack(field, [x.power(n - 1 - k) for k in range(n)], cols=d)
    grid = [[zero] * n for _ in range(n - 1)]
    for k in range(n - 1):
        grid[k][n - k - 2] = one
        grid[k][n - k - 1] = -x.eps
    p_mat = block_matrix(field, grid) if d else Matrix.zeros(field, 0, 0)
    return ShortExactSeq(DiffMorphism(x, tx, i_mat), DiffMorphism(tx, x2, p_mat))


# -- classification -------------------------------------------------------

def rank_sequence(x: DiffObject) -> list[int]:
    """rank(eps^k) for k = 0..n."""
    return [x.power(k).rank() for k in range(x.n + 1)]


def jordan_type(x: DiffObject) -> JordanType:
    r = rank_sequence(x) + [0]
    parts = []
    for size in range(1, x.n + 1):
        at_least = r[size - 1] - r[size]
        at_least_next = r[size] - r[size + 1]
        parts.extend([size] * (at_least - at_least_next))
    jt = JordanType(tuple(parts))
    if jt.dim != x.dim:
        raise InvariantFailure("Jordan parts do not sum to the dimension")
    return jt


def jordan_chains(x: DiffObject) -> list[tuple[Matrix, int]]:
    """Cyclic generators (g, h): g, eps g, ..., eps^{h-1} g span a block J_h.

    Heights come out in decreasing order.  Generators of height h complete
    Ker eps^{h-1} plus the level-h parts of taller chains inside Ker eps^h.
    """
    field, n, d = x.field, x.n, x.dim
    kernels = [kernel_basis(x.power(k)) for k in range(n + 1)]
    gens: list[tuple[Matrix, int]] = []
    for h in range(n, 0, -1):
        cols = [kernels[h - 1].basis] + [x.power(ht - h) @ g for g, ht in gens]
        spanned = image_basis(hstack(field, cols, rows=d))
        count, reps = quotient_dim(kernels[h], spanned)
        for k in range(count):
            gens.append((reps.col(k), h))
    return gens


def jordan_basis(x: DiffObject) -> tuple[Matrix, JordanType]:
    """Invertible P with P^{-1} eps P = diag(J_h) over the returned parts."""
    chains = jordan_chains(x)
    cols = [x.power(k) @ g for g, h in chains for k in range(h)]
    p = hstack(x.field, cols, rows=x.dim)
    jt = JordanType(tuple(h for _, h in chains))
    canon = block_diag(x.field, [Matrix.lower_shift(x.field, h) for h in jt.parts])
    if not p.is_invertible() or x.eps @ p != p @ canon:
        raise InvariantFailure("Jordan basis construction failed")
    return p, jt


def is_projective(x: DiffObject) -> tuple[bool, DiffMorphism | None]:
    """Projective iff every Jordan block has size n; witness is an iso T(k^q) -> X."""
    jt = jordan_type(x)
    if any(p != x.n for p in jt.parts):
        return False, None
    q = len(jt.parts)
    gens = [g for g, _ in jordan_chains(x)]
    cols = [None] * (x.n * q)
    for j, g in enumerate(gens):
        for b in range(x.n):
            cols[b * q + j] = x.power(b) @ g
    mat = hstack(x.field, cols, rows=x.dim)
    witness = DiffMorphism(augment(q, x.field, x.n), x, mat)
    if not witness.is_iso():
        raise InvariantFailure("projectivity witness is not invertible")
    return True, witness


# -- biproducts -------------------------------------------------------------

def direct_sum(*objs: DiffObject) -> DiffObject:
    if not objs:
        raise ValueError("direct_sum needs at least one object")
    for o in objs[1:]:
        _same_category(objs[0], o)
    return DiffObject(objs[0].field, objs[0].n, block_diag(objs[0].field, [o.eps for o in objs]))


def biproduct(x: DiffObject, y: DiffObject):
    """X + Y with its injections (i1, i2) and projections (p1, p2)."""
    s = direct_sum(x, y)
    field = x.field
    ix, iy = Matrix.identity(field, x.dim), Matrix.identity(field, y.dim)
    zxy, zyx = Matrix.zeros(field, x.dim, y.dim), Matrix.zeros(field, y.dim, x.dim)
    i1 = DiffMorphism(x, s, vstack(field, [ix, zyx], cols=x.dim))
    i2 = DiffMorphism(y, s, vstack(field, [zxy, iy], cols=y.dim))
    p1 = DiffMorphism(s, x, hstack(field, [ix, zxy], rows=x.dim))
    p2 = DiffMorphism(s, y, hstack(field, [zyx, iy], rows=y.dim))
    return s, (i1, i2), (p1, p2)


def direct_sum_morphism(*fs: DiffMorphism) -> DiffMorphism:
    src = direct_sum(*(f.src for f in fs))
    dst = direct_sum(*(f.dst for f in fs))
    return DiffMorphism(src, dst, block_diag(src.field, [f.mat for f in fs]), check=False)


# -- idempotents on T(X) -------------------------------------------------------

def _block(m: Matrix, d: int, i: int, j: int) -> Matrix:
    return m.submatrix(i * d, (i + 1) * d, j * d, (j + 1) * d)


def split_idempotent(e: DiffMorphism) -> tuple[DiffMorphism, Matrix]:
    """Conjugate an idempotent endomorphism of T(X) to diag(e0, ..., e0).

    Sweeps the subdiagonals top to bottom; the k-th step conjugates by
    1 + N^k (x) (e0 b - b e0), b being the current k-th subdiagonal block.
    Returns (g, e0) with g e g^{-1} == T(e0).
    """
    tx = e.src
    if e.dst != tx or tx.block is None:
        raise NotAugmented("split_idempotent needs an endomorphism of an augmented object")
    if e.mat @ e.mat != e.mat:
        raise NotIdempotent("e o e != e")
    field, n, d = tx.field, tx.n, tx.block
    shift = Matrix.lower_shift(field, n)
    ident = Matrix.identity(field, n * d)
    f = e.mat
    g = ident
    e0 = _block(f, d, 0, 0)
    for k in range(1, n):
        b = _block(f, d, k, 0)
        c = e0 @ b - b @ e0
        if c.is_zero():
            continue
        gk = ident + kron(shift ** k, c)
        f = gk @ f @ gk.inverse()
        g = gk @ g
    target = kron(Matrix.identity(field, n), e0)
    if f != target:
        raise InvariantFailure("idempotent conjugation did not reach block-diagonal form")
    return DiffMorphism(tx, tx, g), e0


# -- lifting and extension ---------------------------------------------------------

def lift_through(p: DiffMorphism, f: DiffMorphism) -> DiffMorphism | None:
    """Some g: X -> B with p g == f, for p: B -> C and f: X -> C."""
    if p.dst != f.dst:
        raise DimensionError("p and f must share a target")
    op = kron(p.mat, Matrix.identity(p.field, f.src.dim))
    g = solve_in_hom(f.src, p.src, op, f.mat)
    if g is not None and p @ g != f:
        raise InvariantFailure("lift does not factor f")
    return g


def extend_along(i: DiffMorphism, f: DiffMorphism) -> DiffMorphism | None:
    """Some r: B -> Y with r i == f, for i: A -> B and f: A -> Y."""
    if i.src != f.src:
        raise DimensionError("i and f must share a source")
    op = kron(Matrix.identity(i.field, f.dst.dim), i.mat.T)
    r = solve_in_hom(i.dst, f.dst, op, f.mat)
    if r is not None and r @ i != f:
        raise InvariantFailure("extension does not restrict to f")
    return r


__all__ = [
    "DiffObject",
    "DiffMorphism",
    "JordanType",
    "ShortExactSeq",
    "Subspace",
    "make_diff_object",
    "jordan_block",
    "canonical_object",
    "zero_morphism",
    "hom_space_basis",
    "hom_matrix",
    "combine",
    "solve_in_hom",
    "sandwich_operator",
    "augment",
    "augment_morphism",
    "adjoint_phi",
    "adjoint_phi_inv",
    "adjoint_psi",
    "adjoint_psi_inv",
    "check_ses",
    "coshift_eps",
    "shift_eps",
    "ses_proj",
    "ses_inj",
    "rank_sequence",
    "jordan_type",
    "jordan_chains",
    "jordan_basis",
    "is_projective",
    "direct_sum",
    "biproduct",
    "direct_sum_morphism",
    "split_idempotent",
    "lift_through",
    "extend_along",
]
