"""Random instance generators driven by :class:`~diffn.rng.Xoshiro256`.

Every generator takes the RNG state explicitly, so a trial is fully
determined by (seed, property name, trial index) and its config.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    DiffMorphism,
    DiffObject,
    JordanType,
    ShortExactSeq,
    augment,
    canonical_object,
    combine,
    hom_matrix,
)
from .errors import InvariantFailure
from .exactla import FieldSpec, Matrix, Subspace, hstack, image_basis, kron, quotient_dim, solve_matrix
from .homotopy import homotopy_sum
from .rng import Xoshiro256

# rationals are drawn from this small integer range to keep entries readable
Q_RANGE = 3


@dataclass(frozen=True)
class GenConfig:
    seed: int
    field: FieldSpec
    n: int
    max_dim: int
    trials: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_dim < 1:
            raise ValueError("max_dim must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    def stream(self, label: str, index: int) -> Xoshiro256:
        return Xoshiro256(self.seed, label, index)


def random_scalar(rng: Xoshiro256, field: FieldSpec):
    if field.p is None:
        return rng.between(-Q_RANGE, Q_RANGE)
    return rng.below(field.p)


def random_matrix(rng: Xoshiro256, field: FieldSpec, rows: int, cols: int) -> Matrix:
    return Matrix.from_flat(field, rows, cols, [random_scalar(rng, field) for _ in range(rows * cols)])


def random_invertible(rng: Xoshiro256, field: FieldSpec, d: int) -> Matrix:
    """Uniform over GL_d(p) by rejection; over Q a product P L D U of bounded height.

    Dense random rationals make exact elimination pay for coefficient growth,
    so over Q the factors are a permutation, unit-triangular L and U with
    entries in -1..1, and a diagonal with entries in {-2, -1, 1, 2} (which
    puts halves into the inverse).
    """
    if field.p is not None:
        while True:
            m = random_matrix(rng, field, d, d)
            if m.is_invertible():
                return m
    perm = list(range(d))
    for i in range(d - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    lower = [[1 if i == j else rng.between(-1, 1) if j < i else 0 for j in range(d)] for i in range(d)]
    upper = [[1 if i == j else rng.between(-1, 1) if j > i else 0 for j in range(d)] for i in range(d)]
    diag = [[rng.choice((-2, -1, 1, 2)) if i == j else 0 for j in range(d)] for i in range(d)]
    p = Matrix.from_rows(field, [[1 if perm[i] == j else 0 for j in range(d)] for i in range(d)], cols=d)
    return p @ Matrix.from_rows(field, lower, cols=d) @ Matrix.from_rows(field, diag, cols=d) @ Matrix.from_rows(field, upper, cols=d)


def random_jordan_type(rng: Xoshiro256, n: int, max_dim: int) -> JordanType:
    """Total dimension uniform in 0..max_dim, then parts uniform in 1..min(n, rest)."""
    rest = rng.below(max_dim + 1)
    parts = []
    while rest > 0:
        part = 1 + rng.below(min(n, rest))
        parts.append(part)
        rest -= part
    return JordanType(tuple(parts))


def random_diff_object_typed(rng: Xoshiro256, field: FieldSpec, n: int, max_dim: int) -> tuple[DiffObject, JordanType]:
    """A random object together with the Jordan type it was built from."""
    jt = random_jordan_type(rng, n, max_dim)
    canon = canonical_object(field, n, jt.parts)
    p = random_invertible(rng, field, canon.dim)
    obj = DiffObject(field, n, p @ canon.eps @ p.inverse())
    return obj, jt


def random_diff_object(cfg: GenConfig, rng: Xoshiro256) -> DiffObject:
    return random_diff_object_typed(rng, cfg.field, cfg.n, cfg.max_dim)[0]


def random_morphism(x: DiffObject, y: DiffObject, rng: Xoshiro256) -> DiffMorphism:
    basis = hom_matrix(x, y)
    coeffs = random_matrix(rng, x.field, basis.cols, 1)
    f = combine(x, y, coeffs)
    return DiffMorphism(x, y, f.mat)


def random_homotopic_pair(x: DiffObject, y: DiffObject, rng: Xoshiro256) -> tuple[DiffMorphism, DiffMorphism, Matrix]:
    """(f, g, s) with g = f + sum_k eps_Y^{n-1-k} s eps_X^k."""
    f = random_morphism(x, y, rng)
    s = random_matrix(rng, x.field, y.dim, x.dim)
    g = DiffMorphism(x, y, f.mat + homotopy_sum(x, y, s))
    return f, g, s


def random_null_homotopic(x: DiffObject, y: DiffObject, rng: Xoshiro256) -> tuple[DiffMorphism, Matrix]:
    s = random_matrix(rng, x.field, y.dim, x.dim)
    return DiffMorphism(x, y, homotopy_sum(x, y, s)), s


def _generator_count(rng: Xoshiro256, dim: int) -> int:
    # geometric bias toward few generators, capped at dim
    k = 1
    while k < dim and rng.coin():
        k += 1
    return k


def invariant_ses(b: DiffObject, vectors: Matrix) -> ShortExactSeq:
    """0 -> A -> B -> B/A -> 0 with A the eps-closure of the given columns."""
    field = b.field
    krylov = hstack(field, [b.power(k) @ vectors for k in range(b.n)], rows=b.dim)
    sub = image_basis(krylov)
    a_basis = sub.basis
    _, comp = quotient_dim(Subspace.full(field, b.dim), sub)
    frame = hstack(field, [a_basis, comp], rows=b.dim)
    coords = frame.inverse()
    k = a_basis.cols
    proj = coords.submatrix(k, b.dim, 0, b.dim)

    eps_a = solve_matrix(a_basis, b.eps @ a_basis)
    if eps_a is None:
        raise InvariantFailure("eps-closure is not invariant")
    a = DiffObject(field, b.n, eps_a)
    c = DiffObject(field, b.n, proj @ b.eps @ comp)
    return ShortExactSeq(DiffMorphism(a, b, a_basis), DiffMorphism(b, c, proj))


def random_invariant_ses(b: DiffObject, rng: Xoshiro256) -> ShortExactSeq:
    k = _generator_count(rng, b.dim) if b.dim else 0
    return invariant_ses(b, random_matrix(rng, b.field, b.dim, k))


def random_augmented_automorphism(rng: Xoshiro256, field: FieldSpec, d: int, n: int) -> Matrix:
    """Block lower-Toeplitz sum_k N^k (x) A_k with A_0 invertible."""
    shift = Matrix.lower_shift(field, n)
    total = kron(Matrix.identity(field, n), random_invertible(rng, field, d))
    for k in range(1, n):
        total = total + kron(shift ** k, random_matrix(rng, field, d, d))
    return total


def random_idempotent(rng: Xoshiro256, field: FieldSpec, d: int) -> Matrix:
    q = random_invertible(rng, field, d)
    rank = rng.below(d + 1)
    diag = Matrix.from_flat(field, d, d, [1 if i == j and i < rank else 0 for i in range(d) for j in range(d)])
    return q @ diag @ q.inverse()


def random_augmented_idempotent(rng: Xoshiro256, field: FieldSpec, d: int, n: int) -> DiffMorphism:
    """An idempotent endomorphism of T(k^d) commuting with eps, off block-diagonal form."""
    tx = augment(d, field, n)
    a = random_augmented_automorphism(rng, field, d, n)
    e0 = random_idempotent(rng, field, d)
    mat = a @ kron(Matrix.identity(field, n), e0) @ a.inverse()
    return DiffMorphism(tx, tx, mat)


__all__ = [
    "GenConfig",
    "random_scalar",
    "random_matrix",
    "random_invertible",
    "random_jordan_type",
    "random_diff_object",
    "random_diff_object_typed",
    "random_morphism",
    "random_homotopic_pair",
    "random_null_homotopic",
    "invariant_ses",
    "random_invariant_ses",
    "random_augmented_automorphism",
    "random_idempotent",
    "random_augmented_idempotent",
]
