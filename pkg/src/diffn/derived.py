"""Quasi-isomorphisms, minimal models and derived Hom at finite dimension.

Over a field every finite-dimensional object splits as a sum of Jordan
blocks J_i.  Blocks with i < n are K-projective (Hom_K(J_i, -) computes
H_(i)) and J_n is projective, so every object is K-projective: derived Hom
spaces are computed in the homotopy category directly and no resolution is
ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    DiffMorphism,
    DiffObject,
    augment,
    canonical_object,
    combine,
    direct_sum,
    hom_matrix,
    jordan_basis,
    jordan_block,
    jordan_chains,
    jordan_type,
)
from .errors import InvariantFailure, OutOfRange
from .exactla import FieldSpec, Matrix, hstack, solve_linear
from .homotopy import (
    HomotopyWitness,
    cone,
    hom_K,
    homology,
    homology_map,
    is_acyclic,
    null_homotopy_witness,
    null_operator,
)


@dataclass(frozen=True)
class QisoVerdict:
    is_qiso: bool
    per_r_witness: tuple[tuple[int, Matrix, bool], ...]
    cone_acyclic: bool


def is_quasi_iso(f: DiffMorphism) -> QisoVerdict:
    """Both characterizations: H_(r)(f) invertible for all r, and Cone(f) acyclic."""
    per_r = []
    for r in range(1, f.n):
        m = homology_map(f, r)
        per_r.append((r, m, m.is_invertible()))
    by_homology = all(ok for _, _, ok in per_r)
    acyclic = is_acyclic(cone(f).cone)
    if by_homology != acyclic:
        raise InvariantFailure("homology and cone characterizations of quasi-isomorphism disagree")
    return QisoVerdict(by_homology, tuple(per_r), acyclic)


def homotopy_section(f: DiffMorphism) -> tuple[DiffMorphism, HomotopyWitness]:
    """g: Y -> X with f g ~ 1_Y, solved jointly for g and the homotopy s.

    The returned witness certifies f g - 1_Y.
    """
    x, y = f.src, f.dst
    field = x.field
    basis = hom_matrix(y, x)
    cols = [(f.mat @ basis.col(k).reshape(x.dim, y.dim)).reshape(y.dim * y.dim, 1) for k in range(basis.cols)]
    cols.append(-null_operator(y, y))
    system = hstack(field, cols, rows=y.dim * y.dim)
    rhs = Matrix.identity(field, y.dim).reshape(y.dim * y.dim, 1)
    sol = solve_linear(system, rhs)
    if sol is None:
        raise InvariantFailure("no homotopy section exists; f is not a quasi-isomorphism")
    m = basis.cols
    g = combine(y, x, sol.submatrix(0, m, 0, 1))
    s = sol.submatrix(m, sol.rows, 0, 1).reshape(y.dim, y.dim)
    return g, HomotopyWitness(f @ g - y.identity(), s)


@dataclass(frozen=True)
class MinimalModel:
    """X split as reduced + free, with reduced -include-> X -project-> reduced."""

    reduced: DiffObject
    include: DiffMorphism
    project: DiffMorphism
    free_rank: int
    witness: HomotopyWitness
    splitting: DiffMorphism


def minimal_model(x: DiffObject) -> MinimalModel:
    field, n = x.field, x.n
    p, jt = jordan_basis(x)
    free_rank = jt.count(n)
    kept = [h for h in jt.parts if h != n]
    # free chains come first because jordan_basis orders parts decreasingly
    split = free_rank * n
    reduced = canonical_object(field, n, kept)
    pinv = p.inverse()
    include = DiffMorphism(reduced, x, p.submatrix(0, x.dim, split, x.dim))
    project = DiffMorphism(x, reduced, pinv.submatrix(split, x.dim, 0, x.dim))
    if project @ include != reduced.identity():
        raise InvariantFailure("project o include != 1")
    w = null_homotopy_witness(x.identity() - include @ project)
    if w is None:
        raise InvariantFailure("include o project is not homotopic to the identity")

    gens = [g for g, h in jordan_chains(x) if h == n]
    free_cols = [None] * split
    for j, g in enumerate(gens):
        for b in range(n):
            free_cols[b * free_rank + j] = x.power(b) @ g
    mat = hstack(field, [include.mat] + free_cols, rows=x.dim)
    splitting = DiffMorphism(direct_sum(reduced, augment(free_rank, field, n)), x, mat)
    if not splitting.is_iso():
        raise InvariantFailure("reduced + free splitting is not an isomorphism")
    return MinimalModel(reduced, include, project, free_rank, w, splitting)


def homotopy_equivalence(x: DiffObject, y: DiffObject) -> tuple[DiffMorphism, DiffMorphism] | None:
    """Maps a: X -> Y, b: Y -> X inverse up to homotopy, or None if none exist."""
    mx, my = minimal_model(x), minimal_model(y)
    if mx.reduced != my.reduced:
        return None
    a = DiffMorphism(x, y, my.include.mat @ mx.project.mat)
    b = DiffMorphism(y, x, mx.include.mat @ my.project.mat)
    return a, b


def compact_generator(i: int, field: FieldSpec, n: int) -> DiffObject:
    """T^i(k) = (k^i, lower shift)."""
    if not 1 <= i <= n - 1:
        raise OutOfRange(f"generator index must lie in 1..{n - 1}, got {i}")
    return jordan_block(field, n, i)


@dataclass(frozen=True)
class ThetaResult:
    i: int
    dim_hom_K: int
    dim_H: int
    theta: Matrix
    bijective: bool


def theta_check(x: DiffObject, i: int) -> ThetaResult:
    """Hom_K(T^i(k), X) -> H_(i)(X), f |-> class of f e_1, checked to be bijective."""
    g = compact_generator(i, x.field, x.n)
    hk = hom_K(g, x)
    h = homology(x, i)
    firsts = []
    for f in hk.rep_morphisms():
        f1 = f.mat.col(0)
        if not (x.power(i) @ f1).is_zero():
            raise InvariantFailure("theta(f) is not a cycle")
        firsts.append(f1)
    theta = h.coordinates(hstack(x.field, firsts, rows=x.dim))

    # surjectivity, constructively: every class lifts to (v, eps v, ..., eps^{i-1} v)
    for k in range(h.dim):
        v = h.quot_reps.col(k)
        f = DiffMorphism(g, x, hstack(x.field, [x.power(j) @ v for j in range(i)], rows=x.dim))
        if h.coordinates(f.mat.col(0)) != Matrix.unit(x.field, h.dim, k):
            raise InvariantFailure("theta does not hit the expected class")
    return ThetaResult(i, hk.dim, h.dim, theta, theta.is_invertible())


def block_hom_k_dim(i: int, j: int, n: int) -> int:
    """dim Hom_K(J_i, J_j) in closed form."""
    return min(i, j) - max(i + j - n, 0)


def derived_hom_dim(x: DiffObject, y: DiffObject) -> int:
    """dim Hom_D(X, Y); equals dim Hom_K(X, Y) since X is K-projective."""
    return hom_K(x, y).dim


def zero_routes(x: DiffObject) -> dict[str, bool]:
    return {
        "generators": all(theta_check(x, i).dim_hom_K == 0 for i in range(1, x.n)),
        "acyclic": is_acyclic(x),
        "free": all(p == x.n for p in jordan_type(x).parts),
        "contractible": null_homotopy_witness(x.identity()) is not None,
    }


def zero_detection(x: DiffObject) -> bool:
    """Is X zero in the derived category?  Four independent routes must agree."""
    routes = zero_routes(x)
    if len(set(routes.values())) != 1:
        raise InvariantFailure(f"zero-object routes disagree: {routes}")
    return routes["acyclic"]


__all__ = [
    "QisoVerdict",
    "MinimalModel",
    "ThetaResult",
    "is_quasi_iso",
    "homotopy_section",
    "minimal_model",
    "homotopy_equivalence",
    "compact_generator",
    "theta_check",
    "block_hom_k_dim",
    "derived_hom_dim",
    "zero_routes",
    "zero_detection",
]
