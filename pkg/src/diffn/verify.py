"""Seeded property suite.

Every property is a function of one :class:`Trial`, whose RNG stream is
derived from (seed, property name, trial index) alone.  Trials therefore
replay individually, in any order and in any process, and the report body
is a pure function of the configuration.
"""

from __future__ import annotations

import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable

from . import generators as gen
from .core import (
    DiffMorphism,
    DiffObject,
    adjoint_phi,
    adjoint_phi_inv,
    adjoint_psi,
    adjoint_psi_inv,
    augment,
    augment_morphism,
    biproduct,
    canonical_object,
    check_ses,
    combine,
    direct_sum,
    extend_along,
    hom_matrix,
    is_projective,
    jordan_block,
    jordan_type,
    lift_through,
    ses_inj,
    ses_proj,
    split_idempotent,
    zero_morphism,
)
from .derived import (
    block_hom_k_dim,
    derived_hom_dim,
    homotopy_equivalence,
    homotopy_section,
    is_quasi_iso,
    minimal_model,
    theta_check,
    zero_routes,
)
from .dfn import dump_bundle
from .errors import DiffnError
from .exactla import FieldSpec, Matrix, block_matrix, hstack, kernel_basis, kron, rref, solve_linear, vstack
from .homotopy import (
    HomotopyWitness,
    cone,
    coshift,
    factor_through_projective,
    factorization_from_witness,
    hom_K,
    hom_K_dim,
    homology,
    homology_map,
    homotopic,
    homotopy_equivalent,
    is_acyclic,
    les,
    null_homotopy_witness,
    projective_cover_map,
    shift,
    shift_morphism,
    witness_from_factorization,
)

# objects fed to constructions that multiply dimensions (cones, shifts of
# cones) are capped here so Hom systems stay a few hundred unknowns wide
SMALL_DIM = 6


class PropertyFailed(Exception):
    pass


class Trial:
    """One seeded instance: RNG stream, config and the objects worth reporting."""

    def __init__(self, cfg: gen.GenConfig, name: str, index: int):
        self.cfg = cfg
        self.name = name
        self.index = index
        self.rng = cfg.stream(name, index)
        self.field: FieldSpec = cfg.field
        self.n: int = cfg.n
        self.max_dim: int = cfg.max_dim
        self.kept: dict[str, object] = {}

    def keep(self, name: str, item):
        if isinstance(item, DiffMorphism):
            known = {id(v) for v in self.kept.values()}
            for end, obj in (("src", item.src), ("dst", item.dst)):
                if id(obj) not in known:
                    self.kept[f"{name}_{end}"] = obj
                    known.add(id(obj))
        self.kept[name] = item
        return item

    def check(self, cond: bool, message: str):
        if not cond:
            raise PropertyFailed(message)

    # -- instance helpers ----------------------------------------------------

    def dim_cap(self, cap: int | None) -> int:
        return self.max_dim if cap is None else min(self.max_dim, cap)

    def obj(self, name: str = "X", cap: int | None = None, free_bias: bool = False) -> DiffObject:
        """Random object; with free_bias one draw in three has only size-n blocks."""
        d = self.dim_cap(cap)
        if free_bias and self.rng.below(3) == 0:
            x = self.free_obj(d)
        else:
            x, _ = gen.random_diff_object_typed(self.rng, self.field, self.n, d)
        return self.keep(name, x)

    def free_obj(self, max_dim: int) -> DiffObject:
        q = self.rng.below(max_dim // self.n + 1)
        canon = canonical_object(self.field, self.n, [self.n] * q)
        p = gen.random_invertible(self.rng, self.field, canon.dim)
        return DiffObject(self.field, self.n, p @ canon.eps @ p.inverse())

    def mor(self, x: DiffObject, y: DiffObject, name: str = "f") -> DiffMorphism:
        return self.keep(name, gen.random_morphism(x, y, self.rng))

    def mat(self, rows: int, cols: int) -> Matrix:
        return gen.random_matrix(self.rng, self.field, rows, cols)

    def small(self, lo: int = 0, hi: int = 3) -> int:
        return self.rng.between(lo, hi)

    def automorphism(self, x: DiffObject, tries: int = 20000) -> DiffMorphism:
        """A random invertible endomorphism (identity if sampling is unlucky)."""
        for _ in range(tries):
            f = gen.random_morphism(x, x, self.rng)
            if f.is_iso():
                return f
        return x.identity()

    def qiso(self, x: DiffObject) -> DiffMorphism:
        """A quasi-isomorphism out of X, built one of several known ways."""
        kind = self.rng.below(4)
        if kind == 0:
            f = self.automorphism(x)
        elif kind == 1:
            f = minimal_model(x).project
        else:
            p = self.free_obj(self.n * 2)
            s, (i1, _), _ = biproduct(x, p)
            f = i1 if kind == 2 else self.automorphism(s) @ i1
        h, _ = gen.random_null_homotopic(f.src, f.dst, self.rng)
        return f + h


@dataclass(frozen=True)
class Property:
    name: str
    doc: str
    fn: Callable[[Trial], None]


REGISTRY: dict[str, Property] = {}


def prop(name: str):
    def register(fn):
        REGISTRY[name] = Property(name, (fn.__doc__ or "").strip().splitlines()[0], fn)
        return fn
    return register


# -- exact linear algebra ------------------------------------------------------

@prop("exactla_kernel_rank")
def _kernel_rank(t: Trial):
    """M times kernel basis is zero and rank + nullity = cols."""
    m = t.mat(t.small(0, t.max_dim), t.small(0, t.max_dim))
    k = kernel_basis(m)
    t.check((m @ k.basis).is_zero(), "M K != 0")
    t.check(m.rank() + k.dim == m.cols, "rank + nullity != cols")


@prop("exactla_rref_idempotent")
def _rref_idempotent(t: Trial):
    """rref(rref(M)) = rref(M)."""
    m = t.mat(t.small(0, t.max_dim), t.small(0, t.max_dim))
    r, _, _ = rref(m)
    t.check(rref(r)[0] == r, "rref is not idempotent")


@prop("exactla_solve")
def _solve(t: Trial):
    """A solution exists iff rank[A|b] = rank A, and solutions are exact."""
    rows = t.small(0, t.max_dim)
    a = t.mat(rows, t.small(0, t.max_dim))
    b = t.mat(rows, 1) if t.rng.coin() else a @ t.mat(a.cols, 1)
    x = solve_linear(a, b)
    solvable = hstack(t.field, [a, b], rows=rows).rank() == a.rank()
    t.check((x is not None) == solvable, "solvability verdict disagrees with ranks")
    if x is not None:
        t.check(a @ x == b, "A x != b")


# -- generators ------------------------------------------------------------------

@prop("generator_soundness")
def _generator_soundness(t: Trial):
    """Generated objects, morphisms, sequences and idempotents satisfy their invariants."""
    x, jt = gen.random_diff_object_typed(t.rng, t.field, t.n, t.max_dim)
    t.keep("X", x)
    t.check((x.eps ** t.n).is_zero(), "eps^n != 0")
    t.check(jordan_type(x) == jt, f"Jordan type {jordan_type(x)} differs from sampled {jt}")
    y = t.obj("Y")
    f = t.mor(x, y)
    t.check(y.eps @ f.mat == f.mat @ x.eps, "random morphism does not commute with eps")
    ses = gen.random_invariant_ses(x, t.rng)
    t.check(check_ses(ses.i, ses.p), "random invariant sequence is not short exact")
    t.check((ses.c.eps ** t.n).is_zero() and (ses.a.eps ** t.n).is_zero(), "sub/quotient not nilpotent")
    d = t.small(0, 3)
    e = gen.random_augmented_idempotent(t.rng, t.field, d, t.n)
    t.check(e.mat @ e.mat == e.mat, "generated idempotent is not idempotent")


# -- adjunctions -------------------------------------------------------------------

@prop("adjunction_roundtrip")
def _adjunction_roundtrip(t: Trial):
    """phi, phi^-1 and psi, psi^-1 are mutually inverse."""
    x = t.obj()
    d = t.small(0, 4)
    f = t.mat(d, x.dim)
    t.check(adjoint_phi_inv(adjoint_phi(x, f)) == f, "phi^-1 phi f != f")
    g = t.mor(x, augment(d, t.field, t.n), "g")
    t.check(adjoint_phi(x, adjoint_phi_inv(g)) == g, "phi phi^-1 g != g")
    h = t.mat(x.dim, d)
    t.check(adjoint_psi(adjoint_psi_inv(x, h)) == h, "psi psi^-1 h != h")
    k = t.mor(augment(d, t.field, t.n), x, "k")
    t.check(adjoint_psi_inv(x, adjoint_psi(k)) == k, "psi^-1 psi k != k")


@prop("adjunction_naturality")
def _adjunction_naturality(t: Trial):
    """The four naturality squares of phi and psi commute."""
    x, x2 = t.obj("X", cap=SMALL_DIM), t.obj("X2", cap=SMALL_DIM)
    a = t.mor(x, x2, "alpha")
    d, d2 = t.small(0, 3), t.small(0, 3)
    n = t.n
    # phi in the first variable: phi(f alpha) = phi(f) alpha
    f = t.mat(d, x2.dim)
    t.check(adjoint_phi(x, f @ a.mat) == adjoint_phi(x2, f) @ a, "phi not natural in X")
    # phi in the second variable: phi(beta f) = T(beta) phi(f)
    beta = t.mat(d2, d)
    f = t.mat(d, x.dim)
    t.check(adjoint_phi(x, beta @ f) == augment_morphism(beta, n) @ adjoint_phi(x, f), "phi not natural in Y")
    # psi in the object variable: psi(alpha h) = alpha psi(h)
    h = t.mor(augment(d, t.field, n), x, "h")
    t.check(adjoint_psi(a @ h) == a.mat @ adjoint_psi(h), "psi not natural in X")
    # psi in the linear variable: psi(h T(beta)) = psi(h) beta
    beta = t.mat(d, d2)
    t.check(adjoint_psi(h @ augment_morphism(beta, n)) == adjoint_psi(h) @ beta, "psi not natural in Y")


# -- canonical sequences ------------------------------------------------------------

@prop("ses_canonical")
def _ses_canonical(t: Trial):
    """ses_proj and ses_inj are short exact with nilpotent eps at every term."""
    x = t.obj()
    for label, ses in (("proj", ses_proj(x)), ("inj", ses_inj(x))):
        t.check(check_ses(ses.i, ses.p), f"ses_{label} is not short exact")
        for obj in (ses.a, ses.b, ses.c):
            t.check((obj.eps ** t.n).is_zero(), f"ses_{label}: eps^n != 0")


def displayed_forms(x: DiffObject) -> dict[str, Matrix]:
    """The six canonical-sequence matrices assembled entry pattern by entry pattern."""
    field, n, d = x.field, x.n, x.dim
    e = x.eps
    zero, one = Matrix.zeros(field, d, d), Matrix.identity(field, d)
    pw = [x.power(k) for k in range(n)]
    # i': anti-diagonal of 1s from bottom-left, -eps just above it
    i1 = [[one if r + c == n - 1 else -e if r + c == n - 2 else zero for c in range(n - 1)] for r in range(n)]
    p1 = [pw]
    eps1 = [[-pw[r + 1] if c == 0 else one if c == r + 1 else zero for c in range(n - 1)] for r in range(n - 1)]
    i2 = [[pw[n - 1 - r]] for r in range(n)]
    # p'': 1 on the anti-diagonal (row r, column n-2-r), -eps to its right
    p2 = [[one if c == n - 2 - r else -e if c == n - 1 - r else zero for c in range(n)] for r in range(n - 1)]
    eps2 = [
        [one if c == r + 1 else zero for c in range(n - 1)] if r < n - 2 else [-pw[n - 1 - c] for c in range(n - 1)]
        for r in range(n - 1)
    ]
    if d == 0:
        return {}
    grids = {"i'": i1, "p'": p1, "eps'": eps1, "i''": i2, "p''": p2, "eps''": eps2}
    return {k: block_matrix(field, g) for k, g in grids.items()}


@prop("ses_displayed_forms")
def _ses_displayed(t: Trial):
    """The canonical sequences match the block patterns of their defining displays."""
    x = t.obj()
    forms = displayed_forms(x)
    if not forms:
        return
    sp, si = ses_proj(x), ses_inj(x)
    got = {"i'": sp.i.mat, "p'": sp.p.mat, "eps'": sp.a.eps, "i''": si.i.mat, "p''": si.p.mat, "eps''": si.c.eps}
    for k, m in forms.items():
        t.check(got[k] == m, f"{k} differs from its displayed form")
    if t.n == 2:
        e, one = x.eps, Matrix.identity(t.field, x.dim)
        t.check(sp.i.mat == vstack(t.field, [-e, one]), "n=2: i' != (-eps; 1)")
        t.check(sp.p.mat == hstack(t.field, [one, e]), "n=2: p' != (1, eps)")
        t.check(sp.a.eps == -e and si.c.eps == -e, "n=2: shifted eps != -eps")
        t.check(si.i.mat == vstack(t.field, [e, one]), "n=2: i'' != (eps; 1)")
        t.check(si.p.mat == hstack(t.field, [one, -e]), "n=2: p'' != (1, -eps)")


# -- idempotents, classification, projectivity --------------------------------------

@prop("split_idempotent")
def _split_idempotent(t: Trial):
    """Commuting idempotents on T(X) are conjugate to T(e0) by an invertible g."""
    d = t.small(0, max(1, t.max_dim // t.n))
    e = t.keep("e", gen.random_augmented_idempotent(t.rng, t.field, d, t.n))
    g, e0 = split_idempotent(e)
    t.check(g.mat.is_invertible(), "conjugator is not invertible")
    conj = g.mat @ e.mat @ g.mat.inverse()
    t.check(conj == kron(Matrix.identity(t.field, t.n), e0), "g e g^-1 is not block diagonal")
    t.check(e0 @ e0 == e0, "diagonal block is not idempotent")


def hom_distance(x: DiffObject, y: DiffObject) -> int:
    """dim End X + dim End Y - 2 dim Hom(X, Y); zero whenever X and Y are isomorphic."""
    return hom_matrix(x, x).cols + hom_matrix(y, y).cols - 2 * hom_matrix(x, y).cols


@prop("jordan_complete_invariant")
def _jordan_complete(t: Trial):
    """Objects are isomorphic iff their Jordan types agree."""
    x, jt = gen.random_diff_object_typed(t.rng, t.field, t.n, t.max_dim)
    t.keep("X", x)
    if t.rng.coin():
        canon = canonical_object(t.field, t.n, jt.parts)
        p = gen.random_invertible(t.rng, t.field, canon.dim)
        y = t.keep("Y", DiffObject(t.field, t.n, p @ canon.eps @ p.inverse()))
    else:
        y = t.obj("Y")
    same = jordan_type(x) == jordan_type(y)
    if same:
        iso = _find_iso(t, x, y)
        t.check(iso is not None, "equal Jordan types but no isomorphism found")
        t.check(iso.is_iso(), "found map is not invertible")
    else:
        t.check(x.dim != y.dim or hom_distance(x, y) > 0, "different Jordan types yet Hom dimensions cannot tell them apart")


def _find_iso(t: Trial, x: DiffObject, y: DiffObject, tries: int = 20000) -> DiffMorphism | None:
    basis = hom_matrix(x, y)
    for _ in range(tries):
        f = combine(x, y, t.mat(basis.cols, 1))
        if f.is_iso():
            return DiffMorphism(x, y, f.mat)
    return None


@prop("projective_lifting")
def _projective_lifting(t: Trial):
    """Projective objects lift through surjections; others fail to lift id through p'_X."""
    x = t.obj(free_bias=True)
    proj, witness = is_projective(x)
    t.check(proj == all(p == t.n for p in jordan_type(x).parts), "verdict disagrees with Jordan parts")
    cover = projective_cover_map(x)
    lifted = lift_through(cover, x.identity())
    t.check((lifted is not None) == proj, "lifting id through p'_X disagrees with is_projective")
    if proj:
        t.check(witness.is_iso(), "projectivity witness not invertible")
        b = t.obj("B")
        ses = gen.random_invariant_ses(b, t.rng)
        f = t.mor(x, ses.c)
        g = lift_through(ses.p, f)
        t.check(g is not None and ses.p @ g == f, "projective object failed to lift through a surjection")


@prop("injective_extension")
def _injective_extension(t: Trial):
    """Injective objects extend along injections; others fail to extend id along i''_X."""
    x = t.obj(free_bias=True)
    proj, _ = is_projective(x)
    into = ses_inj(x).i
    ext = extend_along(into, x.identity())
    t.check((ext is not None) == proj, "extending id along i''_X disagrees with is_projective")
    if proj:
        b = t.obj("B")
        ses = gen.random_invariant_ses(b, t.rng)
        f = t.mor(ses.a, x)
        r = extend_along(ses.i, f)
        t.check(r is not None and r @ ses.i == f, "injective object failed to extend along an injection")


# -- homotopy -------------------------------------------------------------------------

@prop("nullhomotopy_factorization")
def _nullhomotopy_factorization(t: Trial):
    """A null-homotopy exists iff f factors through p'_Y, and the witnesses convert both ways."""
    x, y = t.obj("X"), t.obj("Y")
    if t.rng.coin():
        f, _ = gen.random_null_homotopic(x, y, t.rng)
        t.keep("f", f)
    else:
        f = t.mor(x, y)
    w = null_homotopy_witness(f)
    g = factor_through_projective(f)
    t.check((w is None) == (g is None), "witness and factorization existence disagree")
    if w is None:
        return
    cover = projective_cover_map(y)
    g1 = factorization_from_witness(w)
    t.check(cover @ g1 == f, "factorization from witness does not recover f")
    t.check(witness_from_factorization(g1) == w.s, "s != g_n")
    HomotopyWitness(f, witness_from_factorization(g))


@prop("homology_homotopy_invariance")
def _homology_invariance(t: Trial):
    """Homotopic maps induce equal maps on every H_(r)."""
    x, y = t.obj("X"), t.obj("Y")
    f, g, _ = gen.random_homotopic_pair(x, y, t.rng)
    t.keep("f", f)
    t.keep("g", g)
    for r in range(1, t.n):
        t.check(homology_map(f, r) == homology_map(g, r), f"H_({r})(f) != H_({r})(g)")


@prop("homotopic_iff_same_class")
def _homotopic_class(t: Trial):
    """homotopic(f, g) iff f and g have equal coordinates in Hom_K."""
    x, y = t.obj("X", cap=SMALL_DIM * 2), t.obj("Y", cap=SMALL_DIM * 2)
    f = t.mor(x, y)
    if t.rng.coin():
        g = DiffMorphism(x, y, f.mat + gen.random_null_homotopic(x, y, t.rng)[0].mat)
    else:
        g = gen.random_morphism(x, y, t.rng)
    t.keep("g", g)
    hk = hom_K(x, y)
    t.check(homotopic(f, g) == (hk.class_of(f) == hk.class_of(g)), "homotopic disagrees with Hom_K classes")


@prop("hom_k_projective_vanishing")
def _hom_k_projective(t: Trial):
    """Hom_K vanishes into and out of T(k^d)."""
    y = t.obj("Y", cap=SMALL_DIM * 2)
    d = t.small(0, 2)
    p = augment(d, t.field, t.n)
    t.check(hom_K_dim(p, y) == 0, "Hom_K(T(k^d), Y) != 0")
    t.check(hom_K_dim(y, p) == 0, "Hom_K(Y, T(k^d)) != 0")


@prop("cone_triangle")
def _cone_triangle(t: Trial):
    """Consecutive maps of X -> Y -> Cone(f) -> Sigma X compose to zero up to homotopy."""
    x, y = t.obj("X", cap=SMALL_DIM), t.obj("Y", cap=SMALL_DIM)
    f = t.mor(x, y)
    tri = cone(f)
    c = tri.cone
    t.check((c.eps ** t.n).is_zero() and (tri.shifted.eps ** t.n).is_zero(), "cone or shift not nilpotent")
    t.check((tri.v @ tri.u).is_zero(), "v u != 0")
    t.check(homotopic(tri.u @ f, zero_morphism(x, c)), "u f is not null-homotopic")
    sf = shift_morphism(f)
    t.check(homotopic(sf @ tri.v, zero_morphism(c, sf.dst)), "Sigma f o v is not null-homotopic")


@prop("cone_of_iso_acyclic")
def _cone_iso(t: Trial):
    """The cone of an isomorphism is acyclic."""
    x = t.obj()
    a = t.keep("a", t.automorphism(x))
    t.check(is_acyclic(cone(a).cone), "cone of an isomorphism has homology")


@prop("cone_of_zero")
def _cone_zero(t: Trial):
    """Cone(0: X -> Y) has the Jordan type of Y + Sigma X."""
    x, y = t.obj("X", cap=SMALL_DIM), t.obj("Y", cap=SMALL_DIM)
    c = cone(zero_morphism(x, y)).cone
    t.check(jordan_type(c) == jordan_type(direct_sum(y, shift(x))), "Cone(0) is not Y + Sigma X")


@prop("shift_homology_duality")
def _shift_duality(t: Trial):
    """dim H_(r)(Sigma X) = dim H_(n-r)(X) for every r."""
    x = t.obj()
    sx = shift(x)
    for r in range(1, t.n):
        t.check(homology(sx, r).dim == homology(x, t.n - r).dim, f"duality fails at r={r}")
        # the same count from the hexagon of ses_inj, whose middle term is acyclic
        win = les(ses_inj(x), t.n - r)
        t.check(win.all_exact, "les of ses_inj not exact")
        t.check(win.terms[2].dim == win.terms[3].dim and win.maps[2].is_invertible(), "connecting map of ses_inj not invertible")


@prop("coshift_inverse")
def _coshift_inverse(t: Trial):
    """Sigma^-1 Sigma X and Sigma Sigma^-1 X are homotopy equivalent to X."""
    x = t.obj()
    t.check(homotopy_equivalent(coshift(shift(x)), x), "coshift(shift X) not equivalent to X")
    t.check(homotopy_equivalent(shift(coshift(x)), x), "shift(coshift X) not equivalent to X")


@prop("les_exactness")
def _les_exactness(t: Trial):
    """The homology hexagon is exact at all six joints for every r."""
    x = t.obj("X", cap=SMALL_DIM * 2)
    b = t.obj("B")
    seqs = [("ses_proj", ses_proj(x)), ("ses_inj", ses_inj(x)), ("invariant", gen.random_invariant_ses(b, t.rng))]
    t.keep("invariant_i", seqs[2][1].i)
    t.keep("invariant_p", seqs[2][1].p)
    for label, ses in seqs:
        for r in range(1, t.n):
            win = les(ses, r)
            t.check(win.all_exact, f"{label}: hexagon not exact at r={r}: {win.exact}")


@prop("homotopy_equivalence_maps")
def _homotopy_equivalence(t: Trial):
    """Equivalent objects come with maps inverse up to homotopy; inequivalent ones with none."""
    x = t.obj("X")
    if t.rng.coin():
        p = t.free_obj(t.n * 2)
        y = t.keep("Y", direct_sum(x, p))
    else:
        y = t.obj("Y")
    pair = homotopy_equivalence(x, y)
    t.check((pair is not None) == homotopy_equivalent(x, y), "equivalence maps disagree with stable Jordan types")
    if pair is not None:
        a, b = pair
        t.check(homotopic(b @ a, x.identity()), "b a is not homotopic to 1")
        t.check(homotopic(a @ b, y.identity()), "a b is not homotopic to 1")


# -- derived -------------------------------------------------------------------------

def _some_morphism(t: Trial, x: DiffObject) -> DiffMorphism:
    if t.rng.coin():
        return t.keep("f", t.qiso(x))
    return t.mor(x, t.obj("Y"))


@prop("qiso_consistency")
def _qiso_consistency(t: Trial):
    """Per-r homology isomorphism and cone acyclicity agree."""
    x = t.obj("X", cap=SMALL_DIM * 2)
    f = _some_morphism(t, x)
    v = is_quasi_iso(f)
    t.check(v.is_qiso == v.cone_acyclic, "characterizations disagree")
    t.check(v.is_qiso == all(ok for _, _, ok in v.per_r_witness), "per-r verdicts disagree")


@prop("two_out_of_three")
def _two_out_of_three(t: Trial):
    """If two of f, g, g f are quasi-isomorphisms so is the third."""
    x = t.obj("X", cap=SMALL_DIM)
    f = _some_morphism(t, x)
    g = t.keep("g", t.qiso(f.dst) if t.rng.coin() else gen.random_morphism(f.dst, t.obj("Z", cap=SMALL_DIM * 2), t.rng))
    q = [is_quasi_iso(m).is_qiso for m in (f, g, g @ f)]
    t.check(sum(q) != 2, f"two of three quasi-isomorphisms but not the third: {q}")


@prop("homotopy_section")
def _homotopy_section(t: Trial):
    """Every generated quasi-isomorphism has g with f g homotopic to 1."""
    x = t.obj("X", cap=SMALL_DIM * 2)
    f = t.keep("f", t.qiso(x))
    g, w = homotopy_section(f)
    t.check(w.f == f @ g - f.dst.identity(), "witness certifies the wrong map")
    t.check(homotopic(f @ g, f.dst.identity()), "f g is not homotopic to 1")


@prop("minimal_model")
def _minimal_model(t: Trial):
    """X splits as reduced + T(k^q), and the inclusion of the reduced part is a quasi-isomorphism."""
    x = t.obj(free_bias=True)
    m = minimal_model(x)
    t.check(all(p != t.n for p in jordan_type(m.reduced).parts), "reduced part has free blocks")
    t.check(m.splitting.is_iso(), "splitting is not an isomorphism")
    t.check(is_quasi_iso(m.include).is_qiso, "include is not a quasi-isomorphism")
    t.check(m.project @ m.include == m.reduced.identity(), "project include != 1")


@prop("theta_claim")
def _theta_claim(t: Trial):
    """Hom_K(T^i(k), X) -> H_(i)(X) is a bijection for every i."""
    x = t.obj()
    for i in range(1, t.n):
        res = theta_check(x, i)
        t.check(res.dim_hom_K == res.dim_H, f"i={i}: dim Hom_K {res.dim_hom_K} != dim H {res.dim_H}")
        t.check(res.bijective, f"i={i}: theta is not bijective")


@prop("theta_closed_form")
def _theta_closed(t: Trial):
    """dim Hom_K(J_i, J_j) = min(i, j) - max(i + j - n, 0)."""
    i, j = t.small(1, t.n), t.small(1, t.n)
    got = hom_K_dim(jordan_block(t.field, t.n, i), jordan_block(t.field, t.n, j))
    t.check(got == block_hom_k_dim(i, j, t.n), f"Hom_K(J_{i}, J_{j}) has dim {got}")


@prop("zero_tetrachotomy")
def _zero_tetrachotomy(t: Trial):
    """Acyclic, free, contractible and generator-orthogonal are the same condition."""
    x = t.obj(free_bias=True)
    routes = zero_routes(x)
    t.check(len(set(routes.values())) == 1, f"routes disagree: {routes}")


@prop("derived_hom_invariance")
def _derived_hom_invariance(t: Trial):
    """dim Hom_D is unchanged by replacing an argument with a homotopy-equivalent object."""
    x, y = t.obj("X", cap=SMALL_DIM * 2), t.obj("Y", cap=SMALL_DIM * 2)
    base = derived_hom_dim(x, y)
    p = t.free_obj(t.n * 2)
    x2 = t.keep("X2", direct_sum(x, p))
    y2 = t.keep("Y2", direct_sum(p, y))
    t.check(derived_hom_dim(x2, y) == base, "changed by a free summand in the source")
    t.check(derived_hom_dim(x, y2) == base, "changed by a free summand in the target")


@prop("coproduct_compatibility")
def _coproduct(t: Trial):
    """Hom_K(T^i(k), X + Y) = Hom_K(T^i(k), X) + Hom_K(T^i(k), Y)."""
    x, y = t.obj("X"), t.obj("Y")
    s = direct_sum(x, y)
    for i in range(1, t.n):
        g = jordan_block(t.field, t.n, i)
        t.check(hom_K_dim(g, s) == hom_K_dim(g, x) + hom_K_dim(g, y), f"not additive at i={i}")


@prop("zero_differential_k_projective")
def _zero_differential(t: Trial):
    """(k^d, 0) has no nonzero homotopy classes into acyclic objects."""
    d = t.small(0, t.max_dim)
    z = DiffObject(t.field, t.n, Matrix.zeros(t.field, d, d))
    a = t.keep("A", t.free_obj(t.max_dim))
    t.check(is_acyclic(a), "free object has homology")
    t.check(hom_K_dim(z, a) == 0, "Hom_K((k^d, 0), acyclic) != 0")


# -- runner ---------------------------------------------------------------------------

@dataclass
class Failure:
    trial: int
    message: str
    counterexample: str


@dataclass
class PropertyRecord:
    name: str
    trials: int
    failures: list[Failure] = dc_field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class VerifyReport:
    cfg: gen.GenConfig
    records: list[PropertyRecord]
    replay: int | None = None

    @property
    def failed(self) -> int:
        return sum(len(r.failures) for r in self.records)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def body(self) -> str:
        """Deterministic report text; wall times are deliberately absent."""
        c = self.cfg
        runs = f"trial={self.replay}" if self.replay is not None else f"trials={c.trials}"
        lines = [f"diffn-verify v1 seed={c.seed} field={c.field} n={c.n} max_dim={c.max_dim} {runs}"]
        for r in self.records:
            status = "PASS" if not r.failures else "FAIL"
            lines.append(f"{status}\t{r.name}\ttrials={r.trials}\tfailures={len(r.failures)}")
        for r in self.records:
            for f in r.failures:
                lines.append(f"failure\t{r.name}\ttrial={f.trial}\t{f.message}")
                lines.append(f"  rerun: diffn verify --seed {c.seed} --field {c.field} --n {c.n} "
                             f"--max-dim {c.max_dim} --only {r.name} --trial {f.trial}")
                lines.extend("  " + ln for ln in f.counterexample.splitlines())
        total = sum(r.trials for r in self.records)
        lines.append(f"summary\tproperties={len(self.records)}\ttrials={total}\tfailures={self.failed}")
        return "\n".join(lines) + "\n"

    def timings(self) -> str:
        return "".join(f"{r.name}\t{r.wall_time:.3f}s\n" for r in self.records)


def run_trial(cfg: gen.GenConfig, name: str, index: int) -> Failure | None:
    t = Trial(cfg, name, index)
    try:
        REGISTRY[name].fn(t)
    except PropertyFailed as exc:
        message = str(exc)
    except (DiffnError, ArithmeticError, ValueError) as exc:
        message = f"{type(exc).__name__}: {exc}"
    except Exception as exc:  # a crash is a failure too, reported with its location
        frame = traceback.extract_tb(exc.__traceback__)[-1]
        message = f"{type(exc).__name__}: {exc} (at {frame.name}:{frame.lineno})"
    else:
        return None
    try:
        bundle = dump_bundle(t.kept)
    except Exception as exc:
        bundle = f"(counterexample not serializable: {exc})"
    return Failure(index, message, bundle)


def run_property(cfg: gen.GenConfig, name: str, trial_indices: list[int]) -> PropertyRecord:
    start = time.perf_counter()
    failures = [f for f in (run_trial(cfg, name, k) for k in trial_indices) if f is not None]
    return PropertyRecord(name, len(trial_indices), failures, time.perf_counter() - start)


def select(only: list[str] | None) -> list[str]:
    if not only:
        return sorted(REGISTRY)
    unknown = [o for o in only if o not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown properties: {', '.join(unknown)}")
    return sorted(set(only))


def run_verify(cfg: gen.GenConfig, only: list[str] | None = None, trial: int | None = None,
               jobs: int = 1) -> VerifyReport:
    """Run the selected properties; ``trial`` replays one trial index only."""
    names = select(only)
    indices = [trial] if trial is not None else list(range(cfg.trials))
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_property, [cfg] * len(names), names, [indices] * len(names)))
    else:
        records = [run_property(cfg, name, indices) for name in names]
    records.sort(key=lambda r: r.name)
    return VerifyReport(cfg, records, trial)


__all__ = ["REGISTRY", "Property", "Trial", "VerifyReport", "PropertyRecord", "Failure", "run_verify", "run_trial",
           "displayed_forms", "hom_distance"]
