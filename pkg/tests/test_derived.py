import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffn.core import (
    DiffMorphism,
    DiffObject,
    JordanType,
    augment,
    biproduct,
    canonical_object,
    direct_sum,
    direct_sum_morphism,
    jordan_block,
    jordan_type,
    zero_morphism,
)
from diffn.derived import (
    block_hom_k_dim,
    compact_generator,
    derived_hom_dim,
    homotopy_equivalence,
    homotopy_section,
    is_quasi_iso,
    minimal_model,
    theta_check,
    zero_detection,
    zero_routes,
)
from diffn.errors import OutOfRange
from diffn.exactla import Matrix
from diffn.generators import random_diff_object_typed, random_invertible, random_morphism, random_null_homotopic
from diffn.homotopy import hom_K, homology, homotopic, null_homotopy_witness
from diffn.rng import Xoshiro256
from helpers import FIELDS, Q, objects, seeds
from oracles import hom_k_dim_oracle, homology_dim_oracle, jordan_eps, shift_block


def _projection_onto_j1(n):
    j1 = jordan_block(Q, n, 1)
    s, _, (p1, _) = biproduct(j1, augment(1, Q, n))
    return j1, s, p1


# -- quasi-isomorphisms ------------------------------------------------------------

def test_qiso_examples():
    x = canonical_object(Q, 3, [2, 1])
    assert is_quasi_iso(x.identity()).is_qiso
    j1 = jordan_block(Q, 2, 1)
    v = is_quasi_iso(zero_morphism(j1, j1))
    assert not v.is_qiso and not v.cone_acyclic
    for n in (2, 3, 4):
        _, _, p1 = _projection_onto_j1(n)
        assert is_quasi_iso(p1).is_qiso


def _random_qiso(x, rng):
    """X -> X + T(k^m), an automorphism followed by the first inclusion, plus a null-homotopic map."""
    m = rng.below(3)
    s, (i1, _), _ = biproduct(x, augment(m, x.field, x.n))
    a = random_invertible(rng, x.field, x.dim) if x.dim else Matrix.zeros(x.field, 0, 0)
    y = DiffObject(x.field, x.n, a @ x.eps @ a.inverse()) if x.dim else x
    iso = DiffMorphism(x, y, a)
    _, (j1, _), _ = biproduct(y, augment(m, x.field, x.n))
    f = j1 @ iso
    return f + random_null_homotopic(f.src, f.dst, rng)[0]


@given(objects(max_dim=6), seeds)
def test_qiso_characterizations_agree(xt, seed):
    x, _ = xt
    rng = Xoshiro256(seed, "qiso", 0)
    y, _ = random_diff_object_typed(rng, x.field, x.n, 6)
    f = random_morphism(x, y, rng)
    v = is_quasi_iso(f)
    assert v.is_qiso == v.cone_acyclic == all(ok for _, _, ok in v.per_r_witness)
    assert is_quasi_iso(_random_qiso(x, rng)).is_qiso


def test_homotopy_section_examples():
    x = canonical_object(Q, 3, [2, 1])
    g, w = homotopy_section(x.identity())
    assert homotopic(g, x.identity())
    j1, s, p1 = _projection_onto_j1(2)
    g, w = homotopy_section(p1)
    assert homotopic(p1 @ g, j1.identity())
    assert w.f == p1 @ g - j1.identity()


@given(objects(max_dim=6), seeds)
def test_homotopy_section_of_random_qiso(xt, seed):
    x, _ = xt
    f = _random_qiso(x, Xoshiro256(seed, "sec", 0))
    g, w = homotopy_section(f)
    assert null_homotopy_witness(f @ g - f.dst.identity()) is not None
    assert w.f == f @ g - f.dst.identity()


# -- minimal models and homotopy equivalence ------------------------------------

def test_minimal_model_examples():
    m = minimal_model(augment(3, Q, 4))
    assert m.reduced.dim == 0 and m.free_rank == 3
    m = minimal_model(direct_sum(jordan_block(Q, 3, 2), jordan_block(Q, 3, 3)))
    assert jordan_type(m.reduced) == JordanType((2,)) and m.free_rank == 1
    x = canonical_object(Q, 3, [2, 1])
    m = minimal_model(x)
    assert m.reduced == x and m.include.mat == Matrix.identity(Q, 3) and m.project.mat == Matrix.identity(Q, 3)


@given(objects(max_dim=10))
def test_minimal_model_properties(xt):
    x, jt = xt
    m = minimal_model(x)
    assert jordan_type(m.reduced) == jt.stable(x.n)
    assert m.free_rank == jt.count(x.n)
    assert m.project @ m.include == m.reduced.identity()
    assert homotopic(m.include @ m.project, x.identity())
    assert m.splitting.is_iso()
    assert is_quasi_iso(m.include).is_qiso and is_quasi_iso(m.project).is_qiso


@given(objects(max_dim=6), st.data())
def test_homotopy_equivalence_maps(xt, data):
    x, jt = xt
    rng = Xoshiro256(data.draw(seeds), "heq", 0)
    # pad with a free summand so the pair is equivalent but not isomorphic
    y = direct_sum(x, augment(1 + rng.below(2), x.field, x.n))
    a, b = homotopy_equivalence(x, y)
    assert homotopic(b @ a, x.identity()) and homotopic(a @ b, y.identity())
    z, jz = random_diff_object_typed(rng, x.field, x.n, 6)
    assert (homotopy_equivalence(x, z) is not None) == (jt.stable(x.n) == jz.stable(x.n))


# -- compact generators and theta ---------------------------------------------------

def test_compact_generator_examples():
    assert compact_generator(1, Q, 3).eps == Matrix.zeros(Q, 1, 1)
    assert compact_generator(2, Q, 3) == jordan_block(Q, 3, 2)
    with pytest.raises(OutOfRange):
        compact_generator(3, Q, 3)
    with pytest.raises(OutOfRange):
        compact_generator(0, Q, 3)


def test_theta_examples():
    res = theta_check(jordan_block(Q, 3, 1), 1)
    assert res.dim_hom_K == res.dim_H == 1 and res.bijective
    for i in (1, 2, 3):
        res = theta_check(augment(2, Q, 4), i)
        assert res.dim_hom_K == res.dim_H == 0


@given(objects(max_dim=8))
def test_theta_bijective(xt):
    x, _ = xt
    for i in range(1, x.n):
        res = theta_check(x, i)
        assert res.bijective and res.dim_hom_K == res.dim_H == homology(x, i).dim


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_closed_form_validated_by_oracle(n):
    """dim Hom_K(J_i, J_j) = min(i, j) - max(i + j - n, 0) for all block pairs."""
    for field in (FIELDS[0], FIELDS[-1]):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                brute = hom_k_dim_oracle(shift_block(i), shift_block(j), n, field.p)
                assert brute == min(i, j) - max(i + j - n, 0)
                assert block_hom_k_dim(i, j, n) == brute
                assert hom_K(jordan_block(field, n, i), jordan_block(field, n, j)).dim == brute


def test_closed_form_agrees_with_homology_of_generator_targets():
    # Hom_K(J_i, X) equals H_(i)(X) for i < n; checked against the independent homology count
    for n in range(2, 6):
        for parts in ([1], [n - 1, 1], [n, 2 if n > 2 else 1], list(range(1, n + 1))):
            eps = jordan_eps(parts)
            for i in range(1, n):
                total = sum(min(i, h) - max(i + h - n, 0) for h in parts)
                assert total == homology_dim_oracle(eps, n, i, None)


# -- zero objects and derived Hom -------------------------------------------------

def test_zero_detection_examples():
    assert zero_detection(augment(2, Q, 3))
    assert not zero_detection(jordan_block(Q, 3, 2))
    assert zero_detection(DiffObject(Q, 3, Matrix.zeros(Q, 0, 0)))


@given(objects(max_dim=10))
def test_zero_routes_agree(xt):
    x, jt = xt
    routes = zero_routes(x)
    assert len(set(routes.values())) == 1
    assert routes["free"] == all(p == x.n for p in jt.parts)


@given(objects(max_dim=5), st.data())
def test_derived_hom_invariant_under_qiso(xt, data):
    x, _ = xt
    y, _ = data.draw(objects(field=x.field, n=x.n, max_dim=5))
    rng = Xoshiro256(data.draw(seeds), "dhom", 0)
    x2 = _random_qiso(x, rng).dst
    y2 = _random_qiso(y, rng).dst
    d = derived_hom_dim(x, y)
    assert derived_hom_dim(x2, y) == d == derived_hom_dim(x, y2)


@given(objects(max_dim=4), st.data())
def test_derived_hom_additive(xt, data):
    x, _ = xt
    y, _ = data.draw(objects(field=x.field, n=x.n, max_dim=4))
    z, _ = data.draw(objects(field=x.field, n=x.n, max_dim=4))
    assert derived_hom_dim(direct_sum(x, y), z) == derived_hom_dim(x, z) + derived_hom_dim(y, z)
    assert derived_hom_dim(z, direct_sum(x, y)) == derived_hom_dim(z, x) + derived_hom_dim(z, y)


def test_zero_differential_objects():
    # with eps = 0 every homotopy sum vanishes, so Hom_K is all of Hom
    for n in (2, 3, 4):
        x = DiffObject(Q, n, Matrix.zeros(Q, 2, 2))
        y = DiffObject(Q, n, Matrix.zeros(Q, 3, 3))
        assert derived_hom_dim(x, y) == 6
        assert hom_k_dim_oracle([[0] * 2] * 2, [[0] * 3] * 3, n) == 6
        assert direct_sum_morphism(x.identity(), y.identity()).is_iso()
