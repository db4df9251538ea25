import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ainfqi.category import (
    CategoryError, DgFunctor, Morphism, compose_elements, differential, functor_from_images, identity_functor,
    validate_category, validate_functor,
)
from ainfqi.fixtures import constant_functor, fix_arrow, fix_contract, fix_iso, fix_pt
from ainfqi.generate import InstanceSpec, generate_equivalence
from ainfqi.graded import GradedMap, compose
from ainfqi.linalg import QQ


@pytest.mark.parametrize("build", [fix_pt, fix_arrow, fix_contract, fix_iso])
def test_fixtures_valid(build):
    assert validate_category(build()).ok


def test_corrupted_unit_reported():
    rep = validate_category(fix_arrow(unit_coefficient=2))
    assert "unit" in rep.kinds()
    assert any("u" in v.detail for v in rep.violations if v.kind == "unit")


def test_contract_end_differential_squares_to_zero():
    d = fix_contract().hom("A", "A").differential
    assert compose(d, d).is_zero()


def test_contract_h_squared_is_zero():
    c = fix_contract()
    h = c.element("A", "A", {"h_A": 1})
    assert all(x == 0 for x in compose_elements(c, h, h).vec)


def test_contract_h_differential():
    # d(h_A) = -id_A in End(A)
    c = fix_contract()
    assert differential(c, c.element("A", "A", {"h_A": 1})).vec == c.element("A", "A", {"id_A": -1}).vec


def test_compose_unit_and_zero():
    c = fix_arrow()
    u = c.element("a", "b", {"u": 1})
    assert compose_elements(c, c.identity("b"), u) == u
    zero = Morphism("a", "a", c.zero("a", "a"))
    assert all(x == 0 for x in compose_elements(c, u, zero).vec)


def test_compose_object_mismatch():
    c = fix_arrow()
    u = c.element("a", "b", {"u": 1})
    with pytest.raises(CategoryError):
        compose_elements(c, u, u)


def test_identity_functor_valid():
    assert validate_functor(identity_functor(fix_arrow())).ok


def test_constant_functor_valid():
    assert validate_functor(constant_functor(fix_pt(), fix_contract(), "A")).ok


def test_functor_with_shift_rejected():
    c = fix_contract()
    F = identity_functor(c)
    maps = dict(F.hom_maps)
    sp = c.hom("A", "A").space
    maps["A", "A"] = GradedMap.zero(QQ, sp, sp, 1)
    with pytest.raises(CategoryError):
        DgFunctor(c, c, F.object_map, maps)


def test_functor_breaking_composition_reported():
    c = fix_contract()
    # send h_A to 0 but keep everything else: F(d h) = -id ≠ d F(h) = 0
    images = {(x, y): [c.basis_vector(x, y, j) for j in range(c.dim(x, y))]
              for x, y in itertools.product(c.objects, repeat=2)}
    j = c.hom("A", "A").space.index("h_A")
    images["A", "A"][j] = c.zero("A", "A")
    rep = validate_functor(functor_from_images(c, c, {x: x for x in c.objects}, images))
    assert "closedness" in rep.kinds()


# --- generated instances ---------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


def _equivalence(seed, objects=2):
    return generate_equivalence(InstanceSpec(seed=seed, objects=objects, max_generators=2, arity=2))


def _random_element(data, c, x, y):
    k = c.field
    return Morphism(x, y, tuple(k.norm(data.draw(st.integers(-3, 3))) for _ in range(c.dim(x, y))))


@settings(max_examples=15)
@given(seeds, st.integers(1, 3))
def test_generated_instances_valid(seed, n):
    e = _equivalence(seed, n)
    assert validate_category(e.C).ok
    assert validate_category(e.D).ok
    assert validate_functor(e.F).ok
    assert validate_functor(e.G).ok


@settings(max_examples=25)
@given(st.data(), seeds)
def test_compose_associative(data, seed):
    c = _equivalence(seed).D
    w, x, y, z = (data.draw(st.sampled_from(c.objects)) for _ in range(4))
    f, g, h = _random_element(data, c, w, x), _random_element(data, c, x, y), _random_element(data, c, y, z)
    assert compose_elements(c, h, compose_elements(c, g, f)) == compose_elements(c, compose_elements(c, h, g), f)


@settings(max_examples=25)
@given(st.data(), seeds)
def test_functor_commutes_with_structure(data, seed):
    e = _equivalence(seed)
    c, F = e.C, data.draw(st.sampled_from([e.F, e.G]))
    x, y, z = (data.draw(st.sampled_from(c.objects)) for _ in range(3))
    f, g = _random_element(data, c, x, y), _random_element(data, c, y, z)
    assert F.apply(compose_elements(c, g, f)) == compose_elements(e.D, F.apply(g), F.apply(f))
    assert F.apply(differential(c, f)) == differential(e.D, F.apply(f))
