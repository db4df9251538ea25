import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ainfqi.category import identity_functor
from ainfqi.fixtures import contract_bundle, fix_arrow
from ainfqi.generate import InstanceSpec, generate_equivalence
from ainfqi.transform import (
    KOSZUL, LITERAL, TransformationError, compose_dg_left, compose_dg_right, compose_general,
    d_infty, difference, dg_transformation, identity_transformation, is_closed_up_to, is_dg_natural,
    linear_combine, random_transformation, zero_transformation,
)


@pytest.fixture(scope="module")
def arrow():
    c = fix_arrow()
    return c, identity_functor(c)


@pytest.fixture(scope="module")
def contract():
    b = contract_bundle()
    return b.categories["CONTRACT"], b.functors["F"], b.functors["G"], b.phi


def _half_identity(c, F, arity=1):
    # comp0_a = id_a, comp0_b = 0
    return dg_transformation(F, F, {"a": c.identities["a"], "b": c.zero("b", "b")}, arity=arity)


# --- d∞ --------------------------------------------------------------------


def test_dinf_identity_is_zero(arrow):
    c, F = arrow
    assert d_infty(identity_transformation(F, 3)).is_zero()


def test_dinf_arrow_example(arrow):
    c, F = arrow
    d = d_infty(_half_identity(c, F))
    assert d.degree == 1
    # (d∞Φ)¹(u) = −u, nothing else
    assert d.table == {(("a", "b"), (0,)): (c.field.norm(-1),)}


def test_dinf_arrow_example_literal_agrees(arrow):
    # degree 0, so the two conventions coincide here
    c, F = arrow
    t = _half_identity(c, F)
    assert d_infty(t, LITERAL).table == d_infty(t, KOSZUL).table


def test_dinf_squared_contract(contract):
    c, F, G, phi = contract
    rng = np.random.Generator(np.random.PCG64(2024))
    for n in (-1, 0, 1):
        t = random_transformation(F, F, n, 3, rng)
        assert d_infty(d_infty(t)).is_zero()


# --- naturality and closedness ----------------------------------------------


def test_identity_is_dg_natural(arrow):
    assert is_dg_natural(identity_transformation(arrow[1])).ok


def test_broken_naturality_names_u(arrow):
    c, F = arrow
    rep = is_dg_natural(_half_identity(c, F, arity=0))
    assert not rep.ok
    assert any("u" in p for p in rep.problems)


def test_degree_one_not_dg(arrow):
    c, F = arrow
    assert not is_dg_natural(zero_transformation(F, F, 1, 0)).ok


def test_closedness(arrow):
    c, F = arrow
    assert is_closed_up_to(identity_transformation(F, 4)).ok
    for n in (-1, 0, 2):
        assert is_closed_up_to(zero_transformation(F, F, n, 3)).ok
    rep = is_closed_up_to(_half_identity(c, F))
    assert not rep.ok
    assert rep.arity == 1
    assert rep.key == (("a", "b"), (0,))


def test_degree_bookkeeping_enforced(arrow):
    c, F = arrow
    with pytest.raises(TransformationError):
        dg_transformation(F, F, {"a": c.identities["a"]}, degree=1)


# --- dg compositions ---------------------------------------------------------


def test_compose_dg_right_examples(contract):
    c, F, G, phi = contract
    idF = identity_transformation(F, 2)
    h = dg_transformation(F, F, {"*": c.element("A", "A", {"h_A": 1}).vec}, arity=2, degree=-1)
    assert compose_dg_right(h, idF).same_table(h)
    assert compose_dg_right(zero_transformation(F, F, -1, 2), idF).is_zero()
    out = compose_dg_right(h, identity_transformation(F))
    assert out.component0("*") == c.element("A", "A", {"h_A": 1}).vec


def test_compose_dg_left_examples(contract):
    c, F, G, phi = contract
    idF = identity_transformation(F, 2)
    h = dg_transformation(F, F, {"*": c.element("A", "A", {"h_A": 1}).vec}, arity=2, degree=-1)
    assert compose_dg_left(idF, h).same_table(h)
    assert compose_dg_left(idF, zero_transformation(F, F, -1, 2)).is_zero()


def test_compose_dg_requires_dg(arrow):
    c, F = arrow
    bad = _half_identity(c, F, arity=0)
    with pytest.raises(TransformationError):
        compose_dg_right(identity_transformation(F), bad)
    with pytest.raises(TransformationError):
        compose_dg_left(bad, identity_transformation(F))


def test_compose_functor_mismatch(contract):
    c, F, G, phi = contract
    with pytest.raises(TransformationError):
        compose_dg_right(identity_transformation(F), phi)


# --- linear structure ------------------------------------------------------


def test_linear_combine(contract):
    c, F, G, phi = contract
    rng = np.random.Generator(np.random.PCG64(5))
    t = random_transformation(F, F, 0, 2, rng, density=1.0)
    assert linear_combine(1, t, -1, t).is_zero()
    assert linear_combine(1, t, 0, random_transformation(F, F, 0, 2, rng)).same_table(t)
    five = linear_combine(2, t, 3, t)
    assert five.table == {k: tuple(c.field.norm(5 * x) for x in v) for k, v in t.table.items()}
    with pytest.raises(TransformationError):
        linear_combine(1, t, 1, zero_transformation(F, F, 1, 2))


# --- properties on generated instances ---------------------------------------

seeds = st.integers(0, 2**32 - 1)


def _instance(seed, objects):
    return generate_equivalence(InstanceSpec(seed=seed, objects=objects, max_generators=2, arity=3))


@settings(max_examples=20)
@given(seeds, st.integers(1, 2), st.sampled_from([-1, 0, 1]))
def test_dinf_squared_property(seed, objects, n):
    e = _instance(seed, objects)
    rng = np.random.Generator(np.random.PCG64(seed))
    t = random_transformation(e.F, e.G, n, 3, rng)
    assert d_infty(d_infty(t)).is_zero()


@settings(max_examples=20)
@given(seeds, st.integers(1, 2))
def test_dg_embedding_closed(seed, objects):
    e = _instance(seed, objects)
    assert d_infty(e.phi.with_arity(3)).is_zero()


@settings(max_examples=20)
@given(seeds, st.integers(1, 2))
def test_dg_compositions_preserve_closedness(seed, objects):
    e = _instance(seed, objects)
    phi = e.phi.with_arity(3)
    rng = np.random.Generator(np.random.PCG64(seed))
    # a closed Ψ: d∞ of anything
    psi = d_infty(random_transformation(e.G, e.F, -1, 3, rng))
    assert d_infty(compose_dg_right(psi, phi)).is_zero()
    xi = d_infty(random_transformation(e.F, e.F, -1, 3, rng))
    assert d_infty(compose_dg_left(phi, xi)).is_zero()


@settings(max_examples=20)
@given(seeds, st.integers(1, 2), st.sampled_from([-1, 0, 1]), st.sampled_from([-1, 0, 1]))
def test_derivation_law(seed, objects, m, n):
    e = _instance(seed, objects)
    rng = np.random.Generator(np.random.PCG64(seed))
    xi = random_transformation(e.F, e.G, m, 3, rng)
    theta = random_transformation(e.G, e.F, n, 3, rng)
    lhs = d_infty(compose_general(theta, xi))
    rhs = linear_combine(1, compose_general(d_infty(theta), xi), -1 if n % 2 else 1,
                         compose_general(theta, d_infty(xi)))
    assert difference(lhs, rhs).is_zero()


@settings(max_examples=20)
@given(seeds, st.integers(1, 2), st.sampled_from([-1, 0, 1]))
def test_general_reduces_to_dg_cases(seed, objects, n):
    e = _instance(seed, objects)
    phi = e.phi.with_arity(3)
    rng = np.random.Generator(np.random.PCG64(seed))
    psi = random_transformation(e.G, e.F, n, 3, rng)
    xi = random_transformation(e.F, e.F, n, 3, rng)
    assert compose_general(psi, phi).same_table(compose_dg_right(psi, phi))
    assert compose_general(phi, xi).same_table(compose_dg_left(phi, xi))


@settings(max_examples=15)
@given(seeds, st.integers(1, 2))
def test_truncation_is_arity_local(seed, objects):
    e = _instance(seed, objects)
    rng = np.random.Generator(np.random.PCG64(seed))
    t = random_transformation(e.F, e.G, 0, 3, rng)
    # d∞ up to arity 2 never reads arity-3 entries
    assert d_infty(t).with_arity(2).table == d_infty(t.with_arity(2)).table


@settings(max_examples=15)
@given(seeds)
def test_literal_matches_in_degree_zero(seed):
    e = _instance(seed, 2)
    rng = np.random.Generator(np.random.PCG64(seed))
    t = random_transformation(e.F, e.G, 0, 3, rng)
    assert d_infty(t, LITERAL).table == d_infty(t, KOSZUL).table


def test_literal_convention_fails_dinf_squared():
    # frozen counterexample from the sign audit (seed 3, one-object case)
    from ainfqi.selftest import case_spec
    from ainfqi.generate import rng_for

    e = generate_equivalence(case_spec(3, 0, max_objects=2))
    outcomes = []
    for n in (-1, 1):
        t = random_transformation(e.F, e.G, n, 3, rng_for(0, n + 5))
        outcomes.append(d_infty(d_infty(t, LITERAL), LITERAL).is_zero())
        assert d_infty(d_infty(t)).is_zero()
    assert not all(outcomes)
