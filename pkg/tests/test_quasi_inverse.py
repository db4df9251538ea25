import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from ainfqi.fixtures import arrow_bundle, contract_bundle, identity_bundle, iso_bundle, iso_model
from ainfqi.formats import certificate_to_json, dumps
from ainfqi.generate import (
    InstanceSpec, build_equivalence, corrupt_contractible, generate_equivalence, random_equivalence_model, rng_for,
)
from ainfqi.graded import cohomology_dims
from ainfqi.linalg import QQ
from ainfqi.models import coordinates, unit
from ainfqi.quasi_inverse import (
    NotObjectwiseHomotopyEquivalence, ObstructionPair, PreconditionViolated, brute_force_extend,
    check_homotopy_system, extend_step, obstructions, quasi_inverse, solve_homotopy_system, step_residuals,
    verify_certificate,
)
from ainfqi.transform import Transformation, identity_transformation, zero_transformation


def _run(bundle, N=4, **kw):
    phi = bundle.phi
    return quasi_inverse(phi.C, phi.source, phi.target, phi, N, **kw)


@pytest.fixture(scope="module")
def contract():
    return contract_bundle()


@pytest.fixture(scope="module")
def contract_cert(contract):
    return _run(contract)


# --- homotopy systems ------------------------------------------------------


def test_system_identity(contract):
    F = contract.functors["F"]
    phi = identity_transformation(F)
    sys = solve_homotopy_system(phi.C, F, F, phi)
    D = phi.D
    assert sys.psi == {"*": D.identities["A"]}
    assert all(not any(v) for v in sys.h.values())
    assert all(not any(v) for v in sys.p.values())


def test_system_contract(contract):
    phi = contract.phi
    D = phi.D
    sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
    assert sys.psi == {"*": ()}          # Hom(O, A) = 0
    assert sys.p == {"*": ()}            # End(O) = 0
    assert sys.h == {"*": D.element("A", "A", {"h_A": 1}).vec}
    # h_A(e1) = −e0 as a matrix on A
    assert check_homotopy_system(sys, phi.source, phi.target, phi) == []


def test_system_iso():
    b = iso_bundle()
    phi = b.phi
    model = iso_model(QQ)
    sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
    # Ψ(x, y) = y; h = 0; p(z) = (−z, 0)
    assert sys.psi["*"] == coordinates(model, "B", "A0", unit(QQ, 1, 3, 0, 1))
    assert not any(sys.h["*"])
    assert sys.p["*"] == coordinates(model, "B", "B", unit(QQ, 3, 3, 0, 2).scale(-1))


def test_system_requires_dg(contract):
    F = contract.functors["F"]
    D = F.target
    bad = Transformation(F, F, -1, 0, {(("*",), ()): D.element("A", "A", {"h_A": 1}).vec})
    with pytest.raises(PreconditionViolated):
        solve_homotopy_system(bad.C, F, F, bad)


def test_corrupted_instance_rejected():
    spec = InstanceSpec(seed=7, objects=2, max_generators=2)
    model = corrupt_contractible(random_equivalence_model(spec, rng_for(spec.seed)))
    e = build_equivalence(model)
    with pytest.raises(NotObjectwiseHomotopyEquivalence) as info:
        solve_homotopy_system(e.C, e.F, e.G, e.phi)
    # the diagnostic shows why: the two sides have different cohomology
    x = info.value.obj
    fx, gx = e.F(x), e.G(x)
    hf = cohomology_dims(e.D.hom(fx, fx))
    hg = cohomology_dims(e.D.hom(gx, gx))
    assert hf != hg
    assert info.value.diagnostic


def test_uncorrupted_seed_7_solves():
    e = generate_equivalence(InstanceSpec(seed=7, objects=2, max_generators=2))
    sys = solve_homotopy_system(e.C, e.F, e.G, e.phi)
    assert check_homotopy_system(sys, e.F, e.G, e.phi) == []


# --- obstructions and steps --------------------------------------------------


def _seeded(phi, sys, N):
    psi = Transformation(phi.target, phi.source, 0, N, {((e,), ()): sys.psi[e] for e in phi.C.objects})
    eta = Transformation(phi.source, phi.source, -1, N, {((e,), ()): sys.h[e] for e in phi.C.objects})
    return psi, eta


def test_contract_obstructions_vanish(contract):
    phi = contract.phi.with_arity(1)
    sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
    obs = obstructions(*_seeded(phi, sys, 1), phi, 1)
    assert obs.lambda_m == {}
    assert obs.mu_m == {}
    step = extend_step(obs, sys, phi)
    assert step.psi_m == {}
    assert step.eta_m == {}
    assert step.record.eta_source == "verbatim"
    assert brute_force_extend(obs, phi) == ({}, {})


def test_identity_obstructions_vanish():
    b = identity_bundle(arrow_bundle(), "Id")
    phi = b.phi.with_arity(3)
    sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
    psi, eta = _seeded(phi, sys, 3)
    for m in (1, 2, 3):
        obs = obstructions(psi, eta, phi, m)
        assert (obs.lambda_m, obs.mu_m) == ({}, {})


def test_zero_obstruction_step(contract):
    phi = contract.phi.with_arity(2)
    sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
    step = extend_step(ObstructionPair(2, {}, {}), sys, phi)
    assert (step.psi_m, step.eta_m, step.record.eta_source) == ({}, {}, "verbatim")


def test_obstruction_precondition(contract):
    phi = contract.phi.with_arity(1)
    sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
    psi, _ = _seeded(phi, sys, 1)
    wrong_eta = zero_transformation(phi.source, phi.source, -1, 1)   # arity-0 identity fails
    with pytest.raises(PreconditionViolated):
        obstructions(psi, wrong_eta, phi, 1)


# --- fixture certificates ----------------------------------------------------


def test_contract_certificate(contract, contract_cert):
    D = contract.phi.D
    assert contract_cert.psi.is_zero()
    assert contract_cert.eta.table == {(("*",), ()): D.element("A", "A", {"h_A": 1}).vec}
    assert contract_cert.omega.is_zero()
    assert contract_cert.report.ok
    assert all(s.eta_source == "verbatim" for s in contract_cert.steps if s.side == "forward")


def test_iso_certificate():
    cert = _run(iso_bundle())
    assert cert.report.ok
    assert all(s.oracle_ok for s in cert.steps)
    assert {c.identity for c in cert.report.checks} >= {
        "closed", "left-homotopy", "right-homotopy", "mirror-closed", "mirror-homotopy", "comparison"}


@pytest.mark.parametrize("bundle,functor", [(iso_bundle, "F"), (iso_bundle, "G"), (arrow_bundle, "Id"),
                                            (contract_bundle, "F")])
def test_identity_certificate(bundle, functor):
    b = identity_bundle(bundle(), functor)
    cert = _run(b)
    F = b.functors[functor]
    assert cert.psi.same_table(identity_transformation(F, 4))
    assert cert.eta.is_zero()
    assert cert.omega.is_zero()
    assert cert.report.ok


def test_tampered_eta_fails_at_arity_zero(contract_cert):
    cert = dataclasses.replace(contract_cert, eta=zero_transformation(
        contract_cert.eta.source, contract_cert.eta.target, -1, 4))
    rep = verify_certificate(cert)
    bad = rep.first_failure()
    assert bad.identity == "left-homotopy"
    assert bad.arity == 0
    assert bad.key == (("*",), ())


def test_stripping_above_bound_keeps_verdict():
    cert = _run(iso_bundle(), N=3)
    longer = _run(iso_bundle(), N=4)
    stripped = dataclasses.replace(longer, arity=3)
    a, b = verify_certificate(cert), verify_certificate(stripped)
    assert [(c.identity, c.arity, c.ok) for c in a.checks] == [(c.identity, c.arity, c.ok) for c in b.checks]


def test_certificate_deterministic():
    a = dumps(certificate_to_json(_run(iso_bundle())))
    b = dumps(certificate_to_json(_run(iso_bundle())))
    assert a == b


# --- random instances ------------------------------------------------------


@settings(max_examples=12)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.sampled_from(["f:10007", "f:7", "q"]))
def test_random_certificates(seed, objects, field):
    e = generate_equivalence(InstanceSpec(seed=seed, objects=objects, max_generators=2, field=field))
    cert = quasi_inverse(e.C, e.F, e.G, e.phi, 3, audit=True)
    assert cert.report.ok
    assert all(s.oracle_ok for s in cert.steps)
    assert verify_certificate(cert).ok


@settings(max_examples=12)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_step_contract_and_oracle(seed, objects):
    e = generate_equivalence(InstanceSpec(seed=seed, objects=objects, max_generators=2))
    N = 3
    phi = e.phi.with_arity(N)
    sys = solve_homotopy_system(e.C, e.F, e.G, e.phi)
    psi_t, eta_t = _seeded(phi, sys, N)
    psi, eta = dict(psi_t.table), dict(eta_t.table)
    for m in range(1, N + 1):
        obs = obstructions(Transformation(e.G, e.F, 0, N, psi), Transformation(e.F, e.F, -1, N, eta), phi, m)
        step = extend_step(obs, sys, phi, audit=False)
        assert step_residuals(obs, phi, step.psi_m, step.eta_m) == ({}, {})
        oracle = brute_force_extend(obs, phi)
        assert step_residuals(obs, phi, *oracle) == ({}, {})
        psi.update(step.psi_m)
        eta.update(step.eta_m)
