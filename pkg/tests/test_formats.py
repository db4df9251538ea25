import copy
import json

import pytest
from hypothesis import given, settings, strategies as st

from ainfqi.category import validate_category
from ainfqi.fixtures import FIXTURES, fix_arrow, fix_contract, fix_iso, fix_pt
from ainfqi.formats import (
    Document, FormatError, bundle_from_json, bundle_to_json, category_from_json, category_to_json,
    certificate_from_json, certificate_to_json, dumps, functor_from_json, functor_to_json, read_json,
    transformation_from_json, transformation_to_json,
)
from ainfqi.generate import InstanceSpec, generate_equivalence
from ainfqi.quasi_inverse import quasi_inverse, verify_certificate


def _fixture_doc(name):
    b = FIXTURES[name]()
    return Document(dict(b.categories), dict(b.functors), {"phi": b.phi})


@pytest.mark.parametrize("build", [fix_pt, fix_arrow, fix_contract, fix_iso])
def test_category_round_trip(build):
    text = dumps(category_to_json(build()))
    again = category_from_json(json.loads(text))
    assert dumps(category_to_json(again)) == text
    assert validate_category(again).ok


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_bundle_round_trip(name):
    text = dumps(bundle_to_json(_fixture_doc(name)))
    assert dumps(bundle_to_json(bundle_from_json(json.loads(text)))) == text


def test_functor_and_transformation_round_trip():
    doc = _fixture_doc("fix-iso")
    F = doc.functors["F"]
    ftext = dumps(functor_to_json(F))
    F2 = functor_from_json(json.loads(ftext), doc.categories)
    assert dumps(functor_to_json(F2)) == ftext
    ttext = dumps(transformation_to_json(doc.transformations["phi"], "phi"))
    name, t = transformation_from_json(json.loads(ttext), doc.functors)
    assert name == "phi"
    assert dumps(transformation_to_json(t, name)) == ttext


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_certificate_round_trip(name):
    b = FIXTURES[name]()
    cert = quasi_inverse(b.phi.C, b.phi.source, b.phi.target, b.phi, 3)
    text = dumps(certificate_to_json(cert))
    again = certificate_from_json(json.loads(text))
    assert dumps(certificate_to_json(again)) == text
    assert verify_certificate(again).ok


@settings(max_examples=8)
@given(st.integers(0, 2**64 - 1), st.integers(1, 2), st.sampled_from(["q", "f:10007"]))
def test_random_certificate_round_trip(seed, objects, field):
    e = generate_equivalence(InstanceSpec(seed=seed, objects=objects, field=field))
    cert = quasi_inverse(e.C, e.F, e.G, e.phi, 2, audit=False)
    text = dumps(certificate_to_json(cert))
    again = certificate_from_json(json.loads(text))
    assert dumps(certificate_to_json(again)) == text
    assert verify_certificate(again).ok


def test_rational_scalars_serialized_as_fractions():
    from fractions import Fraction

    from ainfqi.linalg import QQ

    assert QQ.format(Fraction(-1, 2)) == "-1/2"
    obj = category_to_json(fix_contract())
    end_a = next(h for h in obj["homs"] if (h["source"], h["target"]) == ("A", "A"))
    assert end_a["differential"]["h_A"] == {"id_A": "-1"}


# --- diagnostics -------------------------------------------------------------


def _arrow_json():
    return category_to_json(fix_arrow())


def test_bad_scalar_names_field():
    obj = _arrow_json()
    obj["identities"]["a"] = {"id_a": "1/0"}
    with pytest.raises(FormatError) as info:
        category_from_json(obj, "arrow.json")
    assert "identities" in info.value.where and "id_a" in info.value.where


def test_unknown_basis_element():
    obj = _arrow_json()
    obj["identities"]["a"] = {"nope": "1"}
    with pytest.raises(FormatError) as info:
        category_from_json(obj, "arrow.json")
    assert "nope" in str(info.value)


def test_missing_field():
    obj = _arrow_json()
    del obj["objects"]
    with pytest.raises(FormatError) as info:
        category_from_json(obj, "arrow.json")
    assert "objects" in str(info.value)


def test_bad_field_name():
    obj = _arrow_json()
    obj["field"] = "f:6"
    with pytest.raises(FormatError) as info:
        category_from_json(obj, "arrow.json")
    assert info.value.where == "arrow.json.field"


def test_wrong_header():
    doc = bundle_to_json(_fixture_doc("fix-arrow"))
    doc["format"] = "other/9"
    with pytest.raises(FormatError):
        bundle_from_json(doc)
    doc = bundle_to_json(_fixture_doc("fix-arrow"))
    doc["kind"] = "certificate"
    with pytest.raises(FormatError):
        bundle_from_json(doc)


def test_inconsistent_degree_rejected():
    doc = bundle_to_json(_fixture_doc("fix-arrow"))
    doc["transformations"][0]["degree"] = 1
    with pytest.raises(FormatError):
        bundle_from_json(doc)


def test_unknown_functor_reference():
    doc = bundle_to_json(_fixture_doc("fix-arrow"))
    doc["transformations"][0]["source"] = "Nobody"
    with pytest.raises(FormatError) as info:
        bundle_from_json(doc, "b.json")
    assert "Nobody" in str(info.value)


def test_duplicate_names():
    doc = bundle_to_json(_fixture_doc("fix-arrow"))
    doc["categories"].append(copy.deepcopy(doc["categories"][0]))
    with pytest.raises(FormatError):
        bundle_from_json(doc)


def test_invalid_json_reports_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "format": ,\n}\n')
    with pytest.raises(FormatError) as info:
        read_json(p)
    assert info.value.where.endswith(":2:13")


def test_tampered_certificate_still_parses():
    b = FIXTURES["fix-contract"]()
    cert = quasi_inverse(b.phi.C, b.phi.source, b.phi.target, b.phi, 2)
    obj = certificate_to_json(cert)
    obj["eta"]["components"] = []
    rep = verify_certificate(certificate_from_json(obj))
    assert not rep.ok
    assert rep.first_failure().identity == "left-homotopy"
