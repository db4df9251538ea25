import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from ainfqi.cli import main
from ainfqi.corpus import corpus_files
from ainfqi.formats import Document, bundle_to_json, write_json
from ainfqi.generate import InstanceSpec, build_equivalence, corrupt_contractible, random_equivalence_model, rng_for

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def qi_args(name, out, F="F", G="G", arity=4):
    d = FIX / name
    return ("quasi-inverse", "--category", d / "categories.json", "--functor-f", f"{d / 'functors.json'}#{F}",
            "--functor-g", f"{d / 'functors.json'}#{G}", "--phi", d / "phi.json", "--arity", arity, "--out", out)


def test_checked_in_fixtures_current():
    for rel, text in corpus_files().items():
        assert (FIX / rel).read_text(encoding="utf-8") == text, rel


@pytest.mark.parametrize("name", ["fix-pt", "fix-arrow", "fix-contract", "fix-iso"])
def test_validate_fixtures(name):
    code, out = run("validate", FIX / name)
    assert code == 0, out


def test_validate_corrupt_fixture():
    code, out = run("validate", FIX / "bad-arrow-unit")
    assert code == 1
    assert "unit" in out


def test_contract_pipeline(tmp_path):
    cert = tmp_path / "cert.json"
    code, out = run(*qi_args("fix-contract", cert))
    assert code == 0, out
    assert run("verify", cert)[0] == 0


def test_tampered_certificate(tmp_path):
    cert = tmp_path / "cert.json"
    run(*qi_args("fix-contract", cert))
    obj = json.loads(cert.read_text())
    obj["eta"]["components"] = []
    cert.write_text(json.dumps(obj))
    code, out = run("verify", cert)
    assert code == 1
    assert "left-homotopy: FAIL at arity 0" in out


def test_functor_reference_without_name_is_ambiguous(tmp_path):
    d = FIX / "fix-contract"
    code, _ = run("quasi-inverse", "--category", d / "categories.json", "--functor-f", d / "functors.json",
                  "--functor-g", f"{d / 'functors.json'}#G", "--phi", d / "phi.json", "--arity", 2,
                  "--out", tmp_path / "c.json")
    assert code == 2


def test_not_an_equivalence(tmp_path):
    spec = InstanceSpec(seed=7, objects=2)
    e = build_equivalence(corrupt_contractible(random_equivalence_model(spec, rng_for(spec.seed))))
    bundle = tmp_path / "broken.json"
    write_json(bundle, bundle_to_json(Document({e.C.name: e.C, e.D.name: e.D}, {"F": e.F, "G": e.G},
                                               {"phi": e.phi})))
    code, out = run("quasi-inverse", "--category", bundle, "--functor-f", f"{bundle}#F", "--functor-g",
                    f"{bundle}#G", "--phi", bundle, "--arity", 2, "--out", tmp_path / "c.json")
    assert code == 1
    assert "not an objectwise homotopy equivalence" in out
    assert not (tmp_path / "c.json").exists()


@pytest.mark.parametrize("argv", [
    ("verify",),
    ("frobnicate",),
    ("selftest", "--seed", "1", "--cases", "1", "--field", "f:12"),
    ("selftest", "--seed", "1", "--cases", "0"),
    ("audit-signs", "--seed", "x", "--cases", "1"),
    ("validate", "/nonexistent/file.json"),
])
def test_input_errors(argv):
    assert run(*argv)[0] == 2


def test_malformed_file_diagnostic(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"format": "ainfqi/1", "kind": "bundle",\n "categories": [{"name": 3}]}')
    code, _ = run("validate", p)
    assert code == 2
    assert "categories[0].name" in capsys.readouterr().err


def test_selftest_and_audit(tmp_path):
    code, out = run("selftest", "--seed", 3, "--cases", 2, "--arity", 2, "--report", tmp_path / "s.json")
    assert code == 0, out
    rep = json.loads((tmp_path / "s.json").read_text())
    assert rep["ok"] and rep["instances"]
    code, out = run("audit-signs", "--seed", 3, "--cases", 3, "--report", tmp_path / "a.json")
    assert code == 0, out
    assert json.loads((tmp_path / "a.json").read_text())["surviving_composition"] == [[1, 0, 0]]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ainfqi", "validate", str(FIX / "fix-pt")],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "category PT: valid" in r.stdout
