"""The JSON fixture corpus shipped under ``fixtures/``.

``corpus_files()`` is the single source of truth; ``tools/make_fixtures.py``
writes it out and the test suite checks the checked-in files still match.
"""

from __future__ import annotations

from .fixtures import Bundle, arrow_bundle, contract_bundle, fix_arrow, fix_pt, iso_bundle
from .formats import Document, bundle_to_json, dumps


def _split(bundle: Bundle) -> dict[str, dict]:
    out = {"categories.json": bundle_to_json(Document(categories=dict(bundle.categories)))}
    if bundle.functors:
        out["functors.json"] = bundle_to_json(Document(functors=dict(bundle.functors)))
    if bundle.phi is not None:
        out["phi.json"] = bundle_to_json(Document(transformations={"phi": bundle.phi}))
    return out


def corpus_files() -> dict[str, str]:
    """Relative path → file text."""
    dirs = {
        "fix-pt": Bundle({"PT": fix_pt()}),
        "fix-arrow": arrow_bundle(),
        "fix-contract": contract_bundle(),
        "fix-iso": iso_bundle(),
        # u ∘ id_a = 2u: must be rejected by validate
        "bad-arrow-unit": Bundle({"ARROW": fix_arrow(unit_coefficient=2)}),
    }
    files = {}
    for d, bundle in dirs.items():
        for name, obj in _split(bundle).items():
            files[f"{d}/{name}"] = dumps(obj)
    return files
