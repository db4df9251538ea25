"""Hand-checkable fixture categories, functors and transformations.

FIX-PT        one object ``*`` with ``End(*) = k·id`` in degree 0.
FIX-ARROW     objects ``a``, ``b`` and one closed degree-0 arrow ``u: a → b``.
FIX-CONTRACT  the contractible complex ``A = (e0 → e1)`` with
              ``End(A) = span(id_A, e, h_A, s)`` and a zero object ``O``.
FIX-ISO       ``A0 = k`` in degree 0 and ``B`` with ``B⁰ = k², B¹ = k``,
              ``d(x, y) = x``, full hom-complexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .category import DgCategory, DgFunctor, functor_from_images, hom_from_pairs
from .linalg import QQ, Field, Matrix
from .models import Cx, LinearModel, build_category, complex_, coordinates, full_hom_basis, unit
from .transform import Transformation, dg_transformation, identity_transformation


@dataclass
class Bundle:
    """Named categories, functors and (optionally) a transformation."""

    categories: dict[str, DgCategory] = field(default_factory=dict)
    functors: dict[str, DgFunctor] = field(default_factory=dict)
    phi: Transformation | None = None


def fix_pt(k: Field = QQ) -> DgCategory:
    homs = {("*", "*"): hom_from_pairs(k, [("id", 0)])}
    comp = {("*", "*", "*"): {(0, 0): (k.one,)}}
    return DgCategory(k, ("*",), homs, comp, {"*": (k.one,)}, name="PT")


def fix_arrow(k: Field = QQ, unit_coefficient=1) -> DgCategory:
    """``unit_coefficient`` ≠ 1 corrupts the table entry ``u ∘ id_a``."""
    e = hom_from_pairs(k, [])
    homs = {
        ("a", "a"): hom_from_pairs(k, [("id_a", 0)]),
        ("b", "b"): hom_from_pairs(k, [("id_b", 0)]),
        ("a", "b"): hom_from_pairs(k, [("u", 0)]),
        ("b", "a"): e,
    }
    one = (k.one,)
    comp = {
        ("a", "a", "a"): {(0, 0): one},
        ("b", "b", "b"): {(0, 0): one},
        ("a", "b", "b"): {(0, 0): one},
        ("a", "a", "b"): {(0, 0): (k.norm(unit_coefficient),)},
    }
    return DgCategory(k, ("a", "b"), homs, comp, {"a": one, "b": one}, name="ARROW")


def contract_model(k: Field = QQ) -> LinearModel:
    a = complex_(k, [("e0", 0), ("e1", 1)], {"e0": {"e1": 1}})
    o = Cx((), (), Matrix.zeros(k, 0, 0))
    e00 = unit(k, 2, 2, 0, 0)
    e11 = unit(k, 2, 2, 1, 1)
    e01 = unit(k, 2, 2, 0, 1)   # e1 ↦ e0
    e10 = unit(k, 2, 2, 1, 0)   # e0 ↦ e1
    end_a = [("id_A", e00 + e11), ("e", e00), ("h_A", -e01), ("s", e10)]
    return LinearModel(k, {"A": a, "O": o}, {("A", "A"): end_a}, name="CONTRACT")


def fix_contract(k: Field = QQ) -> DgCategory:
    return build_category(contract_model(k))


def iso_model(k: Field = QQ) -> LinearModel:
    a0 = complex_(k, [("a", 0)])
    b = complex_(k, [("x", 0), ("y", 0), ("z", 1)], {"x": {"z": 1}})
    cx = {"A0": a0, "B": b}
    bases = {(s, t): full_hom_basis(k, cx[s], cx[t]) for s in cx for t in cx}
    return LinearModel(k, cx, bases, name="ISO")


def fix_iso(k: Field = QQ) -> DgCategory:
    return build_category(iso_model(k))


def constant_functor(src: DgCategory, tgt: DgCategory, obj: str, name: str = "") -> DgFunctor:
    """Send every object of ``src`` to ``obj``; only valid when every hom of
    ``src`` is spanned by identities (FIX-PT)."""
    images = {}
    for x in src.objects:
        for y in src.objects:
            images[x, y] = [tgt.identities[obj] for _ in range(src.dim(x, y))]
    return functor_from_images(src, tgt, {x: obj for x in src.objects}, images, name=name)


def contract_bundle(k: Field = QQ) -> Bundle:
    pt, c = fix_pt(k), fix_contract(k)
    F = constant_functor(pt, c, "A", name="F")
    G = constant_functor(pt, c, "O", name="G")
    phi = dg_transformation(F, G, {"*": ()})
    return Bundle({"PT": pt, "CONTRACT": c}, {"F": F, "G": G}, phi)


def iso_bundle(k: Field = QQ) -> Bundle:
    pt, model = fix_pt(k), iso_model(k)
    d = build_category(model)
    F = constant_functor(pt, d, "A0", name="F")
    G = constant_functor(pt, d, "B", name="G")
    phi_mat = unit(k, 3, 1, 1, 0)   # 1 ↦ y
    phi = dg_transformation(F, G, {"*": coordinates(model, "A0", "B", phi_mat)})
    return Bundle({"PT": pt, "ISO": d}, {"F": F, "G": G}, phi)


def arrow_bundle(k: Field = QQ) -> Bundle:
    from .category import identity_functor

    c = fix_arrow(k)
    F = identity_functor(c)
    F = DgFunctor(F.source, F.target, F.object_map, F.hom_maps, name="Id")
    return Bundle({"ARROW": c}, {"Id": F}, identity_transformation(F))


def identity_bundle(bundle: Bundle, functor: str = "F") -> Bundle:
    """Same categories, ``Φ = id`` on one functor."""
    F = bundle.functors[functor]
    return Bundle(dict(bundle.categories), {functor: F}, identity_transformation(F))


FIXTURES = {
    "fix-contract": contract_bundle,
    "fix-iso": iso_bundle,
    "fix-arrow": arrow_bundle,
}
