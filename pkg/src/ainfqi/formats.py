"""JSON documents for categories, functors, transformations and certificates.

Every document is an object with a ``"format"`` tag and a ``"kind"``.  Scalars
are strings (``"3/4"`` over Q, the reduced representative over F_p) and
vectors are ``{basis name: scalar}`` maps listing only nonzero entries in
basis order.  Output is fully determined by the data, so a write after a read
reproduces the file byte for byte.  FORMAT.md in the repository is the
normative description.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .category import CategoryError, DgCategory, DgFunctor, functor_from_images, hom_from_pairs
from .graded import GradedError
from .linalg import Field, field_from_name
from .quasi_inverse import (
    Certificate, HomotopySystem, IdentityCheck, StepRecord, VerificationReport,
)
from .transform import Transformation, TransformationError

FORMAT = "ainfqi/1"


class FormatError(ValueError):
    """Malformed input; ``where`` names the file and the offending field."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# scalars and vectors


def _vec_out(fld: Field, names, v) -> dict:
    return {names[i]: fld.format(x) for i, x in enumerate(v) if x}


def _vec_in(fld: Field, names, obj, where: str) -> tuple:
    if not isinstance(obj, dict):
        raise FormatError(where, "expected an object {basis name: scalar}")
    out = [fld.zero] * len(names)
    index = {n: i for i, n in enumerate(names)}
    for name, s in obj.items():
        if name not in index:
            raise FormatError(where, f"unknown basis element {name!r}")
        try:
            out[index[name]] = fld.parse(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"{where}.{name}", f"bad scalar {s!r} ({exc})") from None
    return tuple(out)


def _get(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(where, f"missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"{where}.{key}", f"expected {kind.__name__ if isinstance(kind, type) else kind}")
    return v


# ---------------------------------------------------------------------------
# categories


def category_to_json(c: DgCategory) -> dict:
    fld = c.field
    homs = []
    for x, y in itertools.product(c.objects, repeat=2):
        sp = c.homs[x, y].space
        if sp.dim == 0:
            continue
        d = {}
        for j in range(sp.dim):
            img = {sp.names[i]: fld.format(v) for i, v in c.d_basis(x, y, j)}
            if img:
                d[sp.names[j]] = img
        homs.append({"source": x, "target": y,
                     "basis": [{"name": n, "degree": k} for n, k in zip(sp.names, sp.degrees)],
                     "differential": d})
    comp = []
    for x, y, z in itertools.product(c.objects, repeat=3):
        tab = c.composition.get((x, y, z), {})
        for i, j in sorted(tab):
            v = tab[i, j]
            if any(v):
                comp.append({"objects": [x, y, z], "left": c.homs[y, z].space.names[i],
                             "right": c.homs[x, y].space.names[j],
                             "value": _vec_out(fld, c.homs[x, z].space.names, v)})
    return {"name": c.name, "field": fld.name, "objects": list(c.objects), "homs": homs,
            "composition": comp,
            "identities": {x: _vec_out(fld, c.homs[x, x].space.names, c.identities[x]) for x in c.objects}}


def category_from_json(obj, where: str = "category") -> DgCategory:
    name = _get(obj, "name", where, str)
    try:
        fld = field_from_name(_get(obj, "field", where, str))
    except ValueError as exc:
        raise FormatError(f"{where}.field", str(exc)) from None
    objects = _get(obj, "objects", where, list)
    if not all(isinstance(o, str) for o in objects) or len(set(objects)) != len(objects):
        raise FormatError(f"{where}.objects", "expected distinct object names")
    bases, dspecs = {}, {}
    for n, h in enumerate(_get(obj, "homs", where, list)):
        w = f"{where}.homs[{n}]"
        x, y = _get(h, "source", w, str), _get(h, "target", w, str)
        if x not in objects or y not in objects:
            raise FormatError(w, f"unknown object in ({x}, {y})")
        if (x, y) in bases:
            raise FormatError(w, f"duplicate hom ({x}, {y})")
        pairs = []
        for m, b in enumerate(_get(h, "basis", w, list)):
            bw = f"{w}.basis[{m}]"
            deg = _get(b, "degree", bw)
            if not isinstance(deg, int) or isinstance(deg, bool):
                raise FormatError(f"{bw}.degree", "expected an integer")
            pairs.append((_get(b, "name", bw, str), deg))
        if len({p[0] for p in pairs}) != len(pairs):
            raise FormatError(w, "duplicate basis names")
        bases[x, y] = pairs
        dspecs[x, y] = (_get(h, "differential", w, dict), w)
    homs = {}
    for x, y in itertools.product(objects, repeat=2):
        pairs = bases.get((x, y), [])
        names = [p[0] for p in pairs]
        dspec, w = dspecs.get((x, y), ({}, where))
        cols = {}
        for src, img in dspec.items():
            if src not in names:
                raise FormatError(f"{w}.differential", f"unknown basis element {src!r}")
            cols[names.index(src)] = _vec_in(fld, names, img, f"{w}.differential.{src}")
        dmat = [[cols[j][i] if j in cols else fld.zero for j in range(len(names))] for i in range(len(names))]
        try:
            homs[x, y] = hom_from_pairs(fld, pairs, dmat)
        except GradedError as exc:
            raise FormatError(f"{w}.differential", str(exc)) from None
    comp: dict = {}
    for n, e in enumerate(_get(obj, "composition", where, list)):
        w = f"{where}.composition[{n}]"
        trip = _get(e, "objects", w, list)
        if len(trip) != 3 or any(t not in objects for t in trip):
            raise FormatError(f"{w}.objects", "expected three known objects")
        x, y, z = trip
        left, right = _get(e, "left", w, str), _get(e, "right", w, str)
        gn, fn = homs[y, z].space.names, homs[x, y].space.names
        if left not in gn or right not in fn:
            raise FormatError(w, f"unknown basis element in {left!r} ∘ {right!r}")
        key = (gn.index(left), fn.index(right))
        tab = comp.setdefault((x, y, z), {})
        if key in tab:
            raise FormatError(w, "duplicate composition entry")
        tab[key] = _vec_in(fld, homs[x, z].space.names, _get(e, "value", w), f"{w}.value")
    ids_obj = _get(obj, "identities", where, dict)
    ids = {}
    for x in objects:
        if x not in ids_obj:
            raise FormatError(f"{where}.identities", f"missing identity of {x!r}")
        ids[x] = _vec_in(fld, homs[x, x].space.names, ids_obj[x], f"{where}.identities.{x}")
    try:
        return DgCategory(fld, tuple(objects), homs, comp, ids, name=name)
    except CategoryError as exc:
        raise FormatError(where, str(exc)) from None


# ---------------------------------------------------------------------------
# functors and transformations


def functor_to_json(f: DgFunctor) -> dict:
    src, tgt = f.source, f.target
    maps = []
    for x, y in itertools.product(src.objects, repeat=2):
        names = src.homs[x, y].space.names
        if not names:
            continue
        tnames = tgt.homs[f(x), f(y)].space.names
        maps.append({"source": x, "target": y,
                     "images": {names[j]: _vec_out(tgt.field, tnames, f.image_basis(x, y, j))
                                for j in range(len(names))}})
    return {"name": f.name, "source": src.name, "target": tgt.name,
            "objects": {x: f(x) for x in src.objects}, "maps": maps}


def functor_from_json(obj, categories: dict, where: str = "functor") -> DgFunctor:
    name = _get(obj, "name", where, str)
    src = _lookup(categories, _get(obj, "source", where, str), f"{where}.source", "category")
    tgt = _lookup(categories, _get(obj, "target", where, str), f"{where}.target", "category")
    omap = _get(obj, "objects", where, dict)
    for x in src.objects:
        if omap.get(x) not in tgt.objects:
            raise FormatError(f"{where}.objects", f"object {x!r} is not sent to an object of {tgt.name!r}")
    images = {}
    for n, m in enumerate(_get(obj, "maps", where, list)):
        w = f"{where}.maps[{n}]"
        x, y = _get(m, "source", w, str), _get(m, "target", w, str)
        if x not in src.objects or y not in src.objects:
            raise FormatError(w, f"unknown object in ({x}, {y})")
        names = src.homs[x, y].space.names
        tnames = tgt.homs[omap[x], omap[y]].space.names
        imgs = _get(m, "images", w, dict)
        for k in imgs:
            if k not in names:
                raise FormatError(f"{w}.images", f"unknown basis element {k!r}")
        images[x, y] = [_vec_in(tgt.field, tnames, imgs.get(nm, {}), f"{w}.images.{nm}") for nm in names]
    try:
        return functor_from_images(src, tgt, dict(omap), images, name=name)
    except (CategoryError, GradedError) as exc:
        raise FormatError(where, str(exc)) from None


def _key_out(C: DgCategory, key) -> dict:
    objs, idxs = key
    return {"objects": list(objs),
            "inputs": [C.homs[objs[i], objs[i + 1]].space.names[j] for i, j in enumerate(idxs)]}


def _key_in(C: DgCategory, obj, where: str):
    objs = _get(obj, "objects", where, list)
    ins = _get(obj, "inputs", where, list)
    if not objs or any(o not in C.objects for o in objs) or len(ins) != len(objs) - 1:
        raise FormatError(where, "objects and inputs do not form a composable chain")
    idxs = []
    for i, nm in enumerate(ins):
        names = C.homs[objs[i], objs[i + 1]].space.names
        if nm not in names:
            raise FormatError(f"{where}.inputs[{i}]", f"{nm!r} is not a basis element of "
                                                       f"Hom({objs[i]}, {objs[i + 1]})")
        idxs.append(names.index(nm))
    return tuple(objs), tuple(idxs)


def _sorted_keys(t: Transformation):
    return sorted(t.table, key=lambda k: (len(k[1]), k))


def transformation_to_json(t: Transformation, name: str = "") -> dict:
    D, C = t.D, t.C
    F, G = t.source, t.target
    comps = []
    for key in _sorted_keys(t):
        objs = key[0]
        comps.append({"arity": len(key[1]), **_key_out(C, key),
                      "value": _vec_out(D.field, D.homs[F(objs[0]), G(objs[-1])].space.names, t.table[key])})
    return {"name": name, "source": F.name, "target": G.name, "degree": t.degree, "arity": t.arity,
            "components": comps}


def transformation_from_json(obj, functors: dict, where: str = "transformation") -> tuple[str, Transformation]:
    name = obj.get("name", "") if isinstance(obj, dict) else ""
    F = _lookup(functors, _get(obj, "source", where, str), f"{where}.source", "functor")
    G = _lookup(functors, _get(obj, "target", where, str), f"{where}.target", "functor")
    degree, arity = _get(obj, "degree", where, int), _get(obj, "arity", where, int)
    C, D = F.source, F.target
    table = {}
    for n, e in enumerate(_get(obj, "components", where, list)):
        w = f"{where}.components[{n}]"
        key = _key_in(C, e, w)
        if _get(e, "arity", w, int) != len(key[1]):
            raise FormatError(f"{w}.arity", "does not match the number of inputs")
        if len(key[1]) > arity:
            raise FormatError(w, f"component above the arity bound {arity}")
        if key in table:
            raise FormatError(w, "duplicate component")
        objs = key[0]
        table[key] = _vec_in(D.field, D.homs[F(objs[0]), G(objs[-1])].space.names, _get(e, "value", w),
                             f"{w}.value")
    try:
        return name, Transformation(F, G, degree, arity, table)
    except TransformationError as exc:
        raise FormatError(where, str(exc)) from None


def _lookup(pool: dict, name: str, where: str, what: str):
    if name not in pool:
        raise FormatError(where, f"unknown {what} {name!r}")
    return pool[name]


# ---------------------------------------------------------------------------
# bundles: any mix of categories, functors and transformations


@dataclass
class Document:
    categories: dict[str, DgCategory] = field(default_factory=dict)
    functors: dict[str, DgFunctor] = field(default_factory=dict)
    transformations: dict[str, Transformation] = field(default_factory=dict)

    def merge(self, other: "Document", where: str) -> None:
        for attr in ("categories", "functors", "transformations"):
            mine, theirs = getattr(self, attr), getattr(other, attr)
            for k, v in theirs.items():
                if k in mine and mine[k] is not v:
                    raise FormatError(where, f"duplicate {attr[:-1]} name {k!r}")
                mine[k] = v


def bundle_to_json(doc: Document) -> dict:
    return {"format": FORMAT, "kind": "bundle",
            "categories": [category_to_json(c) for c in doc.categories.values()],
            "functors": [functor_to_json(f) for f in doc.functors.values()],
            "transformations": [transformation_to_json(t, n) for n, t in doc.transformations.items()]}


def bundle_from_json(obj, where: str = "bundle", context: Document | None = None) -> Document:
    _check_header(obj, where, "bundle")
    ctx = context or Document()
    doc = Document()
    for n, c in enumerate(obj.get("categories", [])):
        cat = category_from_json(c, f"{where}.categories[{n}]")
        if cat.name in doc.categories or cat.name in ctx.categories:
            raise FormatError(f"{where}.categories[{n}]", f"duplicate category name {cat.name!r}")
        doc.categories[cat.name] = cat
    cats = {**ctx.categories, **doc.categories}
    for n, f in enumerate(obj.get("functors", [])):
        fun = functor_from_json(f, cats, f"{where}.functors[{n}]")
        if fun.name in doc.functors or fun.name in ctx.functors:
            raise FormatError(f"{where}.functors[{n}]", f"duplicate functor name {fun.name!r}")
        doc.functors[fun.name] = fun
    funs = {**ctx.functors, **doc.functors}
    for n, t in enumerate(obj.get("transformations", [])):
        name, tr = transformation_from_json(t, funs, f"{where}.transformations[{n}]")
        if name in doc.transformations:
            raise FormatError(f"{where}.transformations[{n}]", f"duplicate transformation name {name!r}")
        doc.transformations[name] = tr
    return doc


def _check_header(obj, where: str, kind: str):
    if not isinstance(obj, dict):
        raise FormatError(where, "expected a JSON object")
    if obj.get("format") != FORMAT:
        raise FormatError(f"{where}.format", f"expected {FORMAT!r}, got {obj.get('format')!r}")
    if obj.get("kind") != kind:
        raise FormatError(f"{where}.kind", f"expected {kind!r}, got {obj.get('kind')!r}")


# ---------------------------------------------------------------------------
# certificates


def _sys_out(sys: HomotopySystem, phi: Transformation) -> dict:
    D, F, G = phi.D, phi.source, phi.target
    out = {}
    for e in phi.C.objects:
        fe, ge = F(e), G(e)
        out[e] = {"psi": _vec_out(D.field, D.homs[ge, fe].space.names, sys.psi[e]),
                  "h": _vec_out(D.field, D.homs[fe, fe].space.names, sys.h[e]),
                  "p": _vec_out(D.field, D.homs[ge, ge].space.names, sys.p[e])}
    return out


def _sys_in(obj, phi: Transformation, where: str) -> HomotopySystem:
    D, F, G = phi.D, phi.source, phi.target
    sys = HomotopySystem({}, {}, {})
    for e in phi.C.objects:
        ent = _get(obj, e, where, dict)
        w = f"{where}.{e}"
        fe, ge = F(e), G(e)
        sys.psi[e] = _vec_in(D.field, D.homs[ge, fe].space.names, _get(ent, "psi", w), f"{w}.psi")
        sys.h[e] = _vec_in(D.field, D.homs[fe, fe].space.names, _get(ent, "h", w), f"{w}.h")
        sys.p[e] = _vec_in(D.field, D.homs[ge, ge].space.names, _get(ent, "p", w), f"{w}.p")
    return sys


def step_to_json(r: StepRecord) -> dict:
    return {"side": r.side, "arity": r.m, "psi": r.psi_source, "eta": r.eta_source,
            "attempts": [{"component": a, "variant": b, "outcome": c} for a, b, c in r.attempts],
            "oracle_ok": r.oracle_ok, "nonzero_lambda": r.nonzero_lambda, "nonzero_mu": r.nonzero_mu}


def step_from_json(obj, where: str) -> StepRecord:
    atts = [(_get(a, "component", where, str), _get(a, "variant", where, str), _get(a, "outcome", where, str))
            for a in _get(obj, "attempts", where, list)]
    ok = obj.get("oracle_ok")
    if ok is not None and not isinstance(ok, bool):
        raise FormatError(f"{where}.oracle_ok", "expected true, false or null")
    return StepRecord(_get(obj, "side", where, str), _get(obj, "arity", where, int), _get(obj, "psi", where, str),
                      _get(obj, "eta", where, str), atts, ok, _get(obj, "nonzero_lambda", where, int),
                      _get(obj, "nonzero_mu", where, int))


def report_to_json(rep: VerificationReport, C: DgCategory) -> list:
    return [{"identity": c.identity, "arity": c.arity, "ok": c.ok,
             "first_failure": None if c.key is None else _key_out(C, c.key)} for c in rep.checks]


def report_from_json(obj, C: DgCategory, where: str) -> VerificationReport:
    rep = VerificationReport()
    for n, c in enumerate(obj):
        w = f"{where}[{n}]"
        ff = c.get("first_failure") if isinstance(c, dict) else None
        rep.checks.append(IdentityCheck(_get(c, "identity", w, str), _get(c, "arity", w, int),
                                        _get(c, "ok", w, bool), None if ff is None else _key_in(C, ff, w)))
    return rep


def certificate_to_json(cert: Certificate) -> dict:
    phi = cert.phi
    F, G = phi.source, phi.target
    cats = [F.source] + ([F.target] if F.target is not F.source else [])
    funs = [F] + ([G] if G is not F else [])
    out = {"format": FORMAT, "kind": "certificate", "arity": cert.arity,
           "categories": [category_to_json(c) for c in cats],
           "functors": [functor_to_json(f) for f in funs],
           "phi": transformation_to_json(phi, "phi"),
           "system": _sys_out(cert.system, phi),
           "psi": transformation_to_json(cert.psi, "psi"),
           "eta": transformation_to_json(cert.eta, "eta"),
           "omega": transformation_to_json(cert.omega, "omega")}
    if cert.psi_mirror is not None:
        out["psi_mirror"] = transformation_to_json(cert.psi_mirror, "psi_mirror")
    if cert.omega_mirror is not None:
        out["omega_mirror"] = transformation_to_json(cert.omega_mirror, "omega_mirror")
    out["steps"] = [step_to_json(r) for r in cert.steps]
    out["report"] = None if cert.report is None else report_to_json(cert.report, F.source)
    out["notes"] = list(cert.notes)
    return out


def certificate_from_json(obj, where: str = "certificate") -> Certificate:
    _check_header(obj, where, "certificate")
    doc = Document()
    for n, c in enumerate(_get(obj, "categories", where, list)):
        cat = category_from_json(c, f"{where}.categories[{n}]")
        doc.categories[cat.name] = cat
    for n, f in enumerate(_get(obj, "functors", where, list)):
        fun = functor_from_json(f, doc.categories, f"{where}.functors[{n}]")
        doc.functors[fun.name] = fun
    fx = doc.functors

    def tr(key, required=True):
        if key not in obj and not required:
            return None
        return transformation_from_json(_get(obj, key, where, dict), fx, f"{where}.{key}")[1]

    phi = tr("phi")
    N = _get(obj, "arity", where, int)
    rep = obj.get("report")
    return Certificate(
        phi=phi, system=_sys_in(_get(obj, "system", where, dict), phi, f"{where}.system"),
        psi=tr("psi"), eta=tr("eta"), omega=tr("omega"), arity=N,
        psi_mirror=tr("psi_mirror", False), omega_mirror=tr("omega_mirror", False),
        steps=[step_from_json(s, f"{where}.steps[{n}]") for n, s in enumerate(_get(obj, "steps", where, list))],
        report=None if rep is None else report_from_json(rep, phi.C, f"{where}.report"),
        notes=[str(s) for s in obj.get("notes", [])])


# ---------------------------------------------------------------------------
# files


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(str(p), f"cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{p}:{exc.lineno}:{exc.colno}", exc.msg) from None


def load_bundle_files(paths, context: Document | None = None) -> Document:
    """Read several bundle files (directories expand to their ``*.json`` files)
    into one namespace; categories come first so files may cross-reference."""
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        else:
            files.append(p)
    raw = [(str(f), read_json(f)) for f in files]
    for w, obj in raw:
        _check_header(obj, w, "bundle")
    doc = Document()
    if context:
        doc.merge(context, "context")
    # three passes so that references between files resolve in any order
    for stage in ("categories", "functors", "transformations"):
        for w, obj in raw:
            part = {"format": FORMAT, "kind": "bundle", stage: obj.get(stage, [])}
            doc.merge(bundle_from_json(part, w, doc), w)
    return doc
