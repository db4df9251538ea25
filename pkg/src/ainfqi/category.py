"""Finite dg-categories given by explicit composition tables, and dg-functors."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .graded import GradedError, GradedMap, GradedSpace, HomComplex, validate_complex
from .linalg import Field, Matrix

Vec = tuple


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str) -> None:
        self.violations.append(Violation(kind, detail))

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class Morphism:
    """A (possibly inhomogeneous) element of ``Hom(src, tgt)``."""

    src: str
    tgt: str
    vec: Vec


def vec_add(field: Field, a: Vec, b: Vec, cb=1) -> Vec:
    return tuple(field.norm(x + cb * y) for x, y in zip(a, b))


def vec_scale(field: Field, c, a: Vec) -> Vec:
    return tuple(field.norm(c * x) for x in a)


def is_zero(v: Vec) -> bool:
    return not any(v)


@dataclass(frozen=True, eq=False)
class DgCategory:
    """Objects, hom-complexes, basis composition tables and identities.

    ``composition[(X, Y, Z)][(i, j)]`` is the vector of ``g_i ∘ f_j`` in
    ``Hom(X, Z)`` where ``g_i`` is basis element ``i`` of ``Hom(Y, Z)`` and
    ``f_j`` basis element ``j`` of ``Hom(X, Y)``.  Missing entries are zero.
    """

    field: Field
    objects: tuple[str, ...]
    homs: Mapping[tuple[str, str], HomComplex]
    composition: Mapping[tuple[str, str, str], Mapping[tuple[int, int], Vec]]
    identities: Mapping[str, Vec]
    name: str = ""

    def __post_init__(self):
        if len(set(self.objects)) != len(self.objects):
            raise CategoryError("duplicate object names")
        for x, y in itertools.product(self.objects, repeat=2):
            if (x, y) not in self.homs:
                raise CategoryError(f"missing hom-complex ({x}, {y})")
            if self.homs[x, y].field != self.field:
                raise CategoryError(f"hom ({x}, {y}) is over a different field")
        for x in self.objects:
            v = self.identities.get(x)
            if v is None or len(v) != self.homs[x, x].dim:
                raise CategoryError(f"bad identity for {x}")

    # -- convenient accessors -------------------------------------------

    def hom(self, x: str, y: str) -> HomComplex:
        return self.homs[x, y]

    def dim(self, x: str, y: str) -> int:
        return self.homs[x, y].dim

    def degrees(self, x: str, y: str) -> tuple[int, ...]:
        return self.homs[x, y].space.degrees

    def zero(self, x: str, y: str) -> Vec:
        return (self.field.zero,) * self.dim(x, y)

    def basis_vector(self, x: str, y: str, i: int) -> Vec:
        f = self.field
        return tuple(f.one if k == i else f.zero for k in range(self.dim(x, y)))

    def element(self, x: str, y: str, coeffs: Mapping[str, object]) -> Morphism:
        space = self.homs[x, y].space
        v = [self.field.zero] * space.dim
        for name, c in coeffs.items():
            v[space.index(name)] = self.field.norm(c)
        return Morphism(x, y, tuple(v))

    def identity(self, x: str) -> Morphism:
        return Morphism(x, x, self.identities[x])

    def degree(self, m: Morphism) -> int | None:
        return self.homs[m.src, m.tgt].space.degree_of(m.vec)

    # -- cached sparse structure ----------------------------------------

    @cached_property
    def _dcols(self) -> dict:
        """``d(e_j)`` as sparse ``[(i, c)]`` per hom and source index ``j``."""
        out = {}
        for key, hc in self.homs.items():
            m = hc.differential.matrix
            out[key] = [[(i, m[i, j]) for i in range(m.rows) if m[i, j] != 0] for j in range(m.cols)]
        return out

    @cached_property
    def _ctab(self) -> dict:
        out = {}
        for key, tab in self.composition.items():
            out[key] = {ij: [(k, c) for k, c in enumerate(v) if c != 0] for ij, v in tab.items()}
        return out

    def d_basis(self, x: str, y: str, j: int) -> list[tuple[int, object]]:
        return self._dcols[x, y][j]

    def d_vec(self, x: str, y: str, v: Vec) -> Vec:
        f = self.field
        out = [0] * len(v)
        cols = self._dcols[x, y]
        for j, a in enumerate(v):
            if a:
                for i, c in cols[j]:
                    out[i] += a * c
        return tuple(f.norm(t) for t in out)

    def compose_basis(self, x: str, y: str, z: str, i: int, j: int) -> list[tuple[int, object]]:
        """Sparse ``g_i ∘ f_j`` with ``g_i ∈ Hom(y, z)``, ``f_j ∈ Hom(x, y)``."""
        return self._ctab.get((x, y, z), {}).get((i, j), ())

    def compose_vec(self, x: str, y: str, z: str, g: Vec, f: Vec) -> Vec:
        """Bilinear extension of the table: ``g ∘ f``, ``g ∈ Hom(y,z)``, ``f ∈ Hom(x,y)``."""
        fld = self.field
        out = [0] * self.dim(x, z)
        tab = self._ctab.get((x, y, z))
        if tab:
            fnz = [(j, b) for j, b in enumerate(f) if b]
            for i, a in enumerate(g):
                if not a:
                    continue
                for j, b in fnz:
                    e = tab.get((i, j))
                    if e:
                        ab = a * b
                        for k, c in e:
                            out[k] += ab * c
        return tuple(fld.norm(t) for t in out)

    def nonzero_hom(self, x: str, y: str) -> bool:
        return self.dim(x, y) > 0


def compose_elements(c: DgCategory, g: Morphism, f: Morphism) -> Morphism:
    if f.tgt != g.src:
        raise CategoryError(f"cannot compose {g.src}->{g.tgt} after {f.src}->{f.tgt}")
    return Morphism(f.src, g.tgt, c.compose_vec(f.src, f.tgt, g.tgt, g.vec, f.vec))


def differential(c: DgCategory, m: Morphism) -> Morphism:
    return Morphism(m.src, m.tgt, c.d_vec(m.src, m.tgt, m.vec))


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def validate_category(c: DgCategory) -> ValidationReport:
    rep = ValidationReport()
    fld = c.field
    obs = c.objects
    for x, y in itertools.product(obs, repeat=2):
        cr = validate_complex(c.homs[x, y])
        for d in cr.bad_degrees:
            rep.add("d-squared", f"Hom({x},{y}) degree {d}")
    for (x, y, z), tab in c.composition.items():
        for (i, j), v in tab.items():
            if len(v) != c.dim(x, z):
                rep.add("table-shape", f"({x},{y},{z}) entry {(i, j)}")
                continue
            want = c.degrees(y, z)[i] + c.degrees(x, y)[j]
            try:
                got = c.homs[x, z].space.degree_of(v)
            except GradedError:
                got = "mixed"
            if got is not None and got != want:
                rep.add("degree", f"{_nm(c, y, z, i)}∘{_nm(c, x, y, j)} has degree {got}, expected {want}")
    if not rep.ok:
        return rep

    for x in obs:
        idv = c.identities[x]
        try:
            deg = c.homs[x, x].space.degree_of(idv)
        except GradedError:
            deg = "mixed"
        if deg not in (None, 0):
            rep.add("unit", f"identity of {x} has degree {deg}")
        if not is_zero(c.d_vec(x, x, idv)):
            rep.add("unit", f"identity of {x} is not closed")

    for x, y, z in itertools.product(obs, repeat=3):
        dxz, dyz, dxy = c._dcols[x, z], c._dcols[y, z], c._dcols[x, y]
        tab = c._ctab.get((x, y, z), {})
        gdeg = c.degrees(y, z)
        pairs = set(tab)
        pairs |= {(i, j) for (k, j) in tab for i in range(c.dim(y, z)) if any(k == kk for kk, _ in dyz[i])}
        pairs |= {(i, j) for (i, k) in tab for j in range(c.dim(x, y)) if any(k == kk for kk, _ in dxy[j])}
        for i, j in sorted(pairs):
            diff = {}
            for k, a in tab.get((i, j), ()):
                for t, b in dxz[k]:
                    diff[t] = diff.get(t, 0) + a * b
            for k, a in dyz[i]:
                for t, b in tab.get((k, j), ()):
                    diff[t] = diff.get(t, 0) - a * b
            s = _sign(gdeg[i])
            for k, a in dxy[j]:
                for t, b in tab.get((i, k), ()):
                    diff[t] = diff.get(t, 0) - s * a * b
            if any(fld.norm(v) != 0 for v in diff.values()):
                rep.add("leibniz", f"({x},{y},{z}) pair ({_nm(c, y, z, i)}, {_nm(c, x, y, j)})")

    for w, x, y, z in itertools.product(obs, repeat=4):
        lhs = _triple_products(c, (w, x, y), (w, y, z), c.dim(y, z), inner_first=True)
        rhs = _triple_products(c, (x, y, z), (w, x, z), c.dim(w, x), inner_first=False)
        for i, j, k in sorted(set(lhs) | set(rhs)):
            if lhs.get((i, j, k)) != rhs.get((i, j, k)):
                rep.add("associativity", f"({_nm(c, y, z, i)}, {_nm(c, x, y, j)}, {_nm(c, w, x, k)})")

    for x, y in itertools.product(obs, repeat=2):
        for j in range(c.dim(x, y)):
            u = c.basis_vector(x, y, j)
            if c.compose_vec(x, y, y, c.identities[y], u) != u:
                rep.add("unit", f"id_{y} ∘ {_nm(c, x, y, j)} ≠ {_nm(c, x, y, j)}")
            if c.compose_vec(x, x, y, u, c.identities[x]) != u:
                rep.add("unit", f"{_nm(c, x, y, j)} ∘ id_{x} ≠ {_nm(c, x, y, j)}")
    return rep


def _triple_products(c: DgCategory, first: tuple, second: tuple, other_dim: int, inner_first: bool) -> dict:
    """Nonzero ``a_i (b_j e_k)`` (``inner_first``) or ``(a_i b_j) e_k`` keyed by ``(i, j, k)``."""
    fld = c.field
    tab2 = c._ctab.get(second, {})
    if not tab2:
        return {}
    # index the second table by the factor it shares with the first product
    by_shared: dict = {}
    for (a, b), e in tab2.items():
        o, m = (a, b) if inner_first else (b, a)
        by_shared.setdefault(m, []).append((o, e))
    out = {}
    for (p, q), prod in c._ctab.get(first, {}).items():
        acc: dict = {}
        for m, coef in prod:
            for o, e in by_shared.get(m, ()):
                row = acc.setdefault(o, {})
                for t, v in e:
                    row[t] = row.get(t, 0) + coef * v
        for o, row in acc.items():
            row = {t: n for t, n in ((t, fld.norm(v)) for t, v in row.items()) if n != 0}
            if row:
                out[(o, p, q) if inner_first else (p, q, o)] = row
    return out


def _nm(c: DgCategory, x: str, y: str, i: int) -> str:
    return c.homs[x, y].space.names[i]


@dataclass(frozen=True, eq=False)
class DgFunctor:
    """A strict dg-functor; ``hom_maps[(X, Y)]`` is a shift-0 graded map."""

    source: DgCategory
    target: DgCategory
    object_map: Mapping[str, str]
    hom_maps: Mapping[tuple[str, str], GradedMap]
    name: str = ""

    def __post_init__(self):
        for x in self.source.objects:
            if self.object_map.get(x) not in self.target.objects:
                raise CategoryError(f"object {x} is not mapped into the target")
        for x, y in itertools.product(self.source.objects, repeat=2):
            m = self.hom_maps.get((x, y))
            if m is None:
                raise CategoryError(f"missing hom map for ({x}, {y})")
            if m.shift != 0:
                raise CategoryError(f"hom map ({x}, {y}) has shift {m.shift}; functors need shift 0")
            if m.source != self.source.homs[x, y].space:
                raise CategoryError(f"hom map ({x}, {y}) has the wrong source space")
            if m.target != self.target.homs[self.object_map[x], self.object_map[y]].space:
                raise CategoryError(f"hom map ({x}, {y}) has the wrong target space")

    def __call__(self, x: str) -> str:
        return self.object_map[x]

    @cached_property
    def _images(self) -> dict:
        out = {}
        for key, m in self.hom_maps.items():
            out[key] = [m.matrix.column(j) for j in range(m.matrix.cols)]
        return out

    def image_basis(self, x: str, y: str, j: int) -> Vec:
        return self._images[x, y][j]

    def apply_vec(self, x: str, y: str, v: Vec) -> Vec:
        return self.hom_maps[x, y].matrix.apply(v)

    def apply(self, m: Morphism) -> Morphism:
        return Morphism(self(m.src), self(m.tgt), self.apply_vec(m.src, m.tgt, m.vec))


def functor_from_images(source: DgCategory, target: DgCategory, object_map: Mapping[str, str],
                        images: Mapping[tuple[str, str], Sequence[Vec]], name: str = "") -> DgFunctor:
    """Build a functor from the images of basis elements (missing pairs map to zero)."""
    maps = {}
    for x, y in itertools.product(source.objects, repeat=2):
        sp = source.homs[x, y].space
        tp = target.homs[object_map[x], object_map[y]].space
        cols = images.get((x, y))
        if cols is None:
            cols = [(target.field.zero,) * tp.dim] * sp.dim
        if len(cols) != sp.dim:
            raise CategoryError(f"wrong number of images for ({x}, {y})")
        rows = [[cols[j][i] for j in range(sp.dim)] for i in range(tp.dim)]
        mat = Matrix.from_rows(target.field, rows, cols=sp.dim)
        try:
            maps[x, y] = GradedMap(0, sp, tp, mat)
        except GradedError as exc:
            raise CategoryError(f"hom map ({x}, {y}) is not degree preserving: {exc}") from None
    return DgFunctor(source, target, dict(object_map), maps, name)


def identity_functor(c: DgCategory) -> DgFunctor:
    images = {(x, y): [c.basis_vector(x, y, j) for j in range(c.dim(x, y))]
              for x, y in itertools.product(c.objects, repeat=2)}
    return functor_from_images(c, c, {x: x for x in c.objects}, images, name=f"id_{c.name}")


def validate_functor(fun: DgFunctor) -> ValidationReport:
    rep = ValidationReport()
    src, tgt = fun.source, fun.target
    obs = src.objects
    for x, y in itertools.product(obs, repeat=2):
        fx, fy = fun(x), fun(y)
        for j in range(src.dim(x, y)):
            u = src.basis_vector(x, y, j)
            if fun.apply_vec(x, y, src.d_vec(x, y, u)) != tgt.d_vec(fx, fy, fun.image_basis(x, y, j)):
                rep.add("closedness", f"F(d {_nm(src, x, y, j)}) ≠ d F({_nm(src, x, y, j)})")
    for x, y, z in itertools.product(obs, repeat=3):
        for i in range(src.dim(y, z)):
            for j in range(src.dim(x, y)):
                gf = src.compose_vec(x, y, z, src.basis_vector(y, z, i), src.basis_vector(x, y, j))
                lhs = fun.apply_vec(x, z, gf)
                rhs = tgt.compose_vec(fun(x), fun(y), fun(z), fun.image_basis(y, z, i), fun.image_basis(x, y, j))
                if lhs != rhs:
                    rep.add("composition", f"F({_nm(src, y, z, i)}∘{_nm(src, x, y, j)})")
    for x in obs:
        if fun.apply_vec(x, x, src.identities[x]) != tgt.identities[fun(x)]:
            rep.add("unit", f"F(id_{x}) ≠ id_{fun(x)}")
    return rep


def hom_from_pairs(field: Field, pairs: Sequence[tuple[str, int]], dmat: Sequence[Sequence] | None = None) -> HomComplex:
    """Hom-complex from ``(name, degree)`` generators and an optional dense
    differential (rows = targets, columns = sources)."""
    sp = GradedSpace.from_pairs(pairs)
    if dmat is None:
        return HomComplex.zero_differential(field, sp)
    return HomComplex(sp, GradedMap(1, sp, sp, Matrix.from_rows(field, dmat, cols=sp.dim)))


def empty_hom(field: Field) -> HomComplex:
    return hom_from_pairs(field, [])


def check_closed_under(c: DgCategory) -> None:
    """Raise if the category fails validation (convenience for builders)."""
    rep = validate_category(c)
    if not rep.ok:
        raise CategoryError(f"invalid category {c.name!r}:\n{rep}")


__all__ = [
    "CategoryError", "DgCategory", "DgFunctor", "Morphism", "ValidationReport", "Violation",
    "compose_elements", "differential", "empty_hom", "functor_from_images", "hom_from_pairs",
    "identity_functor", "validate_category", "validate_functor", "vec_add", "vec_scale", "is_zero",
]
