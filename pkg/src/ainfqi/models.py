"""Dg-categories realised inside cochain complexes of finite-dimensional spaces.

Objects are small complexes ``V_X``; each hom is spanned by a list of
homogeneous matrices ``V_X → V_Y``.  The builder computes hom differentials
(``d f = d_Y f − (−1)^{|f|} f d_X``) and composition tables by expressing the
results in the chosen bases, and refuses spans that are not closed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .category import CategoryError, DgCategory, DgFunctor, functor_from_images, hom_from_pairs
from .linalg import Field, Matrix, rref


@dataclass(frozen=True)
class Cx:
    """A finite complex: generator names, degrees, differential (rows = targets)."""

    names: tuple[str, ...]
    degrees: tuple[int, ...]
    d: Matrix

    @property
    def dim(self) -> int:
        return len(self.names)


def complex_(field: Field, gens: Sequence[tuple[str, int]], d: Mapping[str, Mapping[str, object]] | None = None) -> Cx:
    """``d`` maps a source generator to ``{target generator: coefficient}``."""
    names = tuple(n for n, _ in gens)
    degs = tuple(int(k) for _, k in gens)
    rows = [[field.zero] * len(names) for _ in names]
    for src, img in (d or {}).items():
        for tgt, c in img.items():
            rows[names.index(tgt)][names.index(src)] = field.norm(c)
    return Cx(names, degs, Matrix.from_rows(field, rows, cols=len(names)))


def unit(field: Field, rows: int, cols: int, i: int, j: int) -> Matrix:
    return Matrix(field, rows, cols, tuple(field.one if (r == i and c == j) else field.zero
                                           for r in range(rows) for c in range(cols)))


def _sgn(e):
    return -1 if e % 2 else 1


class _Coords:
    """Coordinates of matrices in a fixed independent family."""

    def __init__(self, field: Field, mats: Sequence[Matrix], rows: int, cols: int):
        self.field = field
        self.k = len(mats)
        self.rows, self.cols = rows, cols
        self.unit_pos = None
        flat = [m.entries for m in mats]
        if all(sum(1 for x in e if x != 0) == 1 and next(x for x in e if x != 0) == 1 for e in flat):
            self.unit_pos = [next(i for i, x in enumerate(e) if x != 0) for e in flat]
        if self.k == 0:
            self.sel, self.inv = [], None
            return
        if self.unit_pos is not None:
            if len(set(self.unit_pos)) != self.k:
                raise CategoryError("hom basis matrices are linearly dependent")
            return
        mt = Matrix.from_rows(field, flat, cols=rows * cols)   # k × rs
        _, piv = rref(mt)
        if len(piv) != self.k:
            raise CategoryError("hom basis matrices are linearly dependent")
        self.sel = piv
        sub = Matrix.from_rows(field, [[flat[a][p] for a in range(self.k)] for p in piv], cols=self.k)
        aug = Matrix.from_rows(field, [list(sub.row(i)) + [field.one if i == j else field.zero
                                                           for j in range(self.k)] for i in range(self.k)],
                               cols=2 * self.k)
        red, _ = rref(aug)
        self.inv = Matrix.from_rows(field, [list(red.row(i))[self.k:] for i in range(self.k)], cols=self.k)
        self.flat = flat

    def __call__(self, m: Matrix) -> tuple:
        f = self.field
        if self.k == 0:
            if not m.is_zero():
                raise CategoryError("result leaves the zero hom")
            return ()
        e = m.entries
        if self.unit_pos is not None:
            v = tuple(e[p] for p in self.unit_pos)
            if sum(1 for x in e if x != 0) != sum(1 for x in v if x != 0):
                raise CategoryError("hom span is not closed")
            return v
        v = self.inv.apply([e[p] for p in self.sel])
        back = [0] * len(e)
        for a, c in enumerate(v):
            if c:
                for p, x in enumerate(self.flat[a]):
                    if x:
                        back[p] += c * x
        if tuple(f.norm(x) for x in back) != e:
            raise CategoryError("hom span is not closed")
        return v


@dataclass
class LinearModel:
    """Everything needed to rebuild a matrix-realised dg-category."""

    field: Field
    complexes: dict[str, Cx]
    hom_bases: dict[tuple[str, str], list[tuple[str, Matrix]]]
    name: str = ""


def full_hom_basis(field: Field, vx: Cx, vy: Cx) -> list[tuple[str, Matrix]]:
    """All matrix units ``E_{b←a}``, named ``"b<a"``."""
    out = []
    for a in range(vx.dim):
        for b in range(vy.dim):
            out.append((f"{vy.names[b]}<{vx.names[a]}", unit(field, vy.dim, vx.dim, b, a)))
    return out


def mat_degree(m: Matrix, vx: Cx, vy: Cx) -> int | None:
    degs = {vy.degrees[i] - vx.degrees[j] for i in range(m.rows) for j in range(m.cols) if m[i, j] != 0}
    if not degs:
        return None
    if len(degs) > 1:
        raise CategoryError("inhomogeneous hom basis matrix")
    return degs.pop()


def build_category(model: LinearModel) -> DgCategory:
    fld = model.field
    cx = model.complexes
    objs = tuple(cx)
    homs, coords, degs = {}, {}, {}
    for x, y in itertools.product(objs, repeat=2):
        basis = model.hom_bases.get((x, y), [])
        mats = [m for _, m in basis]
        dg = []
        for name, m in basis:
            d = mat_degree(m, cx[x], cx[y])
            if d is None:
                raise CategoryError(f"zero basis matrix {name} in ({x}, {y})")
            dg.append(d)
        degs[x, y] = dg
        coords[x, y] = _Coords(fld, mats, cx[y].dim, cx[x].dim)
        dcols = []
        for (name, m), d in zip(basis, dg):
            dm = (cx[y].d @ m) + (m @ cx[x].d).scale(-_sgn(d))
            dcols.append(coords[x, y](dm))
        dmat = [[dcols[j][i] for j in range(len(basis))] for i in range(len(basis))]
        homs[x, y] = hom_from_pairs(fld, [(n, d) for (n, _), d in zip(basis, dg)], dmat)
    comp = {}
    positions = {}
    for key, c in coords.items():
        if c.unit_pos is not None:
            positions[key] = {p: i for i, p in enumerate(c.unit_pos)}
    for x, y, z in itertools.product(objs, repeat=3):
        if (x, y) in positions and (y, z) in positions and (x, z) in positions:
            comp_units = _unit_products(fld, cx[x].dim, cx[y].dim, cx[z].dim, coords[x, y].unit_pos,
                                        coords[y, z].unit_pos, positions[x, z], len(coords[x, z].unit_pos))
            if comp_units:
                comp[x, y, z] = comp_units
            continue
        tab = {}
        for i, (_, g) in enumerate(model.hom_bases.get((y, z), [])):
            for j, (_, f) in enumerate(model.hom_bases.get((x, y), [])):
                v = coords[x, z](g @ f)
                if any(v):
                    tab[i, j] = v
        if tab:
            comp[x, y, z] = tab
    ids = {x: coords[x, x](Matrix.identity(fld, cx[x].dim)) for x in objs}
    return DgCategory(fld, objs, homs, comp, ids, name=model.name)


def _unit_products(fld, nx, ny, nz, pos_xy, pos_yz, index_xz, dim_xz):
    # E_{p<-q} E_{r<-s} = [q == r] E_{p<-s}; a flat position is row * cols + col
    tab = {}
    for i, pg in enumerate(pos_yz):
        p, q = divmod(pg, ny)
        for j, pf in enumerate(pos_xy):
            r, s = divmod(pf, nx)
            if q != r:
                continue
            k = index_xz.get(p * nx + s)
            if k is None:
                raise CategoryError("hom span is not closed under composition")
            tab[i, j] = tuple(fld.one if t == k else fld.zero for t in range(dim_xz))
    return tab


def coordinates(model: LinearModel, x: str, y: str, m: Matrix) -> tuple:
    mats = [b for _, b in model.hom_bases.get((x, y), [])]
    return _Coords(model.field, mats, model.complexes[y].dim, model.complexes[x].dim)(m)


def matrix_functor(src_model: LinearModel, src: DgCategory, tgt_model: LinearModel, tgt: DgCategory,
                   object_map: Mapping[str, str], action, name: str = "") -> DgFunctor:
    """Functor given by ``action(x, y, matrix) -> matrix`` on hom basis matrices."""
    images = {}
    for x, y in itertools.product(src.objects, repeat=2):
        fx, fy = object_map[x], object_map[y]
        cols = []
        for _, m in src_model.hom_bases.get((x, y), []):
            cols.append(coordinates(tgt_model, fx, fy, action(x, y, m)))
        images[x, y] = cols
    return functor_from_images(src, tgt, object_map, images, name=name)
