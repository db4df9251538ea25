"""Seeded random dg-categories and objectwise homotopy equivalences.

Random source categories live inside complexes: every object ``X`` is a
complex ``V_X`` with generators in degrees 0..2, and all generators of all
objects are put in one random total order.  A hom is spanned by the matrix
units ``E_{b←a}`` with ``(b, a)`` in a relation ``R`` that only ever points
downward in that order, plus ``id_X`` on endomorphisms.  ``R`` is the
transitive closure of random pairs together with the differential's own
pairs, which makes each hom span closed under composition and ``d``.

Equivalences live in a category of complexes with full homs.  Each object
gets ``F X = S_X(V_X ⊕ K′_X)S_X⁻¹`` and ``G X = T_X(V_X ⊕ K_X)T_X⁻¹`` where
``K_X``, ``K′_X`` are sums of contractible pieces ``k → k`` (``K′_X`` is often
empty) and ``S_X``, ``T_X`` are random unipotent degree-0 changes of basis.
``Φ_X`` is the twisted map ``v + c ↦ v + κ(v)`` with ``κ = d τ + τ d`` for a
random degree −1 map ``τ: V_X → K_X``, so it is natural, closed and a
homotopy equivalence on every object without being a plain inclusion.

The pseudo-random stream is numpy's PCG64 (``numpy.random.Generator``).
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field

import numpy as np

from .category import DgCategory, DgFunctor, identity_functor
from .linalg import Field, Matrix, field_from_name
from .models import Cx, LinearModel, build_category, coordinates, full_hom_basis, matrix_functor, unit
from .transform import Transformation, dg_transformation, identity_transformation


@dataclass(frozen=True)
class InstanceSpec:
    seed: int = 0
    objects: int = 2
    max_generators: int = 2
    degree_window: tuple[int, int] = (-2, 2)
    field: str = "f:10007"
    arity: int = 4

    def __post_init__(self):
        if not 1 <= self.objects <= 4:
            raise ValueError("object count must be between 1 and 4")
        if not 0 <= self.max_generators <= 3:
            raise ValueError("max generators per hom per degree must be between 0 and 3")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if tuple(self.degree_window) != (-2, 2):
            raise ValueError("only the degree window [-2, 2] is supported")

    @property
    def k(self) -> Field:
        return field_from_name(self.field)


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([stream, seed]))


def _closure(pairs: set, order: dict) -> set:
    rel = set(pairs)
    changed = True
    while changed:
        changed = False
        for (c, b), (b2, a) in itertools.product(list(rel), repeat=2):
            if b == b2 and (c, a) not in rel:
                rel.add((c, a))
                changed = True
    return rel


def _nonzero(rng, k: Field):
    v = 0
    while v == 0:
        v = k.norm(int(rng.integers(-3, 4)))
    return v


def random_source_model(spec: InstanceSpec, rng: np.random.Generator) -> LinearModel:
    k = spec.k
    names = [f"X{i}" for i in range(spec.objects)]
    if spec.max_generators == 0:
        cx = {x: Cx((f"{x}v0",), (0,), Matrix.zeros(k, 1, 1)) for x in names}
        bases = {(x, x): [(f"id_{x}", Matrix.identity(k, 1))] for x in names}
        return LinearModel(k, cx, bases, name="C")

    gens = []   # (object, local index, degree)
    for x in names:
        for i in range(1 + int(rng.integers(0, 3))):
            gens.append((x, i, int(rng.integers(0, 3))))
    perm = [int(p) for p in rng.permutation(len(gens))]
    order = {g: r for r, g in enumerate(gens[p] for p in perm)}

    dpairs = set()
    used = set()
    dcoef = {}
    for a, c in itertools.permutations(gens, 2):
        if a[0] != c[0] or order[c] >= order[a] or c[2] != a[2] + 1:
            continue
        if a in used or c in used or rng.random() < 0.4:
            continue
        used |= {a, c}
        dpairs.add((c, a))
        dcoef[c, a] = _nonzero(rng, k)

    candidates = [(b, a) for a, b in itertools.permutations(gens, 2) if order[b] < order[a]]
    picked = {p for p in candidates if rng.random() < 0.7}
    while True:
        rel = _closure(picked | dpairs, order)
        counts = {}
        for b, a in rel:
            key = (a[0], b[0], b[2] - a[2])
            counts[key] = counts.get(key, 0) + 1
        over = [key for key, n in counts.items() if n > spec.max_generators]
        if not over:
            break
        removable = sorted(picked, key=lambda p: (order[p[0]], order[p[1]]))
        if not removable:
            break
        picked.discard(removable[int(rng.integers(0, len(removable)))])

    local = {x: [g for g in gens if g[0] == x] for x in names}
    cx = {}
    for x in names:
        gx = local[x]
        rows = [[k.zero] * len(gx) for _ in gx]
        for (c, a), v in dcoef.items():
            if a[0] == x:
                rows[gx.index(c)][gx.index(a)] = v
        cx[x] = Cx(tuple(f"{x}v{g[1]}" for g in gx), tuple(g[2] for g in gx),
                   Matrix.from_rows(k, rows, cols=len(gx)))
    bases = {}
    for x, y in itertools.product(names, repeat=2):
        basis = []
        if x == y:
            basis.append((f"id_{x}", Matrix.identity(k, len(local[x]))))
        for b, a in sorted(rel, key=lambda p: (order[p[1]], order[p[0]])):
            if a[0] == x and b[0] == y:
                basis.append((f"{y}v{b[1]}<{x}v{a[1]}",
                              unit(k, len(local[y]), len(local[x]), local[y].index(b), local[x].index(a))))
        bases[x, y] = basis
    return LinearModel(k, cx, bases, name="C")


def generate_category(spec: InstanceSpec) -> DgCategory:
    return build_category(random_source_model(spec, rng_for(spec.seed)))


# ---------------------------------------------------------------------------


@dataclass
class Extension:
    """``T (V ⊕ K) T⁻¹`` for one object: the contractible part and the twist."""

    contractible: Cx
    twist: Matrix
    twist_inverse: Matrix


@dataclass
class EquivalenceModel:
    source: LinearModel
    g_ext: dict[str, Extension] = field(default_factory=dict)   # G X
    f_ext: dict[str, Extension] = field(default_factory=dict)   # F X (K may be empty)
    tau: dict[str, Matrix] = field(default_factory=dict)        # degree −1, V_X → K_X
    identity: bool = False


@dataclass
class Equivalence:
    C: DgCategory
    D: DgCategory
    F: DgFunctor
    G: DgFunctor
    phi: Transformation
    model: EquivalenceModel | None = field(default=None, repr=False)


def _direct_sum(k: Field, v: Cx, w: Cx) -> Cx:
    n = v.dim + w.dim
    rows = [[k.zero] * n for _ in range(n)]
    for i in range(v.dim):
        for j in range(v.dim):
            rows[i][j] = v.d[i, j]
    for i in range(w.dim):
        for j in range(w.dim):
            rows[v.dim + i][v.dim + j] = w.d[i, j]
    return Cx(v.names + w.names, v.degrees + w.degrees, Matrix.from_rows(k, rows, cols=n))


def _unipotent_inverse(t: Matrix) -> Matrix:
    k = t.field
    n = t.rows
    nil = t - Matrix.identity(k, n)
    out = Matrix.identity(k, n)
    term = Matrix.identity(k, n)
    for _ in range(n):
        term = -(term @ nil)
        out = out + term
    return out


def _unipotent(k: Field, degrees, rng, where) -> Matrix:
    n = len(degrees)
    rows = [[k.one if i == c else k.zero for c in range(n)] for i in range(n)]
    for i in range(n):
        for c in range(n):
            if where(i, c) and degrees[i] == degrees[c] and rng.random() < 0.6:
                rows[i][c] = k.norm(int(rng.integers(-2, 3)))
    return Matrix.from_rows(k, rows, cols=n)


def _contractible(k: Field, prefix: str, low: int) -> Cx:
    return Cx((f"{prefix}0", f"{prefix}1"), (low, low + 1), Matrix.from_rows(k, [[0, 0], [1, 0]]))


def _empty(k: Field) -> Cx:
    return Cx((), (), Matrix.zeros(k, 0, 0))


def _random_extension(k: Field, v: Cx, kx: Cx, rng) -> Extension:
    s = _direct_sum(k, v, kx)
    lower = _unipotent(k, s.degrees, rng, lambda i, c: c < i)
    upper = _unipotent(k, s.degrees, rng, lambda i, c: c > i)
    return Extension(kx, lower @ upper, _unipotent_inverse(upper) @ _unipotent_inverse(lower))


def random_equivalence_model(spec: InstanceSpec, rng: np.random.Generator) -> EquivalenceModel:
    src = random_source_model(spec, rng)
    k = spec.k
    if spec.max_generators == 0:
        return EquivalenceModel(src, identity=True)
    model = EquivalenceModel(src)
    for x, v in src.complexes.items():
        kx = _contractible(k, f"{x}k", int(rng.integers(0, 2)))
        model.g_ext[x] = _random_extension(k, v, kx, rng)
        fk = _contractible(k, f"{x}c", int(rng.integers(0, 2))) if rng.random() < 0.5 else _empty(k)
        model.f_ext[x] = _random_extension(k, v, fk, rng)
        model.tau[x] = _random_tau(k, src, x, kx, rng)
    return model


def _random_tau(k: Field, src: LinearModel, x: str, kx: Cx, rng) -> Matrix:
    # only generators outside the image of every non-identity map into x, so
    # that τ_Y u = 0 and dτ + τd stays natural
    v = src.complexes[x]
    hit = set()
    for (a, b), basis in src.hom_bases.items():
        if b != x:
            continue
        for name, m in basis:
            if a == b and m.entries == Matrix.identity(k, v.dim).entries:
                continue
            hit |= {i for i in range(m.rows) for j in range(m.cols) if m[i, j] != 0}
    rows = [[k.zero] * v.dim for _ in range(kx.dim)]
    for r in range(kx.dim):
        for c in range(v.dim):
            if c not in hit and kx.degrees[r] == v.degrees[c] - 1 and rng.random() < 0.7:
                rows[r][c] = _nonzero(rng, k)
    return Matrix.from_rows(k, rows, cols=v.dim)


def corrupt_contractible(model: EquivalenceModel, obj: str | None = None) -> EquivalenceModel:
    """Zero the differential of one contractible summand of G (breaks the equivalence)."""
    if model.identity:
        raise ValueError("the identity equivalence has no contractible summand")
    obj = obj or next(iter(model.g_ext))
    ext = model.g_ext[obj]
    kx = ext.contractible
    broken = dataclasses.replace(ext, contractible=dataclasses.replace(kx, d=Matrix.zeros(kx.d.field, kx.dim, kx.dim)))
    return dataclasses.replace(model, g_ext={**model.g_ext, obj: broken})


def _block(k: Field, a: Matrix, b: Matrix | None, nrows: int, ncols: int) -> Matrix:
    """``a`` in the top-left corner, ``b`` in the bottom-right one."""
    rows = [[k.zero] * ncols for _ in range(nrows)]
    for i in range(a.rows):
        for j in range(a.cols):
            rows[i][j] = a[i, j]
    if b is not None:
        for i in range(b.rows):
            for j in range(b.cols):
                rows[nrows - b.rows + i][ncols - b.cols + j] = b[i, j]
    return Matrix.from_rows(k, rows, cols=ncols)


def build_equivalence(model: EquivalenceModel) -> Equivalence:
    src = model.source
    C = build_category(src)
    if model.identity:
        F = identity_functor(C)
        F = DgFunctor(F.source, F.target, F.object_map, F.hom_maps, name="F")
        return Equivalence(C, C, F, F, identity_transformation(F), model)
    k = src.field
    cx = {}
    sides = (("F", model.f_ext), ("G", model.g_ext))
    for tag, exts in sides:
        for x, v in src.complexes.items():
            e = exts[x]
            s = _direct_sum(k, v, e.contractible)
            cx[f"{tag}{x}"] = Cx(tuple(f"{n}'" if tag == "G" else n for n in s.names), s.degrees,
                                 e.twist @ s.d @ e.twist_inverse)
    bases = {(a, b): full_hom_basis(k, cx[a], cx[b]) for a in cx for b in cx}
    dmodel = LinearModel(k, cx, bases, name="D")
    D = build_category(dmodel)

    def action(exts):
        def embed(x, y, m):
            ex, ey = exts[x], exts[y]
            nx = src.complexes[x].dim + ex.contractible.dim
            ny = src.complexes[y].dim + ey.contractible.dim
            ident = x == y and m.entries == Matrix.identity(k, m.rows).entries
            tail = Matrix.identity(k, ex.contractible.dim) if ident and ex.contractible.dim else None
            return ey.twist @ _block(k, m, tail, ny, nx) @ ex.twist_inverse
        return embed

    functors = {}
    for tag, exts in sides:
        functors[tag] = matrix_functor(src, C, dmodel, D, {x: f"{tag}{x}" for x in src.complexes},
                                       action(exts), name=tag)
    comps = {}
    for x, v in src.complexes.items():
        ef, eg = model.f_ext[x], model.g_ext[x]
        kx = eg.contractible
        kappa = kx.d @ model.tau[x] + model.tau[x] @ v.d
        # V ⊕ K' → V ⊕ K: identity on V, κ into K, zero on K'
        rows = [[k.zero] * (v.dim + ef.contractible.dim) for _ in range(v.dim + kx.dim)]
        for i in range(v.dim):
            rows[i][i] = k.one
        for i in range(kx.dim):
            for j in range(v.dim):
                rows[v.dim + i][j] = kappa[i, j]
        core = Matrix.from_rows(k, rows, cols=v.dim + ef.contractible.dim)
        comps[x] = coordinates(dmodel, f"F{x}", f"G{x}", eg.twist @ core @ ef.twist_inverse)
    F, G = functors["F"], functors["G"]
    return Equivalence(C, D, F, G, dg_transformation(F, G, comps), model)


def generate_equivalence(spec: InstanceSpec) -> Equivalence:
    return build_equivalence(random_equivalence_model(spec, rng_for(spec.seed)))
