"""Graded vector spaces, graded maps and cochain complexes.

A :class:`GradedSpace` is a flat, ordered list of named generators, each
carrying an integer degree.  Maps are stored as one dense matrix over the
flat bases; homogeneity (shift ``s`` sends degree ``d`` into ``d + s``) is
an invariant checked at construction.  ``block(d)`` recovers the per-degree
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .linalg import Field, Matrix, rank


class GradedError(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    names: tuple[str, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise GradedError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise GradedError(f"duplicate generator names in {self.names}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, int]]) -> "GradedSpace":
        return cls(tuple(n for n, _ in pairs), tuple(int(d) for _, d in pairs))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.degrees)

    def basis(self, degree: int) -> list[str]:
        return [n for n, d in zip(self.names, self.degrees) if d == degree]

    def indices(self, degree: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == degree]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GradedError(f"unknown generator {name!r}") from None

    def degree_of(self, vec: Sequence) -> int | None:
        """Degree of a homogeneous vector; ``None`` for zero; raises if mixed."""
        degs = {self.degrees[i] for i, x in enumerate(vec) if x != 0}
        if not degs:
            return None
        if len(degs) > 1:
            raise GradedError(f"inhomogeneous element with degrees {sorted(degs)}")
        return degs.pop()


@dataclass(frozen=True)
class GradedMap:
    shift: int
    source: GradedSpace
    target: GradedSpace
    matrix: Matrix

    def __post_init__(self):
        m = self.matrix
        if (m.rows, m.cols) != (self.target.dim, self.source.dim):
            raise GradedError("matrix shape does not match the bases")
        for i in range(m.rows):
            for j in range(m.cols):
                if m[i, j] != 0 and self.target.degrees[i] != self.source.degrees[j] + self.shift:
                    raise GradedError(
                        f"entry ({self.target.names[i]}, {self.source.names[j]}) breaks shift {self.shift}")

    @property
    def field(self) -> Field:
        return self.matrix.field

    @classmethod
    def zero(cls, field: Field, source: GradedSpace, target: GradedSpace, shift: int = 0) -> "GradedMap":
        return cls(shift, source, target, Matrix.zeros(field, target.dim, source.dim))

    @classmethod
    def identity(cls, field: Field, space: GradedSpace) -> "GradedMap":
        return cls(0, space, space, Matrix.identity(field, space.dim))

    def block(self, degree: int) -> Matrix:
        rows = self.target.indices(degree + self.shift)
        cols = self.source.indices(degree)
        return Matrix.from_rows(self.field, [[self.matrix[i, j] for j in cols] for i in rows],
                                cols=len(cols))

    @property
    def blocks(self) -> dict[int, Matrix]:
        return {d: self.block(d) for d in sorted(self.source.support)}

    def __call__(self, vec: Sequence) -> tuple:
        return self.matrix.apply(vec)

    def scale(self, c) -> "GradedMap":
        return GradedMap(self.shift, self.source, self.target, self.matrix.scale(c))

    def __add__(self, other: "GradedMap") -> "GradedMap":
        if (self.shift, self.source, self.target) != (other.shift, other.source, other.target):
            raise GradedError("cannot add maps with different shape or shift")
        return GradedMap(self.shift, self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return self.matrix.is_zero()


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """``g ∘ f``.  No sign is introduced; shifts add."""
    if g.source != f.target:
        raise GradedError("source of g must equal target of f")
    return GradedMap(g.shift + f.shift, f.source, g.target, g.matrix @ f.matrix)


@dataclass(frozen=True)
class HomComplex:
    space: GradedSpace
    differential: GradedMap

    def __post_init__(self):
        d = self.differential
        if d.shift != 1 or d.source != self.space or d.target != self.space:
            raise GradedError("differential must be a shift +1 endomorphism of the space")

    @classmethod
    def zero_differential(cls, field: Field, space: GradedSpace) -> "HomComplex":
        return cls(space, GradedMap.zero(field, space, space, 1))

    @property
    def field(self) -> Field:
        return self.differential.field

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class ComplexMap:
    """A graded map between two complexes (needed for the map differential)."""

    source: HomComplex
    target: HomComplex
    map: GradedMap

    def __post_init__(self):
        if self.map.source != self.source.space or self.map.target != self.target.space:
            raise GradedError("map does not match the complexes")

    @property
    def shift(self) -> int:
        return self.map.shift


def map_differential(f: ComplexMap) -> ComplexMap:
    """``d f = d_target ∘ f − (−1)^{|f|} f ∘ d_source``."""
    dt = f.target.differential
    ds = f.source.differential
    sign = -1 if f.shift % 2 == 0 else 1
    m = compose(dt, f.map) + compose(f.map, ds).scale(sign)
    return ComplexMap(f.source, f.target, m)


@dataclass
class ComplexReport:
    bad_degrees: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.bad_degrees


def validate_complex(c: HomComplex) -> ComplexReport:
    d = c.differential
    dd = compose(d, d)
    bad = sorted(d0 for d0 in c.space.support if not dd.block(d0).is_zero())
    return ComplexReport(bad)


def cohomology_dims(c: HomComplex) -> dict[int, int]:
    """``dim ker d_n − dim im d_{n−1}`` for every degree in the support."""
    rep = validate_complex(c)
    if not rep.ok:
        raise GradedError(f"not a complex: d² ≠ 0 in degrees {rep.bad_degrees}")
    d = c.differential
    out = {}
    for n in sorted(c.space.support):
        dim_n = len(c.space.indices(n))
        ker = dim_n - rank(d.block(n))
        im = rank(d.block(n - 1)) if (n - 1) in c.space.support else 0
        out[n] = ker - im
    return out
