"""Arity-truncated A∞-prenatural transformations between strict dg-functors.

A transformation ``Φ: F ⇒ G`` of degree ``n`` is a sparse table keyed by
``(objs, idxs)``:

* ``objs = (X0, ..., Xl)`` is a chain of objects of the source category with
  every consecutive hom nonzero,
* ``idxs = (j1, ..., jl)`` picks basis element ``u_i = e_{j_i}`` of
  ``Hom(X_{i-1}, X_i)``,

and the value is ``Φ^l(u_l ⊗ ... ⊗ u_1) ∈ Hom_D(F X0, G Xl)``, of degree
``n - l + Σ|u_i|``.  Arity 0 entries are ``((X,), ())``.  Only components of
arity ``≤ arity`` exist.

Sign conventions for the differential are pluggable (:class:`Convention`).
``KOSZUL`` is the shipped convention; ``LITERAL`` keeps the uncorrected exponents
and exists for auditing.  The two agree when the
degree is 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from .category import DgCategory, DgFunctor, Vec
from .graded import GradedError
from .linalg import Field

Key = tuple  # (objs, idxs)


class TransformationError(ValueError):
    pass


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# enumeration of object chains and basis tuples


@lru_cache(maxsize=None)
def _chains(cat: DgCategory, length: int) -> tuple:
    if length == 0:
        return tuple((x,) for x in cat.objects)
    out = []
    for ch in _chains(cat, length - 1):
        for y in cat.objects:
            if cat.dim(ch[-1], y):
                out.append(ch + (y,))
    return tuple(out)


def object_chains(cat: DgCategory, arity: int) -> tuple:
    """All ``(X0, ..., X_arity)`` whose consecutive homs are nonzero."""
    return _chains(cat, arity)


def basis_tuples(cat: DgCategory, objs: tuple) -> Iterator[tuple]:
    return itertools.product(*(range(cat.dim(objs[i], objs[i + 1])) for i in range(len(objs) - 1)))


def keys(cat: DgCategory, arity: int) -> Iterator[Key]:
    for objs in object_chains(cat, arity):
        for idxs in basis_tuples(cat, objs):
            yield objs, idxs


def input_degrees(cat: DgCategory, objs: tuple, idxs: tuple) -> list[int]:
    return [cat.degrees(objs[i], objs[i + 1])[idxs[i]] for i in range(len(idxs))]


# ---------------------------------------------------------------------------
# sign conventions


@dataclass(frozen=True)
class Convention:
    """Exponents of the four signed summands of the differential.

    ``degs[i-1]`` is ``|u_i|``; ``i`` is 1-based as in ``u_1, ..., u_l``.
    """

    name: str
    left_action: Callable[[int, list], int]
    right_action: Callable[[int, list], int]
    inner_d: Callable[[int, list, int], int]
    inner_mult: Callable[[int, list, int], int]


def _tail(degs, i):
    return sum(degs[i:])  # |u_{i+1}| + ... + |u_l|


KOSZUL = Convention(
    "koszul",
    left_action=lambda n, degs: (n + 1) * (degs[-1] - 1),
    right_action=lambda n, degs: n + sum(degs) + len(degs) - 1,
    inner_d=lambda n, degs, i: n + _tail(degs, i) + len(degs) - i + 1,
    inner_mult=lambda n, degs, i: n + _tail(degs, i) + len(degs) - i + 1,
)

LITERAL = Convention(
    "literal",
    left_action=lambda n, degs: degs[-1] - 1,
    right_action=lambda n, degs: n * degs[0] - sum(degs) + len(degs) - 1,
    inner_d=lambda n, degs, i: _tail(degs, i) + len(degs) - i + 1,
    inner_mult=lambda n, degs, i: _tail(degs, i) + len(degs) - i + 1,
)

CONVENTIONS = {c.name: c for c in (KOSZUL, LITERAL)}


@dataclass(frozen=True)
class CompositionSign:
    """``ε(k) = (−1)^{|ξ|·Σ_{i>k}(|u_i| − c1) + c2·|θ| + c3}``."""

    c1: int = 1
    c2: int = 0
    c3: int = 0

    def exponent(self, deg_theta: int, deg_xi: int, tail_degs) -> int:
        return deg_xi * sum(a - self.c1 for a in tail_degs) + self.c2 * deg_theta + self.c3


SHIPPED_COMPOSITION = CompositionSign(1, 0, 0)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Transformation:
    source: DgFunctor
    target: DgFunctor
    degree: int
    arity: int
    table: Mapping[Key, Vec]
    check: bool = True

    def __post_init__(self):
        F, G = self.source, self.target
        if F.source is not G.source or F.target is not G.target:
            raise TransformationError("source and target functors must share categories")
        if self.arity < 0:
            raise TransformationError("arity bound must be non-negative")
        clean = {k: v for k, v in self.table.items() if any(v)}
        object.__setattr__(self, "table", clean)
        if self.check:
            bad = degree_violations(self)
            if bad:
                raise TransformationError(f"degree bookkeeping fails at {bad[0]}")

    @property
    def C(self) -> DgCategory:
        return self.source.source

    @property
    def D(self) -> DgCategory:
        return self.source.target

    @property
    def field(self) -> Field:
        return self.D.field

    def get(self, objs: tuple, idxs: tuple):
        """Component value or ``None`` when it is zero/absent."""
        return self.table.get((objs, idxs))

    def value(self, objs: tuple, idxs: tuple = ()) -> Vec:
        v = self.table.get((objs, idxs))
        if v is None:
            return self.D.zero(self.source(objs[0]), self.target(objs[-1]))
        return v

    def component0(self, x: str) -> Vec:
        return self.value((x,), ())

    def components(self, arity: int) -> dict:
        return {k: v for k, v in self.table.items() if len(k[1]) == arity}

    def is_zero(self) -> bool:
        return not self.table

    def truncate(self, arity: int) -> "Transformation":
        return Transformation(self.source, self.target, self.degree, self.arity,
                              {k: v for k, v in self.table.items() if len(k[1]) <= arity}, check=False)

    def with_arity(self, arity: int) -> "Transformation":
        return Transformation(self.source, self.target, self.degree, arity,
                              {k: v for k, v in self.table.items() if len(k[1]) <= arity}, check=False)

    def same_table(self, other: "Transformation") -> bool:
        return self.table == other.table

    def __repr__(self):
        return (f"Transformation({self.source.name}⇒{self.target.name}, degree={self.degree}, "
                f"arity={self.arity}, entries={len(self.table)})")


def expected_degree(t: Transformation, objs, idxs) -> int:
    return t.degree - len(idxs) + sum(input_degrees(t.C, objs, idxs))


def degree_violations(t: Transformation) -> list:
    bad = []
    D = t.D
    for (objs, idxs), v in t.table.items():
        if len(idxs) > t.arity:
            bad.append(((objs, idxs), "above arity bound"))
            continue
        space = D.homs[t.source(objs[0]), t.target(objs[-1])].space
        if len(v) != space.dim:
            bad.append(((objs, idxs), "wrong length"))
            continue
        try:
            d = space.degree_of(v)
        except GradedError:
            bad.append(((objs, idxs), "inhomogeneous"))
            continue
        if d is not None and d != expected_degree(t, objs, idxs):
            bad.append(((objs, idxs), f"degree {d}, expected {expected_degree(t, objs, idxs)}"))
    return bad


def zero_transformation(F: DgFunctor, G: DgFunctor, degree: int, arity: int) -> Transformation:
    return Transformation(F, G, degree, arity, {})


def identity_transformation(F: DgFunctor, arity: int = 0) -> Transformation:
    D = F.target
    table = {((x,), ()): D.identities[F(x)] for x in F.source.objects}
    return Transformation(F, F, 0, arity, table)


def dg_transformation(F: DgFunctor, G: DgFunctor, comps: Mapping[str, Vec], arity: int = 0,
                      degree: int = 0) -> Transformation:
    return Transformation(F, G, degree, arity, {((x,), ()): v for x, v in comps.items()})


# ---------------------------------------------------------------------------
# the differential


_ALL = frozenset({"d", "left", "right", "inner_d", "inner_mult"})
_INTERNAL = frozenset({"d", "inner_d"})


def dinf_component(t: Transformation, objs: tuple, idxs: tuple, conv: Convention = KOSZUL,
                   parts=_ALL, degree: int | None = None) -> Vec:
    """One entry of ``d∞ t``; ``parts`` selects which summands to include."""
    C, D = t.C, t.D
    F, G = t.source, t.target
    n = t.degree if degree is None else degree
    fld = D.field
    l = len(idxs)
    fx0, gxl = F(objs[0]), G(objs[-1])
    out = [0] * D.dim(fx0, gxl)

    def acc(vec, s):
        for k, v in enumerate(vec):
            if v:
                out[k] += s * v

    if "d" in parts:
        v = t.get(objs, idxs)
        if v is not None:
            acc(D.d_vec(fx0, gxl, v), 1)
    if l == 0:
        return tuple(fld.norm(x) for x in out)
    degs = input_degrees(C, objs, idxs)

    if "left" in parts:
        low = t.get(objs[:-1], idxs[:-1])
        if low is not None:
            gu = G.image_basis(objs[-2], objs[-1], idxs[-1])
            acc(D.compose_vec(fx0, G(objs[-2]), gxl, gu, low), _sign(conv.left_action(n, degs)))
    if "right" in parts:
        low = t.get(objs[1:], idxs[1:])
        if low is not None:
            fu = F.image_basis(objs[0], objs[1], idxs[0])
            acc(D.compose_vec(fx0, F(objs[1]), gxl, low, fu), _sign(conv.right_action(n, degs)))
    if "inner_d" in parts:
        for p in range(l):
            dcol = C.d_basis(objs[p], objs[p + 1], idxs[p])
            if not dcol:
                continue
            s = _sign(conv.inner_d(n, degs, p + 1))
            for k, c in dcol:
                v = t.get(objs, idxs[:p] + (k,) + idxs[p + 1:])
                if v is not None:
                    acc(v, s * c)
    if "inner_mult" in parts:
        for p in range(l - 1):
            prod = C.compose_basis(objs[p], objs[p + 1], objs[p + 2], idxs[p + 1], idxs[p])
            if not prod:
                continue
            s = _sign(conv.inner_mult(n, degs, p + 1))
            nobjs = objs[:p + 1] + objs[p + 2:]
            for k, c in prod:
                v = t.get(nobjs, idxs[:p] + (k,) + idxs[p + 2:])
                if v is not None:
                    acc(v, s * c)
    if not any(out):
        return tuple(out)
    return tuple(fld.norm(x) for x in out)


def d_infty(t: Transformation, conv: Convention = KOSZUL) -> Transformation:
    """The differential: degree goes up by one, arity bound unchanged."""
    table = {}
    for l in range(t.arity + 1):
        for objs, idxs in keys(t.C, l):
            v = dinf_component(t, objs, idxs, conv)
            if any(v):
                table[objs, idxs] = v
    return Transformation(t.source, t.target, t.degree + 1, t.arity, table, check=False)


def internal_differential(t: Transformation, arity: int, conv: Convention = KOSZUL) -> dict:
    """Only the summands of ``d∞`` that stay in ``arity``: ``d`` of the output
    and ``d`` of each input.  Returned as a table restricted to ``arity``."""
    out = {}
    for objs, idxs in keys(t.C, arity):
        v = dinf_component(t, objs, idxs, conv, parts=_INTERNAL)
        if any(v):
            out[objs, idxs] = v
    return out


# ---------------------------------------------------------------------------
# predicates


@dataclass
class NaturalityReport:
    ok: bool
    problems: list[str]


def is_dg_natural(t: Transformation) -> NaturalityReport:
    problems = []
    if t.degree != 0:
        problems.append(f"degree {t.degree} ≠ 0")
    higher = [k for k in t.table if len(k[1]) > 0]
    if higher:
        problems.append(f"nonzero higher component at {higher[0]}")
    C, D, F, G = t.C, t.D, t.source, t.target
    for x in C.objects:
        v = t.component0(x)
        if any(D.d_vec(F(x), G(x), v)):
            problems.append(f"component at {x} is not closed")
    n = t.degree
    for x, y in itertools.product(C.objects, repeat=2):
        for j in range(C.dim(x, y)):
            m = C.degrees(x, y)[j]
            lhs = D.compose_vec(F(x), F(y), G(y), t.component0(y), F.image_basis(x, y, j))
            rhs = D.compose_vec(F(x), G(x), G(y), G.image_basis(x, y, j), t.component0(x))
            s = _sign(m * n)
            if any(D.field.norm(a - s * b) for a, b in zip(lhs, rhs)):
                problems.append(f"naturality fails on {C.homs[x, y].space.names[j]}")
    return NaturalityReport(not problems, problems)


@dataclass
class ClosednessReport:
    ok: bool
    arity: int | None = None
    key: Key | None = None


def is_closed_up_to(t: Transformation, conv: Convention = KOSZUL) -> ClosednessReport:
    for l in range(t.arity + 1):
        for objs, idxs in keys(t.C, l):
            if any(dinf_component(t, objs, idxs, conv)):
                return ClosednessReport(False, l, (objs, idxs))
    return ClosednessReport(True)


# ---------------------------------------------------------------------------
# compositions and linear structure


def _chain_check(first: Transformation, second: Transformation):
    """``second ∘ first`` needs first: F⇒G, second: G⇒H."""
    if first.target is not second.source:
        raise TransformationError(
            f"functor mismatch: {first.target.name!r} is not {second.source.name!r}")


def compose_dg_right(psi: Transformation, phi: Transformation) -> Transformation:
    """``psi ∘ phi`` with ``phi`` dg: post-compose each output of ``psi`` with ``Φ_{X0}``."""
    rep = is_dg_natural(phi)
    if not rep.ok:
        raise TransformationError(f"right factor is not dg-natural: {rep.problems[0]}")
    _chain_check(phi, psi)
    D, F, G = psi.D, phi.source, phi.target
    H = psi.target
    table = {}
    for (objs, idxs), v in psi.table.items():
        x0 = objs[0]
        w = D.compose_vec(F(x0), G(x0), H(objs[-1]), v, phi.component0(x0))
        if any(w):
            table[objs, idxs] = w
    return Transformation(F, H, psi.degree, psi.arity, table, check=False)


def compose_dg_left(psi: Transformation, phi: Transformation) -> Transformation:
    """``psi ∘ phi`` with ``psi`` dg: pre-compose ``Ψ_{Xl}`` onto each output of ``phi``."""
    rep = is_dg_natural(psi)
    if not rep.ok:
        raise TransformationError(f"left factor is not dg-natural: {rep.problems[0]}")
    _chain_check(phi, psi)
    D, F, G, H = phi.D, phi.source, phi.target, psi.target
    table = {}
    for (objs, idxs), v in phi.table.items():
        xl = objs[-1]
        w = D.compose_vec(F(objs[0]), G(xl), H(xl), psi.component0(xl), v)
        if any(w):
            table[objs, idxs] = w
    return Transformation(F, H, phi.degree, phi.arity, table, check=False)


def compose_general_component(theta: Transformation, xi: Transformation, objs: tuple, idxs: tuple,
                              sign: CompositionSign = SHIPPED_COMPOSITION) -> Vec:
    D, F, G, H = xi.D, xi.source, xi.target, theta.target
    l = len(idxs)
    fx0, hxl = F(objs[0]), H(objs[-1])
    out = [0] * D.dim(fx0, hxl)
    degs = input_degrees(xi.C, objs, idxs)
    for k in range(l + 1):
        a = xi.get(objs[:k + 1], idxs[:k])
        if a is None:
            continue
        b = theta.get(objs[k:], idxs[k:])
        if b is None:
            continue
        s = _sign(sign.exponent(theta.degree, xi.degree, degs[k:]))
        for i, v in enumerate(D.compose_vec(fx0, G(objs[k]), hxl, b, a)):
            if v:
                out[i] += s * v
    return tuple(D.field.norm(x) for x in out)


def compose_general(theta: Transformation, xi: Transformation,
                    sign: CompositionSign = SHIPPED_COMPOSITION) -> Transformation:
    """``theta ∘ xi`` for arbitrary prenatural transformations of equal arity bound."""
    _chain_check(xi, theta)
    if theta.arity != xi.arity:
        raise TransformationError(f"arity bounds differ: {theta.arity} vs {xi.arity}")
    table = {}
    for l in range(xi.arity + 1):
        for objs, idxs in keys(xi.C, l):
            v = compose_general_component(theta, xi, objs, idxs, sign)
            if any(v):
                table[objs, idxs] = v
    return Transformation(xi.source, theta.target, theta.degree + xi.degree, xi.arity, table, check=False)


def linear_combine(a, s: Transformation, b, t: Transformation) -> Transformation:
    if s.source is not t.source or s.target is not t.target:
        raise TransformationError("functor mismatch in linear combination")
    if s.degree != t.degree:
        raise TransformationError(f"degree mismatch: {s.degree} vs {t.degree}")
    if s.arity != t.arity:
        raise TransformationError(f"arity bound mismatch: {s.arity} vs {t.arity}")
    fld = s.field
    table = {}
    for k in set(s.table) | set(t.table):
        u = s.table.get(k)
        v = t.table.get(k)
        if u is None:
            w = tuple(fld.norm(b * y) for y in v)
        elif v is None:
            w = tuple(fld.norm(a * x) for x in u)
        else:
            w = tuple(fld.norm(a * x + b * y) for x, y in zip(u, v))
        if any(w):
            table[k] = w
    return Transformation(s.source, s.target, s.degree, s.arity, table, check=False)


def difference(s: Transformation, t: Transformation) -> Transformation:
    return linear_combine(1, s, -1, t)


def first_nonzero(t: Transformation):
    """``(arity, key)`` of the lowest-arity nonzero entry, in enumeration order."""
    for l in range(t.arity + 1):
        for key in keys(t.C, l):
            if key in t.table:
                return l, key
    return None


def random_transformation(F: DgFunctor, G: DgFunctor, degree: int, arity: int, rng,
                          density: float = 0.5) -> Transformation:
    """Random entries in every degree-consistent coordinate; ``rng`` is a numpy Generator."""
    C, D = F.source, F.target
    fld = D.field
    table = {}
    for l in range(arity + 1):
        for objs, idxs in keys(C, l):
            want = degree - l + sum(input_degrees(C, objs, idxs))
            space = D.homs[F(objs[0]), G(objs[-1])].space
            v = [fld.zero] * space.dim
            for i, d in enumerate(space.degrees):
                if d == want and rng.random() < density:
                    v[i] = fld.norm(int(rng.integers(-3, 4)))
            if any(v):
                table[objs, idxs] = tuple(v)
    return Transformation(F, G, degree, arity, table)
