"""A∞ quasi-inverses of objectwise homotopy equivalences.

Given a dg-natural ``Φ: F ⇒ G`` whose components are homotopy equivalences,
a per-object homotopy inverse system ``(Ψ_E, h_E, p_E)`` is found by an exact
linear solve.  The higher components of ``Ψ`` and of the homotopy ``η`` are
then built arity by arity from the obstructions

    λᵐ = (d∞Ψ̃)ᵐ,   μᵐ = (Ψ̃∘Φ − id_F − d∞η̃)ᵐ,

where the tilde means "components below m only".  They satisfy
``dλᵐ = 0`` and ``dμᵐ = λᵐ⋆Φ``, and the new components have to solve

    d(Ψᵐ) = −λᵐ,   d(ηᵐ) = Ψᵐ⋆Φ + μᵐ.

Here ``d`` is the part of ``d∞`` that stays in arity m (the differential of
the output and of each input), and ``f⋆a`` is right multiplication by an
arity-0 element with the sign ``(−1)^{|a|·Σ(|u_i|−1)}``.  Closed formulas
for the new components are tried first and checked exactly; a joint linear
solve over all table entries is the fallback and the independent oracle.
The mirror induction builds ``(Ψ′, ω′)`` from left multiplication, and
``ω = ω′ + (Φ∘η)∘Ψ′ − (Φ∘Ψ)∘ω′``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .category import DgCategory, DgFunctor
from .graded import cohomology_dims
from .linalg import Matrix, SparseSystem, solve
from .transform import (
    KOSZUL, Convention, Transformation, basis_tuples, compose_dg_left,
    compose_dg_right, compose_general, difference, d_infty, dinf_component, identity_transformation,
    input_degrees, internal_differential, is_dg_natural, keys, linear_combine, object_chains,
)

Vec = tuple
Table = dict


class QuasiInverseError(Exception):
    pass


class NotObjectwiseHomotopyEquivalence(QuasiInverseError):
    def __init__(self, obj: str, diagnostic: dict):
        self.obj = obj
        self.diagnostic = diagnostic
        super().__init__(f"Φ_{obj} has no homotopy inverse; cohomology dimensions {diagnostic}")


class PreconditionViolated(QuasiInverseError):
    pass


class LemmaAssertionFailed(QuasiInverseError):
    def __init__(self, message: str, dump: dict):
        self.dump = dump
        super().__init__(message)


class ExtensionUnsolvable(QuasiInverseError):
    pass


class VerificationFailed(QuasiInverseError):
    def __init__(self, identity: str, arity: int, key):
        self.identity, self.arity, self.key = identity, arity, key
        super().__init__(f"{identity} fails at arity {arity}, entry {key}")


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# homotopy inverse system


@dataclass
class HomotopySystem:
    """``psi[E] ∈ Hom⁰(GE, FE)``, ``h[E] ∈ Hom⁻¹(FE, FE)``, ``p[E] ∈ Hom⁻¹(GE, GE)``."""

    psi: dict[str, Vec]
    h: dict[str, Vec]
    p: dict[str, Vec]


def _coords(space, degree):
    return [i for i, d in enumerate(space.degrees) if d == degree]


def _vec(fld, n, coords, values):
    v = [fld.zero] * n
    for i, x in zip(coords, values):
        v[i] = x
    return tuple(v)


def _diagnostic(D: DgCategory, fe: str, ge: str) -> dict:
    return {f"Hom({a},{b})": cohomology_dims(D.homs[a, b]) for a, b in ((fe, fe), (ge, ge), (fe, ge), (ge, fe))}


def solve_homotopy_system(c: DgCategory, F: DgFunctor, G: DgFunctor, phi: Transformation) -> HomotopySystem:
    rep = is_dg_natural(phi)
    if not rep.ok:
        raise PreconditionViolated(f"Φ is not dg-natural: {rep.problems[0]}")
    if phi.source is not F or phi.target is not G or F.source is not c:
        raise PreconditionViolated("Φ, F, G and the category do not match")
    D = F.target
    fld = D.field
    out = HomotopySystem({}, {}, {})
    for e in c.objects:
        fe, ge = F(e), G(e)
        ph = phi.component0(e)
        s_psi, s_ff, s_gg = D.homs[ge, fe].space, D.homs[fe, fe].space, D.homs[ge, ge].space
        cp, ch, cq = _coords(s_psi, 0), _coords(s_ff, -1), _coords(s_gg, -1)
        ncol = len(cp) + len(ch) + len(cq)
        cols = []
        for j in cp:
            ej = D.basis_vector(ge, fe, j)
            cols.append(D.compose_vec(fe, ge, fe, ej, ph) + D.compose_vec(ge, fe, ge, ph, ej) + D.d_vec(ge, fe, ej))
        for j in ch:
            dj = D.d_vec(fe, fe, D.basis_vector(fe, fe, j))
            cols.append(tuple(-x for x in dj) + D.zero(ge, ge) + D.zero(ge, fe))
        for j in cq:
            dj = D.d_vec(ge, ge, D.basis_vector(ge, ge, j))
            cols.append(D.zero(fe, fe) + tuple(-x for x in dj) + D.zero(ge, fe))
        rhs = D.identities[fe] + D.identities[ge] + D.zero(ge, fe)
        nrow = len(rhs)
        a = Matrix.from_rows(fld, [[cols[j][i] for j in range(ncol)] for i in range(nrow)], cols=ncol)
        vals = solve(a, rhs)
        if vals is None:
            raise NotObjectwiseHomotopyEquivalence(e, _diagnostic(D, fe, ge))
        out.psi[e] = _vec(fld, s_psi.dim, cp, vals[:len(cp)])
        out.h[e] = _vec(fld, s_ff.dim, ch, vals[len(cp):len(cp) + len(ch)])
        out.p[e] = _vec(fld, s_gg.dim, cq, vals[len(cp) + len(ch):])
    return out


def check_homotopy_system(sys: HomotopySystem, F: DgFunctor, G: DgFunctor, phi: Transformation) -> list[str]:
    """Objects where one of the defining identities (or ``dΨ_E = 0``) fails."""
    D = F.target
    bad = []
    for e in F.source.objects:
        fe, ge, ph = F(e), G(e), phi.component0(e)
        lhs1 = _sub(D, D.compose_vec(fe, ge, fe, sys.psi[e], ph), D.identities[fe])
        lhs2 = _sub(D, D.compose_vec(ge, fe, ge, ph, sys.psi[e]), D.identities[ge])
        if (lhs1 != D.d_vec(fe, fe, sys.h[e]) or lhs2 != D.d_vec(ge, ge, sys.p[e])
                or any(D.d_vec(ge, fe, sys.psi[e]))):
            bad.append(e)
    return bad


def _sub(D, a, b):
    return tuple(D.field.norm(x - y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# obstructions


@dataclass
class ObstructionPair:
    """Arity-m obstructions.  ``side`` is ``"forward"`` (λ, μ for Ψ, η) or
    ``"mirror"`` (λ′, ν for Ψ′, ω′)."""

    m: int
    lambda_m: Table
    mu_m: Table
    side: str = "forward"


_EXTERNAL = frozenset({"left", "right", "inner_mult"})


def _rmul(D, v, a, x, y, z, sign=1):
    """``v ∘ a`` with ``a ∈ Hom(x, y)``, ``v ∈ Hom(y, z)``."""
    w = D.compose_vec(x, y, z, v, a)
    return w if sign == 1 else tuple(D.field.norm(-t) for t in w)


def _table_add(D, into: dict, key, vec, coef=1):
    if not any(vec):
        return
    old = into.get(key)
    fld = D.field
    if old is None:
        into[key] = tuple(fld.norm(coef * t) for t in vec)
    else:
        into[key] = tuple(fld.norm(s + coef * t) for s, t in zip(old, vec))
    if not any(into[key]):
        del into[key]


def _lower_identity_failure(psi: Transformation, eta: Transformation, phi: Transformation, side: str,
                            upto: int, conv: Convention):
    for l in range(upto):
        for objs, idxs in keys(psi.C, l):
            if any(dinf_component(psi, objs, idxs, conv)):
                return "closedness", l, (objs, idxs)
            if any(_homotopy_entry(psi, eta, phi, side, objs, idxs, conv)):
                return "homotopy", l, (objs, idxs)
    return None


def _homotopy_entry(psi, eta, phi, side, objs, idxs, conv, parts=None):
    """Entry of ``Ψ∘Φ − id_F − d∞η`` (forward) or ``Φ∘Ψ − id_G − d∞ω`` (mirror)."""
    D = phi.D
    F, G = phi.source, phi.target
    x0, xl = objs[0], objs[-1]
    out = {}
    v = psi.get(objs, idxs)
    if side == "forward":
        src, tgt = F(x0), F(xl)
        if v is not None:
            _table_add(D, out, 0, _rmul(D, v, phi.component0(x0), src, G(x0), tgt))
        unit = F
    else:
        src, tgt = G(x0), G(xl)
        if v is not None:
            _table_add(D, out, 0, D.compose_vec(src, F(xl), tgt, phi.component0(xl), v))
        unit = G
    if not idxs:
        _table_add(D, out, 0, D.identities[unit(x0)], -1)
    kw = {} if parts is None else {"parts": parts}
    _table_add(D, out, 0, dinf_component(eta, objs, idxs, conv, **kw), -1)
    return out.get(0, D.zero(src, tgt))


def obstructions(partial_psi: Transformation, partial_eta: Transformation, phi: Transformation, m: int,
                 side: str = "forward", conv: Convention = KOSZUL, recheck: bool = True) -> ObstructionPair:
    """λᵐ and μᵐ (or the mirror pair λ′ᵐ, νᵐ) from components below ``m``."""
    if m < 1:
        raise ValueError("obstructions start at arity 1")
    psi = partial_psi.truncate(m - 1)
    eta = partial_eta.truncate(m - 1)
    if recheck:
        bad = _lower_identity_failure(psi, eta, phi, side, m, conv)
        if bad:
            raise PreconditionViolated(f"{bad[0]} identity fails at arity {bad[1]}, entry {bad[2]}")
    lam, mu = {}, {}
    for objs, idxs in keys(phi.C, m):
        v = dinf_component(psi, objs, idxs, conv, parts=_EXTERNAL)
        if any(v):
            lam[objs, idxs] = v
        w = _homotopy_entry(psi, eta, phi, side, objs, idxs, conv)
        if any(w):
            mu[objs, idxs] = w
    obs = ObstructionPair(m, lam, mu, side)
    _assert_lemma(obs, phi, conv)
    return obs


def _as_transformation(table, source, target, degree, arity):
    return Transformation(source, target, degree, arity, table, check=False)


def _assert_lemma(obs: ObstructionPair, phi: Transformation, conv: Convention):
    F, G, D = phi.source, phi.target, phi.D
    m = obs.m
    lam = _as_transformation(obs.lambda_m, G, F, 1, m)
    dl = internal_differential(lam, m, conv)
    if dl:
        key = next(iter(dl))
        raise LemmaAssertionFailed(f"dλ ≠ 0 at arity {m}, entry {key}",
                                   {"side": obs.side, "m": m, "key": key, "d_lambda": dl[key],
                                    "lambda": obs.lambda_m.get(key)})
    end = G if obs.side == "mirror" else F
    mu = _as_transformation(obs.mu_m, end, end, 0, m)
    dm = internal_differential(mu, m, conv)
    want = {}
    for (objs, idxs), v in obs.lambda_m.items():
        _table_add(D, want, (objs, idxs), _phi_times(phi, obs.side, objs, idxs, v))
    for key in set(dm) | set(want):
        if dm.get(key) != want.get(key):
            raise LemmaAssertionFailed(f"dμ ≠ λΦ at arity {m}, entry {key}",
                                       {"side": obs.side, "m": m, "key": key, "d_mu": dm.get(key),
                                        "lambda_phi": want.get(key), "lambda": obs.lambda_m.get(key),
                                        "mu": obs.mu_m.get(key)})


def _phi_times(phi, side, objs, idxs, v):
    """``v⋆Φ_{E0}`` (forward, degree 0 so no sign) or ``Φ_{Em}·v`` (mirror)."""
    D, F, G = phi.D, phi.source, phi.target
    x0, xl = objs[0], objs[-1]
    if side == "forward":
        return D.compose_vec(F(x0), G(x0), F(xl), v, phi.component0(x0))
    return D.compose_vec(G(x0), F(xl), G(xl), phi.component0(xl), v)


# ---------------------------------------------------------------------------
# closed formulas for the new components


def _chain(D, factors):
    """``v1 ∘ v2 ∘ ... ∘ vk`` for ``factors = [(v, src, tgt), ...]`` left to right."""
    v, src, _ = factors[-1]
    for w, s, t in reversed(factors[:-1]):
        v = D.compose_vec(src, s, t, w, v)
    return v


def _lincomb(D, n, terms):
    fld = D.field
    out = [0] * n
    for c, v in terms:
        if c:
            for i, x in enumerate(v):
                if x:
                    out[i] += c * x
    return tuple(fld.norm(x) for x in out)


# Each variant returns (psi_value, eta_value) for one table entry; ``None``
# for psi means "keep the accepted Ψᵐ" (η-only variants).
FORWARD_PSI = ("verbatim", "koszul")
FORWARD_ETA = ("verbatim", "corrected", "koszul")


def _forward_entry(phi, sys, objs, idxs, lam, mu, psi_variant, eta_variant):
    D, F, G = phi.D, phi.source, phi.target
    C = phi.C
    e0, em = objs[0], objs[-1]
    fe, ge, fm = F(e0), G(e0), F(em)
    m = len(idxs)
    sa = sum(input_degrees(C, objs, idxs))
    lam = lam if lam is not None else D.zero(ge, fm)
    mu = mu if mu is not None else D.zero(fe, fm)
    L = (lam, ge, fm)
    M = (mu, fe, fm)
    h = (sys.h[e0], fe, fe)
    p = (sys.p[e0], ge, ge)
    Ps = (sys.psi[e0], ge, fe)
    Ph = (phi.component0(e0), fe, ge)
    out_psi = None
    if psi_variant is not None:
        s = 1 if psi_variant == "verbatim" else _sgn(1 - m + sa)
        out_psi = _lincomb(D, D.dim(ge, fm), [(s, _chain(D, [L, p])), (-1, _chain(D, [M, Ps]))])
    out_eta = None
    if eta_variant is not None:
        n = D.dim(fe, fm)
        if eta_variant in ("verbatim", "corrected"):
            last = [L, p, p, p, Ph] if eta_variant == "verbatim" else [L, p, p, Ph]
            terms = [(-1, _chain(D, [M, h])), (1, _chain(D, [M, Ps, Ph, h])), (-1, _chain(D, [L, p, Ph, h])),
                     (-1, _chain(D, [M, Ps, p, Ph]))]
            last_v = _chain(D, last) if eta_variant == "corrected" else _ppp(D, lam, p, Ph, ge, fm, fe)
            terms.append((1, last_v))
        else:
            s = _sgn(sa - m)
            terms = [(-s, _chain(D, [M, h])), (s, _chain(D, [M, Ps, Ph, h])), (1, _chain(D, [L, p, Ph, h])),
                     (-s, _chain(D, [M, Ps, p, Ph])), (-1, _chain(D, [L, p, p, Ph]))]
        out_eta = _lincomb(D, n, terms)
    return out_psi, out_eta


def _ppp(D, lam, p, Ph, ge, fm, fe):
    # λ p p p Φ: one more p than the degree allows; the value is still a
    # vector of Hom(FE₀, FEₘ), only its degree is off by one
    return _chain(D, [(lam, ge, fm), p, p, p, Ph])


def _mirror_entry(phi, sys, objs, idxs, lam, nu):
    D, F, G = phi.D, phi.source, phi.target
    e0, em = objs[0], objs[-1]
    g0, fm, gm = G(e0), F(em), G(em)
    lam = lam if lam is not None else D.zero(g0, fm)
    nu = nu if nu is not None else D.zero(g0, gm)
    L = (lam, g0, fm)
    V = (nu, g0, gm)
    h = (sys.h[em], fm, fm)
    p = (sys.p[em], gm, gm)
    Ps = (sys.psi[em], gm, fm)
    Ph = (phi.component0(em), fm, gm)
    psi = _lincomb(D, D.dim(g0, fm), [(1, _chain(D, [h, L])), (-1, _chain(D, [Ps, V]))])
    omega = _lincomb(D, D.dim(g0, gm), [
        (-1, _chain(D, [p, V])), (1, _chain(D, [p, Ph, Ps, V])), (-1, _chain(D, [p, Ph, h, L])),
        (-1, _chain(D, [Ph, h, Ps, V])), (1, _chain(D, [Ph, h, h, L]))])
    return psi, omega


# ---------------------------------------------------------------------------
# step checks


def _functors(phi, side):
    F, G = phi.source, phi.target
    # (Ψᵐ: G ⇒ F, second component: F ⇒ F or G ⇒ G)
    return (G, F), ((F, F) if side == "forward" else (G, G))


def step_residuals(obs: ObstructionPair, phi: Transformation, psi_m: Table, eta_m: Table,
                   conv: Convention = KOSZUL) -> tuple[dict, dict]:
    """Entries where ``d(Ψᵐ) = −λᵐ`` resp. ``d(ηᵐ) = ΨᵐΦ + μᵐ`` fail (empty = pass)."""
    D = phi.D
    m = obs.m
    (ps, pt), (es, et) = _functors(phi, obs.side)
    dpsi = internal_differential(_as_transformation(psi_m, ps, pt, 0, m), m, conv)
    r1 = dict(dpsi)
    for k, v in obs.lambda_m.items():
        _table_add(D, r1, k, v)
    deta = internal_differential(_as_transformation(eta_m, es, et, -1, m), m, conv)
    r2 = dict(deta)
    for (objs, idxs), v in psi_m.items():
        _table_add(D, r2, (objs, idxs), _phi_times(phi, obs.side, objs, idxs, v), -1)
    for k, v in obs.mu_m.items():
        _table_add(D, r2, k, v, -1)
    return r1, r2


def _degree_ok(phi, table, src, tgt, degree, m) -> bool:
    C, D = phi.C, phi.D
    for (objs, idxs), v in table.items():
        want = degree - m + sum(input_degrees(C, objs, idxs))
        try:
            got = D.homs[src(objs[0]), tgt(objs[-1])].space.degree_of(v)
        except Exception:
            return False
        if got is not None and got != want:
            return False
    return True


# ---------------------------------------------------------------------------
# the oracle


def brute_force_extend(obs: ObstructionPair, phi: Transformation, conv: Convention = KOSZUL,
                       fixed_psi: Table | None = None) -> tuple[Table, Table]:
    """Solve the arity-m step equations with every table entry unknown.

    Only degree-consistent coordinates are unknowns; columns are ordered
    Ψᵐ first, then the homotopy component, each in key-enumeration order, and
    free columns are set to zero.  With ``fixed_psi`` only the homotopy
    component is solved for.
    """
    C, D = phi.C, phi.D
    fld = D.field
    m = obs.m
    (ps, pt), (es, et) = _functors(phi, obs.side)
    psi_out, eta_out = {}, {}
    for objs in object_chains(C, m):
        tuples = list(basis_tuples(C, objs))
        if not tuples:
            continue
        e0, em = objs[0], objs[-1]
        xsp = D.homs[ps(e0), pt(em)].space
        ysp = D.homs[es(e0), et(em)].space
        cols = {}
        degs = {t: sum(input_degrees(C, objs, t)) for t in tuples}
        if fixed_psi is None:
            for t in tuples:
                for j in _coords(xsp, degs[t] - m):
                    cols["x", t, j] = len(cols)
        for t in tuples:
            for j in _coords(ysp, degs[t] - 1 - m):
                cols["y", t, j] = len(cols)
        rows: dict = {}

        def put(eq, t, i, col, c):
            r = rows.setdefault((eq, t, i), {})
            r[col] = r.get(col, 0) + c

        rhs: dict = {}
        for t in tuples:
            for i, v in enumerate(obs.lambda_m.get((objs, t), ())):
                if v:
                    rhs[1, t, i] = fld.norm(-v)
            for i, v in enumerate(obs.mu_m.get((objs, t), ())):
                if v:
                    rhs[2, t, i] = v
            if fixed_psi is not None and (objs, t) in fixed_psi:
                w = _phi_times(phi, obs.side, objs, t, fixed_psi[objs, t])
                for i, v in enumerate(w):
                    if v:
                        rhs[2, t, i] = fld.norm(rhs.get((2, t, i), 0) + v)
        for (kind, t, j), col in cols.items():
            eq, (src, tgt), n = (1, (ps, pt), 0) if kind == "x" else (2, (es, et), -1)
            for i, c in D.d_basis(src(e0), tgt(em), j):
                put(eq, t, i, col, c)
            if kind == "x":
                ej = D.basis_vector(ps(e0), pt(em), j)
                for i, c in enumerate(_phi_times(phi, obs.side, objs, t, ej)):
                    if c:
                        put(2, t, i, col, -c)
        # input differentials: the entry at t feeds every key t' with d(u'_p) ∋ u_p
        for t_out in tuples:
            dg = input_degrees(C, objs, t_out)
            for p in range(m):
                for k, c in C.d_basis(objs[p], objs[p + 1], t_out[p]):
                    t_in = t_out[:p] + (k,) + t_out[p + 1:]
                    for kind, eq, n, sp in (("x", 1, 0, xsp), ("y", 2, -1, ysp)):
                        s = _sgn(conv.inner_d(n, dg, p + 1))
                        for j in range(sp.dim):
                            col = cols.get((kind, t_in, j))
                            if col is not None:
                                put(eq, t_out, j, col, s * c)
        system = SparseSystem(fld, len(cols))
        for key in sorted(set(rows) | set(rhs), key=_row_order(tuples)):
            system.add_row(rows.get(key, {}), rhs.get(key, 0))
        sol = system.solution()
        if sol is None:
            raise ExtensionUnsolvable(f"{obs.side} step {m} has no solution over objects {objs}")
        for (kind, t, j), col in cols.items():
            if sol[col]:
                target, sp = (psi_out, xsp) if kind == "x" else (eta_out, ysp)
                v = list(target.get((objs, t), (fld.zero,) * sp.dim))
                v[j] = sol[col]
                target[objs, t] = tuple(v)
    if fixed_psi is not None:
        psi_out = dict(fixed_psi)
    return psi_out, eta_out


def _row_order(tuples):
    pos = {t: i for i, t in enumerate(tuples)}
    return lambda k: (k[0], pos[k[1]], k[2])


# ---------------------------------------------------------------------------
# one inductive step


@dataclass
class StepRecord:
    side: str
    m: int
    psi_source: str
    eta_source: str
    attempts: list = field(default_factory=list)   # (component, variant, outcome)
    oracle_ok: bool | None = None
    nonzero_lambda: int = 0
    nonzero_mu: int = 0


@dataclass
class StepResult:
    psi_m: Table
    eta_m: Table
    record: StepRecord


def _key_order(C, m):
    pos = {k: i for i, k in enumerate(keys(C, m))}
    return pos.__getitem__


def _formula_tables(phi, sys, obs, psi_variant, eta_variant, psi_m=None):
    C = phi.C
    psi_t, eta_t = {}, {}
    # every formula is linear in (λ, μ): only keys where one of them is nonzero matter
    for objs, idxs in sorted(set(obs.lambda_m) | set(obs.mu_m), key=_key_order(C, obs.m)):
        lam = obs.lambda_m.get((objs, idxs))
        mu = obs.mu_m.get((objs, idxs))
        if obs.side == "mirror":
            a, b = _mirror_entry(phi, sys, objs, idxs, lam, mu)
        else:
            a, b = _forward_entry(phi, sys, objs, idxs, lam, mu, psi_variant, eta_variant)
        if a is not None and any(a):
            psi_t[objs, idxs] = a
        if b is not None and any(b):
            eta_t[objs, idxs] = b
    return psi_t, eta_t


def extend_step(obs: ObstructionPair, sys: HomotopySystem, phi: Transformation, conv: Convention = KOSZUL,
                audit: bool = True, strict: bool = False) -> StepResult:
    """New arity-m components with provenance.

    Forward side: Ψᵐ tries ``verbatim`` then ``koszul`` then ``oracle``; the
    homotopy component tries ``verbatim`` (after a degree check), then
    ``corrected``, ``koszul`` and ``oracle``.  The mirror side has a single
    formula (``koszul``) before the oracle.  ``strict`` turns a failure of the
    first Ψᵐ formula into an error instead of a fallback.  With ``audit`` the
    oracle is also run on its own and its output checked.
    """
    m, side = obs.m, obs.side
    (ps, pt), (es, et) = _functors(phi, side)
    rec = StepRecord(side, m, "", "", nonzero_lambda=len(obs.lambda_m), nonzero_mu=len(obs.mu_m))
    psi_m = None
    psi_variants = FORWARD_PSI if side == "forward" else ("koszul",)
    for v in psi_variants:
        cand, _ = _formula_tables(phi, sys, obs, v, None) if side == "forward" else _formula_tables(phi, sys, obs, None, None)
        r1, _ = step_residuals(obs, phi, cand, {}, conv)
        if not r1:
            rec.attempts.append(("psi", v, "accepted"))
            psi_m, rec.psi_source = cand, v
            break
        rec.attempts.append(("psi", v, "step-equations"))
        if strict:
            raise ExtensionUnsolvable(f"{side} formula for Ψ^{m} ({v}) fails d(Ψᵐ) = −λᵐ at {next(iter(r1))}")
    if psi_m is None:
        psi_m, eta_m = brute_force_extend(obs, phi, conv)
        rec.psi_source = rec.eta_source = "oracle"
        rec.attempts.append(("psi", "oracle", "accepted"))
    else:
        eta_m = None
        eta_variants = FORWARD_ETA if side == "forward" else ("koszul",)
        for v in eta_variants:
            if side == "forward":
                _, cand = _formula_tables(phi, sys, obs, None, v)
            else:
                _, cand = _formula_tables(phi, sys, obs, None, None)
            if not _degree_ok(phi, cand, es, et, -1, m):
                rec.attempts.append(("eta", v, "degree"))
                continue
            _, r2 = step_residuals(obs, phi, psi_m, cand, conv)
            if not r2:
                rec.attempts.append(("eta", v, "accepted"))
                eta_m, rec.eta_source = cand, v
                break
            rec.attempts.append(("eta", v, "step-equations"))
        if eta_m is None:
            try:
                _, eta_m = brute_force_extend(obs, phi, conv, fixed_psi=psi_m)
            except ExtensionUnsolvable:
                psi_m, eta_m = brute_force_extend(obs, phi, conv)
                rec.psi_source = "oracle"
            rec.eta_source = "oracle"
            rec.attempts.append(("eta", "oracle", "accepted"))
    r1, r2 = step_residuals(obs, phi, psi_m, eta_m, conv)
    if r1 or r2:
        raise ExtensionUnsolvable(f"{side} step {m}: accepted components fail the step equations")
    if audit:
        op, oe = brute_force_extend(obs, phi, conv)
        a1, a2 = step_residuals(obs, phi, op, oe, conv)
        rec.oracle_ok = not a1 and not a2
    return StepResult(psi_m, eta_m, rec)


# ---------------------------------------------------------------------------
# the full construction


@dataclass
class IdentityCheck:
    identity: str
    arity: int
    ok: bool
    key: tuple | None = None


@dataclass
class VerificationReport:
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def first_failure(self) -> IdentityCheck | None:
        return next((c for c in self.checks if not c.ok), None)


@dataclass
class Certificate:
    phi: Transformation
    system: HomotopySystem
    psi: Transformation
    eta: Transformation
    omega: Transformation
    arity: int
    psi_mirror: Transformation | None = None
    omega_mirror: Transformation | None = None
    steps: list[StepRecord] = field(default_factory=list)
    report: VerificationReport | None = None
    notes: list[str] = field(default_factory=list)


SEED_NOTE = "arity-0 homotopy seeded with h_E (forward) and p_E (mirror)"
READING_NOTE = ("homotopy identities checked with left sides (Ψ∘Φ)ˡ and (Φ∘Ψ)ˡ, "
                "the compositions of transformations with the dg factor Φ")


def _induct(phi, sys, N, side, conv, audit, strict, recheck):
    (ps, pt), (es, et) = _functors(phi, side)
    psi = {((e,), ()): sys.psi[e] for e in phi.C.objects}
    seed = sys.h if side == "forward" else sys.p
    eta = {((e,), ()): seed[e] for e in phi.C.objects}
    records = []
    for m in range(1, N + 1):
        tp = _as_transformation(psi, ps, pt, 0, N)
        te = _as_transformation(eta, es, et, -1, N)
        obs = obstructions(tp, te, phi, m, side, conv, recheck=recheck)
        step = extend_step(obs, sys, phi, conv, audit=audit, strict=strict)
        psi.update(step.psi_m)
        eta.update(step.eta_m)
        records.append(step.record)
    return (Transformation(ps, pt, 0, N, psi), Transformation(es, et, -1, N, eta), records)


def quasi_inverse(c: DgCategory, F: DgFunctor, G: DgFunctor, phi: Transformation, N: int,
                  conv: Convention = KOSZUL, audit: bool = True, strict: bool = False,
                  recheck: bool = False) -> Certificate:
    if N < 0:
        raise ValueError("arity bound must be non-negative")
    sys = solve_homotopy_system(c, F, G, phi)
    phi_n = phi.with_arity(N)
    psi, eta, rec_f = _induct(phi_n, sys, N, "forward", conv, audit, strict, recheck)
    psi2, omega2, rec_m = _induct(phi_n, sys, N, "mirror", conv, audit, strict, recheck)
    omega = linear_combine(
        1, linear_combine(1, omega2, 1, compose_general(compose_dg_left(phi_n, eta), psi2)),
        -1, compose_general(compose_dg_left(phi_n, psi), omega2))
    cert = Certificate(phi_n, sys, psi, eta, omega, N, psi2, omega2, rec_f + rec_m, notes=[SEED_NOTE, READING_NOTE])
    cert.report = verify_certificate(cert, conv)
    bad = cert.report.first_failure()
    if bad is not None:
        raise VerificationFailed(bad.identity, bad.arity, bad.key)
    return cert


def _per_arity(name, t: Transformation, N: int, report: VerificationReport):
    first = {}
    for k in sorted(t.table, key=lambda k: (len(k[1]), k)):
        first.setdefault(len(k[1]), k)
    for l in range(N + 1):
        report.checks.append(IdentityCheck(name, l, l not in first, first.get(l)))


def verify_certificate(cert: Certificate, conv: Convention = KOSZUL) -> VerificationReport:
    """Recompute the defining identities of an A∞ quasi-inverse up to the arity bound."""
    N = cert.arity
    phi = cert.phi.with_arity(N)
    F, G = phi.source, phi.target
    psi, eta, omega = (t.with_arity(N) for t in (cert.psi, cert.eta, cert.omega))
    rep = VerificationReport()
    _per_arity("closed", d_infty(psi, conv), N, rep)
    left = difference(difference(compose_dg_right(psi, phi), identity_transformation(F, N)), d_infty(eta, conv))
    _per_arity("left-homotopy", left, N, rep)
    right = difference(difference(compose_dg_left(phi, psi), identity_transformation(G, N)), d_infty(omega, conv))
    _per_arity("right-homotopy", right, N, rep)
    if cert.psi_mirror is not None and cert.omega_mirror is not None:
        psi2, om2 = cert.psi_mirror.with_arity(N), cert.omega_mirror.with_arity(N)
        _per_arity("mirror-closed", d_infty(psi2, conv), N, rep)
        mh = difference(difference(compose_dg_left(phi, psi2), identity_transformation(G, N)), d_infty(om2, conv))
        _per_arity("mirror-homotopy", mh, N, rep)
        inner = difference(compose_general(psi, om2), compose_general(eta, psi2))
        cmp_ = difference(difference(psi2, psi), d_infty(inner, conv))
        _per_arity("comparison", cmp_, N, rep)
    return rep
