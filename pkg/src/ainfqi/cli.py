"""Command line interface.

Exit codes: 0 everything passed, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .category import validate_category, validate_functor
from .formats import (
    FormatError, certificate_from_json, certificate_to_json, load_bundle_files, read_json, write_json,
)
from .linalg import field_from_name
from .quasi_inverse import NotObjectwiseHomotopyEquivalence, QuasiInverseError, quasi_inverse, verify_certificate
from .selftest import run_selftest, run_sign_audit
from .transform import is_dg_natural

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _split_ref(ref: str) -> tuple[str, str | None]:
    path, _, name = ref.partition("#")
    return path, (name or None)


def _pick(pool: dict, name: str | None, what: str, ref: str):
    if name is not None:
        if name not in pool:
            raise InputError(f"{ref}: no {what} named {name!r}")
        return pool[name]
    if len(pool) != 1:
        raise InputError(f"{ref}: expected exactly one {what}, found {len(pool)}; use PATH#NAME")
    return next(iter(pool.values()))


# ---------------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    doc = load_bundle_files(args.paths)
    if not (doc.categories or doc.functors or doc.transformations):
        raise InputError("nothing to validate")
    failed = False
    for name, c in doc.categories.items():
        rep = validate_category(c)
        failed |= not rep.ok
        print(f"category {name}: {'valid' if rep.ok else 'INVALID'}", file=out)
        for v in rep.violations:
            print(f"  {v}", file=out)
    for name, f in doc.functors.items():
        rep = validate_functor(f)
        failed |= not rep.ok
        print(f"functor {name}: {'valid' if rep.ok else 'INVALID'}", file=out)
        for v in rep.violations:
            print(f"  {v}", file=out)
    for name, t in doc.transformations.items():
        if t.degree == 0 and t.arity == 0:
            rep = is_dg_natural(t)
            failed |= not rep.ok
            print(f"transformation {name}: {'dg-natural' if rep.ok else 'NOT dg-natural'}", file=out)
            for p in rep.problems:
                print(f"  {p}", file=out)
        else:
            print(f"transformation {name}: degree {t.degree}, arity bound {t.arity}", file=out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_quasi_inverse(args, out) -> int:
    refs = {"F": args.functor_f, "G": args.functor_g, "phi": args.phi}
    paths = list(args.category) + sorted({_split_ref(r)[0] for r in refs.values()})
    unique = list(dict.fromkeys(str(Path(p)) for p in paths))
    doc = load_bundle_files(unique)
    fref, gref = _split_ref(args.functor_f), _split_ref(args.functor_g)
    pref = _split_ref(args.phi)
    F = _pick(_declared(doc, fref[0], "functors"), fref[1], "functor", args.functor_f)
    G = _pick(_declared(doc, gref[0], "functors"), gref[1], "functor", args.functor_g)
    phi = _pick(_declared(doc, pref[0], "transformations"), pref[1], "transformation", args.phi)
    if phi.source is not F or phi.target is not G:
        raise InputError(f"{args.phi}: Φ does not go from {F.name!r} to {G.name!r}")
    if args.arity < 0:
        raise InputError("--arity must be non-negative")
    try:
        cert = quasi_inverse(F.source, F, G, phi, args.arity)
    except NotObjectwiseHomotopyEquivalence as exc:
        print(f"not an objectwise homotopy equivalence at {exc.obj}", file=out)
        for k, v in exc.diagnostic.items():
            print(f"  H*({k[4:]}) dims {v}" if k.startswith("Hom(") else f"  {k}: {v}", file=out)
        return EXIT_FAIL
    except QuasiInverseError as exc:
        print(f"construction failed: {type(exc).__name__}: {exc}", file=out)
        return EXIT_FAIL
    write_json(args.out, certificate_to_json(cert))
    _print_report(cert.report, out)
    return EXIT_OK


def _declared(doc, path, attr) -> dict:
    """Items of ``doc`` whose names are declared in the file(s) at ``path``."""
    p = Path(path)
    files = sorted(p.glob("*.json")) if p.is_dir() else [p]
    names = set()
    for f in files:
        obj = read_json(f)
        items = obj.get(attr, []) if isinstance(obj, dict) else []
        names |= {x.get("name") for x in items if isinstance(x, dict)}
    pool = getattr(doc, attr)
    return {k: pool[k] for k in sorted(names) if k in pool}


def _print_report(rep, out):
    by_identity: dict = {}
    for c in rep.checks:
        by_identity.setdefault(c.identity, []).append(c)
    for name, checks in by_identity.items():
        bad = [c for c in checks if not c.ok]
        if not bad:
            print(f"{name}: pass (arities 0..{checks[-1].arity})", file=out)
        else:
            c = bad[0]
            print(f"{name}: FAIL at arity {c.arity}, component {_fmt_key(c.key)}", file=out)


def _fmt_key(key) -> str:
    if not key:
        return "?"
    objs = key[0]
    return "→".join(objs) if isinstance(objs, (tuple, list)) else str(objs)


def cmd_verify(args, out) -> int:
    cert = certificate_from_json(read_json(args.certificate), str(args.certificate))
    rep = verify_certificate(cert)
    _print_report(rep, out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_selftest(args, out) -> int:
    _check_field(args.field)
    if args.cases < 1:
        raise InputError("--cases must be positive")
    start = time.perf_counter()
    rep = run_selftest(args.seed, args.cases, field=args.field, arity=args.arity)
    for name, t in sorted(rep.checks.items()):
        print(f"{name}: {t.passed} passed, {t.failed} failed", file=out)
    print("eta formula accepted: " + ", ".join(f"{k} {v}" for k, v in sorted(rep.eta_variants.items())), file=out)
    print(f"selftest {'PASS' if rep.ok else 'FAIL'}", file=out)
    print(f"elapsed {time.perf_counter() - start:.1f} s", file=sys.stderr)
    if args.report:
        write_json(args.report, rep.to_json())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_audit_signs(args, out) -> int:
    _check_field(args.field)
    if args.cases < 1:
        raise InputError("--cases must be positive")
    res = run_sign_audit(args.seed, args.cases, field=args.field)
    for name, t in res["differential"].items():
        print(f"differential {name}: {t['passed']} passed, {t['failed']} failed", file=out)
    for row in res["composition"]:
        mark = " (shipped)" if row["shipped"] else ""
        cells = ", ".join(f"{k} {row[k]['failed']} failed" for k in ("derivation", "dg_special_cases", "units"))
        print(f"composition ({row['c1']},{row['c2']},{row['c3']}){mark}: {cells}", file=out)
    if not res["unique"]:
        print(f"note: {len(res['surviving_composition'])} composition variants survive this sample", file=out)
    print(f"audit {'PASS' if res['ok'] else 'FAIL'}", file=out)
    if args.report:
        write_json(args.report, res)
    return EXIT_OK if res["ok"] else EXIT_FAIL


def _check_field(name):
    try:
        field_from_name(name)
    except ValueError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ainfqi", description="A∞ quasi-inverses of objectwise homotopy equivalences")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check categories, functors and transformations in files or directories")
    v.add_argument("paths", nargs="+")
    v.set_defaults(run=cmd_validate)

    q = sub.add_parser("quasi-inverse", help="build and verify a certificate")
    q.add_argument("--category", action="append", default=[], help="file with categories (repeatable)")
    q.add_argument("--functor-f", required=True, help="PATH or PATH#NAME")
    q.add_argument("--functor-g", required=True, help="PATH or PATH#NAME")
    q.add_argument("--phi", required=True, help="PATH or PATH#NAME")
    q.add_argument("--arity", type=int, required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(run=cmd_quasi_inverse)

    c = sub.add_parser("verify", help="recheck a certificate from scratch")
    c.add_argument("certificate")
    c.set_defaults(run=cmd_verify)

    s = sub.add_parser("selftest", help="run the property batteries")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--cases", type=int, required=True)
    s.add_argument("--field", default="f:10007", help="q or f:<p>")
    s.add_argument("--arity", type=int, default=4)
    s.add_argument("--report", help="write the JSON report here")
    s.set_defaults(run=cmd_selftest)

    a = sub.add_parser("audit-signs", help="test every sign convention variant")
    a.add_argument("--seed", type=int, required=True)
    a.add_argument("--cases", type=int, required=True)
    a.add_argument("--field", default="f:10007", help="q or f:<p>")
    a.add_argument("--report", help="write the JSON report here")
    a.set_defaults(run=cmd_audit_signs)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except (InputError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
