"""Command-line entry point: verify suites over parameter grids, dump
invariants in the canonical text format, and build/verify certificates."""

from __future__ import annotations

import argparse
import sys

from invfield.gf import field_for_q
from invfield.invariants import (InvariantError, SET_NAMES, build_invariant,
                                 generating_set, parse_label)
from invfield.mpoly import Space
from invfield.relations import (RelationError, build_certificate,
                                certificate_from_json, certificate_to_json,
                                verify_certificate)
from invfield.suites import (ALL_SUITES, ConfigError, SuiteConfig, parse_grid,
                             render_text, report_ok, report_to_json, run_suite)


def _add_space_args(parser):
    parser.add_argument("--n", type=int, required=True, help="dimension n")
    parser.add_argument("--q", type=int, required=True, help="field size q (prime power)")
    parser.add_argument("--m", type=int, required=True, help="number of vector copies")
    parser.add_argument("--d", type=int, required=True, help="number of covector copies")


def _space_of(args):
    return field_for_q(args.q), Space(n=args.n, m=args.m, d=args.d)


def cmd_verify(args) -> int:
    families = tuple(f.strip() for f in args.family.split(",") if f.strip())
    if args.suite.strip() == "all":
        suites, explicit = ALL_SUITES, False
    else:
        suites = tuple(s.strip() for s in args.suite.split(",") if s.strip())
        explicit = True
    cfg = SuiteConfig(families=families, grid=parse_grid(args.grid), suites=suites,
                      seed=args.seed, enum_cap=args.enum_cap, timings=args.timings,
                      explicit_suites=explicit)
    report = run_suite(cfg)
    payload = report_to_json(report) if args.format == "json" else render_text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload if payload.endswith("\n") else payload + "\n")
    if args.out:
        s = report["summary"]
        print(f"wrote {args.out}: {s['total']} checks, {s['fail']} failures")
    return 0 if report_ok(report) else 1


def cmd_dump(args) -> int:
    ctx, space = _space_of(args)
    if args.set:
        genset = generating_set(args.set, ctx, space)
        for label, poly in genset.members:
            print(f"{label.text()} = {poly.to_text()}")
    else:
        label = parse_label(args.label)
        print(build_invariant(ctx, space, label).to_text())
    return 0


def cmd_cert(args) -> int:
    ctx, space = _space_of(args)
    cert = build_certificate(args.theorem, ctx, space)
    payload = certificate_to_json(cert)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
        print(f"wrote {args.out}: {len(cert.steps)} steps")
    else:
        print(payload)
    return 0


def cmd_cert_verify(args) -> int:
    with open(args.path) as fh:
        cert = certificate_from_json(fh.read())
    report = verify_certificate(cert)
    for step in report["steps"]:
        status = "PASS" if step["ok"] else "FAIL"
        kind = "axiom" if step["axiom"] else "step"
        note = f"  ({step['note']})" if step["note"] else ""
        print(f"[{status}] {kind} {step['target']} via {step['justification']}{note}")
    verdict = "VERIFIED" if report["ok"] else "FAILED"
    print(f"certificate {report['theorem']} n={report['n']} q={report['q']} "
          f"m={report['m']} d={report['d']}: {verdict}")
    return 0 if report["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invfield",
        description="invariant fields of vectors and covectors over GF(q): "
                    "construct invariants, verify the generating-set identities, "
                    "and check derivation certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run verification suites over a grid")
    p.add_argument("--family", default="GL,SL,U", help="comma-separated families")
    p.add_argument("--grid", default="n=2,q=2,m=1,d=1",
                   help='e.g. "n=2,q=2,m=2,d=2;n=3,q=2,m=2,d=1"')
    p.add_argument("--suite", default="all",
                   help=f"'all' or comma-separated subset of {','.join(ALL_SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--enum-cap", type=int, default=10000,
                   help="full-enumeration invariance cap on the group order")
    p.add_argument("--out", default=None, help="write the report here")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timings", action="store_true",
                   help="include per-check timings (breaks byte-determinism)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dump", help="print an invariant or a generating set")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--label", help='e.g. "u[1,0]", "c[1,0]", "fstar[2,1]"')
    group.add_argument("--set", choices=SET_NAMES, help="generating-set name")
    _add_space_args(p)
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("cert", help="build a derivation certificate")
    p.add_argument("--theorem", choices=("GL", "SL", "UU", "pU3"), required=True)
    _add_space_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("cert-verify", help="verify a certificate document")
    p.add_argument("path")
    p.set_defaults(func=cmd_cert_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvariantError, RelationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
