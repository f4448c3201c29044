"""Verification-suite driver: runs the checks over a parameter grid and
assembles a deterministic report (byte-identical for identical config+seed).
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from invfield import __version__
from invfield.gf import field_for_q
from invfield.groups import (GroupSpec, action_endo, group_enumerate,
                             group_generators, group_order)
from invfield.invariants import (InvariantError, generating_set, mui,
                                 prec_set_name, resolved_conventions,
                                 theorem_set_name)
from invfield.mpoly import Space, involution_endo, jacobian_rank
from invfield.relations import (R3_MINUS_VARIANT, RelationError, build_certificate,
                                check_T, check_T_star, check_det_identity,
                                check_hypersurface_n2, make_r_template,
                                mirror_of_solution, solve_hypersurface_coeff,
                                solve_relation_coeffs, verify_certificate)

ALL_SUITES = ("counts", "invariance", "relations", "determinant",
              "hypersurface", "coefficients", "certificates", "independence")

REPORT_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid suite configuration."""


@dataclass
class SuiteConfig:
    families: tuple = ("GL", "SL", "U")
    grid: tuple = ((2, 2, 1, 1),)
    suites: tuple = ALL_SUITES
    seed: int = 0
    enum_cap: int = 10000
    timings: bool = False
    explicit_suites: bool = False


def parse_grid(text: str):
    entries = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        fields = {}
        for part in chunk.split(","):
            if "=" not in part:
                raise ConfigError(f"bad grid entry {chunk!r}")
            key, val = part.split("=", 1)
            try:
                fields[key.strip()] = int(val.strip())
            except ValueError:
                raise ConfigError(f"bad grid entry {chunk!r}") from None
        missing = {"n", "q", "m", "d"} - set(fields)
        if missing:
            raise ConfigError(f"grid entry {chunk!r} is missing {sorted(missing)}")
        entry = (fields["n"], fields["q"], fields["m"], fields["d"])
        if min(entry) < 1:
            raise ConfigError(f"grid entry {chunk!r} has non-positive parameters")
        entries.append(entry)
    if not entries:
        raise ConfigError("empty grid")
    return tuple(entries)


def validate_config(cfg: SuiteConfig):
    for fam in cfg.families:
        if fam not in ("GL", "SL", "U"):
            raise ConfigError(f"unknown family {fam!r}")
    for suite in cfg.suites:
        if suite not in ALL_SUITES:
            raise ConfigError(f"unknown suite {suite!r}")
    if cfg.explicit_suites:
        # an explicitly requested suite must be applicable to every grid entry
        for (n, q, m, d) in cfg.grid:
            if "hypersurface" in cfg.suites and n != 2:
                raise ConfigError(f"hypersurface suite requires n=2, grid has n={n}")
            if "relations" in cfg.suites and n < 2:
                raise ConfigError("relations suite requires n >= 2")
            if "coefficients" in cfg.suites and n < 2:
                raise ConfigError("coefficients suite requires n >= 2")


# -- invariance engine ----------------------------------------------------------

def _span_permutes(g, space, side):
    """Exact factor-permutation argument for Dickson-family labels.

    The orbit product runs over the full span of one variable block; a group
    element permutes that span (it is an invertible linear substitution), so
    every coefficient of the product is fixed. Verified per element by
    checking that the image vectors enumerate the whole space.
    """
    ctx = g.ctx
    n = space.n
    if side == "x":
        cols = [tuple(g.mat[t][i].code for t in range(n)) for i in range(n)]
    else:
        from invfield.groups import mat_inv
        inv = mat_inv(g.mat, ctx)
        cols = [tuple(inv[i][t].code for t in range(n)) for i in range(n)]
    codes = [e.code for e in ctx.elements()]
    span = {(0,) * n}
    for col in cols:
        span = {tuple(ctx.add_code(a, ctx.mul_code(c, b)) for a, b in zip(vec, col))
                for vec in span for c in codes}
    return len(span) == ctx.q ** n


def _sweep_invariance(elements, space, members, span_dickson):
    """Check every member against every element.

    members: iterable of (label, poly). With span_dickson, Dickson-family
    labels use the factor-permutation argument (one span check per variable
    block per element); everything else applies the induced endomorphism
    directly, one endomorphism per element shared across members.
    Returns (set of failing label texts, methods dict).
    """
    span_members = []
    direct_members = []
    methods = {}
    for label, poly in members:
        if span_dickson and label.kind in ("c", "cstar"):
            methods[label.text()] = "span-permutation"
            span_members.append((label.text(), "x" if label.kind == "c" else "y"))
        else:
            methods[label.text()] = "direct"
            direct_members.append((label.text(), poly))
    failed = set()
    for g in elements:
        side_ok = {}
        endo = None
        for text, side in span_members:
            if text in failed:
                continue
            if side not in side_ok:
                side_ok[side] = _span_permutes(g, space, side)
            if not side_ok[side]:
                failed.add(text)
        for text, poly in direct_members:
            if text in failed:
                continue
            if endo is None:
                endo = action_endo(g, space)
            if endo.apply(poly) != poly:
                failed.add(text)
    return failed, methods


# -- suite runner -----------------------------------------------------------------

def _check_id(suite, family, entry, item):
    n, q, m, d = entry
    return f"{suite}:{family}:n={n},q={q},m={m},d={d}:{item}"


def _record(checks, cfg, suite, family, entry, item, verdict, note="", t0=None):
    rec = {
        "id": _check_id(suite, family, entry, item),
        "suite": suite,
        "family": family,
        "n": entry[0], "q": entry[1], "m": entry[2], "d": entry[3],
        "item": item,
        "verdict": verdict,
    }
    if note:
        rec["note"] = note
    if cfg.timings and t0 is not None:
        rec["timing_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    checks.append(rec)


def _run_counts(cfg, checks, entry, family, ctx, space):
    t0 = time.perf_counter()
    n, q, m, d = entry
    try:
        thm = generating_set(theorem_set_name(family), ctx, space)
        ok = len(thm) == (m + d) * n
        note = f"|{thm.name}|={len(thm)}, expected {(m + d) * n}"
        _record(checks, cfg, "counts", family, entry, "theorem-set",
                "pass" if ok else "fail", note, t0)
        prec = generating_set(prec_set_name(family), ctx, space)
        expected = m * (n + 1) + d * n + (d - 1)
        ok = len(prec) == expected
        _record(checks, cfg, "counts", family, entry, "prec-set",
                "pass" if ok else "fail", f"|{prec.name}|={len(prec)}", t0)
    except InvariantError as exc:
        _record(checks, cfg, "counts", family, entry, "theorem-set", "fail", str(exc), t0)


def _run_invariance(cfg, checks, entry, family, ctx, space):
    n, q, m, d = entry
    spec = GroupSpec(family, n, ctx)
    gens = group_generators(spec)
    order = group_order(spec)
    sets = [generating_set(name, ctx, space)
            for name in (theorem_set_name(family), prec_set_name(family))]
    merged = {}
    for genset in sets:
        for label, poly in genset.members:
            merged.setdefault(label.text(), (label, poly))
    members = list(merged.values())

    t0 = time.perf_counter()
    gen_failed, _ = _sweep_invariance(gens, space, members, span_dickson=False)
    for genset in sets:
        bad = sorted(t for t in gen_failed if t in {l.text() for l in genset.labels()})
        note = f"|G|={order}, {len(gens)} generators, {len(genset)} members"
        if bad:
            note += f"; failing: {','.join(bad)}"
        _record(checks, cfg, "invariance", family, entry, f"{genset.name}:generators",
                "fail" if bad else "pass", note, t0)

    t0 = time.perf_counter()
    if order <= cfg.enum_cap:
        elements = group_enumerate(spec, cfg.enum_cap)
        full_failed, methods = _sweep_invariance(elements, space, members,
                                                 span_dickson=True)
        span_used = sorted(t for t, meth in methods.items()
                           if meth == "span-permutation")
        for genset in sets:
            texts = {l.text() for l in genset.labels()}
            bad = sorted(t for t in full_failed if t in texts)
            note = f"all {order} elements"
            used = [t for t in span_used if t in texts]
            if used:
                note += f"; span-permutation for {','.join(used)}"
            if bad:
                note += f"; failing: {','.join(bad)}"
            _record(checks, cfg, "invariance", family, entry,
                    f"{genset.name}:all-elements", "fail" if bad else "pass", note, t0)
    else:
        for genset in sets:
            _record(checks, cfg, "invariance", family, entry,
                    f"{genset.name}:all-elements", "skipped",
                    f"|G|={order} exceeds enumeration cap {cfg.enum_cap}; "
                    "generator check is sufficient", t0)


def _run_relations(cfg, checks, entry, ctx, space):
    n, q, m, d = entry
    if n < 2:
        _record(checks, cfg, "relations", "-", entry, "T-relations", "skipped",
                "no T-relations for n=1")
        return
    for j in range(1, m + 1):
        for r in range(1, n):
            t0 = time.perf_counter()
            ok = check_T_star(ctx, space, j, r)
            _record(checks, cfg, "relations", "-", entry, f"Tstar_{r}(j={j})",
                    "pass" if ok else "fail", "", t0)
    for k in range(1, d + 1):
        for r in range(1, n):
            t0 = time.perf_counter()
            ok = check_T(ctx, space, k, r)
            _record(checks, cfg, "relations", "-", entry, f"T_{r}(k={k})",
                    "pass" if ok else "fail", "", t0)


def _run_determinant(cfg, checks, entry, ctx, space, det_signs):
    n, q, m, d = entry
    for j in range(1, m + 1):
        t0 = time.perf_counter()
        ok, sign = check_det_identity(ctx, space, j)
        note = f"resolved sign {sign:+d}" if ok else "both signs fail"
        _record(checks, cfg, "determinant", "-", entry, f"det(j={j})",
                "pass" if ok else "fail", note, t0)
        # signs are only visible at odd characteristic
        if ok and (q % 2 == 1 or f"n={n}" not in det_signs):
            det_signs[f"n={n}"] = f"{sign:+d}" + ("" if q % 2 else " (char 2: +- coincide)")


def _run_hypersurface(cfg, checks, entry, ctx, space):
    n, q, m, d = entry
    if n != 2:
        _record(checks, cfg, "hypersurface", "-", entry, "identity", "skipped",
                "hypersurface relation requires n=2")
        return
    t0 = time.perf_counter()
    ok = check_hypersurface_n2(ctx, space)
    _record(checks, cfg, "hypersurface", "-", entry, "identity",
            "pass" if ok else "fail", "", t0)


def _run_coefficients(cfg, checks, entry, ctx, space):
    n, q, m, d = entry
    if n < 2:
        _record(checks, cfg, "coefficients", "-", entry, "R-relations", "skipped",
                "no R-relations for n=1")
        return
    if n == 2:
        t0 = time.perf_counter()
        try:
            coeff = solve_hypersurface_coeff(ctx, space)
            star = involution_endo(ctx, space, 1, 1)
            f1 = mui(ctx, space, 1, 1)
            expected = (f1 * star.apply(f1)) ** (q - 1)
            ok = coeff == expected
            note = "recovered (f1*f1star)^(q-1)" if ok else "unexpected coefficient"
        except RelationError as exc:
            ok, note = False, str(exc)
        _record(checks, cfg, "coefficients", "-", entry, "hypersurface-template",
                "pass" if ok else "fail", note, t0)
        return
    names = ["R1+", "R2"] + [f"R{c}-" for c in range(3, n + 1)] \
        + [f"R{c}" for c in range(3, n)]
    for j in range(1, m + 1):
        for name in names:
            t0 = time.perf_counter()
            try:
                sol = solve_relation_coeffs(make_r_template(ctx, space, name, j))
                ok = sol.residual_zero and sol.all_nonzero
                note = (f"{len(sol.slots)} slots, nullity {sol.nullity}"
                        + ("" if sol.all_nonzero else "; zero slot"))
                if name == "R1+":
                    mirrored = mirror_of_solution(sol)
                    if not mirrored.is_zero():
                        ok = False
                        note += "; mirror instance failed"
            except RelationError as exc:
                ok, note = False, str(exc)
            _record(checks, cfg, "coefficients", "-", entry, f"{name}(j={j})",
                    "pass" if ok else "fail", note, t0)


def _run_certificates(cfg, checks, entry, family, ctx, space):
    n, q, m, d = entry
    theorem = {"GL": "GL", "SL": "SL", "U": "UU"}[family]
    t0 = time.perf_counter()
    try:
        cert = build_certificate(theorem, ctx, space)
        report = verify_certificate(cert)
        ok = report["ok"]
        axioms = sum(1 for s in cert.steps if s.axiom)
        note = f"{len(cert.steps)} steps ({axioms} axioms)"
        if not ok:
            bad = [s["target"] for s in report["steps"] if not s["ok"]]
            note += f"; failing: {','.join(bad)}"
        _record(checks, cfg, "certificates", family, entry, theorem,
                "pass" if ok else "fail", note, t0)
    except RelationError as exc:
        _record(checks, cfg, "certificates", family, entry, theorem,
                "skipped", str(exc), t0)


def _run_independence(cfg, checks, entry, family, ctx, space):
    n, q, m, d = entry
    t0 = time.perf_counter()
    genset = generating_set(theorem_set_name(family), ctx, space)
    target = (m + d) * n
    polys = genset.polys()
    variables = space.variables()
    best = -1
    npoints = q ** len(variables)
    if npoints <= 2048:
        # small point spaces are scanned exhaustively
        import itertools
        codes = [e.code for e in ctx.elements()]
        for combo in itertools.product(codes, repeat=len(variables)):
            point = {v: ctx.elem(c) for v, c in zip(variables, combo)}
            best = max(best, jacobian_rank(polys, point))
            if best == target:
                break
        how = f"all {npoints} points" if best < target else "exhaustive scan"
    else:
        check_id = _check_id("independence", family, entry, "theorem-set")
        rng = random.Random(f"{cfg.seed}:{check_id}")
        for _ in range(24):
            point = {v: ctx.elem(rng.randrange(ctx.q)) for v in variables}
            best = max(best, jacobian_rank(polys, point))
            if best == target:
                break
        how = "24 seed-derived points"
    if best == target:
        _record(checks, cfg, "independence", family, entry, "theorem-set",
                "pass", f"independence confirmed: rank {best} = {target}", t0)
    else:
        _record(checks, cfg, "independence", family, entry, "theorem-set",
                "inconclusive", f"max rank {best} < {target} over {how} "
                "(full rank is sufficient, not necessary, in characteristic p)", t0)


def run_suite(cfg: SuiteConfig) -> dict:
    """Execute the configured checks and assemble the deterministic report."""
    validate_config(cfg)
    checks = []
    det_signs = {}
    for entry in cfg.grid:
        n, q, m, d = entry
        ctx = field_for_q(q)
        space = Space(n=n, m=m, d=d)
        if "relations" in cfg.suites:
            _run_relations(cfg, checks, entry, ctx, space)
        if "determinant" in cfg.suites:
            _run_determinant(cfg, checks, entry, ctx, space, det_signs)
        if "hypersurface" in cfg.suites:
            _run_hypersurface(cfg, checks, entry, ctx, space)
        if "coefficients" in cfg.suites:
            _run_coefficients(cfg, checks, entry, ctx, space)
        for family in cfg.families:
            if "counts" in cfg.suites:
                _run_counts(cfg, checks, entry, family, ctx, space)
            if "invariance" in cfg.suites:
                _run_invariance(cfg, checks, entry, family, ctx, space)
            if "certificates" in cfg.suites:
                _run_certificates(cfg, checks, entry, family, ctx, space)
            if "independence" in cfg.suites:
                _run_independence(cfg, checks, entry, family, ctx, space)
    checks.sort(key=lambda rec: rec["id"])
    summary = {"total": len(checks)}
    for verdict in ("pass", "fail", "inconclusive", "skipped"):
        summary[verdict] = sum(1 for rec in checks if rec["verdict"] == verdict)
    conventions = resolved_conventions()
    conventions["det_identity_signs"] = det_signs
    conventions["r3_minus_variant"] = R3_MINUS_VARIANT
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": {"name": "invfield", "version": __version__},
        "config": {
            "families": list(cfg.families),
            "grid": [list(entry) for entry in cfg.grid],
            "suites": list(cfg.suites),
            "seed": cfg.seed,
            "enum_cap": cfg.enum_cap,
        },
        "resolved_conventions": conventions,
        "checks": checks,
        "summary": summary,
    }
    return report


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def render_text(report: dict) -> str:
    """Human-readable rendering, derived from the JSON structure."""
    lines = []
    tool = report["tool"]
    lines.append(f"{tool['name']} {tool['version']} verification report")
    lines.append("resolved conventions:")
    for key in sorted(report["resolved_conventions"]):
        lines.append(f"  {key}: {report['resolved_conventions'][key]}")
    lines.append("checks:")
    for rec in report["checks"]:
        note = f"  ({rec['note']})" if rec.get("note") else ""
        lines.append(f"  [{rec['verdict'].upper():>12}] {rec['id']}{note}")
    s = report["summary"]
    lines.append(f"summary: {s['total']} checks, {s['pass']} pass, {s['fail']} fail, "
                 f"{s['inconclusive']} inconclusive, {s['skipped']} skipped")
    return "\n".join(lines) + "\n"


def report_ok(report: dict) -> bool:
    return report["summary"]["fail"] == 0
