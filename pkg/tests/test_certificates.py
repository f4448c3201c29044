import json

import pytest

from invfield.gf import make_field
from invfield.invariants import generating_set, theorem_set_name
from invfield.mpoly import Space
from invfield.relations import (RelationError, build_certificate,
                                certificate_from_json, certificate_to_json,
                                corrupt_certificate, verify_certificate)

CRITERION_GRID = {
    "GL": [(2, 2, 2, 2), (2, 3, 2, 2), (3, 2, 2, 2)],
    "SL": [(2, 2, 2, 2), (2, 3, 2, 2), (3, 2, 2, 2)],
    "UU": [(2, 2, 2, 2), (3, 2, 2, 1)],
}


def _build(theorem, n, q, m, d):
    return build_certificate(theorem, make_field(q), Space(n, m, d))


def test_certificates_verify_on_grid():
    for theorem, entries in CRITERION_GRID.items():
        for (n, q, m, d) in entries:
            cert = _build(theorem, n, q, m, d)
            report = verify_certificate(cert)
            assert report["ok"], (theorem, n, q, m, d, report)


def test_gl_certificate_structure():
    cert = _build("GL", 2, 2, 2, 2)
    targets = cert.step_targets()
    # pGL axioms for the (1,1) pair, then the T*/det/T chain
    assert "c[1,1]" in targets and "cstar[1,0]" in targets
    assert "u[2,1]" in targets and "c[2,0]" in targets and "v[2,-1]" in targets
    by_target = {s.target: s for s in cert.steps}
    assert by_target["u[2,1]"].justification.startswith("T*_1")
    assert by_target["c[2,0]"].justification.startswith("det_identity")
    assert by_target["v[2,-1]"].justification.startswith("T_1")
    assert by_target["c[1,1]"].axiom


def test_sl_certificate_structure():
    cert = _build("SL", 2, 3, 2, 2)
    targets = cert.step_targets()
    assert "dstar[1,2]" in targets and "d[2,2]" in targets
    by_target = {s.target: s for s in cert.steps}
    assert not by_target["cstar[1,0]"].axiom  # rational: dstar^(q-1)
    assert by_target["d[2,2]"].justification.startswith("det_identity")


def test_uu_n2_certificate_structure():
    cert = _build("UU", 2, 2, 2, 2)
    targets = cert.step_targets()
    assert targets == ["f[1,2]", "f[2,2]", "fstar[2,2]"]
    assert all(s.justification.startswith("hypersurface") for s in cert.steps)
    assert not any(s.axiom for s in cert.steps)


def test_uu_n3_certificate_structure():
    cert = _build("UU", 3, 2, 2, 1)
    targets = cert.step_targets()
    assert targets == ["fstar[1,2]", "fstar[1,3]", "f[1,3]",
                       "u[2,1]", "f[2,2]", "f[2,3]"]
    by_target = {s.target: s for s in cert.steps}
    assert by_target["u[2,1]"].justification == "R1+(2,1)"
    assert by_target["f[2,2]"].justification == "R2(2,1)"
    assert not any(s.axiom for s in cert.steps)


def test_pu3_certificate():
    cert = build_certificate("pU3", make_field(2), Space(3, 1, 1))
    assert verify_certificate(cert)["ok"]
    assert cert.step_targets() == ["fstar[1,2]", "fstar[1,3]", "f[1,3]"]


def test_uu_n3_with_covectors_uses_axioms():
    cert = build_certificate("UU", make_field(2), Space(3, 1, 2))
    report = verify_certificate(cert)
    assert report["ok"]
    axioms = [s.target for s in cert.steps if s.axiom]
    assert "fstar[2,2]" in axioms and "v[2,-1]" in axioms
    assert "fstar[2,3]" in cert.step_targets()  # rational tail above the axioms


def test_n1_certificates_are_rational():
    for theorem in ("GL", "SL"):
        cert = build_certificate(theorem, make_field(3), Space(1, 2, 2))
        assert verify_certificate(cert)["ok"]
        assert not any(s.axiom for s in cert.steps)


def test_steps_are_closed():
    # every step only uses generators of the claimed set plus earlier targets
    for theorem, entries in CRITERION_GRID.items():
        for (n, q, m, d) in entries:
            cert = _build(theorem, n, q, m, d)
            base = generating_set(theorem_set_name(cert.family), cert.ctx, cert.space)
            available = {lab.text() for lab in base.labels()}
            for step in cert.steps:
                assert set(step.uses) <= available, (theorem, step.target, step.uses)
                available.add(step.target)


def test_corruption_detected_each_theorem():
    for theorem, entries in CRITERION_GRID.items():
        n, q, m, d = entries[0]
        cert = _build(theorem, n, q, m, d)
        idx = next(i for i, s in enumerate(cert.steps) if not s.axiom)
        bad = corrupt_certificate(cert, idx)
        report = verify_certificate(bad)
        assert not report["ok"]
        flags = [s["ok"] for s in report["steps"]]
        assert flags.count(False) == 1 and not flags[idx]


def test_trivial_identity_step_passes():
    from invfield.relations import Certificate, Step
    from invfield.invariants import build_invariant, parse_label
    from invfield.mpoly import MPoly
    ctx = make_field(2)
    sp = Space(2, 1, 1)
    f = build_invariant(ctx, sp, parse_label("u[1,0]"))
    cert = Certificate("GL", "GL", ctx, sp,
                       [Step("u[1,0]", f, MPoly.one(ctx, sp), "identity", [])])
    assert verify_certificate(cert)["ok"]


def test_json_round_trip():
    cert = _build("GL", 2, 2, 2, 2)
    text = certificate_to_json(cert)
    restored = certificate_from_json(text)
    assert certificate_to_json(restored) == text
    assert verify_certificate(restored)["ok"]
    data = json.loads(text)
    assert data["schema_version"] == 1
    assert data["kind"] == "invfield-certificate"


def test_bad_document_rejected():
    with pytest.raises(RelationError):
        certificate_from_json(json.dumps({"kind": "other"}))


def test_uu_out_of_scope_params():
    with pytest.raises(RelationError):
        build_certificate("UU", make_field(2), Space(4, 1, 2))
    with pytest.raises(RelationError):
        build_certificate("pU3", make_field(2), Space(2, 1, 1))
