import json

import pytest

from invfield.cli import main


def test_dump_label(capsys):
    assert main(["dump", "--label", "u[1,0]", "--n", "2", "--q", "2",
                 "--m", "1", "--d", "1"]) == 0
    assert capsys.readouterr().out.strip() == "x[1,1]*y[1,1] + x[1,2]*y[1,2]"


def test_dump_trivial_label(capsys):
    assert main(["dump", "--label", "f[1,1]", "--n", "2", "--q", "2",
                 "--m", "1", "--d", "1"]) == 0
    assert capsys.readouterr().out.strip() == "x[1,1]"


def test_dump_set(capsys):
    assert main(["dump", "--set", "thm_GL", "--n", "2", "--q", "2",
                 "--m", "2", "--d", "2"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(lines) == 8
    assert lines[0].startswith("c[1,0] = ")


def test_dump_unknown_label(capsys):
    assert main(["dump", "--label", "z[1,0]", "--n", "2", "--q", "2",
                 "--m", "1", "--d", "1"]) == 2


def test_verify_small_grid(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["verify", "--family", "U", "--grid", "n=2,q=2,m=1,d=1",
               "--suite", "all", "--seed", "42", "--out", str(out),
               "--format", "json"])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["summary"]["fail"] == 0
    assert report["schema_version"] == 1
    assert "resolved_conventions" in report


def test_verify_gl_n1_invariance_vacuous(tmp_path):
    out = tmp_path / "r.json"
    rc = main(["verify", "--family", "GL", "--grid", "n=1,q=2,m=1,d=1",
               "--suite", "invariance", "--seed", "0", "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["summary"]["fail"] == 0


def test_verify_determinism(tmp_path):
    args = ["verify", "--family", "GL,U", "--grid", "n=2,q=2,m=1,d=1",
            "--suite", "all", "--seed", "7", "--format", "json"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_verify_text_format(tmp_path):
    out = tmp_path / "report.txt"
    rc = main(["verify", "--family", "U", "--grid", "n=2,q=2,m=1,d=1",
               "--suite", "counts", "--seed", "1", "--out", str(out),
               "--format", "text"])
    assert rc == 0
    text = out.read_text()
    assert "summary:" in text and "PASS" in text.upper()


def test_verify_rejects_bad_explicit_suite():
    rc = main(["verify", "--family", "U", "--grid", "n=3,q=2,m=1,d=1",
               "--suite", "hypersurface", "--seed", "0"])
    assert rc == 2  # config error: hypersurface needs n=2


def test_verify_rejects_bad_grid():
    assert main(["verify", "--grid", "n=2,q=2"]) == 2
    assert main(["verify", "--grid", ""]) == 2


def test_verify_stdout(capsys):
    rc = main(["verify", "--family", "U", "--grid", "n=1,q=2,m=1,d=1",
               "--suite", "counts", "--seed", "0", "--format", "text"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "summary:" in out


def test_cert_round_trip_via_cli(tmp_path, capsys):
    path = tmp_path / "cert.json"
    rc = main(["cert", "--theorem", "UU", "--n", "3", "--q", "2",
               "--m", "2", "--d", "1", "--out", str(path)])
    assert rc == 0
    rc = main(["cert-verify", str(path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "VERIFIED" in out


def test_cert_verify_detects_corruption(tmp_path, capsys):
    path = tmp_path / "cert.json"
    main(["cert", "--theorem", "GL", "--n", "2", "--q", "2",
          "--m", "2", "--d", "2", "--out", str(path)])
    data = json.loads(path.read_text())
    step = next(s for s in data["steps"] if not s["axiom"])
    step["num"] = step["num"] + " + 1"
    path.write_text(json.dumps(data))
    rc = main(["cert-verify", str(path)])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL" in out and "FAILED" in out
