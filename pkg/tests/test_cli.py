import json

import pytest

from extremal_domains.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eig_flat(tmp_path, capsys):
    code, out, _ = run(capsys, "eig", "--surface", "flat", "--band", "-0.7854", "0.7854",
                       "--out", str(tmp_path))
    assert code == 0
    lam = float(out.split("lambda1")[1].split()[0])
    assert lam == pytest.approx(4.0, rel=1e-4)
    doc = json.loads((tmp_path / "eig.json").read_text())
    assert doc["config_digest"] in out


def test_eig_band_area_and_hemisphere(tmp_path, capsys):
    code, out, _ = run(capsys, "eig", "--surface", "sphere-band", "--band", "-0.5236", "0.5236",
                       "--out", str(tmp_path))
    assert code == 0 and float(out.split("area")[1].split()[0]) == pytest.approx(6.2832, abs=1e-4)
    code, out, _ = run(capsys, "eig", "--surface", "sphere-polar", "--disk", "1.5708",
                       "--out", str(tmp_path), "--format", "csv")
    assert code == 0 and float(out.split("lambda1")[1].split()[0]) == pytest.approx(2.0, abs=1e-4)
    assert (tmp_path / "eig.csv").read_text().startswith("# config_digest=")


def test_index_verdicts(tmp_path, capsys):
    code, out, _ = run(capsys, "index", "--surface", "sphere-band", "--band", "-1.0", "1.0",
                       "--out", str(tmp_path))
    assert code == 0 and "verdict unstable" in out
    code, out, _ = run(capsys, "index", "--surface", "sphere-polar", "--disk", "0.8",
                       "--out", str(tmp_path))
    assert code == 0 and "verdict stable" in out and "nullity 2" in out
    code, out, _ = run(capsys, "index", "--surface", "flat", "--band", "-2.0", "2.0",
                       "--out", str(tmp_path))
    assert code == 0 and "verdict stable" in out
    lines = (tmp_path / "index.csv").read_text().splitlines()
    assert lines[1] == "k,m,eig_1,eig_2"


def test_index_truncation_exit_3(tmp_path, capsys):
    code, _, err = run(capsys, "index", "--surface", "sphere-band", "--band", "-0.15", "0.15",
                       "--kmax", "2", "--out", str(tmp_path))
    assert code == 3 and "numerical failure" in err


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "verify", "unknown-id", "--out", str(tmp_path))[0] == 2
    assert run(capsys, "scan", "fk", "--r0", "1:0.5:0.1")[0] == 2
    assert run(capsys, "eig", "--bogus")[0] == 2
    assert run(capsys, "eig", "--surface", "sphere-band", "--band", "0.5", "0.2")[0] == 2
    assert run(capsys, "eig", "--surface", "sphere-band")[0] == 2
    assert run(capsys, "verify", "hemisphere-equality", "--grid", "0:1:0.1")[0] == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# flat band\nsurface = flat\nband = -0.7854, 0.7854\nn = 512\n")
    code, out, _ = run(capsys, "eig", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 0 and "flat:Band" in out
    code, out, _ = run(capsys, "eig", "--config", str(cfg), "--band", "-1.0", "1.0",
                       "--out", str(tmp_path))
    assert "Band(-1, 1)" in out
    cfg.write_text("surface = flat\ncolour = blue\n")
    assert run(capsys, "eig", "--config", str(cfg))[0] == 2


def test_scan_csv_and_determinism(capsys):
    code, out1, _ = run(capsys, "scan", "fk", "--r0", "0.05:0.15:0.05", "--n", "256")
    code2, out2, _ = run(capsys, "scan", "fk", "--r0", "0.05:0.15:0.05", "--n", "256",
                         "--workers", "3")
    assert code == code2 == 0 and out1 == out2
    lines = out1.splitlines()
    assert lines[0].startswith("# config_digest=") and lines[1] == "r0,area,lambda1,product"
    assert len(lines) == 5
    code, out, _ = run(capsys, "scan", "index", "--r0", "0.2:0.4:0.2", "--n", "256")
    assert code == 0 and out.splitlines()[1] == "r0,index,nullity"


def test_verify_single_and_grid(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "hemisphere-equality", "--out", str(tmp_path))
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "verify", "annulus-instability", "--grid", "0.2:1.4:0.4",
                       "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["scenarios"][0]["parameters"]["grid"] == [0.2, 1.4, 0.4]


def test_verify_failure_exit_1(tmp_path, capsys, monkeypatch):
    from extremal_domains import harness

    spec = harness.REGISTRY["gauss-bonnet-selftest"]
    monkeypatch.setitem(harness.REGISTRY, "gauss-bonnet-selftest",
                        harness.ScenarioSpec(spec.id, spec.description, {**spec.defaults, "tol": -1.0},
                                             spec.run))
    code, out, _ = run(capsys, "verify", "gauss-bonnet-selftest", "--out", str(tmp_path))
    assert code == 1 and "FAIL" in out


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        from extremal_domains.cli import build_parser

        build_parser().parse_args(["index", "--help"])
    out = capsys.readouterr().out
    for flag in ("--kmax", "--null-tol", "--surface", "--disk", "--band", "--config"):
        assert flag in out
