import csv
import json

import pytest

from pointspec import __version__, cli
from pointspec.eigensolve import EigenSolveError


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_potential():
    w = cli.parse_potential("0, 0.5, 1")
    assert w.terms == ((0.5, 1.0), (-0.5, -1.0))
    w = cli.parse_potential("deltas: 1@1; 0.5i@-2; 2+1j@0")
    assert w.terms == ((1.0, 1.0), (0.5j, -2.0), (2 + 1j, 0.0))
    for bad in ("1,2", "deltas: 1", "deltas:", "a,b,c", "0,1,0", "deltas: 1@1j"):
        with pytest.raises(cli.UsageError):
            cli.parse_potential(bad)


def test_zero_potential_spectrum(tmp_path):
    assert run(tmp_path, "spectrum", "--potential", "deltas: 0@0", "--n-lo", "0", "--n-hi", "10") == 0
    table = rows(tmp_path / "spectrum.csv")
    assert [float(r["re_lambda"]) for r in table] == [2 * n + 1 for n in range(11)]
    assert {r["status"] for r in table} == {"matched"} and table[0]["N"] == "512"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["version"] == __version__ and manifest["config"]["trunc"] == 512
    assert manifest["config"]["tol"] == 1e-8 and "kmax" in manifest["config"]


def test_real_symmetric_rows_real(tmp_path):
    assert run(tmp_path, "spectrum", "--potential", "0,0.5,1", "--n-lo", "20", "--n-hi", "200") == 0
    assert all(float(r["im_lambda"]) == 0 for r in rows(tmp_path / "spectrum.csv"))


def test_large_gamma_regression(tmp_path):
    # observed at N = 512: complex pairs pull low levels out of their strips
    assert run(tmp_path, "spectrum", "--potential", "0,5j,1", "--n-lo", "0", "--n-hi", "12",
               "--trunc", "512") == 0
    status = [r["status"] for r in rows(tmp_path / "spectrum.csv")]
    assert status == ["missing", "matched", "ambiguous", "missing", "ambiguous", "matched", "missing",
                      "ambiguous", "ambiguous", "missing", "matched", "matched", "matched"]


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(out, "traces", "--potential", "deltas: 1@1; 0.5i@-2", "--n-lo", "5", "--n-hi", "9") == 0
    assert (a / "traces.csv").read_bytes() == (b / "traces.csv").read_bytes()
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    text = (a / "traces.csv").read_text()
    assert "\r\n" in (a / "traces.csv").read_bytes().decode()
    assert "0.0034592291451716202" in text


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# odd pair\nc_re = 0.5, -0.5\nc_im = 0, 0\nb = 1, -1\nn_lo = 30\nn_hi = 40\n")
    assert cli.main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    cfg2 = tmp_path / "short.cfg"
    cfg2.write_text("t = 0\ns = 0.5\nb = 1\nn_lo = 30\nn_hi = 40\n")
    assert cli.main(["spectrum", "--config", str(cfg2), "--out", str(tmp_path / "p")]) == 0
    assert (tmp_path / "o" / "spectrum.csv").read_bytes() == (tmp_path / "p" / "spectrum.csv").read_bytes()
    # command-line values override the file
    assert cli.main(["spectrum", "--config", str(cfg2), "--n-hi", "35", "--out", str(tmp_path / "q")]) == 0
    assert len(rows(tmp_path / "q" / "spectrum.csv")) == 6


@pytest.mark.parametrize("text,needle", [
    ("n_hi = 4x\n", "run.cfg:1: field 'n_hi'"),
    ("# c\nbogus = 1\n", "run.cfg:2: unknown field 'bogus'"),
    ("n_lo = 1\nn_lo = 2\n", "run.cfg:2: field 'n_lo' given twice"),
    ("c_re = 1, 2\nb = 1\n", "run.cfg:1: c_re, c_im and b lengths differ"),
    ("t = 1\n", "field 'b' is required"),
    ("just text\n", "run.cfg:1: expected key = value"),
])
def test_config_errors(tmp_path, capsys, text, needle):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    assert cli.main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert needle in capsys.readouterr().err


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "spectrum", "--backend", "eispack") == 2
    assert run(tmp_path, "spectrum", "--n-lo", "50", "--n-hi", "10") == 2
    assert run(tmp_path, "spectrum", "--trunc", "100", "--n-hi", "200") == 2
    assert run(tmp_path, "traces", "--kmax", "10", "--n-hi", "20") == 2
    assert run(tmp_path, "scan-gamma", "--potential", "0,1j,1") == 2
    assert run(tmp_path, "asymptotics", "--potential", "deltas: 1@1; 1@2") == 2
    assert cli.main(["frobnicate"]) == 2
    assert run(tmp_path, "verify", "--suites", "nope") == 2
    capsys.readouterr()


def test_numerical_failure_exit(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise EigenSolveError("unreduced block rows 3..7")
    monkeypatch.setattr(cli, "eigenvalues", boom)
    assert run(tmp_path, "spectrum", "--n-lo", "0", "--n-hi", "10") == 3


def test_scan_gamma(tmp_path):
    assert run(tmp_path, "scan-gamma", "--potential", "0,1,1", "--gamma-hi", "10", "--gamma-steps", "6",
               "--trunc", "256", "--backend", "lapack") == 0
    table = rows(tmp_path / "scan_gamma.csv")
    assert list(table[0]) == ["gamma", "T_gamma", "bound_value", "max_im"]
    assert table[0]["T_gamma"] == "0" and table[1]["T_gamma"] == "0"
    assert all(int(r["T_gamma"]) % 2 == 0 for r in table)
    # a tiny constant makes the bound fail, which is a tolerance failure
    assert run(tmp_path, "scan-gamma", "--potential", "0,1,1", "--gamma-lo", "5", "--gamma-hi", "5",
               "--gamma-steps", "1", "--trunc", "256", "--bound-c", "1e-3") == 1


def test_asymptotics_command(tmp_path):
    assert run(tmp_path, "asymptotics", "--potential", "0,0.5,1", "--n-lo", "30", "--n-hi", "60",
               "--refine", "--trunc", "512") == 0
    res = json.loads((tmp_path / "manifest.json").read_text())["results"]
    assert res["kind"] == "odd_pair" and res["max_residual_over_band"] < 1
    table = rows(tmp_path / "asymptotics.csv")
    assert len(table) == 31 and "residual" in table[0]


def test_bounds_command(tmp_path):
    assert run(tmp_path, "bounds", "--potential", "0,1,1", "--n-lo", "16", "--n-hi", "24") == 0
    table = rows(tmp_path / "bounds.csv")
    assert len(table) == 9 * 4 and all(r["holds"] == "true" for r in table)
    res = json.loads((tmp_path / "manifest.json").read_text())["results"]
    assert res["M_alpha"] == 10.0


def test_verify_subset(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suites", "constant,parity") == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2
    assert len(rows(tmp_path / "verify.csv")) == 2
