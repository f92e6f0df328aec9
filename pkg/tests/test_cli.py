import csv
import json
import subprocess
import sys

import pytest

from mcbop import cli
from mcbop.report import ResidualReport


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def node(x, w):
    return {"x": str(x), "W": [[str(v) for v in row] for row in w]}


@pytest.fixture
def two_node_file(tmp_path):
    return write(tmp_path / "two.json", {"p": 1, "nodes": [node(1, [[1]]), node(2, [[1]])]})


@pytest.fixture
def six_node_file(tmp_path):
    ws = [1, 2, 1, 3, 1, 2]
    return write(tmp_path / "six.json", {"p": 1, "nodes": [node(k + 1, [[w]]) for k, w in enumerate(ws)]})


@pytest.fixture
def p2_file(tmp_path):
    nodes = [node(1, [[2, 1], [1, 1]]), node(2, [[1, 0], [0, 2]]), node("1/2", [[3, 1], [1, 2]]),
             node(3, [[1, -1], [-1, 3]])]
    return write(tmp_path / "p2.json", {"p": 2, "nodes": nodes})


def load(path):
    with open(path) as fh:
        return json.load(fh)


def test_verify_two_node_passes(two_node_file, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["verify", "--measure", two_node_file, "--n-max", "1", "--checks", "all", "--report", str(out)])
    assert code == 0
    rep = load(out)
    assert rep["schema"] == 1
    assert rep["summary"]["status"] == "pass" and rep["summary"]["fail"] == 0
    entries = [e for suite in rep["checks"] for e in suite["entries"] if e["status"] == "pass"]
    assert entries and all(e.get("exact_zero", True) for e in entries)
    assert all(e["residual"] == "0" for e in entries if "residual" in e)
    assert "PASS" in capsys.readouterr().out


def test_missing_measure_file_exits_2(tmp_path, capsys):
    assert cli.main(["polys", "--measure", str(tmp_path / "absent.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_missing_measure_flag_exits_2():
    assert cli.main(["polys"]) == 2


def test_usage_error_exits_2():
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["polys", "--backend", "mpfr"]) == 2


def test_json_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": 1,\n  "nodes": [,]}')
    assert cli.main(["moments", "--measure", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_field_error_exits_2(tmp_path, capsys):
    path = write(tmp_path / "m.json", {"p": 1, "nodes": [{"x": "0", "W": [["1"]]}]})
    assert cli.main(["moments", "--measure", path]) == 2
    assert "not positive" in capsys.readouterr().err


def test_exact_backend_rejects_quadrature(tmp_path):
    path = write(tmp_path / "lag.json", {"p": 1, "family": {"name": "laguerre", "alpha": 1, "count": 8}})
    assert cli.main(["polys", "--measure", path]) == 2
    assert cli.main(["recurrence", "--measure", path, "--backend", "f64", "--n-max", "4", "--quiet"]) == 0


def test_n_max_must_be_positive(two_node_file):
    assert cli.main(["polys", "--measure", two_node_file, "--n-max", "0"]) == 2


def test_identities_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert cli.main(["identities", "--trials", "100", "--p", "2", "--seed", "7", "--report", str(path), "--quiet"]) == 0
    ra, rb = load(a), load(b)
    for r in (ra, rb):
        r.pop("timing")
        r["config"].pop("report")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)
    assert {r["identity"] for r in ra["identities"]} == {"ncj", "homo_h", "homo_g", "dqd", "dqd1", "dqd2", "dqd3", "dqd_agree"}
    assert all(r["trials"] == 100 and r["failures"] == 0 for r in ra["identities"])


def test_identities_reject_float_backend(tmp_path):
    # identities take no measure, so the backend cannot be switched from the command line
    cfg = cli.RunConfig("identities", backend="f64", trials=1)
    with pytest.raises(cli.ConfigError):
        cli.run(cfg)


def test_csv_series(two_node_file, tmp_path):
    out = tmp_path / "h.csv"
    assert cli.main(["polys", "--measure", two_node_file, "--n-max", "1", "--csv", str(out), "--quiet"]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["n", "H_n", "V_n"]
    assert rows[1:] == [["0", "17/12", "2"], ["1", "1/102", "3/17"]]


def test_reduce_csv_and_data(two_node_file, tmp_path):
    out, rep = tmp_path / "t.csv", tmp_path / "r.json"
    assert cli.main(["reduce", "--measure", two_node_file, "--n-max", "1", "--csv", str(out), "--report", str(rep)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["n", "tau_n", "sigma_n"]
    assert rows[1] == ["0", "1", "2"]
    assert rows[2] == ["1", "17/12", "1/4"]
    assert load(rep)["data"]["tau"][1] == {"c0": "17/12", "c1": "4", "c2": "6"}


def test_reduce_rejects_blocks(p2_file):
    assert cli.main(["reduce", "--measure", p2_file]) == 2


def test_lattice_checks_and_lax(six_node_file, tmp_path):
    rep = tmp_path / "r.json"
    code = cli.main(["lattice", "--measure", six_node_file, "--n-max", "3", "--checks", "recurrence,lax",
                     "--lax-band", "6", "--report", str(rep), "--quiet"])
    assert code == 0
    titles = [s["title"] for s in load(rep)["checks"]]
    assert titles == ["four-term recurrence", "Lax pair"]


def test_lattice_unknown_check(six_node_file):
    assert cli.main(["lattice", "--measure", six_node_file, "--checks", "recurrence,bogus"]) == 2


def test_lax_band_too_small(six_node_file):
    assert cli.main(["lax", "--measure", six_node_file, "--lax-band", "4"]) == 2


def test_lax_skips_when_measure_too_small(two_node_file, tmp_path):
    rep = tmp_path / "r.json"
    assert cli.main(["lax", "--measure", two_node_file, "--report", str(rep), "--quiet"]) == 0
    assert load(rep)["summary"]["skipped"] == 1


def test_t3_and_p2_verify(p2_file, tmp_path):
    assert cli.main(["t3", "--measure", p2_file, "--quiet"]) == 0
    rep = tmp_path / "r.json"
    assert cli.main(["verify", "--measure", p2_file, "--n-max", "2", "--report", str(rep), "--quiet"]) == 0
    titles = {s["title"] for s in load(rep)["checks"]}
    assert "tau bridge" in titles  # skipped with a reason for p = 2
    assert load(rep)["summary"]["fail"] == 0


def test_float_backend_emits_floats(six_node_file, tmp_path):
    # n_max 2 keeps the moment-route comparison away from the rank-deficient corner
    rep = tmp_path / "r.json"
    assert cli.main(["polys", "--measure", six_node_file, "--n-max", "2", "--backend", "f64", "--report", str(rep), "--quiet"]) == 0
    data = load(rep)
    assert isinstance(data["data"]["family"]["H"][0][0][0], float)
    assert data["config"]["backend"] == "f64"


def test_failing_check_exits_1(two_node_file, monkeypatch, capsys):
    def broken(F, mu=None, n_top=None):
        rep = ResidualReport("orthogonality")
        rep.equal("orthogonality", 0, False)
        return rep

    monkeypatch.setattr(cli, "check_orthogonality", broken)
    assert cli.main(["polys", "--measure", two_node_file, "--n-max", "1"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_module_entry_point(two_node_file):
    proc = subprocess.run([sys.executable, "-m", "mcbop", "moments", "--measure", two_node_file, "--quiet"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().startswith("PASS")


def test_version(capsys):
    assert cli.main(["--version"]) == 0
    assert "mcbop" in capsys.readouterr().out
