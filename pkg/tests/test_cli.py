import json
import subprocess
import sys

import pytest

from wiretap_ot.cli import EXIT_CONFIG, EXIT_OK, EXIT_PROPERTY, EXIT_RESOURCE, main


def data_lines(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_capacity_point(capsys):
    assert main(["capacity", "--eps1", "0.5", "--eps2", "0.5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert '# artifact_version: "' in out
    header, row = data_lines(out)
    assert dict(zip(header.split(","), row.split(",")))["c2p"] == "0.25"


def test_capacity_grid(tmp_path):
    path = tmp_path / "grid.csv"
    assert main(["capacity", "--grid", "0.05", "--output", str(path)]) == EXIT_OK
    assert len(data_lines(path.read_text())) == 1 + 19 * 19


def test_capacity_json_region_and_plots(tmp_path):
    out = tmp_path / "c.json"
    args = ["capacity", "--eps1", "0.4", "--eps2", "0.7", "--region", "--format", "json", "--output", str(out),
            "--plot", str(tmp_path / "c.png"), "--region-plot", str(tmp_path / "r.svg")]
    assert main(args) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["rows"][0]["inner_vertices"][1] == [pytest.approx(0.28), 0.0]
    assert (tmp_path / "c.png").stat().st_size > 0
    first = (tmp_path / "r.svg").read_bytes()
    assert main(args) == EXIT_OK
    assert (tmp_path / "r.svg").read_bytes() == first


def test_simulate_config_and_overrides(tmp_path):
    cfg = {"variant": "c2p", "eps1": 0.5, "eps2": {"start": 0.4, "stop": 0.5, "step": 0.1},
           "rate_fraction": 0.5, "n": [2000], "trials": 3, "master_seed": 5, "format": "csv"}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "s.csv"
    raw = tmp_path / "raw.csv"
    assert main(["simulate", "--config", str(path), "--trials", "4", "--output", str(out),
                 "--raw-output", str(raw)]) == EXIT_OK
    text = out.read_text()
    assert '"trials": 4' in text and "# master_seed: 5" in text
    rows = data_lines(text)
    assert len(rows) == 3 and rows[0].startswith("variant,n,eps1,eps2,rate,trials")
    assert len(data_lines(raw.read_text())) == 1 + 2 * 4


def test_simulate_is_byte_identical(tmp_path):
    args = ["simulate", "--variant", "mal_le_half", "--eps1", "0.4", "--eps2", "0.5", "--r", "0.06", "--n", "3000",
            "--trials", "3", "--seed", "8", "--attack", "bob_swap", "--attack-strength", "300", "--format", "json"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--output", str(a)]) == EXIT_OK
    assert main(args + ["--output", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    row = json.loads(a.read_text())["rows"][0]
    assert row["detection_rate"] == 1.0 and row["correct_rate"] is None


@pytest.mark.parametrize("args", [
    ["simulate", "--variant", "c2p", "--eps1", "0.5", "--eps2", "0.5", "--rate-fraction", "0.5", "--n", "2000"],
    ["simulate", "--variant", "c2p", "--eps1", "0.5", "--eps2", "0.5", "--n", "2000", "--seed", "1"],
    ["simulate", "--variant", "c2p", "--eps1", "0.5", "--eps2", "0.5", "--r", "0.3", "--n", "2000", "--seed", "1"],
    ["simulate", "--variant", "c2p", "--eps1", "0.5", "--eps2", "0.5", "--r", "0.1", "--n", "2000", "--seed", "1",
     "--attack", "bob_pack"],
    ["capacity", "--eps1", "1.5", "--eps2", "0.5"],
    ["capacity", "--eps1", "0.5"],
    ["ih-check", "--k-max", "6"],
])
def test_invalid_config_exit_code(args):
    assert main(args) == EXIT_CONFIG


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["capacity", "--bogus"])
    assert err.value.code == 2


def test_unknown_config_key(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"variant": "c2p", "colour": "red"}))
    assert main(["simulate", "--config", str(path)]) == EXIT_CONFIG


def test_oracle_budget_exit_code(capsys):
    assert main(["oracle", "--n", "16"]) == EXIT_RESOURCE
    assert "exceeds the budget" in capsys.readouterr().err


def test_unwritable_output_exit_code(tmp_path):
    target = tmp_path / "missing" / "x.csv"
    assert main(["capacity", "--eps1", "0.5", "--eps2", "0.5", "--output", str(target)]) == EXIT_RESOURCE


def test_oracle_json(tmp_path):
    out = tmp_path / "o.json"
    assert main(["oracle", "--variant", "c2p", "--family", "surjective", "--output", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())["report"]
    assert rep["family_label"].startswith("restricted-family")
    assert rep["p_abort"] == pytest.approx(0.21875)


def test_ih_check(capsys):
    code = main(["ih-check", "--k-max", "2", "--p5-k", "6", "--trials", "200"])
    out = capsys.readouterr().out
    assert code == EXIT_OK and out.startswith("PASS")


def test_ih_check_failure_exit_code(monkeypatch):
    from wiretap_ot import cli
    from wiretap_ot.interactive_hashing import PropertyResult

    monkeypatch.setattr(cli, "property_report", lambda *a, **k: [PropertyResult("P1", False, "forced")])
    assert main(["ih-check"]) == EXIT_PROPERTY


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wiretap_ot", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("wiretap-ot ")
