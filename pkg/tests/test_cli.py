"""CLI: config validation, determinism, reports, CSV, exit codes."""

import csv
import json
import subprocess
import sys

import pytest

from zollforms.cli import (
    CSV_HEADER,
    EXIT_CHECK_FAILURE,
    EXIT_CONFIG_ERROR,
    EXIT_PASS,
    ConfigError,
    RunConfig,
    main,
    metric_from_spec,
    parse_metric_flag,
)


class TestConfig:
    def test_defaults(self):
        cfg = RunConfig.load(None, {})
        assert cfg.geodesics == 32 and cfg.grid == 2048

    def test_unknown_keys_rejected(self, tmp_path):
        bad = tmp_path / "cfg.json"
        bad.write_text(json.dumps({"metric": {"kind": "round"}, "bogus": 1}))
        with pytest.raises(ConfigError, match="bogus"):
            RunConfig.load(str(bad), {})

    def test_bad_grid_rejected(self):
        with pytest.raises(ConfigError, match="grid"):
            RunConfig.load(None, {"grid": 1000})

    def test_metric_specs(self):
        assert metric_from_spec({"kind": "round"}).is_round
        m = metric_from_spec({"kind": "zoll_revolution", "h_odd_coeffs": [0.1]})
        assert m.h_odd_coeffs == (0.1,)
        with pytest.raises(ConfigError):
            metric_from_spec({"kind": "zoll_revolution", "nope": 1})
        with pytest.raises(ConfigError):
            metric_from_spec({"kind": "flat"})

    def test_metric_flag(self):
        assert parse_metric_flag("round") == {"kind": "round"}
        assert parse_metric_flag("zoll:-0.3,0.3") == {
            "kind": "zoll_revolution", "h_odd_coeffs": [-0.3, 0.3]}
        with pytest.raises(ConfigError):
            parse_metric_flag("torus")


class TestConstantsCommand:
    def test_deterministic_output(self, tmp_path, capsys):
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(["constants", "--out", str(out_a)]) == EXIT_PASS
        assert main(["constants", "--out", str(out_b)]) == EXIT_PASS
        assert out_a.read_bytes() == out_b.read_bytes()
        text = capsys.readouterr().out
        assert '"g00_y2 (C1)": "(1)*tau"' in text
        assert "e2_zero" in text

    def test_report_values(self, tmp_path):
        out = tmp_path / "c.json"
        main(["constants", "--out", str(out)])
        data = json.loads(out.read_text())
        assert data["metric_jets"]["g00_y2 (C1)"] == "(1)*tau"
        assert "1/3" in data["metric_jets"]["g00_y3 (C2)"]
        assert data["assertions"]["e2_zero"] == "0"
        assert data["assertions"]["d0_zero"] == "0"


class TestVerifyCommand:
    def test_round_passes(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        code = main(["verify", "--metric", "round", "--geodesics", "3",
                     "--grid", "512", "--out", str(out)])
        assert code == EXIT_PASS
        report = json.loads(out.read_text())
        assert report["summary"]["failures"] == []
        assert len(report["geodesics"]) == 3

    def test_zoll_passes(self, tmp_path):
        out = tmp_path / "verify.json"
        code = main(["verify", "--metric", "zoll:-0.3,0.3", "--geodesics", "3",
                     "--grid", "512", "--out", str(out)])
        assert code == EXIT_PASS

    def test_negative_control_names_cube(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "metric": {"kind": "zoll_revolution",
                       "h_odd_coeffs": [0.05], "h_even_coeffs": [0.1]},
            "geodesics": 3, "grid": 512}))
        out = tmp_path / "verify.json"
        code = main(["verify", "--config", str(cfg), "--out", str(out)])
        assert code == EXIT_CHECK_FAILURE
        err = capsys.readouterr().err
        assert "check_cube" in err

    def test_config_error_exit_code(self, tmp_path):
        assert main(["verify", "--metric", "nonsense"]) == EXIT_CONFIG_ERROR


class TestInvariantsCommand:
    def test_round_run(self, tmp_path):
        out = tmp_path / "inv.json"
        csv_path = tmp_path / "inv.csv"
        code = main(["invariants", "--metric", "round", "--geodesics", "4",
                     "--grid", "512", "--seed", "1",
                     "--out", str(out), "--csv", str(csv_path)])
        assert code == EXIT_PASS
        report = json.loads(out.read_text())
        assert report["summary"]["c2_max"] < 1e-7
        assert report["summary"]["c0_spread"] < 1e-9
        with open(csv_path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == CSV_HEADER
        assert len(rows) == 1 + 4

    def test_determinism(self, tmp_path):
        outs = []
        for name in ("x.json", "y.json"):
            out = tmp_path / name
            main(["invariants", "--metric", "zoll:0.1", "--geodesics", "3",
                  "--grid", "512", "--seed", "9", "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_offdiagonal_summary(self, tmp_path):
        out = tmp_path / "inv.json"
        code = main(["invariants", "--metric", "zoll:-0.3,0.3", "--geodesics", "3",
                     "--grid", "512", "--out", str(out)])
        assert code == EXIT_PASS
        report = json.loads(out.read_text())
        assert report["summary"]["offdiag_max"] < 1e-6


class TestEntryPoint:
    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "zollforms.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "constants" in proc.stdout
