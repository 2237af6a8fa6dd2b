"""End-to-end tests for the command-line interface."""

import io
import json
import math
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from anisospec.cli import _parse_q_grid, canonical_json, main
from anisospec.errors import InputError

SQUARE = '{"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]}'
DISC = '{"kind": "ellipsoid", "semi_axes": [1, 1]}'
ELLIPSE = '{"kind": "ellipsoid", "semi_axes": [2, 1]}'
AXIS_SEMINORM = '{"kind": "rank1", "eta": [0, 1]}'
EUCLID = '{"kind": "quadratic", "alphas": [1, 1]}'


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class TestCanonicalJson:
    def test_sorted_keys_and_float_format(self):
        text = canonical_json({"b": 1.0, "a": [True, None, 2]})
        assert text == '{"a": [true, null, 2], "b": 1.000000000000e+00}\n'

    def test_round_trip_fixed_point(self):
        obj = {"x": math.pi, "y": [1e-300, 2.5e300, -0.125], "n": 7, "s": "text"}
        text = canonical_json(obj)
        assert canonical_json(json.loads(text)) == text

    def test_rejects_nonfinite(self):
        with pytest.raises(InputError):
            canonical_json({"x": math.inf})


class TestParseQGrid:
    def test_inclusive_endpoint(self):
        assert _parse_q_grid("0.5:1.5:0.5") == pytest.approx([0.5, 1.0, 1.5])
        # accumulated float error must not drop the endpoint
        qs = _parse_q_grid("0.1:0.7:0.1")
        assert len(qs) == 7
        assert qs[-1] == pytest.approx(0.7)

    def test_rejects_malformed(self):
        for bad in ("1:2", "1:2:0", "2:1:0.5", "a:b:c", "1:2:-1"):
            with pytest.raises(InputError):
                _parse_q_grid(bad)


class TestEval:
    def test_square_axis_direction(self):
        code, out, _ = run_cli(
            ["eval", "--domain", SQUARE, "--seminorm", AXIS_SEMINORM, "--q", "1"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["command"] == "eval"
        assert report["value"] == pytest.approx(math.pi**2 / 12.0, rel=1e-10)
        assert report["lambda_provenance"] == "slicing"
        assert report["seminorm"]["kind"] == "rank1"
        assert report["domain"]["kind"] == "polygon"

    def test_output_round_trips(self):
        code, out, _ = run_cli(
            ["eval", "--domain", DISC, "--seminorm", AXIS_SEMINORM, "--q", "0.5"]
        )
        assert code == 0
        assert canonical_json(json.loads(out)) == out

    def test_deterministic_bytes(self):
        argv = ["eval", "--domain", ELLIPSE, "--seminorm", EUCLID, "--q", "1", "--h", "0.15"]
        _, first, _ = run_cli(argv)
        _, second, _ = run_cli(argv)
        assert first == second

    def test_missing_q_exits_2(self):
        code, _, err = run_cli(["eval", "--domain", SQUARE, "--seminorm", AXIS_SEMINORM])
        assert code == 2
        assert "--q" in err

    def test_malformed_json_exits_2(self):
        code, _, err = run_cli(
            ["eval", "--domain", "{broken", "--seminorm", AXIS_SEMINORM, "--q", "1"]
        )
        assert code == 2
        assert "eval" in err

    def test_missing_file_exits_2(self):
        code, _, err = run_cli(
            ["eval", "--domain", "no_such_file.json", "--seminorm", AXIS_SEMINORM, "--q", "1"]
        )
        assert code == 2
        assert "no_such_file.json" in err

    def test_zero_seminorm_exits_2(self):
        code, _, err = run_cli(
            ["eval", "--domain", DISC, "--seminorm", '{"kind": "quadratic", "alphas": [0, 0]}', "--q", "1"]
        )
        assert code == 2
        assert "zero seminorm" in err

    def test_unmeshable_request_exits_3(self):
        # h = 2 on the unit square leaves no interior nodes for the FEM route
        code, _, err = run_cli(
            [
                "eval",
                "--domain", SQUARE,
                "--seminorm", '{"kind": "quadratic", "alphas": [1, 0.5]}',
                "--q", "1",
                "--h", "2.0",
            ]
        )
        assert code == 3
        assert "interior" in err

    def test_csv_format_rejected(self):
        code, _, err = run_cli(
            ["eval", "--domain", SQUARE, "--seminorm", AXIS_SEMINORM, "--q", "1", "--format", "csv"]
        )
        assert code == 2
        assert "JSON" in err

    def test_bad_subcommand_flag_raises_system_exit(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["optimize", "--domain", SQUARE, "--q", "1", "--mode", "avg"])
        assert exc.value.code == 2


class TestOptimize:
    def test_rank1_ellipse(self):
        code, out, _ = run_cli(
            ["optimize", "--domain", ELLIPSE, "--q", "0.5", "--class", "rank1"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["seminorm_class"] == "rank1"
        assert report["alpha"] is None
        assert report["boundary_flag"] is True
        assert report["value"] == pytest.approx(
            math.pi**2 * math.sqrt(2.0 * math.pi) / 16.0, rel=1e-9
        )
        assert report["theta"] == pytest.approx(0.0, abs=1e-5)
        assert report["evaluations"] > 180
        assert canonical_json(json.loads(out)) == out

    def test_out_file_matches_stdout(self, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(
            ["optimize", "--domain", ELLIPSE, "--q", "0.5", "--class", "rank1", "--out", str(path)]
        )
        assert code == 0
        assert path.read_text() == out


class TestSweep:
    def test_rank1_csv_table(self):
        code, out, _ = run_cli(
            ["sweep", "--domain", ELLIPSE, "--q-grid", "0.25:0.75:0.25", "--class", "rank1"]
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "q,theta,alpha,value,boundary_flag"
        assert len(lines) == 4
        for line, q in zip(lines[1:], (0.25, 0.5, 0.75)):
            parts = line.split(",")
            assert len(parts) == 5
            assert float(parts[0]) == pytest.approx(q)
            assert parts[2] == ""  # rank-1 reports carry no alpha
            assert parts[4] == "true"
            float(parts[1]), float(parts[3])

    def test_json_round_trip(self):
        code, out, _ = run_cli(
            [
                "sweep",
                "--domain", ELLIPSE,
                "--q-grid", "0.25:0.5:0.25",
                "--class", "rank1",
                "--format", "json",
            ]
        )
        assert code == 0
        assert canonical_json(json.loads(out)) == out
        report = json.loads(out)
        assert report["threshold_bracket"] is None
        assert [r["q"] for r in report["reports"]] == pytest.approx([0.25, 0.5])

    def test_requires_grid(self):
        code, _, err = run_cli(["sweep", "--domain", ELLIPSE])
        assert code == 2
        assert "--q-grid" in err


class TestBounds:
    def test_square_report(self):
        code, out, _ = run_cli(["bounds", "--domain", SQUARE, "--seminorm", AXIS_SEMINORM])
        assert code == 0
        report = json.loads(out)
        names = [c["name"] for c in report["checks"]]
        assert names == ["product_measure_upper", "rank1_upper", "convex_lower"]
        assert all(c["satisfied"] for c in report["checks"])
        assert report["product"] == pytest.approx(math.pi**2 / 12.0, rel=1e-10)
        assert report["lambda_provenance"] == "slicing"
        assert canonical_json(json.loads(out)) == out


class TestReproduce:
    def test_all_rows_pass(self):
        code, out, _ = run_cli(["reproduce"])
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 20
        assert all(line.endswith(" PASS") for line in lines)
        assert lines[0] == "triangle v=(0,1) T: computed 0.02083333 expected 1/48 PASS"

    def test_writes_out_file(self, tmp_path):
        path = tmp_path / "table.txt"
        code, out, _ = run_cli(["reproduce", "--out", str(path)])
        assert code == 0
        assert path.read_text() == out


class TestKjDemo:
    def test_strictly_decreasing(self):
        code, out, _ = run_cli(["kj-demo", "--d", "2", "--k", "1", "--q", "0.5", "--n", "1,10,100"])
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "n,value"
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert len(values) == 3
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[0] == pytest.approx(math.pi**2 / (4.0 * math.sqrt(3.0)), rel=1e-12)

    def test_json_format(self):
        code, out, _ = run_cli(["kj-demo", "--n", "2,4", "--format", "json"])
        assert code == 0
        report = json.loads(out)
        assert [r["n"] for r in report["rows"]] == [2, 4]
        assert canonical_json(json.loads(out)) == out

    def test_rejects_bad_n(self):
        for bad in ("0,5", "a,b", ""):
            code, _, _ = run_cli(["kj-demo", "--n", bad])
            assert code == 2


class TestSpecFile:
    def test_flags_from_file(self, tmp_path):
        spec = {
            "command": "eval",
            "domain": json.loads(SQUARE),
            "seminorm": json.loads(AXIS_SEMINORM),
            "q": 1.0,
        }
        path = tmp_path / "run.json"
        path.write_text(json.dumps(spec))
        code, out, _ = run_cli(["eval", "--spec", str(path)])
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(math.pi**2 / 12.0, rel=1e-10)

    def test_explicit_flag_wins(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"domain": json.loads(SQUARE), "seminorm": json.loads(AXIS_SEMINORM), "q": 1.0}))
        code, out, _ = run_cli(["eval", "--spec", str(path), "--q", "0"])
        assert code == 0
        assert json.loads(out)["q"] == 0.0

    def test_command_mismatch_exits_2(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"command": "bounds"}))
        code, _, err = run_cli(["eval", "--spec", str(path)])
        assert code == 2
        assert "bounds" in err

    def test_unknown_field_exits_2(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"tolerance": 1e-3}))
        code, _, err = run_cli(["eval", "--spec", str(path)])
        assert code == 2
        assert "tolerance" in err


def test_console_script_installed():
    proc = subprocess.run(
        ["anisospec", "reproduce"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("PASS") == 20
