import json
import math

import numpy as np
import pytest

from phaselimit import kphase_construction, make_state
from phaselimit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstants:
    def test_text_output(self, capsys):
        code, out, _ = run_cli(capsys, "constants")
        assert code == 0
        assert "k_A = 0.559304368351" in out
        assert "k_C = 1.376083543344" in out
        assert "z_A = -2.338107410460" in out

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--format", "json")
        data = json.loads(out)
        assert data["schema"] == "phaselimit/1"
        assert data["k_A"] == pytest.approx(math.sqrt(2 * math.pi / math.e**3), abs=1e-12)


class TestBounds:
    def test_inline_state(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--state", "[[1,0],[1,0]]")
        assert code == 0
        assert "VIOLATED" not in out

    def test_state_file(self, capsys, tmp_path):
        path = tmp_path / "state.json"
        path.write_text(json.dumps(make_state([1, 2, 1]).to_json()))
        code, out, _ = run_cli(capsys, "bounds", "--state", str(path), "--format", "json")
        data = json.loads(out)
        assert data["bound_report"]["all_satisfied"]

    def test_malformed_state_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "bounds", "--state", "not json")
        assert code == 1
        assert "error" in err


class TestOptimize:
    def test_basic(self, capsys):
        code, out, _ = run_cli(capsys, "optimize", "--mean", "0.5", "--dim", "2")
        data = json.loads(out)
        assert data["optimization"]["cost"] == pytest.approx(math.pi**2 / 3 - 2, abs=1e-9)

    def test_infeasible_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "optimize", "--mean", "10", "--dim", "4")
        assert code == 1


class TestCurve:
    def test_csv_columns_and_floor(self, capsys):
        code, out, _ = run_cli(capsys, "curve", "--kind", "surrogate", "--means", "0.5,1,2")
        lines = out.strip().splitlines()
        assert lines[0] == "mean,dim,lambda,cost,delta,product,tail_mass,residual,iterations"
        products = [float(line.split(",")[5]) for line in lines[1:]]
        assert all(p >= 1.376083 - 1e-6 for p in products)

    def test_deterministic_byte_identical(self, capsys, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            code, _, _ = run_cli(
                capsys, "curve", "--means", "0.5,1", "--seed", "7", "--out", str(p)
            )
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "curve", "--means", "1", "--format", "json", "--kind", "exact"
        )
        data = json.loads(out)
        assert data["rows"][0]["product"] >= 1.376083


class TestSimulate:
    def test_kphase_files(self, capsys, tmp_path):
        state, povm, _ = kphase_construction(4)
        spath = tmp_path / "state.json"
        ppath = tmp_path / "povm.json"
        spath.write_text(json.dumps(state.to_json()))
        ppath.write_text(json.dumps(povm.to_json()))
        code, out, _ = run_cli(
            capsys, "simulate", "--state", str(spath), "--povm", str(ppath)
        )
        assert code == 0
        data = json.loads(out)
        sim = data["simulation"]
        assert sim["mean_number"] == pytest.approx(1.5)
        assert sim["heisenberg_margin"] > 0

    def test_missing_povm_exits_1(self, capsys):
        code, _, _ = run_cli(capsys, "simulate", "--state", "[[1,0]]", "--povm", "/nope.json")
        assert code == 1


class TestDiscriminate:
    def test_k4(self, capsys):
        code, out, _ = run_cli(capsys, "discriminate", "--K", "4")
        data = json.loads(out)
        rep = data["discrimination"]
        assert rep["mean_number"] == 1.5
        assert rep["gram_identity_error"] < 1e-12
        assert np.allclose(rep["per_phase_variance"], 0, atol=1e-12)

    def test_invalid_k_exits_1(self, capsys):
        code, _, _ = run_cli(capsys, "discriminate", "--K", "0")
        assert code == 1
