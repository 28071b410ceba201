#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CLI 테스트 - 명령별 출력 파일, 종료 코드(0/1/2/3), 허용 N 메시지
"""

import json
import os
import shutil

import numpy as np
import pytest

import experiments
import maximal_ops
from file_processor import DEFAULT_CALIBRATION_PATH, ResultFileProcessor
from maximal_cli import main, parse_grid, parse_range
from errors import ConfigurationError
from torus_grid import GridFunction, make_grid


@pytest.fixture
def workspace(tmp_path):
    processor = ResultFileProcessor(str(tmp_path / "inputs"))
    return processor, str(tmp_path / "out")


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


def domination_only(self):
    return [("지배 사슬", False, lambda: (experiments.check_domination(3, self.seed, self.domination_grid), []))]


def test_parse_helpers():
    assert parse_grid("16,1024") == make_grid(16, 1024)
    assert parse_range("2..5", (1, 1), "n_range") == [2, 3, 4, 5]
    assert parse_range(None, (2, 4), "n_range") == [2, 3, 4]
    with pytest.raises(ConfigurationError):
        parse_grid("16")
    with pytest.raises(ConfigurationError):
        parse_range("5..2", (1, 1), "n_range")


def test_compute_sharp_of_constant_is_zero(workspace):
    processor, out = workspace
    grid = make_grid(2, 64)
    path = processor.write_grid_function(GridFunction.constant(grid, 3.0), processor.path_for("const.txt"))
    assert main(["compute", path, "--operator", "sharp", "--out", out]) == 0

    output = os.path.join(out, "const_sharp.txt")
    result = processor.read_grid_function(output)
    assert result.grid == grid
    assert np.all(result.samples == 0.0)
    with open(os.path.join(out, "const_sharp.json"), encoding="utf-8") as handle:
        assert json.load(handle)["operator"] == "sharp"


def test_compute_diamond_with_all_radii(workspace):
    processor, out = workspace
    grid = make_grid(2, 64)
    values = np.where(grid.abscissas() >= 0, 1.0, -0.5)
    path = processor.write_grid_function(GridFunction.from_samples(grid, values), processor.path_for("step.txt"))
    assert main(["compute", path, "--operator", "diamond", "--radii", "all", "--out", out]) == 0

    expected = np.zeros(64)
    for i in range(64):
        for k in range(1, 17):
            total = sum(np.sign(l) * values[(i + l) % 64] for l in range(-k, k + 1))
            expected[i] = max(expected[i], abs(total) / (2 * k + 1))
    result = processor.read_grid_function(os.path.join(out, "step_diamond.txt"))
    np.testing.assert_allclose(result.samples, expected, rtol=0, atol=1e-12)


def test_input_and_radius_errors(workspace, tmp_path, capsys):
    processor, out = workspace
    bad = tmp_path / "bad.txt"
    bad.write_text("period=2 size=16\n0.0 1.0\n", encoding="utf-8")
    assert main(["compute", str(bad), "--out", out]) == 2
    assert "line 1" in capsys.readouterr().err

    path = processor.write_grid_function(GridFunction.zeros(make_grid(16, 1024)), processor.path_for("zero.txt"))
    assert main(["compute", path, "--radii", "300", "--out", out]) == 3
    assert "cap" in capsys.readouterr().err

    assert main(["bnorm", str(tmp_path / "missing.txt"), "--out", out]) == 2


def test_compute_rejects_non_finite_samples(workspace, capsys):
    processor, out = workspace
    grid = make_grid(2, 64)
    path = processor.write_grid_function(GridFunction.from_function(grid, np.cos), processor.path_for("cos.txt"))
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    lines[10] = lines[10].split()[0] + " nan"
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    assert main(["compute", path, "--operator", "hl", "--out", out]) == 2
    assert "line 11: non-finite value" in capsys.readouterr().err
    assert not os.path.exists(os.path.join(out, "cos_hl.txt"))


def test_bnorm_prints_record(workspace, capsys):
    processor, out = workspace
    f = GridFunction.from_function(make_grid(16, 1024), lambda x: np.exp(2j * np.pi * 3 * x))
    path = processor.write_grid_function(f, processor.path_for("mode3.txt"))
    assert main(["bnorm", path, "--out", out]) == 0
    record = json_lines(capsys.readouterr().out)[-1]
    assert record["grid"] == "16,1024"
    assert record["besov_part"] == pytest.approx(0.5, abs=1e-12)
    assert record["l2_part"] == pytest.approx(4.0, abs=1e-12)


def test_scan_ratio_admissibility(workspace, capsys):
    processor, out = workspace
    code = main(["scan", "ratio", "--grid", "16,1024", "--n-range", "2..30", "--out", out])
    assert code == 3
    assert "max admissible N = 3" in capsys.readouterr().err

    assert main(["scan", "ratio", "--grid", "16,1024", "--n-range", "2..3", "--out", out]) == 0
    meta, frame = processor.read_scan_table(os.path.join(out, "ratio.csv"))
    assert meta["grid"] == "16,1024"
    assert meta["profile"] == "custom"
    assert meta["n_range"] == "2..3"
    assert meta["calibration"].startswith("sharp_min_ratio_floor:0.386,")
    assert list(frame["N"]) == [2, 3]


def test_scan_kernel_decay_echoes_flags(workspace):
    processor, out = workspace
    argv = ["scan", "kernel-decay", "--grid", "16,4096", "--j-range", "1..3", "--k-min", "8", "--kernel", "odd_bump",
            "--out", out]
    assert main(argv) == 0
    meta, frame = processor.read_scan_table(os.path.join(out, "kernel-decay-odd_bump.csv"))
    assert (meta["j_range"], meta["k_min"], meta["kernel"]) == ("1..3", "8", "odd_bump")
    assert "calibration" not in meta
    assert sorted(frame["j"].unique()) == [1, 2, 3]
    assert frame["k"].min() == 8


def test_scan_lp_facts(workspace):
    processor, out = workspace
    assert main(["scan", "lp-facts", "--grid", "16,1024", "--workers", "2", "--out", out]) == 0
    _, frame = processor.read_scan_table(os.path.join(out, "lp-facts.csv"))
    assert list(frame["j"]) == [1, 2, 3]


def test_describe(capsys, tmp_path):
    assert main(["describe", "--profile", "reference", "--n", "13", "--out", str(tmp_path)]) == 0
    record = json_lines(capsys.readouterr().out)[-1]
    assert record["max_admissible_N"] == 13
    assert record["construction"]["m_N"] == 3

    assert main(["describe", "--grid", "16,1024", "--n", "9", "--out", str(tmp_path)]) == 3


def test_verify_rejects_tampered_calibration(tmp_path):
    path = tmp_path / "calibration.txt"
    shutil.copy(DEFAULT_CALIBRATION_PATH, path)
    path.write_text(path.read_text(encoding="utf-8").replace("diamond_ratio = 0.9255", "diamond_ratio = 99"),
                    encoding="utf-8")
    assert main(["verify", "--calibration", str(path), "--out", str(tmp_path / "out")]) == 2


def test_verify_passes_and_persists(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(experiments.VerificationSuite, "stages", domination_only)
    out = str(tmp_path / "out")
    assert main(["verify", "--profile", "quick", "--out", out]) == 0
    assert "[PASS] domination_diamond_le_sharp" in capsys.readouterr().out
    with open(os.path.join(out, "checks.jsonl"), encoding="utf-8") as handle:
        assert [json.loads(line)["status"] for line in handle] == ["pass", "pass"]
    assert os.path.exists(os.path.join(out, "summary.xlsx"))


def test_verify_fails_on_injected_sign_bug(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(experiments.VerificationSuite, "stages", domination_only)
    monkeypatch.setattr(maximal_ops, "diamond_maximal", lambda f, radii: maximal_ops.hardy_littlewood(f, radii))
    assert main(["verify", "--out", str(tmp_path / "out")]) == 1
    assert "[FAIL] domination_diamond_le_sharp" in capsys.readouterr().out


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
