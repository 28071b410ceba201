#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
실험 모듈 테스트 - 보정 파일, 지배 사슬 검증과 변이 주입, 스펙트럴 대수, 스캔 테이블 구조
"""

import math
import shutil

import numpy as np
import pandas as pd
import pytest

import experiments
import maximal_ops
from errors import AdmissibilityError, ConfigurationError
from experiments import (
    DILATION_RESAMPLE_TOLERANCE,
    KERNEL_LARGE_SLOPE,
    KERNEL_SMALL_SLOPE,
    PROFILES,
    Calibration,
    CheckReport,
    ScanTable,
    VerificationSuite,
    adversarial_functions,
    check_domination,
    corpus_frequency_limit,
    diamond_boundedness_check,
    diamond_ratios,
    dilation_lemma_check,
    get_profile,
    glambda_scan,
    kernel_decay_scan,
    lacunary_l1_oracle,
    lacunary_l1_scan,
    lambda_grid,
    loglog_slope,
    lp_kernel_facts,
    measure_dilation,
    mollifier_ratios,
    oracle_equivalence_check,
    parallel_rows,
    projection_algebra_check,
    random_band_limited,
    ratio_checks,
    ratio_scan,
    run_suite,
    tk_star_bound_scan,
)
from file_processor import DEFAULT_CALIBRATION_PATH, ResultFileProcessor
from maximal_ops import box_kernel, diamond_kernel, odd_bump_kernel
from torus_grid import RadiiSet, make_grid, spectral_residual

DOMINATION_GRID = make_grid(16, 1024)


@pytest.fixture(scope="module")
def calibration():
    return Calibration.load()


def test_shipped_calibration_loads(calibration):
    assert calibration.C_rho > 0
    assert calibration.fN_B_min < calibration.fN_B_max
    assert set(calibration.as_dict()) == {
        "C_rho", "C_plus", "C_minus", "glambda_ratio", "glambda_low_bound", "kernel_decay_ratio",
        "diamond_ratio", "sharp_min_ratio_floor", "fN_B_min", "fN_B_max",
    }


def test_tampered_calibration_is_rejected(tmp_path):
    path = tmp_path / "calibration.txt"
    shutil.copy(DEFAULT_CALIBRATION_PATH, path)
    path.write_text(path.read_text(encoding="utf-8").replace("C_rho = 0.1419", "C_rho = 1.419"), encoding="utf-8")
    with pytest.raises(ConfigurationError):
        Calibration.load(str(path))
    with pytest.raises(ConfigurationError):
        VerificationSuite("quick", calibration_path=str(path))
    with pytest.raises(ConfigurationError, match="missing"):
        Calibration.from_mapping({"C_rho": 1.0})


def test_profiles():
    assert get_profile("reference").grid == make_grid(16, 2 ** 20)
    assert get_profile("quick").n_range == (2, 7)
    assert set(PROFILES) == {"quick", "reference", "large"}
    with pytest.raises(ConfigurationError):
        get_profile("huge")


def test_check_report_status_follows_comparison():
    assert CheckReport.upper("x", 1.0, 1.0, "a", "c").passed
    assert not CheckReport.upper("x", float("nan"), 1.0, "a", "c").passed
    assert CheckReport.lower("x", 2.0, 1.0, "a", "c").passed
    assert "[FAIL]" in CheckReport.lower("x", 0.5, 1.0, "a", "c").summary_line()


def test_random_corpus_is_band_limited_and_normalised():
    corpus = random_band_limited(DOMINATION_GRID, 4, seed=42)
    again = random_band_limited(DOMINATION_GRID, 4, seed=42)
    limit = corpus_frequency_limit(DOMINATION_GRID)
    assert limit == 64
    for f, g in zip(corpus, again):
        assert f.is_real
        assert np.max(np.abs(f.samples)) == pytest.approx(1.0)
        np.testing.assert_array_equal(f.samples, g.samples)
        assert spectral_residual(f, limit) <= 1e-12


def test_domination_check_passes():
    reports = check_domination(10, seed=42, grid=DOMINATION_GRID)
    assert [r.name for r in reports] == ["domination_diamond_le_sharp", "domination_sharp_le_2hl"]
    assert all(r.passed for r in reports)
    assert all("grid=16,1024" in r.context and "cap L/4" in r.context for r in reports)


def test_domination_check_catches_sign_bug(monkeypatch):
    def unsigned_window(f, radii):
        # sign(l) 를 빠뜨린 창 합 = |f| 평균
        return maximal_ops.hardy_littlewood(f, radii)

    monkeypatch.setattr(maximal_ops, "diamond_maximal", unsigned_window)
    reports = check_domination(3, seed=42, grid=DOMINATION_GRID)
    assert not reports[0].passed


def test_adversarial_functions_cover_constant_and_steps():
    functions = adversarial_functions(DOMINATION_GRID)
    assert len(functions) == 6
    assert np.ptp(functions[0].samples) == 0.0


def test_oracle_equivalence():
    reports = oracle_equivalence_check(seed=7, count=2)
    assert all(r.passed for r in reports), [r.summary_line() for r in reports]


def test_projection_algebra():
    corpus = random_band_limited(DOMINATION_GRID, 3, seed=1)
    reports = projection_algebra_check(corpus)
    assert all(r.passed for r in reports), [r.summary_line() for r in reports]


def test_dilation_commutes_with_same_period_resampling(calibration):
    corpus = random_band_limited(DOMINATION_GRID, 2, seed=3)
    measured = measure_dilation(corpus, range(0, 4))
    assert measured.commutation_residual <= DILATION_RESAMPLE_TOLERANCE
    assert measured.plus_ratio >= 1.0
    reports = dilation_lemma_check(corpus, range(0, 4), calibration)
    assert reports[0].name == "dilation_commutation"
    assert reports[0].passed
    assert all("cap L/4" in report.context for report in reports)


def test_dilation_commutation_catches_grid_dependent_radii(monkeypatch):
    def length_scaled_hl(f, radii):
        # 반지름을 인덱스 대신 고정 길이로 해석하는 변이
        factor = f.grid.size // DOMINATION_GRID.size
        return maximal_ops.hardy_littlewood(f, RadiiSet.explicit([k * factor for k in radii.indices]))

    monkeypatch.setattr(experiments, "hardy_littlewood", length_scaled_hl)
    corpus = random_band_limited(DOMINATION_GRID, 1, seed=3)
    measured = measure_dilation(corpus, range(0, 2))
    assert measured.commutation_residual > 1e-3


def test_dilation_skips_contraction_outside_band():
    grid = make_grid(16, 256)
    corpus = random_band_limited(grid, 1, seed=3)
    # 대역 상한 가까이의 성분은 m = -3 축소에서 건너뛰고 메모를 남긴다
    noisy = corpus[0] + np.cos(2 * np.pi * 100 * grid.abscissas() / grid.period)
    measured = measure_dilation([noisy], range(0, 2))
    assert any("m=-1" in note for note in measured.notes)


def test_diamond_boundedness_report(calibration):
    corpus = random_band_limited(DOMINATION_GRID, 3, seed=5)
    report = diamond_boundedness_check(corpus, calibration)[0]
    assert report.name == "diamond_bounded_on_corpus"
    assert report.bound == calibration.diamond_ratio
    assert 0.0 < report.observed < math.inf


def test_lp_kernel_facts_table():
    table = lp_kernel_facts(DOMINATION_GRID)
    assert list(table.frame["j"]) == list(range(1, DOMINATION_GRID.j_max))
    assert (table.frame["h_mean_residual"] <= 1e-12).all()
    assert (table.frame["h_l1"] >= 1.0 - 1e-12).all()
    assert table.header_line().startswith("# name=lp-facts grid=16,1024")


def test_kernel_decay_scan_shape():
    grid = make_grid(16, 2 ** 14)
    table = kernel_decay_scan(diamond_kernel(), grid, range(1, 8), k_min=2, workers=2)
    frame = table.frame
    assert set(frame.columns) == {"j", "k", "r", "s", "lhs", "bound", "ratio"}
    np.testing.assert_allclose(frame["s"], 2.0 ** frame["j"] * frame["r"])
    assert KERNEL_SMALL_SLOPE[0] <= table.footer["slope_small"] <= KERNEL_SMALL_SLOPE[1]
    assert table.footer["slope_small_j"] == 1.0
    assert KERNEL_LARGE_SLOPE[0] <= table.footer["slope_large"] <= KERNEL_LARGE_SLOPE[1]
    assert not table.notes
    # s -> 0 에서 lhs -> 0
    first_band = frame[frame["j"] == 1].sort_values("r")
    assert first_band["lhs"].iloc[0] < first_band["lhs"].iloc[3]
    with pytest.raises(ConfigurationError):
        kernel_decay_scan(box_kernel(), grid)


def test_kernel_decay_scan_is_schedule_independent():
    grid = make_grid(16, 4096)
    one = kernel_decay_scan(odd_bump_kernel(), grid, range(1, 5), k_min=8, workers=1)
    many = kernel_decay_scan(odd_bump_kernel(), grid, range(1, 5), k_min=8, workers=4)
    assert one.frame.equals(many.frame)


def test_glambda_scan():
    grid = make_grid(16, 4096)
    lambdas = lambda_grid(5.0, grid)
    assert lambdas[0] == 2.0 and lambdas[-1] == 32.0
    table = glambda_scan(lambdas, range(1, grid.j_max + 1), grid)
    assert set(table.frame["kind"]) == {"band", "low"}
    assert table.footer["max_band_ratio"] > 0.0
    assert np.isfinite(table.footer["max_low_ratio_lambda_ge_4"])
    assert (table.frame.loc[table.frame["kind"] == "low", "j"] == 0).all()


def test_lacunary_oracle_and_scan():
    assert lacunary_l1_oracle(1) == pytest.approx(2 / math.pi, abs=1e-9)
    grid = make_grid(16, 4096)
    table = lacunary_l1_scan(grid, range(1, 7))
    assert list(table.frame["N"]) == [1, 2, 3, 4, 5]
    assert any("max admissible N = 5" in note for note in table.notes)
    checked = table.frame.dropna(subset=["oracle"])
    assert (checked["oracle_rel_diff"] <= checked["oracle_tolerance"]).all()
    sized = table.frame[table.frame["N"] >= 2]
    assert sized["ratio"].between(0.45, 0.80).all()


def test_ratio_scan_columns_and_admissibility():
    table = ratio_scan(range(2, 6), DOMINATION_GRID)
    assert list(table.frame["N"]) == [2, 3]
    assert list(table.frame.columns) == [
        "N", "m_N", "unit_l1", "unit_l1_ratio", "FN_besov", "FN_l2", "sharp_min", "sharp_min_ratio",
        "sharp_FN_besov", "fN_B", "sharp_fN_B", "diamond_fN_B", "R_sharp", "R_diamond", "predicted",
    ]
    assert table.notes
    assert (table.frame["fN_B"] > 0).all()
    assert table.meta["cap"] == "r<=4"
    with pytest.raises(AdmissibilityError, match="max admissible N = 3"):
        ratio_scan(range(2, 6), DOMINATION_GRID, strict=True)


def test_reference_thresholds_accept_the_reference_ratio_scan(calibration):
    # 기준 격자 (16, 2^20) 실측: R♯ = 1.155, 1.330, 1.398, ‖M♯F_N‖ 기울기 0.3513
    N = np.array([4, 8, 13])
    frame = pd.DataFrame({
        "N": N,
        "FN_besov": [2.0, 2.1, 2.2],
        "sharp_min_ratio": [0.58, 0.60, 0.62],
        "sharp_FN_besov": 2.0 * N ** 0.3513,
        "fN_B": [2.69, 2.9, 3.15],
        "R_sharp": [1.155, 1.330, 1.398],
        "R_diamond": [0.60, 0.61, 0.617],
        "predicted": np.sqrt(N) / (np.log2(N) + 1.0),
    })
    reports = {report.name: report for report in
               ratio_checks(ScanTable("ratio", frame), make_grid(16, 2 ** 20), calibration, get_profile("reference"))}
    assert reports["sharp_ratio_growth"].status == "pass"
    assert "predicted_growth=1.151" in reports["sharp_ratio_growth"].context
    assert reports["sharp_besov_slope_min"].status == "pass"
    assert reports["sharp_besov_slope_max"].status == "pass"
    assert reports["sharp_min_lower_bound"].status == "pass"
    assert reports["fN_B_min"].status == "pass" and reports["fN_B_max"].status == "pass"


def test_tk_star_bound_scan():
    corpus = random_band_limited(DOMINATION_GRID, 2, seed=9)
    table = tk_star_bound_scan([diamond_kernel(), odd_bump_kernel()], corpus, DOMINATION_GRID, [2, 3])
    assert len(table.frame) == 2 * 4
    assert (table.frame["ratio"] > 0).all()
    assert set(table.footer) == {"max_ratio_diamond", "max_ratio_odd_bump"}


def test_parallel_rows_sorted_by_key():
    assert parallel_rows(lambda k: k * k, [3, 1, 2], workers=3) == [1, 4, 9]


def test_loglog_slope():
    assert loglog_slope([1, 2, 4, 8], [3, 6, 12, 24]) == pytest.approx(1.0)
    assert math.isnan(loglog_slope([1], [1]))


def test_shipped_calibration_tracks_fresh_quick_measurements(calibration):
    quick = get_profile("quick")
    grid = quick.grid
    glambda = glambda_scan(lambda_grid(quick.lambda_exponent_max, grid), range(1, quick.glambda_j_max + 1), grid)
    measured = {
        "C_rho": max(mollifier_ratios(random_band_limited(grid, quick.corpus_size, 42))),
        "glambda_ratio": glambda.footer["max_band_ratio"],
        "glambda_low_bound": glambda.footer["max_low_ratio_lambda_ge_4"],
        "diamond_ratio": max(diamond_ratios(random_band_limited(quick.domination_grid,
                                                                quick.dilation_corpus_size, 42))),
    }
    stored = calibration.as_dict()
    for key, value in measured.items():
        # 측정값 x1.5 로 저장되므로 새 측정값은 저장값 아래, 너무 멀지 않은 곳에 있어야 한다
        assert stored[key] / 3.0 <= value <= stored[key], key


def test_quick_suite_passes_end_to_end(tmp_path):
    result = run_suite("quick", processor=ResultFileProcessor(str(tmp_path / "out")))
    failures = [report.summary_line() for report in result.reports if not report.passed]
    assert not result.incomplete, result.notes
    assert result.passed, failures
    assert all("cap L/4" in report.context for report in result.reports)
    tables = {table.name: table for table in result.tables}
    assert tables["kernel-decay-diamond"].meta["calibration"].startswith("kernel_decay_ratio:")
    assert tables["ratio"].meta["calibration"].startswith("sharp_min_ratio_floor:")


def test_suite_flags_incomplete_when_memory_is_short(monkeypatch):
    suite = VerificationSuite("quick")
    monkeypatch.setattr(VerificationSuite, "memory_available", lambda self: False)
    monkeypatch.setattr(VerificationSuite, "stages", lambda self: [
        ("지배 사슬", False, lambda: (check_domination(2, 1, DOMINATION_GRID), [])),
        ("비율", True, lambda: ([], [])),
    ])
    result = suite.run()
    assert result.incomplete
    assert not result.passed
    assert len(result.reports) == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
