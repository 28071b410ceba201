#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
최대작용소 테스트 - 이중 루프 오라클, 지배 사슬, 순위 계산 경로, 커널 변동
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import ConfigurationError, RadiusCapError, RadiusError
from maximal_ops import (
    apply_operator,
    box_kernel,
    bump_kernel,
    diamond_kernel,
    diamond_maximal,
    domination_margins,
    get_kernel,
    hardy_littlewood,
    kernel_tv,
    kernel_weights,
    odd_bump_kernel,
    sampled_kernel,
    sharp_maximal,
    tk_star,
)
from torus_grid import GridFunction, RadiiSet, make_grid, norm

GRID = make_grid(2, 64)
ALL_RADII = RadiiSet.all_integers(GRID)

samples_64 = st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False),
                      min_size=64, max_size=64)


def window(values, i, k):
    size = len(values)
    return [values[(i + l) % size] for l in range(-k, k + 1)]


def loop_hl(values, radii):
    return np.array([max(sum(abs(v) for v in window(values, i, k)) / (2 * k + 1) for k in radii)
                     for i in range(len(values))])


def loop_sharp(values, radii):
    out = []
    for i in range(len(values)):
        best = 0.0
        for k in radii:
            w = window(values, i, k)
            mean = sum(w) / (2 * k + 1)
            best = max(best, sum(abs(v - mean) for v in w) / (2 * k + 1))
        out.append(best)
    return np.array(out)


def loop_diamond(values, radii):
    out = []
    for i in range(len(values)):
        best = 0.0
        for k in radii:
            w = window(values, i, k)
            best = max(best, abs(sum(np.sign(l) * v for l, v in zip(range(-k, k + 1), w))) / (2 * k + 1))
        out.append(best)
    return np.array(out)


def step_function(grid):
    return GridFunction.from_samples(grid, np.where(grid.abscissas() >= 0, 1.0, -0.5))


def test_operators_match_window_loops():
    rng = np.random.default_rng(2024)
    for f in (GridFunction.from_samples(GRID, rng.normal(size=64)), step_function(GRID)):
        values = list(f.samples)
        radii = ALL_RADII.indices
        scale = max(1.0, norm(f, "linf"))
        np.testing.assert_allclose(hardy_littlewood(f, ALL_RADII).values.samples, loop_hl(values, radii),
                                   rtol=0, atol=1e-12 * scale)
        np.testing.assert_allclose(diamond_maximal(f, ALL_RADII).values.samples, loop_diamond(values, radii),
                                   rtol=0, atol=1e-12 * scale)
        expected = loop_sharp(values, radii)
        for method in ("direct", "rank"):
            np.testing.assert_allclose(sharp_maximal(f, ALL_RADII, method=method).values.samples, expected,
                                       rtol=0, atol=1e-12 * scale)


def test_constant_function():
    f = GridFunction.constant(GRID, -1.25)
    assert np.all(sharp_maximal(f, ALL_RADII).values.samples == 0.0)
    assert np.all(diamond_maximal(f, ALL_RADII).values.samples == 0.0)
    hl = hardy_littlewood(f, ALL_RADII)
    np.testing.assert_allclose(hl.values.samples, 1.25, rtol=1e-14)
    # 동률이면 가장 작은 반지름
    assert np.all(hl.argmax_radius == 1)


@settings(max_examples=60, deadline=None)
@given(samples_64)
def test_domination_chain(values):
    f = GridFunction.from_samples(GRID, np.array(values))
    lower, upper = domination_margins(f, ALL_RADII)
    assert lower >= -1e-12 * max(1.0, norm(f, "linf"))
    assert upper >= -1e-12 * max(1.0, norm(f, "linf"))


@settings(max_examples=40, deadline=None)
@given(samples_64, st.floats(min_value=-4, max_value=4), st.sampled_from(["hl", "sharp", "diamond"]))
def test_homogeneity(values, c, name):
    f = GridFunction.from_samples(GRID, np.array(values))
    radii = RadiiSet.dyadic(GRID)
    lhs = apply_operator(name, f * c, radii).values.samples
    rhs = abs(c) * apply_operator(name, f, radii).values.samples
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(samples_64, samples_64, st.sampled_from(["hl", "sharp", "diamond"]))
def test_subadditivity(a, b, name):
    f = GridFunction.from_samples(GRID, np.array(a))
    g = GridFunction.from_samples(GRID, np.array(b))
    radii = RadiiSet.dyadic(GRID)
    total = apply_operator(name, f + g, radii).values.samples
    bound = apply_operator(name, f, radii).values.samples + apply_operator(name, g, radii).values.samples
    assert np.all(total <= bound + 1e-9)


@settings(max_examples=40, deadline=None)
@given(samples_64, st.integers(min_value=-64, max_value=64), st.sampled_from(["hl", "sharp", "diamond"]))
def test_translation_equivariance(values, s, name):
    f = GridFunction.from_samples(GRID, np.array(values))
    radii = RadiiSet.dyadic(GRID)
    lhs = apply_operator(name, f.shift(s), radii).values.samples
    rhs = apply_operator(name, f, radii).values.shift(s).samples
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-9)


def test_rank_path_agrees_with_direct_path_at_scale():
    grid = make_grid(16, 8192)
    rng = np.random.default_rng(99)
    f = GridFunction.from_samples(grid, rng.normal(size=grid.size) + np.sin(grid.abscissas()))
    radii = RadiiSet.explicit([1, 7, 64, 300])
    direct = sharp_maximal(f, radii, method="direct")
    ranked = sharp_maximal(f, radii, method="rank")
    np.testing.assert_allclose(ranked.values.samples, direct.values.samples, rtol=0, atol=1e-9)
    with pytest.raises(ConfigurationError):
        sharp_maximal(GridFunction.from_samples(grid, np.ones(grid.size) * 1j), radii, method="rank")
    with pytest.raises(ConfigurationError):
        sharp_maximal(f, radii, method="fast")


def test_radius_validation():
    f = GridFunction.zeros(GRID)
    with pytest.raises(RadiusError):
        hardy_littlewood(f, RadiiSet.explicit([40]))


def test_kernel_total_variation():
    assert kernel_tv(diamond_kernel()) == pytest.approx(2.0, abs=1e-12)
    assert diamond_kernel().tv_norm == 2.0
    assert kernel_tv(box_kernel()) == pytest.approx(1.0, abs=1e-12)
    assert bump_kernel().tv_norm == pytest.approx(2.0, abs=1e-8)
    assert odd_bump_kernel().tv_norm > 0.0
    assert odd_bump_kernel().mean_zero
    assert not bump_kernel().mean_zero


def test_diamond_kernel_values():
    k = diamond_kernel()
    np.testing.assert_array_equal(k(np.array([-1.0, -0.5, 0.0, 0.5, 1.0, 1.5])), [-0.5, -0.5, 0.0, 0.5, 0.5, 0.0])
    with pytest.raises(ConfigurationError):
        get_kernel("triangle")


def test_sampled_kernel_mass_and_cap():
    grid = make_grid(16, 1024)
    box = sampled_kernel(box_kernel(), grid, 32)
    assert norm(box, "l1") == pytest.approx(1.0, rel=1e-12)
    assert abs(np.sum(kernel_weights(diamond_kernel(), grid, 32))) <= 1e-15
    with pytest.raises(RadiusCapError):
        kernel_weights(diamond_kernel(), grid, 300)


def test_kernel_weights_take_midpoint_at_jumps():
    grid = make_grid(16, 1024)
    offsets = np.fft.fftfreq(grid.size, d=1.0 / grid.size)
    for k in (1, 2, 3, 4, 16, 100):
        weights = kernel_weights(diamond_kernel(), grid, k)
        assert weights[k] == pytest.approx(0.25 / k, abs=1e-15)
        assert weights[-k] == pytest.approx(-0.25 / k, abs=1e-15)
        assert weights[0] == 0.0
        # 1차 모멘트 ∫y K_r(y) dy = r/2 가 모든 k 에서 정확히 맞는다
        assert np.sum(offsets * weights) == pytest.approx(k / 2, rel=1e-12)


def test_tk_star_paths_agree():
    rng = np.random.default_rng(5)
    f = GridFunction.from_samples(GRID, rng.normal(size=64))
    radii = RadiiSet.explicit([2, 4, 8])
    for kernel in (diamond_kernel(), odd_bump_kernel()):
        spectral = tk_star(f, kernel, radii, method="spectral")
        direct = tk_star(f, kernel, radii, method="direct")
        assert spectral.operator == f"tk:{kernel.name}"
        np.testing.assert_allclose(spectral.values.samples, direct.values.samples, rtol=0, atol=1e-10)


def test_sharp_value_at_a_unit_step():
    f = GridFunction.from_samples(GRID, np.where(GRID.abscissas() >= 0, 1.0, 0.0))
    values = sharp_maximal(f, RadiiSet.explicit([1])).values.samples
    # 창 (0, 1, 1): 평균 2/3, 편차 합 4/3
    assert values[GRID.center_index] == pytest.approx(4 / 9, abs=1e-15)
    assert values[GRID.center_index - 1] == pytest.approx(4 / 9, abs=1e-15)
    assert values[GRID.center_index - 5] == 0.0


@pytest.mark.parametrize("k", [1, 2, 5, 16])
def test_diamond_value_on_sign_pattern(k):
    f = GridFunction.from_samples(GRID, np.sign(GRID.abscissas()))
    values = diamond_maximal(f, RadiiSet.explicit([k])).values.samples
    assert values[GRID.center_index] == pytest.approx(2 * k / (2 * k + 1), abs=1e-15)


def test_tk_star_diamond_approaches_diamond_maximal_under_refinement():
    differences = []
    for size in (64, 128, 256, 512):
        grid = make_grid(2, size)
        f = GridFunction.from_function(grid, lambda x: np.sin(2 * np.pi * x))
        # 물리 반지름 r = 1/4 고정, k = r/Δ
        radii = RadiiSet.explicit([size // 8])
        continuous = tk_star(f, diamond_kernel(), radii).values.samples
        discrete = diamond_maximal(f, radii).values.samples
        differences.append(float(np.max(np.abs(continuous - discrete))))
    assert all(later < earlier for earlier, later in zip(differences, differences[1:]))
    assert differences[-1] <= 0.005


def test_maximal_result_sidecar():
    result = hardy_littlewood(step_function(GRID), RadiiSet.dyadic(GRID))
    sidecar = result.sidecar()
    assert sidecar["operator"] == "hl"
    assert sidecar["grid"] == "2,64"
    assert sidecar["radii"] == [1, 2, 4, 8, 16]
    assert sum(sidecar["argmax_histogram"].values()) == 64
    with pytest.raises(ConfigurationError):
        apply_operator("median", step_function(GRID), RadiiSet.dyadic(GRID))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
