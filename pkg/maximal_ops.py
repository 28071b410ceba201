#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
최대작용소 모듈 - Hardy-Littlewood M, 샤프 M♯, 부호 커널 M♦, 일반 커널 T*_K

세 작용소 모두 대칭 인덱스 창 {-k..k} 위에서 계산하며 (sign(0) = 0),
반지름 집합에 대한 최댓값과 최댓값을 주는 반지름(동률이면 가장 작은 반지름)을 돌려준다.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import fft as sfft
from scipy import integrate

from errors import ConfigurationError, RadiusCapError
from torus_grid import GridFunction, RadiiSet, TorusGrid, window_sums

logger = logging.getLogger(__name__)

# 이 크기 이하(또는 복소수 입력)는 편차 합을 창별로 직접 계산
DIRECT_SIZE_LIMIT = 4096
# 점프 좌우 극한을 읽을 때의 간격
JUMP_SIDE_OFFSET = 1e-9


@dataclass(frozen=True)
class Kernel:
    """콤팩트 지지 BV 커널 (조각별 매끄러움, 유한 개의 점프)"""

    name: str
    support_radius: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    jumps: Tuple[Tuple[float, float], ...]
    mean_zero: bool
    sup_norm: float
    derivative: Callable[[np.ndarray], np.ndarray]
    declared_tv: Optional[float] = None

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=np.float64))

    @property
    def tv_norm(self) -> float:
        if self.declared_tv is not None:
            return self.declared_tv
        return kernel_tv(self)


def _diamond(x: np.ndarray) -> np.ndarray:
    inside = (np.abs(x) > 0) & (np.abs(x) <= 1)
    return np.where(inside, 0.5 * np.sign(x), 0.0)


def _box(x: np.ndarray) -> np.ndarray:
    return np.where(np.abs(x) <= 1, 0.5, 0.0)


def _bump(x: np.ndarray) -> np.ndarray:
    inside = np.abs(x) < 1
    safe = np.where(inside, 1.0 - x * x, 1.0)
    return np.where(inside, np.e * np.exp(-1.0 / safe), 0.0)


def _bump_derivative(x: np.ndarray) -> np.ndarray:
    inside = np.abs(x) < 1
    safe = np.where(inside, 1.0 - x * x, 1.0)
    return np.where(inside, _bump(x) * (-2.0 * x / (safe * safe)), 0.0)


def _odd_bump(x: np.ndarray) -> np.ndarray:
    return x * _bump(x)


def _odd_bump_derivative(x: np.ndarray) -> np.ndarray:
    return _bump(x) + x * _bump_derivative(x)


def _zero(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(x, dtype=np.float64))


def diamond_kernel() -> Kernel:
    """K♦(x) = sign(x)/2 (0 < |x| <= 1), 그 외 0"""
    return Kernel(
        name="diamond",
        support_radius=1.0,
        evaluator=_diamond,
        jumps=((-1.0, -0.5), (0.0, 1.0), (1.0, -0.5)),
        mean_zero=True,
        sup_norm=0.5,
        derivative=_zero,
        declared_tv=2.0,
    )


def box_kernel() -> Kernel:
    """1_[-1,1] / 2 (평균 0 아님)"""
    return Kernel("box", 1.0, _box, ((-1.0, 0.5), (1.0, -0.5)), False, 0.5, _zero, 1.0)


def bump_kernel() -> Kernel:
    """e·exp(-1/(1-x²)), 최댓값 1, 양수"""
    return Kernel("bump", 1.0, _bump, (), False, 1.0, _bump_derivative)


def odd_bump_kernel() -> Kernel:
    """x·bump(x), 매끄러운 홀함수 (평균 0)"""
    points = np.linspace(-1.0, 1.0, 20001)
    return Kernel("odd_bump", 1.0, _odd_bump, (), True, float(np.max(np.abs(_odd_bump(points)))),
                  _odd_bump_derivative)


KERNELS: Dict[str, Callable[[], Kernel]] = {
    "diamond": diamond_kernel,
    "box": box_kernel,
    "bump": bump_kernel,
    "odd_bump": odd_bump_kernel,
}


def get_kernel(name: str) -> Kernel:
    try:
        return KERNELS[name]()
    except KeyError:
        raise ConfigurationError(f"unknown kernel: {name} (choices: {', '.join(KERNELS)})", field="kernel")


def kernel_tv(k: Kernel) -> float:
    """‖DK‖_TV = Σ|점프| + 매끄러운 조각 위 ∫|K'| (0 에서도 나눔)"""
    total = float(sum(abs(size) for _, size in k.jumps))
    breaks = sorted({-k.support_radius, 0.0, k.support_radius, *(loc for loc, _ in k.jumps)})
    for left, right in zip(breaks[:-1], breaks[1:]):
        value, _ = integrate.quad(lambda t: abs(float(k.derivative(np.array(t)))), left, right,
                                  limit=200, epsabs=1e-13)
        total += value
    return total


def kernel_weights(kernel: Kernel, grid: TorusGrid, k: int) -> np.ndarray:
    """r = kΔ 에서 Δ·K_r(x_l) (FFT 순서, x_l = lΔ)

    점프 위치에 떨어지는 표본은 좌우 극한의 평균을 쓴다.
    """
    radius = k * grid.spacing
    if radius * kernel.support_radius > grid.period / 4:
        raise RadiusCapError(
            f"kernel support {kernel.support_radius:g} x radius {radius:g} exceeds L/4 = {grid.period / 4:g}"
        )
    t = sfft.fftfreq(grid.size, d=1.0 / grid.size) / k
    values = kernel(t)
    for location, _ in kernel.jumps:
        at_jump = t == location
        if np.any(at_jump):
            values[at_jump] = 0.5 * float(kernel(location - JUMP_SIDE_OFFSET) + kernel(location + JUMP_SIDE_OFFSET))
    return values / k


def sampled_kernel(kernel: Kernel, grid: TorusGrid, k: int) -> GridFunction:
    """K_r(x) = K(x/r)/r 를 격자 위 (중심 정렬) 로 샘플링"""
    return GridFunction.from_samples(grid, sfft.fftshift(kernel_weights(kernel, grid, k)) / grid.spacing)


@dataclass(frozen=True, eq=False)
class MaximalResult:
    """점별 최대함수와 최댓값을 주는 반지름"""

    operator: str
    values: GridFunction
    argmax_radius: np.ndarray
    radii: RadiiSet
    cap_note: str

    def argmax_histogram(self) -> Dict[int, int]:
        found, counts = np.unique(self.argmax_radius, return_counts=True)
        return {int(k): int(c) for k, c in zip(found, counts)}

    def sidecar(self) -> Dict:
        return {
            "operator": self.operator,
            "grid": self.values.grid.label(),
            "radii": list(self.radii.indices),
            "cap_note": self.cap_note,
            "argmax_histogram": {str(k): c for k, c in self.argmax_histogram().items()},
        }


class _RunningMax:
    """반지름별 값의 최댓값 누적 (동률은 먼저 들어온 작은 반지름 유지)"""

    def __init__(self, size: int):
        self.best = np.full(size, -np.inf)
        self.argmax = np.zeros(size, dtype=np.int64)

    def update(self, values: np.ndarray, k: int) -> None:
        better = values > self.best
        self.best[better] = values[better]
        self.argmax[better] = k


def _finish(name: str, f: GridFunction, radii: RadiiSet, running: _RunningMax) -> MaximalResult:
    values = GridFunction.from_samples(f.grid, np.maximum(running.best, 0.0))
    return MaximalResult(name, values, running.argmax, radii, radii.cap_note(f.grid))


def hardy_littlewood(f: GridFunction, radii: RadiiSet) -> MaximalResult:
    """Mf[i] = max_k ball_average(|f|, k)[i]"""
    radii.validate(f.grid)
    magnitude = np.abs(f.samples)
    running = _RunningMax(f.grid.size)
    for k in radii.indices:
        running.update(window_sums(magnitude, k) / (2 * k + 1), k)
    return _finish("hl", f, radii, running)


def diamond_maximal(f: GridFunction, radii: RadiiSet) -> MaximalResult:
    """M♦f[i] = max_k |Σ_{|l|<=k} sign(l)·f[i+l]| / (2k+1) (한쪽 prefix sum)"""
    radii.validate(f.grid)
    size = f.grid.size
    kmax = radii.max_index
    samples = f.samples
    extended = np.concatenate((samples[size - kmax:], samples, samples[:kmax]))
    prefix = np.concatenate((np.zeros(1, dtype=extended.dtype), np.cumsum(extended)))
    running = _RunningMax(size)
    base = kmax
    for k in radii.indices:
        right = prefix[base + k + 1: base + k + 1 + size] - prefix[base + 1: base + 1 + size]
        left = prefix[base: base + size] - prefix[base - k: base - k + size]
        running.update(np.abs(right - left) / (2 * k + 1), k)
    return _finish("diamond", f, radii, running)


def _deviation_direct(samples: np.ndarray, k: int) -> np.ndarray:
    """Σ_{|l|<=k} |f[i+l] - A_k f[i]| 를 창별로 직접 합산"""
    average = window_sums(samples, k) / (2 * k + 1)
    deviation = np.zeros(samples.shape[0])
    for offset in range(-k, k + 1):
        deviation += np.abs(np.roll(samples, -offset) - average)
    return deviation


class _RankWindowIndex:
    """값 순위의 웨이블릿 행렬 - 임의 구간에서 '임계값 미만' 원소의 개수와 합을 O(log n) 에 계산"""

    def __init__(self, values: np.ndarray):
        self.values = values
        self.n = values.shape[0]
        order = np.argsort(values, kind="stable")
        self.sorted_values = values[order]
        ranks = np.empty(self.n, dtype=np.int64)
        ranks[order] = np.arange(self.n)
        self.nbits = max(1, self.n.bit_length())
        self.zero_counts: List[np.ndarray] = []
        self.zero_sums: List[np.ndarray] = []
        self.zero_totals: List[int] = []

        current_ranks = ranks
        current_values = values
        for level in range(self.nbits - 1, -1, -1):
            bit = (current_ranks >> level) & 1
            is_zero = bit == 0
            counts = np.zeros(self.n + 1, dtype=np.int32)
            counts[1:] = np.cumsum(is_zero, dtype=np.int32)
            sums = np.zeros(self.n + 1)
            sums[1:] = np.cumsum(np.where(is_zero, current_values, 0.0))
            self.zero_counts.append(counts)
            self.zero_sums.append(sums)
            self.zero_totals.append(int(counts[-1]))
            current_ranks = np.concatenate((current_ranks[is_zero], current_ranks[~is_zero]))
            current_values = np.concatenate((current_values[is_zero], current_values[~is_zero]))

    def count_and_sum_below(self, left: np.ndarray, right: np.ndarray,
                            thresholds: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """[left, right) 구간에서 값 < threshold 인 원소의 개수와 합"""
        x = np.searchsorted(self.sorted_values, thresholds, side="left")
        lo = left.astype(np.int64)
        hi = right.astype(np.int64)
        count = np.zeros(lo.shape[0], dtype=np.int64)
        total = np.zeros(lo.shape[0])
        for depth, level in enumerate(range(self.nbits - 1, -1, -1)):
            zc = self.zero_counts[depth]
            zs = self.zero_sums[depth]
            nz = self.zero_totals[depth]
            z_lo = zc[lo]
            z_hi = zc[hi]
            take_ones = ((x >> level) & 1) == 1
            count += np.where(take_ones, z_hi - z_lo, 0)
            total += np.where(take_ones, zs[hi] - zs[lo], 0.0)
            lo = np.where(take_ones, nz + (lo - z_lo), z_lo)
            hi = np.where(take_ones, nz + (hi - z_hi), z_hi)
        return count, total


def _deviation_by_rank(index: _RankWindowIndex, prefix: np.ndarray, size: int, base: int, k: int) -> np.ndarray:
    """Σ|f - a| = 2(a·c - s), c/s = 창 안에서 a 미만 값의 개수/합"""
    start = np.arange(size) + base - k
    stop = start + 2 * k + 1
    average = (prefix[stop] - prefix[start]) / (2 * k + 1)
    count, below = index.count_and_sum_below(start, stop, average)
    return np.maximum(2.0 * (average * count - below), 0.0)


def sharp_maximal(f: GridFunction, radii: RadiiSet, method: str = "auto") -> MaximalResult:
    """M♯f[i] = max_k (1/(2k+1)) Σ_{|l|<=k} |f[i+l] - A_k f[i]|

    method: direct (창별 직접 합), rank (순위 질의, 실수 입력), auto (크기로 선택)
    """
    radii.validate(f.grid)
    size = f.grid.size
    if method == "auto":
        method = "direct" if (size <= DIRECT_SIZE_LIMIT or not f.is_real) else "rank"
    if method == "rank" and not f.is_real:
        raise ConfigurationError("rank evaluation of the sharp maximal function needs real input", field="method")
    if method not in ("direct", "rank"):
        raise ConfigurationError(f"unknown method: {method}", field="method")

    running = _RunningMax(size)
    if method == "direct":
        for k in radii.indices:
            running.update(_deviation_direct(f.samples, k) / (2 * k + 1), k)
        return _finish("sharp", f, radii, running)

    # 평균을 빼서 prefix sum 크기를 줄인다 (편차는 상수 이동에 불변)
    centered = f.samples - float(np.mean(f.samples))
    kmax = radii.max_index
    extended = np.concatenate((centered[size - kmax:], centered, centered[:kmax]))
    prefix = np.concatenate(([0.0], np.cumsum(extended)))
    index = _RankWindowIndex(extended)
    logger.debug(f"순위 색인 구축 완료: n={index.n}, 레벨={index.nbits}")
    for k in radii.indices:
        running.update(_deviation_by_rank(index, prefix, size, kmax, k) / (2 * k + 1), k)
    return _finish("sharp", f, radii, running)


def tk_star(f: GridFunction, kernel: Kernel, radii: RadiiSet, method: str = "spectral") -> MaximalResult:
    """T*_K f(x_i) = max_r |(K_r ∗ f)(x_i)|, K_r(x) = K(x/r)/r

    method: spectral (FFT 합성곱) 또는 direct (지지집합 위 구적 합)
    """
    radii.validate(f.grid)
    size = f.grid.size
    running = _RunningMax(size)
    if method == "spectral":
        coeffs = sfft.fft(f.samples)
        for k in radii.indices:
            weights = kernel_weights(kernel, f.grid, k)
            response = sfft.ifft(coeffs * sfft.fft(weights))
            if f.is_real:
                response = np.real(response)
            running.update(np.abs(response), k)
    elif method == "direct":
        for k in radii.indices:
            weights = kernel_weights(kernel, f.grid, k)
            response = np.zeros(size, dtype=f.samples.dtype)
            for offset in np.nonzero(weights)[0]:
                response = response + weights[offset] * np.roll(f.samples, int(offset))
            running.update(np.abs(response), k)
    else:
        raise ConfigurationError(f"unknown method: {method}", field="method")
    return _finish(f"tk:{kernel.name}", f, radii, running)


def domination_margins(f: GridFunction, radii: RadiiSet) -> Tuple[float, float]:
    """min(M♯f - M♦f), min(2Mf - M♯f) - 둘 다 0 이상이어야 한다"""
    diamond = diamond_maximal(f, radii).values.samples
    sharp = sharp_maximal(f, radii).values.samples
    hl = hardy_littlewood(f, radii).values.samples
    return float(np.min(sharp - diamond)), float(np.min(2.0 * hl - sharp))


OPERATORS = ("hl", "sharp", "diamond", "tk")


def apply_operator(name: str, f: GridFunction, radii: RadiiSet, kernel: Optional[Kernel] = None) -> MaximalResult:
    if name == "hl":
        return hardy_littlewood(f, radii)
    if name == "sharp":
        return sharp_maximal(f, radii)
    if name == "diamond":
        return diamond_maximal(f, radii)
    if name == "tk":
        return tk_star(f, kernel or diamond_kernel(), radii)
    raise ConfigurationError(f"unknown operator: {name} (choices: {', '.join(OPERATORS)})", field="operator")
