#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
스펙트럴 모듈 - 매끄러운 컷오프 φ, Littlewood-Paley 승수/투영, 𝓑 및 B 노름, 몰리파이어

승수는 FFT 순서의 이산 주파수 ξ = m/L 위에서 정확히 샘플링되며
(격자, 종류, j) 단위로 Lock 으로 보호되는 캐시에 저장된다.
"""

import logging
from dataclasses import dataclass, field
from threading import Lock
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import fft as sfft

from errors import BandRangeError, ConfigurationError, SupportError
from torus_grid import GridFunction, TorusGrid, norm

logger = logging.getLogger(__name__)

MULTIPLIER_KINDS = ("low", "band", "widened")

# scipy.fft 병렬 작업 수 (CLI --workers 로 설정)
_fft_workers = 1


def configure_fft_workers(workers: int) -> None:
    global _fft_workers
    _fft_workers = max(1, int(workers))


def smooth_step(x):
    """s(x) = exp(-1/x) (x > 0), 0 (x <= 0)"""
    x = np.asarray(x, dtype=np.float64)
    positive = x > 0
    safe = np.where(positive, x, 1.0)
    return np.where(positive, np.exp(-1.0 / safe), 0.0)


def phi(t):
    """고정 컷오프 φ(t) = s(2-t) / (s(2-t) + s(t-1))

    t <= 1 에서 1, t >= 2 에서 0, 단조 감소이며 φ(1.5) = 0.5.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    upper = smooth_step(2.0 - t_arr)
    lower = smooth_step(t_arr - 1.0)
    values = upper / (upper + lower)
    if np.ndim(t) == 0:
        return float(values)
    return values


@dataclass(frozen=True, eq=False)
class SpectralMultiplier:
    """이산 주파수 격자 위의 승수 (FFT 순서)"""

    grid: TorusGrid
    kind: str
    j: int
    values: np.ndarray

    def half_spectrum(self) -> np.ndarray:
        """rfft 순서 계수 (|ξ| 대칭이므로 앞 M/2+1 개)"""
        return self.values[: self.grid.size // 2 + 1]


def _multiplier_values(grid: TorusGrid, kind: str, j: int) -> np.ndarray:
    xi = np.abs(grid.frequencies())
    if kind == "low":
        values = phi(xi / 2.0 ** j)
    elif kind == "band":
        values = phi(xi / 2.0 ** j) - phi(xi / 2.0 ** (j - 1))
    elif kind == "widened":
        values = phi(xi / 2.0 ** (j + 1)) - phi(xi / 2.0 ** (j - 2))
    else:
        raise ConfigurationError(f"unknown multiplier kind: {kind}", field="kind")
    values = np.ascontiguousarray(values, dtype=np.float64)
    values.setflags(write=False)
    return values


class MultiplierCache:
    """(격자, 종류, j) 별 승수 캐시 - 동시 조회 가능, 삽입은 단일 승자"""

    def __init__(self, max_cache_size: int = 256):
        self._cache: Dict[Tuple[int, int, str, int], SpectralMultiplier] = {}
        self._cache_lock = Lock()
        self._max_cache_size = max_cache_size

    def get(self, grid: TorusGrid, kind: str, j: int) -> SpectralMultiplier:
        key = (grid.period, grid.size, kind, int(j))
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        built = SpectralMultiplier(grid, kind, int(j), _multiplier_values(grid, kind, int(j)))
        with self._cache_lock:
            # Lock 안에서 직접 정리 (중첩 Lock 방지)
            if len(self._cache) >= self._max_cache_size:
                items_to_remove = len(self._cache) // 2
                for old_key in list(self._cache.keys())[:items_to_remove]:
                    del self._cache[old_key]
                logger.debug(f"승수 캐시 정리 완료: {items_to_remove}개 항목 제거")
            return self._cache.setdefault(key, built)

    def clear(self) -> None:
        with self._cache_lock:
            self._cache.clear()

    def __len__(self) -> int:
        return len(self._cache)


_multiplier_cache = MultiplierCache()


def multiplier(grid: TorusGrid, kind: str, j: int) -> SpectralMultiplier:
    """low_at j: φ(|ξ|/2^j), band j: φ(|ξ|/2^j) - φ(|ξ|/2^(j-1)),
    widened j: φ(|ξ|/2^(j+1)) - φ(|ξ|/2^(j-2))"""
    if kind not in MULTIPLIER_KINDS:
        raise ConfigurationError(f"unknown multiplier kind: {kind}", field="kind")
    if int(j) > grid.j_max:
        raise BandRangeError(f"band index {j} exceeds j_max = {grid.j_max} for grid {grid.label()}", field="j")
    return _multiplier_cache.get(grid, kind, int(j))


def apply_multiplier(f: GridFunction, values: np.ndarray) -> GridFunction:
    """f 의 이산 푸리에 계수에 승수를 곱한 뒤 역변환 (원형 합성곱과 동일)"""
    size = f.grid.size
    if f.is_real:
        coeffs = sfft.rfft(f.samples, workers=_fft_workers)
        out = sfft.irfft(coeffs * values[: size // 2 + 1], n=size, workers=_fft_workers)
    else:
        out = sfft.ifft(sfft.fft(f.samples, workers=_fft_workers) * values, workers=_fft_workers)
    return GridFunction.from_samples(f.grid, out)


def project(f: GridFunction, kind: str, j: int) -> GridFunction:
    """P_{<=j}, P_j, P̃_j 투영"""
    return apply_multiplier(f, multiplier(f.grid, kind, j).values)


@dataclass
class BNormReport:
    """𝓑 / B 노름 계산 결과"""

    besov_part: float
    l2_part: float
    total: float
    low_band: float
    per_band: List[Tuple[int, float]] = field(default_factory=list)
    j_max: int = 0

    def to_record(self) -> Dict:
        return {
            "besov_part": self.besov_part,
            "l2_part": self.l2_part,
            "total": self.total,
            "low_band": self.low_band,
            "j_max": self.j_max,
            "per_band": [[j, value] for j, value in self.per_band],
        }


def band_sup_norms(f: GridFunction) -> Tuple[float, List[Tuple[int, float]]]:
    """‖P_{<=0} f‖∞ 와 j = 1..j_max 의 ‖P_j f‖∞ (순변환 1회)"""
    grid = f.grid
    size = grid.size
    if f.is_real:
        coeffs = sfft.rfft(f.samples, workers=_fft_workers)

        def inverse(values):
            return sfft.irfft(coeffs * values[: size // 2 + 1], n=size, workers=_fft_workers)
    else:
        coeffs = sfft.fft(f.samples, workers=_fft_workers)

        def inverse(values):
            return sfft.ifft(coeffs * values, workers=_fft_workers)

    low_band = float(np.max(np.abs(inverse(multiplier(grid, "low", 0).values))))
    per_band = []
    for j in range(1, grid.j_max + 1):
        per_band.append((j, float(np.max(np.abs(inverse(multiplier(grid, "band", j).values))))))
    return low_band, per_band


def besov_norm(f: GridFunction) -> BNormReport:
    """‖f‖_𝓑 = ‖P_{<=0} f‖∞ + max_j ‖P_j f‖∞"""
    low_band, per_band = band_sup_norms(f)
    top = max((value for _, value in per_band), default=0.0)
    besov_part = low_band + top
    return BNormReport(besov_part, 0.0, besov_part, low_band, per_band, f.grid.j_max)


def b_norm(f: GridFunction) -> BNormReport:
    """‖f‖_B = ‖f‖_𝓑 + ‖f‖_{L²}"""
    report = besov_norm(f)
    report.l2_part = norm(f, "l2")
    report.total = report.besov_part + report.l2_part
    return report


def telescope_residual(f: GridFunction, J: int) -> float:
    """‖(P_{<=0} + Σ_{j=1}^{J} P_j) f - f‖∞"""
    grid = f.grid
    if J > grid.j_max:
        raise BandRangeError(f"J = {J} exceeds j_max = {grid.j_max}", field="J")
    total = np.array(multiplier(grid, "low", 0).values)
    for j in range(1, J + 1):
        total = total + multiplier(grid, "band", j).values
    return norm(apply_multiplier(f, total) - f, "linf")


def lp_kernel(grid: TorusGrid, kind: str, j: int) -> GridFunction:
    """승수의 공간 커널 h (x = 0 이 중심 인덱스), Δ·Σ h(x_l) f(x_i - x_l) = 투영"""
    values = multiplier(grid, kind, j).values
    spatial = np.real(sfft.ifft(values, workers=_fft_workers))
    return GridFunction.from_samples(grid, sfft.fftshift(spatial) / grid.spacing)


def kernel_l1(grid: TorusGrid, kind: str, j: int) -> float:
    """이산 ‖h‖₁ = Δ·Σ|h|"""
    return norm(lp_kernel(grid, kind, j), "l1")


def spectral_derivative(f: GridFunction) -> GridFunction:
    """스펙트럴 미분 (나이퀴스트 계수는 0)"""
    grid = f.grid
    size = grid.size
    if f.is_real:
        coeffs = sfft.rfft(f.samples, workers=_fft_workers)
        xi = sfft.rfftfreq(size, d=grid.spacing)
        symbol = 2j * np.pi * xi
        symbol[-1] = 0.0
        out = sfft.irfft(coeffs * symbol, n=size, workers=_fft_workers)
    else:
        symbol = 2j * np.pi * np.array(grid.frequencies())
        symbol[size // 2] = 0.0
        out = sfft.ifft(sfft.fft(f.samples, workers=_fft_workers) * symbol, workers=_fft_workers)
    return GridFunction.from_samples(grid, out)


def embedding_constant(grid: TorusGrid) -> float:
    """C_emb = ‖h_{<=0}‖₁ + max_j ‖h_j‖₁ (Young 부등식: ‖f‖_𝓑 <= C_emb ‖f‖∞)"""
    low = kernel_l1(grid, "low", 0)
    top = max((kernel_l1(grid, "band", j) for j in range(1, grid.j_max + 1)), default=0.0)
    return low + top


def mollifier(grid: TorusGrid) -> GridFunction:
    """ρ(x) = c·s(1 - x²) (|x| < 1), Δ·Σρ = 1"""
    if grid.period < 4:
        raise SupportError(f"mollifier needs period >= 4 (got {grid.period})", field="period")
    x = grid.abscissas()
    rho = smooth_step(1.0 - x * x)
    mass = grid.spacing * float(np.sum(rho))
    return GridFunction.from_samples(grid, rho / mass)


def mollifier_apply(f: GridFunction) -> GridFunction:
    """ρ 와의 원형 합성곱 (FFT)"""
    rho = mollifier(f.grid)
    # ρ 가 짝함수이므로 전달함수는 실수
    transfer = np.real(sfft.fft(sfft.ifftshift(rho.samples), workers=_fft_workers)) * f.grid.spacing
    return apply_multiplier(f, transfer)


def mollifier_ratio(g: GridFunction, report: Optional[BNormReport] = None) -> float:
    """‖ρ∗g‖∞ / ‖g‖_𝓑"""
    report = report or besov_norm(g)
    if report.besov_part == 0.0:
        return 0.0
    return norm(mollifier_apply(g), "linf") / report.besov_part
