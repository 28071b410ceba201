#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
반례 구성 모듈 - 공백 삼각합 S_N, 컷오프 ψ, F_N = ψ·S_N, 변조 범프 g_λ, 확대 family f_N
"""

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

from errors import AdmissibilityError, SupportError
from spectral import phi
from torus_grid import GridFunction, TorusGrid, dilate_dyadic, embed, linear_combination, norm

logger = logging.getLogger(__name__)

PSI_SUPPORT_RADIUS = 4.0
MIN_PSI_PERIOD = 16


def max_admissible_N(grid: TorusGrid) -> int:
    """2^(N+2) <= M/(2L) 을 만족하는 최대 N"""
    return int(round(np.log2(grid.nyquist))) - 2


@dataclass(frozen=True)
class CounterexampleSpec:
    N: int
    grid: TorusGrid

    def __post_init__(self):
        if int(self.N) < 1:
            raise AdmissibilityError(f"N must be a positive integer (got {self.N})", field="N")
        limit = max_admissible_N(self.grid)
        if int(self.N) > limit:
            raise AdmissibilityError(
                f"N = {self.N} does not fit under the Nyquist margin of grid {self.grid.label()}: "
                f"max admissible N = {limit}",
                field="N",
            )
        object.__setattr__(self, "N", int(self.N))

    @property
    def m_N(self) -> int:
        """floor(log2 N)"""
        return self.N.bit_length() - 1

    @property
    def top_frequency(self) -> int:
        return 2 ** self.N

    @property
    def support_radius(self) -> float:
        return PSI_SUPPORT_RADIUS / 2 ** self.m_N


def describe(spec: CounterexampleSpec) -> Dict:
    return {
        "N": spec.N,
        "m_N": spec.m_N,
        "grid": spec.grid.label(),
        "support_radius": spec.support_radius,
        "top_frequency": spec.top_frequency,
    }


def lacunary_sum(N: int, grid: TorusGrid) -> GridFunction:
    """S_N(x) = Σ_{k=1}^{N} sin(2π 2^k x)

    2^k x_i 의 소수부를 정수 연산으로 줄여서 홀대칭과 정확한 사인값이 그대로 유지된다.
    """
    spec = CounterexampleSpec(N, grid)
    size = grid.size
    # x_i = (i - M/2)·L/M 이므로 2^k x_i = 2^k (i - M/2) L / M
    offsets = np.arange(size, dtype=np.int64) - size // 2
    total = np.zeros(size)
    for k in range(1, spec.N + 1):
        residue = np.mod(offsets * (2 ** k) * grid.period, size)
        centered = np.where(residue > size // 2, residue - size, residue)
        centered = np.where(residue == size // 2, 0, centered)
        total += np.sin(2.0 * np.pi * centered / size)
    return GridFunction.from_samples(grid, total)


def bump_psi(grid: TorusGrid) -> GridFunction:
    """ψ(x) = φ(|x|/2): |x| <= 2 에서 1, |x| >= 4 에서 0"""
    if grid.period < MIN_PSI_PERIOD:
        raise SupportError(
            f"period {grid.period} is too small for the cutoff support (needs >= {MIN_PSI_PERIOD})",
            field="period",
        )
    return GridFunction.from_samples(grid, phi(np.abs(grid.abscissas()) / 2.0))


def make_FN(N: int, grid: TorusGrid) -> GridFunction:
    """F_N = ψ·S_N"""
    return bump_psi(grid) * lacunary_sum(N, grid).samples


def make_fN(N: int, grid: TorusGrid) -> GridFunction:
    """f_N = Dil_{m_N} F_N (주기 L/2^{m_N} 격자 위)"""
    spec = CounterexampleSpec(N, grid)
    logger.debug(f"f_N 생성: N={N}, m_N={spec.m_N}, 격자={grid.label()}")
    return dilate_dyadic(make_FN(N, grid), spec.m_N)


def make_fN_embedded(N: int, grid: TorusGrid) -> GridFunction:
    """f_N 을 원래 주기 L 로 0 확장 (같은 Δ, 크기 2^{m_N} M)"""
    return embed(make_fN(N, grid), grid.period)


def modulated_bump(lam: float, grid: TorusGrid) -> GridFunction:
    """g_λ(x) = ψ(x)·exp(2πiλx)"""
    if abs(lam) < 1:
        raise AdmissibilityError(f"|lambda| must be >= 1 (got {lam})", field="lambda")
    if 4 * abs(lam) > grid.nyquist:
        raise AdmissibilityError(
            f"lambda = {lam:g} exceeds the Nyquist margin of grid {grid.label()} "
            f"(max lambda = {grid.nyquist / 4:g})",
            field="lambda",
        )
    psi = bump_psi(grid)
    x = grid.abscissas()
    return GridFunction.from_samples(grid, psi.samples * np.exp(2j * np.pi * lam * x))


def decomposition_residual(N: int, grid: TorusGrid) -> float:
    """‖F_N - (1/2i) Σ_k (g_{2^k} - g_{-2^k})‖∞"""
    terms = []
    for k in range(1, int(N) + 1):
        terms.append((1.0 / 2j, modulated_bump(2.0 ** k, grid)))
        terms.append((-1.0 / 2j, modulated_bump(-(2.0 ** k), grid)))
    return norm(make_FN(N, grid) - linear_combination(terms), "linf")


def unit_period_l1(S: GridFunction) -> float:
    """[0, 1) 한 주기 위 Δ·Σ|S| (L 이 정수이므로 주기가 격자에 정확히 맞는다)"""
    grid = S.grid
    per_unit = int(round(1.0 / grid.spacing))
    start = grid.center_index
    return float(grid.spacing * np.sum(np.abs(S.samples[start:start + per_unit])))
