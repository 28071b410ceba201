#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
토러스 격자 모듈 - 주기 L 함수의 균등 샘플링, 구간 평균, 이진 확대

모든 계산의 기반이 되는 TorusGrid / GridFunction / RadiiSet 과
prefix-sum 기반 구간 평균, 노름, 이진 확대(Dil_m) 연산을 제공한다.
샘플 좌표는 x_i = iΔ - L/2 (i = 0..M-1) 이므로 x = 0 은 인덱스 M/2 에 있다.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sfft

from errors import ConfigurationError, DilationError, RadiusCapError, RadiusError

logger = logging.getLogger(__name__)

# 정확한 항등식 검사에 쓰는 전역 상대 허용오차 (--tol 로 변경 가능)
DEFAULT_TOLERANCE = 1e-10

# 모든 정수 반지름을 쓰는 오라클 모드의 최대 격자 크기
ORACLE_SIZE_LIMIT = 512

NORM_KINDS = ("l1", "l2", "linf")


def is_power_of_two(value) -> bool:
    """양의 정수 2의 거듭제곱 여부"""
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        return False
    if not as_float.is_integer() or as_float < 1:
        return False
    n = int(as_float)
    return n & (n - 1) == 0


@lru_cache(maxsize=64)
def _abscissas(period: int, size: int) -> np.ndarray:
    spacing = period / size
    x = (np.arange(size, dtype=np.float64) - size // 2) * spacing
    x.setflags(write=False)
    return x


@lru_cache(maxsize=64)
def _frequencies(period: int, size: int) -> np.ndarray:
    xi = sfft.fftfreq(size, d=period / size)
    xi.setflags(write=False)
    return xi


@dataclass(frozen=True)
class TorusGrid:
    """주기 L, 샘플 수 M 의 균등 격자 (L, M 모두 2의 거듭제곱)"""

    period: int
    size: int

    def __post_init__(self):
        if not is_power_of_two(self.period):
            raise ConfigurationError(f"period must be a power of two (got {self.period})", field="period")
        if not is_power_of_two(self.size) or int(self.size) < 2:
            raise ConfigurationError(f"size must be a power of two (got {self.size})", field="size")
        object.__setattr__(self, "period", int(self.period))
        object.__setattr__(self, "size", int(self.size))

    @property
    def spacing(self) -> float:
        return self.period / self.size

    @property
    def center_index(self) -> int:
        return self.size // 2

    @property
    def nyquist(self) -> float:
        """격자에서 표현 가능한 최고 주파수 M/(2L)"""
        return self.size / (2.0 * self.period)

    @property
    def j_max(self) -> int:
        """대역 절단 인덱스 log2(M/(2L)) - 1 (넓힌 승수의 평탄부가 나이퀴스트 안에 들어감)"""
        return int(round(np.log2(self.nyquist))) - 1

    @property
    def radius_cap_index(self) -> int:
        """반지름 상한 r <= L/4 에 해당하는 인덱스"""
        return self.size // 4

    def abscissas(self) -> np.ndarray:
        return _abscissas(self.period, self.size)

    def frequencies(self) -> np.ndarray:
        """FFT 순서의 이산 주파수 m/L"""
        return _frequencies(self.period, self.size)

    def index_of(self, x: float) -> int:
        return int(round(x / self.spacing)) + self.center_index

    def with_period(self, period: int) -> "TorusGrid":
        return TorusGrid(period, self.size)

    def label(self) -> str:
        return f"{self.period},{self.size}"


def make_grid(period, size) -> TorusGrid:
    """사용자 입력용 격자 생성 (period >= 2, size >= 16)"""
    if not is_power_of_two(period) or float(period) < 2:
        raise ConfigurationError("period must be a power of two >= 2", field="period")
    if not is_power_of_two(size) or float(size) < 16:
        raise ConfigurationError("size must be a power of two >= 16", field="size")
    grid = TorusGrid(int(float(period)), int(float(size)))
    logger.debug(f"격자 생성: L={grid.period}, M={grid.size}, Δ={grid.spacing}")
    return grid


@dataclass(frozen=True, eq=False)
class GridFunction:
    """격자 위의 샘플 함수 (불변)"""

    grid: TorusGrid
    samples: np.ndarray
    is_real: bool

    @classmethod
    def from_samples(cls, grid: TorusGrid, samples, tol: float = DEFAULT_TOLERANCE) -> "GridFunction":
        values = np.asarray(samples)
        if values.shape != (grid.size,):
            raise ConfigurationError(
                f"samples length {values.shape} does not match grid size {grid.size}", field="samples"
            )
        is_real = True
        if np.iscomplexobj(values):
            scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
            if values.size and float(np.max(np.abs(values.imag))) > tol * scale:
                is_real = False
        if is_real:
            values = np.array(np.real(values), dtype=np.float64)
        else:
            values = np.array(values, dtype=np.complex128)
        values.setflags(write=False)
        return cls(grid, values, is_real)

    @classmethod
    def from_function(cls, grid: TorusGrid, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls.from_samples(grid, func(grid.abscissas()))

    @classmethod
    def constant(cls, grid: TorusGrid, value) -> "GridFunction":
        return cls.from_samples(grid, np.full(grid.size, value))

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "GridFunction":
        return cls.constant(grid, 0.0)

    def __len__(self) -> int:
        return self.grid.size

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise ConfigurationError("grid mismatch between operands", field="grid")
            return other.samples
        return other

    def __add__(self, other) -> "GridFunction":
        return GridFunction.from_samples(self.grid, self.samples + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "GridFunction":
        return GridFunction.from_samples(self.grid, self.samples - self._coerce(other))

    def __mul__(self, other) -> "GridFunction":
        return GridFunction.from_samples(self.grid, self.samples * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction.from_samples(self.grid, -self.samples)

    def abs(self) -> "GridFunction":
        return GridFunction.from_samples(self.grid, np.abs(self.samples))

    def shift(self, s: int) -> "GridFunction":
        """원형 이동: 결과[i] = f[i - s]"""
        return GridFunction.from_samples(self.grid, np.roll(self.samples, s))

    def value_at(self, x: float):
        return self.samples[self.grid.index_of(x) % self.grid.size]


def shift(f: GridFunction, s: int) -> GridFunction:
    return f.shift(s)


@dataclass(frozen=True)
class RadiiSet:
    """최대함수의 상한을 취하는 이산 반지름 집합 (인덱스 단위, r = kΔ)"""

    indices: Tuple[int, ...]
    dyadic_closed: bool

    def __post_init__(self):
        if not self.indices:
            raise RadiusError("radii set is empty")
        if any(int(k) < 1 for k in self.indices):
            raise RadiusError("radius indices must be positive")
        object.__setattr__(self, "indices", tuple(sorted(set(int(k) for k in self.indices))))

    @classmethod
    def dyadic(cls, grid: TorusGrid, base: int = 1, cap_index: Optional[int] = None) -> "RadiiSet":
        """기본 반지름 집합 {base * 2^j} (상한 L/4)"""
        cap = grid.radius_cap_index if cap_index is None else cap_index
        indices = []
        k = int(base)
        while k <= cap:
            indices.append(k)
            k *= 2
        if not indices:
            raise RadiusError(f"no dyadic radius fits under the cap {cap}")
        return cls(tuple(indices), True)

    @classmethod
    def all_integers(cls, grid: TorusGrid, cap_index: Optional[int] = None) -> "RadiiSet":
        """오라클 모드: 상한 이하의 모든 정수 반지름 (M <= 512 에서만)"""
        if grid.size > ORACLE_SIZE_LIMIT:
            raise RadiusCapError(
                f"all-integer radii are limited to M <= {ORACLE_SIZE_LIMIT} (got M={grid.size})"
            )
        cap = grid.radius_cap_index if cap_index is None else cap_index
        return cls.explicit(range(1, cap + 1))

    @classmethod
    def explicit(cls, indices: Iterable[int]) -> "RadiiSet":
        values = sorted(set(int(k) for k in indices))
        if not values:
            raise RadiusError("radii set is empty")
        base = values[0]
        closed = all(v == base * 2 ** j for j, v in enumerate(values))
        return cls(tuple(values), closed)

    @property
    def max_index(self) -> int:
        return self.indices[-1]

    def validate(self, grid: TorusGrid) -> "RadiiSet":
        for k in self.indices:
            check_radius(grid, k)
        return self

    def lengths(self, grid: TorusGrid) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.float64) * grid.spacing

    def cap_note(self, grid: TorusGrid) -> str:
        return (
            f"r <= {self.max_index * grid.spacing:g} (k <= {self.max_index}); "
            f"cap L/4 = {grid.period / 4:g}"
        )

    def label(self) -> str:
        if self.dyadic_closed and len(self.indices) > 3:
            return f"dyadic[{self.indices[0]}..{self.indices[-1]}]"
        return ";".join(str(k) for k in self.indices)


def parse_radii(spec: str, grid: TorusGrid) -> RadiiSet:
    """--radii 인자 해석: dyadic | all | k1,k2,..."""
    text = (spec or "dyadic").strip().lower()
    if text == "dyadic":
        return RadiiSet.dyadic(grid)
    if text == "all":
        return RadiiSet.all_integers(grid)
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f"invalid radii spec: {spec}", field="radii")
    radii = RadiiSet.explicit(values)
    for k in radii.indices:
        check_radius(grid, k)
        if k > grid.radius_cap_index:
            raise RadiusCapError(f"radius index {k} exceeds the cap L/4 (k <= {grid.radius_cap_index})")
    return radii


def check_radius(grid: TorusGrid, k: int) -> None:
    if not 1 <= int(k) <= grid.size // 2 - 1:
        raise RadiusError(f"radius index {k} outside 1..{grid.size // 2 - 1}", field="k")


def window_sums(values: np.ndarray, k: int) -> np.ndarray:
    """원형 prefix sum 으로 {-k..k} 창의 합을 O(M) 에 계산"""
    size = values.shape[0]
    extended = np.concatenate((values[size - k:], values, values[:k]))
    prefix = np.concatenate((np.zeros(1, dtype=extended.dtype), np.cumsum(extended)))
    return prefix[2 * k + 1:] - prefix[:size]


def ball_average(f: GridFunction, k: int) -> GridFunction:
    """중심 창 평균: (1/(2k+1)) * sum_{|l|<=k} f[(i+l) mod M]"""
    check_radius(f.grid, k)
    return GridFunction.from_samples(f.grid, window_sums(f.samples, int(k)) / (2 * int(k) + 1))


def norm(f: GridFunction, kind: str = "l2") -> float:
    """격자 노름: l1 = Δ·Σ|f|, l2 = (Δ·Σ|f|²)^(1/2), linf = max|f|"""
    magnitude = np.abs(f.samples)
    if kind == "l1":
        return float(f.grid.spacing * np.sum(magnitude))
    if kind == "l2":
        return float(np.sqrt(f.grid.spacing * np.sum(magnitude * magnitude)))
    if kind == "linf":
        return float(np.max(magnitude)) if magnitude.size else 0.0
    raise ConfigurationError(f"unknown norm kind: {kind}", field="kind")


def _finish(grid: TorusGrid, values: np.ndarray, is_real: bool) -> GridFunction:
    if is_real:
        values = np.real(values)
    return GridFunction.from_samples(grid, values)


def refine(f: GridFunction, factor: int) -> GridFunction:
    """같은 주기에서 factor 배 조밀한 격자로 삼각 보간 (factor 는 2의 거듭제곱)"""
    if not is_power_of_two(factor):
        raise ConfigurationError("refinement factor must be a power of two", field="factor")
    factor = int(factor)
    if factor == 1:
        return f
    size = f.grid.size
    fine_size = size * factor
    coeffs = sfft.fft(f.samples)
    padded = np.zeros(fine_size, dtype=np.complex128)
    half = size // 2
    padded[:half] = coeffs[:half]
    padded[fine_size - half + 1:] = coeffs[half + 1:]
    # 나이퀴스트 계수는 ±M/2 에 반씩 나눈다
    padded[half] = 0.5 * coeffs[half]
    padded[fine_size - half] = 0.5 * coeffs[half]
    values = sfft.ifft(padded) * factor
    return _finish(TorusGrid(f.grid.period, fine_size), values, f.is_real)


def spectral_residual(f: GridFunction, cutoff_index: float) -> float:
    """|n| >= cutoff_index 인 계수의 상대 에너지 (제곱근)"""
    coeffs = sfft.fft(f.samples)
    n = np.abs(sfft.fftfreq(f.grid.size, d=1.0 / f.grid.size))
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return 0.0
    outside = float(np.sum(np.abs(coeffs[n >= cutoff_index]) ** 2))
    return float(np.sqrt(outside / total))


def dilate_dyadic(f: GridFunction, m: int, tol: float = DEFAULT_TOLERANCE) -> GridFunction:
    """L∞ 정규화 이진 확대 (Dil_m f)(x) = f(2^m x)

    m > 0: 샘플은 그대로 두고 격자 주기를 L/2^m 으로 다시 붙인다 (정확).
    m < 0: 주기 2^|m| L, 크기 2^|m| M (같은 Δ) 격자로 삼각 보간한다.
           f 가 |ξ| < M/(2L·2^|m|) 로 대역 제한되어 있어야 한다.
    """
    m = int(m)
    if m == 0:
        return f
    grid = f.grid
    if m > 0:
        scale = 2 ** m
        if grid.period % scale != 0:
            raise DilationError(f"dilated period {grid.period}/{scale} falls below 1")
        return GridFunction(grid.with_period(grid.period // scale), f.samples, f.is_real)

    p = -m
    scale = 2 ** p
    residual = spectral_residual(f, grid.size / 2 ** (p + 1))
    if residual > tol:
        raise DilationError(
            f"band-limit precondition violated for m={m}: residual spectral mass {residual:.3e}",
            residual=residual,
        )
    refined = refine(f, scale)
    return GridFunction(refined.grid.with_period(grid.period * scale), refined.samples, refined.is_real)


def dilate_on_period(f: GridFunction, m: int) -> GridFunction:
    """(Dil_m f)(x) = f(2^m x) 를 같은 주기 L, 크기 2^m M 격자에서 직접 샘플링 (m >= 0)

    2^m x_i 를 주기 L 로 접으면 원래 격자점에 정확히 떨어진다.
    """
    m = int(m)
    if m < 0:
        raise DilationError(f"same-period resampling needs m >= 0 (got {m})")
    grid = f.grid
    scale = 2 ** m
    fine = TorusGrid(grid.period, grid.size * scale)
    folded = np.mod(scale * fine.abscissas() + grid.period / 2, grid.period)
    index = np.rint(folded / grid.spacing).astype(np.int64) % grid.size
    return GridFunction(fine, f.samples[index], f.is_real)


def embed(f: GridFunction, period: int) -> GridFunction:
    """같은 Δ 로 더 큰 주기에 0 으로 확장 (지지집합이 콤팩트한 함수용)"""
    if not is_power_of_two(period) or int(period) < f.grid.period:
        raise ConfigurationError(f"embedding period {period} must be a power of two >= {f.grid.period}",
                                 field="period")
    period = int(period)
    if period == f.grid.period:
        return f
    factor = period // f.grid.period
    big = TorusGrid(period, f.grid.size * factor)
    values = np.zeros(big.size, dtype=f.samples.dtype)
    start = big.center_index - f.grid.center_index
    values[start:start + f.grid.size] = f.samples
    return GridFunction.from_samples(big, values)


def restrict(f: GridFunction, grid: TorusGrid) -> GridFunction:
    """같은 Δ 의 작은 격자에 해당하는 중심 창"""
    if not np.isclose(grid.spacing, f.grid.spacing, rtol=0, atol=0) or grid.size > f.grid.size:
        raise ConfigurationError("restriction needs the same spacing and a smaller grid", field="grid")
    start = f.grid.center_index - grid.center_index
    return GridFunction.from_samples(grid, f.samples[start:start + grid.size])


def indices_within(grid: TorusGrid, radius: float) -> np.ndarray:
    """|x_i| <= radius 인 인덱스"""
    return np.nonzero(np.abs(grid.abscissas()) <= radius)[0]


def linear_combination(terms: Sequence[Tuple[complex, GridFunction]]) -> GridFunction:
    grid = terms[0][1].grid
    total = np.zeros(grid.size, dtype=np.complex128)
    for coefficient, g in terms:
        total = total + coefficient * g.samples
    return GridFunction.from_samples(grid, total)
