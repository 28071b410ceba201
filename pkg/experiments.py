#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
실험 모듈 - 각 추정식을 측정 테이블(ScanTable) 또는 통과/실패 검증(CheckReport)으로 바꾸는 스캔과 검증 스위트

프로파일(quick / reference / large)별 격자와 범위, 보정 상수(calibration.txt),
스레드 풀 기반 행 병렬화, psutil 메모리 가드를 포함한다.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, fields
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import psutil
from scipy import fft as sfft
from scipy import integrate

from constructions import (
    CounterexampleSpec,
    lacunary_sum,
    make_FN,
    max_admissible_N,
    modulated_bump,
    unit_period_l1,
)
from errors import AdmissibilityError, ConfigurationError, DilationError
from file_processor import DEFAULT_CALIBRATION_PATH, ResultFileProcessor, header_line
from maximal_ops import (
    Kernel,
    diamond_kernel,
    diamond_maximal,
    domination_margins,
    hardy_littlewood,
    kernel_weights,
    odd_bump_kernel,
    sharp_maximal,
    tk_star,
)
from spectral import (
    b_norm,
    band_sup_norms,
    besov_norm,
    embedding_constant,
    lp_kernel,
    mollifier_ratio,
    multiplier,
    project,
    spectral_derivative,
    telescope_residual,
)
from torus_grid import (
    DEFAULT_TOLERANCE,
    GridFunction,
    RadiiSet,
    TorusGrid,
    dilate_dyadic,
    dilate_on_period,
    embed,
    indices_within,
    make_grid,
    norm,
)

logger = logging.getLogger(__name__)

HEADROOM = 1.5
EXACT_TOLERANCE = 1e-12
DOMINATION_SLACK = -1e-12
UNIFORMITY_FACTOR = 2.0
TREND_N_LO = 4
FN_BESOV_SPREAD = 3.0
DIAMOND_RATIO_SPREAD = 1.5
LACUNARY_BAND = (0.45, 0.80)
LACUNARY_ORACLE_MAX_N = 8
UNIT_L1_GRID = (2, 2 ** 16)
# h̃_j 가 |ξ| < 2^(j+2) 까지 퍼져 있어 lhs 의 선형 구간은 s ≈ 1/(8π) 에서 꺾인다
KERNEL_SMALL_WINDOW = (2.0 ** -8, 2.0 ** -4)
KERNEL_LARGE_WINDOW = (2.0 ** 2, 2.0 ** 6)
KERNEL_SMALL_SLOPE = (0.8, 1.2)
KERNEL_LARGE_SLOPE = (-1.2, -0.8)
ORACLE_GRID = (2, 64)
# 같은 주기 재표본 격자에서는 M♯ 가 순위 경로로 바뀌므로 반올림 오차 규모
DILATION_RESAMPLE_TOLERANCE = 1e-9

# 스캔 테이블 이름별 판정 보정 상수 (헤더 메타에 기록)
CALIBRATION_KEYS_BY_TABLE = {
    "kernel-decay-diamond": ("kernel_decay_ratio",),
    "glambda": ("glambda_ratio", "glambda_low_bound"),
    "ratio": ("sharp_min_ratio_floor", "fN_B_min", "fN_B_max"),
}


# 설정: 프로파일과 보정 상수

@dataclass(frozen=True)
class Profile:
    """검증 스위트 실행 규모"""

    name: str
    period: int
    size: int
    domination_size: int
    corpus_size: int
    dilation_corpus_size: int
    n_range: Tuple[int, int]
    lambda_exponent_max: float
    glambda_j_max: int
    kernel_k_min: int
    sharp_growth_min: float
    sharp_slope_window: Tuple[float, float]
    tk_corpus_size: int
    memory_estimate_mb: int

    @property
    def grid(self) -> TorusGrid:
        return make_grid(self.period, self.size)

    @property
    def domination_grid(self) -> TorusGrid:
        return make_grid(self.period, self.domination_size)


PROFILES: Dict[str, Profile] = {
    "quick": Profile("quick", 16, 2 ** 14, 1024, 20, 5, (2, 7), 7.0, 8, 2, 1.0, (0.1, 1.0), 4, 200),
    "reference": Profile("reference", 16, 2 ** 20, 1024, 100, 10, (2, 13), 11.0, 11, 32, 1.1, (0.3, 0.7), 10, 3000),
    "large": Profile("large", 16, 2 ** 22, 1024, 100, 10, (2, 15), 11.0, 11, 32, 1.1, (0.3, 0.7), 10, 12000),
}


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ConfigurationError(f"unknown profile: {name} (choices: {', '.join(PROFILES)})", field="profile")


@dataclass(frozen=True)
class Calibration:
    """측정 후 x1.5 여유를 둔 회귀 고정값 (하한은 ÷1.5)"""

    C_rho: float
    C_plus: float
    C_minus: float
    glambda_ratio: float
    glambda_low_bound: float
    kernel_decay_ratio: float
    diamond_ratio: float
    sharp_min_ratio_floor: float
    fN_B_min: float
    fN_B_max: float

    LOWER_KEYS = ("sharp_min_ratio_floor", "fN_B_min")

    @classmethod
    def from_mapping(cls, values: Dict[str, float]) -> "Calibration":
        names = [f.name for f in fields(cls)]
        missing = [name for name in names if name not in values]
        if missing:
            raise ConfigurationError(f"calibration file is missing: {', '.join(missing)}", field="calibration")
        return cls(**{name: float(values[name]) for name in names})

    @classmethod
    def load(cls, file_path: Optional[str] = None) -> "Calibration":
        return cls.from_mapping(ResultFileProcessor.load_calibration(file_path or DEFAULT_CALIBRATION_PATH))

    def as_dict(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# 결과 타입

@dataclass
class CheckReport:
    """단일 검증 결과 - status 는 기록된 비교가 성립할 때만 pass"""

    name: str
    status: str
    observed: float
    bound: float
    anchor: str
    context: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def upper(cls, name: str, observed: float, bound: float, anchor: str, context: str) -> "CheckReport":
        """observed <= bound"""
        ok = bool(np.isfinite(observed)) and observed <= bound
        return cls(name, "pass" if ok else "fail", float(observed), float(bound), anchor, f"observed <= bound; {context}")

    @classmethod
    def lower(cls, name: str, observed: float, bound: float, anchor: str, context: str) -> "CheckReport":
        """observed >= bound"""
        ok = bool(np.isfinite(observed)) and observed >= bound
        return cls(name, "pass" if ok else "fail", float(observed), float(bound), anchor, f"observed >= bound; {context}")

    def to_record(self) -> Dict:
        return {
            "name": self.name,
            "status": self.status,
            "observed": self.observed,
            "bound": self.bound,
            "anchor": self.anchor,
            "context": self.context,
        }

    def summary_line(self) -> str:
        return f"[{self.status.upper()}] {self.name}: observed={self.observed:.6g} bound={self.bound:.6g} ({self.anchor})"


@dataclass
class ScanTable:
    """파라미터 스윕 결과 테이블"""

    name: str
    frame: pd.DataFrame
    meta: Dict[str, str] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    footer: Dict[str, float] = field(default_factory=dict)

    def header_line(self) -> str:
        return header_line({"name": self.name, **self.meta})


def _meta(grid: TorusGrid, radii: str, tol: float, **extra) -> Dict[str, str]:
    meta = {"grid": grid.label(), "radii": radii, "tol": "%g" % tol}
    meta.update({key: str(value) for key, value in extra.items()})
    return meta


def _context(grid: TorusGrid, radii: Optional[RadiiSet] = None, **extra) -> str:
    parts = [f"grid={grid.label()}"]
    parts.append(radii.cap_note(grid) if radii is not None else f"radii=none; cap L/4 = {grid.period / 4:g}")
    parts += [f"{key}={value}" for key, value in extra.items()]
    return " ".join(parts)


def calibration_meta(table: ScanTable, calibration: Calibration) -> None:
    """스캔 테이블 헤더에 그 테이블을 판정하는 보정 상수를 기록"""
    keys = CALIBRATION_KEYS_BY_TABLE.get(table.name, ())
    if keys:
        table.meta["calibration"] = ",".join(f"{key}:{getattr(calibration, key):.6g}" for key in keys)


# 공통 도구

def parallel_rows(func: Callable, keys: Sequence, workers: int = 1, label: str = "스캔") -> List:
    """키별 작업을 스레드 풀에서 실행하고 키 순서로 정렬한 결과 목록을 돌려준다"""
    start_time = time.time()
    total = len(keys)
    results = {}
    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as executor:
        futures = {executor.submit(func, key): key for key in keys}
        for done, future in enumerate(as_completed(futures), start=1):
            results[futures[future]] = future.result()
            elapsed = time.time() - start_time
            progress = done / total * 100
            logger.info(f"{label} 진행률: {done}/{total} ({progress:.1f}%) - 경과시간: {elapsed:.1f}초")
    return [results[key] for key in sorted(results)]


def loglog_slope(x: Iterable[float], y: Iterable[float]) -> float:
    """log-log 최소제곱 기울기"""
    x = np.log(np.asarray(list(x), dtype=np.float64))
    y = np.log(np.asarray(list(y), dtype=np.float64))
    if x.size < 2:
        return float("nan")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def corpus_frequency_limit(grid: TorusGrid) -> int:
    """말뭉치 주파수 인덱스 상한 (|n| < 2^(j_max-2)·L)"""
    return int(2 ** (grid.j_max - 2) * grid.period)


def random_band_limited(grid: TorusGrid, count: int, seed: int) -> List[GridFunction]:
    """고정 시드 실수 삼각다항식 (계수 U[-1,1], ‖f‖∞ = 1 로 정규화)"""
    rng = np.random.default_rng(seed)
    limit = corpus_frequency_limit(grid)
    if limit < 1 or limit > grid.size // 2:
        raise ConfigurationError(f"grid {grid.label()} is too coarse for the random corpus", field="grid")
    size = grid.size
    signs = np.where(np.arange(limit) % 2 == 0, 1.0, -1.0)
    corpus = []
    for _ in range(count):
        a = rng.uniform(-1.0, 1.0, limit)
        b = rng.uniform(-1.0, 1.0, limit)
        spectrum = np.zeros(size // 2 + 1, dtype=np.complex128)
        # x_i + L/2 = iΔ 이므로 n 번째 계수에 (-1)^n 위상이 붙는다
        spectrum[:limit] = 0.5 * size * signs * (a - 1j * b)
        spectrum[0] = size * a[0]
        samples = sfft.irfft(spectrum, n=size)
        samples = samples / np.max(np.abs(samples))
        corpus.append(GridFunction.from_samples(grid, samples))
    return corpus


def adversarial_functions(grid: TorusGrid, seed: int = 0) -> List[GridFunction]:
    """계단, 스파이크, 상수, 부호 패턴, 교대 부호, 무작위 계단"""
    x = grid.abscissas()
    center = grid.center_index
    spike = np.zeros(grid.size)
    spike[center] = 1.0
    rng = np.random.default_rng(seed)
    levels = rng.uniform(-1.0, 1.0, 16)
    blocks = np.repeat(levels, grid.size // 16)
    return [
        GridFunction.constant(grid, 0.7),
        GridFunction.from_samples(grid, np.where(x >= 0, 1.0, 0.0)),
        GridFunction.from_samples(grid, spike),
        GridFunction.from_samples(grid, np.sign(x)),
        GridFunction.from_samples(grid, np.where(np.arange(grid.size) % 2 == 0, 1.0, -1.0)),
        GridFunction.from_samples(grid, blocks),
    ]


# 검증: 지배 사슬과 오라클

def check_domination(count: int, seed: int, grid: Optional[TorusGrid] = None,
                     radii: Optional[RadiiSet] = None) -> List[CheckReport]:
    """M♦f <= M♯f <= 2Mf 를 무작위 대역 제한 함수와 적대적 함수에서 점별 확인"""
    grid = grid or make_grid(16, 1024)
    radii = radii or RadiiSet.dyadic(grid)
    functions = random_band_limited(grid, count, seed) + adversarial_functions(grid, seed)
    worst_lower = math.inf
    worst_upper = math.inf
    for f in functions:
        lower_slack, upper_slack = domination_margins(f, radii)
        worst_lower = min(worst_lower, lower_slack)
        worst_upper = min(worst_upper, upper_slack)
    logger.info(f"지배 사슬 검증 완료: {len(functions)}개 함수, 최소 여유 {worst_lower:.3e} / {worst_upper:.3e}")
    context = _context(grid, radii, functions=len(functions), seed=seed)
    return [
        CheckReport.lower("domination_diamond_le_sharp", worst_lower, DOMINATION_SLACK,
                          "pointwise domination: diamond maximal <= sharp maximal", context),
        CheckReport.lower("domination_sharp_le_2hl", worst_upper, DOMINATION_SLACK,
                          "pointwise domination: sharp maximal <= 2 x Hardy-Littlewood", context),
    ]


def _oracle_hl(samples: np.ndarray, radii: Sequence[int]) -> np.ndarray:
    size = samples.shape[0]
    out = np.zeros(size)
    for i in range(size):
        for k in radii:
            window = [abs(samples[(i + l) % size]) for l in range(-k, k + 1)]
            out[i] = max(out[i], sum(window) / (2 * k + 1))
    return out


def _oracle_sharp(samples: np.ndarray, radii: Sequence[int]) -> np.ndarray:
    size = samples.shape[0]
    out = np.zeros(size)
    for i in range(size):
        for k in radii:
            window = [samples[(i + l) % size] for l in range(-k, k + 1)]
            mean = sum(window) / (2 * k + 1)
            out[i] = max(out[i], sum(abs(v - mean) for v in window) / (2 * k + 1))
    return out


def _oracle_diamond(samples: np.ndarray, radii: Sequence[int]) -> np.ndarray:
    size = samples.shape[0]
    out = np.zeros(size)
    for i in range(size):
        for k in radii:
            total = sum(np.sign(l) * samples[(i + l) % size] for l in range(-k, k + 1))
            out[i] = max(out[i], abs(total) / (2 * k + 1))
    return out


def oracle_equivalence_check(seed: int, count: int = 3) -> List[CheckReport]:
    """M <= 64 격자, 모든 정수 반지름에서 이중 루프 오라클과 비교"""
    grid = make_grid(*ORACLE_GRID)
    radii = RadiiSet.all_integers(grid)
    functions = random_band_limited(grid, count, seed) + adversarial_functions(grid, seed)
    worst = 0.0
    worst_tk = 0.0
    for f in functions:
        scale = max(1.0, norm(f, "linf"))
        pairs = [
            (hardy_littlewood(f, radii), _oracle_hl(f.samples, radii.indices)),
            (sharp_maximal(f, radii, method="direct"), _oracle_sharp(f.samples, radii.indices)),
            (sharp_maximal(f, radii, method="rank"), _oracle_sharp(f.samples, radii.indices)),
            (diamond_maximal(f, radii), _oracle_diamond(f.samples, radii.indices)),
        ]
        for result, expected in pairs:
            worst = max(worst, float(np.max(np.abs(result.values.samples - expected))) / scale)
        tk_radii = RadiiSet.explicit([2, 4])
        spectral_path = tk_star(f, diamond_kernel(), tk_radii, method="spectral").values.samples
        direct_path = tk_star(f, diamond_kernel(), tk_radii, method="direct").values.samples
        worst_tk = max(worst_tk, float(np.max(np.abs(spectral_path - direct_path))) / scale)
    context = _context(grid, radii, functions=len(functions))
    return [
        CheckReport.upper("oracle_window_operators", worst, EXACT_TOLERANCE,
                          "maximal operators equal brute-force window loops", context),
        CheckReport.upper("oracle_tk_star_paths", worst_tk, 1e-10,
                          "spectral and direct quadrature maximal convolutions agree", context),
    ]


# 검증: 스펙트럴 대수

def projection_algebra_check(corpus: Sequence[GridFunction]) -> List[CheckReport]:
    """P̃_j P_j = P_j, 텔레스코핑 잔차, 분할 항등식, 매장 상수"""
    grid = corpus[0].grid
    worst_idempotent = 0.0
    worst_telescope = 0.0
    worst_embedding = 0.0
    c_emb = embedding_constant(grid)
    for f in corpus:
        scale = max(norm(f, "linf"), 1e-300)
        for j in range(1, grid.j_max + 1):
            band = project(f, "band", j)
            again = project(band, "widened", j)
            worst_idempotent = max(worst_idempotent, norm(again - band, "linf") / scale)
        worst_telescope = max(worst_telescope, telescope_residual(f, grid.j_max))
        worst_embedding = max(worst_embedding, besov_norm(f).besov_part / (c_emb * scale))

    partition = np.array(multiplier(grid, "low", 0).values)
    for j in range(1, grid.j_max + 1):
        partition = partition + multiplier(grid, "band", j).values
    partition_error = float(np.max(np.abs(partition - multiplier(grid, "low", grid.j_max).values)))

    context = _context(grid, functions=len(corpus), j_max=grid.j_max, C_emb="%.6g" % c_emb)
    return [
        CheckReport.upper("projection_widened_band_idempotent", worst_idempotent, EXACT_TOLERANCE,
                          "widened projection fixes each band projection", context),
        CheckReport.upper("projection_telescope_residual", worst_telescope, 1e-10,
                          "low part plus bands reproduces band-limited input", context),
        CheckReport.upper("projection_partition_of_unity", partition_error, 1e-14,
                          "low multiplier plus band multipliers telescopes", context),
        CheckReport.upper("besov_embedding", worst_embedding, 1.0 + EXACT_TOLERANCE,
                          "Besov part bounded by C_emb times sup norm", context),
    ]


def mollifier_ratios(corpus: Sequence[GridFunction]) -> List[float]:
    return [mollifier_ratio(g) for g in corpus]


def mollifier_check(corpus: Sequence[GridFunction], calibration: Calibration) -> List[CheckReport]:
    ratios = mollifier_ratios(corpus)
    context = _context(corpus[0].grid, functions=len(corpus))
    return [CheckReport.upper("mollifier_bound", max(ratios), calibration.C_rho,
                              "sup norm of the mollified function bounded by its Besov part", context)]


# 스캔: 리틀우드-페일리 커널

def lp_kernel_facts(grid: TorusGrid, j_range: Optional[Sequence[int]] = None, workers: int = 1,
                    tol: float = DEFAULT_TOLERANCE) -> ScanTable:
    """h_j, h̃_j 의 ‖h‖₁, ‖h'‖₁/2^j, 2^j∫|x||h|, 평균 잔차"""
    j_values = list(j_range) if j_range is not None else list(range(1, grid.j_max))
    j_values = [j for j in j_values if 1 <= j <= grid.j_max - 1]
    x = np.abs(grid.abscissas())

    def measure(j: int) -> Dict[str, float]:
        row = {"j": j}
        for prefix, kind in (("h", "band"), ("wide", "widened")):
            h = lp_kernel(grid, kind, j)
            row[f"{prefix}_l1"] = norm(h, "l1")
            row[f"{prefix}_deriv"] = norm(spectral_derivative(h), "l1") / 2 ** j
            row[f"{prefix}_moment"] = 2 ** j * grid.spacing * float(np.sum(x * np.abs(h.samples)))
            row[f"{prefix}_mean_residual"] = abs(grid.spacing * float(np.sum(h.samples)))
        return row

    rows = parallel_rows(measure, j_values, workers, "LP 커널 스캔")
    return ScanTable("lp-facts", pd.DataFrame(rows), _meta(grid, "none", tol))


def lp_facts_checks(table: ScanTable, grid: TorusGrid) -> List[CheckReport]:
    frame = table.frame
    context = _context(grid, j_range=f"{int(frame['j'].min())}..{int(frame['j'].max())}")
    residual = float(frame[["h_mean_residual", "wide_mean_residual"]].to_numpy().max())
    reports = [
        CheckReport.upper("lp_kernel_mean_zero", residual, EXACT_TOLERANCE,
                          "band kernels have zero mean", context),
        CheckReport.lower("lp_kernel_l1_at_least_plateau", float(frame["h_l1"].min()), 1.0 - EXACT_TOLERANCE,
                          "kernel L1 norm dominates the multiplier plateau value", context),
    ]
    for column in ("h_l1", "h_deriv", "h_moment", "wide_l1", "wide_deriv", "wide_moment"):
        spread = float(frame[column].max() / frame[column].min())
        reports.append(CheckReport.upper(f"lp_kernel_uniform_{column}", spread, UNIFORMITY_FACTOR,
                                         "scale-normalised kernel quantities are uniform in j", context))
    return reports


# 스캔: 커널 감쇠

def kernel_band_l1(weight_spectrum: np.ndarray, grid: TorusGrid, j: int) -> float:
    """‖K_r ∗ h̃_j‖₁ = Σ|ifft(fft(Δ·K_r)·m̃_j)|"""
    return float(np.sum(np.abs(sfft.ifft(weight_spectrum * multiplier(grid, "widened", j).values))))


def kernel_decay_scan(kernel: Kernel, grid: TorusGrid, j_range: Optional[Sequence[int]] = None,
                      k_min: int = 32, workers: int = 1, tol: float = DEFAULT_TOLERANCE) -> ScanTable:
    """행 {j, r, s = 2^j r, lhs = ‖K_r ∗ h̃_j‖₁, bound = min(s, 1/s), ratio}"""
    if not kernel.mean_zero:
        raise ConfigurationError(f"kernel '{kernel.name}' is not mean-zero", field="kernel")
    notes = []
    requested = list(j_range) if j_range is not None else list(range(1, grid.j_max))
    j_values = [j for j in requested if 1 <= j <= grid.j_max]
    skipped = sorted(set(requested) - set(j_values))
    if skipped:
        notes.append(f"skipped j={skipped} (outside 1..j_max={grid.j_max})")

    k_values = []
    k = int(k_min)
    while k * grid.spacing * kernel.support_radius <= grid.period / 4:
        k_values.append(k)
        k *= 2
    if not k_values:
        raise AdmissibilityError(f"no radius admissible for k_min={k_min} on grid {grid.label()}", field="k_min")

    def measure(k_index: int) -> List[Dict[str, float]]:
        spectrum = sfft.fft(kernel_weights(kernel, grid, k_index))
        r = k_index * grid.spacing
        rows = []
        for j in j_values:
            s = 2.0 ** j * r
            lhs = kernel_band_l1(spectrum, grid, j)
            bound = min(s, 1.0 / s)
            rows.append({"j": j, "k": k_index, "r": r, "s": s, "lhs": lhs, "bound": bound, "ratio": lhs / bound})
        return rows

    nested = parallel_rows(measure, k_values, workers, f"커널 감쇠 스캔({kernel.name})")
    frame = pd.DataFrame([row for rows in nested for row in rows]).sort_values(["j", "r"]).reset_index(drop=True)

    footer = {"max_ratio": float(frame["ratio"].max())}
    for label, window in (("small", KERNEL_SMALL_WINDOW), ("large", KERNEL_LARGE_WINDOW)):
        fit_j, slope = _window_slope(frame, window)
        footer[f"slope_{label}"] = slope
        footer[f"slope_{label}_j"] = float(fit_j) if fit_j is not None else float("nan")
        if fit_j is None:
            notes.append(f"no j covers the {label} window s in [{window[0]:g}, {window[1]:g}]")
    meta = _meta(grid, f"k>={k_min} dyadic", tol, kernel=kernel.name)
    return ScanTable(f"kernel-decay-{kernel.name}", frame, meta, notes, footer)


def _window_slope(frame: pd.DataFrame, window: Tuple[float, float]) -> Tuple[Optional[int], float]:
    """창 안의 이진 s 점을 모두 가진 가장 작은 j 에서 기울기"""
    expected = int(round(math.log2(window[1] / window[0]))) + 1
    for j in sorted(frame["j"].unique()):
        rows = frame[(frame["j"] == j) & (frame["s"] >= window[0]) & (frame["s"] <= window[1])]
        if len(rows) >= expected:
            return int(j), loglog_slope(rows["s"], rows["lhs"])
    return None, float("nan")


def kernel_decay_checks(table: ScanTable, grid: TorusGrid, calibration: Calibration) -> List[CheckReport]:
    footer = table.footer
    context = _context(grid, RadiiSet.explicit(table.frame["k"]),
                       small_j=footer.get("slope_small_j"), large_j=footer.get("slope_large_j"))
    anchor = "maximal kernel against widened band decays like min(s, 1/s)"
    return [
        CheckReport.lower("kernel_decay_slope_small_min", footer["slope_small"], KERNEL_SMALL_SLOPE[0], anchor, context),
        CheckReport.upper("kernel_decay_slope_small_max", footer["slope_small"], KERNEL_SMALL_SLOPE[1], anchor, context),
        CheckReport.lower("kernel_decay_slope_large_min", footer["slope_large"], KERNEL_LARGE_SLOPE[0], anchor, context),
        CheckReport.upper("kernel_decay_slope_large_max", footer["slope_large"], KERNEL_LARGE_SLOPE[1], anchor, context),
        CheckReport.upper("kernel_decay_ratio", footer["max_ratio"], calibration.kernel_decay_ratio, anchor, context),
    ]


# 스캔: 변조 범프

def glambda_scan(lambda_list: Sequence[float], j_range: Sequence[int], grid: TorusGrid,
                 workers: int = 1, tol: float = DEFAULT_TOLERANCE) -> ScanTable:
    """행 {kind=band, λ, j, ‖P_j g_λ‖∞, min(λ/2^j, 2^j/λ)} 와 {kind=low, λ, ‖P_{<=0} g_λ‖∞, 1/λ}"""
    j_values = [j for j in j_range if 1 <= j <= grid.j_max]
    notes = []
    if len(j_values) < len(list(j_range)):
        notes.append(f"j restricted to 1..{grid.j_max}")

    def measure(lam: float) -> List[Dict]:
        g = modulated_bump(lam, grid)
        low_band, per_band = band_sup_norms(g)
        rows = [{"kind": "low", "lambda": lam, "j": 0, "value": low_band, "bound": 1.0 / lam,
                 "ratio": low_band * lam}]
        for j, value in per_band:
            if j in j_values:
                bound = min(lam / 2 ** j, 2 ** j / lam)
                rows.append({"kind": "band", "lambda": lam, "j": j, "value": value, "bound": bound,
                             "ratio": value / bound})
        return rows

    nested = parallel_rows(measure, sorted(lambda_list), workers, "g_λ 스캔")
    frame = pd.DataFrame([row for rows in nested for row in rows])
    footer = {
        "max_band_ratio": float(frame.loc[frame["kind"] == "band", "ratio"].max()),
        "max_low_ratio_lambda_ge_4": float(frame.loc[(frame["kind"] == "low") & (frame["lambda"] >= 4), "ratio"].max()),
    }
    return ScanTable("glambda", frame, _meta(grid, "none", tol), notes, footer)


def glambda_checks(table: ScanTable, grid: TorusGrid, calibration: Calibration) -> List[CheckReport]:
    context = _context(grid, lambdas=int(table.frame["lambda"].nunique()))
    return [
        CheckReport.upper("glambda_band_ratio", table.footer["max_band_ratio"], calibration.glambda_ratio,
                          "band pieces of a modulated bump decay like min(lambda/2^j, 2^j/lambda)", context),
        CheckReport.upper("glambda_low_ratio", table.footer["max_low_ratio_lambda_ge_4"], calibration.glambda_low_bound,
                          "low part of a modulated bump is O(1/lambda)", context),
    ]


def lambda_grid(exponent_max: float, grid: TorusGrid) -> List[float]:
    """λ = 2^1.0, 2^1.5, ..., 2^exponent_max (나이퀴스트 여유 안)"""
    values = []
    exponent = 1.0
    while exponent <= exponent_max + 1e-12:
        lam = 2.0 ** exponent
        if 4 * lam <= grid.nyquist:
            values.append(lam)
        exponent += 0.5
    return values


# 스캔: 공백 급수의 L¹ 크기

def lacunary_l1_oracle(N: int) -> float:
    """∫₀¹|S_N| 를 2^(N+3) 조각의 적응 구적으로 계산"""
    pieces = 2 ** (N + 3)
    frequencies = 2.0 * np.pi * 2.0 ** np.arange(1, N + 1)

    def integrand(t: float) -> float:
        return abs(float(np.sum(np.sin(frequencies * t))))

    return float(sum(integrate.quad(integrand, i / pieces, (i + 1) / pieces, limit=100)[0] for i in range(pieces)))


def lacunary_l1_scan(grid: TorusGrid, N_range: Sequence[int], workers: int = 1,
                     tol: float = DEFAULT_TOLERANCE) -> ScanTable:
    """행 {N, ∫₀¹|S_N|, /√N, 구적 오라클(N <= 8), 상대 차, 허용 차}"""
    limit = max_admissible_N(grid)
    N_values = [N for N in N_range if 1 <= N <= limit]
    notes = [f"skipped N > {limit} (max admissible N = {limit})"] if len(N_values) < len(list(N_range)) else []

    def measure(N: int) -> Dict[str, float]:
        value = unit_period_l1(lacunary_sum(N, grid))
        row = {"N": N, "unit_l1": value, "ratio": value / math.sqrt(N),
               "oracle": float("nan"), "oracle_rel_diff": float("nan"), "oracle_tolerance": float("nan")}
        if N <= LACUNARY_ORACLE_MAX_N:
            oracle = lacunary_l1_oracle(N)
            row["oracle"] = oracle
            row["oracle_rel_diff"] = abs(value - oracle) / oracle
            # 영점 근처 꺾임의 좌측 리만 합 오차 규모
            row["oracle_tolerance"] = 4.0 * (2 ** N * grid.spacing) ** 2 + 1e-9
        return row

    rows = parallel_rows(measure, N_values, workers, "공백 급수 스캔")
    footer = {"limit_heuristic": 1.0 / math.sqrt(math.pi)}
    return ScanTable("lacunary-l1", pd.DataFrame(rows), _meta(grid, "none", tol), notes, footer)


def lacunary_checks(table: ScanTable, grid: TorusGrid) -> List[CheckReport]:
    frame = table.frame
    context = _context(grid)
    anchor = "L1 norm of a lacunary sum grows like sqrt(N)"
    sized = frame[frame["N"] >= 2]
    reports = [
        CheckReport.lower("lacunary_l1_ratio_min", float(sized["ratio"].min()), LACUNARY_BAND[0], anchor, context),
        CheckReport.upper("lacunary_l1_ratio_max", float(sized["ratio"].max()), LACUNARY_BAND[1], anchor, context),
    ]
    with_oracle = frame.dropna(subset=["oracle"])
    if len(with_oracle):
        worst = float((with_oracle["oracle_rel_diff"] / with_oracle["oracle_tolerance"]).max())
        reports.append(CheckReport.upper("lacunary_l1_quadrature_oracle", worst, 1.0,
                                         "grid integral agrees with adaptive quadrature", context))

    unit_grid = make_grid(*UNIT_L1_GRID)
    single = unit_period_l1(lacunary_sum(1, unit_grid))
    reports.append(CheckReport.upper("lacunary_l1_single_term", abs(single - 2.0 / math.pi), 1e-6,
                                     "mean of |sin| over one period is 2/pi", _context(unit_grid)))
    return reports


# 스캔: 반례 family 비율

def ratio_scan(N_range: Sequence[int], grid: TorusGrid, workers: int = 1, tol: float = DEFAULT_TOLERANCE,
               strict: bool = False) -> ScanTable:
    """N 별 S_N, F_N, M♯F_N, f_N, M♯f_N, M♦f_N 의 크기와 비율 R♯, R♦"""
    limit = max_admissible_N(grid)
    requested = list(N_range)
    if strict and requested and max(requested) > limit:
        CounterexampleSpec(max(requested), grid)
    N_values = [N for N in requested if 1 <= N <= limit]
    notes = []
    if len(N_values) < len(requested):
        notes.append(f"skipped N outside 1..{limit} (max admissible N = {limit})")
    radii = RadiiSet.dyadic(grid)
    near_origin = indices_within(grid, 1.0)

    def measure(N: int) -> Dict[str, float]:
        spec = CounterexampleSpec(N, grid)
        m = spec.m_N
        F = make_FN(N, grid)
        integral = unit_period_l1(lacunary_sum(N, grid))
        sharp_F = sharp_maximal(F, radii).values
        diamond_F = diamond_maximal(F, radii).values
        sharp_min = float(np.min(sharp_F.samples[near_origin]))

        # f_N, M♯f_N, M♦f_N = Dil_m(·) 를 주기 L 로 0 확장
        f_B = b_norm(embed(dilate_dyadic(F, m), grid.period)).total
        sharp_f_B = b_norm(embed(dilate_dyadic(sharp_F, m), grid.period)).total
        diamond_f_B = b_norm(embed(dilate_dyadic(diamond_F, m), grid.period)).total
        return {
            "N": N,
            "m_N": m,
            "unit_l1": integral,
            "unit_l1_ratio": integral / math.sqrt(N),
            "FN_besov": besov_norm(F).besov_part,
            "FN_l2": norm(F, "l2"),
            "sharp_min": sharp_min,
            "sharp_min_ratio": sharp_min / math.sqrt(N),
            "sharp_FN_besov": besov_norm(sharp_F).besov_part,
            "fN_B": f_B,
            "sharp_fN_B": sharp_f_B,
            "diamond_fN_B": diamond_f_B,
            "R_sharp": sharp_f_B / f_B,
            "R_diamond": diamond_f_B / f_B,
            "predicted": math.sqrt(N) / (math.log2(N) + 1.0),
        }

    rows = parallel_rows(measure, N_values, workers, "비율 스캔")
    frame = pd.DataFrame(rows)
    meta = _meta(grid, radii.label(), tol, cap=f"r<={radii.max_index * grid.spacing:g}")
    return ScanTable("ratio", frame, meta, notes)


def ratio_checks(table: ScanTable, grid: TorusGrid, calibration: Calibration, profile: Profile) -> List[CheckReport]:
    frame = table.frame
    tail = frame[frame["N"] >= TREND_N_LO]
    context = _context(grid, RadiiSet.dyadic(grid), N=f"{int(frame['N'].min())}..{int(frame['N'].max())}")
    if len(tail) < 2:
        return [CheckReport.lower("ratio_scan_rows", float(len(tail)), 2.0,
                                  "counterexample family needs at least two admissible N >= 4", context)]
    reports = [
        CheckReport.upper("FN_besov_uniform", float(frame["FN_besov"].max() / frame["FN_besov"].min()),
                          FN_BESOV_SPREAD, "Besov part of F_N bounded uniformly in N", context),
        CheckReport.upper("sharp_min_uniform", float(tail["sharp_min_ratio"].max() / tail["sharp_min_ratio"].min()),
                          UNIFORMITY_FACTOR, "sharp maximal of F_N near the origin is comparable to sqrt(N)", context),
        CheckReport.lower("sharp_min_lower_bound", float(tail["sharp_min_ratio"].min()), calibration.sharp_min_ratio_floor,
                          "sharp maximal of F_N near the origin is at least c sqrt(N)", context),
    ]
    slope = loglog_slope(tail["N"], tail["sharp_FN_besov"])
    low, high = profile.sharp_slope_window
    anchor = "Besov part of the sharp maximal of F_N grows like sqrt(N)"
    reports.append(CheckReport.lower("sharp_besov_slope_min", slope, low, anchor, context))
    reports.append(CheckReport.upper("sharp_besov_slope_max", slope, high, anchor, context))

    reports.append(CheckReport.upper("diamond_ratio_bounded", float(tail["R_diamond"].max() / tail["R_diamond"].min()),
                                     DIAMOND_RATIO_SPREAD, "diamond maximal is bounded on B along f_N", context))
    growth = float(tail["R_sharp"].iloc[-1] / tail["R_sharp"].iloc[0])
    predicted_growth = float(tail["predicted"].iloc[-1] / tail["predicted"].iloc[0])
    reports.append(CheckReport.lower("sharp_ratio_growth", growth, profile.sharp_growth_min,
                                     "sharp maximal is unbounded on B along f_N",
                                     f"{context} predicted_growth={predicted_growth:.4g}"))
    correlation = float(np.corrcoef(tail["R_sharp"], tail["predicted"])[0, 1])
    reports.append(CheckReport.lower("sharp_ratio_correlation", correlation, 0.0,
                                     "sharp ratio follows sqrt(N)/(log2 N + 1)", context))
    reports.append(CheckReport.lower("fN_B_min", float(frame["fN_B"].min()), calibration.fN_B_min,
                                     "B norms of f_N stay in a bounded band", context))
    reports.append(CheckReport.upper("fN_B_max", float(frame["fN_B"].max()), calibration.fN_B_max,
                                     "B norms of f_N stay in a bounded band", context))
    return reports


# 검증: 이진 확대

@dataclass
class DilationMeasurement:
    commutation_residual: float = 0.0
    plus_ratio: float = 0.0
    minus_ratio: float = 0.0
    notes: List[str] = field(default_factory=list)


def measure_dilation(f_corpus: Sequence[GridFunction], m_range: Sequence[int],
                     radii: Optional[RadiiSet] = None, tol: float = DEFAULT_TOLERANCE) -> DilationMeasurement:
    """교환 잔차와 ‖Dil_m f‖_𝓑/‖f‖_𝓑, ‖Dil_{-m} f‖_𝓑/((m+1)‖f‖_𝓑) 의 최댓값

    주기 재부착(dilate_dyadic)은 표본을 바꾸지 않아 교환이 자명하므로, 교환 잔차는
    같은 주기 L 의 2^m 배 세밀한 격자에서 f(2^m x) 를 직접 샘플링해 작용소를 다시 계산해 잰다.
    """
    result = DilationMeasurement()
    operators = (sharp_maximal, diamond_maximal, hardy_littlewood)
    for index, f in enumerate(f_corpus):
        chosen = radii or RadiiSet.dyadic(f.grid)
        base = besov_norm(f).besov_part
        originals = [op(f, chosen).values for op in operators]
        for m in m_range:
            if m < 0 or m > 4:
                result.notes.append(f"m={m} outside 0..4 skipped")
                continue
            if m > 0:
                resampled = dilate_on_period(f, m)
                for op, original in zip(operators, originals):
                    lhs = op(resampled, chosen).values.samples
                    rhs = dilate_on_period(original, m).samples
                    scale = max(1.0, float(np.max(np.abs(rhs))))
                    result.commutation_residual = max(result.commutation_residual,
                                                      float(np.max(np.abs(lhs - rhs))) / scale)
            if base == 0.0:
                continue
            dilated = dilate_dyadic(f, m)
            result.plus_ratio = max(result.plus_ratio, besov_norm(dilated).besov_part / base)
            try:
                shrunk = dilate_dyadic(f, -m, tol)
            except DilationError as e:
                result.notes.append(f"f#{index} m=-{m}: {e}")
                continue
            result.minus_ratio = max(result.minus_ratio, besov_norm(shrunk).besov_part / ((m + 1) * base))
    return result


def dilation_lemma_check(f_corpus: Sequence[GridFunction], m_range: Sequence[int], calibration: Calibration,
                         radii: Optional[RadiiSet] = None, tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    grid = f_corpus[0].grid
    measured = measure_dilation(f_corpus, m_range, radii, tol)
    notes = f" notes={len(measured.notes)}" if measured.notes else ""
    context = _context(grid, radii or RadiiSet.dyadic(grid),
                       m=f"{min(m_range)}..{max(m_range)}", functions=len(f_corpus)) + notes
    return [
        CheckReport.upper("dilation_commutation", measured.commutation_residual, DILATION_RESAMPLE_TOLERANCE,
                          "maximal operators commute with dyadic dilations (same-period resampling)", context),
        CheckReport.upper("dilation_positive_besov", measured.plus_ratio, calibration.C_plus,
                          "Besov part grows at most by a constant under dilation", context),
        CheckReport.upper("dilation_negative_besov", measured.minus_ratio, calibration.C_minus,
                          "Besov part grows at most like (m+1) under contraction", context),
    ]


def diamond_ratios(f_corpus: Sequence[GridFunction], radii: Optional[RadiiSet] = None) -> List[float]:
    ratios = []
    for f in f_corpus:
        chosen = radii or RadiiSet.dyadic(f.grid)
        ratios.append(b_norm(diamond_maximal(f, chosen).values).total / b_norm(f).total)
    return ratios


def diamond_boundedness_check(f_corpus: Sequence[GridFunction], calibration: Calibration,
                              radii: Optional[RadiiSet] = None) -> List[CheckReport]:
    ratios = diamond_ratios(f_corpus, radii)
    grid = f_corpus[0].grid
    context = _context(grid, radii or RadiiSet.dyadic(grid), functions=len(f_corpus))
    return [CheckReport.upper("diamond_bounded_on_corpus", max(ratios), calibration.diamond_ratio,
                              "diamond maximal is bounded on B", context)]


# 스캔: 일반 커널 T*_K

def tk_star_bound_scan(kernels: Sequence[Kernel], corpus: Sequence[GridFunction], grid: TorusGrid,
                       N_values: Sequence[int] = (), workers: int = 1, tol: float = DEFAULT_TOLERANCE) -> ScanTable:
    """행 {kernel, source, index, ‖T*_K f‖∞, ‖f‖_𝓑, ratio}"""
    radii = RadiiSet.dyadic(grid)
    sources: List[Tuple[str, int, GridFunction]] = [("corpus", i, f) for i, f in enumerate(corpus)]
    sources += [("F_N", N, make_FN(N, grid)) for N in N_values if N <= max_admissible_N(grid)]
    keys = [(kernel_index, source_index) for kernel_index in range(len(kernels)) for source_index in range(len(sources))]
    besov_cache = {i: besov_norm(f).besov_part for i, (_, _, f) in enumerate(sources)}

    def measure(key: Tuple[int, int]) -> Dict:
        kernel = kernels[key[0]]
        source, index, f = sources[key[1]]
        sup = norm(tk_star(f, kernel, radii).values, "linf")
        besov = besov_cache[key[1]]
        return {"kernel": kernel.name, "source": source, "index": index, "tstar_sup": sup,
                "besov": besov, "ratio": sup / besov if besov else float("nan")}

    rows = parallel_rows(measure, keys, workers, "T*_K 스캔")
    frame = pd.DataFrame(rows)
    footer = {f"max_ratio_{kernel.name}": float(frame.loc[frame["kernel"] == kernel.name, "ratio"].max())
              for kernel in kernels}
    return ScanTable("tk-star-bound", frame, _meta(grid, radii.label(), tol), [], footer)


# 스위트

@dataclass
class SuiteResult:
    profile: str
    reports: List[CheckReport] = field(default_factory=list)
    tables: List[ScanTable] = field(default_factory=list)
    incomplete: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.incomplete and all(report.passed for report in self.reports)


class VerificationSuite:
    """프로파일 단위로 모든 검증과 스캔을 실행"""

    def __init__(self, profile: str = "quick", seed: int = 42, workers: int = 1, tol: float = DEFAULT_TOLERANCE,
                 calibration_path: Optional[str] = None, processor: Optional[ResultFileProcessor] = None):
        self.profile = get_profile(profile)
        self.seed = seed
        self.workers = workers
        self.tol = tol
        self.processor = processor
        # 손상된 보정 파일은 여기서 ConfigurationError (자동 재보정 없음)
        self.calibration = Calibration.load(calibration_path)
        self.grid = self.profile.grid
        self.domination_grid = self.profile.domination_grid

    def memory_available(self) -> bool:
        available_mb = psutil.virtual_memory().available / 1024 / 1024
        needed_mb = self.profile.memory_estimate_mb * max(1, min(self.workers, 2))
        if available_mb < needed_mb:
            logger.warning(f"⚠️  메모리 부족: 사용 가능 {available_mb:.0f}MB < 필요 {needed_mb}MB")
            return False
        return True

    def _log_memory(self, label: str):
        process = psutil.Process()
        logger.info(f"{label} - 메모리 사용량: {process.memory_info().rss / 1024 / 1024:.1f}MB")

    def stages(self) -> List[Tuple[str, bool, Callable[[], Tuple[List[CheckReport], List[ScanTable]]]]]:
        """(이름, 메모리 가드 필요 여부, 실행 함수)"""
        profile = self.profile
        calibration = self.calibration
        grid = self.grid
        dom_grid = self.domination_grid
        seed = self.seed
        workers = self.workers
        tol = self.tol
        n_lo, n_hi = profile.n_range

        def domination():
            reports = check_domination(100, seed, dom_grid)
            reports += oracle_equivalence_check(seed)
            return reports, []

        def spectral_algebra():
            corpus = random_band_limited(dom_grid, 5, seed)
            reports = projection_algebra_check(corpus)
            reports += mollifier_check(random_band_limited(grid, profile.corpus_size, seed), calibration)
            return reports, []

        def lp_facts():
            table = lp_kernel_facts(grid, workers=workers, tol=tol)
            return lp_facts_checks(table, grid), [table]

        def kernel_decay():
            table = kernel_decay_scan(diamond_kernel(), grid, k_min=profile.kernel_k_min, workers=workers, tol=tol)
            smooth = kernel_decay_scan(odd_bump_kernel(), grid, k_min=profile.kernel_k_min, workers=workers, tol=tol)
            return kernel_decay_checks(table, grid, calibration), [table, smooth]

        def glambda():
            table = glambda_scan(lambda_grid(profile.lambda_exponent_max, grid),
                                 range(1, profile.glambda_j_max + 1), grid, workers, tol)
            return glambda_checks(table, grid, calibration), [table]

        def lacunary():
            table = lacunary_l1_scan(grid, range(1, n_hi + 1), workers, tol)
            return lacunary_checks(table, grid), [table]

        def dilation():
            corpus = random_band_limited(dom_grid, profile.dilation_corpus_size, seed)
            reports = dilation_lemma_check(corpus, range(0, 4), calibration, tol=tol)
            reports += diamond_boundedness_check(corpus, calibration)
            return reports, []

        def ratio():
            table = ratio_scan(range(n_lo, n_hi + 1), grid, workers, tol)
            return ratio_checks(table, grid, calibration, profile), [table]

        def tk_bound():
            corpus = random_band_limited(grid, profile.tk_corpus_size, seed)
            table = tk_star_bound_scan([diamond_kernel(), odd_bump_kernel()], corpus, grid,
                                       range(n_lo, n_hi + 1), workers, tol)
            return [], [table]

        return [
            ("지배 사슬", False, domination),
            ("스펙트럴 대수", False, spectral_algebra),
            ("LP 커널", True, lp_facts),
            ("커널 감쇠", True, kernel_decay),
            ("g_λ", True, glambda),
            ("공백 급수", True, lacunary),
            ("이진 확대", False, dilation),
            ("비율", True, ratio),
            ("T*_K", True, tk_bound),
        ]

    def run(self) -> SuiteResult:
        start_time = time.time()
        result = SuiteResult(self.profile.name)
        logger.info(f"🚀 검증 스위트 시작: 프로파일={self.profile.name}, 격자={self.grid.label()}, "
                    f"seed={self.seed}, workers={self.workers}")
        stages = self.stages()
        for index, (label, heavy, stage) in enumerate(stages, start=1):
            if heavy and not self.memory_available():
                result.incomplete = True
                result.notes.append(f"{label}: skipped (insufficient memory)")
                continue
            stage_start = time.time()
            try:
                reports, tables = stage()
            except MemoryError as e:
                logger.error(f"{label} 단계 메모리 부족: {e}")
                result.incomplete = True
                result.notes.append(f"{label}: memory exhausted")
                continue
            result.reports.extend(reports)
            result.tables.extend(tables)
            failed = sum(1 for report in reports if not report.passed)
            logger.info(f"{label} 완료 ({index}/{len(stages)}): 검증 {len(reports)}건, 실패 {failed}건 - "
                        f"소요시간: {time.time() - stage_start:.1f}초")
            self._log_memory(label)

        for table in result.tables:
            table.meta.setdefault("profile", self.profile.name)
            table.meta.setdefault("seed", str(self.seed))
            calibration_meta(table, self.calibration)
        if self.processor is not None:
            self.persist(result)
        status = "✅ 통과" if result.passed else "❌ 실패"
        logger.info(f"검증 스위트 완료: {status} ({len(result.reports)}건) - 소요시간: {time.time() - start_time:.1f}초")
        return result

    def persist(self, result: SuiteResult):
        for table in result.tables:
            self.processor.write_scan_table(table)
        self.processor.write_check_reports(result.reports)
        self.processor.save_summary_workbook(result.tables, result.reports)


def run_suite(profile: str = "quick", seed: int = 42, workers: int = 1, tol: float = DEFAULT_TOLERANCE,
              calibration_path: Optional[str] = None, processor: Optional[ResultFileProcessor] = None) -> SuiteResult:
    return VerificationSuite(profile, seed, workers, tol, calibration_path, processor).run()


def calibrate(profile: str = "reference", seed: int = 42, workers: int = 1,
              calibration_path: Optional[str] = None, tol: float = DEFAULT_TOLERANCE) -> Dict[str, float]:
    """보정 상수를 측정하고 x1.5 (하한은 ÷1.5) 여유를 적용해 보정 파일을 다시 쓴다"""
    chosen = get_profile(profile)
    grid = chosen.grid
    dom_grid = chosen.domination_grid
    n_lo, n_hi = chosen.n_range
    logger.info(f"🚀 보정 시작: 프로파일={chosen.name}, 격자={grid.label()}")

    corpus = random_band_limited(grid, chosen.corpus_size, seed)
    # 몰리파이어 비율은 격자가 거칠수록 크다 (quick 격자 말뭉치도 함께 측정)
    quick = PROFILES["quick"]
    corpus += random_band_limited(quick.grid, quick.corpus_size, seed)
    dilation_corpus = random_band_limited(dom_grid, chosen.dilation_corpus_size, seed)
    dilation = measure_dilation(dilation_corpus, range(0, 4), tol=tol)
    glambda = glambda_scan(lambda_grid(chosen.lambda_exponent_max, grid), range(1, chosen.glambda_j_max + 1),
                           grid, workers, tol)
    decay = kernel_decay_scan(diamond_kernel(), grid, k_min=chosen.kernel_k_min, workers=workers, tol=tol)
    ratio = ratio_scan(range(n_lo, n_hi + 1), grid, workers, tol).frame

    measured = {
        "C_rho": max(mollifier_ratios(corpus)),
        "C_plus": dilation.plus_ratio,
        "C_minus": dilation.minus_ratio,
        "glambda_ratio": glambda.footer["max_band_ratio"],
        "glambda_low_bound": glambda.footer["max_low_ratio_lambda_ge_4"],
        "kernel_decay_ratio": decay.footer["max_ratio"],
        "diamond_ratio": max(diamond_ratios(dilation_corpus)),
        "sharp_min_ratio_floor": float(ratio.loc[ratio["N"] >= TREND_N_LO, "sharp_min_ratio"].min()),
        "fN_B_min": float(ratio["fN_B"].min()),
        "fN_B_max": float(ratio["fN_B"].max()),
    }
    constants = {
        key: (value / HEADROOM if key in Calibration.LOWER_KEYS else value * HEADROOM)
        for key, value in measured.items()
    }
    ResultFileProcessor.write_calibration(constants, calibration_path or DEFAULT_CALIBRATION_PATH,
                                          comment=f"profile={chosen.name} grid={grid.label()} seed={seed}")
    logger.info(f"✅ 보정 완료: {len(constants)}개 상수")
    return constants
