#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
최대작용소 검증 CLI

명령: compute, bnorm, scan, verify, describe, calibrate
종료 코드: 0 성공, 1 검증 실패, 2 입력/설정 오류, 3 허용 범위/자원 오류
"""

import argparse
import json
import logging
import math
import os
import sys
import time
from typing import List, Optional, Sequence, Tuple

from constructions import CounterexampleSpec, describe, max_admissible_N
from errors import ConfigurationError, HarmonicAnalysisError
from experiments import (
    CALIBRATION_KEYS_BY_TABLE,
    PROFILES,
    Calibration,
    VerificationSuite,
    calibrate,
    calibration_meta,
    get_profile,
    glambda_scan,
    kernel_decay_scan,
    lacunary_l1_scan,
    lambda_grid,
    lp_kernel_facts,
    random_band_limited,
    ratio_scan,
    tk_star_bound_scan,
)
from file_processor import ResultFileProcessor
from maximal_ops import OPERATORS, KERNELS, apply_operator, get_kernel, odd_bump_kernel, diamond_kernel
from spectral import b_norm, configure_fft_workers
from torus_grid import DEFAULT_TOLERANCE, TorusGrid, make_grid, parse_radii

logger = logging.getLogger(__name__)

SCANS = ("ratio", "kernel-decay", "lp-facts", "glambda", "lacunary", "tk-bound")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_RESOURCE = 3


def setup_logging(out_dir: str):
    """로깅 설정 (<out>/maximal_ops.log + 표준 출력)"""
    os.makedirs(out_dir, exist_ok=True)
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(out_dir, 'maximal_ops.log'), encoding='utf-8'),
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )


def parse_grid(text: str) -> TorusGrid:
    """'L,M' 형식 격자"""
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) != 2:
        raise ConfigurationError(f"grid must be 'L,M' (got '{text}')", field="grid")
    try:
        period, size = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigurationError(f"grid must be 'L,M' (got '{text}')", field="grid")
    return make_grid(period, size)


def parse_range(text: Optional[str], default: Tuple[int, int], field_name: str) -> List[int]:
    """'a..b' 또는 'a' 형식 정수 범위"""
    if not text:
        low, high = default
        return list(range(low, high + 1))
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
        else:
            low = high = int(text)
    except ValueError:
        raise ConfigurationError(f"{field_name} must be 'a..b' (got '{text}')", field=field_name)
    if high < low:
        raise ConfigurationError(f"{field_name} is empty: {text}", field=field_name)
    return list(range(low, high + 1))


def range_text(values: Sequence[int]) -> str:
    return f"{values[0]}..{values[-1]}"


def parse_tolerance(value: float) -> float:
    if not (isinstance(value, float) and math.isfinite(value) and 0.0 < value < 1.0):
        raise ConfigurationError(f"tolerance must lie in (0, 1) (got {value})", field="tol")
    return value


class MaximalCli:
    """파싱된 인자로 명령을 실행하는 러너"""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.tol = parse_tolerance(float(args.tol))
        self.processor = ResultFileProcessor(args.out)
        configure_fft_workers(args.workers)

    def resolve_grid(self, default_profile: str = "quick") -> TorusGrid:
        if self.args.grid:
            return parse_grid(self.args.grid)
        return get_profile(self.args.profile or default_profile).grid

    def profile_name(self, default: str = "quick") -> str:
        return self.args.profile or default

    def run(self) -> int:
        handler = getattr(self, f"cmd_{self.args.command.replace('-', '_')}")
        return handler()

    # compute / bnorm

    def cmd_compute(self) -> int:
        args = self.args
        f = self.processor.read_grid_function(args.input)
        radii = parse_radii(args.radii, f.grid)
        kernel = get_kernel(args.kernel) if args.operator == "tk" else None
        start_time = time.time()
        result = apply_operator(args.operator, f, radii, kernel)

        stem = os.path.splitext(os.path.basename(args.input))[0]
        output = args.output or self.processor.path_for(f"{stem}_{result.operator.replace(':', '_')}.txt")
        meta = {"operator": result.operator, "radii": radii.label(), "cap": f"r<={radii.max_index * f.grid.spacing:g}"}
        self.processor.write_grid_function(result.values, output, meta)
        self.processor.write_json(result.sidecar(), os.path.splitext(output)[0] + ".json")
        logger.info(f"최대함수 계산 완료: {result.operator}, 반지름 {len(radii.indices)}개 - "
                    f"소요시간: {time.time() - start_time:.2f}초")
        print(output)
        return EXIT_OK

    def cmd_bnorm(self) -> int:
        f = self.processor.read_grid_function(self.args.input)
        record = b_norm(f).to_record()
        record["grid"] = f.grid.label()
        print(json.dumps(record, ensure_ascii=False, sort_keys=True))
        return EXIT_OK

    # scan

    def _admissible_N(self, values: Sequence[int], grid: TorusGrid) -> List[int]:
        for N in (min(values), max(values)):
            CounterexampleSpec(N, grid)
        return list(values)

    def cmd_scan(self) -> int:
        args = self.args
        profile = get_profile(self.profile_name())
        grid = self.resolve_grid()
        workers = args.workers
        # 해석된 플래그 값 (헤더에 그대로 기록)
        echoed = {}
        if args.name == "ratio":
            requested = parse_range(args.n_range, profile.n_range, "n_range")
            echoed["n_range"] = range_text(requested)
            N_values = self._admissible_N(requested, grid)
            table = ratio_scan(N_values, grid, workers, self.tol, strict=True)
        elif args.name == "lacunary":
            requested = parse_range(args.n_range, (1, profile.n_range[1]), "n_range")
            echoed["n_range"] = range_text(requested)
            N_values = self._admissible_N(requested, grid)
            table = lacunary_l1_scan(grid, N_values, workers, self.tol)
        elif args.name == "kernel-decay":
            j_values = parse_range(args.j_range, (1, grid.j_max - 1), "j_range")
            k_min = args.k_min or profile.kernel_k_min
            echoed.update(j_range=range_text(j_values), k_min=k_min, kernel=args.kernel)
            table = kernel_decay_scan(get_kernel(args.kernel), grid, j_values, k_min, workers, self.tol)
        elif args.name == "lp-facts":
            j_values = parse_range(args.j_range, (1, grid.j_max - 1), "j_range")
            echoed["j_range"] = range_text(j_values)
            table = lp_kernel_facts(grid, j_values, workers, self.tol)
        elif args.name == "glambda":
            j_values = parse_range(args.j_range, (1, min(profile.glambda_j_max, grid.j_max)), "j_range")
            exponent_max = args.lambda_max or profile.lambda_exponent_max
            echoed.update(j_range=range_text(j_values), lambda_max="%g" % exponent_max)
            lambdas = lambda_grid(exponent_max, grid)
            if not lambdas:
                raise ConfigurationError(f"no lambda fits under the Nyquist margin of grid {grid.label()}",
                                         field="lambda_max")
            table = glambda_scan(lambdas, j_values, grid, workers, self.tol)
        else:
            requested = parse_range(args.n_range, profile.n_range, "n_range")
            echoed["n_range"] = range_text(requested)
            N_values = [N for N in requested if N <= max_admissible_N(grid)]
            corpus = random_band_limited(grid, profile.tk_corpus_size, args.seed)
            table = tk_star_bound_scan([diamond_kernel(), odd_bump_kernel()], corpus, grid, N_values, workers, self.tol)

        table.meta.setdefault("profile", profile.name if not args.grid else "custom")
        table.meta.setdefault("seed", str(args.seed))
        table.meta.update({key: str(value) for key, value in echoed.items()})
        if table.name in CALIBRATION_KEYS_BY_TABLE:
            calibration_meta(table, Calibration.load(args.calibration))
        output = self.processor.write_scan_table(table)
        for note in table.notes:
            logger.warning(f"스캔 메모: {note}")
        print(output)
        return EXIT_OK

    # verify / calibrate / describe

    def cmd_verify(self) -> int:
        args = self.args
        suite = VerificationSuite(self.profile_name(), args.seed, args.workers, self.tol,
                                  args.calibration, self.processor)
        result = suite.run()
        for report in result.reports:
            print(report.summary_line())
        for note in result.notes:
            print(f"[INCOMPLETE] {note}")
        if result.incomplete:
            return EXIT_RESOURCE
        return EXIT_OK if result.passed else EXIT_CHECK_FAILED

    def cmd_calibrate(self) -> int:
        args = self.args
        constants = calibrate(self.profile_name("reference"), args.seed, args.workers, args.calibration, self.tol)
        # 방금 쓴 파일을 다시 읽어 체크섬과 키를 확인
        Calibration.load(args.calibration)
        for key, value in constants.items():
            print(f"{key} = {value:.6g}")
        return EXIT_OK

    def cmd_describe(self) -> int:
        args = self.args
        if args.grid:
            grids = [("custom", parse_grid(args.grid))]
        elif args.profile:
            grids = [(args.profile, get_profile(args.profile).grid)]
        else:
            grids = [(name, profile.grid) for name, profile in PROFILES.items()]

        for name, grid in grids:
            record = {"profile": name, "grid": grid.label(), "j_max": grid.j_max,
                      "max_admissible_N": max_admissible_N(grid)}
            if args.n is not None:
                record["construction"] = describe(CounterexampleSpec(args.n, grid))
            print(json.dumps(record, ensure_ascii=False, sort_keys=True))
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", help="explicit grid 'L,M' (overrides --profile)")
    common.add_argument("--profile", choices=sorted(PROFILES), help="grid profile")
    common.add_argument("--radii", default="dyadic", help="dyadic | all | k1,k2,...")
    common.add_argument("--out", default="results", help="output directory")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    common.add_argument("--calibration", default=None, help="calibration file path")

    parser = argparse.ArgumentParser(prog="maximal_cli", description="maximal operators on a Besov-type space")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", parents=[common], help="apply a maximal operator to a grid function file")
    compute.add_argument("input")
    compute.add_argument("--operator", choices=OPERATORS, default="sharp")
    compute.add_argument("--kernel", choices=sorted(KERNELS), default="diamond")
    compute.add_argument("--output", default=None)

    bnorm = sub.add_parser("bnorm", parents=[common], help="print the B-norm record of a grid function file")
    bnorm.add_argument("input")

    scan = sub.add_parser("scan", parents=[common], help="run one parameter sweep")
    scan.add_argument("name", choices=SCANS)
    scan.add_argument("--n-range", dest="n_range", default=None, help="N range 'a..b'")
    scan.add_argument("--j-range", dest="j_range", default=None, help="band range 'a..b'")
    scan.add_argument("--lambda-max", dest="lambda_max", type=float, default=None, help="largest log2(lambda)")
    scan.add_argument("--k-min", dest="k_min", type=int, default=None, help="smallest radius index")
    scan.add_argument("--kernel", choices=sorted(KERNELS), default="diamond")

    sub.add_parser("verify", parents=[common], help="run the verification suite")
    sub.add_parser("calibrate", parents=[common], help="measure and rewrite the calibration file")

    describe_parser = sub.add_parser("describe", parents=[common], help="admissible N per grid")
    describe_parser.add_argument("--n", type=int, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """메인 함수"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.out)
    try:
        return MaximalCli(args).run()
    except HarmonicAnalysisError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except MemoryError as e:
        logger.error(f"메모리 부족: {e}")
        print("error: out of memory", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
