#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
결과 파일 처리 모듈 - GridFunction 텍스트, 사이드카 JSON, ScanTable CSV, CheckReport JSONL,
보정 파일, 요약 엑셀 워크북

저장 파일에는 시각 정보를 넣지 않는다 (같은 입력이면 같은 바이트).
"""

import hashlib
import json
import logging
import os
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from errors import ConfigurationError, InputParseError
from torus_grid import GridFunction, make_grid

logger = logging.getLogger(__name__)

CALIBRATION_VERSION = "1"
DEFAULT_CALIBRATION_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "calibration.txt")


def _fmt(value) -> str:
    return "%.17g" % value


def _parse_header(line: str, line_number: int) -> Dict[str, str]:
    if not line.startswith("#"):
        raise InputParseError("expected header '# period=<L> size=<M>'", line_number)
    fields = {}
    for token in line[1:].split():
        if "=" not in token:
            raise InputParseError(f"malformed header token '{token}'", line_number)
        key, value = token.split("=", 1)
        fields[key] = value
    for required in ("period", "size"):
        if required not in fields:
            raise InputParseError(f"header is missing '{required}='", line_number)
    return fields


def header_line(fields: Dict[str, object]) -> str:
    return "# " + " ".join(f"{key}={value}" for key, value in fields.items())


def calibration_checksum(lines: Iterable[str]) -> str:
    """key = value 줄들(checksum 제외)의 sha256"""
    payload = "".join(f"{line}\n" for line in lines)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResultFileProcessor:
    """검증 결과 파일 처리기"""

    def __init__(self, results_dir: str = "results"):
        self.results_dir = results_dir
        self.ensure_directories()

    def ensure_directories(self):
        """결과 디렉토리 생성"""
        if not os.path.exists(self.results_dir):
            os.makedirs(self.results_dir)
            logger.info(f"디렉토리 생성: {self.results_dir}")

    def path_for(self, filename: str) -> str:
        return os.path.join(self.results_dir, filename)

    # GridFunction 텍스트 형식

    def read_grid_function(self, file_path: str) -> GridFunction:
        """'# period=<L> size=<M>' 헤더 + (x, value) 또는 (x, re, im) 열"""
        if not os.path.exists(file_path):
            raise ConfigurationError(f"input file not found: {file_path}", field="input")
        try:
            with open(file_path, "r", encoding="utf-8") as handle:
                lines = handle.read().splitlines()
        except OSError as e:
            logger.error(f"입력 파일 읽기 실패 ({file_path}): {e}")
            raise ConfigurationError(f"cannot read input file {file_path}: {e}", field="input")

        if not lines:
            raise InputParseError("empty file", 1)
        fields = _parse_header(lines[0], 1)
        try:
            grid = make_grid(fields["period"], fields["size"])
        except ConfigurationError as e:
            raise InputParseError(str(e), 1)

        values = []
        width = None
        for line_number, line in enumerate(lines[1:], start=2):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.replace(",", " ").split()
            if len(parts) not in (2, 3):
                raise InputParseError(f"expected 2 or 3 columns, found {len(parts)}", line_number)
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise InputParseError("column count changes within the file", line_number)
            try:
                numbers = [float(part) for part in parts]
            except ValueError:
                raise InputParseError(f"not a number: '{text}'", line_number)
            if not all(np.isfinite(numbers)):
                raise InputParseError(f"non-finite value: '{text}'", line_number)
            index = len(values)
            if index >= grid.size:
                raise InputParseError(f"more than {grid.size} samples", line_number)
            expected_x = grid.abscissas()[index]
            if abs(numbers[0] - expected_x) > 1e-9 * max(1.0, grid.period):
                raise InputParseError(f"abscissa {numbers[0]} does not match grid point {expected_x}", line_number)
            values.append(complex(numbers[1], numbers[2]) if width == 3 else numbers[1])

        if len(values) != grid.size:
            raise InputParseError(f"expected {grid.size} samples, found {len(values)}", len(lines))
        f = GridFunction.from_samples(grid, np.asarray(values))
        logger.info(f"입력 함수 읽기 완료: {file_path} (L={grid.period}, M={grid.size})")
        return f

    def write_grid_function(self, f: GridFunction, file_path: str, meta: Optional[Dict[str, object]] = None) -> str:
        try:
            fields = {"period": f.grid.period, "size": f.grid.size}
            fields.update(meta or {})
            x = f.grid.abscissas()
            with open(file_path, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(header_line(fields) + "\n")
                if f.is_real:
                    for xi, value in zip(x, f.samples):
                        handle.write(f"{_fmt(xi)} {_fmt(value)}\n")
                else:
                    for xi, value in zip(x, f.samples):
                        handle.write(f"{_fmt(xi)} {_fmt(value.real)} {_fmt(value.imag)}\n")
            logger.info(f"함수 저장 완료: {file_path}")
            return file_path
        except Exception as e:
            logger.error(f"함수 저장 실패: {e}")
            raise e

    def write_json(self, record: Dict, file_path: str) -> str:
        try:
            with open(file_path, "w", encoding="utf-8", newline="\n") as handle:
                json.dump(record, handle, ensure_ascii=False, indent=2, sort_keys=True)
                handle.write("\n")
            logger.info(f"JSON 저장 완료: {file_path}")
            return file_path
        except Exception as e:
            logger.error(f"JSON 저장 실패: {e}")
            raise e

    # ScanTable / CheckReport

    def write_scan_table(self, table, file_path: Optional[str] = None) -> str:
        """'# name=.. grid=L,M radii=.. tol=..' 헤더, CSV 본문, '# footer' 줄"""
        file_path = file_path or self.path_for(f"{table.name}.csv")
        try:
            with open(file_path, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(table.header_line() + "\n")
                handle.write(table.frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"))
                for note in table.notes:
                    handle.write(f"# note {note}\n")
                for key, value in table.footer.items():
                    handle.write(f"# footer {key}={_fmt(value) if isinstance(value, float) else value}\n")
            logger.info(f"스캔 테이블 저장 완료: {file_path} ({len(table.frame)}행)")
            return file_path
        except Exception as e:
            logger.error(f"스캔 테이블 저장 실패: {e}")
            raise e

    def read_scan_table(self, file_path: str) -> Tuple[Dict[str, str], pd.DataFrame]:
        with open(file_path, "r", encoding="utf-8") as handle:
            first = handle.readline().strip()
        meta = dict(token.split("=", 1) for token in first.lstrip("#").split() if "=" in token)
        frame = pd.read_csv(file_path, comment="#")
        return meta, frame

    def write_check_reports(self, reports: List, file_path: Optional[str] = None) -> str:
        """한 줄에 한 레코드 {name, status, observed, bound, anchor, context}"""
        file_path = file_path or self.path_for("checks.jsonl")
        try:
            with open(file_path, "w", encoding="utf-8", newline="\n") as handle:
                for report in reports:
                    handle.write(json.dumps(report.to_record(), ensure_ascii=False, sort_keys=True) + "\n")
            logger.info(f"검증 결과 저장 완료: {file_path} ({len(reports)}건)")
            return file_path
        except Exception as e:
            logger.error(f"검증 결과 저장 실패: {e}")
            raise e

    # 보정 파일

    @staticmethod
    def load_calibration(file_path: str = DEFAULT_CALIBRATION_PATH) -> Dict[str, float]:
        """버전/체크섬을 확인하고 key = value 를 읽는다 (손상 시 ConfigurationError)"""
        if not os.path.exists(file_path):
            raise ConfigurationError(f"calibration file not found: {file_path}", field="calibration")
        with open(file_path, "r", encoding="utf-8") as handle:
            raw_lines = handle.read().splitlines()

        payload_lines = []
        values: Dict[str, str] = {}
        checksum = None
        for line_number, line in enumerate(raw_lines, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ConfigurationError(f"calibration line {line_number} is not 'key = value'", field="calibration")
            key, value = (part.strip() for part in text.split("=", 1))
            if key == "checksum":
                checksum = value
                continue
            payload_lines.append(f"{key} = {value}")
            values[key] = value

        if checksum is None:
            raise ConfigurationError("calibration file has no checksum line", field="calibration")
        if calibration_checksum(payload_lines) != checksum:
            raise ConfigurationError("calibration checksum mismatch (file was modified)", field="calibration")
        if values.get("version") != CALIBRATION_VERSION:
            raise ConfigurationError(f"unsupported calibration version: {values.get('version')}",
                                     field="calibration")

        constants = {}
        for key, value in values.items():
            if key == "version":
                continue
            try:
                constants[key] = float(value)
            except ValueError:
                raise ConfigurationError(f"calibration value for '{key}' is not a number: {value}",
                                         field="calibration")
        logger.info(f"보정 상수 로드 완료: {file_path} ({len(constants)}개)")
        return constants

    @staticmethod
    def write_calibration(constants: Dict[str, float], file_path: str = DEFAULT_CALIBRATION_PATH,
                          comment: str = "") -> str:
        try:
            payload_lines = [f"version = {CALIBRATION_VERSION}"]
            payload_lines += [f"{key} = {_fmt(float(value))}" for key, value in constants.items()]
            with open(file_path, "w", encoding="utf-8", newline="\n") as handle:
                handle.write("# maximal operator verification fixtures (measured x1.5 headroom)\n")
                if comment:
                    handle.write(f"# {comment}\n")
                for line in payload_lines:
                    handle.write(line + "\n")
                handle.write(f"checksum = {calibration_checksum(payload_lines)}\n")
            logger.info(f"보정 파일 저장 완료: {file_path}")
            return file_path
        except Exception as e:
            logger.error(f"보정 파일 저장 실패: {e}")
            raise e

    # 요약 워크북

    def save_summary_workbook(self, tables: List, reports: List, filename: str = "summary.xlsx") -> str:
        """스캔 테이블별 시트 + 검증 결과 시트"""
        from openpyxl.styles import Alignment, Font, PatternFill
        from openpyxl.utils import get_column_letter

        file_path = self.path_for(filename)
        try:
            check_frame = pd.DataFrame([report.to_record() for report in reports],
                                       columns=["name", "status", "observed", "bound", "anchor", "context"])
            with pd.ExcelWriter(file_path, engine="openpyxl") as writer:
                sheets = [("checks", check_frame)] + [(table.name[:31], table.frame) for table in tables]
                for sheet_name, frame in sheets:
                    frame.to_excel(writer, sheet_name=sheet_name, index=False)
                    worksheet = writer.sheets[sheet_name]
                    for i, column in enumerate(frame.columns, 1):
                        width = 40 if column in ("context", "anchor") else 15
                        worksheet.column_dimensions[get_column_letter(i)].width = width

                    header_font = Font(bold=True, color="FFFFFF")
                    header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
                    for cell in worksheet[1]:
                        cell.font = header_font
                        cell.fill = header_fill
                        cell.alignment = Alignment(horizontal="center")

                # 검증 상태 색상
                worksheet = writer.sheets["checks"]
                for row_idx, status in enumerate(check_frame["status"], start=2):
                    color = "C6EFCE" if status == "pass" else "FFC7CE"
                    worksheet[f"B{row_idx}"].fill = PatternFill(start_color=color, end_color=color, fill_type="solid")

            logger.info(f"요약 워크북 저장 완료: {file_path}")
            return file_path
        except Exception as e:
            logger.error(f"요약 워크북 저장 실패: {e}")
            raise e
