#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
최대작용소 검증 시스템 - 예외 정의

모든 예외는 ValueError 계열이며 CLI 종료 코드(exit_code)를 함께 가진다.
  2: 입력/설정 오류, 3: 허용 범위/자원 오류
"""

from typing import Optional


class HarmonicAnalysisError(ValueError):
    """공통 기반 예외"""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class ConfigurationError(HarmonicAnalysisError):
    """격자/프로파일/허용오차/보정 파일 설정 오류"""

    exit_code = 2


class InputParseError(HarmonicAnalysisError):
    """GridFunction 텍스트 형식 파싱 오류 (1부터 시작하는 줄 번호 포함)"""

    exit_code = 2

    def __init__(self, message: str, line_number: int = 0):
        if line_number:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class RadiusError(HarmonicAnalysisError):
    """반지름 인덱스가 1..M/2-1 범위를 벗어남"""

    exit_code = 3


class RadiusCapError(HarmonicAnalysisError):
    """커널 지지 반경 x 반지름이 L/4 상한을 넘음"""

    exit_code = 3


class BandRangeError(HarmonicAnalysisError):
    """주파수 대역 인덱스가 j_max(나이퀴스트 절단)를 넘음"""

    exit_code = 3


class DilationError(HarmonicAnalysisError):
    """이진 확대/축소의 전제조건 위반"""

    exit_code = 3

    def __init__(self, message: str, residual: float = 0.0):
        super().__init__(message)
        self.residual = residual


class AdmissibilityError(HarmonicAnalysisError):
    """N 또는 주파수가 격자의 나이퀴스트 여유를 넘음"""

    exit_code = 3


class SupportError(HarmonicAnalysisError):
    """격자 주기가 컷오프 함수의 지지집합을 담기에 너무 작음"""

    exit_code = 3
