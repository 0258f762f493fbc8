#!/usr/bin/env python3
"""
Time Series Module

Hourly activity series, sample entropy, Hurst exponent, shuffle surrogates,
periodogram and autocorrelation checks.
"""

from .hourly import HourlySeries, build_hourly_series
from .entropy import EntropyParams, sample_entropy, z_normalize
from .hurst import hurst_exponent, rescaled_range, expected_rescaled_range, dyadic_windows
from .surrogates import SurrogateEnsemble, SurrogateTestResult, make_surrogates, surrogate_test
from .spectral import (
    PeriodEstimate, AutocorrelationCheck, periodogram, periodogram_period, autocorrelation,
    autocorrelation_check,
)
from .report import PeriodicityParams, PeriodicityReport, periodicity_report

__all__ = [
    "HourlySeries",
    "build_hourly_series",
    "EntropyParams",
    "sample_entropy",
    "z_normalize",
    "hurst_exponent",
    "rescaled_range",
    "expected_rescaled_range",
    "dyadic_windows",
    "SurrogateEnsemble",
    "SurrogateTestResult",
    "make_surrogates",
    "surrogate_test",
    "PeriodEstimate",
    "AutocorrelationCheck",
    "periodogram",
    "periodogram_period",
    "autocorrelation",
    "autocorrelation_check",
    "PeriodicityParams",
    "PeriodicityReport",
    "periodicity_report",
]
