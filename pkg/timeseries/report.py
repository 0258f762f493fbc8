"""
Periodicity report: period, autocorrelation peaks and surrogate tests for one
hourly series.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config.settings import HURST_CORRECTED, SURROGATE_COUNT, SCHEMA_VERSION
from utils.errors import NoMatches, SeriesTooShortForLag, UndefinedMetric
from utils.logger import setup_logger
from .entropy import EntropyParams, sample_entropy
from .hourly import HourlySeries
from .hurst import hurst_exponent
from .spectral import PeriodEstimate, AutocorrelationCheck, periodogram_period, autocorrelation_check
from .surrogates import SurrogateEnsemble, SurrogateTestResult, make_surrogates, surrogate_test

logger = setup_logger('timeseries')

UNDEFINED = "undefined"


@dataclass
class PeriodicityParams:
    entropy: EntropyParams = field(default_factory=EntropyParams)
    surrogates: int = SURROGATE_COUNT
    hurst_corrected: bool = HURST_CORRECTED
    paper_compat: bool = False
    k_max: int = 5
    tol_lags: int = 1


@dataclass
class PeriodicityReport:
    user_id: str
    condition: str
    n_points: int
    peak_frequency: float
    period: float
    psd: PeriodEstimate
    autocorr: Optional[AutocorrelationCheck]
    sample_entropy: Optional[float]
    hurst: Optional[float]
    entropy_test: Optional[SurrogateTestResult]
    hurst_test: Optional[SurrogateTestResult]
    seed: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def autocorr_peaks_ok(self) -> List[bool]:
        return list(self.autocorr.ok) if self.autocorr else []

    @property
    def p_entropy(self) -> Optional[float]:
        return self.entropy_test.p_value if self.entropy_test else None

    @property
    def p_hurst(self) -> Optional[float]:
        return self.hurst_test.p_value if self.hurst_test else None

    @staticmethod
    def _metric_block(value, test: Optional[SurrogateTestResult]) -> Dict:
        if test is None:
            return {'value': UNDEFINED if value is None else value, 'p': None,
                    'surrogate_mean': None, 'surrogate_std': None, 'direction': None}
        block = {
            'value': test.value,
            'p': test.p_value,
            'surrogate_mean': test.surrogate_mean,
            'surrogate_std': test.surrogate_std,
            'direction': test.direction,
        }
        if test.wilcoxon_p is not None:
            block['wilcoxon_p'] = test.wilcoxon_p
            block['wilcoxon_reject'] = test.wilcoxon_reject
        return block

    def to_dict(self) -> Dict:
        return {
            'schema_version': SCHEMA_VERSION,
            'user_id': self.user_id,
            'condition': self.condition,
            'seed': self.seed,
            'n_points': self.n_points,
            'peak_frequency': self.peak_frequency,
            'period_hours': self.period,
            'autocorr_lags': list(self.autocorr.lags) if self.autocorr else [],
            'autocorr_peaks_ok': self.autocorr_peaks_ok,
            'sample_entropy': self._metric_block(self.sample_entropy, self.entropy_test),
            'hurst': self._metric_block(self.hurst, self.hurst_test),
            'notes': list(self.notes),
        }


def _surrogate_or_none(series, metric, ensemble, params: PeriodicityParams, notes: List[str]):
    try:
        return surrogate_test(series, metric, ensemble, paper_compat=params.paper_compat,
                              entropy_params=params.entropy, hurst_corrected=params.hurst_corrected)
    except UndefinedMetric as e:
        notes.append(f"{metric} surrogate test undefined: {e.message}")
        logger.warning(f"{metric} surrogate test undefined: {e.message}")
        return None


def periodicity_report(series: HourlySeries, params: PeriodicityParams = None, seed: int = 0,
                       ensemble: SurrogateEnsemble = None) -> PeriodicityReport:
    """
    Period from the periodogram, autocorrelation peaks at its multiples, and
    entropy/Hurst surrogate tests.

    Sample entropy without template matches is reported as "undefined" rather
    than failing the whole report; so is an autocorrelation check the series is
    too short for.
    """
    params = params or PeriodicityParams()
    values = np.asarray(series.values, dtype=float)
    notes: List[str] = []

    estimate = periodogram_period(values)
    try:
        autocorr = autocorrelation_check(values, estimate.period, params.k_max, params.tol_lags)
    except SeriesTooShortForLag as e:
        notes.append(e.message)
        autocorr = None

    try:
        entropy = sample_entropy(values, params.entropy)
    except NoMatches as e:
        notes.append(f"sample entropy undefined: {e.message}")
        entropy = None
    hurst = hurst_exponent(values, corrected=params.hurst_corrected)

    ensemble = ensemble or make_surrogates(values, params.surrogates, seed)
    entropy_test = _surrogate_or_none(values, 'entropy', ensemble, params, notes) if entropy is not None else None
    hurst_test = _surrogate_or_none(values, 'hurst', ensemble, params, notes)

    logger.info(f"{series.user_id} ({series.condition}): period {estimate.period:.2f}h, "
                f"autocorr peaks {sum(autocorr.ok) if autocorr else 0}/{params.k_max}")
    return PeriodicityReport(
        user_id=series.user_id,
        condition=series.condition,
        n_points=len(series),
        peak_frequency=estimate.peak_frequency,
        period=estimate.period,
        psd=estimate,
        autocorr=autocorr,
        sample_entropy=entropy,
        hurst=hurst,
        entropy_test=entropy_test,
        hurst_test=hurst_test,
        seed=seed,
        notes=notes,
    )
