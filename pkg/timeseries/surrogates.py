"""
Shuffle surrogates and the surrogate significance test.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from scipy.stats import wilcoxon

from config.settings import SURROGATE_COUNT, WILCOXON_ALPHA, HURST_CORRECTED
from utils.errors import EmptyEnsemble, InvalidSpec, NumericError, UndefinedMetric
from utils.logger import setup_logger
from .entropy import EntropyParams, sample_entropy
from .hurst import hurst_exponent

logger = setup_logger('timeseries')


@dataclass
class SurrogateEnsemble:
    n: int
    seed: int
    surrogates: np.ndarray  # (n, len(series))


def make_surrogates(series, n: int = SURROGATE_COUNT, seed: int = 0) -> SurrogateEnsemble:
    """n independent uniform permutations of the series"""
    x = np.asarray(series)
    if x.size < 2:
        raise InvalidSpec("surrogates need a series of at least 2 points")
    rng = np.random.default_rng(seed)
    surrogates = np.array([rng.permutation(x) for _ in range(n)]).reshape(n, x.size)
    return SurrogateEnsemble(n=n, seed=seed, surrogates=surrogates)


@dataclass
class SurrogateTestResult:
    metric: str
    value: float
    surrogate_values: np.ndarray
    p_value: float
    direction: str  # below | above | equal, relative to the surrogate median
    wilcoxon_p: Optional[float] = None
    wilcoxon_reject: Optional[bool] = None
    extra: Dict[str, float] = field(default_factory=dict)

    @property
    def surrogate_mean(self) -> float:
        return float(np.mean(self.surrogate_values))

    @property
    def surrogate_std(self) -> float:
        return float(np.std(self.surrogate_values))


def metric_function(metric: str, entropy_params: EntropyParams = EntropyParams(),
                    hurst_corrected: bool = HURST_CORRECTED) -> Callable:
    if metric == 'entropy':
        return lambda s: sample_entropy(s, entropy_params)
    if metric == 'hurst':
        return lambda s: hurst_exponent(s, corrected=hurst_corrected)
    raise InvalidSpec(f"unknown surrogate metric {metric!r}")


def _evaluate(fn: Callable, series, what: str) -> float:
    try:
        return fn(series)
    except NumericError as e:
        raise UndefinedMetric(f"{what}: {e.message}", cause=e.code)


def surrogate_test(series, metric: str, ensemble: SurrogateEnsemble, paper_compat: bool = False,
                   entropy_params: EntropyParams = EntropyParams(),
                   hurst_corrected: bool = HURST_CORRECTED) -> SurrogateTestResult:
    """
    Two-sided empirical rank test of a metric against its shuffle surrogates.

    p = (1 + #{surrogates at least as far from the surrogate median as the
    series}) / (n + 1). With paper_compat a Wilcoxon signed-rank test
    of the surrogate values against the series value is added at alpha 0.001.
    """
    if ensemble.n == 0 or ensemble.surrogates.size == 0:
        raise EmptyEnsemble("surrogate ensemble is empty")
    fn = metric_function(metric, entropy_params, hurst_corrected)
    value = _evaluate(fn, series, metric)
    values = np.array([_evaluate(fn, s, f"{metric} of surrogate {i}") for i, s in enumerate(ensemble.surrogates)])

    center = float(np.median(values))
    extreme = int(np.sum(np.abs(values - center) >= abs(value - center)))
    p_value = (1 + extreme) / (ensemble.n + 1)
    direction = 'below' if value < center else ('above' if value > center else 'equal')
    result = SurrogateTestResult(metric=metric, value=float(value), surrogate_values=values,
                                 p_value=float(p_value), direction=direction)

    if paper_compat:
        differences = values - value
        if np.any(differences != 0):
            result.wilcoxon_p = float(wilcoxon(differences).pvalue)
        else:
            result.wilcoxon_p = 1.0
        result.wilcoxon_reject = result.wilcoxon_p < WILCOXON_ALPHA
    logger.debug(f"{metric}: value {value:.4f} vs surrogate median {center:.4f}, p={p_value:.4f}")
    return result
