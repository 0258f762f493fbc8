"""
Hurst exponent by rescaled-range analysis.
"""
import numpy as np
from scipy.special import gammaln

from config.settings import HURST_MIN_WINDOW, HURST_MIN_LENGTH, HURST_CORRECTED
from utils.errors import SeriesTooShortForLag, ZeroRange


def dyadic_windows(length: int, min_window: int = HURST_MIN_WINDOW):
    sizes = []
    n = min_window
    while n <= length // 2:
        sizes.append(n)
        n *= 2
    return sizes


def rescaled_range(series: np.ndarray, window: int) -> float:
    """Mean R/S over non-overlapping chunks; chunks with zero range or spread are skipped"""
    n_chunks = series.size // window
    chunks = series[:n_chunks * window].reshape(n_chunks, window)
    deviations = np.cumsum(chunks - chunks.mean(axis=1, keepdims=True), axis=1)
    r = deviations.max(axis=1) - deviations.min(axis=1)
    s = chunks.std(axis=1)
    valid = (r > 0) & (s > 0)
    return float(np.mean(r[valid] / s[valid])) if valid.any() else np.nan


def expected_rescaled_range(window: int) -> float:
    """Anis-Lloyd-Peters expectation of R/S for white noise, with the small-sample factor"""
    i = np.arange(1, window)
    front = (window - 0.5) / window
    middle = np.exp(gammaln((window - 1) * 0.5) - gammaln(window * 0.5)) / np.sqrt(np.pi)
    return float(front * middle * np.sum(np.sqrt((window - i) / i)))


def hurst_exponent(series, corrected: bool = HURST_CORRECTED, min_window: int = HURST_MIN_WINDOW) -> float:
    """
    Slope of log(R/S) against log(window) over dyadic windows up to length / 2.

    With the correction the expected R/S of white noise is subtracted in log
    space and 0.5 is added back to the slope. The result is clamped to [0, 1].
    The series is used as is, without normalization.
    """
    x = np.asarray(series, dtype=float)
    if x.size < HURST_MIN_LENGTH:
        raise SeriesTooShortForLag(f"Hurst estimation needs {HURST_MIN_LENGTH} points, got {x.size}")
    windows = np.array(dyadic_windows(x.size, min_window))
    rs = np.array([rescaled_range(x, w) for w in windows])
    valid = np.isfinite(rs)
    if valid.sum() < 2:
        raise ZeroRange("rescaled range is undefined in every window")

    log_n = np.log(windows[valid])
    log_rs = np.log(rs[valid])
    if corrected:
        log_rs = log_rs - np.log([expected_rescaled_range(int(w)) for w in windows[valid]])
        slope = np.polyfit(log_n, log_rs, 1)[0] + 0.5
    else:
        slope = np.polyfit(log_n, log_rs, 1)[0]
    return float(np.clip(slope, 0.0, 1.0))
