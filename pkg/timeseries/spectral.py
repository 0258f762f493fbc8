"""
Periodogram peak and autocorrelation checks at multiples of the period.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from config.settings import AUTOCORR_K_MAX, AUTOCORR_TOL_LAGS
from utils.errors import AllZeroSeries, InvalidSpec, SeriesTooShortForLag, ZeroVariance

MIN_PERIODOGRAM_LENGTH = 16
NOISE_BAND_Z = 1.96


@dataclass
class PeriodEstimate:
    frequencies: np.ndarray  # cycles per sample (hour)
    psd: np.ndarray
    peak_frequency: float
    period: float

    def to_rows(self):
        return [{'frequency': float(f), 'power': float(p)} for f, p in zip(self.frequencies, self.psd)]


def periodogram(series) -> (np.ndarray, np.ndarray):
    """One-sided |DFT|^2 / N of the mean-removed series"""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    spectrum = np.fft.rfft(x)
    return np.fft.rfftfreq(x.size), np.abs(spectrum) ** 2 / x.size


def periodogram_period(series) -> PeriodEstimate:
    """
    Frequency of maximum power and its period.

    The DC bin and every frequency whose period exceeds half the series
    length are excluded from the peak search.
    """
    x = np.asarray(series, dtype=float)
    if x.size < MIN_PERIODOGRAM_LENGTH:
        raise InvalidSpec(f"periodogram needs {MIN_PERIODOGRAM_LENGTH} points, got {x.size}")
    freqs, psd = periodogram(x)
    if not np.any(psd > 0):
        raise AllZeroSeries("series has no variation around its mean")
    k = 2 + int(np.argmax(psd[2:]))
    return PeriodEstimate(frequencies=freqs, psd=psd, peak_frequency=float(freqs[k]), period=x.size / k)


def autocorrelation(series) -> np.ndarray:
    """Normalized autocorrelation (lag 0 = 1) through the power spectrum"""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    size = 1 << int(np.ceil(np.log2(2 * n - 1))) if n > 1 else 1
    spectrum = np.fft.rfft(x, size)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), size)[:n]
    if acov[0] <= 0:
        raise ZeroVariance("autocorrelation of a constant series")
    return acov / acov[0]


@dataclass
class AutocorrelationCheck:
    acf: np.ndarray
    period: float
    lags: List[int] = field(default_factory=list)
    ok: List[bool] = field(default_factory=list)
    band: float = 0.0

    def to_rows(self):
        return [{'lag': i, 'value': float(v)} for i, v in enumerate(self.acf)]


def autocorrelation_check(series, period: float, k_max: int = AUTOCORR_K_MAX,
                          tol_lags: int = AUTOCORR_TOL_LAGS) -> AutocorrelationCheck:
    """
    Look for autocorrelation peaks at lags k * period, k = 1..k_max.

    ok(k) holds when a local maximum lies within tol_lags of round(k * period)
    and rises above the white-noise band 1.96 / sqrt(N).
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n <= k_max * period:
        raise SeriesTooShortForLag(f"series of length {n} cannot show lag {k_max} x {period:g}")
    acf = autocorrelation(x)
    band = NOISE_BAND_Z / np.sqrt(n)
    lags, flags = [], []
    for k in range(1, k_max + 1):
        lag = int(round(k * period))
        candidates = range(max(1, lag - tol_lags), min(n - 2, lag + tol_lags) + 1)
        found = any(acf[j] >= acf[j - 1] and acf[j] >= acf[j + 1] and acf[j] > band for j in candidates)
        lags.append(lag)
        flags.append(bool(found))
    return AutocorrelationCheck(acf=acf, period=period, lags=lags, ok=flags, band=float(band))
