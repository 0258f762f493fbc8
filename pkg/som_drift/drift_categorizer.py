"""
Rule-based drift categorization of classification curves.

The level thresholds are fractions of the curve's starting level (median of
its first tenth), so the rules read the same on a curve that sits at 0.97
as on one that sits at 0.5.

Rules run in order; the first match wins:
    NoDrift       every point within no_drift_tol of the median
    Recurring     a level drop of at least min_shift whose last segment
                  returns within recovery_tol of the first
    Sudden        net drop whose transition is no wider than the slice length
    Incremental   significant negative linear trend, linear fit, moving tail
    Gradual       share of low points grows across thirds, tail flat
    Unidentifiable
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy import stats

from config.settings import (
    DRIFT_NO_DRIFT_TOL, DRIFT_MIN_SHIFT, DRIFT_RECOVERY_TOL, DRIFT_SLOPE_ALPHA, DRIFT_SUDDEN_WIDTH_RATIO,
    DRIFT_LINEAR_R2, DRIFT_TAIL_FRACTION, DRIFT_FLAT_TAIL_RATIO, DRIFT_MIN_CURVE_POINTS, DRIFT_MIN_LEVEL,
)
from utils.errors import CurveTooShort
from .drift_curve import ClassificationCurve

EDGE_FRACTION = 0.1


@dataclass
class DriftThresholds:
    # no_drift_tol, min_shift and recovery_tol scale with the starting level
    no_drift_tol: float = DRIFT_NO_DRIFT_TOL
    min_shift: float = DRIFT_MIN_SHIFT
    recovery_tol: float = DRIFT_RECOVERY_TOL
    slope_alpha: float = DRIFT_SLOPE_ALPHA
    sudden_width_ratio: float = DRIFT_SUDDEN_WIDTH_RATIO
    linear_r2: float = DRIFT_LINEAR_R2
    tail_fraction: float = DRIFT_TAIL_FRACTION
    flat_tail_ratio: float = DRIFT_FLAT_TAIL_RATIO
    min_points: int = DRIFT_MIN_CURVE_POINTS
    min_level: float = DRIFT_MIN_LEVEL


@dataclass
class DriftLabel:
    label: str
    evidence: Dict[str, object] = field(default_factory=dict)

    def __str__(self):
        return self.label


def binary_segmentation(values: np.ndarray, min_shift: float, min_len: int) -> List[int]:
    """
    Recursive mean-shift change points.

    A segment is split at the point maximizing the CUSUM statistic
    k (n - k) / n * (mean_left - mean_right)^2 when the two means differ by at
    least min_shift and both parts hold min_len points.
    """
    breaks: List[int] = []
    pending: List[Tuple[int, int]] = [(0, values.size)]
    while pending:
        start, end = pending.pop()
        n = end - start
        if n < 2 * min_len:
            continue
        segment = values[start:end]
        prefix = np.cumsum(segment)
        k = np.arange(min_len, n - min_len + 1)
        left = prefix[k - 1] / k
        right = (prefix[-1] - prefix[k - 1]) / (n - k)
        stat = k * (n - k) / n * (left - right) ** 2
        best = int(np.argmax(stat))
        if abs(left[best] - right[best]) < min_shift:
            continue
        cut = start + int(k[best])
        breaks.append(cut)
        pending += [(start, cut), (cut, end)]
    return sorted(breaks)


def _segment_means(values: np.ndarray, breaks: List[int]) -> List[float]:
    bounds = [0] + breaks + [values.size]
    return [float(values[a:b].mean()) for a, b in zip(bounds, bounds[1:])]


def _transition_width(values: np.ndarray, high: float, low: float) -> int:
    delta = high - low
    below_high = np.flatnonzero(values < high - 0.1 * delta)
    near_low = np.flatnonzero(values <= low + 0.1 * delta)
    if below_high.size == 0 or near_low.size == 0:
        return values.size
    start = int(below_high[0])
    after = near_low[near_low >= start]
    return int(after[0] - start) if after.size else values.size


def categorize_drift(curve: ClassificationCurve, thresholds: DriftThresholds = None) -> DriftLabel:
    """Label a classification curve with its drift type plus the statistics behind it"""
    th = thresholds or DriftThresholds()
    s = np.asarray(curve.scores, dtype=float)
    n = s.size
    if n < th.min_points:
        raise CurveTooShort(f"curve has {n} points; need {th.min_points}")

    edge = max(1, int(round(EDGE_FRACTION * n)))
    high, low = float(np.median(s[:edge])), float(np.median(s[-edge:]))
    level = max(high, th.min_level)
    no_drift_tol, min_shift, recovery_tol = (level * th.no_drift_tol, level * th.min_shift,
                                             level * th.recovery_tol)

    median = float(np.median(s))
    max_dev = float(np.max(np.abs(s - median)))
    evidence: Dict[str, object] = {'points': n, 'median': median, 'max_deviation': max_dev, 'level': level,
                                   'no_drift_tol': no_drift_tol, 'min_shift': min_shift}
    if max_dev < no_drift_tol:
        return DriftLabel('NoDrift', evidence)

    breaks = binary_segmentation(s, min_shift, max(3, n // 20))
    means = _segment_means(s, breaks)
    evidence.update(breakpoints=breaks, segment_means=means)
    if len(means) >= 3 and means[0] - min(means) >= min_shift \
            and abs(means[-1] - means[0]) <= recovery_tol:
        return DriftLabel('Recurring', evidence)

    delta = high - low
    evidence.update(high=high, low=low, drop=delta)
    if delta < min_shift:
        return DriftLabel('Unidentifiable', evidence)

    width = _transition_width(s, high, low)
    evidence.update(transition_width=width, slice_steps=curve.params.slice_steps)
    if width <= th.sudden_width_ratio * curve.params.slice_steps:
        return DriftLabel('Sudden', evidence)

    x = np.arange(n, dtype=float)
    fit = stats.linregress(x, s)
    r2 = float(fit.rvalue ** 2)
    tail_n = max(3, int(round(th.tail_fraction * n)))
    tail_fit = stats.linregress(x[-tail_n:], s[-tail_n:])
    total_change = abs(fit.slope) * (n - 1)
    tail_change = abs(tail_fit.slope) * (tail_n - 1)
    tail_flat = tail_change < th.flat_tail_ratio * total_change
    evidence.update(slope=float(fit.slope), slope_p=float(fit.pvalue), r2=r2,
                    tail_change=float(tail_change), total_change=float(total_change), tail_flat=bool(tail_flat))
    if fit.slope < 0 and fit.pvalue < th.slope_alpha and r2 >= th.linear_r2 and not tail_flat:
        return DriftLabel('Incremental', evidence)

    midpoint = (high + low) / 2.0
    low_share = [float(np.mean(part < midpoint)) for part in np.array_split(s, 3)]
    evidence.update(low_share=low_share)
    if low_share[0] <= low_share[1] <= low_share[2] and low_share[2] > low_share[0] and tail_flat:
        return DriftLabel('Gradual', evidence)
    return DriftLabel('Unidentifiable', evidence)
