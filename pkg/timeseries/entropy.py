"""
Sample entropy with Chebyshev template matching.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from config.settings import SAMPEN_M, SAMPEN_R
from utils.errors import InvalidSpec, NoMatches, ZeroVariance


@dataclass(frozen=True)
class EntropyParams:
    m: int = SAMPEN_M
    r: float = SAMPEN_R


def z_normalize(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    std = x.std()
    if std == 0 or not np.isfinite(std):
        raise ZeroVariance("series has zero variance")
    return (x - x.mean()) / std


def _templates(x: np.ndarray, length: int, count: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(x, length)[:count]


def count_matches(x: np.ndarray, length: int, count: int, r: float) -> int:
    """Unordered pairs of distinct templates within Chebyshev distance r"""
    templates = _templates(x, length, count)
    tree = cKDTree(templates)
    # count_neighbors counts ordered pairs including each template with itself
    ordered = int(tree.count_neighbors(tree, r, p=np.inf))
    return (ordered - count) // 2


def sample_entropy(series, params: EntropyParams = EntropyParams()) -> float:
    """
    -ln(A / B) on the z-normalized series.

    B counts template pairs of length m within r, A the same for length m + 1;
    both use the first N - m templates so they range over the same starts.

    Raises:
        ZeroVariance: constant series
        NoMatches: A or B is zero
    """
    x = z_normalize(series)
    m = params.m
    if x.size <= m + 1:
        raise InvalidSpec(f"series of length {x.size} too short for m={m}")
    count = x.size - m
    b = count_matches(x, m, count, params.r)
    a = count_matches(x, m + 1, count, params.r)
    if a == 0 or b == 0:
        raise NoMatches(f"no template matches (A={a}, B={b})", a=a, b=b)
    return float(-np.log(a / b))
