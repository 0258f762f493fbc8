"""
Sliding windows over consecutive rows of the activity matrix.
"""
from dataclasses import dataclass
from itertools import chain
from typing import List, Optional, Tuple

import numpy as np

from config.constants import PAPER_WINDOW_SIZES
from config.settings import SESSION_GAP_MINUTES
from ingest.records import ActivityMinute, UserDataset
from utils.errors import DatasetTooShort, InvalidSpec


@dataclass(frozen=True)
class WindowSpec:
    """Window size t (rows) and stride"""
    t: int
    stride: int = 1

    def __post_init__(self):
        if self.t < 1 or self.stride < 1:
            raise InvalidSpec(f"window size and stride must be positive (t={self.t}, stride={self.stride})")

    @property
    def standard_size(self) -> bool:
        return self.t in PAPER_WINDOW_SIZES and self.stride == 1


@dataclass(frozen=True)
class FeatureWindow:
    """Column sums and concatenated token documents of t consecutive rows"""
    end_minute_epoch: int
    clicks_sum: int
    keystrokes_sum: int
    background_sum: int
    process_doc: Tuple[str, ...]
    domain_doc: Tuple[str, ...]
    label: Optional[str] = None


def _windows_over(rows: Tuple[ActivityMinute, ...], spec: WindowSpec, label: Optional[str]) -> List[FeatureWindow]:
    n = len(rows)
    if n < spec.t:
        return []
    # Prefix sums give exact integer column sums for every window
    counts = np.array([(r.clicks, r.keystrokes, int(r.background)) for r in rows], dtype=np.int64)
    prefix = np.vstack([np.zeros((1, 3), dtype=np.int64), np.cumsum(counts, axis=0)])

    windows = []
    for start in range(0, n - spec.t + 1, spec.stride):
        end = start + spec.t
        sums = prefix[end] - prefix[start]
        chunk = rows[start:end]
        windows.append(FeatureWindow(
            end_minute_epoch=chunk[-1].minute_epoch,
            clicks_sum=int(sums[0]),
            keystrokes_sum=int(sums[1]),
            background_sum=int(sums[2]),
            process_doc=tuple(chain.from_iterable(r.processes for r in chunk)),
            domain_doc=tuple(chain.from_iterable(r.domains for r in chunk)),
            label=label,
        ))
    return windows


def split_sessions(rows: Tuple[ActivityMinute, ...], gap_minutes: int) -> List[Tuple[ActivityMinute, ...]]:
    """Cut the row sequence wherever two consecutive rows are more than gap_minutes apart"""
    sessions: List[Tuple[ActivityMinute, ...]] = []
    start = 0
    for i in range(1, len(rows)):
        if rows[i].minute_epoch - rows[i - 1].minute_epoch > gap_minutes:
            sessions.append(rows[start:i])
            start = i
    if rows:
        sessions.append(rows[start:])
    return sessions


def slide_windows(dataset: UserDataset, spec: WindowSpec, mode: str = 'rows',
                  gap_minutes: int = SESSION_GAP_MINUTES, label: Optional[str] = None) -> List[FeatureWindow]:
    """
    Slide a t-row window over the activity matrix.

    In 'rows' mode windows run over consecutive rows regardless of wall-clock
    gaps; 'session' mode restarts the window after gaps longer than gap_minutes.
    """
    rows = dataset.minutes
    if len(rows) < spec.t:
        raise DatasetTooShort(f"{dataset.user_id}: {len(rows)} rows < window {spec.t}")
    label = label if label is not None else dataset.user_id

    if mode == 'rows':
        return _windows_over(rows, spec, label)
    if mode == 'session':
        windows: List[FeatureWindow] = []
        for session in split_sessions(rows, gap_minutes):
            windows.extend(_windows_over(session, spec, label))
        return windows
    raise InvalidSpec(f"unknown window mode {mode!r}")
