"""
Hourly activity series: active minutes per calendar hour.
"""
from dataclasses import dataclass

import numpy as np

from config.settings import MINUTES_PER_DAY
from ingest.records import UserDataset
from utils.errors import EmptyInput


@dataclass
class HourlySeries:
    values: np.ndarray      # integers in [0, 60]
    start_epoch_hour: int
    condition: str          # with_background | without_background
    user_id: str = ''

    def __len__(self):
        return int(self.values.size)

    def to_rows(self):
        return [{'hour': self.start_epoch_hour + i, 'value': int(v)} for i, v in enumerate(self.values)]


def build_hourly_series(dataset: UserDataset, include_background: bool = True) -> HourlySeries:
    """
    Count activity rows per hour over every hour of every study day.

    Hours without rows are 0; without background, rows flagged as background
    are not counted.
    """
    if not dataset.minutes:
        raise EmptyInput(f"{dataset.user_id}: no activity rows")
    start_hour = dataset.start_minute // 60
    n_hours = dataset.n_days * MINUTES_PER_DAY // 60
    hours = np.array([row.hour_epoch for row in dataset.minutes
                      if include_background or not row.background], dtype=np.int64)
    values = np.bincount(hours - start_hour, minlength=n_hours)[:n_hours] if hours.size else np.zeros(n_hours)
    return HourlySeries(values=values.astype(np.int64), start_epoch_hour=int(start_hour),
                        condition='with_background' if include_background else 'without_background',
                        user_id=dataset.user_id)
