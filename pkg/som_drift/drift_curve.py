"""
Classification curves: acceptance rate of a first-week one-class model over
sliding multi-day slices of the later data.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from config.settings import (
    DRIFT_WINDOW, DRIFT_TRAIN_DAYS, DRIFT_SLICE_DAYS, DRIFT_STEP_HOURS, DEFAULT_SCALING, MINUTES_PER_DAY,
)
from classifiers import predict, train_offline_oneclass
from features import WindowSpec, build_feature_matrix, fit_scaler, fit_vocabulary, slide_windows
from ingest.records import UserDataset
from utils.errors import DatasetTooShort, InsufficientSpan
from utils.logger import setup_logger

logger = setup_logger('som_drift')


@dataclass
class CurveParams:
    t: int = DRIFT_WINDOW
    train_days: int = DRIFT_TRAIN_DAYS
    slice_days: int = DRIFT_SLICE_DAYS
    step_hours: int = DRIFT_STEP_HOURS
    model: str = 'oneclass_linear'
    scaling: str = DEFAULT_SCALING

    @property
    def slice_steps(self) -> int:
        """Slice length expressed in curve steps"""
        return self.slice_days * 24 // self.step_hours


@dataclass
class ClassificationCurve:
    user_id: str
    hours: np.ndarray   # epoch hour of each slice start
    scores: np.ndarray  # accepted fraction per slice, in [0, 1]
    params: CurveParams = field(default_factory=CurveParams)

    def __len__(self):
        return int(self.scores.size)

    def to_rows(self) -> List[dict]:
        return [{'hour': int(h), 'score': float(s)} for h, s in zip(self.hours, self.scores)]


def drift_curve(dataset: UserDataset, params: CurveParams = None, seed: int = 0) -> ClassificationCurve:
    """
    Train a one-class model on the first train_days and score later slices.

    Slices start train_days after the first study day and move by step_hours;
    only slices lying entirely within the data are scored, and slices holding
    no window are skipped.
    """
    params = params or CurveParams()
    slice_minutes = params.slice_days * MINUTES_PER_DAY
    first = dataset.start_minute + params.train_days * MINUTES_PER_DAY
    last = dataset.minutes[-1].minute_epoch + 1 if dataset.minutes else first
    if last - first < slice_minutes:
        raise InsufficientSpan(
            f"{dataset.user_id}: {dataset.n_days} days cannot hold {params.train_days} training days "
            f"plus a {params.slice_days}-day slice")

    try:
        windows = slide_windows(dataset, WindowSpec(params.t))
    except DatasetTooShort as e:
        raise InsufficientSpan(e.message)
    ends = np.array([w.end_minute_epoch for w in windows], dtype=np.int64)
    train_windows = [w for w, end in zip(windows, ends) if end < first]
    test_windows = [w for w, end in zip(windows, ends) if end >= first]
    if not train_windows or not test_windows:
        raise InsufficientSpan(f"{dataset.user_id}: no windows on one side of day {params.train_days + 1}")

    vocab_proc = fit_vocabulary(train_windows, 'process')
    vocab_dom = fit_vocabulary(train_windows, 'domain')
    train = build_feature_matrix(train_windows, vocab_proc, vocab_dom)
    test = build_feature_matrix(test_windows, vocab_proc, vocab_dom)
    scaler = fit_scaler(train.X, params.scaling)
    model = train_offline_oneclass(params.model, scaler.transform(train.X), seed=seed)
    accepted = (predict(model, scaler.transform(test.X)) == 1).astype(np.int64)

    # Prefix sums over test windows (already in time order) give per-slice counts
    test_ends = test.end_minutes
    accepted_prefix = np.concatenate([[0], np.cumsum(accepted)])
    step = params.step_hours * 60
    starts = np.arange(first, last - slice_minutes + 1, step, dtype=np.int64)
    lo = np.searchsorted(test_ends, starts, side='left')
    hi = np.searchsorted(test_ends, starts + slice_minutes, side='left')
    counts = hi - lo
    keep = counts > 0
    if not keep.any():
        raise InsufficientSpan(f"{dataset.user_id}: every slice is empty")
    scores = (accepted_prefix[hi] - accepted_prefix[lo])[keep] / counts[keep]

    logger.info(f"{dataset.user_id}: drift curve with {int(keep.sum())} slices "
                f"(skipped {int((~keep).sum())} empty)")
    return ClassificationCurve(user_id=dataset.user_id, hours=starts[keep] // 60,
                               scores=scores.astype(float), params=params)
