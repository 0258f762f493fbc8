"""
Labelled drift datasets built by splicing two users' activity.

Rows are placed on source a's calendar: study day d of b is moved onto study
day d of a. Only the first D = min(days of a, days of b) days are used.
"""
from dataclasses import replace
from typing import Dict, List, Tuple

import numpy as np

from config.constants import DRIFT_LABELS
from config.settings import DRIFT_TRAIN_DAYS, MINUTES_PER_DAY
from ingest.records import ActivityMinute, UserDataset
from utils.errors import InvalidSpec, SourceTooShort
from utils.logger import setup_logger

logger = setup_logger('som_drift')

MIN_SOURCE_DAYS = 21
RECOMMENDED_SOURCE_DAYS = 42
# Every label but Unidentifiable can be injected
SYNTH_KINDS = tuple(label for label in DRIFT_LABELS if label != 'Unidentifiable')


def _by_day(dataset: UserDataset, n_days: int, shift_minutes: int = 0) -> Dict[int, Dict[int, ActivityMinute]]:
    days: Dict[int, Dict[int, ActivityMinute]] = {d: {} for d in range(1, n_days + 1)}
    for row in dataset.minutes:
        day = dataset.day_index[row.minute_epoch]
        if day <= n_days:
            moved = replace(row, minute_epoch=row.minute_epoch + shift_minutes) if shift_minutes else row
            days[day][moved.minute_epoch] = moved
    return days


def middle_third(n_days: int, train_days: int = DRIFT_TRAIN_DAYS) -> Tuple[int, int]:
    """First and last study day of the middle third of the post-training span"""
    post = n_days - train_days
    return train_days + post // 3 + 1, train_days + 2 * post // 3


def b_probability(kind: str, day: int, n_days: int, train_days: int = DRIFT_TRAIN_DAYS) -> float:
    """Probability that a row of the given study day comes from source b"""
    if day <= train_days or kind == 'NoDrift':
        return 0.0
    change_point = train_days + (n_days - train_days) // 2
    first, last = middle_third(n_days, train_days)
    if kind == 'Sudden':
        return 1.0 if day > change_point else 0.0
    if kind == 'Recurring':
        return 1.0 if first <= day <= last else 0.0
    if kind == 'Gradual':
        if day < first:
            return 0.0
        if day > last:
            return 1.0
        return (day - first + 0.5) / (last - first + 1)
    if kind == 'Incremental':
        return (day - train_days) / (n_days - train_days)
    raise InvalidSpec(f"unknown drift kind {kind!r}")


def _interpolate(row: ActivityMinute, weight: float, clicks_b: float, keys_b: float) -> ActivityMinute:
    clicks = int(round((1.0 - weight) * row.clicks + weight * clicks_b))
    keystrokes = int(round((1.0 - weight) * row.keystrokes + weight * keys_b))
    background = bool(row.domains) and clicks == 0 and keystrokes == 0
    return replace(row, clicks=clicks, keystrokes=keystrokes, background=background)


def synthesize_drift_dataset(kind: str, source_a: UserDataset, source_b: UserDataset,
                             seed: int = 0) -> Tuple[UserDataset, str]:
    """
    Splice two users into a dataset with known drift.

    NoDrift returns source_a. Sudden switches to b halfway through the
    post-training span, Recurring shows b during its middle third only.
    Gradual draws each minute from b with a probability ramping 0 -> 1 across
    the middle third; Incremental ramps that probability over the whole
    post-training span and also pulls the click and keystroke counts of the
    remaining a rows toward b's per-minute means.

    Returns:
        (dataset, ground-truth label)
    """
    if kind not in SYNTH_KINDS:
        raise InvalidSpec(f"unknown drift kind {kind!r}")
    if source_a.user_id == source_b.user_id:
        raise InvalidSpec("drift sources must be different users")
    n_days = min(source_a.n_days, source_b.n_days)
    if n_days < MIN_SOURCE_DAYS:
        raise SourceTooShort(f"sources span {n_days} days; need at least {MIN_SOURCE_DAYS}")
    if n_days < RECOMMENDED_SOURCE_DAYS:
        logger.warning(f"Sources span {n_days} days; curves are more reliable with {RECOMMENDED_SOURCE_DAYS}")
    if kind == 'NoDrift':
        return source_a, kind

    rng = np.random.default_rng(seed)
    shift = (source_a.origin_day - source_b.origin_day) * MINUTES_PER_DAY
    a_days = _by_day(source_a, n_days)
    b_days = _by_day(source_b, n_days, shift)
    b_rows = [row for day in b_days.values() for row in day.values()]
    clicks_b = float(np.mean([r.clicks for r in b_rows])) if b_rows else 0.0
    keys_b = float(np.mean([r.keystrokes for r in b_rows])) if b_rows else 0.0

    rows: List[ActivityMinute] = []
    for day in range(1, n_days + 1):
        p = b_probability(kind, day, n_days)
        a_rows, b_day = a_days[day], b_days[day]
        if p in (0.0, 1.0) and kind != 'Incremental':
            rows += (b_day if p == 1.0 else a_rows).values()
            continue
        # Row-level mixing over the union of minutes that either source used
        for minute in sorted(set(a_rows) | set(b_day)):
            if rng.random() < p:
                if minute in b_day:
                    rows.append(b_day[minute])
            elif minute in a_rows:
                row = a_rows[minute]
                rows.append(_interpolate(row, p, clicks_b, keys_b) if kind == 'Incremental' and p > 0 else row)

    rows.sort(key=lambda r: r.minute_epoch)
    dataset = UserDataset(user_id=f"{source_a.user_id}+{source_b.user_id}:{kind}", minutes=tuple(rows),
                          origin_day=source_a.origin_day)
    logger.info(f"Synthesized {kind} dataset with {len(rows)} rows over {n_days} days")
    return dataset, kind
