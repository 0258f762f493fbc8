"""
Train/test protocols: first-week training split, disjoint negative users for
binary tasks and other-user outlier sets for one-class tasks.
"""
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from config.settings import TRAIN_DAYS, DEFAULT_SCALING, WINDOW_MODE, SESSION_GAP_MINUTES
from features import (
    FeatureMatrix, FeatureScaler, FeatureWindow, Vocabulary, WindowSpec,
    build_feature_matrix, fit_vocabulary, scale_features, slide_windows,
)
from ingest.records import UserDataset
from utils.errors import DatasetTooShort, InsufficientDays, NoOutlierData, TooFewNegativeUsers
from utils.logger import setup_logger

logger = setup_logger('classifiers')


@dataclass
class WindowingOptions:
    """How windows are cut and scaled for a task"""
    spec: WindowSpec
    mode: str = WINDOW_MODE
    gap_minutes: int = SESSION_GAP_MINUTES
    scaling: str = DEFAULT_SCALING
    train_days: int = TRAIN_DAYS


@dataclass
class Task:
    """Scaled train/test matrices with ±1 labels (+1 = target user)"""
    target: str
    X_train: object
    y_train: np.ndarray
    X_test: object
    y_test: np.ndarray
    train: FeatureMatrix
    test: FeatureMatrix
    vocab_proc: Vocabulary
    vocab_dom: Vocabulary
    scaler: FeatureScaler
    train_negative_users: List[str] = field(default_factory=list)
    test_negative_users: List[str] = field(default_factory=list)

    def chronological(self) -> np.ndarray:
        """Test-row order by window end minute (stable)"""
        return np.argsort(self.test.end_minutes, kind='stable')


def split_seven_days(dataset: UserDataset, train_days: int = TRAIN_DAYS) -> Tuple[UserDataset, UserDataset]:
    """Rows of study days 1..train_days versus the remainder"""
    if dataset.n_days <= train_days:
        raise InsufficientDays(f"{dataset.user_id} spans {dataset.n_days} days; need more than {train_days}")
    return dataset.select_days(1, train_days), dataset.select_days(train_days + 1)


def windows_or_empty(dataset: UserDataset, options: WindowingOptions) -> List[FeatureWindow]:
    """Windows of a dataset, or none when it holds fewer rows than the window"""
    try:
        return slide_windows(dataset, options.spec, mode=options.mode, gap_minutes=options.gap_minutes)
    except DatasetTooShort:
        logger.debug(f"{dataset.user_id}: {len(dataset)} rows, no window of size {options.spec.t}")
        return []


def partition_negative_users(user_ids: Sequence[str], seed: int) -> Tuple[List[str], List[str]]:
    """Shuffle and halve the other users into disjoint train and test negatives"""
    ids = sorted(user_ids)
    if len(ids) < 2:
        raise TooFewNegativeUsers(f"binary tasks need at least 2 other users, got {len(ids)}")
    order = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[i] for i in order]
    half = len(shuffled) // 2
    return sorted(shuffled[:half]), sorted(shuffled[half:])


def _finish_task(target: str, train_windows, test_windows, options: WindowingOptions, **users) -> Task:
    if not test_windows:
        raise DatasetTooShort(f"{target}: no test windows of size {options.spec.t}")
    vocab_proc = fit_vocabulary(train_windows, 'process')
    vocab_dom = fit_vocabulary(train_windows, 'domain')
    train = build_feature_matrix(train_windows, vocab_proc, vocab_dom)
    test = build_feature_matrix(test_windows, vocab_proc, vocab_dom)
    X_train, X_test, scaler = scale_features(train.X, test.X, options.scaling)
    y_train = np.array([1 if label == target else -1 for label in train.labels], dtype=int)
    y_test = np.array([1 if label == target else -1 for label in test.labels], dtype=int)
    return Task(target=target, X_train=X_train, y_train=y_train, X_test=X_test, y_test=y_test,
                train=train, test=test, vocab_proc=vocab_proc, vocab_dom=vocab_dom, scaler=scaler, **users)


def assemble_binary_task(target: UserDataset, others: Sequence[UserDataset], seed: int,
                         options: WindowingOptions) -> Task:
    """
    Binary task for one target user.

    Positives follow the first-week split; the other users are partitioned
    into train negatives (their first-week windows) and test negatives (their
    later windows). Vocabularies and scaler are fitted on the training windows.
    """
    target_train, target_test = split_seven_days(target, options.train_days)
    by_id = {o.user_id: o for o in others if o.user_id != target.user_id}
    train_ids, test_ids = partition_negative_users(list(by_id), seed)

    train_windows = windows_or_empty(target_train, options)
    if not train_windows:
        raise DatasetTooShort(f"{target.user_id}: no training windows of size {options.spec.t}")
    for user_id in train_ids:
        train_windows += windows_or_empty(by_id[user_id].select_days(1, options.train_days), options)

    test_windows = windows_or_empty(target_test, options)
    for user_id in test_ids:
        test_windows += windows_or_empty(by_id[user_id].select_days(options.train_days + 1), options)

    logger.debug(f"{target.user_id}: binary task with {len(train_windows)} train / {len(test_windows)} test windows")
    return _finish_task(target.user_id, train_windows, test_windows, options,
                        train_negative_users=train_ids, test_negative_users=test_ids)


def assemble_oneclass_outliers(target: UserDataset, others: Sequence[UserDataset],
                               options: WindowingOptions) -> List[FeatureWindow]:
    """Every other user's post-training windows, ordered by (user, time)"""
    others = [o for o in others if o.user_id != target.user_id]
    if not others:
        raise NoOutlierData(f"{target.user_id}: no other users to draw outliers from")
    outliers: List[FeatureWindow] = []
    for other in sorted(others, key=lambda o: o.user_id):
        outliers += windows_or_empty(other.select_days(options.train_days + 1), options)
    if not outliers:
        raise NoOutlierData(f"{target.user_id}: other users hold no data after day {options.train_days}")
    return outliers


def assemble_oneclass_task(target: UserDataset, others: Sequence[UserDataset],
                           options: WindowingOptions) -> Task:
    """Train on the target's first week; test on its later windows plus all outliers"""
    target_train, target_test = split_seven_days(target, options.train_days)
    train_windows = windows_or_empty(target_train, options)
    if not train_windows:
        raise DatasetTooShort(f"{target.user_id}: no training windows of size {options.spec.t}")
    test_windows = windows_or_empty(target_test, options) + assemble_oneclass_outliers(target, others, options)
    return _finish_task(target.user_id, train_windows, test_windows, options,
                        test_negative_users=sorted(o.user_id for o in others if o.user_id != target.user_id))
