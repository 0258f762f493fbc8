#!/usr/bin/env python3
"""
Evaluation Service

Runs the three classification settings over users x window sizes x seeded
runs and returns one result row per (user, classifier, window, run).
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from config.settings import (
    CURVE_MODE, CURVE_WINDOW, DEFAULT_JOBS, DEFAULT_SCALING, EVAL_RUNS, SESSION_GAP_MINUTES, TRAIN_DAYS,
    WINDOW_MODE,
)
from classifiers import (
    EvalReport, WindowingOptions, assemble_binary_task, assemble_oneclass_task,
    evaluate_offline, evaluate_prequential, roc_auc, score_matrix, train_offline_binary,
    train_offline_oneclass, train_online_warm_start,
)
from classifiers.scoring import ANOMALY_MODELS
from features import WindowSpec
from ingest.records import UserDataset
from utils.errors import DatasetTooShort, InsufficientDays, NoOutlierData, UndefinedMetric
from utils.helpers import derive_seed
from utils.logger import setup_logger

logger = setup_logger('evaluation')

SETTING_KEYS = {'offline_binary': 1, 'offline_oneclass': 2, 'online': 3}
_SKIPPABLE = (DatasetTooShort, InsufficientDays, NoOutlierData)


@dataclass
class ExperimentOptions:
    window_sizes: Sequence[int]
    runs: int = EVAL_RUNS
    scaling: str = DEFAULT_SCALING
    window_mode: str = WINDOW_MODE
    gap_minutes: int = SESSION_GAP_MINUTES
    train_days: int = TRAIN_DAYS
    curve_mode: str = CURVE_MODE
    curve_window: int = CURVE_WINDOW
    jobs: int = DEFAULT_JOBS
    model_params: Dict[str, dict] = field(default_factory=dict)

    def windowing(self, t: int) -> WindowingOptions:
        return WindowingOptions(spec=WindowSpec(t), mode=self.window_mode, gap_minutes=self.gap_minutes,
                                scaling=self.scaling, train_days=self.train_days)


def _row(setting: str, user: str, kind: str, t: int, run: int, seed: int, report: EvalReport,
         auc: Optional[float] = None) -> dict:
    return {
        'setting': setting, 'user': user, 'classifier': kind, 'window': t, 'run': run, 'seed': seed,
        'tp': report.tp, 'fp': report.fp, 'tn': report.tn, 'fn': report.fn,
        'precision': report.precision, 'recall': report.recall, 'fscore': report.fscore,
        'auc': auc,
    }


def _jobs(datasets: Sequence[UserDataset], options: ExperimentOptions, setting: str, seed: int):
    ordered = sorted(datasets, key=lambda d: d.user_id)
    for u, target in enumerate(ordered):
        for t in options.window_sizes:
            for run in range(options.runs):
                yield target, ordered, t, run, derive_seed(seed, SETTING_KEYS[setting], u, t, run)


def _binary_cell(target, datasets, t, run, seed, kinds, options: ExperimentOptions) -> List[dict]:
    try:
        task = assemble_binary_task(target, datasets, seed, options.windowing(t))
    except _SKIPPABLE as e:
        logger.warning(f"offline binary {target.user_id} t={t}: skipped ({e.message})")
        return []
    rows = []
    for kind in kinds:
        model = train_offline_binary(kind, task.X_train, task.y_train, seed=seed,
                                     params=options.model_params.get(kind))
        rows.append(_row('offline_binary', target.user_id, kind, t, run, seed,
                         evaluate_offline(model, task.X_test, task.y_test)))
    return rows


def _oneclass_cell(target, datasets, t, run, seed, kinds, options: ExperimentOptions) -> List[dict]:
    try:
        task = assemble_oneclass_task(target, datasets, options.windowing(t))
    except _SKIPPABLE as e:
        logger.warning(f"offline one-class {target.user_id} t={t}: skipped ({e.message})")
        return []
    rows = []
    positives = np.flatnonzero(task.y_train == 1)
    for kind in kinds:
        model = train_offline_oneclass(kind, task.X_train[positives], params=options.model_params.get(kind),
                                       seed=seed)
        scores = score_matrix(model, task.X_test)
        try:
            auc = roc_auc(scores, task.y_test, higher_is_positive=not isinstance(model, ANOMALY_MODELS))
        except UndefinedMetric:
            auc = None
        rows.append(_row('offline_oneclass', target.user_id, kind, t, run, seed,
                         evaluate_offline(model, task.X_test, task.y_test), auc))
    return rows


def _online_cell(target, datasets, t, run, seed, kinds, options: ExperimentOptions) -> Tuple[List[dict], Dict]:
    try:
        task = assemble_binary_task(target, datasets, seed, options.windowing(t))
    except _SKIPPABLE as e:
        logger.warning(f"online {target.user_id} t={t}: skipped ({e.message})")
        return [], {}
    order = task.chronological()
    X_stream, y_stream = task.X_test[order], task.y_test[order]
    rows, curves = [], {}
    for kind in kinds:
        warm = train_online_warm_start(kind, task.X_train, task.y_train, seed=seed,
                                       params=options.model_params.get(kind))
        report = evaluate_prequential(X_stream, y_stream, warm, curve_mode=options.curve_mode,
                                      curve_window=options.curve_window)
        rows.append(_row('online', target.user_id, kind, t, run, seed, report))
        if run == 0:
            curves[(target.user_id, kind, t)] = report.per_step_curve
    return rows, curves


def run_offline_binary(datasets: Sequence[UserDataset], kinds: Sequence[str], options: ExperimentOptions,
                       seed: int) -> List[dict]:
    """Each user against disjoint halves of the others, per window size and seeded run"""
    results = Parallel(n_jobs=options.jobs)(
        delayed(_binary_cell)(target, ordered, t, run, s, list(kinds), options)
        for target, ordered, t, run, s in _jobs(datasets, options, 'offline_binary', seed))
    rows = [row for cell in results for row in cell]
    logger.info(f"offline binary: {len(rows)} result rows")
    return rows


def run_offline_oneclass(datasets: Sequence[UserDataset], kinds: Sequence[str], options: ExperimentOptions,
                         seed: int) -> List[dict]:
    """Each user's first week as the only class; its later windows and every other user as test data"""
    results = Parallel(n_jobs=options.jobs)(
        delayed(_oneclass_cell)(target, ordered, t, run, s, list(kinds), options)
        for target, ordered, t, run, s in _jobs(datasets, options, 'offline_oneclass', seed))
    rows = [row for cell in results for row in cell]
    logger.info(f"offline one-class: {len(rows)} result rows")
    return rows


def run_online(datasets: Sequence[UserDataset], kinds: Sequence[str], options: ExperimentOptions,
               seed: int) -> Tuple[List[dict], Dict]:
    """
    Prequential evaluation of warm-started models over the binary test stream.

    Returns the result rows and the per-step F-score curves of run 0, keyed by
    (user, classifier, window).
    """
    results = Parallel(n_jobs=options.jobs)(
        delayed(_online_cell)(target, ordered, t, run, s, list(kinds), options)
        for target, ordered, t, run, s in _jobs(datasets, options, 'online', seed))
    rows, curves = [], {}
    for cell_rows, cell_curves in results:
        rows += cell_rows
        curves.update(cell_curves)
    logger.info(f"online: {len(rows)} result rows")
    return rows, curves
