"""
Confusion-matrix metrics, offline and prequential (test-then-train) evaluation.
"""
import copy
from dataclasses import dataclass, asdict
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import roc_auc_score

from config.settings import CURVE_MODE, CURVE_WINDOW
from utils.errors import InvalidSpec, UndefinedMetric
from utils.logger import setup_logger
from .scoring import ANOMALY_MODELS, default_threshold, score_matrix, update_online

logger = setup_logger('classifiers')

CI_Z = 1.96


def compute_metrics(tp: int, fp: int, tn: int, fn: int) -> Tuple[float, float, float]:
    """Precision, recall and F-score; any zero denominator yields 0"""
    if min(tp, fp, tn, fn) < 0:
        raise InvalidSpec("confusion counts must be non-negative")
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    fscore = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, fscore


@dataclass
class EvalReport:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    precision: float = 0.0
    recall: float = 0.0
    fscore: float = 0.0
    per_step_curve: Optional[List[float]] = None
    runs: int = 1
    ci95: Optional[Tuple[float, float]] = None

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int, **extra) -> 'EvalReport':
        precision, recall, fscore = compute_metrics(tp, fp, tn, fn)
        return cls(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn),
                   precision=precision, recall=recall, fscore=fscore, **extra)

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def confusion_counts(y_true, y_pred) -> Tuple[int, int, int, int]:
    """(tp, fp, tn, fn) with +1 as the positive class"""
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true != 1) & (y_pred == 1)))
    tn = int(np.sum((y_true != 1) & (y_pred != 1)))
    fn = int(np.sum((y_true == 1) & (y_pred != 1)))
    return tp, fp, tn, fn


def _label(model, s: float, threshold: float) -> int:
    if isinstance(model, ANOMALY_MODELS):
        return 1 if s < threshold else -1
    return 1 if s >= threshold else -1


def evaluate_offline(model, X, y, threshold: Optional[float] = None) -> EvalReport:
    """Score a held-out matrix once"""
    threshold = default_threshold(model) if threshold is None else threshold
    scores = score_matrix(model, X)
    if isinstance(model, ANOMALY_MODELS):
        y_pred = np.where(scores < threshold, 1, -1)
    else:
        y_pred = np.where(scores >= threshold, 1, -1)
    return EvalReport.from_counts(*confusion_counts(y, y_pred))


def evaluate_prequential(X, y, warm_start, threshold: Optional[float] = None,
                         curve_mode: str = CURVE_MODE, curve_window: int = CURVE_WINDOW) -> EvalReport:
    """
    Test-then-train over a chronologically ordered stream.

    Each item is predicted and recorded before the model learns from it. The
    warm-start model is copied, never mutated. per_step_curve holds the
    F-score after every item, cumulative or over the last curve_window items.
    """
    if curve_mode not in ('cumulative', 'sliding'):
        raise InvalidSpec(f"unknown curve mode {curve_mode!r}")
    model = copy.deepcopy(warm_start)
    y = np.asarray(y, dtype=int).ravel()
    n = y.size
    curve: List[float] = []
    outcomes = np.zeros((n, 4), dtype=np.int64)  # tp, fp, tn, fn per item
    totals = np.zeros(4, dtype=np.int64)

    for i in range(n):
        x = X[i:i + 1]
        thr = default_threshold(model) if threshold is None else threshold
        predicted = _label(model, float(score_matrix(model, x)[0]), thr)
        slot = (0 if predicted == 1 else 3) if y[i] == 1 else (1 if predicted == 1 else 2)
        outcomes[i, slot] = 1
        totals[slot] += 1
        counts = totals if curve_mode == 'cumulative' else outcomes[max(0, i + 1 - curve_window):i + 1].sum(axis=0)
        curve.append(compute_metrics(*counts.tolist())[2])
        update_online(model, x, int(y[i]))

    return EvalReport.from_counts(*totals.tolist(), per_step_curve=curve)


def roc_auc(scores: Sequence[float], labels: Sequence[int], higher_is_positive: bool = True) -> float:
    """Area under the ROC curve with +1 as the positive class"""
    labels = np.asarray(labels).ravel()
    if np.unique(labels).size < 2:
        raise UndefinedMetric("ROC AUC needs both classes")
    scores = np.asarray(scores, dtype=float).ravel()
    return float(roc_auc_score(labels == 1, scores if higher_is_positive else -scores))


def mean_ci(values: Sequence[float]) -> Tuple[float, Optional[Tuple[float, float]]]:
    """Mean and normal 95% interval (mean ± 1.96 sd/sqrt(n)); no interval for a single value"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidSpec("cannot aggregate zero runs")
    mean = float(values.mean())
    if values.size < 2:
        return mean, None
    half = CI_Z * float(values.std(ddof=1)) / np.sqrt(values.size)
    return mean, (mean - half, mean + half)
