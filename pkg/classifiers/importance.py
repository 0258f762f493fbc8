"""
Top-feature analysis from random-forest Gini importances.
"""
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from config.settings import IMPORTANCE_WINDOW, TOP_FEATURES, DEFAULT_SCALING
from features import WindowSpec, build_feature_matrix, category_of_name, fit_scaler, fit_vocabulary
from ingest.records import UserDataset
from utils.errors import WeekTooSparse
from utils.helpers import derive_seed
from utils.logger import setup_logger
from .forest import fit_random_forest
from .protocols import WindowingOptions, windows_or_empty

logger = setup_logger('classifiers')

CATEGORY_ORDER = {'numeric': 0, 'process': 1, 'domain': 2}


@dataclass(frozen=True)
class FeatureRank:
    name: str
    category: str
    importance: float


def _segments(dataset: UserDataset, weekly: bool) -> List[UserDataset]:
    return dataset.split_by_week() if weekly else [dataset]


def _segment_importances(target: UserDataset, others: Sequence[UserDataset],
                         options: WindowingOptions, seed: int) -> Dict[str, float]:
    positives = windows_or_empty(target, options)
    negatives = []
    for other in others:
        negatives += windows_or_empty(other, options)
    if not positives or not negatives:
        raise WeekTooSparse(f"{target.user_id}: {len(positives)} target / {len(negatives)} other windows")

    windows = positives + negatives
    vocab_proc = fit_vocabulary(windows, 'process')
    vocab_dom = fit_vocabulary(windows, 'domain')
    matrix = build_feature_matrix(windows, vocab_proc, vocab_dom)
    X = fit_scaler(matrix.X, options.scaling).transform(matrix.X)
    y = np.array([1 if label == target.user_id else -1 for label in matrix.labels])
    forest = fit_random_forest(X, y, seed=seed)
    return dict(zip(matrix.names, forest.feature_importances.tolist()))


def feature_importance_report(datasets: Sequence[UserDataset], seed: int, t: int = IMPORTANCE_WINDOW,
                              weekly: bool = True, top_k: int = TOP_FEATURES,
                              scaling: str = DEFAULT_SCALING) -> Dict[str, List[FeatureRank]]:
    """
    Per-user top features.

    One forest per user-week (target windows against the other users' windows
    of the same study week); importances are averaged by feature name over
    the user's usable weeks. Ties rank numeric before process before domain
    features, then by first appearance.
    """
    options = WindowingOptions(spec=WindowSpec(t), scaling=scaling)
    report: Dict[str, List[FeatureRank]] = {}
    first_seen: Dict[str, int] = {}

    segments = {d.user_id: _segments(d, weekly) for d in datasets}

    for u, target in enumerate(sorted(datasets, key=lambda d: d.user_id)):
        totals: Dict[str, float] = {}
        used = 0
        for week, segment in enumerate(segments[target.user_id]):
            others = [weeks[week] for user_id, weeks in sorted(segments.items())
                      if user_id != target.user_id and week < len(weeks)]
            try:
                importances = _segment_importances(segment, others, options, derive_seed(seed, u, week))
            except WeekTooSparse as e:
                logger.warning(f"Skipping week {week + 1} of {target.user_id}: {e.message}")
                continue
            used += 1
            for name, value in importances.items():
                first_seen.setdefault(name, len(first_seen))
                totals[name] = totals.get(name, 0.0) + value

        if not used:
            logger.warning(f"{target.user_id}: no week had enough data for a forest")
            report[target.user_id] = []
            continue
        ranked = sorted(totals, key=lambda n: (-totals[n] / used, CATEGORY_ORDER[category_of_name(n)], first_seen[n]))
        report[target.user_id] = [FeatureRank(n, category_of_name(n), totals[n] / used) for n in ranked[:top_k]]

    return report


def top_feature_categories(report: Dict[str, List[FeatureRank]]) -> Dict[str, float]:
    """Share of numeric, process and domain features among all top lists"""
    counts = Counter(rank.category for ranks in report.values() for rank in ranks)
    total = sum(counts.values())
    return {category: (counts[category] / total if total else 0.0) for category in CATEGORY_ORDER}
