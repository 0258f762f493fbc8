"""
Random forest (Gini, sqrt features, bootstrap) flattened into preorder trees.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.sparse as sp
from sklearn.ensemble import RandomForestClassifier

from config.settings import FOREST_TREES
from utils.errors import DimensionMismatch
from utils.logger import setup_logger
from .flat_tree import FlatTree, FlatTreeBuilder, as_dense_chunks
from .linear import _check_binary_labels

logger = setup_logger('classifiers')


@dataclass
class RandomForestModel:
    """Leaves hold the positive-class fraction of their training samples"""
    trees: List[FlatTree]
    n_features: int
    n_trees: int = FOREST_TREES
    max_features: str = 'sqrt'
    feature_importances: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rng_seed: int = 0

    def __post_init__(self):
        self.feature_importances = np.asarray(self.feature_importances, dtype=float)

    def vote_fraction(self, X) -> np.ndarray:
        """Mean positive-class leaf fraction over the trees"""
        if X.shape[-1] != self.n_features:
            raise DimensionMismatch(f"forest has {self.n_features} features, input has {X.shape[-1]}")
        out = np.zeros(X.shape[0])
        for start, block in as_dense_chunks(X):
            # Thresholds come from float32 training data
            block = block.astype(np.float32).astype(float)
            total = np.zeros(block.shape[0])
            for tree in self.trees:
                leaf, _ = tree.apply(block)
                total += tree.value[leaf]
            out[start:start + block.shape[0]] = total / len(self.trees)
        return out


def _flatten_estimator(tree, positive_column: int) -> FlatTree:
    """Walk a fitted sklearn tree in preorder"""
    t = tree.tree_
    builder = FlatTreeBuilder()
    # (sklearn node, flat parent, is left child); right pushed first so left pops first
    stack = [(0, -1, True)]
    while stack:
        node, parent, is_left = stack.pop()
        left, right = t.children_left[node], t.children_right[node]
        if left == right:
            counts = t.value[node, 0]
            total = counts.sum()
            me = builder.add_leaf(counts[positive_column] / total if total > 0 else 0.0)
        else:
            me = builder.add_split(int(t.feature[node]), float(t.threshold[node]))
            stack.append((right, me, False))
            stack.append((left, me, True))
        if parent >= 0:
            builder.attach(parent, me, is_left)
    return builder.build()


def fit_random_forest(X, y, seed: int = 0, n_trees: int = FOREST_TREES) -> RandomForestModel:
    """
    Grow n_trees Gini trees to purity on bootstrap samples.

    Args:
        X: Feature matrix
        y: Labels in {-1, +1}
        seed: random_state of the forest

    Returns:
        RandomForestModel with Gini importances summing to 1 (or all zero)
    """
    y = _check_binary_labels(y)
    estimator = RandomForestClassifier(
        n_estimators=n_trees, criterion='gini', max_features='sqrt', bootstrap=True,
        min_samples_leaf=1, random_state=seed, n_jobs=1,
    )
    estimator.fit(sp.csr_matrix(X) if sp.issparse(X) else X, y)
    positive = int(np.flatnonzero(estimator.classes_ == 1)[0])
    trees = [_flatten_estimator(e, positive) for e in estimator.estimators_]
    logger.debug(f"Trained forest of {n_trees} trees on {X.shape[0]} rows")
    return RandomForestModel(
        trees=trees, n_features=X.shape[1], n_trees=n_trees, max_features='sqrt',
        feature_importances=estimator.feature_importances_.copy(), rng_seed=seed,
    )
