"""
Isolation forest over subsamples of the target user's windows.
"""
import math
from dataclasses import dataclass
from typing import List

import numpy as np
import scipy.sparse as sp
from scipy.special import digamma

from config.settings import ISOLATION_TREES, ISOLATION_SUBSAMPLE
from utils.errors import DimensionMismatch, InsufficientSamples
from utils.logger import setup_logger
from .flat_tree import FlatTree, FlatTreeBuilder, as_dense_chunks

logger = setup_logger('classifiers')


def average_path_length(n) -> np.ndarray:
    """c(n) = 2 H(n-1) - 2 (n-1) / n with exact harmonic numbers; c(1) = 0, c(2) = 1"""
    n = np.asarray(n, dtype=float)
    flat = np.atleast_1d(n).ravel()
    out = np.zeros_like(flat)
    big = flat > 1
    m = flat[big]
    out[big] = 2.0 * (digamma(m) + np.euler_gamma) - 2.0 * (m - 1.0) / m
    return out.reshape(n.shape)


@dataclass
class IsolationForestModel:
    """Leaves store their training sample count"""
    trees: List[FlatTree]
    n_features: int
    n_trees: int = ISOLATION_TREES
    subsample: int = ISOLATION_SUBSAMPLE
    rng_seed: int = 0

    @property
    def c_psi(self) -> float:
        return float(average_path_length(self.subsample))

    @property
    def height_limit(self) -> int:
        return int(math.ceil(math.log2(self.subsample))) if self.subsample > 1 else 0

    def path_lengths(self, X) -> np.ndarray:
        """Mean h(x) = leaf depth + c(leaf size) over the trees"""
        if X.shape[-1] != self.n_features:
            raise DimensionMismatch(f"forest has {self.n_features} features, input has {X.shape[-1]}")
        out = np.zeros(X.shape[0])
        for start, block in as_dense_chunks(X):
            total = np.zeros(block.shape[0])
            for tree in self.trees:
                leaf, depth = tree.apply(block)
                total += depth + average_path_length(tree.value[leaf])
            out[start:start + block.shape[0]] = total / len(self.trees)
        return out

    def anomaly_score(self, X) -> np.ndarray:
        """s(x) = 2^(-E[h(x)] / c(psi)); higher is more anomalous"""
        return np.power(2.0, -self.path_lengths(X) / self.c_psi)


def _grow(builder: FlatTreeBuilder, X: np.ndarray, depth: int, limit: int, rng: np.random.Generator) -> int:
    if depth >= limit or X.shape[0] <= 1:
        return builder.add_leaf(X.shape[0])
    mins, maxs = X.min(axis=0), X.max(axis=0)
    candidates = np.flatnonzero(maxs > mins)
    if candidates.size == 0:
        return builder.add_leaf(X.shape[0])

    q = int(rng.choice(candidates))
    p = float(rng.uniform(mins[q], maxs[q]))
    if p >= maxs[q]:
        p = float(mins[q])
    go_left = X[:, q] <= p

    node = builder.add_split(q, p)
    builder.attach(node, _grow(builder, X[go_left], depth + 1, limit, rng), True)
    builder.attach(node, _grow(builder, X[~go_left], depth + 1, limit, rng), False)
    return node


def fit_isolation_forest(X, seed: int = 0, n_trees: int = ISOLATION_TREES,
                         subsample: int = ISOLATION_SUBSAMPLE) -> IsolationForestModel:
    """
    Build n_trees isolation trees, each on psi rows drawn without replacement.

    Splits pick a random feature among those not constant at the node and a
    split value uniform between its min and max. psi is clamped to the
    number of rows.
    """
    n = X.shape[0]
    if n < 2:
        raise InsufficientSamples(f"isolation forest needs at least 2 rows, got {n}")
    if subsample > n:
        logger.warning(f"Subsample {subsample} exceeds {n} training rows; clamping to {n}")
        subsample = n

    rng = np.random.default_rng(seed)
    limit = int(math.ceil(math.log2(subsample)))
    X = sp.csr_matrix(X) if sp.issparse(X) else np.asarray(X, dtype=float)
    trees = []
    for _ in range(n_trees):
        rows = np.sort(rng.choice(n, size=subsample, replace=False))
        sample = X[rows].toarray() if sp.issparse(X) else X[rows]
        builder = FlatTreeBuilder()
        _grow(builder, sample, 0, limit, rng)
        trees.append(builder.build())

    return IsolationForestModel(trees=trees, n_features=X.shape[1], n_trees=n_trees,
                                subsample=subsample, rng_seed=seed)
