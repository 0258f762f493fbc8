"""
Streaming half-space trees.

Every tree is a complete binary tree in heap order (children of i are 2i+1
and 2i+2). Masses are kept as (n_trees, n_nodes) arrays: latest_mass counts
the current window, reference_mass holds the last completed one.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from config.settings import HST_TREES, HST_DEPTH, HST_WINDOW, HST_SIZE_LIMIT_RATIO
from utils.errors import DimensionMismatch, InvalidSpec
from utils.logger import setup_logger
from .flat_tree import as_dense_chunks

logger = setup_logger('classifiers')


@dataclass
class HalfSpaceTreesModel:
    split_dim: np.ndarray
    split_value: np.ndarray
    n_features: int
    n_trees: int = HST_TREES
    depth: int = HST_DEPTH
    window_size: int = HST_WINDOW
    reference_mass: np.ndarray = None
    latest_mass: np.ndarray = None
    updates_in_window: int = 0
    windows_completed: int = 0
    # Anomaly-score cut calibrated on the warm-start stream; None uses the configured default
    threshold: Optional[float] = None
    rng_seed: int = 0
    size_limit_ratio: float = field(default=HST_SIZE_LIMIT_RATIO)

    def __post_init__(self):
        self.split_dim = np.asarray(self.split_dim, dtype=np.int64)
        self.split_value = np.asarray(self.split_value, dtype=float)
        shape = (self.n_trees, self.n_nodes)
        self.reference_mass = (np.zeros(shape, dtype=np.int64) if self.reference_mass is None
                               else np.asarray(self.reference_mass, dtype=np.int64))
        self.latest_mass = (np.zeros(shape, dtype=np.int64) if self.latest_mass is None
                            else np.asarray(self.latest_mass, dtype=np.int64))
        if self.split_dim.shape != (self.n_trees, self.n_internal):
            raise InvalidSpec(f"split arrays must have shape {(self.n_trees, self.n_internal)}")

    @property
    def n_nodes(self) -> int:
        return 2 ** (self.depth + 1) - 1

    @property
    def n_internal(self) -> int:
        return 2 ** self.depth - 1

    @property
    def size_limit(self) -> float:
        return self.size_limit_ratio * self.window_size

    @property
    def max_score(self) -> float:
        return float(self.n_trees * self.window_size * (2 ** (self.depth + 1) - 1))

    def paths(self, X: np.ndarray) -> np.ndarray:
        """Node index at every level: shape (depth + 1, n_trees, n_rows)"""
        n = X.shape[0]
        trees = np.arange(self.n_trees)[:, None]
        rows = np.arange(n)[None, :]
        node = np.zeros((self.n_trees, n), dtype=np.int64)
        out = np.empty((self.depth + 1, self.n_trees, n), dtype=np.int64)
        out[0] = node
        for level in range(1, self.depth + 1):
            dims = self.split_dim[trees, node]
            go_right = X[rows, dims] > self.split_value[trees, node]
            node = 2 * node + 1 + go_right
            out[level] = node
        return out

    def anomaly_score(self, X) -> np.ndarray:
        """1 minus the normalized reference-mass score; higher is more anomalous"""
        if X.shape[-1] != self.n_features:
            raise DimensionMismatch(f"model has {self.n_features} features, input has {X.shape[-1]}")
        out = np.zeros(X.shape[0])
        trees = np.arange(self.n_trees)[None, :, None]
        weights = (2.0 ** np.arange(self.depth + 1))[:, None, None]
        for start, block in as_dense_chunks(X, chunk_rows=512):
            path = self.paths(block)
            mass = self.reference_mass[trees, path]
            # A level counts while every level above it held at least size_limit
            above = np.cumprod(mass >= self.size_limit, axis=0)
            included = np.concatenate([np.ones_like(above[:1]), above[:-1]], axis=0)
            score = (mass * weights * included).sum(axis=(0, 1))
            out[start:start + block.shape[0]] = 1.0 - score / self.max_score
        return out

    def learn_one(self, x) -> 'HalfSpaceTreesModel':
        """Count x along its path in every tree, rolling the window when full"""
        x = x.toarray() if sp.issparse(x) else np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise DimensionMismatch(f"model has {self.n_features} features, input has {x.shape[1]}")
        path = self.paths(x)[:, :, 0]
        # Nodes on one path are distinct, so fancy-index increments do not collide
        self.latest_mass[np.arange(self.n_trees)[None, :], path] += 1
        self.updates_in_window += 1
        if self.updates_in_window >= self.window_size:
            self.roll_window()
        return self

    def roll_window(self):
        self.reference_mass = self.latest_mass
        self.latest_mass = np.zeros_like(self.reference_mass)
        self.updates_in_window = 0
        self.windows_completed += 1


def build_half_space_trees(n_features: int, seed: int = 0, n_trees: int = HST_TREES,
                           depth: int = HST_DEPTH, window_size: int = HST_WINDOW) -> HalfSpaceTreesModel:
    """
    Draw random half-space trees over the unit hypercube.

    Each tree draws s ~ U(0, 1) per dimension and works on the range
    [s - 2 max(s, 1-s), s + 2 max(s, 1-s)]; a node splits a random dimension
    at the midpoint of its current range, halving that range for its children.
    """
    if n_features < 1 or n_trees < 1 or depth < 1 or window_size < 1:
        raise InvalidSpec("half-space trees need positive features, trees, depth and window")
    rng = np.random.default_rng(seed)
    n_internal = 2 ** depth - 1
    split_dim = np.empty((n_trees, n_internal), dtype=np.int64)
    split_value = np.empty((n_trees, n_internal))

    for t in range(n_trees):
        s = rng.uniform(0.0, 1.0, size=n_features)
        spread = 2.0 * np.maximum(s, 1.0 - s)
        level_dims = []
        for level in range(depth):
            first, width = 2 ** level - 1, 2 ** level
            k = np.arange(width)
            dims = rng.integers(0, n_features, size=width)
            lo = (s - spread)[dims]
            hi = (s + spread)[dims]
            # Replay the ancestors that split the same dimension, root first
            for j in range(level):
                ancestor_dims = level_dims[j][k >> (level - j)]
                went_right = ((k >> (level - j - 1)) & 1).astype(bool)
                same = ancestor_dims == dims
                mid = (lo + hi) / 2.0
                hi = np.where(same & ~went_right, mid, hi)
                lo = np.where(same & went_right, mid, lo)
            level_dims.append(dims)
            split_dim[t, first:first + width] = dims
            split_value[t, first:first + width] = (lo + hi) / 2.0

    return HalfSpaceTreesModel(split_dim=split_dim, split_value=split_value, n_features=n_features,
                               n_trees=n_trees, depth=depth, window_size=window_size, rng_seed=seed)


def fit_half_space_trees(X, seed: int = 0, n_trees: int = HST_TREES, depth: int = HST_DEPTH,
                         window_size: int = HST_WINDOW, quantile: float = 0.9) -> HalfSpaceTreesModel:
    """
    Warm-start half-space trees on a stream of training rows.

    A partially filled final window is rolled into the reference masses when
    no window completed. The anomaly threshold is set to the given quantile
    of the warm-start rows' scores.
    """
    model = build_half_space_trees(X.shape[1], seed=seed, n_trees=n_trees, depth=depth, window_size=window_size)
    for i in range(X.shape[0]):
        model.learn_one(X[i])
    if model.windows_completed == 0 and model.updates_in_window:
        logger.debug(f"Only {model.updates_in_window} warm-start rows; rolling a partial window")
        model.roll_window()
    if X.shape[0]:
        model.threshold = float(np.quantile(model.anomaly_score(X), quantile))
    return model
