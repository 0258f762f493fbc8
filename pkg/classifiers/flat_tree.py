"""
Binary trees stored as preorder node arrays.

A node is internal when feature >= 0; samples with x[feature] <= threshold
go to the left child.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

CHUNK_ROWS = 4096


def as_dense_chunks(X, chunk_rows: int = CHUNK_ROWS):
    """Yield (start, dense block) pairs of at most chunk_rows rows"""
    X = X if sp.issparse(X) else np.atleast_2d(np.asarray(X, dtype=float))
    for start in range(0, X.shape[0], chunk_rows):
        block = X[start:start + chunk_rows]
        yield start, (block.toarray() if sp.issparse(block) else block)


@dataclass
class FlatTree:
    """Preorder node arrays of one tree"""
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        self.feature = np.asarray(self.feature, dtype=np.int64)
        self.threshold = np.asarray(self.threshold, dtype=float)
        self.left = np.asarray(self.left, dtype=np.int64)
        self.right = np.asarray(self.right, dtype=np.int64)
        self.value = np.asarray(self.value, dtype=float)

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def max_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max()) if self.n_nodes else 0

    def apply(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Leaf node index and leaf depth of every row of a dense matrix"""
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        depth = np.zeros(n, dtype=np.int64)
        rows = np.arange(n)
        active = self.feature[node] >= 0
        while active.any():
            r, cur = rows[active], node[active]
            go_left = X[r, self.feature[cur]] <= self.threshold[cur]
            node[r] = np.where(go_left, self.left[cur], self.right[cur])
            depth[r] += 1
            active = self.feature[node] >= 0
        return node, depth

    def to_dict(self) -> dict:
        return {
            'feature': self.feature.tolist(),
            'threshold': self.threshold.tolist(),
            'left': self.left.tolist(),
            'right': self.right.tolist(),
            'value': self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'FlatTree':
        return cls(data['feature'], data['threshold'], data['left'], data['right'], data['value'])


class FlatTreeBuilder:
    """Appends nodes in preorder; children are linked once they are created"""

    def __init__(self):
        self.feature, self.threshold, self.left, self.right, self.value = [], [], [], [], []

    def add_leaf(self, value: float) -> int:
        return self._add(-1, np.nan, value)

    def add_split(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, np.nan)

    def attach(self, parent: int, child: int, is_left: bool):
        if is_left:
            self.left[parent] = child
        else:
            self.right[parent] = child

    def _add(self, feature: int, threshold: float, value: float) -> int:
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(value))
        return len(self.feature) - 1

    def build(self) -> FlatTree:
        return FlatTree(self.feature, self.threshold, self.left, self.right, self.value)
