"""
Kind-dispatched training entry points.
"""
from typing import Optional

import numpy as np

from config.constants import BINARY_MODEL_KINDS, ONECLASS_MODEL_KINDS, ONLINE_MODEL_KINDS
from config.settings import (
    FOREST_TREES, ISOLATION_TREES, ISOLATION_SUBSAMPLE, ONECLASS_NU, ONECLASS_LEARNING_RATE,
    ONECLASS_EPOCHS, HST_TREES, HST_DEPTH, HST_WINDOW,
)
from utils.errors import UnknownModelKind
from .forest import fit_random_forest
from .half_space import fit_half_space_trees
from .isolation import fit_isolation_forest
from .linear import fit_linear, fit_oneclass_linear


def train_offline_binary(kind: str, X, y, seed: int = 0, params: Optional[dict] = None):
    """Train sgd_hinge, perceptron or random_forest on ±1 labels"""
    params = params or {}
    if kind == 'sgd_hinge':
        return fit_linear(X, y, loss='hinge', seed=seed, **params)
    if kind == 'perceptron':
        return fit_linear(X, y, loss='perceptron', seed=seed, **params)
    if kind == 'random_forest':
        return fit_random_forest(X, y, seed=seed, n_trees=params.get('n_trees', FOREST_TREES))
    raise UnknownModelKind(f"unknown binary model kind {kind!r} (expected one of {BINARY_MODEL_KINDS})")


def train_offline_oneclass(kind: str, X, params: Optional[dict] = None, seed: int = 0):
    """Train isolation_forest or oneclass_linear on target-user rows only"""
    params = params or {}
    if kind == 'isolation_forest':
        return fit_isolation_forest(X, seed=seed, n_trees=params.get('n_trees', ISOLATION_TREES),
                                    subsample=params.get('subsample', ISOLATION_SUBSAMPLE))
    if kind == 'oneclass_linear':
        return fit_oneclass_linear(X, seed=seed, nu=params.get('nu', ONECLASS_NU),
                                   lr=params.get('lr', ONECLASS_LEARNING_RATE),
                                   epochs=params.get('epochs', ONECLASS_EPOCHS))
    raise UnknownModelKind(f"unknown one-class model kind {kind!r} (expected one of {ONECLASS_MODEL_KINDS})")


def train_online_warm_start(kind: str, X, y, seed: int = 0, params: Optional[dict] = None):
    """
    Warm-start model for prequential evaluation.

    Linear kinds train on both classes; half-space trees see the positive rows only.
    """
    params = params or {}
    if kind in ('sgd_hinge', 'perceptron'):
        return train_offline_binary(kind, X, y, seed=seed, params=params)
    if kind == 'half_space_trees':
        positive = np.flatnonzero(np.asarray(y) == 1)
        return fit_half_space_trees(X[positive], seed=seed, n_trees=params.get('n_trees', HST_TREES),
                                    depth=params.get('depth', HST_DEPTH),
                                    window_size=params.get('window_size', HST_WINDOW))
    raise UnknownModelKind(f"unknown online model kind {kind!r} (expected one of {ONLINE_MODEL_KINDS})")
