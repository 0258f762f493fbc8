"""
Uniform scoring, prediction and online-update facade over every model kind.

Polarity: linear, forest and one-class linear scores are higher for the
positive (target) class; isolation forest and half-space tree scores are
anomaly scores, higher for outliers. predict() always returns +1 for the
target class and -1 otherwise.
"""
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from config.settings import LINEAR_THRESHOLD, FOREST_THRESHOLD, ISOLATION_THRESHOLD, HST_THRESHOLD
from features.tfidf import FeatureVector
from utils.errors import DimensionMismatch, MissingLabel, UnknownModelKind
from .forest import RandomForestModel
from .half_space import HalfSpaceTreesModel
from .isolation import IsolationForestModel
from .linear import LinearModel, OneClassLinearModel

Model = Union[LinearModel, RandomForestModel, IsolationForestModel, OneClassLinearModel, HalfSpaceTreesModel]

ANOMALY_MODELS = (IsolationForestModel, HalfSpaceTreesModel)


def model_kind(model) -> str:
    """Kind tag used in configs, results and persisted files"""
    if isinstance(model, LinearModel):
        return 'sgd_hinge' if model.loss == 'hinge' else 'perceptron'
    if isinstance(model, RandomForestModel):
        return 'random_forest'
    if isinstance(model, IsolationForestModel):
        return 'isolation_forest'
    if isinstance(model, OneClassLinearModel):
        return 'oneclass_linear'
    if isinstance(model, HalfSpaceTreesModel):
        return 'half_space_trees'
    raise UnknownModelKind(f"unsupported model type {type(model).__name__}")


def default_threshold(model) -> float:
    if isinstance(model, (LinearModel, OneClassLinearModel)):
        return LINEAR_THRESHOLD
    if isinstance(model, RandomForestModel):
        return FOREST_THRESHOLD
    if isinstance(model, IsolationForestModel):
        return ISOLATION_THRESHOLD
    if isinstance(model, HalfSpaceTreesModel):
        return model.threshold if model.threshold is not None else HST_THRESHOLD
    raise UnknownModelKind(f"unsupported model type {type(model).__name__}")


def _as_matrix(x, n_features: int):
    if isinstance(x, FeatureVector):
        if x.dim != n_features:
            raise DimensionMismatch(f"model has {n_features} features, vector has {x.dim}")
        return sp.csr_matrix(x.to_dense()[None, :])
    if sp.issparse(x):
        return x
    return np.atleast_2d(np.asarray(x, dtype=float))


def score_matrix(model: Model, X) -> np.ndarray:
    """Score every row of X"""
    X = _as_matrix(X, getattr(model, 'n_features', None))
    if isinstance(model, (LinearModel, OneClassLinearModel)):
        return model.decision_function(X)
    if isinstance(model, RandomForestModel):
        return model.vote_fraction(X)
    if isinstance(model, (IsolationForestModel, HalfSpaceTreesModel)):
        return model.anomaly_score(X)
    raise UnknownModelKind(f"unsupported model type {type(model).__name__}")


def score(model: Model, x) -> float:
    """Score one feature vector"""
    return float(score_matrix(model, x)[0])


def predict(model: Model, X, threshold: Optional[float] = None) -> np.ndarray:
    """+1 (target / positive class) or -1 per row"""
    threshold = default_threshold(model) if threshold is None else threshold
    scores = score_matrix(model, X)
    if isinstance(model, ANOMALY_MODELS):
        return np.where(scores < threshold, 1, -1)
    return np.where(scores >= threshold, 1, -1)


def update_online(model: Model, x, y: Optional[int] = None) -> Model:
    """
    Single online step, mutating and returning the model.

    Linear kinds need y; half-space trees ignore it.
    """
    if isinstance(model, LinearModel):
        if y is None:
            raise MissingLabel(f"{model_kind(model)} update needs a label")
        return model.partial_fit_one(_as_matrix(x, model.n_features), int(y))
    if isinstance(model, HalfSpaceTreesModel):
        return model.learn_one(_as_matrix(x, model.n_features))
    raise UnknownModelKind(f"{model_kind(model)} does not support online updates")
