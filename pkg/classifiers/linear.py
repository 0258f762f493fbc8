"""
Linear models: hinge-loss SGD, perceptron and the linear one-class model.

Offline fitting runs scikit-learn's SGD estimators with a constant learning
rate and a fixed number of shuffled epochs; the fitted weights are copied into
plain numpy models that are scored, updated online and persisted here.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from sklearn.linear_model import SGDClassifier, SGDOneClassSVM

from config.settings import (
    SGD_LEARNING_RATE, SGD_L2, SGD_EPOCHS, PERCEPTRON_LEARNING_RATE,
    ONECLASS_NU, ONECLASS_LEARNING_RATE, ONECLASS_EPOCHS,
)
from utils.errors import DimensionMismatch, InvalidSpec, MissingLabel, SingleClassTraining
from utils.logger import setup_logger

logger = setup_logger('classifiers')

LINEAR_LOSSES = ('hinge', 'perceptron')


def _row(x) -> np.ndarray:
    if sp.issparse(x):
        return x.toarray().ravel()
    return np.asarray(x, dtype=float).ravel()


@dataclass
class LinearModel:
    """w·x + b classifier; score > 0 leans to the positive class"""
    weights: np.ndarray
    bias: float = 0.0
    loss: str = 'hinge'
    lr: float = SGD_LEARNING_RATE
    l2: float = SGD_L2
    epochs_seen: int = 0
    updates_seen: int = field(default=0, compare=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        self.bias = float(self.bias)
        if self.loss not in LINEAR_LOSSES:
            raise InvalidSpec(f"unknown linear loss {self.loss!r}")

    @property
    def n_features(self) -> int:
        return self.weights.size

    def decision_function(self, X) -> np.ndarray:
        if X.shape[-1] != self.n_features:
            raise DimensionMismatch(f"model has {self.n_features} features, input has {X.shape[-1]}")
        return np.asarray(X @ self.weights).ravel() + self.bias

    def partial_fit_one(self, x, y: int) -> 'LinearModel':
        """
        One online step on a single labelled sample.

        hinge: w <- (1 - lr*l2) w, plus lr*y*x (and b += lr*y) when y(w·x+b) < 1
        perceptron: w += lr*y*x and b += lr*y only when y(w·x+b) <= 0
        """
        if y is None:
            raise MissingLabel(f"{self.loss} update needs a label")
        if y not in (-1, 1):
            raise InvalidSpec(f"labels must be -1 or +1, got {y}")
        x = _row(x)
        if x.size != self.n_features:
            raise DimensionMismatch(f"model has {self.n_features} features, input has {x.size}")
        margin = y * (float(self.weights @ x) + self.bias)

        if self.loss == 'hinge':
            self.weights *= (1.0 - self.lr * self.l2)
            if margin < 1.0:
                self.weights += self.lr * y * x
                self.bias += self.lr * y
        elif margin <= 0.0:
            self.weights += self.lr * y * x
            self.bias += self.lr * y
        self.updates_seen += 1
        return self


@dataclass
class OneClassLinearModel:
    """Linear one-class model; decision is sign(w·x - rho)"""
    weights: np.ndarray
    rho: float = 0.0
    nu: float = ONECLASS_NU
    lr: float = ONECLASS_LEARNING_RATE

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        self.rho = float(self.rho)
        if not 0.0 < self.nu <= 1.0:
            raise InvalidSpec(f"nu must lie in (0, 1], got {self.nu}")

    @property
    def n_features(self) -> int:
        return self.weights.size

    def decision_function(self, X) -> np.ndarray:
        if X.shape[-1] != self.n_features:
            raise DimensionMismatch(f"model has {self.n_features} features, input has {X.shape[-1]}")
        return np.asarray(X @ self.weights).ravel() - self.rho


def _check_binary_labels(y) -> np.ndarray:
    y = np.asarray(y, dtype=int).ravel()
    if not set(np.unique(y)) <= {-1, 1}:
        raise InvalidSpec("binary labels must be -1 or +1")
    if np.unique(y).size < 2:
        raise SingleClassTraining(f"training labels hold a single class ({np.unique(y).tolist()})")
    return y


def fit_linear(X, y, loss: str = 'hinge', seed: int = 0, lr: float = None,
               l2: float = None, epochs: int = SGD_EPOCHS) -> LinearModel:
    """
    Train a linear classifier over fixed shuffled epochs.

    Args:
        X: Scaled feature matrix (dense or sparse)
        y: Labels in {-1, +1}
        loss: 'hinge' (L2-regularized SVM objective) or 'perceptron'
        seed: Shuffle seed
    """
    y = _check_binary_labels(y)
    if loss not in LINEAR_LOSSES:
        raise InvalidSpec(f"unknown linear loss {loss!r}")
    if loss == 'hinge':
        lr = SGD_LEARNING_RATE if lr is None else lr
        l2 = SGD_L2 if l2 is None else l2
        penalty = 'l2'
    else:
        lr = PERCEPTRON_LEARNING_RATE if lr is None else lr
        l2 = 0.0 if l2 is None else l2
        penalty = 'l2' if l2 > 0 else None

    estimator = SGDClassifier(
        loss=loss, penalty=penalty, alpha=l2 if l2 > 0 else 0.0001,
        learning_rate='constant', eta0=lr, max_iter=epochs, tol=None,
        shuffle=True, random_state=seed, fit_intercept=True,
    )
    estimator.fit(X, y)
    # classes_ is sorted, so coef_ points to +1
    model = LinearModel(weights=estimator.coef_.ravel().copy(), bias=float(estimator.intercept_[0]),
                        loss=loss, lr=lr, l2=l2, epochs_seen=int(estimator.n_iter_))
    logger.debug(f"Trained {loss} linear model on {X.shape[0]} rows x {X.shape[1]} features")
    return model


def fit_oneclass_linear(X, seed: int = 0, nu: float = ONECLASS_NU, lr: float = ONECLASS_LEARNING_RATE,
                        epochs: int = ONECLASS_EPOCHS) -> OneClassLinearModel:
    """Minimize the nu one-class objective by stochastic subgradient steps"""
    if X.shape[0] == 0:
        raise InvalidSpec("one-class training needs at least one row")
    estimator = SGDOneClassSVM(nu=nu, learning_rate='constant', eta0=lr, max_iter=epochs,
                               tol=None, shuffle=True, random_state=seed)
    estimator.fit(X)
    return OneClassLinearModel(weights=estimator.coef_.ravel().copy(), rho=float(estimator.offset_[0]),
                               nu=nu, lr=lr)
