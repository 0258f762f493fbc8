"""
Column scaling fitted on training rows only.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import MaxAbsScaler, MinMaxScaler

from utils.errors import DimensionMismatch, EmptyInput, InvalidSpec

Matrix = Union[np.ndarray, sp.spmatrix]

SCALING_MODES = ('maxabs', 'minmax')


@dataclass
class FeatureScaler:
    """Fitted column scaler; maxabs keeps sparsity, minmax densifies"""
    mode: str
    n_features: int
    scaler: object

    def transform(self, X: Matrix) -> Matrix:
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"scaler fitted on {self.n_features} columns, got {X.shape[1]}")
        if self.mode == 'minmax':
            dense = X.toarray() if sp.issparse(X) else np.asarray(X, dtype=float)
            return self.scaler.transform(dense)
        return self.scaler.transform(X)

    def to_dict(self) -> dict:
        if self.mode == 'maxabs':
            return {'mode': self.mode, 'n_features': self.n_features, 'scale': self.scaler.scale_.tolist()}
        return {'mode': self.mode, 'n_features': self.n_features,
                'data_min': self.scaler.data_min_.tolist(), 'data_max': self.scaler.data_max_.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> 'FeatureScaler':
        n = int(data['n_features'])
        if data['mode'] == 'maxabs':
            scale = np.asarray(data['scale'], dtype=float)
            scaler = MaxAbsScaler().fit(sp.csr_matrix(np.vstack([scale, np.zeros(n)])))
        else:
            scaler = MinMaxScaler().fit(np.vstack([data['data_min'], data['data_max']]))
        return cls(mode=data['mode'], n_features=n, scaler=scaler)


def fit_scaler(train: Matrix, mode: str = 'maxabs') -> FeatureScaler:
    if mode not in SCALING_MODES:
        raise InvalidSpec(f"unknown scaling mode {mode!r}")
    if train.shape[0] == 0:
        raise EmptyInput("cannot fit a scaler on zero rows")
    if mode == 'maxabs':
        scaler = MaxAbsScaler().fit(train)
    else:
        scaler = MinMaxScaler().fit(train.toarray() if sp.issparse(train) else np.asarray(train, dtype=float))
    return FeatureScaler(mode=mode, n_features=train.shape[1], scaler=scaler)


def scale_features(train: Matrix, apply_to: Matrix, mode: str = 'maxabs') -> Tuple[Matrix, Matrix, FeatureScaler]:
    """
    Fit a scaler on train and apply it to both matrices.

    Constant columns (maxabs with max 0, minmax with zero range) map to 0.

    Returns:
        (scaled train, scaled apply_to, fitted scaler)
    """
    scaler = fit_scaler(train, mode)
    return scaler.transform(train), scaler.transform(apply_to), scaler
