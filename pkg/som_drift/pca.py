"""
Principal directions used to place the initial SOM codebook.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.decomposition import PCA

from utils.errors import EmptyInput, ZeroVariance


@dataclass
class PrincipalComponents:
    mean: np.ndarray
    directions: np.ndarray          # (k, dim), unit rows
    explained_variance: np.ndarray  # (k,)


def pca_top_components(X, k: int = 2) -> PrincipalComponents:
    """
    Top-k orthonormal principal directions and their variances.

    Raises:
        ZeroVariance: when the rows do not spread at all
    """
    X = X.toarray() if sp.issparse(X) else np.asarray(X, dtype=float)
    if X.shape[0] < 2:
        raise EmptyInput(f"PCA needs at least 2 rows, got {X.shape[0]}")
    centered = X - X.mean(axis=0)
    if not np.any(np.abs(centered) > 0):
        raise ZeroVariance("all rows are identical")

    k = min(k, X.shape[0], X.shape[1])
    pca = PCA(n_components=k, svd_solver='full').fit(X)
    directions = pca.components_ / np.linalg.norm(pca.components_, axis=1, keepdims=True)
    return PrincipalComponents(mean=pca.mean_.copy(), directions=directions,
                               explained_variance=pca.explained_variance_.copy())
