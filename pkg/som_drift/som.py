"""
Batch-trained self-organizing map on a hexagonal grid.

Units are laid out in odd-r offset rows: unit (r, c) sits at
x = c + 0.5 * (r % 2), y = r * sqrt(3) / 2, so every interior unit has six
neighbors at distance 1. Unit index = r * width + c.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.sparse as sp

from config.settings import SOM_WIDTH, SOM_HEIGHT, SOM_EPOCHS
from utils.errors import EmptyInput, InvalidSpec, ZeroVariance
from utils.logger import setup_logger
from .pca import pca_top_components

logger = setup_logger('som_drift')

BMU_CHUNK = 2048
_MIN_DENOMINATOR = 1e-12


def hex_positions(width: int, height: int) -> np.ndarray:
    rows, cols = np.divmod(np.arange(width * height), width)
    return np.column_stack([cols + 0.5 * (rows % 2), rows * np.sqrt(3.0) / 2.0])


@dataclass
class SomGrid:
    width: int
    height: int
    codebook: np.ndarray
    epochs: int = SOM_EPOCHS
    init: str = 'pca'
    seed: int = 0
    topology: str = 'hexagonal'
    quantization_errors: List[float] = field(default_factory=list)

    @property
    def n_units(self) -> int:
        return self.width * self.height

    @property
    def positions(self) -> np.ndarray:
        return hex_positions(self.width, self.height)

    def best_matching_units(self, X) -> np.ndarray:
        return best_matching_units(self.codebook, X)

    def quantization_error(self, X) -> float:
        return quantization_error(self.codebook, X)


def _squared_distances(codebook: np.ndarray, block) -> np.ndarray:
    if sp.issparse(block):
        x_sq = np.asarray(block.multiply(block).sum(axis=1)).ravel()
        cross = np.asarray(block @ codebook.T)
    else:
        x_sq = np.einsum('ij,ij->i', block, block)
        cross = block @ codebook.T
    w_sq = np.einsum('ij,ij->i', codebook, codebook)
    return np.maximum(x_sq[:, None] - 2.0 * cross + w_sq[None, :], 0.0)


def best_matching_units(codebook: np.ndarray, X) -> np.ndarray:
    """Index of the closest codebook vector per row (first on ties)"""
    out = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], BMU_CHUNK):
        out[start:start + BMU_CHUNK] = np.argmin(_squared_distances(codebook, X[start:start + BMU_CHUNK]), axis=1)
    return out


def quantization_error(codebook: np.ndarray, X) -> float:
    """Mean Euclidean distance between rows and their best matching unit"""
    total = 0.0
    for start in range(0, X.shape[0], BMU_CHUNK):
        d2 = _squared_distances(codebook, X[start:start + BMU_CHUNK])
        total += float(np.sqrt(d2.min(axis=1)).sum())
    return total / X.shape[0]


def _random_codebook(X, width: int, height: int, seed: int):
    rng = np.random.default_rng(seed)
    mean = np.asarray(X.mean(axis=0)).ravel()
    return mean + 0.01 * rng.standard_normal((width * height, mean.size)), 'random'


def _initial_codebook(X, width: int, height: int, seed: int):
    if X.shape[0] < 2:
        logger.warning("Single-row SOM input; falling back to random initialization")
        return _random_codebook(X, width, height, seed)
    try:
        pcs = pca_top_components(X, k=2)
    except ZeroVariance:
        logger.warning("Zero-variance SOM input; falling back to random initialization")
        return _random_codebook(X, width, height, seed)

    rows, cols = np.divmod(np.arange(width * height), width)
    c1 = np.linspace(-1.0, 1.0, width)[cols]
    c2 = np.linspace(-1.0, 1.0, height)[rows] if height > 1 else np.zeros(rows.size)
    pc1 = pcs.directions[0]
    pc2 = pcs.directions[1] if pcs.directions.shape[0] > 1 else np.zeros_like(pc1)
    return pcs.mean + c1[:, None] * pc1 + c2[:, None] * pc2, 'pca'


def som_train(X, width: int = SOM_WIDTH, height: int = SOM_HEIGHT, epochs: int = SOM_EPOCHS,
              seed: int = 0) -> SomGrid:
    """
    Train a hexagonal SOM with batch updates.

    The codebook starts on the plane of the top two principal directions. Each
    epoch assigns every row to its best matching unit and replaces each unit by
    the neighborhood-weighted mean of the rows; the Gaussian radius shrinks
    linearly from max(width, height) / 2 to 1.
    """
    if X.shape[0] == 0:
        raise EmptyInput("SOM training needs at least one row")
    if width < 1 or height < 1 or epochs < 0:
        raise InvalidSpec(f"invalid SOM shape {width}x{height} / {epochs} epochs")
    X = sp.csr_matrix(X) if sp.issparse(X) else np.asarray(X, dtype=float)

    codebook, init = _initial_codebook(X, width, height, seed)
    positions = hex_positions(width, height)
    grid_d2 = ((positions[:, None, :] - positions[None, :, :]) ** 2).sum(axis=2)
    start_radius = max(width, height) / 2.0
    errors = [quantization_error(codebook, X)]
    n = X.shape[0]

    for epoch in range(epochs):
        radius = start_radius + (1.0 - start_radius) * (epoch / (epochs - 1) if epochs > 1 else 0.0)
        radius = max(radius, 1.0)
        bmu = best_matching_units(codebook, X)
        # One-hot (units x rows) assignment gives per-unit sums in one product
        assign = sp.csr_matrix((np.ones(n), (bmu, np.arange(n))), shape=(codebook.shape[0], n))
        sums = np.asarray((assign @ X).todense()) if sp.issparse(X) else assign @ X
        counts = np.asarray(assign.sum(axis=1)).ravel()

        h = np.exp(-grid_d2 / (2.0 * radius * radius))
        numerator = h @ sums
        denominator = h @ counts
        keep = denominator < _MIN_DENOMINATOR
        codebook = np.where(keep[:, None], codebook, numerator / np.where(keep, 1.0, denominator)[:, None])
        errors.append(quantization_error(codebook, X))
        logger.debug(f"SOM epoch {epoch + 1}/{epochs} radius {radius:.2f} qe {errors[-1]:.6f}")

    return SomGrid(width=width, height=height, codebook=codebook, epochs=epochs, init=init,
                   seed=seed, quantization_errors=errors)
