"""
U-matrix rendering and week-over-week SOM comparison.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from config.settings import SOM_WIDTH, SOM_HEIGHT, SOM_EPOCHS, SOM_WINDOW, DEFAULT_SCALING
from features import WindowSpec, build_feature_matrix, fit_scaler, fit_vocabulary, slide_windows
from ingest.records import UserDataset
from utils.errors import DatasetTooShort, IoError
from utils.logger import setup_logger
from .som import SomGrid, hex_positions, som_train

logger = setup_logger('som_drift')


@dataclass
class UMatrix:
    values: np.ndarray  # (height, width)

    @property
    def image(self) -> np.ndarray:
        """Min-max mapped to 0..255; a constant matrix maps to 0"""
        lo, hi = float(self.values.min()), float(self.values.max())
        if hi - lo <= 0:
            return np.zeros(self.values.shape, dtype=np.uint8)
        return np.rint((self.values - lo) / (hi - lo) * 255.0).astype(np.uint8)


def hex_neighbors(width: int, height: int) -> List[np.ndarray]:
    """Units at grid distance 1 (six inside, fewer on the border)"""
    positions = hex_positions(width, height)
    d = np.sqrt(((positions[:, None, :] - positions[None, :, :]) ** 2).sum(axis=2))
    return [np.flatnonzero(np.abs(row - 1.0) < 1e-9) for row in d]


def compute_umatrix(grid: SomGrid) -> UMatrix:
    """Mean codebook distance of every unit to its hex neighbors"""
    values = np.zeros(grid.n_units)
    for unit, neighbors in enumerate(hex_neighbors(grid.width, grid.height)):
        if neighbors.size:
            values[unit] = np.linalg.norm(grid.codebook[neighbors] - grid.codebook[unit], axis=1).mean()
    return UMatrix(values=values.reshape(grid.height, grid.width))


def write_pgm(image: np.ndarray, path: Union[str, Path]) -> Path:
    """Binary (P5) grayscale PGM, one pixel per unit"""
    path = Path(path)
    height, width = image.shape
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'wb') as f:
            f.write(f"P5\n{width} {height}\n255\n".encode('ascii'))
            f.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}")
    return path


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    with open(path, 'rb') as f:
        magic, dims, maxval = f.readline(), f.readline(), f.readline()
        if magic.strip() != b'P5' or maxval.strip() != b'255':
            raise IoError(f"{path} is not an 8-bit binary PGM")
        width, height = (int(v) for v in dims.split())
        return np.frombuffer(f.read(width * height), dtype=np.uint8).reshape(height, width)


def umatrix_render(grid: SomGrid, path: Union[str, Path], png: bool = False) -> UMatrix:
    """Compute the U-matrix and write it as PGM (plus PNG when asked)"""
    umatrix = compute_umatrix(grid)
    path = write_pgm(umatrix.image, path)
    if png:
        from matplotlib.image import imsave
        try:
            imsave(path.with_suffix('.png'), umatrix.image, cmap='gray', vmin=0, vmax=255)
        except OSError as e:
            raise IoError(f"cannot write {path.with_suffix('.png')}: {e}")
    return umatrix


def codebook_displacement(previous: SomGrid, current: SomGrid) -> float:
    """Mean Euclidean distance between matching units of two grids"""
    return float(np.linalg.norm(current.codebook - previous.codebook, axis=1).mean())


@dataclass
class WeeklySomSeries:
    user_id: str
    weeks: List[int] = field(default_factory=list)
    grids: List[SomGrid] = field(default_factory=list)
    umatrices: List[UMatrix] = field(default_factory=list)
    # displacement[i] compares weeks[i] with weeks[i + 1]
    displacement: List[float] = field(default_factory=list)


def weekly_som_series(dataset: UserDataset, seed: int, t: int = SOM_WINDOW, width: int = SOM_WIDTH,
                      height: int = SOM_HEIGHT, epochs: int = SOM_EPOCHS, scaling: str = DEFAULT_SCALING,
                      out_dir: Optional[Union[str, Path]] = None, png: bool = False) -> WeeklySomSeries:
    """
    One SOM per study week with identical parameters.

    All weeks share one vocabulary and scaler fitted on the user's full data so
    codebooks live in the same space and can be compared unit by unit.
    """
    spec = WindowSpec(t)
    weekly_windows = []
    for week_no, week in enumerate(dataset.split_by_week(), start=1):
        try:
            weekly_windows.append((week_no, slide_windows(week, spec)))
        except DatasetTooShort:
            logger.warning(f"{dataset.user_id}: week {week_no} has fewer than {t} rows; skipped")

    series = WeeklySomSeries(user_id=dataset.user_id)
    if not weekly_windows:
        return series
    all_windows = [w for _, windows in weekly_windows for w in windows]
    vocab_proc = fit_vocabulary(all_windows, 'process')
    vocab_dom = fit_vocabulary(all_windows, 'domain')
    scaler = fit_scaler(build_feature_matrix(all_windows, vocab_proc, vocab_dom).X, scaling)

    for week_no, windows in weekly_windows:
        X = scaler.transform(build_feature_matrix(windows, vocab_proc, vocab_dom).X)
        grid = som_train(X, width=width, height=height, epochs=epochs, seed=seed)
        if out_dir is not None:
            umatrix = umatrix_render(grid, Path(out_dir) / f"{dataset.user_id}_{week_no}.pgm", png=png)
        else:
            umatrix = compute_umatrix(grid)
        if series.grids:
            series.displacement.append(codebook_displacement(series.grids[-1], grid))
        series.weeks.append(week_no)
        series.grids.append(grid)
        series.umatrices.append(umatrix)
        logger.info(f"{dataset.user_id}: week {week_no} SOM qe {grid.quantization_errors[-1]:.4f}")
    return series
