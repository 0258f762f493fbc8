#!/usr/bin/env python3
"""
Plot Service

Simple SVG line plots for curves, spectra and autocorrelations. Output is
byte-stable: no creation date and a fixed SVG id salt.
"""

from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from utils.errors import IoError
from utils.logger import setup_logger

logger = setup_logger('plots')

matplotlib.rcParams['svg.hashsalt'] = 'usage-profiler'


def line_plot(x: Sequence[float], y: Sequence[float], path: Union[str, Path], title: str = '',
              xlabel: str = '', ylabel: str = '', ylim: Optional[tuple] = None,
              markers: Optional[Sequence[float]] = None) -> Path:
    """Write a single-series line plot; markers draw vertical guides at the given x values"""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 3))
    try:
        ax.plot(list(x), list(y), linewidth=0.8)
        for m in markers or ():
            ax.axvline(m, color='grey', linestyle='--', linewidth=0.5)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if ylim is not None:
            ax.set_ylim(*ylim)
        fig.tight_layout()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format='svg', metadata={'Date': None})
    except OSError as e:
        raise IoError(f"cannot write plot {path}: {e}")
    finally:
        plt.close(fig)
    logger.debug(f"Plot written to {path}")
    return path


def plot_drift_curve(curve, path: Union[str, Path], label: str = '') -> Path:
    hours = [h - int(curve.hours[0]) for h in curve.hours] if len(curve) else []
    return line_plot(hours, curve.scores, path, title=f"{curve.user_id} {label}".strip(),
                     xlabel='hours after training', ylabel='accepted share', ylim=(0, 1.05))


def plot_psd(estimate, path: Union[str, Path], title: str = '') -> Path:
    return line_plot(estimate.frequencies[1:], estimate.psd[1:], path, title=title,
                     xlabel='frequency (1/h)', ylabel='power', markers=[estimate.peak_frequency])


def plot_autocorrelation(check, path: Union[str, Path], title: str = '') -> Path:
    return line_plot(range(len(check.acf)), check.acf, path, title=title, xlabel='lag (h)',
                     ylabel='autocorrelation', markers=check.lags)


def plot_prequential(curve: Sequence[float], path: Union[str, Path], title: str = '') -> Path:
    return line_plot(range(1, len(curve) + 1), curve, path, title=title, xlabel='stream item',
                     ylabel='F-score', ylim=(0, 1.05))
