#!/usr/bin/env python3
"""
SOM and Drift Module

Self-organizing maps, U-matrices, classification curves, drift labels and
synthetic drift datasets.
"""

from .pca import PrincipalComponents, pca_top_components
from .som import SomGrid, som_train, best_matching_units, quantization_error, hex_positions
from .umatrix import (
    UMatrix, WeeklySomSeries, compute_umatrix, umatrix_render, write_pgm, read_pgm,
    codebook_displacement, weekly_som_series, hex_neighbors,
)
from .drift_curve import CurveParams, ClassificationCurve, drift_curve
from .drift_categorizer import DriftThresholds, DriftLabel, binary_segmentation, categorize_drift
from .drift_synth import SYNTH_KINDS, b_probability, middle_third, synthesize_drift_dataset

__all__ = [
    "PrincipalComponents",
    "pca_top_components",
    "SomGrid",
    "som_train",
    "best_matching_units",
    "quantization_error",
    "hex_positions",
    "UMatrix",
    "WeeklySomSeries",
    "compute_umatrix",
    "umatrix_render",
    "write_pgm",
    "read_pgm",
    "codebook_displacement",
    "weekly_som_series",
    "hex_neighbors",
    "CurveParams",
    "ClassificationCurve",
    "drift_curve",
    "DriftThresholds",
    "DriftLabel",
    "binary_segmentation",
    "categorize_drift",
    "SYNTH_KINDS",
    "b_probability",
    "middle_third",
    "synthesize_drift_dataset",
]
