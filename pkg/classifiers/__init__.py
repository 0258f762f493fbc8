#!/usr/bin/env python3
"""
Classifiers Module

Offline and online, binary and one-class models with the evaluation protocols.
"""

from .flat_tree import FlatTree
from .linear import LinearModel, OneClassLinearModel, fit_linear, fit_oneclass_linear
from .forest import RandomForestModel, fit_random_forest
from .isolation import IsolationForestModel, fit_isolation_forest, average_path_length
from .half_space import HalfSpaceTreesModel, build_half_space_trees, fit_half_space_trees
from .scoring import model_kind, default_threshold, score, score_matrix, predict, update_online
from .training import train_offline_binary, train_offline_oneclass, train_online_warm_start
from .protocols import (
    WindowingOptions, Task, split_seven_days, partition_negative_users, assemble_binary_task,
    assemble_oneclass_outliers, assemble_oneclass_task,
)
from .evaluation import (
    EvalReport, compute_metrics, confusion_counts, evaluate_offline, evaluate_prequential,
    roc_auc, mean_ci,
)
from .importance import FeatureRank, feature_importance_report, top_feature_categories
from .persistence import save_model, load_model, model_to_dict, model_from_dict

__all__ = [
    "FlatTree",
    "LinearModel",
    "OneClassLinearModel",
    "fit_linear",
    "fit_oneclass_linear",
    "RandomForestModel",
    "fit_random_forest",
    "IsolationForestModel",
    "fit_isolation_forest",
    "average_path_length",
    "HalfSpaceTreesModel",
    "build_half_space_trees",
    "fit_half_space_trees",
    "model_kind",
    "default_threshold",
    "score",
    "score_matrix",
    "predict",
    "update_online",
    "train_offline_binary",
    "train_offline_oneclass",
    "train_online_warm_start",
    "WindowingOptions",
    "Task",
    "split_seven_days",
    "partition_negative_users",
    "assemble_binary_task",
    "assemble_oneclass_outliers",
    "assemble_oneclass_task",
    "EvalReport",
    "compute_metrics",
    "confusion_counts",
    "evaluate_offline",
    "evaluate_prequential",
    "roc_auc",
    "mean_ci",
    "FeatureRank",
    "feature_importance_report",
    "top_feature_categories",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
]
