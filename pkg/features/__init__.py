#!/usr/bin/env python3
"""
Feature Extraction Module

Sliding windows over the activity matrix, TF-IDF vectorization and scaling.
"""

from .windows import WindowSpec, FeatureWindow, slide_windows, split_sessions
from .vocabulary import FieldTag, Vocabulary, fit_vocabulary
from .tfidf import (
    FeatureVector, FeatureMatrix, idf_weights, tfidf_vectorize, build_feature_matrix,
    feature_names, feature_category, category_of_name,
)
from .scaling import FeatureScaler, fit_scaler, scale_features

__all__ = [
    "WindowSpec",
    "FeatureWindow",
    "slide_windows",
    "split_sessions",
    "FieldTag",
    "Vocabulary",
    "fit_vocabulary",
    "FeatureVector",
    "FeatureMatrix",
    "idf_weights",
    "tfidf_vectorize",
    "build_feature_matrix",
    "feature_names",
    "feature_category",
    "category_of_name",
    "FeatureScaler",
    "fit_scaler",
    "scale_features",
]
