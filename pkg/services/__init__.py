#!/usr/bin/env python3
"""
Services Module

Synthetic users, experiment runs, report tables, plots and the stage pipeline.
"""

from .synthetic_user_service import (
    SyntheticUserSpec, default_population, expand_user_entries, generate_synthetic_user, write_raw_logs,
)
from .evaluation_service import ExperimentOptions, run_offline_binary, run_offline_oneclass, run_online
from .report_service import report_tables, top_feature_rows, write_report_bundle
from .pipeline_service import PipelineConfig, PipelineRunner, load_config, run_pipeline

__all__ = [
    "SyntheticUserSpec",
    "default_population",
    "expand_user_entries",
    "generate_synthetic_user",
    "write_raw_logs",
    "ExperimentOptions",
    "run_offline_binary",
    "run_offline_oneclass",
    "run_online",
    "report_tables",
    "top_feature_rows",
    "write_report_bundle",
    "PipelineConfig",
    "PipelineRunner",
    "load_config",
    "run_pipeline",
]
