#!/usr/bin/env python3
"""
Ingestion Module

Parses extractor event logs and aggregates them into per-minute activity matrices.
"""

from .records import EventKind, Direction, NetInfo, RawEventRecord, ActivityMinute, UserDataset
from .event_parser import (
    ParseIssue, parse_event_line, format_event_line, parse_event_file, filetime_to_epoch_seconds,
)
from .dns import resolve_domain, load_dns_map
from .activity_matrix import build_activity_matrix, ingest_user_dir, process_token

__all__ = [
    "EventKind",
    "Direction",
    "NetInfo",
    "RawEventRecord",
    "ActivityMinute",
    "UserDataset",
    "ParseIssue",
    "parse_event_line",
    "format_event_line",
    "parse_event_file",
    "filetime_to_epoch_seconds",
    "resolve_domain",
    "load_dns_map",
    "build_activity_matrix",
    "ingest_user_dir",
    "process_token",
]
