#!/usr/bin/env python3
"""
Report Service

Aggregates per-run evaluation rows into (setting, classifier, window) tables
with means and 95% intervals, and collects the per-user top features.
"""

from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from config.settings import SCHEMA_VERSION
from classifiers import FeatureRank, mean_ci, top_feature_categories
from data_manager.csv_handler import CSVHandler
from utils.errors import InvalidSpec
from utils.helpers import write_json
from utils.logger import setup_logger

logger = setup_logger('report')

METRICS = ('precision', 'recall', 'fscore')
SINGLE_RUN_FLAG = 'single_run'


def report_tables(results: Sequence[dict]) -> List[dict]:
    """
    One row per (setting, classifier, window): metric means over every
    (user, run) cell with a 95% interval, omitted and flagged for a single value.
    """
    if not results:
        raise InvalidSpec("no evaluation results to report")
    frame = pd.DataFrame(list(results))
    for metric in METRICS:
        frame[metric] = frame[metric].astype(float)
    frame['window'] = frame['window'].astype(int)

    rows = []
    for (setting, classifier, window), group in frame.groupby(['setting', 'classifier', 'window'], sort=True):
        row = {'setting': setting, 'classifier': classifier, 'window': int(window), 'runs': int(len(group))}
        flagged = False
        for metric in METRICS:
            mean, ci = mean_ci(group[metric].to_numpy())
            row[f'{metric}_mean'] = mean
            row[f'{metric}_ci_low'] = ci[0] if ci else None
            row[f'{metric}_ci_high'] = ci[1] if ci else None
            flagged = flagged or ci is None
        row['ci_flag'] = SINGLE_RUN_FLAG if flagged else ''
        rows.append(row)
    return rows


def top_feature_rows(report: Dict[str, List[FeatureRank]]) -> List[dict]:
    return [{'user': user, 'rank': rank, 'feature': fr.name, 'category': fr.category, 'importance': fr.importance}
            for user in sorted(report) for rank, fr in enumerate(report[user], start=1)]


def write_report_bundle(results: Sequence[dict], out_dir: Union[str, Path],
                        top_features: Dict[str, List[FeatureRank]] = None, seed: int = 0) -> Dict[str, Path]:
    """Results table as CSV and JSON, plus the top-feature table and category shares when given"""
    out_dir = Path(out_dir)
    handler = CSVHandler()
    table = report_tables(results)
    meta = {'schema_version': SCHEMA_VERSION, 'seed': seed}
    written = {
        'results_table': handler.write_csv('results_table', out_dir / 'results_table.csv', table, meta=meta),
    }
    summary = {'schema_version': SCHEMA_VERSION, 'seed': seed, 'results': table}
    if top_features is not None:
        written['top_features'] = handler.write_csv('top_features', out_dir / 'top_features.csv',
                                                    top_feature_rows(top_features), meta=meta)
        summary['top_feature_categories'] = top_feature_categories(top_features)
    written['summary'] = out_dir / 'summary.json'
    write_json(written['summary'], summary)
    logger.info(f"Report bundle: {len(table)} table rows written to {out_dir}")
    return written
