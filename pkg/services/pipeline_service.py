#!/usr/bin/env python3
"""
Pipeline Service

Loads and validates the run configuration, then runs the analysis stages in
order. Every stage writes self-describing files under the output directory
and later stages read them back, so any stage can be rerun on its own.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
from joblib import Parallel, delayed

from config.constants import (
    BINARY_MODEL_KINDS, ONECLASS_MODEL_KINDS, ONLINE_MODEL_KINDS, PAPER_WINDOW_SIZES, PIPELINE_STAGES,
)
from config.settings import CONFIG_SCHEMA, DNS_MAP_FILE, SCHEMA_VERSION, TRAIN_DAYS
from classifiers import (
    FeatureRank, feature_importance_report, save_model, train_offline_oneclass,
)
from data_manager.csv_handler import CSVHandler
from features import WindowSpec, build_feature_matrix, fit_scaler, fit_vocabulary, slide_windows
from ingest import ingest_user_dir, load_dns_map
from ingest.records import UserDataset
from som_drift import (
    SYNTH_KINDS, CurveParams, DriftThresholds, categorize_drift, drift_curve, synthesize_drift_dataset,
    weekly_som_series,
)
from timeseries import PeriodicityParams, build_hourly_series, periodicity_report
from utils.errors import (
    DatasetTooShort, InsufficientSpan, InvalidConfig, MissingPath, ProfilerError, SourceTooShort, StageError,
)
from utils.helpers import derive_seed, read_json, safe_int, write_json
from utils.logger import setup_logger
from .evaluation_service import ExperimentOptions, run_offline_binary, run_offline_oneclass, run_online
from .plot_service import plot_autocorrelation, plot_drift_curve, plot_prequential, plot_psd
from .report_service import top_feature_rows, write_report_bundle
from .synthetic_user_service import expand_user_entries, generate_synthetic_user, write_raw_logs

logger = setup_logger('pipeline')

PATH_KEYS = ('logs_dir', 'dns_map', 'matrix_dir')


def _check_type(key: str, value: Any):
    expected = CONFIG_SCHEMA[key][0]
    if value is None:
        return
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return
    if expected is int and isinstance(value, bool):
        raise InvalidConfig(f"{key} must be an integer, got {value!r}")
    if not isinstance(value, expected):
        raise InvalidConfig(f"{key} must be {expected.__name__}, got {type(value).__name__}")


@dataclass
class PipelineConfig:
    """Validated run configuration; every CONFIG_SCHEMA key is an attribute"""
    settings: Dict[str, Any] = field(default_factory=dict)

    def __getattr__(self, name: str):
        settings = self.__dict__.get('settings', {})
        if name in settings:
            return settings[name]
        raise AttributeError(name)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PipelineConfig':
        unknown = set(data) - set(CONFIG_SCHEMA)
        if unknown:
            raise InvalidConfig(f"unknown configuration keys {sorted(unknown)}")
        settings = {key: list(default) if isinstance(default, list) else default
                    for key, (_, default, _) in CONFIG_SCHEMA.items()}
        for key, value in data.items():
            _check_type(key, value)
            settings[key] = value
        return cls(settings=settings)

    def validate(self) -> 'PipelineConfig':
        s = self.settings
        if s['seed'] is None:
            raise InvalidConfig("seed must be set explicitly")
        for key in PATH_KEYS:
            if s[key] is not None and not Path(s[key]).exists():
                raise MissingPath(f"{key} does not exist: {s[key]}", path=s[key])
        if not (s['logs_dir'] or s['matrix_dir'] or s['users']):
            raise InvalidConfig("configure logs_dir, matrix_dir or synthetic users")
        unknown_stages = set(s['stages']) - set(PIPELINE_STAGES) - {'all'}
        if unknown_stages:
            raise InvalidConfig(f"unknown stages {sorted(unknown_stages)}")
        if s['paper_compat']:
            if list(s['window_sizes']) != list(PAPER_WINDOW_SIZES) or s['train_days'] != TRAIN_DAYS:
                logger.warning("paper_compat: forcing window sizes {1,2,5,10,30,60} and a 7-day training split")
            s['window_sizes'] = list(PAPER_WINDOW_SIZES)
            s['train_days'] = TRAIN_DAYS
            s['window_mode'] = 'rows'
        if not s['window_sizes'] or any(not isinstance(t, int) or t < 1 for t in s['window_sizes']):
            raise InvalidConfig(f"window sizes must be positive integers, got {s['window_sizes']}")
        if s['scaling'] not in ('maxabs', 'minmax'):
            raise InvalidConfig(f"unknown scaling {s['scaling']!r}")
        if s['window_mode'] not in ('rows', 'session'):
            raise InvalidConfig(f"unknown window mode {s['window_mode']!r}")
        if s['curve_mode'] not in ('cumulative', 'sliding'):
            raise InvalidConfig(f"unknown curve mode {s['curve_mode']!r}")
        for key, allowed in (('binary_models', BINARY_MODEL_KINDS), ('oneclass_models', ONECLASS_MODEL_KINDS),
                             ('online_models', ONLINE_MODEL_KINDS)):
            bad = set(s[key]) - set(allowed)
            if bad:
                raise InvalidConfig(f"{key}: unknown kinds {sorted(bad)}")
        for key in ('runs', 'jobs', 'train_days', 'surrogates', 'som_width', 'som_height', 'som_epochs'):
            if s[key] < 1:
                raise InvalidConfig(f"{key} must be positive")
        return self

    def stage_list(self) -> List[str]:
        requested = list(self.settings['stages'])
        if 'all' in requested:
            stages = list(PIPELINE_STAGES)
            if not self.settings['users'] or self.settings['logs_dir'] or self.settings['matrix_dir']:
                stages.remove('synth')
            return stages
        return [stage for stage in PIPELINE_STAGES if stage in requested]

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.settings)


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
    """Read a YAML key-value file, apply non-empty overrides and validate"""
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise MissingPath(f"configuration file not found: {path}", path=str(path))
        try:
            with open(path, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise InvalidConfig(f"{path}: {e}")
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise InvalidConfig(f"{path}: expected a mapping of keys to values")
        data.update(loaded)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return PipelineConfig.from_dict(data).validate()


def _periodicity_job(dataset: UserDataset, include_background: bool, params: PeriodicityParams, seed: int):
    series = build_hourly_series(dataset, include_background=include_background)
    return series, periodicity_report(series, params, seed=seed)


class PipelineRunner:
    """Runs configured stages against one output directory"""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out_dir = Path(config.out_dir)
        self.csv_handler = CSVHandler()
        self.logger = logger
        self._datasets: Optional[List[UserDataset]] = None

    # Paths

    @property
    def matrix_dir(self) -> Path:
        return Path(self.config.matrix_dir) if self.config.matrix_dir else self.out_dir / 'matrices'

    @property
    def raw_logs_dir(self) -> Path:
        return Path(self.config.logs_dir) if self.config.logs_dir else self.out_dir / 'raw_logs'

    def stage_seed(self, stage: str) -> int:
        return derive_seed(self.config.seed, PIPELINE_STAGES.index(stage))

    def datasets(self) -> List[UserDataset]:
        if self._datasets is None:
            files = sorted(self.matrix_dir.glob('*.csv'))
            if not files:
                raise MissingPath(f"no activity matrices in {self.matrix_dir}", path=str(self.matrix_dir))
            self._datasets = [self.csv_handler.read_activity_matrix(p) for p in files]
        return self._datasets

    def run(self) -> Dict[str, List[Path]]:
        outputs: Dict[str, List[Path]] = {}
        for stage in self.config.stage_list():
            self.logger.info(f"Stage {stage} (seed {self.stage_seed(stage)})")
            try:
                outputs[stage] = getattr(self, f"stage_{stage}")()
            except ProfilerError as e:
                raise StageError(stage, e)
        return outputs

    # Stages

    def stage_synth(self) -> List[Path]:
        seed = self.stage_seed('synth')
        written = []
        for spec in expand_user_entries(self.config.users, seed):
            dataset = generate_synthetic_user(spec)
            written += write_raw_logs(dataset, self.out_dir / 'raw_logs' / spec.user_id).values()
        return written

    def stage_ingest(self) -> List[Path]:
        if self.config.matrix_dir:
            self.logger.info(f"Using prebuilt activity matrices from {self.config.matrix_dir}")
            return []
        root = self.raw_logs_dir
        if not root.exists():
            raise MissingPath(f"log directory not found: {root}", path=str(root))
        shared_map = load_dns_map(self.config.dns_map) if self.config.dns_map else None
        written = []
        for user_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            local_map = user_dir / DNS_MAP_FILE
            dns_map = shared_map if shared_map is not None else (load_dns_map(local_map) if local_map.exists() else None)
            dataset = ingest_user_dir(user_dir, dns_map=dns_map, threshold=self.config.bad_line_threshold)
            written.append(self.csv_handler.write_activity_matrix(dataset, self.matrix_dir / f"{dataset.user_id}.csv"))
        self._datasets = None
        return written

    def _featurize_user(self, dataset: UserDataset, t: int) -> List[Path]:
        spec = WindowSpec(t)
        folder = self.out_dir / 'features' / f"t{t}"
        try:
            windows = slide_windows(dataset, spec, mode=self.config.window_mode,
                                    gap_minutes=self.config.session_gap_minutes)
        except DatasetTooShort as e:
            self.logger.warning(f"{dataset.user_id}: no features at t={t} ({e.message})")
            return []
        last_train_day = min(self.config.train_days, dataset.n_days)
        train = [w for w in windows if dataset.day_of(w.end_minute_epoch) <= last_train_day] or windows
        vocab_proc = fit_vocabulary(train, 'process')
        vocab_dom = fit_vocabulary(train, 'domain')
        matrix = build_feature_matrix(windows, vocab_proc, vocab_dom)
        return [
            self.csv_handler.write_feature_matrix(matrix, folder / f"{dataset.user_id}.csv"),
            self.csv_handler.write_vocabulary(vocab_proc, folder / f"{dataset.user_id}_vocab_process.json"),
            self.csv_handler.write_vocabulary(vocab_dom, folder / f"{dataset.user_id}_vocab_domain.json"),
        ]

    def stage_featurize(self) -> List[Path]:
        written = []
        for t in self.config.window_sizes:
            for dataset in self.datasets():
                written += self._featurize_user(dataset, t)
        return written

    def stage_train(self) -> List[Path]:
        """One-class models of every user's training days, from the featurize output"""
        t = self.config.model_window
        seed = self.stage_seed('train')
        folder = self.out_dir / 'features' / f"t{t}"
        written = []
        for u, dataset in enumerate(self.datasets()):
            path = folder / f"{dataset.user_id}.csv"
            if not path.exists() and not self._featurize_user(dataset, t):
                continue
            matrix = self.csv_handler.read_feature_matrix(path)
            days = np.array([dataset.day_of(int(m)) for m in matrix.end_minutes])
            rows = np.flatnonzero(days <= self.config.train_days)
            if rows.size < 2:
                self.logger.warning(f"{dataset.user_id}: too few training windows at t={t}; no models")
                continue
            scaler = fit_scaler(matrix.X[rows], self.config.scaling)
            X = scaler.transform(matrix.X[rows])
            model_dir = self.out_dir / 'models'
            write_json(model_dir / f"{dataset.user_id}_t{t}_scaler.json", scaler.to_dict())
            written.append(model_dir / f"{dataset.user_id}_t{t}_scaler.json")
            for kind in self.config.oneclass_models:
                model = train_offline_oneclass(kind, X, seed=derive_seed(seed, u))
                written.append(save_model(model, model_dir / f"{dataset.user_id}_t{t}_{kind}.json"))
        return written

    def _experiment_options(self) -> ExperimentOptions:
        c = self.config
        return ExperimentOptions(window_sizes=list(c.window_sizes), runs=c.runs, scaling=c.scaling,
                                 window_mode=c.window_mode, gap_minutes=c.session_gap_minutes,
                                 train_days=c.train_days, curve_mode=c.curve_mode, curve_window=c.curve_window,
                                 jobs=c.jobs)

    def stage_evaluate(self) -> List[Path]:
        seed = self.stage_seed('evaluate')
        datasets = self.datasets()
        options = self._experiment_options()
        folder = self.out_dir / 'results'
        rows: List[dict] = []
        if self.config.binary_models:
            rows += run_offline_binary(datasets, self.config.binary_models, options, seed)
        if self.config.oneclass_models:
            rows += run_offline_oneclass(datasets, self.config.oneclass_models, options, seed)
        written = []
        if self.config.online_models:
            online_rows, curves = run_online(datasets, self.config.online_models, options, seed)
            rows += online_rows
            largest = max(self.config.window_sizes)
            for (user, kind, t), curve in sorted(curves.items()):
                if t == largest and curve:
                    written.append(plot_prequential(curve, folder / 'online' / f"{user}_{kind}_t{t}.svg",
                                                    title=f"{user} {kind} t={t}"))
        meta = {'schema_version': SCHEMA_VERSION, 'seed': seed}
        written.insert(0, self.csv_handler.write_csv('eval_results', folder / 'eval_results.csv', rows, meta=meta))

        report = feature_importance_report(datasets, derive_seed(seed, 99), t=self.config.importance_window,
                                           scaling=self.config.scaling)
        written.append(self.csv_handler.write_csv('top_features', folder / 'top_features.csv',
                                                  top_feature_rows(report), meta=meta))
        return written

    def stage_som(self) -> List[Path]:
        seed = self.stage_seed('som')
        folder = self.out_dir / 'som'
        written = []
        for dataset in self.datasets():
            series = weekly_som_series(dataset, seed, t=self.config.som_window, width=self.config.som_width,
                                       height=self.config.som_height, epochs=self.config.som_epochs,
                                       scaling=self.config.scaling, out_dir=folder, png=self.config.som_png)
            path = folder / f"{dataset.user_id}_som.json"
            write_json(path, {
                'schema_version': SCHEMA_VERSION,
                'seed': seed,
                'user_id': dataset.user_id,
                'weeks': series.weeks,
                'quantization_errors': [g.quantization_errors for g in series.grids],
                'displacement': series.displacement,
            })
            written.append(path)
            written += [folder / f"{dataset.user_id}_{w}.pgm" for w in series.weeks]
        return written

    def _drift_entry(self, dataset: UserDataset, params: CurveParams, thresholds: DriftThresholds,
                     seed: int, folder: Path, name: str) -> Dict[str, Any]:
        curve = drift_curve(dataset, params, seed=seed)
        label = categorize_drift(curve, thresholds)
        self.csv_handler.write_csv('curve', folder / f"{name}_curve.csv", curve.to_rows(),
                                   meta={'schema_version': SCHEMA_VERSION, 'seed': seed})
        plot_drift_curve(curve, folder / f"{name}_curve.svg", label=label.label)
        return {'label': label.label, 'evidence': label.evidence, 'points': len(curve)}

    def stage_drift(self) -> List[Path]:
        seed = self.stage_seed('drift')
        folder = self.out_dir / 'drift'
        c = self.config
        params = CurveParams(t=c.drift_window, train_days=c.train_days, scaling=c.scaling)
        thresholds = DriftThresholds(no_drift_tol=c.drift_no_drift_tol, min_shift=c.drift_min_shift,
                                     recovery_tol=c.drift_recovery_tol, slope_alpha=c.drift_slope_alpha)
        report: Dict[str, Any] = {'schema_version': SCHEMA_VERSION, 'seed': seed, 'users': {}}
        datasets = self.datasets()
        for u, dataset in enumerate(datasets):
            try:
                report['users'][dataset.user_id] = self._drift_entry(
                    dataset, params, thresholds, derive_seed(seed, u), folder, dataset.user_id)
            except InsufficientSpan as e:
                self.logger.warning(f"{dataset.user_id}: no drift curve ({e.message})")
                report['users'][dataset.user_id] = {'label': None, 'skipped': e.message}

        if c.drift_validation:
            report['validation'] = self._drift_validation(datasets, params, thresholds, seed, folder)
        path = folder / 'drift_report.json'
        write_json(path, report)
        return [path]

    def _drift_validation(self, datasets, params, thresholds, seed, folder) -> Dict[str, Any]:
        """Splice the first two users into each drift kind and check the detected label"""
        if len(datasets) < 2:
            self.logger.warning("drift validation needs two users; skipped")
            return {}
        a, b = sorted(datasets, key=lambda d: d.user_id)[:2]
        results = {}
        for k, kind in enumerate(SYNTH_KINDS):
            try:
                synthetic, truth = synthesize_drift_dataset(kind, a, b, seed=derive_seed(seed, 1000 + k))
            except SourceTooShort as e:
                self.logger.warning(f"drift validation skipped: {e.message}")
                return {}
            entry = self._drift_entry(synthetic, params, thresholds, derive_seed(seed, 2000 + k),
                                      folder / 'validation', f"{kind}")
            entry['injected'] = truth
            entry['match'] = entry['label'] == truth
            results[kind] = entry
            self.logger.info(f"drift validation {kind}: detected {entry['label']}")
        return results

    def stage_periodicity(self) -> List[Path]:
        seed = self.stage_seed('periodicity')
        folder = self.out_dir / 'periodicity'
        c = self.config
        params = PeriodicityParams(surrogates=c.surrogates, hurst_corrected=c.hurst_corrected,
                                   paper_compat=c.paper_compat)
        jobs = [(dataset, include, derive_seed(seed, u, int(include)))
                for u, dataset in enumerate(self.datasets()) for include in (True, False)]
        results = Parallel(n_jobs=c.jobs)(delayed(_periodicity_job)(d, inc, params, s) for d, inc, s in jobs)

        written = []
        for series, report in results:
            name = f"{series.user_id}_{series.condition}"
            meta = {'schema_version': SCHEMA_VERSION, 'seed': report.seed}
            write_json(folder / f"{name}.json", report.to_dict())
            written += [
                folder / f"{name}.json",
                self.csv_handler.write_csv('hourly_series', folder / f"{name}_hourly.csv", series.to_rows(), meta),
                self.csv_handler.write_csv('psd', folder / f"{name}_psd.csv", report.psd.to_rows(), meta),
                plot_psd(report.psd, folder / f"{name}_psd.svg", title=name),
            ]
            if report.autocorr is not None:
                written += [
                    self.csv_handler.write_csv('autocorrelation', folder / f"{name}_acf.csv",
                                               report.autocorr.to_rows(), meta),
                    plot_autocorrelation(report.autocorr, folder / f"{name}_acf.svg", title=name),
                ]
        return written

    def stage_report(self) -> List[Path]:
        results_dir = self.out_dir / 'results'
        meta, rows = self.csv_handler.read_csv(results_dir / 'eval_results.csv')
        top_features = None
        if (results_dir / 'top_features.csv').exists():
            _, feature_rows = self.csv_handler.read_csv(results_dir / 'top_features.csv')
            top_features = {}
            for row in feature_rows:
                top_features.setdefault(row['user'], []).append(
                    FeatureRank(row['feature'], row['category'], float(row['importance'])))
        written = write_report_bundle(rows, self.out_dir / 'report', top_features=top_features,
                                      seed=safe_int(meta.get('seed')))
        drift_path = self.out_dir / 'drift' / 'drift_report.json'
        if drift_path.exists():
            drift = read_json(drift_path)
            labels = {user: entry.get('label') for user, entry in drift.get('users', {}).items()}
            write_json(self.out_dir / 'report' / 'drift_labels.json',
                       {'schema_version': SCHEMA_VERSION, 'labels': labels})
            written['drift_labels'] = self.out_dir / 'report' / 'drift_labels.json'
        return list(written.values())


def run_pipeline(config: PipelineConfig) -> Dict[str, List[Path]]:
    """Run every configured stage; failures surface as StageError with the stage name"""
    runner = PipelineRunner(config)
    runner.out_dir.mkdir(parents=True, exist_ok=True)
    write_json(runner.out_dir / 'run_config.json', {'schema_version': SCHEMA_VERSION, **config.to_dict()})
    return runner.run()
