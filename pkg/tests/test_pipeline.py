import json

import pytest
import yaml

import main
from classifiers import FeatureRank
from config.constants import PAPER_WINDOW_SIZES, PIPELINE_STAGES
from services.pipeline_service import PipelineConfig, load_config, run_pipeline
from services.report_service import SINGLE_RUN_FLAG, report_tables, write_report_bundle
from services.synthetic_user_service import SyntheticUserSpec, expand_user_entries, generate_synthetic_user
from utils.errors import InvalidConfig, InvalidSpec, MissingPath
from utils.helpers import read_json

SMALL_USERS = [{'population': 2, 'days': 14}]


def write_config(path, **settings):
    path.write_text(yaml.safe_dump(settings))
    return str(path)


def result_row(setting='offline_binary', classifier='sgd_hinge', window=5, fscore=0.8, user='user00', run=0):
    return {'setting': setting, 'classifier': classifier, 'window': window, 'user': user, 'run': run,
            'precision': fscore, 'recall': fscore, 'fscore': fscore}


def test_unknown_config_key_is_rejected():
    with pytest.raises(InvalidConfig) as info:
        PipelineConfig.from_dict({'seed': 1, 'window_size': 5})
    assert info.value.exit_code == 2
    assert 'window_size' in info.value.message


def test_config_type_checks():
    with pytest.raises(InvalidConfig):
        PipelineConfig.from_dict({'seed': 'one'})
    with pytest.raises(InvalidConfig):
        PipelineConfig.from_dict({'seed': True})
    assert PipelineConfig.from_dict({'seed': 1, 'drift_min_shift': 1}).drift_min_shift == 1


def test_seed_must_be_explicit(tmp_path):
    with pytest.raises(InvalidConfig):
        load_config(overrides={'users': SMALL_USERS})
    config = load_config(write_config(tmp_path / 'run.yaml', users=SMALL_USERS), overrides={'seed': 4})
    assert config.seed == 4


def test_missing_paths(tmp_path):
    with pytest.raises(MissingPath):
        load_config(str(tmp_path / 'absent.yaml'))
    with pytest.raises(MissingPath) as info:
        load_config(overrides={'seed': 1, 'logs_dir': str(tmp_path / 'nowhere')})
    assert info.value.exit_code == 2


def test_config_needs_a_data_source():
    with pytest.raises(InvalidConfig):
        load_config(overrides={'seed': 1})


@pytest.mark.parametrize('settings', [
    {'window_sizes': [0]},
    {'scaling': 'zscore'},
    {'window_mode': 'hourly'},
    {'curve_mode': 'exponential'},
    {'binary_models': ['svm']},
    {'stages': ['train', 'deploy']},
    {'runs': 0},
])
def test_invalid_settings(settings):
    with pytest.raises(InvalidConfig):
        load_config(overrides={'seed': 1, 'users': SMALL_USERS, **settings})


def test_yaml_must_be_a_mapping(tmp_path):
    path = tmp_path / 'run.yaml'
    path.write_text("- seed\n- 1\n")
    with pytest.raises(InvalidConfig):
        load_config(str(path))


def test_compat_mode_forces_protocol():
    config = load_config(overrides={'seed': 1, 'users': SMALL_USERS, 'window_sizes': [5],
                                    'train_days': 3, 'window_mode': 'session', 'paper_compat': True})
    assert config.window_sizes == list(PAPER_WINDOW_SIZES)
    assert config.train_days == 7
    assert config.window_mode == 'rows'


def test_stage_list_skips_synth_for_real_data(tmp_path):
    synthetic = load_config(overrides={'seed': 1, 'users': SMALL_USERS})
    assert synthetic.stage_list() == list(PIPELINE_STAGES)
    prebuilt = load_config(overrides={'seed': 1, 'matrix_dir': str(tmp_path)})
    assert 'synth' not in prebuilt.stage_list()
    single = load_config(overrides={'seed': 1, 'users': SMALL_USERS, 'stages': ['report', 'ingest']})
    assert single.stage_list() == ['ingest', 'report']


def test_synthetic_spec_validation():
    good = dict(user_id='u1', processes={'c:/a.exe': 0.5}, domains={'x.example': 0.2})
    assert SyntheticUserSpec.from_dict(good).days == 56
    with pytest.raises(InvalidSpec):
        SyntheticUserSpec.from_dict({**good, 'colour': 'blue'})
    with pytest.raises(InvalidSpec):
        SyntheticUserSpec.from_dict({**good, 'processes': {}})
    with pytest.raises(InvalidSpec):
        SyntheticUserSpec.from_dict({**good, 'domains': {'x.example': 1.5}})
    with pytest.raises(InvalidSpec):
        SyntheticUserSpec.from_dict({**good, 'active_hours': [25]})
    with pytest.raises(InvalidSpec):
        SyntheticUserSpec.from_dict({**good, 'domains': {'a;b.example': 0.2}})


def test_population_shorthand_expands():
    specs = expand_user_entries([{'population': 3, 'days': 7},
                                 {'user_id': 'extra', 'processes': {'c:/a.exe': 0.9}, 'domains': {}}], seed=2)
    assert [s.user_id for s in specs] == ['user00', 'user01', 'user02', 'extra']
    assert all(s.days == 7 for s in specs[:3])
    assert len({s.seed for s in specs}) == 4
    with pytest.raises(InvalidSpec):
        expand_user_entries([{'population': 2}, {'population': 1}], seed=2)
    with pytest.raises(InvalidSpec):
        expand_user_entries([{'population': 2, 'weeks': 3}], seed=2)


def test_generation_is_deterministic():
    spec = expand_user_entries([{'population': 1, 'days': 3}], seed=9)[0]
    first = generate_synthetic_user(spec)
    assert generate_synthetic_user(spec) == first
    assert first.n_days <= 3
    assert all(9 * 60 <= r.minute_epoch % 1440 < 17 * 60 for r in first.minutes)


def test_report_tables_aggregate_runs():
    rows = [result_row(fscore=f, run=r) for r, f in enumerate((0.7, 0.8, 0.9))]
    rows.append(result_row(classifier='random_forest', fscore=0.95))
    table = report_tables(rows)
    assert [(r['classifier'], r['runs']) for r in table] == [('random_forest', 1), ('sgd_hinge', 3)]
    forest, hinge = table
    assert hinge['fscore_mean'] == pytest.approx(0.8)
    assert hinge['fscore_ci_low'] < 0.8 < hinge['fscore_ci_high']
    assert hinge['ci_flag'] == ''
    assert forest['fscore_ci_low'] is None
    assert forest['ci_flag'] == SINGLE_RUN_FLAG
    with pytest.raises(InvalidSpec):
        report_tables([])


def test_report_bundle_files(tmp_path):
    top = {'user00': [FeatureRank('dom:u00-site1.example', 'domain', 0.3),
                      FeatureRank('clicks', 'numeric', 0.1)]}
    written = write_report_bundle([result_row(), result_row(run=1, fscore=0.6)], tmp_path / 'report',
                                  top_features=top, seed=12)
    assert set(written) == {'results_table', 'top_features', 'summary'}
    summary = read_json(written['summary'])
    assert summary['seed'] == 12
    assert summary['top_feature_categories']['domain'] == pytest.approx(0.5)
    assert len(summary['results']) == 1


def test_cli_reports_config_errors(tmp_path, capsys):
    config = write_config(tmp_path / 'run.yaml', seed=1, users=SMALL_USERS, colour='blue')
    assert main.main(['--config', config, '--log-level', 'ERROR']) == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error['error'] == 'InvalidConfig'


def test_cli_reports_data_errors_with_stage(tmp_path, capsys):
    user_dir = tmp_path / 'logs' / 'u1'
    user_dir.mkdir(parents=True)
    (user_dir / 'process.log').write_text("broken\n")
    config = write_config(tmp_path / 'run.yaml', seed=1, logs_dir=str(tmp_path / 'logs'))
    code = main.main(['ingest', '--config', config, '--out', str(tmp_path / 'out'), '--log-level', 'ERROR'])
    assert code == 3
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error['error'] == 'BatchRejected'
    assert error['stage'] == 'ingest'


def test_cli_overrides_config(tmp_path):
    args = main.build_parser().parse_args(['--stage', 'som', '--window', '10', '--seed', '3', '--jobs', '2'])
    overrides = main.overrides_from_args(args)
    assert overrides['stages'] == ['som']
    assert overrides['window_sizes'] == [10]
    assert overrides['paper_compat'] is None
    config = load_config(write_config(tmp_path / 'run.yaml', seed=1, users=SMALL_USERS, jobs=1), overrides)
    assert (config.seed, config.jobs, config.stage_list()) == (3, 2, ['som'])


def small_run(out_dir, stages):
    return load_config(overrides={
        'seed': 21, 'users': SMALL_USERS, 'out_dir': str(out_dir), 'stages': stages,
        'window_sizes': [5], 'model_window': 5, 'surrogates': 5,
    })


@pytest.mark.slow
def test_pipeline_is_deterministic(tmp_path):
    stages = ['synth', 'ingest', 'featurize', 'train']
    outputs = run_pipeline(small_run(tmp_path / 'a', stages))
    run_pipeline(small_run(tmp_path / 'b', stages))
    assert list(outputs) == stages
    assert (tmp_path / 'a' / 'raw_logs' / 'user00' / 'process.log').exists()
    assert (tmp_path / 'a' / 'matrices' / 'user01.csv').exists()
    assert (tmp_path / 'a' / 'models' / 'user00_t5_isolation_forest.json').exists()

    files_a = sorted(p.relative_to(tmp_path / 'a') for p in (tmp_path / 'a').rglob('*') if p.is_file())
    files_b = sorted(p.relative_to(tmp_path / 'b') for p in (tmp_path / 'b').rglob('*') if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        if rel.name == 'run_config.json':
            continue
        assert (tmp_path / 'a' / rel).read_bytes() == (tmp_path / 'b' / rel).read_bytes(), rel


@pytest.mark.slow
def test_periodicity_stage_outputs(tmp_path):
    run_pipeline(small_run(tmp_path, ['synth', 'ingest', 'periodicity']))
    report = read_json(tmp_path / 'periodicity' / 'user00_with_background.json')
    assert report['period_hours'] == 24.0
    assert (tmp_path / 'periodicity' / 'user00_without_background_psd.csv').exists()
    assert (tmp_path / 'periodicity' / 'user00_with_background_psd.svg').exists()
