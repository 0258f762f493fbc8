import numpy as np
import pytest

from classifiers import feature_importance_report
from services.evaluation_service import ExperimentOptions, run_offline_binary, run_offline_oneclass, run_online
from services.synthetic_user_service import default_population, generate_synthetic_user

WINDOWS = [1, 2, 5, 10, 30, 60]
LINEAR = ['sgd_hinge', 'perceptron']

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def ten_users():
    """Ten three-week users sharing processes, each with private domains"""
    return [generate_synthetic_user(spec) for spec in default_population(10, seed=7, days=21)]


@pytest.fixture(scope='module')
def binary_rows(ten_users):
    options = ExperimentOptions(window_sizes=WINDOWS, runs=1, jobs=-1)
    return run_offline_binary(ten_users, ['random_forest'] + LINEAR, options, seed=3)


def mean_fscore(rows, setting, classifier, window):
    values = [r['fscore'] for r in rows
              if r['setting'] == setting and r['classifier'] == classifier and r['window'] == window]
    assert values, (setting, classifier, window)
    return float(np.mean(values))


def test_offline_fscore_grows_with_window(binary_rows):
    forest = [mean_fscore(binary_rows, 'offline_binary', 'random_forest', t) for t in WINDOWS]
    assert all(later >= earlier - 0.02 for earlier, later in zip(forest, forest[1:])), forest


def test_online_linear_models_beat_offline_at_longest_window(ten_users, binary_rows):
    online, curves = run_online(ten_users, LINEAR, ExperimentOptions(window_sizes=[60], runs=1, jobs=-1), seed=3)
    assert curves
    for kind in LINEAR:
        assert mean_fscore(online, 'online', kind, 60) > mean_fscore(binary_rows, 'offline_binary', kind, 60)


def test_oneclass_models_on_outlier_users(ten_users):
    rows = run_offline_oneclass(ten_users, ['isolation_forest', 'oneclass_linear'],
                                ExperimentOptions(window_sizes=[10], runs=1, jobs=-1), seed=3)
    target = sorted(d.user_id for d in ten_users)[0]
    auc = [r['auc'] for r in rows if r['user'] == target and r['classifier'] == 'isolation_forest']
    assert auc and auc[0] is not None and auc[0] > 0.90
    assert mean_fscore(rows, 'offline_oneclass', 'oneclass_linear', 10) > \
        mean_fscore(rows, 'offline_oneclass', 'isolation_forest', 10)


def test_domains_dominate_each_users_top_features(ten_users):
    top = feature_importance_report(ten_users, seed=5, t=10)
    assert sorted(top) == sorted(d.user_id for d in ten_users)
    for user, ranks in top.items():
        assert sum(1 for rank in ranks[:10] if rank.category == 'domain') >= 9, user
