import copy

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st
from sklearn.ensemble import RandomForestClassifier

from classifiers import (
    IsolationForestModel, LinearModel, WindowingOptions, assemble_binary_task, assemble_oneclass_task,
    average_path_length, build_half_space_trees, compute_metrics, confusion_counts, evaluate_offline,
    evaluate_prequential, feature_importance_report, fit_half_space_trees, fit_isolation_forest, fit_linear,
    fit_oneclass_linear, fit_random_forest, load_model, mean_ci, model_kind, partition_negative_users, predict,
    roc_auc, save_model, score_matrix, split_seven_days, top_feature_categories, train_offline_binary,
    train_online_warm_start, update_online,
)
from features import WindowSpec
from utils.errors import (
    InsufficientDays, InsufficientSamples, InvalidSpec, MissingLabel, SingleClassTraining, TooFewNegativeUsers,
    UndefinedMetric, UnknownModelKind,
)


def two_clusters(n=60, dim=4, seed=0, gap=3.0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0.0, 0.3, size=(n, dim)), rng.normal(gap, 0.3, size=(n, dim))])
    y = np.array([-1] * n + [1] * n)
    return X, y


counts = st.integers(0, 1000)


@given(tp=counts, fp=counts, tn=counts, fn=counts)
def test_metric_identities(tp, fp, tn, fn):
    precision, recall, fscore = compute_metrics(tp, fp, tn, fn)
    assert 0.0 <= precision <= 1.0 and 0.0 <= recall <= 1.0
    if precision + recall > 0:
        assert fscore == pytest.approx(2 * precision * recall / (precision + recall))
    else:
        assert fscore == 0.0


def test_metrics_with_empty_denominators():
    assert compute_metrics(0, 0, 5, 0) == (0.0, 0.0, 0.0)
    assert compute_metrics(3, 0, 0, 0) == (1.0, 1.0, 1.0)
    assert compute_metrics(1, 1, 0, 1) == pytest.approx((0.5, 0.5, 0.5))
    with pytest.raises(InvalidSpec):
        compute_metrics(-1, 0, 0, 0)


def test_confusion_counts():
    assert confusion_counts([1, 1, -1, -1, 1], [1, -1, 1, -1, 1]) == (2, 1, 1, 1)


def test_linear_models_separate_clusters():
    X, y = two_clusters()
    for loss in ('hinge', 'perceptron'):
        model = fit_linear(X, y, loss=loss, seed=3)
        assert model_kind(model) == ('sgd_hinge' if loss == 'hinge' else 'perceptron')
        np.testing.assert_array_equal(predict(model, X), y)


def test_linear_training_is_seeded():
    X, y = two_clusters()
    a = fit_linear(X, y, seed=1)
    b = fit_linear(X, y, seed=1)
    np.testing.assert_array_equal(a.weights, b.weights)
    assert a.bias == b.bias


def test_linear_training_needs_both_classes():
    X, _ = two_clusters()
    with pytest.raises(SingleClassTraining):
        fit_linear(X, np.ones(X.shape[0]))


def test_hinge_step():
    model = LinearModel(weights=np.zeros(2), loss='hinge', lr=0.5, l2=0.0)
    model.partial_fit_one(np.array([1.0, 2.0]), 1)
    np.testing.assert_allclose(model.weights, [0.5, 1.0])
    assert model.bias == 0.5
    # Margin 0.5 + 2.0 + 0.5 >= 1, only decay applies
    model.l2 = 0.1
    model.partial_fit_one(np.array([1.0, 2.0]), 1)
    np.testing.assert_allclose(model.weights, [0.475, 0.95])
    assert model.bias == 0.5


def test_perceptron_step_only_on_mistakes():
    model = LinearModel(weights=np.zeros(2), loss='perceptron', lr=1.0, l2=0.0)
    model.partial_fit_one(np.array([1.0, -1.0]), -1)
    np.testing.assert_allclose(model.weights, [-1.0, 1.0])
    assert model.bias == -1.0
    model.partial_fit_one(np.array([1.0, -1.0]), -1)
    np.testing.assert_allclose(model.weights, [-1.0, 1.0])


def test_online_update_rules():
    model = LinearModel(weights=np.zeros(3))
    with pytest.raises(MissingLabel):
        update_online(model, np.ones(3))
    X, _ = two_clusters(dim=3)
    with pytest.raises(UnknownModelKind):
        update_online(fit_isolation_forest(X, n_trees=5), X[:1])


def test_forest_fits_xor_where_a_line_cannot():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([-1, 1, 1, -1])
    forest = fit_random_forest(X, y, seed=0)
    linear = fit_linear(X, y, seed=0)
    assert np.mean(predict(forest, X) == y) == 1.0
    assert np.mean(predict(linear, X) == y) < 1.0


def test_conflicting_duplicates_train_without_error():
    X, y = two_clusters(n=30)
    conflict = np.tile([[1.5, 1.5, 1.5, 1.5]], (10, 1))
    X = np.vstack([X, conflict])
    y = np.concatenate([y, [1, -1] * 5])
    for model in (fit_random_forest(X, y, seed=1, n_trees=20), fit_linear(X, y, seed=1)):
        predicted = predict(model, conflict)
        assert np.unique(predicted).size == 1
        assert np.mean(predicted == y[-10:]) <= 0.5


def test_perceptron_mistakes_stay_within_margin_bound():
    rng = np.random.default_rng(6)
    X = rng.uniform(-1.0, 1.0, size=(400, 2))
    X = X[np.abs(X[:, 0]) >= 0.5]
    y = np.where(X[:, 0] > 0, 1, -1)
    # The bias acts as a constant third input; the unit separator (1, 0, 0) has margin 0.5
    radius = float(np.sqrt((X ** 2).sum(axis=1) + 1.0).max())
    bound = (radius / 0.5) ** 2

    model = LinearModel(weights=np.zeros(2), loss='perceptron', lr=1.0, l2=0.0)
    mistakes = 0
    for _ in range(100):
        epoch_mistakes = 0
        for x, label in zip(X, y):
            if label * (float(model.weights @ x) + model.bias) <= 0:
                epoch_mistakes += 1
            model.partial_fit_one(x, int(label))
        mistakes += epoch_mistakes
        if epoch_mistakes == 0:
            break
    assert epoch_mistakes == 0
    assert mistakes <= bound


def test_forest_matches_sklearn_probabilities():
    X, y = two_clusters(n=40, gap=1.0, seed=4)
    model = fit_random_forest(X, y, seed=9, n_trees=15)
    reference = RandomForestClassifier(n_estimators=15, criterion='gini', max_features='sqrt', bootstrap=True,
                                       min_samples_leaf=1, random_state=9, n_jobs=1).fit(X, y)
    probe = np.random.default_rng(1).normal(0.5, 1.0, size=(50, X.shape[1]))
    np.testing.assert_allclose(score_matrix(model, probe), reference.predict_proba(probe)[:, 1], atol=1e-12)
    assert model.feature_importances.sum() == pytest.approx(1.0)
    assert all(tree.n_nodes >= 1 for tree in model.trees)


def test_forest_accepts_sparse_input():
    X, y = two_clusters()
    model = fit_random_forest(sp.csr_matrix(X), y, seed=2, n_trees=10)
    np.testing.assert_array_equal(predict(model, sp.csr_matrix(X)), y)


def test_average_path_length():
    np.testing.assert_allclose(average_path_length([1, 2]), [0.0, 1.0])
    expected = 2 * (np.log(255) + np.euler_gamma) - 2 * 255 / 256
    assert float(average_path_length(256)) == pytest.approx(expected, rel=1e-3)


def test_isolation_forest_scores_outliers_higher():
    rng = np.random.default_rng(0)
    X = rng.normal(0.0, 0.1, size=(300, 3))
    model = fit_isolation_forest(X, seed=1, n_trees=50)
    inlier, outlier = score_matrix(model, np.array([[0.0, 0.0, 0.0], [5.0, 5.0, 5.0]]))
    assert outlier > inlier
    assert outlier > 0.5
    # Anomaly scores predict -1 above the threshold
    assert predict(model, np.array([[5.0, 5.0, 5.0]]))[0] == -1
    assert model.height_limit == 8


def test_isolation_forest_clamps_subsample():
    X = np.random.default_rng(0).normal(size=(40, 2))
    model = fit_isolation_forest(X, n_trees=3, subsample=256)
    assert model.subsample == 40
    with pytest.raises(InsufficientSamples):
        fit_isolation_forest(X[:1])


def test_isolation_score_of_pairs_is_one_half():
    model = fit_isolation_forest(np.array([[0.0, 0.0], [1.0, 1.0]]), seed=0, n_trees=20, subsample=2)
    assert model.c_psi == pytest.approx(1.0)
    scores = score_matrix(model, np.array([[0.0, 0.0], [0.3, 0.9], [7.0, -2.0]]))
    np.testing.assert_allclose(scores, 0.5)


def test_isolation_scores_are_open_unit_interval_and_ensemble_averaged():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(200, 4))
    model = fit_isolation_forest(X, seed=2, n_trees=25, subsample=64)
    probe = np.vstack([X[:20], rng.normal(0.0, 6.0, size=(20, 4))])
    scores = score_matrix(model, probe)
    assert np.all((scores > 0.0) & (scores < 1.0))
    doubled = IsolationForestModel(trees=model.trees * 2, n_features=model.n_features, n_trees=2 * model.n_trees,
                                   subsample=model.subsample, rng_seed=model.rng_seed)
    np.testing.assert_allclose(score_matrix(doubled, probe), scores, rtol=1e-12)


def test_oneclass_linear_is_seeded():
    X = np.abs(np.random.default_rng(0).normal(size=(50, 3)))
    a = fit_oneclass_linear(X, seed=4, epochs=5)
    b = fit_oneclass_linear(X, seed=4, epochs=5)
    np.testing.assert_array_equal(a.weights, b.weights)
    assert model_kind(a) == 'oneclass_linear'


def test_half_space_tree_masses_roll_per_window():
    model = build_half_space_trees(2, seed=0, n_trees=3, depth=4, window_size=5)
    rows = np.random.default_rng(0).uniform(size=(7, 2))
    for x in rows[:4]:
        model.learn_one(x)
    np.testing.assert_array_equal(model.latest_mass[:, 0], [4, 4, 4])
    assert model.windows_completed == 0
    model.learn_one(rows[4])
    np.testing.assert_array_equal(model.reference_mass[:, 0], [5, 5, 5])
    assert model.latest_mass.sum() == 0
    model.learn_one(rows[5])
    # Every level of a path counts once
    assert model.latest_mass.sum() == 3 * (4 + 1)


def test_half_space_trees_flag_unseen_regions():
    X = np.random.default_rng(3).uniform(0.0, 0.2, size=(200, 2))
    model = fit_half_space_trees(X, seed=5, n_trees=25, depth=8, window_size=100)
    dense, empty = model.anomaly_score(np.array([[0.1, 0.1], [0.9, 0.9]]))
    assert empty > dense
    assert 0.0 <= dense <= 1.0
    assert model.threshold is not None


def test_half_space_split_values_halve_parent_range():
    model = build_half_space_trees(1, seed=2, n_trees=1, depth=3, window_size=10)
    root = model.split_value[0, 0]
    left, right = model.split_value[0, 1], model.split_value[0, 2]
    # Single dimension: children split the two halves around the root
    assert left < root < right
    assert root - left == pytest.approx(right - root)


def test_prequential_tests_before_training():
    X, y = two_clusters(n=20)
    order = np.random.default_rng(0).permutation(y.size)
    X, y = X[order], y[order]
    warm = LinearModel(weights=np.zeros(X.shape[1]), loss='perceptron', lr=1.0, l2=0.0)
    report = evaluate_prequential(X, y, warm)

    manual = copy.deepcopy(warm)
    predicted = []
    for i in range(y.size):
        predicted.append(1 if manual.decision_function(X[i:i + 1])[0] >= 0.0 else -1)
        manual.partial_fit_one(X[i], int(y[i]))
    assert (report.tp, report.fp, report.tn, report.fn) == confusion_counts(y, predicted)
    assert np.all(warm.weights == 0.0)
    assert len(report.per_step_curve) == y.size
    assert report.per_step_curve[-1] == pytest.approx(report.fscore)


def test_sliding_curve_uses_recent_items():
    X, y = two_clusters(n=10)
    warm = fit_linear(X, y, seed=0)
    report = evaluate_prequential(X, y, warm, curve_mode='sliding', curve_window=3)
    assert len(report.per_step_curve) == y.size
    with pytest.raises(InvalidSpec):
        evaluate_prequential(X, y, warm, curve_mode='exponential')


def test_half_space_warm_start_sees_positive_rows_only():
    X, y = two_clusters(n=30)
    X = X / X.max()
    model = train_online_warm_start('half_space_trees', X, y, params={'window_size': 10, 'depth': 5})
    assert model.windows_completed == 3
    report = evaluate_prequential(X, y, model)
    assert report.tp + report.fp + report.tn + report.fn == y.size


def test_offline_evaluation_counts_every_row():
    X, y = two_clusters()
    model = train_offline_binary('random_forest', X, y, seed=0, params={'n_trees': 10})
    report = evaluate_offline(model, X, y)
    assert report.fscore == 1.0
    with pytest.raises(UnknownModelKind):
        train_offline_binary('svm', X, y)


def test_roc_auc_polarity():
    labels = [1, 1, -1, -1]
    assert roc_auc([0.9, 0.8, 0.1, 0.2], labels) == 1.0
    assert roc_auc([0.9, 0.8, 0.1, 0.2], labels, higher_is_positive=False) == 0.0
    with pytest.raises(UndefinedMetric):
        roc_auc([0.1, 0.2], [1, 1])


def test_mean_ci():
    mean, ci = mean_ci([1.0, 2.0, 3.0])
    assert mean == 2.0
    half = 1.96 / np.sqrt(3)
    assert ci == pytest.approx((2.0 - half, 2.0 + half))
    assert mean_ci([0.4]) == (0.4, None)


@pytest.mark.parametrize('kind', ['sgd_hinge', 'perceptron', 'random_forest', 'isolation_forest',
                                  'oneclass_linear', 'half_space_trees'])
def test_saved_models_score_identically(tmp_path, kind):
    X, y = two_clusters(n=30)
    if kind in ('sgd_hinge', 'perceptron', 'random_forest'):
        model = train_offline_binary(kind, X, y, seed=1, params={'n_trees': 5} if kind == 'random_forest' else None)
    elif kind == 'isolation_forest':
        model = fit_isolation_forest(X, seed=1, n_trees=5)
    elif kind == 'oneclass_linear':
        model = fit_oneclass_linear(X, seed=1, epochs=3)
    else:
        model = fit_half_space_trees(X / X.max(), seed=1, n_trees=4, depth=4, window_size=10)
        X = X / X.max()
    loaded = load_model(save_model(model, tmp_path / f'{kind}.json'))
    assert model_kind(loaded) == kind
    np.testing.assert_array_equal(score_matrix(loaded, X), score_matrix(model, X))


def test_negative_users_are_disjoint_halves():
    train, test = partition_negative_users(['d', 'a', 'c', 'b', 'e'], seed=3)
    assert not set(train) & set(test)
    assert sorted(train + test) == ['a', 'b', 'c', 'd', 'e']
    assert len(train) == 2
    assert (train, test) == partition_negative_users(['a', 'b', 'c', 'd', 'e'], seed=3)
    with pytest.raises(TooFewNegativeUsers):
        partition_negative_users(['a'], seed=0)


def test_negative_user_halves_are_disjoint_for_every_seed():
    users = [f"user{i:02d}" for i in range(9)]
    for seed in range(100):
        train, test = partition_negative_users(users, seed=seed)
        assert not set(train) & set(test)
        assert sorted(train + test) == users


def test_first_week_split(population):
    train, test = split_seven_days(population[0])
    assert train.n_days <= 7
    assert min(train.day_of(r.minute_epoch) for r in test.minutes) == 8
    with pytest.raises(InsufficientDays):
        split_seven_days(population[0].select_days(1, 7))


def test_binary_task_layout(population):
    target, others = population[0], population[1:]
    task = assemble_binary_task(target, others, seed=1, options=WindowingOptions(spec=WindowSpec(5)))
    assert set(task.y_train) == {-1, 1} and set(task.y_test) == {-1, 1}
    assert not set(task.train_negative_users) & set(task.test_negative_users)
    assert set(task.test.labels) == {target.user_id, *task.test_negative_users}
    first_test_day = min(target.day_of(m) for m, label in zip(task.test.end_minutes, task.test.labels)
                         if label == target.user_id)
    assert first_test_day == 8
    assert task.X_train.shape[1] == task.X_test.shape[1] == task.train.dim
    assert task.train.end_minutes.min() >= target.start_minute


def test_oneclass_task_trains_on_target_only(population):
    target, others = population[1], population
    task = assemble_oneclass_task(target, others, WindowingOptions(spec=WindowSpec(5)))
    assert set(task.y_train) == {1}
    assert -1 in task.y_test
    assert target.user_id not in task.test_negative_users


@pytest.mark.slow
def test_top_features_favor_user_domains(population):
    report = feature_importance_report(population, seed=0, t=10)
    assert sorted(report) == sorted(d.user_id for d in population)
    for ranks in report.values():
        assert 0 < len(ranks) <= 10
        importances = [r.importance for r in ranks]
        assert importances == sorted(importances, reverse=True)
    shares = top_feature_categories(report)
    assert sum(shares.values()) == pytest.approx(1.0)
    assert shares['domain'] > shares['process']
