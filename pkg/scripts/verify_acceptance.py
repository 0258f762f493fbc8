# Walks the acceptance list on synthetic users and prints PASS/FAIL per check
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from classifiers import feature_importance_report
from services.evaluation_service import ExperimentOptions, run_offline_binary, run_offline_oneclass, run_online
from services.pipeline_service import load_config, run_pipeline
from services.synthetic_user_service import SyntheticUserSpec, default_population, generate_synthetic_user
from som_drift import SYNTH_KINDS, CurveParams, categorize_drift, drift_curve, synthesize_drift_dataset
from timeseries import autocorrelation_check, build_hourly_series, make_surrogates, periodogram_period, surrogate_test
from utils.logger import set_console_level

WINDOWS = [1, 2, 5, 10, 30, 60]
LINEAR = ['sgd_hinge', 'perceptron']

failures = []


def report(ok, message):
    print(f"{'PASS' if ok else 'FAIL'}: {message}")
    if not ok:
        failures.append(message)


def mean_fscore(rows, setting, classifier, window):
    values = [r['fscore'] for r in rows
              if r['setting'] == setting and r['classifier'] == classifier and r['window'] == window]
    return float(np.mean(values)) if values else float('nan')


def check_drift_round_trip():
    print("\nDrift round trip")
    start = time.time()
    a, b = [generate_synthetic_user(s) for s in default_population(2, seed=11, days=56)]
    for kind in SYNTH_KINDS:
        dataset, truth = synthesize_drift_dataset(kind, a, b, seed=1)
        label = categorize_drift(drift_curve(dataset, CurveParams(), seed=0))
        report(label.label == truth, f"{kind} injected, {label.label} detected")
    elapsed = time.time() - start
    report(elapsed < 300, f"drift round trip took {elapsed:.0f}s")


def office_series():
    spec = SyntheticUserSpec(user_id='office', processes={'c:/apps/browser.exe': 0.7, 'c:/apps/editor.exe': 0.5},
                             domains={'mail.example': 0.4, 'wiki.example': 0.3}, days=56, seed=5)
    return build_hourly_series(generate_synthetic_user(spec)).values


def check_periodicity(series):
    print("\nPeriodicity recovery")
    estimate = periodogram_period(series)
    report(estimate.period == 24.0, f"periodogram period {estimate.period} h")
    check = autocorrelation_check(series, estimate.period)
    report(all(check.ok), f"autocorrelation peaks at {check.lags}: {check.ok}")


def check_surrogates(series):
    print("\nSurrogate discrimination")
    result = surrogate_test(series, 'entropy', make_surrogates(series, n=100, seed=0), paper_compat=True)
    report(result.value < result.surrogate_values.min(),
           f"entropy {result.value:.3f} below all surrogates (min {result.surrogate_values.min():.3f})")
    report(result.p_value <= 0.02, f"empirical p = {result.p_value:.3f}")
    report(result.value < result.surrogate_mean, f"series mean below surrogate mean {result.surrogate_mean:.3f}")

    passed = 0
    for seed in range(50):
        control = np.random.default_rng(1000 + seed).permutation(series)
        control_result = surrogate_test(control, 'entropy', make_surrogates(control, n=100, seed=seed))
        passed += control_result.p_value > 0.05
    report(passed >= 45, f"shuffled control p > 0.05 in {passed}/50 seeds")


def check_classifiers(datasets):
    print("\nClassifier ordering")
    options = ExperimentOptions(window_sizes=WINDOWS, runs=1, jobs=-1)
    binary = run_offline_binary(datasets, ['random_forest'] + LINEAR, options, seed=3)
    forest = [mean_fscore(binary, 'offline_binary', 'random_forest', t) for t in WINDOWS]
    print("Random forest F-score by window:", [round(f, 3) for f in forest])
    report(all(later >= earlier - 0.02 for earlier, later in zip(forest, forest[1:])),
           "offline binary F-score non-decreasing in window size")

    online_options = ExperimentOptions(window_sizes=[60], runs=1, jobs=-1)
    online, _ = run_online(datasets, LINEAR, online_options, seed=3)
    for kind in LINEAR:
        offline_f = mean_fscore(binary, 'offline_binary', kind, 60)
        online_f = mean_fscore(online, 'online', kind, 60)
        report(online_f > offline_f, f"{kind} t=60 online {online_f:.3f} > offline {offline_f:.3f}")

    print("\nOne-class sanity")
    oneclass = run_offline_oneclass(datasets, ['isolation_forest', 'oneclass_linear'],
                                    ExperimentOptions(window_sizes=[10], runs=1, jobs=-1), seed=3)
    target = sorted(d.user_id for d in datasets)[0]
    auc = [r['auc'] for r in oneclass if r['user'] == target and r['classifier'] == 'isolation_forest']
    report(bool(auc) and auc[0] is not None and auc[0] > 0.90, f"isolation forest AUC for {target}: {auc}")
    linear_f = mean_fscore(oneclass, 'offline_oneclass', 'oneclass_linear', 10)
    forest_f = mean_fscore(oneclass, 'offline_oneclass', 'isolation_forest', 10)
    report(linear_f > forest_f, f"one-class linear F {linear_f:.3f} > isolation forest F {forest_f:.3f}")


def check_top_features(datasets):
    print("\nTop-feature attribution")
    top = feature_importance_report(datasets, seed=5, t=10)
    for user in sorted(top):
        domains = sum(1 for rank in top[user][:10] if rank.category == 'domain')
        report(domains >= 9, f"{user}: {domains}/10 top features are domains")


def check_determinism():
    print("\nDeterminism")
    settings = {
        'seed': 17, 'users': [{'population': 3, 'days': 21}], 'window_sizes': [5, 10], 'runs': 2,
        'som_width': 6, 'som_height': 5, 'som_epochs': 5, 'surrogates': 20, 'model_window': 5,
        'importance_window': 5, 'som_window': 5, 'drift_window': 5,
    }
    with tempfile.TemporaryDirectory() as tmp:
        roots = [Path(tmp) / 'a', Path(tmp) / 'b']
        for root in roots:
            run_pipeline(load_config(overrides={**settings, 'out_dir': str(root)}))
        for pattern in ('report/*', 'som/*.pgm'):
            files = sorted(p.relative_to(roots[0]) for p in roots[0].glob(pattern))
            same = bool(files) and all((roots[0] / f).read_bytes() == (roots[1] / f).read_bytes() for f in files)
            report(same, f"{pattern}: {len(files)} files byte-identical across runs")


def main():
    set_console_level('WARNING')
    print("Verifying acceptance criteria on synthetic users...")

    check_drift_round_trip()
    series = office_series()
    check_periodicity(series)
    check_surrogates(series)

    datasets = [generate_synthetic_user(s) for s in default_population(10, seed=7, days=21)]
    check_classifiers(datasets)
    check_top_features(datasets)
    check_determinism()

    print("\nThe oracle-equivalence checks run with the test suite: pytest tests")
    print(f"\n{len(failures)} check(s) failed" if failures else "\nAll checks passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
