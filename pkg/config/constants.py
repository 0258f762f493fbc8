# Window sizes (minutes) forced by paper_compat runs
PAPER_WINDOW_SIZES = (1, 2, 5, 10, 30, 60)

# Pipeline stages in execution order
PIPELINE_STAGES = (
    'synth',
    'ingest',
    'featurize',
    'train',
    'evaluate',
    'som',
    'drift',
    'periodicity',
    'report',
)

# Exit codes
EXIT_CODES = {
    'success': 0,
    'config': 2,
    'data': 3,
    'numeric': 4,
}

# Numeric feature columns, always placed before the TF-IDF blocks
NUMERIC_FEATURES = ['clicks', 'keystrokes', 'background']

# Feature name prefixes per TF-IDF field
FEATURE_PREFIXES = {
    'process': 'proc:',
    'domain': 'dom:',
}

# CSV Headers
CSV_HEADERS = {
    'activity_matrix': ['minute_epoch', 'processes', 'domains', 'clicks', 'keystrokes', 'background'],
    'feature_triplets': ['row', 'col', 'value'],
    'dns_map': ['ip', 'domain'],
    'curve': ['hour', 'score'],
    'psd': ['frequency', 'power'],
    'autocorrelation': ['lag', 'value'],
    'hourly_series': ['hour', 'value'],
    'eval_results': ['setting', 'user', 'classifier', 'window', 'run', 'seed', 'tp', 'fp', 'tn', 'fn',
                     'precision', 'recall', 'fscore', 'auc'],
    'results_table': ['setting', 'classifier', 'window', 'runs',
                      'precision_mean', 'precision_ci_low', 'precision_ci_high',
                      'recall_mean', 'recall_ci_low', 'recall_ci_high',
                      'fscore_mean', 'fscore_ci_low', 'fscore_ci_high', 'ci_flag'],
    'top_features': ['user', 'rank', 'feature', 'category', 'importance'],
}

# Separator for token lists inside activity-matrix cells
TOKEN_SEPARATOR = ';'

# Model kind tags used for persistence and configuration
BINARY_MODEL_KINDS = ('sgd_hinge', 'perceptron', 'random_forest')
ONECLASS_MODEL_KINDS = ('isolation_forest', 'oneclass_linear')
ONLINE_MODEL_KINDS = ('sgd_hinge', 'perceptron', 'half_space_trees')

# Drift labels
DRIFT_LABELS = ('NoDrift', 'Sudden', 'Gradual', 'Incremental', 'Recurring', 'Unidentifiable')
