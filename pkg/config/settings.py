import os
from pathlib import Path

# Application settings
APP_NAME = "Computer Usage Profiler"
APP_VERSION = "1.0.0"

# Data paths
BASE_DIR = Path(__file__).parent.parent
OUTPUT_DIR = BASE_DIR / "output"
LOGS_DIR = Path(os.environ.get("PROFILER_LOG_DIR", BASE_DIR / "logs"))

# Extractor log files, one per event kind, inside each user directory
EVENT_LOG_FILES = {
    'process': "process.log",
    'network': "network.log",
    'mouse': "mouse.log",
    'keyboard': "keyboard.log",
}
DNS_MAP_FILE = "dns_map.csv"

# Ingestion
FILETIME_UNIX_EPOCH = 116444736000000000   # 1970-01-01 in 100ns ticks since 1601
FILETIME_TICKS_PER_SECOND = 10_000_000
BAD_LINE_THRESHOLD = 0.01
MINUTES_PER_DAY = 1440
DAYS_PER_WEEK = 7

# Feature extraction
DEFAULT_WINDOW_SIZES = [1, 2, 5, 10, 30, 60]
DEFAULT_SCALING = "maxabs"
WINDOW_MODE = "rows"
SESSION_GAP_MINUTES = 30

# Classifiers
TRAIN_DAYS = 7
SGD_LEARNING_RATE = 1e-3
SGD_L2 = 1e-4
SGD_EPOCHS = 20
PERCEPTRON_LEARNING_RATE = 1.0
FOREST_TREES = 100
ISOLATION_TREES = 100
ISOLATION_SUBSAMPLE = 256
ONECLASS_NU = 0.1
ONECLASS_LEARNING_RATE = 1e-2
ONECLASS_EPOCHS = 20
HST_TREES = 25
HST_DEPTH = 15
HST_WINDOW = 250
HST_SIZE_LIMIT_RATIO = 0.1
LINEAR_THRESHOLD = 0.0
FOREST_THRESHOLD = 0.5
ISOLATION_THRESHOLD = 0.5
HST_THRESHOLD = 0.5
EVAL_RUNS = 10
CURVE_MODE = "cumulative"
CURVE_WINDOW = 500
TOP_FEATURES = 10
IMPORTANCE_WINDOW = 10

# Self-organizing maps
SOM_WIDTH = 20
SOM_HEIGHT = 20
SOM_EPOCHS = 30
SOM_WINDOW = 10

# Drift curves and categorization
DRIFT_WINDOW = 1
DRIFT_TRAIN_DAYS = 7
DRIFT_SLICE_DAYS = 7
DRIFT_STEP_HOURS = 1
# Fractions of the curve's starting level
DRIFT_NO_DRIFT_TOL = 0.04
DRIFT_MIN_SHIFT = 0.05
DRIFT_RECOVERY_TOL = 0.05
DRIFT_SLOPE_ALPHA = 0.01
DRIFT_SUDDEN_WIDTH_RATIO = 1.25
DRIFT_LINEAR_R2 = 0.95
DRIFT_TAIL_FRACTION = 0.15
DRIFT_FLAT_TAIL_RATIO = 0.075
DRIFT_MIN_CURVE_POINTS = 10
DRIFT_MIN_LEVEL = 0.1

# Temporal consistency
SAMPEN_M = 2
SAMPEN_R = 0.2
SURROGATE_COUNT = 100
WILCOXON_ALPHA = 0.001
HURST_MIN_WINDOW = 8
HURST_MIN_LENGTH = 64
HURST_CORRECTED = True
AUTOCORR_K_MAX = 5
AUTOCORR_TOL_LAGS = 1

# Pipeline
DEFAULT_JOBS = 1
SCHEMA_VERSION = 1

# Run-config schema: key -> (type, default, description)
CONFIG_SCHEMA = {
    'seed': (int, None, "Master seed; every stage derives its generator from it (required)"),
    'logs_dir': (str, None, "Directory holding one sub-directory of extractor logs per user"),
    'dns_map': (str, None, "CSV file mapping ip,domain"),
    'matrix_dir': (str, None, "Directory of prebuilt activity matrices (skips ingest)"),
    'out_dir': (str, str(OUTPUT_DIR), "Output directory for the report bundle"),
    'stages': (list, ['all'], "Stages to run"),
    'window_sizes': (list, DEFAULT_WINDOW_SIZES, "Sliding window sizes in rows"),
    'window_mode': (str, WINDOW_MODE, "rows | session"),
    'session_gap_minutes': (int, SESSION_GAP_MINUTES, "Gap that resets session windows"),
    'scaling': (str, DEFAULT_SCALING, "maxabs | minmax"),
    'binary_models': (list, ['sgd_hinge', 'random_forest'], "Offline binary model kinds"),
    'oneclass_models': (list, ['isolation_forest', 'oneclass_linear'], "Offline one-class model kinds"),
    'online_models': (list, ['sgd_hinge', 'perceptron', 'half_space_trees'], "Online model kinds"),
    'runs': (int, EVAL_RUNS, "Seeded runs per experiment cell"),
    'train_days': (int, TRAIN_DAYS, "Study days used for training"),
    'model_window': (int, IMPORTANCE_WINDOW, "Window size of the models persisted by the train stage"),
    'importance_window': (int, IMPORTANCE_WINDOW, "Window size for top-feature analysis"),
    'curve_mode': (str, CURVE_MODE, "cumulative | sliding prequential curve"),
    'curve_window': (int, CURVE_WINDOW, "Sliding prequential curve width"),
    'som_width': (int, SOM_WIDTH, "SOM grid width"),
    'som_height': (int, SOM_HEIGHT, "SOM grid height"),
    'som_epochs': (int, SOM_EPOCHS, "SOM training epochs"),
    'som_window': (int, SOM_WINDOW, "Window size of SOM inputs"),
    'som_png': (bool, False, "Also write PNG U-matrices"),
    'drift_window': (int, DRIFT_WINDOW, "Window size of drift-curve inputs"),
    'drift_no_drift_tol': (float, DRIFT_NO_DRIFT_TOL, "NoDrift max deviation from median (fraction of starting level)"),
    'drift_min_shift': (float, DRIFT_MIN_SHIFT, "Minimum level shift (fraction of starting level)"),
    'drift_recovery_tol': (float, DRIFT_RECOVERY_TOL, "Recurring recovery tolerance (fraction of starting level)"),
    'drift_slope_alpha': (float, DRIFT_SLOPE_ALPHA, "Slope significance level"),
    'drift_validation': (bool, False, "Synthesize and categorize the five drift cases"),
    'surrogates': (int, SURROGATE_COUNT, "Surrogates per series"),
    'hurst_corrected': (bool, HURST_CORRECTED, "Anis-Lloyd-Peters corrected R/S"),
    'jobs': (int, DEFAULT_JOBS, "Worker pool size"),
    'paper_compat': (bool, False, "Force the published window set and protocols"),
    'bad_line_threshold': (float, BAD_LINE_THRESHOLD, "Tolerated share of unparseable lines"),
    'users': (list, [], "Synthetic user specs for the synth stage"),
}
