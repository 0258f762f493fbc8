import os
import sys
import tempfile
from pathlib import Path

# Run from the checkout, like main.py does
sys.path.insert(0, str(Path(__file__).parent))

# Keep test runs out of the real log directory
os.environ.setdefault('PROFILER_LOG_DIR', tempfile.mkdtemp(prefix='profiler-logs-'))
