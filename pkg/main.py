#!/usr/bin/env python3
import argparse
import json
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config.constants import EXIT_CODES, PIPELINE_STAGES
from config.settings import APP_NAME, APP_VERSION
from services.pipeline_service import load_config, run_pipeline
from utils.errors import ProfilerError
from utils.logger import setup_logger, set_console_level


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='profiler',
        description=f"{APP_NAME} v{APP_VERSION}: behavioral profiles from computer usage logs",
    )
    parser.add_argument('stage', nargs='?', choices=list(PIPELINE_STAGES) + ['all'],
                        help="Stage to run (defaults to the config's stages)")
    parser.add_argument('--config', help="YAML run configuration")
    parser.add_argument('--stage', dest='stage_flag', choices=list(PIPELINE_STAGES) + ['all'],
                        help="Same as the positional stage")
    parser.add_argument('--window', type=int, help="Run a single window size")
    parser.add_argument('--seed', type=int, help="Master seed")
    parser.add_argument('--paper-compat', action='store_true', default=None,
                        help="Force the published window set and 7-day split")
    parser.add_argument('--out', help="Output directory")
    parser.add_argument('--jobs', type=int, help="Worker pool size")
    parser.add_argument('--log-level', default='INFO', help="Console log level")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    stage = args.stage_flag or args.stage
    return {
        'stages': [stage] if stage else None,
        'window_sizes': [args.window] if args.window is not None else None,
        'seed': args.seed,
        'paper_compat': args.paper_compat,
        'out_dir': args.out,
        'jobs': args.jobs,
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logger = setup_logger()
    set_console_level(args.log_level)
    logger.info(f"Starting {APP_NAME} v{APP_VERSION}")

    try:
        config = load_config(args.config, overrides_from_args(args))
        outputs = run_pipeline(config)
    except ProfilerError as e:
        logger.error(f"{e.code}: {e}")
        sys.stderr.write(json.dumps(e.to_dict(), sort_keys=True) + '\n')
        return e.exit_code

    for stage, files in outputs.items():
        logger.info(f"{stage}: {len(files)} files")
    return EXIT_CODES['success']


if __name__ == "__main__":
    sys.exit(main())
