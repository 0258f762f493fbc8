import logging
from datetime import datetime

from config.settings import LOGS_DIR

ROOT_LOGGER = 'profiler'
CONSOLE_HANDLER = 'console'


def _attach_handlers(root: logging.Logger):
    LOGS_DIR.mkdir(parents=True, exist_ok=True)

    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
    )
    console_formatter = logging.Formatter(
        '%(levelname)s - %(name)s - %(message)s'
    )

    # One file per day, shared by every stage logger
    log_file = LOGS_DIR / f"profiler_{datetime.now().strftime('%Y%m%d')}.log"
    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(file_formatter)

    console_handler = logging.StreamHandler()
    console_handler.set_name(CONSOLE_HANDLER)
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(console_formatter)

    root.addHandler(file_handler)
    root.addHandler(console_handler)
    root.setLevel(logging.DEBUG)


def setup_logger(name: str = None, level=logging.INFO) -> logging.Logger:
    """
    Logger for one component, e.g. setup_logger('pipeline') -> 'profiler.pipeline'.

    Handlers live on the 'profiler' root only, so component loggers never
    duplicate output however often they are requested.
    """
    root = logging.getLogger(ROOT_LOGGER)
    if not root.handlers:
        _attach_handlers(root)
    if not name or name == ROOT_LOGGER:
        return root
    logger = root.getChild(name)
    logger.setLevel(level)
    return logger


def set_console_level(level: str):
    """Console verbosity for every component; the log file keeps DEBUG"""
    numeric = getattr(logging, str(level).upper(), logging.INFO)
    for handler in setup_logger().handlers:
        if handler.get_name() == CONSOLE_HANDLER:
            handler.setLevel(numeric)
