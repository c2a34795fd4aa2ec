"""Environment-driven settings.

``load_dotenv()`` runs in the CLI entry point; everything here reads
``os.environ`` lazily so tests can monkeypatch variables.
"""

import logging
import os

logger = logging.getLogger(__name__)

_DEFAULT_LOG_LEVEL = "WARNING"
_DEFAULT_WORKERS = 1
_DEFAULT_ARCHIVE_DIR = "./data/counterexamples"
_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def get_log_level() -> int:
    name = os.environ.get("PRONY2D_LOG", _DEFAULT_LOG_LEVEL).strip().upper()
    if name not in _LEVELS:
        return getattr(logging, _DEFAULT_LOG_LEVEL)
    return getattr(logging, name)


def get_workers() -> int:
    raw = os.environ.get("PRONY2D_WORKERS", "")
    if not raw:
        return _DEFAULT_WORKERS
    try:
        value = int(raw)
    except ValueError:
        return _DEFAULT_WORKERS
    return max(1, value)


def get_archive_dir() -> str:
    return os.environ.get("PRONY2D_ARCHIVE_DIR", _DEFAULT_ARCHIVE_DIR)


def validate_config() -> list[str]:
    """Warn about malformed settings; defaults are used in their place."""
    problems = []
    level = os.environ.get("PRONY2D_LOG")
    if level and level.strip().upper() not in _LEVELS:
        problems.append(f"PRONY2D_LOG={level!r} (expected one of {', '.join(_LEVELS)})")
    workers = os.environ.get("PRONY2D_WORKERS")
    if workers:
        try:
            if int(workers) < 1:
                problems.append(f"PRONY2D_WORKERS={workers!r} (must be >= 1)")
        except ValueError:
            problems.append(f"PRONY2D_WORKERS={workers!r} (not an integer)")
    if problems:
        logger.warning("Malformed config: %s; using defaults", ", ".join(problems))
    return problems
