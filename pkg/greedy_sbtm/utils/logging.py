"""Structured logging configuration.

Every log record goes to stderr so that standard output carries only the
summary lines of the CLI commands. Warnings raised by numpy and scikit-learn
(for example a KMeans convergence warning during initialisation) are captured
and rendered like any other record.
"""

from __future__ import annotations

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import TYPE_CHECKING, Any

import structlog

from greedy_sbtm.utils.config import Settings, get_settings

if TYPE_CHECKING:
    from structlog.types import Processor

_active_log_file: Path | None = None

# Applied to structlog events and to plain stdlib records (captured warnings) alike.
_PRE_CHAIN: list[Processor] = [
    structlog.contextvars.merge_contextvars,
    structlog.stdlib.add_log_level,
    structlog.stdlib.add_logger_name,
    structlog.processors.TimeStamper(fmt="iso"),
]


def get_active_log_file() -> Path | None:
    """Return the path of the log file opened by the current process, if any."""
    return _active_log_file


def _json_formatter() -> logging.Formatter:
    return structlog.stdlib.ProcessorFormatter(
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            structlog.processors.dict_tracebacks,
            structlog.processors.JSONRenderer(),
        ],
        foreign_pre_chain=_PRE_CHAIN,
    )


def _console_handler(settings: Settings, level: int) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    if settings.log_format == "json":
        handler.setFormatter(_json_formatter())
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())
        handler.setFormatter(structlog.stdlib.ProcessorFormatter(processor=renderer, foreign_pre_chain=_PRE_CHAIN))
    return handler


def _file_handler(settings: Settings, level: int) -> logging.Handler | None:
    """JSON-lines handler in ``log_dir``, or None if the file cannot be opened."""
    global _active_log_file  # noqa: PLW0603

    log_dir = Path(settings.log_dir)
    log_file = log_dir / f"greedy_sbtm_{datetime.now():%Y%m%d_%H%M%S}.log"
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_file, encoding="utf-8")
    except OSError as e:
        print(f"Warning: Could not open log file '{log_file}': {e}. File logging disabled.", file=sys.stderr)
        return None
    handler.setLevel(level)
    handler.setFormatter(_json_formatter())
    _active_log_file = log_file
    return handler


def setup_logging(level: str | None = None) -> None:
    """
    Configure structlog on top of the stdlib root logger.

    Args:
        level: Overrides ``Settings.log_level`` (the CLI's ``--verbose`` passes DEBUG).
    """
    global _active_log_file  # noqa: PLW0603

    settings = get_settings()
    numeric_level = logging.getLevelNamesMapping().get((level or settings.log_level).upper(), logging.INFO)

    root = logging.getLogger()
    for h in root.handlers[:]:
        root.removeHandler(h)
    root.setLevel(numeric_level)
    root.addHandler(_console_handler(settings, numeric_level))

    _active_log_file = None
    if settings.log_to_file:
        file_handler = _file_handler(settings, numeric_level)
        if file_handler is not None:
            root.addHandler(file_handler)

    logging.captureWarnings(True)

    structlog.configure(
        processors=[
            *_PRE_CHAIN,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.UnicodeDecoder(),
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )

    if _active_log_file is not None:
        structlog.get_logger(__name__).info("logging_initialized", log_file=str(_active_log_file))


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """Structured logger with ``logger=name`` bound."""
    return structlog.get_logger(name).bind(logger=name)


def log_context(**kwargs: Any) -> None:
    """
    Bind key-value pairs to every log record of the current context.

    The greedy search binds ``restart=<index>`` inside each worker thread.
    """
    structlog.contextvars.bind_contextvars(**kwargs)


def clear_log_context(*keys: str) -> None:
    """
    Clear contextual information from logs.

    Args:
        *keys: Keys to remove from context. If none provided, clears all.
    """
    if keys:
        structlog.contextvars.unbind_contextvars(*keys)
    else:
        structlog.contextvars.clear_contextvars()
