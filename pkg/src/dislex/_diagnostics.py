"""Structured warnings: one JSON object per line on the diagnostic stream."""

import json
import logging
import sys

logger = logging.getLogger("dislex")


def emit(event, **fields):
    """Log a warning event as a single JSON line."""
    record = {"event": event, **fields}
    logger.warning(json.dumps(record, ensure_ascii=False, sort_keys=True, default=str))


def configure(stream=None, level=logging.WARNING):
    """Route package diagnostics to ``stream`` (stderr by default) as bare lines."""
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False
    return handler
