import io
import logging

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("dislex", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("dislex")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def diag():
    """Capture the package's JSON-line diagnostics."""
    import json

    stream = io.StringIO()
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger = logging.getLogger("dislex")
    old_level, old_prop = logger.level, logger.propagate
    logger.addHandler(handler)
    logger.setLevel(logging.WARNING)

    def events():
        return [json.loads(line) for line in stream.getvalue().splitlines() if line.startswith("{")]

    yield events
    logger.removeHandler(handler)
    logger.setLevel(old_level)
    logger.propagate = old_prop


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_dislex_acceptance", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
