import json
import logging

from two_body_qsl import settings
from two_body_qsl.logformatters import *


def test_progress_log_formatter() -> None:
    record = logging.LogRecord(
        "two_body_qsl.progress", logging.INFO, __file__, 1, "time point", None, None
    )
    setattr(record, "progress", {"t": 1.5, "fidelity": 0.25})
    payload = json.loads(ProgressLogFormatter().format(record))
    assert payload["event"] == "time point"
    assert payload["t"] == 1.5
    assert payload["fidelity"] == 0.25

    plain = logging.LogRecord("x", logging.INFO, __file__, 1, "plain %s", ("event",), None)
    assert json.loads(ProgressLogFormatter().format(plain))["event"] == "plain event"


def test_configure_logging() -> None:
    configure_logging(True)
    assert logging.getLogger().level == logging.DEBUG
    configure_logging(False)
    assert logging.getLogger().level == logging.INFO

    progress_logger = logging.getLogger(settings.PROGRESS_LOGGER_NAME)
    assert len(progress_logger.handlers) == 1
    assert isinstance(progress_logger.handlers[0].formatter, ProgressLogFormatter)
    assert not progress_logger.propagate
