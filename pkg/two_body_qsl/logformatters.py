import json
import logging
import sys
from typing import Any, Dict

from typeguard import typechecked

from two_body_qsl import settings


class ProgressLogFormatter(logging.Formatter):
    # one json object per line, for machine consumption
    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "event": record.getMessage(),
            "logger": record.name,
            "created": record.created,
        }
        payload.update(getattr(record, "progress", {}))
        return json.dumps(payload, sort_keys=True)


@typechecked
def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level, format=settings.LOG_FORMAT, stream=sys.stderr, force=True
    )

    progress_logger = logging.getLogger(settings.PROGRESS_LOGGER_NAME)
    for handler in list(progress_logger.handlers):
        progress_logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ProgressLogFormatter())
    progress_logger.addHandler(handler)
    progress_logger.setLevel(logging.INFO)
    progress_logger.propagate = False
