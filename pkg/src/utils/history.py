"""
Structured run history (epoch ends, range-test steps, SSL passes, ablation
rows). Events are rendered as key=value pairs into the stdlib
``ddsd.history`` logger, which setup_logging wires to a rotating file.
"""

import structlog

HISTORY_LOGGER = "ddsd.history"

_configured = False


def configure_history():
    global _configured
    if _configured:
        return
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
    _configured = True


def get_history_logger(**context) -> structlog.stdlib.BoundLogger:
    configure_history()
    return structlog.get_logger(HISTORY_LOGGER).bind(**context)


