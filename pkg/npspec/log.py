"""Process-wide logging setup shared by the CLI and the HTTP app."""

import logging
import sys
from typing import TextIO

from npspec.settings import get_settings

JSON_FORMAT = '{"time":"%(asctime)s","level":"%(levelname)s","logger":"%(name)s","message":"%(message)s"}'
TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(stream: TextIO = sys.stdout, level: str | None = None) -> None:
    """Configure structured logging once per process."""
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper()),
        format=JSON_FORMAT if settings.log_format == "json" else TEXT_FORMAT,
        stream=stream,
        force=True,
    )
