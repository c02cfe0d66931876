"""
Structured logging.

Every record is rendered as a single JSON object; keyword fields passed to the
logging methods end up as top-level keys next to the standard ones.
"""
import json
import logging
import sys
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np


class LogLevel(str, Enum):
    """Log level enumeration."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


class LogFormatter(logging.Formatter):
    """Custom formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as structured JSON."""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if hasattr(record, "extra_data"):
            log_entry.update({k: _jsonable(v) for k, v in record.extra_data.items()})

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry, ensure_ascii=False, default=str)


TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class LoggerService:
    """Named logger that attaches keyword fields as structured data."""

    def __init__(self, name: str = "flagc", config: Optional[Dict[str, Any]] = None):
        self.name = name
        self.config = config or {}
        self._logger = self._setup_logger()

    @property
    def logger(self) -> logging.Logger:
        return self._logger

    def _formatter(self) -> logging.Formatter:
        if self.config.get("json", True):
            return LogFormatter()
        return logging.Formatter(TEXT_FORMAT)

    def _setup_logger(self) -> logging.Logger:
        logger = logging.getLogger(self.name)
        logger.setLevel(self.config.get("level", logging.WARNING))

        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()

        # stdout carries command reports
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(self._formatter())
        logger.addHandler(console_handler)

        if log_file := self.config.get("file_path"):
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(self._formatter())
            logger.addHandler(file_handler)

        logger.propagate = False
        return logger

    def reconfigure(self, config: Dict[str, Any]) -> None:
        self.config = config
        self._logger = self._setup_logger()

    def is_enabled(self, level: int) -> bool:
        return self._logger.isEnabledFor(level)

    def _log_with_extra(self, level: int, message: str, **kwargs: Any) -> None:
        """Log message with extra data."""
        if not self._logger.isEnabledFor(level):
            return
        extra_data = {k: v for k, v in kwargs.items() if v is not None}
        self._logger.log(level, message, extra={"extra_data": extra_data})

    def debug(self, message: str, **kwargs: Any) -> None:
        self._log_with_extra(logging.DEBUG, message, **kwargs)

    def info(self, message: str, **kwargs: Any) -> None:
        self._log_with_extra(logging.INFO, message, **kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        self._log_with_extra(logging.WARNING, message, **kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        self._log_with_extra(logging.ERROR, message, **kwargs)

    def critical(self, message: str, **kwargs: Any) -> None:
        self._log_with_extra(logging.CRITICAL, message, **kwargs)

    def log_exception(self, message: str, exception: Exception, **kwargs: Any) -> None:
        """Log exception with traceback."""
        self._logger.exception(
            message,
            extra={"extra_data": {**kwargs, "exception_type": type(exception).__name__}},
        )


class LoggerFactory:
    """Factory for creating logger instances."""

    _instances: Dict[str, LoggerService] = {}
    _config: Optional[Dict[str, Any]] = None

    @classmethod
    def default_config(cls) -> Dict[str, Any]:
        if cls._config is None:
            from src.core.config import settings

            cls._config = {
                "level": getattr(logging, settings.log_level.value),
                "file_path": settings.log_file_path,
                "json": settings.log_json,
            }
        return cls._config

    @classmethod
    def create_logger(cls, name: str, config: Optional[Dict[str, Any]] = None) -> LoggerService:
        """Create or get existing logger instance."""
        if name not in cls._instances:
            cls._instances[name] = LoggerService(name, config or cls.default_config())
        return cls._instances[name]

    @classmethod
    def configure(cls, level: LogLevel, file_path: Optional[str] = None,
                  json_format: bool = True) -> None:
        """Apply a new configuration to every logger created so far and later."""
        cls._config = {
            "level": getattr(logging, LogLevel(level).value),
            "file_path": file_path,
            "json": json_format,
        }
        for service in cls._instances.values():
            service.reconfigure(cls._config)


def get_logger(name: str) -> LoggerService:
    return LoggerFactory.create_logger(name)
