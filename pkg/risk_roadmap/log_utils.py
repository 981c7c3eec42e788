"""Clean, emoji-prefixed logging shared by every component.

Components never grab a logger themselves; they receive a ``clean_log``
callable with the signature ``clean_log(message, emoji="", show_always=True)``.
Three modes are supported, selected from ``config.json``:

- debug (``debug: true``): everything, with the emoji and a level prefix.
- clean (``clean_logs: true``, the default): emoji messages, quiet ones hidden.
- simple (``clean_logs: false``): ``[Info] message`` without emoji.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Mapping, Optional

LOGGER_NAME = "risk_roadmap"

LogFn = Callable[..., None]


def null_log(*_args: Any, **_kwargs: Any) -> None:
    """Drop every message (used when a caller passes ``clean_log=None``)."""
    return None


def make_clean_log(
    *,
    debug: bool = False,
    clean_logs: bool = True,
    logger: Optional[logging.Logger] = None,
) -> LogFn:
    log = logger or logging.getLogger(LOGGER_NAME)

    def clean_log(message: str, emoji: str = "", show_always: bool = True) -> None:
        if debug:
            prefix = f"{emoji} " if emoji else ""
            log.debug("%s%s", prefix, message)
            return
        if not show_always:
            return
        if clean_logs:
            prefix = f"{emoji} " if emoji else ""
            log.info("%s%s", prefix, message)
        else:
            log.info("[Info] %s", message)

    return clean_log


def clean_log_from_config(config: Mapping[str, Any]) -> LogFn:
    return make_clean_log(
        debug=bool(config.get("debug", False)),
        clean_logs=bool(config.get("clean_logs", True)),
    )


def configure_logging(config: Mapping[str, Any]) -> None:
    """Attach a plain stream handler once; CLI entry points call this."""
    level = logging.DEBUG if config.get("debug") else logging.INFO
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.propagate = False


__all__ = ["LOGGER_NAME", "LogFn", "null_log", "make_clean_log", "clean_log_from_config", "configure_logging"]
