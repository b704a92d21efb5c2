#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Run summary document (summary.kv): ``key = value`` lines.

Sections are key prefixes: ``run.`` for the command and timing, ``config.`` for the
configuration echo, and one prefix per result family (``solutions.``, ``t_star.``,
``degree.`` ...).
"""

from datetime import datetime
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np

from typing import Any
from typing import Dict
from typing import Optional


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return ", ".join(_format(v) for v in value)
    return str(value).replace("\n", " ")


class RunReport:
    """
    Ordered key-value results of a command.

    Parameters
    ----------
    command : str
        Subcommand name.
    config_echo : dict
        Configuration entries, written under ``config.``.
    """

    def __init__(self, command: str, config_echo: Optional[Dict[str, str]] = None) -> None:
        self.command = command
        self.started = datetime.now(ZoneInfo("UTC"))
        self.config_echo = dict(config_echo or {})
        self.entries: Dict[str, Any] = {}

    def add(self, key: str, value: Any) -> None:
        self.entries[key] = value

    def update(self, prefix: str, values: Dict[str, Any]) -> None:
        for key, value in values.items():
            self.entries[f"{prefix}.{key}"] = value

    def get(self, key: str, default: Any = None) -> Any:
        return self.entries.get(key, default)

    def lines(self) -> list:
        finished = datetime.now(ZoneInfo("UTC"))
        lines = [
            f"run.command = {self.command}",
            f"run.started_utc = {self.started.isoformat(timespec='seconds')}",
            f"run.elapsed_s = {(finished - self.started).total_seconds():.3f}",
        ]
        lines += [f"config.{key} = {_format(value)}" for key, value in sorted(self.config_echo.items())]
        lines += [f"{key} = {_format(value)}" for key, value in self.entries.items()]
        return lines

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.lines()) + "\n", encoding="utf-8")
        return path


def read_summary(path: Path) -> Dict[str, str]:
    """
    Parse a summary.kv back into a dictionary of strings.
    """
    result = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            result[key] = value
    return result
