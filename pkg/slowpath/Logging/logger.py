#!/usr/bin/env python3
# Copyright (c) slowpath contributors
# SPDX-License-Identifier: Apache-2.0

"""
Logging utility functions for slowpath.

Every message is echoed to stdout with a coloured level label and appended,
without colour codes, to a timestamped log file.
"""

import datetime
import os
import sys
import threading

from slowpath.Logging.terminal import label
from slowpath.TUI.box import Box
from slowpath.TUI.text import Text

_state = {
    "log_file": os.environ.get("SLOWPATH_LOG", "slowpath.log"),
    "quiet": False,
}
_lock = threading.Lock()


def set_log_file(path):
    """
    Redirect the log file. ``None`` disables file logging.

    Args:
        path: Path of the log file
    """
    _state["log_file"] = path


def set_quiet(quiet=True):
    """Suppress (or restore) stdout echo; the log file is still written."""
    _state["quiet"] = bool(quiet)


def is_quiet():
    return _state["quiet"]


def write_to_log_file(message):
    """
    Write a message to the log file.

    Args:
        message: The message to write to the log file
    """
    log_file_path = _state["log_file"]
    if not log_file_path:
        return
    try:
        timestamp = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        with _lock, open(log_file_path, "a", encoding="utf-8") as f:
            f.write(f"[{timestamp}] {Text.strip_ansi(message)}\n")
    except OSError as e:
        print(f"Warning: Could not write to log file: {e}", file=sys.stderr)


def _emit(level, message, use_box, box_style="light"):
    write_to_log_file(f"[{level}] {message}")
    if _state["quiet"]:
        return
    try:
        if use_box:
            for line in Box(style=box_style, title=level.title()).draw([message]):
                print(line)
        else:
            print(f"{label(level)} {message}")
    except Exception as e:
        print(f"Warning: Logging error: {e}", file=sys.stderr)
        print(f"[{level}] {message}")


def log(message, use_box=False):
    """
    Log a run message.

    Args:
        message: The message to log
        use_box: Whether to display the message in a box (for important messages)
    """
    _emit("RUN", message, use_box)


def error(message, use_box=False):
    """
    Log an error message.

    Args:
        message: The error message to log
        use_box: Whether to display the message in a box
    """
    _emit("ERROR", message, use_box, box_style="heavy")


def warning(message, use_box=False):
    """Log a warning message."""
    _emit("WARNING", message, use_box)


def info(message, use_box=False):
    """Log an info message."""
    _emit("INFO", message, use_box)


def success(message, use_box=False):
    """Log a success message."""
    _emit("SUCCESS", message, use_box)
