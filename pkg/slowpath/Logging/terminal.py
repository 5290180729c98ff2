#!/usr/bin/env python3
# Copyright (c) slowpath contributors
# SPDX-License-Identifier: Apache-2.0

"""
Terminal symbols and label styling shared by the logger and the CLI.
"""

from slowpath.TUI.text import Text

CHECK = Text.style("✔", color="green")
CROSS = Text.style("✘", color="red")

LABEL_COLORS = {
    "RUN": "green",
    "INFO": "blue",
    "WARNING": "yellow",
    "ERROR": "red",
    "SUCCESS": "green",
}


def label(name):
    """Bracketed, coloured level label such as ``[INFO]``."""
    return Text.style(f"[{name}]", color=LABEL_COLORS.get(name), bold=True)
