import os
import re

from termcolor import colored

ANSI_PATTERN = re.compile(r"\x1B\[[0-?]*[ -/]*[@-~]")

# termcolor spells the bright variants "light_*"
COLOR_ALIASES = {
    "gray": "dark_grey",
    "grey": "dark_grey",
    "bright_black": "dark_grey",
    "bright_red": "light_red",
    "bright_green": "light_green",
    "bright_yellow": "light_yellow",
    "bright_blue": "light_blue",
    "bright_magenta": "light_magenta",
    "bright_cyan": "light_cyan",
}


class Text:
    """
    Text styling helpers for terminal output.
    Colours come from termcolor; everything else works on plain strings.
    """

    @staticmethod
    def style(text, color=None, bg_color=None, bold=False, underline=False):
        """
        Apply colour and attributes to text.

        Args:
            text: Text to style
            color: Foreground colour name
            bg_color: Background colour name
            bold: Apply bold style
            underline: Apply underline style

        Returns:
            Styled text, or the plain text when colours are disabled
        """
        if os.environ.get("NO_COLOR"):
            return str(text)

        attrs = []
        if bold:
            attrs.append("bold")
        if underline:
            attrs.append("underline")

        color = COLOR_ALIASES.get(color, color) if color else None
        on_color = None
        if bg_color:
            on_color = "on_" + COLOR_ALIASES.get(bg_color, bg_color)

        if not (color or on_color or attrs):
            return str(text)
        return colored(str(text), color, on_color, attrs=attrs or None, force_color=True)

    @staticmethod
    def strip_ansi(text):
        """Remove ANSI escape codes from text."""
        return ANSI_PATTERN.sub("", str(text))

    @staticmethod
    def visible_length(text):
        """Visible length of text, ignoring ANSI codes."""
        return len(Text.strip_ansi(text))

    @staticmethod
    def align(text, width, alignment="left", fill_char=" "):
        """
        Align text within a given width.

        Args:
            text: Text to align
            width: Width to align within
            alignment: Alignment type (left, center, right)
            fill_char: Character to use for padding

        Returns:
            Aligned text
        """
        text = str(text)
        padding = width - Text.visible_length(text)
        if padding <= 0:
            return text

        if alignment == "center":
            left_padding = padding // 2
            return fill_char * left_padding + text + fill_char * (padding - left_padding)
        if alignment == "right":
            return fill_char * padding + text
        return text + fill_char * padding

    @staticmethod
    def truncate(text, max_length, ellipsis="..."):
        """Truncate plain text to a maximum visible length."""
        plain = Text.strip_ansi(text)
        if len(plain) <= max_length:
            return plain
        return plain[: max(0, max_length - len(ellipsis))] + ellipsis
