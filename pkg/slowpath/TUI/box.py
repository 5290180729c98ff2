from .text import Text

BOX_STYLES = {
    "light": ("┌", "┐", "└", "┘", "─", "│"),
    "heavy": ("┏", "┓", "┗", "┛", "━", "┃"),
    "double": ("╔", "╗", "╚", "╝", "═", "║"),
    "ascii": ("+", "+", "+", "+", "-", "|"),
}


class Box:
    """
    Frames a block of lines, with an optional title in the top border.
    Used by the logger for boxed messages.
    """

    def __init__(self, style="light", title=None, color=None, padding=1, width=None):
        """
        Initialize a box.

        Args:
            style: Border style ('light', 'heavy', 'double', 'ascii')
            title: Title placed in the top border
            color: Border colour
            padding: Horizontal padding inside the borders
            width: Fixed total width (or None for auto-sizing)
        """
        self.style = style if style in BOX_STYLES else "light"
        self.title = title
        self.color = color
        self.padding = max(0, padding)
        self.width = width

    def _char(self, index):
        char = BOX_STYLES[self.style][index]
        if self.color:
            return Text.style(char, color=self.color)
        return char

    def draw(self, content=None):
        """
        Draw the box around content.

        Args:
            content: A string (split on newlines) or a list of lines

        Returns:
            List of strings forming the box
        """
        if content is None:
            content = []
        elif isinstance(content, str):
            content = content.split("\n")

        inner = max([Text.visible_length(line) for line in content] or [0])
        inner += self.padding * 2
        if self.title:
            inner = max(inner, Text.visible_length(self.title) + 4)
        if self.width is not None:
            inner = max(1, self.width - 2)

        top_left, top_right, bottom_left, bottom_right, horizontal, vertical = (
            self._char(i) for i in range(6)
        )
        h_plain = BOX_STYLES[self.style][4]

        if self.title:
            title = f" {Text.truncate(self.title, inner - 4)} "
            rest = inner - Text.visible_length(title)
            border = h_plain * 1 + title + h_plain * (rest - 1)
        else:
            border = h_plain * inner
        if self.color:
            border = Text.style(border, color=self.color)

        lines = [top_left + border + top_right]
        for line in content:
            body = " " * self.padding + line
            if Text.visible_length(body) > inner:
                body = Text.truncate(body, inner)
            lines.append(vertical + Text.align(body, inner) + vertical)
        lines.append(bottom_left + horizontal * inner + bottom_right)
        return lines

    def __str__(self):
        return "\n".join(self.draw())
