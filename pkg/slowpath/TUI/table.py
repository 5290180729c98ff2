from .text import Text

# (horizontal, vertical, top_left, top_t, top_right, left_t, cross, right_t,
#  bottom_left, bottom_t, bottom_right)
TABLE_STYLES = {
    "light": ("─", "│", "┌", "┬", "┐", "├", "┼", "┤", "└", "┴", "┘"),
    "heavy": ("━", "┃", "┏", "┳", "┓", "┣", "╋", "┫", "┗", "┻", "┛"),
    "ascii": ("-", "|", "+", "+", "+", "+", "+", "+", "+", "+", "+"),
}


class Table:
    """
    Terminal table that displays rows and columns with aligned cells.
    Numeric cells are formatted with a fixed precision so rendered reports
    are reproducible.
    """

    def __init__(
        self,
        headers=None,
        rows=None,
        style="light",
        alignments=None,
        precision=4,
        padding=1,
        title=None,
    ):
        """
        Initialize a table.

        Args:
            headers: List of column headers
            rows: List of rows, where each row is a list of cells
            style: Border style (light, heavy, ascii)
            alignments: Per-column alignment (left, center, right); numbers
                default to right, everything else to left
            precision: Digits after the decimal point for float cells
            padding: Cell padding
            title: Table title
        """
        self.headers = list(headers or [])
        self.rows = [list(row) for row in (rows or [])]
        self.style = style if style in TABLE_STYLES else "light"
        self.alignments = list(alignments or [])
        self.precision = precision
        self.padding = max(0, padding)
        self.title = title

    def add_row(self, row):
        """Add a row to the table."""
        self.rows.append(list(row))

    def add_rows(self, rows):
        """Add multiple rows to the table."""
        for row in rows:
            self.add_row(row)

    def has_rows(self):
        """Check if the table has any rows."""
        return bool(self.rows)

    def _cell_text(self, value):
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, float):
            return f"{value:.{self.precision}f}"
        return "" if value is None else str(value)

    def _alignment(self, col_index):
        if col_index < len(self.alignments):
            return self.alignments[col_index]
        for row in self.rows:
            if col_index < len(row) and row[col_index] is not None:
                value = row[col_index]
                numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
                return "right" if numeric else "left"
        return "left"

    def _widths(self, text_rows):
        num_cols = max([len(self.headers)] + [len(row) for row in text_rows])
        widths = [0] * num_cols
        for i in range(num_cols):
            if i < len(self.headers):
                widths[i] = Text.visible_length(self.headers[i])
            for row in text_rows:
                if i < len(row):
                    widths[i] = max(widths[i], Text.visible_length(row[i]))
        return widths

    def draw(self):
        """
        Draw the table.

        Returns:
            List of strings representing the table
        """
        h, v, tl, tt, tr, lt, cross, rt, bl, bt, br = TABLE_STYLES[self.style]
        text_rows = [[self._cell_text(cell) for cell in row] for row in self.rows]
        widths = self._widths(text_rows)
        pad = " " * self.padding
        spans = [w + 2 * self.padding for w in widths]

        def rule(left, mid, right):
            return left + mid.join(h * span for span in spans) + right

        def line(cells, header=False):
            parts = []
            for i, width in enumerate(widths):
                cell = cells[i] if i < len(cells) else ""
                alignment = "center" if header else self._alignment(i)
                parts.append(pad + Text.align(cell, width, alignment) + pad)
            return v + v.join(parts) + v

        result = []
        if self.title:
            total = sum(spans) + len(spans) - 1
            result.append(tl + h * total + tr)
            result.append(v + Text.align(f" {self.title} ", total, "center") + v)
            result.append(rule(lt, tt, rt))
        else:
            result.append(rule(tl, tt, tr))

        if self.headers:
            result.append(line(self.headers, header=True))
            result.append(rule(lt, cross, rt))

        for cells in text_rows:
            result.append(line(cells))

        result.append(rule(bl, bt, br))
        return result

    def __str__(self):
        """Return the table as a string."""
        return "\n".join(self.draw())
