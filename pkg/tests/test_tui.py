import os
import unittest
from unittest.mock import patch

from slowpath.Logging import logger
from slowpath.Logging.terminal import label
from slowpath.TUI.box import Box
from slowpath.TUI.table import Table
from slowpath.TUI.text import Text


class TestText(unittest.TestCase):
    """Test cases for the Text class"""

    def setUp(self):
        self.env = patch.dict(os.environ)
        self.env.start()
        os.environ.pop("NO_COLOR", None)

    def tearDown(self):
        self.env.stop()

    def test_style_color(self):
        styled = Text.style("Hello", color="red")
        self.assertIn("\033[31m", styled)
        self.assertIn("Hello", styled)
        self.assertIn("\033[0m", styled)

    def test_style_multiple(self):
        styled = Text.style("Hello", color="blue", bold=True, underline=True)
        self.assertIn("\033[34m", styled)
        self.assertIn("\033[1m", styled)
        self.assertIn("\033[4m", styled)

    def test_style_bg_color(self):
        self.assertIn("\033[42m", Text.style("Hello", bg_color="green"))

    def test_no_color_env(self):
        os.environ["NO_COLOR"] = "1"
        self.assertEqual(Text.style("Hello", color="red", bold=True), "Hello")

    def test_strip_ansi_and_length(self):
        styled = Text.style("Hello", color="bright_red", bold=True)
        self.assertEqual(Text.strip_ansi(styled), "Hello")
        self.assertEqual(Text.visible_length(styled), 5)

    def test_align(self):
        self.assertEqual(Text.align("Hello", 10), "Hello     ")
        self.assertEqual(Text.align("Hello", 10, alignment="center"), "  Hello   ")
        self.assertEqual(Text.align("Hello", 10, alignment="right"), "     Hello")

    def test_truncate(self):
        self.assertEqual(Text.truncate("abcdefgh", 5), "ab...")
        self.assertEqual(Text.truncate("abc", 5), "abc")


class TestBox(unittest.TestCase):
    def test_box_creation(self):
        result = Box().draw(["Hello", "World"])
        self.assertEqual(len(result), 4)
        self.assertTrue(result[0].startswith("┌") and result[0].endswith("┐"))
        self.assertTrue(result[-1].startswith("└") and result[-1].endswith("┘"))
        self.assertEqual(len({Text.visible_length(line) for line in result}), 1)

    def test_box_with_title(self):
        result = Box(title="Session").draw("S=0.5\nW=19ms")
        self.assertIn("Session", result[0])
        self.assertEqual(len(result), 4)

    def test_styles(self):
        self.assertIn("╔", Box(style="double").draw(["x"])[0])
        self.assertIn("┏", Box(style="heavy").draw(["x"])[0])
        self.assertIn("+", Box(style="ascii").draw(["x"])[0])
        self.assertIn("┌", Box(style="unknown").draw(["x"])[0])


class TestTable(unittest.TestCase):
    def test_table_creation(self):
        table = Table(headers=["case", "strategy", "answer"], rows=[["one-ring", "tcd", "1"], ["two-rings", "baseline", "3"]])
        result = table.draw()
        self.assertEqual(len(result), 6)
        self.assertTrue(all(header in result[1] for header in ["case", "strategy", "answer"]))

    def test_float_precision_and_alignment(self):
        table = Table(headers=["strategy", "accuracy"], rows=[["tcd", 0.5], ["baseline", 0.25]], precision=2)
        lines = table.draw()
        self.assertIn("0.50", lines[3])
        self.assertTrue(lines[3].rstrip("│ ").endswith("0.50"))

    def test_bool_cells(self):
        lines = Table(["correct"], [[True], [False]]).draw()
        self.assertIn("yes", lines[3])
        self.assertIn("no", lines[4])

    def test_table_with_title(self):
        table = Table(headers=["metric", "value"], rows=[["steps", 3]], title="Profile")
        self.assertIn("Profile", str(table))
        self.assertTrue(table.has_rows())

    def test_deterministic_rendering(self):
        rows = [["a", 1.23456789], ["b", 2]]
        self.assertEqual(str(Table(["k", "v"], rows)), str(Table(["k", "v"], rows)))


class TestLogger(unittest.TestCase):
    def setUp(self):
        import tempfile

        self.dir = tempfile.mkdtemp(prefix="slowpath_log_test_")
        self.path = os.path.join(self.dir, "slowpath.log")
        logger.set_log_file(self.path)

    def tearDown(self):
        import shutil

        logger.set_log_file(None)
        shutil.rmtree(self.dir, ignore_errors=True)

    def test_messages_reach_log_file_without_colour(self):
        logger.info("loaded manifest")
        logger.error("case failed", use_box=True)
        with open(self.path, encoding="utf-8") as f:
            content = f.read()
        self.assertIn("[INFO] loaded manifest", content)
        self.assertIn("[ERROR] case failed", content)
        self.assertNotIn("\033[", content)

    def test_quiet_suppresses_stdout(self):
        with patch("builtins.print") as printed:
            logger.success("done")
        printed.assert_not_called()
        self.assertTrue(logger.is_quiet())

    def test_label(self):
        self.assertEqual(Text.strip_ansi(label("WARNING")), "[WARNING]")


if __name__ == "__main__":
    unittest.main()
