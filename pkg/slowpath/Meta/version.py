from slowpath.TUI.text import Text

VERSION = "0.1.0"


def about():
    """Print the banner shown by ``slowpath --version``."""
    print(Text.style("✦ slowpath ✦", color="cyan", bold=True))
    print(Text.style(f"Temporal contrastive decoding toolkit, version {VERSION}", color="green"))
    print(
        Text.style(
            "Dual-branch decoding that contrasts original and temporally blurred audio views.",
            color="yellow",
        )
    )
