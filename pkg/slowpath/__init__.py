import sys

from slowpath.Logging.logger import error
from slowpath.Meta.version import VERSION

__version__ = VERSION


def main(argv=None):
    """Main entry point for the slowpath command."""
    from slowpath.Shell.cli import run_cli

    try:
        return run_cli(argv)
    except KeyboardInterrupt:
        print()
        return 130
    except Exception as e:
        error(f"slowpath error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
