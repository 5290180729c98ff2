import sys

from slowpath import main

if __name__ == "__main__":
    sys.exit(main())
