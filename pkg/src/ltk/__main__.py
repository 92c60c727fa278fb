"""Allow ``python -m ltk`` as an alias for the ``ltk`` console command."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
