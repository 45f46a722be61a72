"""Allow ``python -m mlbgg``."""

import sys

from mlbgg.cli.main import main

sys.exit(main())
