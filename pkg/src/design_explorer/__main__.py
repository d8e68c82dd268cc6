"""Entry point for ``python -m design_explorer``."""

import sys

from .cli import main

sys.exit(main())
