#!/usr/bin/env python3
"""pfr - progressions, lattice points and covers from the command line."""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from pfrkit.cli import main  # noqa: E402


if __name__ == "__main__":
    main()
