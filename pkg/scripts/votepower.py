"""Command-line entry point.

Usage:
    PYTHONPATH=. python scripts/votepower.py analyze --system system.json --measure shapley-shubik
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
