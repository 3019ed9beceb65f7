#!/usr/bin/env python3
"""
Command-line runner for growgraph experiments
"""
import sys
from pathlib import Path

# Add current directory to Python path
current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

from growgraph.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
