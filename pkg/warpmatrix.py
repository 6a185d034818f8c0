#!/usr/bin/env python3
"""
warpmatrix command line launcher
Usage: python warpmatrix.py wm "1 2 2 1"
"""
import sys
import os

# Add current directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import main  # noqa: E402

if __name__ == '__main__':
    main()
