#!/usr/bin/env python3
"""Main entry point for the eegraph command line."""
import sys
import os

# Add current directory to path
sys.path.insert(0, os.path.dirname(__file__))

from eegraph.cli import main


if __name__ == "__main__":
    main()
