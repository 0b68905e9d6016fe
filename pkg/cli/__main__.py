"""
Main entry point for the cli module
"""

import sys

from .main import main

if __name__ == "__main__":
    sys.exit(main())
