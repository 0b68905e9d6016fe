#!/usr/bin/env python3
"""
optilik command line
Optimistic likelihood evaluation, posterior inference and experiment reproduction
"""

import sys
from typing import List, Optional

from .app import CLIApp


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI application"""
    app = CLIApp()
    return app.run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
