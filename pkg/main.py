#!/usr/bin/env python3
"""Entry point for running the orbitlab CLI without installing the package.

    python3 main.py cfe 3/7
    python3 main.py orbit-measure --m 101 1009 --output nu.csv
"""

from orbit_sdk.cli import main

if __name__ == "__main__":
    main()
