#!/usr/bin/env python3
"""Run the built-in benchmark cases and write the stats CSV.

Thin wrapper over `tal bench`; any extra arguments are passed through,
e.g. --cases 2_1_2_3 --modes normal --stats out.csv.
"""

import sys

from tal.cli import main

if __name__ == "__main__":
    sys.exit(main(["bench"] + sys.argv[1:]))
