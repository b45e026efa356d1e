"""Print the generalized-binomial witness table next to the published values.

Usage: python scripts/reproduce_table1.py [--csv out.csv]
"""

import sys

from nonclassical.cli import main

if __name__ == "__main__":
    argv = ["table1"]
    if len(sys.argv) == 3 and sys.argv[1] == "--csv":
        argv += ["--out", sys.argv[2]]
    sys.exit(main(argv))
