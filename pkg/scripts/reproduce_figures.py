"""Write every bundled figure dataset under one directory.

    python3 scripts/reproduce_figures.py [OUTPUT_DIR] [--jobs N]
"""

import argparse
import sys
from pathlib import Path

from optomech_cv import cli


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("output_dir", nargs="?", default="figures")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--only", nargs="*", choices=sorted(cli.FIGURES))
    args = parser.parse_args()

    for figure_id in args.only or cli.FIGURES:
        target = Path(args.output_dir) / figure_id
        print(f"{figure_id} -> {target}", flush=True)
        code = cli.main(["figures", figure_id, str(target), "--jobs", str(args.jobs)])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
