"""Command line: noisyqd-plot <kind> --in <csv> [--in <csv> ...] --out <img>.

Exit codes: 0 success, 2 bad arguments or input files violating the
table contracts.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, render
from .tables import ContractError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="noisyqd-plot",
        description="Render figures from noisyqd CSV tables.")
    parser.add_argument("kind", choices=sorted(KINDS),
                        help="figure kind; heatmap_psi2 and trace_purity take one "
                             "input, current_curves and norm_decay overlay several")
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="CSV", help="input table (repeatable)")
    parser.add_argument("--out", required=True, metavar="IMG",
                        help="output image path (.png, .svg, .pdf)")
    args = parser.parse_args(argv)

    try:
        render(args.kind, args.inputs, args.out)
    except ContractError as exc:
        print(f"noisyqd-plot: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
