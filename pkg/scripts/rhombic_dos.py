#!/usr/bin/env python3
"""Density of states of a glued-tree chain over a flux sweep.

Writes `phi,energy_bin_center,count` rows; the flat flux values show up as
columns that collapse onto finitely many occupied bins.  Feed the CSV to any
plotting tool to reproduce the butterfly-style panels.
"""

import argparse
import math
import sys

from caged import bloch, cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", default="2", help="growth sequence, e.g. 2,3,2")
    ap.add_argument("--phi-grid", type=int, default=192)
    ap.add_argument("--k-grid", type=int, default=256)
    ap.add_argument("--bins", type=int, default=201)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    xs = cli.parse_sequence(args.x)
    model = bloch.chain_bloch(xs, 0.0)
    phis = [2.0 * math.pi * i / args.phi_grid for i in range(args.phi_grid)]
    dos = bloch.dos_map(model, phis, args.k_grid, args.bins)
    centers = dos.bin_centers()

    lines = ["phi,energy_bin_center,count"]
    for i, phi in enumerate(dos.flux_values):
        for b in range(len(centers)):
            if dos.counts[i, b]:
                lines.append(f"{phi:.17g},{centers[b]:.17g},{int(dos.counts[i, b])}")
    payload = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(payload)
    else:
        with open(args.out, "w") as fh:
            fh.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
