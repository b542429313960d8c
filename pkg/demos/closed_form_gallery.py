#!/usr/bin/env python3
"""Closed-form tour of the lossy oscillator at complex frequency Omega.

Prints the localization scales, resonance widths and coherent-state
uncertainty product for a chosen Omega = omega1 - i*omega2, checks the
late-time asymptotic form against the exact point-source density, and
optionally writes a psi2_heatmap.csv of |psi(x,t)|^2 for plotting.
"""

import argparse
import os

import numpy as np

from noisyqd import ComplexFrequency, point_source_psi
from noisyqd.oscillator import (
    asymptotic_psi,
    coherent_uncertainty,
    localisation_scales,
    spectrum,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega1", type=float, default=1.0)
    ap.add_argument("--omega2", type=float, default=0.3)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--t-max", type=float, default=6.0)
    ap.add_argument("--n-times", type=int, default=120)
    ap.add_argument("--half-width", type=float, default=4.0)
    ap.add_argument("--n-points", type=int, default=161)
    ap.add_argument("--out", help="directory for psi2_heatmap.csv")
    args = ap.parse_args()

    om = ComplexFrequency(args.omega1, args.omega2)
    m = args.mass
    tau, depth = localisation_scales(m, om)
    print(f"Omega = {om.omega1} - {om.omega2}i, m = {m}")
    print(f"  lifetime tau        = {tau:.6g}")
    print(f"  penetration depth   = {depth:.6g}")
    print(f"  coherent dx*dp      = {coherent_uncertainty(om):.6g}")
    widths = [spectrum(n, om, "stable_ground").width for n in range(4)]
    print(f"  widths (stable gnd) = {['%.4g' % w for w in widths]}")

    # late-time check: the asymptotic density should sit on the exact one
    t_late = 5.0 / om.omega2 if om.omega2 else args.t_max
    x = np.linspace(-depth, depth, 101)
    exact = np.abs(point_source_psi(m, om, x, t_late)) ** 2
    approx = np.abs(asymptotic_psi(m, om, x, t_late)) ** 2
    rel = np.max(np.abs(approx - exact) / exact.max())
    print(f"  asymptotic vs exact at omega2*t=5: max rel dev {rel:.2e}")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        times = np.linspace(args.t_max / args.n_times, args.t_max, args.n_times)
        xs = np.linspace(-args.half_width, args.half_width, args.n_points)
        path = os.path.join(args.out, "psi2_heatmap.csv")
        with open(path, "w") as fh:
            fh.write("t,x,psi2\n")
            for t in times:
                dens = np.abs(point_source_psi(m, om, xs, t)) ** 2
                for xv, dv in zip(xs, dens):
                    fh.write(f"{t:.17g},{xv:.17g},{dv:.17g}\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
