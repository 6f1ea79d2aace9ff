"""Refinement study: coherent-state latitude loop phase vs -J * solid angle."""

import argparse

import numpy as np

from majorana.checks import coherent_loop
from majorana.geometry import holonomy_phase, line_integral_phase, phase_difference


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=1.1, help="latitude of the spin direction")
    ap.add_argument("--two-j", type=int, nargs="+", default=[1, 2, 4])
    args = ap.parse_args()

    omega = 2 * np.pi * (1 - np.cos(args.theta))
    print(f"{'2J':>3} {'samples':>8} {'holonomy err':>14} {'line err':>12} {'ratio':>7}")
    for two_j in args.two_j:
        expected = -two_j / 2 * omega
        prev = None
        for samples in (250, 500, 1000, 2000, 4000):
            path = coherent_loop(two_j, args.theta, samples)
            err_h = phase_difference(holonomy_phase(path), expected)
            err_l = phase_difference(line_integral_phase(path), expected)
            ratio = "" if prev is None else f"{prev / err_h:7.2f}"
            print(f"{two_j:>3} {samples:>8} {err_h:14.3e} {err_l:12.3e} {ratio}")
            prev = err_h


if __name__ == "__main__":
    main()
