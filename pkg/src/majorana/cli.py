"""Command-line front end: ``majorana <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import checks, io
from .diagrams import diagram_sums, free_energy, partition_function
from .dynamics import SingularSymplecticForm, TrackingError, evolve_stars, oracle_trajectory
from .geometry import DiracStringError, geometric_phase, phase_difference, quantum_tensors
from .hilbert import two_j_of
from .moments import moment_set
from .stellar import constellation_to_state, state_to_constellation

TENSOR_LAYOUT = (
    "row/column index 2*i + alpha for star i (0-based) and frame direction alpha; "
    "alpha = 0 is e1 (theta-hat, or the x-axis projection within 1e-6 of a pole), "
    "alpha = 1 is e2 = u_i x e1"
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _InputError(message)


class _InputError(ValueError):
    pass


def _constellation(path):
    return io.constellation_from_json(io.load_json(path))


def _emit(obj, out=None):
    text = io.dumps(obj)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_convert(args):
    if (args.state is None) == (args.constellation is None):
        raise _InputError("give exactly one of --state or --constellation")
    if args.state:
        obj = io.constellation_to_json(state_to_constellation(io.state_from_json(io.load_json(args.state))))
    else:
        obj = io.state_to_json(constellation_to_state(_constellation(args.constellation)))
    _emit(obj, args.out)


def cmd_norm(args):
    u = _constellation(args.constellation)
    _emit({"Z": partition_function(u), "F": free_energy(u), "D": diagram_sums(u).tolist()}, args.out)


def cmd_moments(args):
    m = moment_set(_constellation(args.constellation))
    _emit(
        {
            "mean_n": m.mean_n.tolist(),
            "mean_nn": m.mean_nn.tolist(),
            "dipole": m.dipole.tolist(),
            "quadrupole": m.quadrupole.tolist(),
        },
        args.out,
    )


def cmd_tensors(args):
    u = _constellation(args.constellation)
    t = quantum_tensors(u)
    _emit(
        {
            "layout": TENSOR_LAYOUT,
            "frames": {"e1": t.frame.e1.tolist(), "e2": t.frame.e2.tolist()},
            "g": t.g.tolist(),
            "f": t.f.tolist(),
        },
        args.out,
    )


def cmd_phase(args):
    path = io.path_from_json(io.load_json(args.path))
    if args.method == "both":
        a = geometric_phase(path, "line_integral")
        b = geometric_phase(path, "holonomy")
        obj = {"line_integral": a, "holonomy": b, "delta": phase_difference(a, b)}
    else:
        obj = {args.method: geometric_phase(path, args.method)}
    _emit(obj, args.out)


def cmd_evolve(args):
    h = io.hamiltonian_from_json(io.load_json(args.h))
    u0 = _constellation(args.u0)
    if args.j is not None and two_j_of(args.j) != u0.two_j:
        raise _InputError(f"--j {args.j} does not match the {u0.two_j} stars of --u0")
    if args.dt <= 0 or args.steps < 0:
        raise _InputError("--dt must be positive and --steps nonnegative")
    traj = evolve_stars(u0, h, args.dt, args.steps)
    obj = {"trajectory": io.trajectory_to_json(traj)}
    if args.oracle:
        obj["oracle"] = io.trajectory_to_json(oracle_trajectory(u0, h, args.dt, args.steps))
    _emit(obj, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "star", "x", "y", "z"])
            w.writerows(io.trajectory_csv_rows(traj))


def cmd_selftest(args):
    results = checks.quick_suite(seed=args.seed)
    for r in results:
        print(r.line())
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed")
    return 0 if n_pass == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="majorana", description="Majorana stellar representation of spin states")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for randomized checks")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("convert", help="state <-> constellation")
    c.add_argument("--state")
    c.add_argument("--constellation")
    c.set_defaults(func=cmd_convert)

    c = sub.add_parser("norm", help="Z, F and per-order diagram sums")
    c.add_argument("--constellation", required=True)
    c.set_defaults(func=cmd_norm)

    c = sub.add_parser("moments", help="<n>, <nn>, dipole and quadrupole")
    c.add_argument("--constellation", required=True)
    c.set_defaults(func=cmd_moments)

    c = sub.add_parser("tensors", help="metric g and curvature f")
    c.add_argument("--constellation", required=True)
    c.set_defaults(func=cmd_tensors)

    c = sub.add_parser("phase", help="geometric phase of a closed star path")
    c.add_argument("--path", required=True)
    c.add_argument("--method", choices=["both", "line_integral", "holonomy"], default="both")
    c.set_defaults(func=cmd_phase)

    c = sub.add_parser("evolve", help="integrate the star equations of motion")
    c.add_argument("--j", type=float)
    c.add_argument("--h", required=True, help="Hamiltonian JSON")
    c.add_argument("--u0", required=True, help="initial constellation JSON")
    c.add_argument("--dt", type=float, required=True)
    c.add_argument("--steps", type=int, required=True)
    c.add_argument("--oracle", action="store_true", help="also emit the Schrodinger-oracle trajectory")
    c.add_argument("--csv", help="write per-star (t, x, y, z) rows here")
    c.set_defaults(func=cmd_evolve)

    c = sub.add_parser("selftest", help="oracle-equivalence checks at j <= 2")
    c.set_defaults(func=cmd_selftest)

    for name, sp in sub.choices.items():
        if name != "selftest":
            sp.add_argument("--out", help="write JSON here instead of stdout")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args) or 0
    # LinAlgError subclasses ValueError, so numerical failures are caught first
    except (SingularSymplecticForm, TrackingError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"majorana: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (_InputError, io.SchemaError, DiracStringError, ValueError) as exc:
        print(f"majorana: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
