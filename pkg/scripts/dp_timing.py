"""Wall time of the pairing-sum evaluation as the number of stars grows."""

import argparse
import time

import numpy as np

from majorana.diagrams import partition_function
from majorana.stellar import constellation_to_state, random_constellation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-two-j", type=int, default=22)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    partition_function(random_constellation(4, rng))  # compile
    print(f"{'2J':>3} {'seconds':>9} {'rel. err vs norm':>17}")
    for two_j in range(2, args.max_two_j + 1, 2):
        u = random_constellation(two_j, rng)
        start = time.perf_counter()
        z = partition_function(u)
        elapsed = time.perf_counter() - start
        ref = constellation_to_state(u).norm2() / (two_j + 1)
        print(f"{two_j:>3} {elapsed:9.4f} {abs(z - ref) / ref:17.2e}")


if __name__ == "__main__":
    main()
