"""Seeded oracle sweep: compare both criteria with the eigenvalue oracle.

    python3 scripts/run_sweep.py --seeds 0 499 --out sweep.csv
"""

import argparse
import sys
import time
from collections import Counter
from dataclasses import dataclass

from opsign.oracle import count_disagreements, sweep, write_sweep_csv


@dataclass(frozen=True)
class SweepConfig:
    first_seed: int = 0
    last_seed: int = 499
    n_max: int = 6
    max_dim: int = 4
    out: str = "sweep.csv"


def parse_args(argv=None):
    d = SweepConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", nargs=2, type=int, default=(d.first_seed, d.last_seed), metavar=("FIRST", "LAST"))
    p.add_argument("--n-max", type=int, default=d.n_max)
    p.add_argument("--max-dim", type=int, default=d.max_dim)
    p.add_argument("--out", default=d.out)
    a = p.parse_args(argv)
    return SweepConfig(a.seeds[0], a.seeds[1], a.n_max, a.max_dim, a.out)


def main(argv=None):
    cfg = parse_args(argv)
    t0 = time.perf_counter()
    rows = sweep(range(cfg.first_seed, cfg.last_seed + 1), cfg.n_max, cfg.max_dim)
    elapsed = time.perf_counter() - t0
    with open(cfg.out, "w", newline="") as fh:
        write_sweep_csv(rows, fh)
    pd = Counter(r["agree"] for r in rows)
    nn = Counter(r["nn_agree"] for r in rows)
    print(f"{len(rows)} instances in {elapsed:.2f}s -> {cfg.out}")
    print(f"  pd agreement: {dict(pd)}")
    print(f"  nn agreement: {dict(nn)}")
    bad = count_disagreements(rows)
    print(f"  disagreements: {bad}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
