"""The three-variable l2 example: FD Hessian, the three PD paths and the classification.

    python3 scripts/example_l2.py --trunc 4
"""

import argparse

import numpy as np

from opsign.blocks import flatten
from opsign.extremum import classify_critical_point, example_l2_functional, example_l2_hessian, hessian_fd
from opsign.linalg import invert
from opsign.schur_first import check_pd, schur_first
from opsign.small import check_pd_3x3, check_pd_bidiagonal


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trunc", type=int, default=4)
    args = p.parse_args(argv)
    np.set_printoptions(precision=6, suppress=True)

    phi = example_l2_functional(args.trunc)
    exact = example_l2_hessian(args.trunc)
    fd = hessian_fd(phi)
    print(f"max |H_fd - H_exact| = {np.max(np.abs(flatten(fd) - flatten(exact))):.2e}")
    print("leading 2x2 of Hxx^-1:\n", invert(exact.blocks[0][0])[:2, :2])
    comp = flatten(schur_first(exact, 2, 1))
    n = args.trunc
    print("leading 2x2 of Hzz - Hzx Hxx^-1 Hxz:\n", comp[n:n + 2, n:n + 2])

    for cert in (check_pd(exact, mode="full_tree"), check_pd_3x3(exact), check_pd_bidiagonal(exact)):
        print(f"{cert.method:28s} {cert.verdict.value:20s} {cert.leaf_count} checks")
    print()
    print(classify_critical_point(phi).render())


if __name__ == "__main__":
    main()
