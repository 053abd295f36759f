"""Write the JSON block-matrix fixtures used by the tests and the CLI docs."""

import argparse
from pathlib import Path

import numpy as np

from opsign.blocks import block_identity, dump, make_block_matrix, scalar_blocks
from opsign.extremum import example_l2_hessian

ROOT = Path(__file__).resolve().parents[1]


def fixtures():
    yield "identity_3.json", block_identity([2, 1, 3])
    yield "identity_1x1.json", block_identity([1, 1])
    for n in (2, 4, 8):
        yield f"l2_hessian_N{n}.json", example_l2_hessian(n)
    yield "scalar_211.json", scalar_blocks([[2, 1], [1, 2]])
    yield "scalar_4112.json", scalar_blocks([[4, 1], [1, 2]])
    yield "scalar_1221.json", scalar_blocks([[1, 2], [2, 1]])
    yield "ones_2.json", scalar_blocks(np.ones((2, 2)))
    yield "ones_3.json", scalar_blocks(np.ones((3, 3)))
    yield "tridiag_3.json", scalar_blocks([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
    yield "saddle_2.json", scalar_blocks([[1, 0], [0, -1]])
    yield "neg_identity_2.json", scalar_blocks([[-1, 0], [0, -1]])
    yield "zero_coupling.json", make_block_matrix(
        [2, 1], [[[[3, 1], [1, 3]], [[0], [0]]], [[[0, 0]], [[5]]]]
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "fixtures")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, b in fixtures():
        dump(b, args.out / name)
        print(args.out / name)


if __name__ == "__main__":
    main()
