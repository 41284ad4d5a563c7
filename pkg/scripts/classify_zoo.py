#!/usr/bin/env python3
"""Classify the periodic type of the three reference measures across a few
seeds and write the verdict reports under results/."""

import pathlib
import sys

from adicop import cli

OUT = pathlib.Path(__file__).resolve().parent.parent / "results"

SPECS = {
    "product": "product bernoulli 0.5",
    "periodic2": "periodic k=2 period8",
    "aperiodic": "aperiodic toeplitz alpha=0000",
}


def main():
    OUT.mkdir(exist_ok=True)
    code = 0
    for seed in range(3):
        for name, spec in SPECS.items():
            out = OUT / f"classify_{name}_seed{seed}.json"
            print(f"== {spec} (seed {seed}) -> {out.name}")
            code |= cli.main(["classify", "--spec", spec,
                              "--seed", str(seed), "--out", str(out)])
    return code


if __name__ == "__main__":
    sys.exit(main())
