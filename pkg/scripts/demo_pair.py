#!/usr/bin/env python3
"""End-to-end demo: two random ellipses, their tight outer ellipsoid, CSVs.

Writes a problem file, solves it through the CLI code path, and samples
boundary CSVs for the inputs and the result so the picture can be drawn with
any plotting tool, e.g.:

    python scripts/demo_pair.py --out-dir demo
    gnuplot> plot 'demo/part_0.csv' w l, 'demo/part_1.csv' w l, 'demo/outer.csv' w l
"""

import argparse
import json
import os

import numpy as np

from ellipsum import Ellipsoid, containment_check, mvoe_pair
from ellipsum.cli import main as cli_main


def random_ellipse(rng):
    eigs = 10.0 ** rng.uniform(-0.5, 0.5, 2)
    frame, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    shape = (frame * eigs) @ frame.T
    return Ellipsoid(rng.normal(size=2), 0.5 * (shape + shape.T))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="demo_out")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--samples", type=int, default=256)
    args = parser.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    parts = [random_ellipse(rng), random_ellipse(rng)]

    problem_path = os.path.join(args.out_dir, "problem.json")
    with open(problem_path, "w") as handle:
        json.dump(
            {"version": "1", "dimension": 2, "ellipsoids": [p.to_dict() for p in parts]},
            handle,
            indent=2,
        )

    result_path = os.path.join(args.out_dir, "result.json")
    code = cli_main(["sum", problem_path, result_path, "--check"])
    if code != 0:
        raise SystemExit(f"sum command failed with exit code {code}")

    parts_csv = os.path.join(args.out_dir, "part.csv")
    cli_main(["boundary", problem_path, parts_csv, "--samples", str(args.samples)])
    outer_csv = os.path.join(args.out_dir, "outer.csv")
    cli_main(["boundary", result_path, outer_csv, "--samples", str(args.samples)])

    result = mvoe_pair(parts[0], parts[1])
    report = containment_check(result.ellipsoid, parts, n_dirs=2000, seed=args.seed)
    print(f"beta = {result.beta:.12g}, volume = {result.volume:.12g} "
          f"({result.method}, {result.iterations} iterations)")
    print(f"containment: passed={report.passed}, worst violation {report.worst_violation:.3e}")
    print(f"wrote {problem_path}, {result_path}, part_[01].csv and outer.csv in {args.out_dir}/")


if __name__ == "__main__":
    main()
