#!/usr/bin/env python3
"""Run the three security analyses end to end: invert, unlink, revoke.

Inversion needs no data; the unlinkability and revocability experiments run
on freshly generated synthetic datasets. Results land in per-mode
subdirectories of --out.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from giomhash.cli import main as cli_main

MCC = ["--radius", "100", "--ns", "6", "--nd", "4"]
KEY = ["--m", "32", "--q", "12"]
GEOMETRY = [
    "--min-minutiae", "15",
    "--max-minutiae", "22",
    "--jitter-pos", "4",
    "--jitter-theta", "0.08",
    "--drop-rate", "0.1",
    "--field-size", "300",
]


def gen_data(out: Path, fingers: int, samples: int, seed: int) -> int:
    return cli_main(
        ["gen-data", "--fingers", str(fingers), "--samples", str(samples),
         "--seed", str(seed), "--out", str(out)] + GEOMETRY
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/security")
    parser.add_argument("--attempts", type=int, default=1_000_000)
    parser.add_argument("--volume-samples", type=int, default=200_000)
    parser.add_argument("--n-keys", type=int, default=50)
    args = parser.parse_args()
    out = Path(args.out)

    code = cli_main(
        ["analyze", "--mode", "invert", "--seed", "0",
         "--attempts", str(args.attempts),
         "--volume-samples", str(args.volume_samples),
         "--out", str(out / "invert")]
    )
    if code != 0:
        return code

    unlink_data = out / "unlink" / "data"
    code = gen_data(unlink_data, fingers=40, samples=4, seed=100)
    if code != 0:
        return code
    code = cli_main(
        ["analyze", "--mode", "unlink", "--data", str(unlink_data),
         "--seed-a", "1", "--seed-b", "2",
         "--out", str(out / "unlink")] + KEY + MCC
    )
    if code != 0:
        return code

    revoke_data = out / "revoke" / "data"
    code = gen_data(revoke_data, fingers=100, samples=2, seed=123)
    if code != 0:
        return code
    return cli_main(
        ["analyze", "--mode", "revoke", "--data", str(revoke_data),
         "--base-seed", "5", "--n-keys", str(args.n_keys), "--seed", "99",
         "--out", str(out / "revoke")] + KEY + MCC
    )


if __name__ == "__main__":
    sys.exit(main())
