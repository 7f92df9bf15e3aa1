#!/usr/bin/env python3
"""Generate a synthetic community dump in the data-dump XML layout."""

import argparse

from clarity.synth import SynthConfig, generate_dump


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--n-questions", type=int, default=28000)
    parser.add_argument("--clear-share", type=float, default=0.18)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    config = SynthConfig(n_questions=args.n_questions,
                         clear_share=args.clear_share, seed=args.seed)
    paths = generate_dump(config, args.out_dir)
    for name, path in paths.items():
        print(f"{name}: {path}")


if __name__ == "__main__":
    main()
