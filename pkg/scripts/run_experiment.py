#!/usr/bin/env python3
"""End-to-end experiment: ingest a dump, train every model, print the report.

Point --dump-dir at a directory containing Posts.xml, Comments.xml and
PostHistory.xml (a real community dump or one produced by
scripts/generate_community.py).
"""

import argparse
import json
from pathlib import Path

from clarity.pipeline import (MODEL_NAMES, PipelineConfig, cmd_evaluate,
                              cmd_ingest, cmd_train)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dump-dir", required=True)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--name", default="community")
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--r-rounds", type=int, default=1000)
    parser.add_argument("--models", default=",".join(
        ("majority", "random", "simq-majority", "threshold-cqweighted",
         "simq-ml", "bow-lr-n3")))
    args = parser.parse_args()

    dump = Path(args.dump_dir)
    config = PipelineConfig(
        posts_xml=str(dump / "Posts.xml"),
        comments_xml=str(dump / "Comments.xml"),
        history_xml=str(dump / "PostHistory.xml"),
        out_dir=args.out_dir,
        name=args.name,
        seed=args.seed,
        r_rounds=args.r_rounds,
    )
    (Path(args.out_dir)).mkdir(parents=True, exist_ok=True)
    config_path = Path(args.out_dir) / "config.json"
    config_path.write_text(json.dumps(config.to_dict(), indent=2), encoding="utf-8")
    print(f"config written to {config_path}")

    corpus_dir = cmd_ingest(config)
    print(f"corpus: {corpus_dir}")
    print((corpus_dir / "stats.json").read_text())

    models = [m.strip() for m in args.models.split(",") if m.strip()]
    for model in models:
        if model not in MODEL_NAMES:
            raise SystemExit(f"unknown model {model!r}")
        print(f"training {model} ...")
        cmd_train(config, model)
    report_dir = cmd_evaluate(config, models)
    print((report_dir / "report.txt").read_text())
    print(f"report: {report_dir}")


if __name__ == "__main__":
    main()
