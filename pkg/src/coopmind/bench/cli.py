"""Accuracy bench command line.

    evalbench --model runs/tom.ckpt --dataset runs/dataset --split test --out report.csv
"""

from __future__ import annotations

import argparse
import sys

from ..data import load as load_dataset
from ..data.windows import make_samples
from ..env.layout import load_layout
from ..model.training import load_model
from .accuracy import action_accuracy
from .predictors import MarginalPredictor, PersistencePredictor, RandomPredictor, ToMPredictor
from .report import render_table, write_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evalbench", description="Score a trained predictor against its baselines."
    )
    parser.add_argument("--model", required=True, help="model checkpoint path")
    parser.add_argument("--dataset", required=True, help="dataset directory")
    parser.add_argument("--split", default="test", choices=["train", "val", "test"])
    parser.add_argument("--out", required=True, help="CSV report destination")
    parser.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    dataset = load_dataset(args.dataset)
    layout = load_layout(dataset.manifest["layout_id"])
    model = load_model(args.model)
    n = model.config.history_length
    l = model.config.prediction_length
    samples = list(make_samples(dataset, n=n, l=l, split=args.split))
    if not samples:
        print(f"no samples in split {args.split!r}", file=sys.stderr)
        return 1

    target_style = dataset.manifest.get("target_style", "")
    predictors = [
        ToMPredictor(model, layout),
        RandomPredictor(prediction_length=l, seed=args.seed),
        PersistencePredictor(prediction_length=l),
        MarginalPredictor.fit(dataset, split="train", prediction_length=l, n=n, l=l),
    ]
    rows = [
        action_accuracy(p, samples, target_style=target_style,
                        layout_id=layout.name, split=args.split)
        for p in predictors
    ]
    write_report(args.out, rows)
    print(render_table(rows), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
