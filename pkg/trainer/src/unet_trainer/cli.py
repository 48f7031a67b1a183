"""Command-line interface for training and probability-map export."""

from __future__ import annotations

import argparse
import json
import sys

from .config import EXPERIMENTS, NetConfig, TrainConfig


def _cmd_train(args) -> int:
    from .train import train_experiment

    cfg = TrainConfig(
        experiment=args.experiment,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        folds=args.folds,
        seed=args.seed,
        net=NetConfig(input_size=args.image_size, base_filters=args.base_filters),
    )
    manifest = train_experiment(cfg, args.data, args.out)
    summary = {
        "experiment": cfg.experiment,
        "folds": [{"fold": f["fold"], "val_dice": f["val_dice"]} for f in manifest["folds"]],
    }
    print(json.dumps(summary))
    return 0


def _cmd_export(args) -> int:
    from .export import export_pmaps

    net = NetConfig(input_size=args.image_size, base_filters=args.base_filters)
    written = export_pmaps(args.weights, args.images, args.out, net)
    print(json.dumps({"written": [str(p) for p in written]}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unet-trainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="run the cross-validated training protocol")
    tr.add_argument("--experiment", choices=sorted(EXPERIMENTS), default="E4")
    tr.add_argument("--data", required=True, help="directory with images/ and masks_*/")
    tr.add_argument("--out", required=True, help="output directory for weights and manifest")
    tr.add_argument("--epochs", type=int, default=250)
    tr.add_argument("--batch-size", type=int, default=4)
    tr.add_argument("--learning-rate", type=float, default=0.001)
    tr.add_argument("--folds", type=int, default=10)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--image-size", type=int, default=512)
    tr.add_argument("--base-filters", type=int, default=16)
    tr.set_defaults(func=_cmd_train)

    ex = sub.add_parser("export", help="export sigmoid probability maps as PMAP files")
    ex.add_argument("--weights", required=True)
    ex.add_argument("--images", required=True)
    ex.add_argument("--out", required=True)
    ex.add_argument("--image-size", type=int, default=512)
    ex.add_argument("--base-filters", type=int, default=16)
    ex.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
