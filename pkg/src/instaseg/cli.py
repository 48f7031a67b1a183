"""Command-line interface.

Exit codes: 0 success, 1 I/O failure, 2 malformed data, 3 bad usage.
Machine-readable output is single-line JSON on stdout; diagnostics go to
stderr.  ``INSTASEG_NO_COLOR`` disables terminal styling.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io as raster_io
from .io import FormatError, read_gray, read_label, read_pmap, write_label
from .metrics import METRIC_NAMES, aggregate_folds, compute_metrics, confusion, mape, wilcoxon_signed_rank
from .morphology import lanczos_resize
from .phantom import PhantomSpec, generate
from .segmentation import PipelineConfig, binarize_fixed, label_components, split_instances

_OVERLAY_BASE = 40
_OVERLAY_STEP = 83
_OVERLAY_SPAN = 216


class FormatUsage(Exception):
    """Usage problem detected after argparse; mapped to exit code 3."""


def _perror(message: str) -> None:
    styled = sys.stderr.isatty() and not os.environ.get("INSTASEG_NO_COLOR")
    prefix = "\x1b[31merror:\x1b[0m" if styled else "error:"
    print(f"{prefix} {message}", file=sys.stderr)


def _emit(obj) -> None:
    print(json.dumps(obj, separators=(", ", ": ")))


class _Parser(argparse.ArgumentParser):
    """ArgumentParser with the documented usage exit code (3)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _odd_int(text: str) -> int:
    value = int(text)
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"must be an odd integer >= 1, got {text}")
    return value


def _connectivity_arg(text: str) -> int:
    value = int(text)
    if value not in (4, 8):
        raise argparse.ArgumentTypeError(f"must be 4 or 8, got {text}")
    return value


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return value


def _wxh(text: str) -> tuple[int, int]:
    try:
        w_text, h_text = text.lower().split("x")
        w, h = int(w_text), int(h_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be >= 1, got {text!r}")
    return w, h


def _read_mask_any(path) -> np.ndarray:
    """Read an 8-bit or 16-bit PGM and flatten it to a boolean mask."""
    data = Path(path).read_bytes()
    _, _, maxval, _ = raster_io._parse_pgm_header(data)
    if maxval == 255:
        return read_gray(path) > 0
    if maxval == 65535:
        return read_label(path) > 0
    raise raster_io.MaxvalError(f"unsupported maxval {maxval}", offset=2)


def _split_one(task: dict) -> tuple[str, int, bool]:
    prob = read_pmap(task["input"])
    target_w, target_h = task["target"] or (prob.shape[1], prob.shape[0])
    if task["threshold"] is None:
        cfg = PipelineConfig(
            se_size=task["se_size"],
            erosion_passes=task["erosions"],
            min_area=task["min_area"],
            connectivity=task["connectivity"],
            target_w=target_w,
            target_h=target_h,
        )
        result = split_instances(prob, cfg, trace_dir=task["trace_dir"])
        labels, count, degenerate = result.labels, result.n_instances, result.degenerate
    else:
        resized = lanczos_resize(prob, target_w, target_h)
        mask = binarize_fixed(resized, task["threshold"])
        labels = label_components(mask, task["min_area"], task["connectivity"])
        count, degenerate = int(labels.max(initial=0)), False
    write_label(labels, task["output"])
    return task["input"], count, degenerate


def _cmd_split(args) -> int:
    inputs = [str(p) for p in args.inputs]
    single = len(inputs) == 1
    out = Path(args.output)
    if single and not out.is_dir():
        outputs = [out]
    else:
        out.mkdir(parents=True, exist_ok=True)
        outputs = [out / (Path(p).stem + ".pgm") for p in inputs]

    tasks = []
    for src, dst in zip(inputs, outputs):
        trace = None
        if args.trace_dir is not None:
            trace = Path(args.trace_dir) if single else Path(args.trace_dir) / Path(src).stem
        tasks.append({
            "input": src,
            "output": str(dst),
            "trace_dir": str(trace) if trace is not None else None,
            "target": args.target_size,
            "se_size": args.se_size,
            "erosions": args.erosions,
            "min_area": args.min_area,
            "connectivity": args.connectivity,
            "threshold": args.threshold,
        })

    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_split_one, tasks))
    else:
        results = [_split_one(t) for t in tasks]

    for source, count, degenerate in results:
        record = {"count": count, "degenerate": degenerate}
        if not single:
            record = {"input": source, **record}
        _emit(record)
    return 0


def _eval_pair(pred_path, truth_path):
    pred = _read_mask_any(pred_path)
    truth = _read_mask_any(truth_path)
    return compute_metrics(confusion(pred, truth))


def _cmd_eval(args) -> int:
    if args.manifest is not None:
        pairs = []
        with open(args.manifest, newline="") as fh:
            for row in csv.reader(fh):
                if not row or not "".join(row).strip():
                    continue
                if len(row) != 2:
                    raise ValueError(f"manifest row must be 'pred,truth', got {row!r}")
                pairs.append((row[0].strip(), row[1].strip()))
        if not pairs:
            raise ValueError("manifest is empty")
        reports = [_eval_pair(p, t) for p, t in pairs]
        if args.csv:
            print(",".join(METRIC_NAMES))
            for report in reports:
                print(report.as_csv_row())
        else:
            aggregate = {name: agg.as_dict() for name, agg in aggregate_folds(reports).items()}
            _emit({"folds": [r.as_dict() for r in reports], "aggregate": aggregate})
    else:
        if args.pred is None or args.truth is None:
            raise FormatUsage("eval needs PRED and TRUTH paths, or --manifest")
        report = _eval_pair(args.pred, args.truth)
        if args.csv:
            print(",".join(METRIC_NAMES))
            print(report.as_csv_row())
        else:
            _emit(report.as_dict())
    return 0


def _cmd_count_error(args) -> int:
    actual, predicted = [], []
    with open(args.manifest, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ValueError(f"manifest row must be 'truth_count,predicted_path', got {row!r}")
            actual.append(int(row[0]))
            labels = read_label(row[1].strip())
            predicted.append(int(np.count_nonzero(np.unique(labels))))
    if not actual:
        raise ValueError("manifest is empty")
    _emit({"mape_percent": mape(actual, predicted), "n": len(actual)})
    return 0


def _cmd_wilcoxon(args) -> int:
    a_values, b_values = [], []
    with open(args.csv, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and "".join(row).strip()]
    if not rows:
        raise ValueError("CSV is empty")
    start = 0
    try:
        float(rows[0][0]), float(rows[0][1])
    except (ValueError, IndexError):
        start = 1  # header row
    for row in rows[start:]:
        if len(row) < 2:
            raise ValueError(f"expected two columns, got {row!r}")
        a_values.append(float(row[0]))
        b_values.append(float(row[1]))
    if not a_values:
        raise ValueError("CSV has no data rows")
    result = wilcoxon_signed_rank(a_values, b_values)
    record = result.as_dict()
    record["alpha"] = args.alpha
    record["significant"] = bool(result.p_two_sided < args.alpha)
    _emit(record)
    return 0


def _cmd_phantom(args) -> int:
    spec = PhantomSpec(
        width=args.width,
        height=args.height,
        n_blobs=args.blobs,
        blob_peak=args.peak,
        blob_sigma=args.sigma,
        bridge_value=args.bridge,
        noise_amplitude=args.noise,
        seed=args.seed,
    )
    pair = generate(spec)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    raster_io.write_pmap(pair.map, out / "phantom.pmap")
    write_label(pair.truth_labels, out / "truth.pgm")
    (out / "phantom.json").write_text(json.dumps(spec.as_dict(), separators=(", ", ": ")) + "\n")
    _emit({"output_dir": str(out), "truth_count": pair.truth_count})
    return 0


def _cmd_overlay(args) -> int:
    background = read_gray(args.background)
    labels = read_label(args.labels)
    if background.shape != labels.shape:
        raise ValueError(f"dimensions differ: {background.shape} vs {labels.shape}")
    top = int(labels.max(initial=0))
    lut = np.zeros(top + 1, dtype=np.uint8)
    for k in range(1, top + 1):
        lut[k] = _OVERLAY_BASE + ((k - 1) * _OVERLAY_STEP) % _OVERLAY_SPAN
    out = np.where(labels > 0, lut[labels], background).astype(np.uint8)
    raster_io.write_gray(out, args.output)
    _emit({"output": str(args.output), "n_labels": top})
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="instaseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    split = sub.add_parser("split", help="split a probability map into labeled instances")
    split.add_argument("inputs", nargs="+", metavar="PMAP")
    split.add_argument("-o", "--output", required=True,
                       help="output label PGM (single input) or directory (multiple inputs)")
    split.add_argument("--target-size", type=_wxh, default=None, metavar="WxH",
                       help="resize target; defaults to the map's own dimensions")
    split.add_argument("--se-size", type=_odd_int, default=5)
    split.add_argument("--erosions", type=_nonneg_int, default=2)
    split.add_argument("--min-area", type=_nonneg_int, default=2000)
    split.add_argument("--connectivity", type=_connectivity_arg, default=8)
    split.add_argument("--threshold", type=_unit_float, default=None,
                       help="skip the morphology chain and binarize at this fixed level")
    split.add_argument("--trace-dir", default=None,
                       help="write intermediate stage images here")
    split.add_argument("--jobs", type=_positive_int, default=1)
    split.set_defaults(func=_cmd_split)

    ev = sub.add_parser("eval", help="pixel-wise metrics of predicted vs true masks")
    ev.add_argument("pred", nargs="?", default=None)
    ev.add_argument("truth", nargs="?", default=None)
    ev.add_argument("--manifest", default=None, help="CSV of pred,truth path pairs")
    ev.add_argument("--csv", action="store_true",
                    help="emit metric reports as CSV rows instead of JSON")
    ev.set_defaults(func=_cmd_eval)

    ce = sub.add_parser("count-error", help="count MAPE over a manifest of truth_count,predicted_path")
    ce.add_argument("manifest")
    ce.set_defaults(func=_cmd_count_error)

    wx = sub.add_parser("wilcoxon", help="paired signed-rank test on two CSV columns")
    wx.add_argument("csv")
    wx.add_argument("--alpha", type=_unit_float, default=0.01)
    wx.set_defaults(func=_cmd_wilcoxon)

    ph = sub.add_parser("phantom", help="generate a synthetic phantom with ground truth")
    ph.add_argument("-o", "--output", required=True, help="output directory")
    ph.add_argument("--width", type=_positive_int, default=352)
    ph.add_argument("--height", type=_positive_int, default=256)
    ph.add_argument("--blobs", type=_nonneg_int, default=14)
    ph.add_argument("--peak", type=_unit_float, default=0.95)
    ph.add_argument("--sigma", type=float, default=9.0)
    ph.add_argument("--bridge", type=_unit_float, default=0.4)
    ph.add_argument("--noise", type=_unit_float, default=0.02)
    ph.add_argument("--seed", type=_nonneg_int, default=0)
    ph.set_defaults(func=_cmd_phantom)

    ov = sub.add_parser("overlay", help="render labels over a gray background for inspection")
    ov.add_argument("background")
    ov.add_argument("labels")
    ov.add_argument("-o", "--output", required=True)
    ov.set_defaults(func=_cmd_overlay)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatUsage as exc:
        _perror(str(exc))
        return 3
    except OSError as exc:
        _perror(str(exc))
        return 1
    except (FormatError, ValueError) as exc:
        _perror(str(exc))
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
