"""Command line entry point.

Exit status: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""

import argparse
import json
import os
import sys

from .config import load_config
from .data import save_dataset
from .errors import ConfigError, DataError, HyperballError
from .evaluation import (
    cooccurrence_analysis,
    export_response_map,
    mean_ap,
    write_correlation,
    write_response_map,
)
from .projector import load_model, save_model
from .train import dataset_for, split_for, train

METRICS_HEADER = "epoch,cls,reg,uni,total\n"


def _config(args):
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
        if "synth" in cfg.data:
            cfg.data["synth"]["seed"] = args.seed
    return cfg


def cmd_gen_data(args):
    cfg = _config(args)
    synth = cfg.synth()
    if synth is None:
        raise ConfigError("gen-data needs a 'data.synth' section in the config")
    from .data import generate_synthetic

    ds = generate_synthetic(synth)
    try:
        paths = save_dataset(ds, args.out)
    except OSError as exc:
        raise ConfigError(f"cannot write to {args.out}: {exc.strerror}") from None
    print(f"K={ds.num_labels} d={ds.feature_dim} S={len(ds)}")
    for key, path in paths.items():
        print(f"{key}: {path}")
    return 0


def cmd_train(args):
    cfg = _config(args)
    files = {"features": args.features, "labels_single": args.labels_single, "labels_full": args.labels_full}
    ds = dataset_for(cfg, files)
    if args.features is None and "synth" in cfg.data:
        ds, _ = split_for(cfg, ds)
    metrics_path = args.metrics or os.path.splitext(args.out)[0] + ".metrics.csv"
    new_file = not os.path.exists(metrics_path) or os.path.getsize(metrics_path) == 0
    with open(metrics_path, "a", encoding="utf-8", newline="") as log:
        if new_file:
            log.write(METRICS_HEADER)

        def on_epoch(epoch, b):
            log.write(f"{epoch},{b.cls!r},{b.reg!r},{b.uni!r},{b.total!r}\n")
            log.flush()

        params, history = train(cfg, ds, on_epoch=on_epoch)
    save_model(params, args.out)
    if history:
        print(f"final epoch total={history[-1].total:.6f}")
    print(f"model: {args.out}")
    return 0


def cmd_eval(args):
    from .data import load_dataset

    params = load_model(args.model)
    single = args.labels_single
    ds = load_dataset(args.features, single, args.labels_full, num_labels=params.K) if single else None
    if ds is None:
        ds = _features_with_full(args.features, args.labels_full, params.K)
    report = mean_ap(params, ds.features, ds.full_labels)
    print(report.to_json())
    return 0


def _features_with_full(features_path, full_path, K):
    """Evaluation input without a single-positive file: synthesise observed labels from the full ones."""
    import numpy as np

    from .data import Dataset, _read_table, _parse_binary, _parse_float

    ids, feats, d = _read_table(features_path, "f", _parse_float)
    fids, rows, K_full = _read_table(full_path, "y", _parse_binary)
    if fids != ids:
        raise DataError(f"row ids of {full_path} do not match {features_path}")
    if K_full != K:
        raise DataError(f"{full_path} has {K_full} label columns, model has K={K}")
    Y = np.asarray(rows, dtype=np.int8).reshape(len(ids), K_full)
    pos = np.argmax(Y, axis=1) if len(ids) else np.zeros(0, dtype=np.int64)
    return Dataset(np.asarray(feats, dtype=np.float64).reshape(len(ids), d), pos, Y, K, tuple(ids))


def cmd_analyze(args):
    import numpy as np

    from .data import _parse_binary, _read_table

    params = load_model(args.model)
    _, rows, K = _read_table(args.labels_full, "y", _parse_binary)
    Y = np.asarray(rows, dtype=np.int8).reshape(len(rows), K)
    report = cooccurrence_analysis(params, Y)
    write_correlation(report, args.out)
    print(f"pearson_r={report.pearson_r!r} num_pairs={report.num_pairs}")
    return 0


def cmd_export_map(args):
    if args.resolution <= 0:
        raise ConfigError(f"--resolution must be positive, got {args.resolution}")
    params = load_model(args.model)
    rows = export_response_map(params, args.label, args.resolution)
    write_response_map(rows, args.out)
    print(f"wrote {rows.shape[0]} rows to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hyperball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic dataset as three CSV files")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a model and write it as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--features")
    p.add_argument("--labels-single")
    p.add_argument("--labels-full")
    p.add_argument("--metrics", help="metrics CSV (default: <out>.metrics.csv)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="print a mAP report as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--labels-full", required=True)
    p.add_argument("--labels-single")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="co-occurrence vs embedding distance")
    p.add_argument("--model", required=True)
    p.add_argument("--labels-full", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export-map", help="2-D response map of one label")
    p.add_argument("--model", required=True)
    p.add_argument("--label", type=int, required=True)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_map)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args)
    except HyperballError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (IndexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
