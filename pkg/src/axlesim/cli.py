"""Command-line front end: simulate, gen-dataset, train, sensitivity, plot.

Every subcommand writes a run manifest (resolved configuration, seeds, tool
version, output paths) before starting long work, so a run can be reproduced
from the manifest alone. Exit codes: 0 success, 2 validation error,
3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .dataset import (INPUT_COLUMNS, TARGET_COLUMNS, generate_dataset,
                      read_dataset_csv, write_dataset_csv)
from .errors import NormalizationError, NumericalError, ValidationError
from .road import RoadSpec, flat_profile, generate_profile, save_profile_csv
from .sdpi import sdpi
from .sensitivity import (compute_sensitivity, read_sensitivity_csv,
                          sensitivity_report, simulator_evaluator,
                          surrogate_evaluator, write_sensitivity_csv)
from .sim import response_metrics, response_to_csv, simulate
from .surrogate import (evaluate, load_checkpoint, read_trace_csv,
                        save_checkpoint, train_surrogate, write_trace_csv)
from .vehicle import default_vehicle

THREAD_CAP_ENV = "AXLESIM_THREADS"


def _workers(requested: int) -> int:
    cap = os.environ.get(THREAD_CAP_ENV)
    workers = max(1, int(requested))
    if cap:
        workers = min(workers, max(1, int(cap)))
    return workers


def _ensure_outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _asdict(obj):
    if dataclasses.is_dataclass(obj):
        return {k: _asdict(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (list, tuple)):
        return [_asdict(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _asdict(v) for k, v in obj.items()}
    return obj


def write_manifest(out_dir: Path, command: str, cfg: RunConfig,
                   overrides: dict, outputs: dict) -> Path:
    """Everything needed to byte-reproduce the run, written up front."""
    manifest = {
        "tool": "axlesim",
        "version": __version__,
        "command": command,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": {
            "vehicle": _asdict(cfg.vehicle),
            "road": _asdict(cfg.road),
            "sim": _asdict(cfg.sim),
            "sampling": _asdict(cfg.sampling),
            "train": _asdict(cfg.train),
            "arch": _asdict(cfg.arch),
        },
        "overrides": _asdict(overrides),
        "outputs": {k: str(v) for k, v in outputs.items()},
    }
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _road_for(cfg: RunConfig, seed: int | None, flat: bool):
    spec = cfg.road if seed is None else dataclasses.replace(cfg.road, seed=seed)
    needed = cfg.sim.speed * cfg.sim.duration + cfg.vehicle.wheelbase
    if spec.length < needed:
        spec = dataclasses.replace(spec, length=float(np.ceil(needed + 1)))
    if flat:
        return spec, flat_profile(spec.length, spec.spatial_step)
    return spec, generate_profile(spec)


def _metrics_block(metrics, sdpi_text: str) -> str:
    lines = [
        "response metrics (post-warmup)",
        f"  a_rms          : {metrics.a_rms:.17g} m/s^2",
        f"  theta_ddot_rms : {metrics.theta_ddot_rms:.17g} rad/s^2",
        f"  theta_rms      : {metrics.theta_rms:.17g} rad",
        f"  sws_max_sum    : {metrics.sws_max_sum:.17g} m",
        f"  dtl_rms_sum    : {metrics.dtl_rms_sum:.17g} N",
        f"  sdpi           : {sdpi_text}",
    ]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_outdir(args.out)
    road_spec, profile = _road_for(cfg, args.road_seed, args.flat_road)
    cfg = dataclasses.replace(cfg, road=road_spec)
    outputs = {"response": out / "response.csv", "metrics": out / "metrics.txt",
               "road": out / "road.csv"}
    write_manifest(out, "simulate", cfg,
                   {"road_seed": args.road_seed, "flat_road": args.flat_road},
                   outputs)

    resp = simulate(cfg.vehicle, profile, cfg.sim)
    metrics = response_metrics(resp, cfg.sim)

    baseline_vehicle = default_vehicle()
    if cfg.vehicle == baseline_vehicle:
        base_metrics = metrics
    else:
        base_metrics = response_metrics(
            simulate(baseline_vehicle, profile, cfg.sim), cfg.sim)
    try:
        sdpi_text = f"{sdpi(metrics, base_metrics):.17g}"
    except NormalizationError:
        sdpi_text = "undefined (degenerate baseline, e.g. flat road)"

    response_to_csv(resp, outputs["response"])
    save_profile_csv(profile, outputs["road"])
    block = _metrics_block(metrics, sdpi_text)
    outputs["metrics"].write_text(block)
    print(block, end="")
    return 0


def cmd_gen_dataset(args) -> int:
    cfg = load_config(args.config)
    if args.samples is not None:
        cfg = dataclasses.replace(
            cfg, sampling=dataclasses.replace(cfg.sampling, sample_count=args.samples))
    if args.seed is not None:
        cfg = dataclasses.replace(
            cfg, sampling=dataclasses.replace(cfg.sampling, seed=args.seed))
    out = _ensure_outdir(args.out)
    road_spec, profile = _road_for(cfg, args.road_seed, flat=False)
    cfg = dataclasses.replace(cfg, road=road_spec)
    workers = _workers(args.workers)
    outputs = {"dataset": out / "dataset.csv", "report": out / "report.txt"}
    write_manifest(out, "gen-dataset", cfg,
                   {"workers": workers, "road_seed": args.road_seed}, outputs)

    rows, _, report = generate_dataset(cfg.sampling, profile, cfg.sim,
                                       cfg.vehicle, workers=workers)
    write_dataset_csv(rows, outputs["dataset"])
    outputs["report"].write_text(report.render())
    print(report.render(), end="")
    return 0


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    train_cfg = cfg.train
    replace = {}
    if args.epochs is not None:
        replace["epochs"] = args.epochs
    if args.batch is not None:
        replace["batch_size"] = args.batch
    if args.seed is not None:
        replace["seed"] = args.seed
    if replace:
        train_cfg = dataclasses.replace(train_cfg, **replace)
    cfg = dataclasses.replace(cfg, train=train_cfg)

    out = _ensure_outdir(args.out)
    outputs = {"checkpoint": out / "model.ckpt", "trace": out / "trace.csv",
               "report": out / "train_report.txt"}
    write_manifest(out, "train", cfg,
                   {"dataset": args.dataset, "model": args.model}, outputs)

    x, y = read_dataset_csv(args.dataset)
    result = train_surrogate(x, y, train_cfg, kind=args.model,
                             hidden_widths=cfg.arch.hidden_widths,
                             window=cfg.arch.window, stride=cfg.arch.stride)
    save_checkpoint(result.net, outputs["checkpoint"])
    write_trace_csv(result.trace, outputs["trace"])

    lines = [f"trained {args.model} model on {args.dataset}",
             f"  rows: {x.shape[0]}  epochs: {train_cfg.epochs}  "
             f"batch: {train_cfg.batch_size}  seed: {train_cfg.seed}"]
    if result.trace:
        lines.append(f"  final validation MAPE (avg): {result.trace[-1].mape_avg:.6g}")
    if result.test_idx.size:
        report = evaluate(result.net, x[result.test_idx], y[result.test_idx])
        lines.append(f"  test MAPE (avg): {report.mape_avg:.6g}")
        lines.append("  test MAPE per task: "
                     + ", ".join(f"{n}={v:.6g}" for n, v in
                                 zip(TARGET_COLUMNS, report.mape_per_task)))
        lines.append("  test R2 per task:   "
                     + ", ".join(f"{n}={v:.6g}" for n, v in
                                 zip(TARGET_COLUMNS, report.r2_per_task)))
    text = "\n".join(lines) + "\n"
    outputs["report"].write_text(text)
    print(text, end="")
    return 0


def cmd_sensitivity(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_outdir(args.out)
    outputs = {"matrix": out / "sensitivity.csv", "heatmap": out / "heatmap.png",
               "report": out / "report.txt"}
    write_manifest(out, "sensitivity", cfg,
                   {"checkpoint": args.checkpoint, "exact": args.exact,
                    "grid": args.grid, "range": args.range}, outputs)

    if args.exact:
        road_spec, profile = _road_for(cfg, args.road_seed, flat=False)
        evaluator = simulator_evaluator(profile, cfg.sim, cfg.vehicle)
    else:
        evaluator = surrogate_evaluator(load_checkpoint(args.checkpoint))

    matrix = compute_sensitivity(evaluator, cfg.vehicle, ranges=args.range,
                                 grid_points=args.grid)
    write_sensitivity_csv(matrix, outputs["matrix"])
    _render_heatmap(matrix, outputs["heatmap"])
    text = sensitivity_report(matrix)
    outputs["report"].write_text(text)
    print(text, end="")
    return 0


def _render_heatmap(matrix, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.5, 5.5))
    im = ax.imshow(matrix.values, cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(matrix.col_labels)), matrix.col_labels,
                  rotation=30, ha="right")
    ax.set_yticks(range(len(matrix.row_labels)), matrix.row_labels)
    for i in range(len(matrix.row_labels)):
        for j in range(len(matrix.col_labels)):
            v = matrix.values[i, j]
            ax.text(j, i, f"{v:.2f}", ha="center", va="center",
                    color="white" if v < 0.6 else "black", fontsize=8)
    ax.set_title("parameter sensitivity (column-normalized)")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if args.kind == "trace":
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for path in args.inputs:
            epochs, mape_avg, _, _ = read_trace_csv(path)
            ax.plot(epochs, mape_avg, marker="", label=Path(path).stem)
        ax.set_xlabel("epoch")
        ax.set_ylabel("average validation MAPE")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out, dpi=150)
        plt.close(fig)
    elif args.kind == "heatmap":
        _render_heatmap(read_sensitivity_csv(args.inputs[0]), args.out)
    else:  # response
        data = np.genfromtxt(args.inputs[0], delimiter=",", names=True)
        names = data.dtype.names
        t = data["time_s"]
        fig, axes = plt.subplots(3, 1, figsize=(8, 8), sharex=True)
        axes[0].plot(t, data["z_s_m"], label="z_s")
        axes[0].plot(t, data["theta_rad"], label="theta")
        axes[0].set_ylabel("body motion")
        axes[0].legend(loc="upper right", fontsize=8)
        axes[1].plot(t, data["zdd_s_mps2"])
        axes[1].set_ylabel("zdd_s, m/s^2")
        for name in names:
            if name.startswith("dtl"):
                axes[2].plot(t, data[name], label=name, lw=0.7)
        axes[2].set_ylabel("tire load, N")
        axes[2].set_xlabel("time, s")
        axes[2].legend(loc="upper right", fontsize=8)
        fig.tight_layout()
        fig.savefig(args.out, dpi=150)
        plt.close(fig)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axlesim",
        description="Multi-axle half-car suspension dynamics toolkit: "
                    "simulate, build datasets, train surrogates, rank "
                    "parameter sensitivity.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one traversal, export response "
                                        "CSV and the metric summary")
    p.add_argument("--config", help="TOML config file (defaults when omitted)")
    p.add_argument("--road-seed", type=int, default=None,
                   help="override the road realization seed")
    p.add_argument("--flat-road", action="store_true",
                   help="drive a perfectly smooth road instead")
    p.add_argument("--out", default="runs/simulate", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-dataset", help="sample vehicle variants and build "
                                           "the input->metric dataset CSV")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--samples", type=int, default=None,
                   help="override sampling.sample_count")
    p.add_argument("--seed", type=int, default=None, help="override sampling seed")
    p.add_argument("--road-seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1,
                   help=f"concurrent simulations (capped by ${THREAD_CAP_ENV})")
    p.add_argument("--out", default="runs/dataset", help="output directory")
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("train", help="train the multitask surrogate or the "
                                     "fully connected baseline")
    p.add_argument("--dataset", required=True, help="dataset CSV path")
    p.add_argument("--model", choices=("mtl", "dnn"), default="mtl")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="runs/train", help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sensitivity", help="one-at-a-time sweep and heatmap")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--checkpoint", help="trained model checkpoint to evaluate")
    group.add_argument("--exact", action="store_true",
                       help="evaluate with full simulations instead")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--road-seed", type=int, default=None)
    p.add_argument("--grid", type=int, default=11, help="points per parameter sweep")
    p.add_argument("--range", type=float, default=0.3,
                   help="relative sweep half-width around baseline")
    p.add_argument("--out", default="runs/sensitivity", help="output directory")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("plot", help="render static plots from run CSVs")
    p.add_argument("--kind", choices=("trace", "heatmap", "response"), required=True)
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("inputs", nargs="+", help="input CSV file(s)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
