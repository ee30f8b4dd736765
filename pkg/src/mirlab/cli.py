"""Command-line pipeline: data generation, training, evaluation, reports.

Subcommands: gen-data | train | eval-reachability | eval-imitate | report.
Options come from an optional JSON config file (one section per
subcommand) overridden by command-line flags; every run writes a
``manifest.json`` with the fully resolved configuration so any artifact
can be regenerated bit-identically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, Optional


def _cap_threads() -> None:
    """MIRLAB_THREADS caps numeric thread pools (set before numpy loads)."""
    threads = os.environ.get("MIRLAB_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


DEFAULTS: Dict[str, Dict] = {
    "gen-data": {"episodes": 64, "seed": 0, "out": "data.mird"},
    "train": {
        "loss": "mir",
        "data": "data.mird",
        "steps": 2000,
        "seed": 0,
        "learning_rate": 1e-3,
        "log_every": 100,
        "lambda_cdgcp": 1.0,
        "out": "model.mirm",
        "metrics": "metrics.csv",
    },
    "eval-reachability": {
        "model": "model.mirm",
        "data": "data.mird",
        "demos": 10,
        "out": "reachability.csv",
        "curves_prefix": "reachability_curve",
    },
    "eval-imitate": {
        "models": ".",
        "methods": "mir",
        "domains": "invisible",
        "data": "data.mird",
        "attempts": 100,
        "smoke": False,
        "stride": 8,
        "epsilon": 0.3,
        "seed": 0,
        "out": "report.csv",
        "summary": "report.json",
    },
    "report": {
        "kind": "loss",
        "csv": "metrics.csv",
        "out": "plot.svg",
        "model": "model.mirm",
        "data": "data.mird",
        "demos": 10,
    },
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mirlab",
        description="paired-trajectory representation learning lab",
    )
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--out-dir", default=".", help="directory for all artifacts")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate a paired trajectory dataset")
    g.add_argument("--episodes", type=int, help="episodes per domain pairing")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output MIRD file")

    t = sub.add_parser("train", help="train a representation")
    t.add_argument("--loss", help="tcn|tscn|gcp|cdgcp|mir|tdc|cmc")
    t.add_argument("--data", help="input MIRD file")
    t.add_argument("--steps", type=int)
    t.add_argument("--seed", type=int)
    t.add_argument("--learning-rate", type=float, dest="learning_rate")
    t.add_argument("--log-every", type=int, dest="log_every")
    t.add_argument("--lambda-cdgcp", type=float, dest="lambda_cdgcp")
    t.add_argument("--out", help="output MIRM checkpoint")
    t.add_argument("--metrics", help="output metrics CSV")

    r = sub.add_parser("eval-reachability", help="rank-correlation analysis")
    r.add_argument("--model", help="MIRM checkpoint")
    r.add_argument("--data", help="MIRD file with holdout demos")
    r.add_argument("--demos", type=int, help="number of holdout demos")
    r.add_argument("--out", help="per-demo correlation CSV")
    r.add_argument("--curves-prefix", dest="curves_prefix",
                   help="prefix for per-demo curve CSVs")

    e = sub.add_parser("eval-imitate", help="goal tracking with lift/stack scoring")
    e.add_argument("--models", help="directory containing <method>.mirm files")
    e.add_argument("--methods", help="comma-separated method list")
    e.add_argument("--domains", help="comma-separated: invisible,stick,blobhand")
    e.add_argument("--data", help="MIRD file providing holdout demos")
    e.add_argument("--attempts", type=int)
    e.add_argument("--smoke", action="store_true", default=None,
                   help="quick mode: 10 attempts per demo")
    e.add_argument("--stride", type=int)
    e.add_argument("--epsilon", type=float)
    e.add_argument("--seed", type=int)
    e.add_argument("--out", help="report CSV")
    e.add_argument("--summary", help="report JSON")

    o = sub.add_parser("report", help="SVG plots and embedding exports")
    o.add_argument("--kind", help="reachability|loss|success|embeddings")
    o.add_argument("--csv", help="input CSV (plot kinds)")
    o.add_argument("--out", help="output SVG (plots) or CSV (embeddings)")
    o.add_argument("--model", help="MIRM checkpoint (embeddings kind)")
    o.add_argument("--data", help="MIRD file (embeddings kind)")
    o.add_argument("--demos", type=int, help="holdout demos to embed")
    return p


def _resolve(args: argparse.Namespace) -> Dict:
    """defaults < config-file section < explicit flags."""
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        with open(args.config) as f:
            file_cfg = json.load(f)
        section = file_cfg.get(args.command, {})
        unknown = set(section) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        cfg.update(section)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _write_manifest(out_dir: str, command: str, cfg: Dict) -> None:
    from . import __version__

    manifest = {"tool": "mirlab", "version": __version__,
                "command": command, "config": cfg}
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _cmd_gen_data(cfg: Dict, out_dir: str) -> None:
    from .data import build_dataset, save

    dataset = build_dataset(n_episodes_per_pairing=cfg["episodes"], seed=cfg["seed"])
    save(dataset, os.path.join(out_dir, cfg["out"]))
    print(f"wrote {len(dataset.trajectories)} paired trajectories to {cfg['out']}")


def _cmd_train(cfg: Dict, out_dir: str) -> None:
    from .data import load
    from .models import TrainConfig, save_model, train, write_metrics_csv

    dataset = load(os.path.join(out_dir, cfg["data"]))
    result = train(dataset, TrainConfig(
        loss_kind=cfg["loss"], steps=cfg["steps"], seed=cfg["seed"],
        learning_rate=cfg["learning_rate"], log_every=cfg["log_every"],
        lambda_cdgcp=cfg["lambda_cdgcp"],
    ))
    save_model(result.model, os.path.join(out_dir, cfg["out"]))
    write_metrics_csv(result.metrics, os.path.join(out_dir, cfg["metrics"]))
    last = result.metrics[-1] if result.metrics else {}
    status = f"diverged at step {result.diverged_at}" if result.diverged_at is not None \
        else f"finished {cfg['steps']} steps"
    print(f"{cfg['loss']}: {status}; final loss {last.get('loss', float('nan')):.5f}; "
          f"wrote {cfg['out']} and {cfg['metrics']}")


def _holdout_demos(dataset, n: int):
    demos = dataset.split("holdout")[:n]
    if not demos:
        raise ValueError("dataset has no holdout trajectories")
    return demos


def _cmd_eval_reachability(cfg: Dict, out_dir: str) -> None:
    import numpy as np

    from .data import load
    from .evaluation import embodiment_demos, reachability_curve, reachability_eval
    from .errors import ValidationError
    from .models import load_model

    model = load_model(os.path.join(out_dir, cfg["model"]))
    demos = _holdout_demos(load(os.path.join(out_dir, cfg["data"])), cfg["demos"])

    def _curve_csv(path, curve):
        with open(path, "w") as f:
            f.write("frame,normalized_distance\n")
            for t, d in enumerate(curve):
                f.write(f"{t},{d!r}\n")

    rows = []
    for i, traj in enumerate(demos):
        row = {"demo_id": i}
        # same-domain: the stored demo stream
        try:
            row["same_rho"] = repr(reachability_eval(model, traj, cross=False))
            _curve_csv(
                os.path.join(out_dir, f"{cfg['curves_prefix']}_same_{i}.csv"),
                reachability_curve(model, traj, cross=False),
            )
        except ValidationError:
            row["same_rho"] = "undefined"
        # cross-domain: the demo re-rendered in each held-out embodiment
        rhos = []
        for variant in embodiment_demos([traj]):
            kind = variant.domain_kind_b
            try:
                rhos.append(reachability_eval(model, variant, cross=True))
                _curve_csv(
                    os.path.join(
                        out_dir, f"{cfg['curves_prefix']}_cross_{i}_{kind}.csv"),
                    reachability_curve(model, variant, cross=True),
                )
            except ValidationError:
                continue
        row["cross_rho"] = repr(float(np.mean(rhos))) if rhos else "undefined"
        rows.append(row)
    with open(os.path.join(out_dir, cfg["out"]), "w") as f:
        f.write("demo_id,same_rho,cross_rho\n")
        for row in rows:
            f.write(f"{row['demo_id']},{row['same_rho']},{row['cross_rho']}\n")
    print(f"wrote {cfg['out']} and per-demo curves for {len(rows)} demos")


def _cmd_eval_imitate(cfg: Dict, out_dir: str) -> None:
    from .data import load
    from .evaluation import EvalReport, imitation_eval
    from .models import load_model

    attempts = 10 if cfg["smoke"] else cfg["attempts"]
    methods = [m for m in cfg["methods"].split(",") if m]
    domains = [d for d in cfg["domains"].split(",") if d]
    demos = _holdout_demos(load(os.path.join(out_dir, cfg["data"])), 10)
    report = EvalReport()
    for method in methods:
        model = load_model(os.path.join(out_dir, cfg["models"], f"{method}.mirm"))
        for domain in domains:
            imitation_eval(
                model, demos, domain, attempts=attempts, method=method,
                stride=cfg["stride"], epsilon=cfg["epsilon"], seed=cfg["seed"],
                report=report,
            )
            print(f"{method}/{domain}: lift {report.rate(method, domain, 'lift_rate'):.2f} "
                  f"stack {report.rate(method, domain, 'stack_rate'):.2f}")
    report.to_csv(os.path.join(out_dir, cfg["out"]))
    report.to_json(os.path.join(out_dir, cfg["summary"]))
    print(f"wrote {cfg['out']} and {cfg['summary']} "
          f"({len(report.rows)} rows, {attempts} attempts each)")


def _cmd_report(cfg: Dict, out_dir: str) -> None:
    if cfg["kind"] == "embeddings":
        from .data import dequantize, load
        from .models import load_model

        model = load_model(os.path.join(out_dir, cfg["model"]))
        demos = _holdout_demos(load(os.path.join(out_dir, cfg["data"])), cfg["demos"])
        dim = model.cfg.embed_dim
        with open(os.path.join(out_dir, cfg["out"]), "w") as f:
            f.write("demo_id,domain,frame," + ",".join(f"e{i}" for i in range(dim)) + "\n")
            for i, traj in enumerate(demos):
                for stream, obs in (("a", traj.obs_a), ("b", traj.obs_b)):
                    emb = model.embed_array(dequantize(obs))
                    for t, row in enumerate(emb):
                        f.write(f"{i},{stream},{t}," +
                                ",".join(repr(v) for v in row) + "\n")
        print(f"wrote frame-by-frame embeddings to {cfg['out']}")
        return
    from .plots import plot

    plot(os.path.join(out_dir, cfg["csv"]), cfg["kind"],
         os.path.join(out_dir, cfg["out"]))
    print(f"wrote {cfg['kind']} plot to {cfg['out']}")


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "eval-reachability": _cmd_eval_reachability,
    "eval-imitate": _cmd_eval_imitate,
    "report": _cmd_report,
}


def main(argv: Optional[list] = None) -> int:
    _cap_threads()
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        os.makedirs(args.out_dir, exist_ok=True)
        _write_manifest(args.out_dir, args.command, cfg)
        _COMMANDS[args.command](cfg, args.out_dir)
    except Exception as e:  # single-line diagnostic, nonzero exit
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
