"""Batch front-end: ``driftsearch <subcommand> --config FILE --out DIR``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import harness, hypergraph, plotting, transport
from .config import DEFAULTS_HELP, ConfigError, ScenarioConfig, parse_config, to_text
from .errors import ConfigurationError, IntegrationError
from .grid import GridSpec
from .util import atomic_write_text, field_csv, ndjson

log = logging.getLogger("driftsearch")

SUBCOMMANDS = ("simulate", "drift", "hypergraph", "delayed", "plot")


def _configure_logging():
    level = os.environ.get("SEARCH_SIM_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")


def _prepare_out(path, overwrite: bool) -> Path:
    out = Path(path)
    if out.exists() and any(out.iterdir()) and not overwrite:
        raise ConfigurationError(f"output directory {out} is not empty (use --overwrite)")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> ScenarioConfig:
    cfg = parse_config(args.config, overrides=args.set or ())
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _summary(cfg, stats: harness.EnsembleStats, extra=None) -> str:
    counts, edges = stats.histogram()
    doc = {
        "config": to_text(cfg),
        "controller": cfg.controller,
        "n_runs": int(len(stats.final_rates)),
        "mean_final_rate": stats.mean_final,
        "std_final_rate": float(stats.final_rates.std()),
        "histogram": {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]},
        "mean_curve": {"t_hours": [float(t) for t in stats.times],
                       "detected_fraction": [float(f) for f in stats.mean_curve]},
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_ensemble(out: Path, cfg: ScenarioConfig, stats: harness.EnsembleStats):
    rows = [(ep.run_index, t, f) for ep in stats.episodes for t, f in zip(ep.times, ep.detected_fraction)]
    atomic_write_text(out / "success_curve.csv", _csv_text(("run_id", "t_hours", "detected_fraction"), rows))
    atomic_write_text(out / "final_rates.csv",
                      _csv_text(("run_id", "final_fraction"),
                                [(ep.run_index, ep.final_rate) for ep in stats.episodes]))
    atomic_write_text(out / "summary.json", _summary(cfg, stats))
    for ep in stats.episodes:
        run_dir = out / "runs" / f"run_{ep.run_index:03d}"
        atomic_write_text(run_dir / "detections.ndjson", ndjson(ep.detections))
        if ep.trajectories:
            atomic_write_text(run_dir / "trajectories.ndjson", ndjson(ep.trajectories))


def cmd_simulate(args):
    cfg = _load(args)
    out = _prepare_out(args.out, args.overwrite)
    stats = harness.run_ensemble(cfg, jobs=args.jobs)
    write_ensemble(out, cfg, stats)
    log.info("mean final success %.4f over %d runs", stats.mean_final, len(stats.final_rates))
    print(f"{cfg.controller}: mean final success {stats.mean_final:.4f} over {len(stats.final_rates)} runs")


def cmd_drift(args):
    cfg = _load(args)
    out = _prepare_out(args.out, args.overwrite)
    vel = harness.velocity_for(cfg.flow)
    grid = GridSpec(cfg.domain, cfg.nx, cfg.ny)
    ens = transport.seed_regions(harness.splash_regions(cfg), cfg.n_tracers)
    times = sorted(float(t) for t in args.times.split(",")) if args.times else [ens.epoch]
    for t in times:
        if t < ens.epoch:
            raise ConfigurationError(f"snapshot time {t} precedes the splash time {ens.epoch}")
        ens = transport.advect(ens, vel, t, domain=cfg.domain, tol=cfg.tol_km)
        tag = f"t{t:g}h"
        ens.save_csv(out / f"tracers_{tag}.csv")
        atomic_write_text(out / f"density_{tag}.csv", field_csv(transport.density(ens, grid, cfg.bandwidth_km)))
    print(f"wrote {len(times)} snapshots to {out}")


def cmd_hypergraph(args):
    cfg = _load(args)
    out = _prepare_out(args.out, args.overwrite)
    vel = harness.velocity_for(cfg.flow)
    grid = GridSpec(cfg.domain, cfg.nx, cfg.ny)
    hg = hypergraph.classify(vel, cfg.domain, grid, args.t1, args.t2, args.h, cfg.tol_km)
    hg.save_csv(out / "hypergraph.csv")
    xy = grid.centers().reshape(-1, 2)
    names = np.where(hg.labels.reshape(-1) == hypergraph.MESOHYPERBOLIC, "mesohyperbolic", "mesoelliptic")
    plotting.hypergraph_svg(out / "hypergraph.svg", xy[:, 0], xy[:, 1], names,
                            title=f"mixing classes over [{args.t1:g}, {args.t2:g}] h")
    print(f"mesohyperbolic fraction {hg.hyperbolic_fraction:.4f}")


def cmd_delayed(args):
    cfg = _load(args)
    out = _prepare_out(args.out, args.overwrite)
    offsets = [float(o) for o in args.offsets.split(",")]
    cmp = harness.delayed_start_experiment(cfg, offsets, jobs=args.jobs)
    curve_rows = []
    for o, st, rel in zip(cmp.offsets, cmp.stats, cmp.relative_times):
        curve_rows += [(o, t, f) for t, f in zip(rel, st.mean_curve)]
    atomic_write_text(out / "delayed_curves.csv",
                      _csv_text(("offset_days", "t_rel_hours", "mean_detected_fraction"), curve_rows))
    daily_rows = [(o, j, cmp.daily_success[i, j], cmp.daily_delta[i, j])
                  for i, o in enumerate(cmp.offsets) for j in range(cmp.daily_success.shape[1])]
    atomic_write_text(out / "delayed_daily.csv",
                      _csv_text(("offset_days", "day_index", "daily_success", "delta_vs_first"), daily_rows))
    finals = {repr(o): st.mean_final for o, st in zip(cmp.offsets, cmp.stats)}
    atomic_write_text(out / "summary.json", json.dumps(
        {"config": to_text(cfg), "offsets_days": cmp.offsets, "mean_final_rate": finals}, indent=2) + "\n")
    for o, st in zip(cmp.offsets, cmp.stats):
        print(f"offset {o:g} d: mean final success {st.mean_final:.4f}")


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _read_ndjson(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def cmd_plot(args):
    src = Path(args.input or args.out)
    if not src.is_dir():
        raise ConfigurationError(f"{src} is not a directory of prior outputs")
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    made = []
    if (src / "success_curve.csv").exists():
        rows = _read_csv(src / "success_curve.csv")
        runs = {}
        for r in rows:
            runs.setdefault(r["run_id"], ([], []))
            runs[r["run_id"]][0].append(float(r["t_hours"]))
            runs[r["run_id"]][1].append(float(r["detected_fraction"]))
        t = np.array(next(iter(runs.values()))[0])
        mean = np.mean([v[1] for v in runs.values()], axis=0)
        plotting.curves_svg(dest / "success_curve.svg", {"ensemble mean": (t, mean)})
        made.append("success_curve.svg")
    if (src / "final_rates.csv").exists():
        finals = [float(r["final_fraction"]) for r in _read_csv(src / "final_rates.csv")]
        plotting.histogram_svg(dest / "final_rates.svg", {"runs": finals})
        made.append("final_rates.svg")
    if (src / "delayed_curves.csv").exists():
        series = {}
        for r in _read_csv(src / "delayed_curves.csv"):
            s = series.setdefault(f"{float(r['offset_days']):g}-day delay", ([], []))
            s[0].append(float(r["t_rel_hours"]))
            s[1].append(float(r["mean_detected_fraction"]))
        plotting.curves_svg(dest / "delayed_curves.svg", series, xlabel="hours since first window")
        made.append("delayed_curves.svg")
    if (src / "hypergraph.csv").exists():
        rows = _read_csv(src / "hypergraph.csv")
        plotting.hypergraph_svg(dest / "hypergraph.svg", [float(r["x_km"]) for r in rows],
                                [float(r["y_km"]) for r in rows], [r["label"] for r in rows])
        made.append("hypergraph.svg")
    for dens in sorted(src.glob("density_*.csv")):
        rows = _read_csv(dens)
        plotting.field_svg(dest / (dens.stem + ".svg"), [float(r["x_km"]) for r in rows],
                           [float(r["y_km"]) for r in rows], [float(r["value"]) for r in rows],
                           title=dens.stem, label="probability density [1/km^2]")
        made.append(dens.stem + ".svg")
    for run_dir in sorted((src / "runs").glob("run_*")) if (src / "runs").is_dir() else []:
        traj = run_dir / "trajectories.ndjson"
        if traj.exists():
            det = run_dir / "detections.ndjson"
            name = f"{run_dir.name}_paths.svg"
            plotting.trajectories_svg(dest / name, _read_ndjson(traj),
                                      _read_ndjson(det) if det.exists() else ())
            made.append(name)
    if not made:
        raise ConfigurationError(f"nothing to plot in {src}")
    print("wrote " + ", ".join(made))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftsearch", description="Multi-agent search over drifting target distributions.",
        epilog=DEFAULTS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="scenario file ([section] key = value)")
            p.add_argument("--seed", type=int, help="override the config seed")
            p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                           help="override a config value (repeatable)")
            p.add_argument("--jobs", type=int, default=1, help="concurrent episodes")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--overwrite", action="store_true", help="allow a non-empty output directory")

    p = sub.add_parser("simulate", help="Monte Carlo ensemble of search missions",
                       epilog=DEFAULTS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("drift", help="tracer and density snapshots of the drifting distribution")
    common(p)
    p.add_argument("--times", help="comma-separated snapshot times in hours")
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("hypergraph", help="finite-time mixing classes over [t1, t2]")
    common(p)
    p.add_argument("--t1", type=float, default=0.0)
    p.add_argument("--t2", type=float, required=True)
    p.add_argument("--h", type=float, default=0.5, help="finite-difference stencil [km]")
    p.set_defaults(func=cmd_hypergraph)

    p = sub.add_parser("delayed", help="ensembles with the schedule delayed by each offset")
    common(p)
    p.add_argument("--offsets", default="0,5,10", help="comma-separated delays in days")
    p.set_defaults(func=cmd_delayed)

    p = sub.add_parser("plot", help="SVG renders of prior outputs")
    common(p, config=False)
    p.add_argument("--input", help="directory of prior outputs (default: --out)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in SUBCOMMANDS + ("-h", "--help"):
        parser.print_usage(sys.stderr)
        print(f"driftsearch: error: expected a subcommand, one of {', '.join(SUBCOMMANDS)}",
              file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if getattr(args, "jobs", 1) < 1:
        print("driftsearch: error: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (ConfigError, ConfigurationError, IntegrationError, ValueError) as exc:
        print(f"driftsearch {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
