"""Command-line entry point: ``sqgfront <command> [options]``.

Exit status: 0 when the run completed, 2 when it ended on a suspected
singularity (output is still written), 1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, SimConfig, build_config, load_config
from .diagnostics import CSV_COLUMNS, record
from .evolve import ARC_CHORD_BLOWUP, SPEED_DEGENERATE, run
from .experiments import convergence_study, twin_run
from .io import (
    SnapshotError,
    read_snapshot,
    write_diagnostics_csv,
    write_json,
    write_snapshot,
    write_twin_csv,
)
from .reparam import regularize

log = logging.getLogger("sqgfront")

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR = 0, 1, 2
SINGULAR_REASONS = (ARC_CHORD_BLOWUP, SPEED_DEGENERATE)

# config keys exposed as --flags (dashes on the command line)
_CONFIG_FLAGS = ("scenario", "n", "dt", "t_end", "s", "filter_level", "reparam_trigger",
                 "f_threshold", "cfl", "record_interval", "snapshot_interval", "max_steps",
                 "output_dir", "seed", "threads")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_config_args(p):
    p.add_argument("--config", help="key = value configuration file")
    for key in _CONFIG_FLAGS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="scenario parameter (repeatable)")


def _config_from_args(args) -> SimConfig:
    values = load_config(args.config) if args.config else {}
    for key in _CONFIG_FLAGS:
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"param: expected NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        values["param." + name.strip()] = value
    return build_config(values)


def _output_dir(config: SimConfig, override=None) -> Path:
    out = Path(override) if override else config.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    config = _config_from_args(args)
    out = _output_dir(config)
    result = run(config)
    write_diagnostics_csv(out / "diagnostics.csv", result.records)
    snaps = out / "snapshots"
    snaps.mkdir(exist_ok=True)
    t0 = result.snapshots[0].time
    for curve in result.snapshots:
        k = round((curve.time - t0) / result.dt) if result.dt else 0
        write_snapshot(snaps / f"snapshot_{k:08d}.txt", curve, config.s)
    write_json(out / "summary.json", {
        "reason": result.reason, "message": result.message, "steps": result.steps,
        "dt": result.dt, "reparam_count": result.reparam_count,
        "final_time": result.final.time,
    })
    print(f"{result.reason}: {result.steps} steps, dt = {result.dt!r}, output in {out}")
    return EXIT_SINGULAR if result.reason in SINGULAR_REASONS else EXIT_OK


def cmd_diagnose(args) -> int:
    curve, meta = read_snapshot(args.snapshot)
    s = float(args.s) if args.s is not None else meta["s"]
    rec = record(curve, s=s, threads=int(args.threads))
    if args.output:
        write_diagnostics_csv(args.output, [rec])
    else:
        print(",".join(CSV_COLUMNS))
        print(",".join(repr(float(v)) for v in rec.as_row()))
    return EXIT_OK


def cmd_twin(args) -> int:
    config = _config_from_args(args)
    out = _output_dir(config)
    rep = twin_run(config, float(args.delta), int(args.mode))
    write_twin_csv(out / "twin.csv", rep)
    write_json(out / "twin_fit.json", {
        "delta": float(args.delta), "mode": int(args.mode), "fitted_C": rep.fitted_C,
        "intercept": rep.intercept, "fit_residual": rep.fit_residual,
        "reason": rep.reason, "message": rep.message, "dt": rep.dt,
    })
    print(f"{rep.reason}: fitted C = {rep.fitted_C!r}, log residual = {rep.fit_residual!r}")
    return EXIT_SINGULAR if rep.reason in SINGULAR_REASONS else EXIT_OK


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_converge(args) -> int:
    params = {}
    for item in args.param:
        name, _, value = item.partition("=")
        params[name.strip()] = float(value)
    rep = convergence_study(args.scenario, [int(v) for v in _float_list(args.n_list)],
                            _float_list(args.dt_list), float(args.t_end), params,
                            threads=int(args.threads))
    out = Path(args.output_dir) if args.output_dir else SimConfig().resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "orders.json", rep.as_dict())
    print(f"spatial orders {rep.spatial_orders}, temporal orders {rep.temporal_orders}")
    return EXIT_OK


def cmd_reparam(args) -> int:
    curve, meta = read_snapshot(args.snapshot)
    out = regularize(curve, float(args.eps))
    target = Path(args.output) if args.output else Path(args.snapshot).with_suffix(".reparam.txt")
    write_snapshot(target, out, meta["s"])
    print(f"wrote {target}")
    return EXIT_OK


_PLOT_TEMPLATE = '''"""Plot {title} from {csv_name}."""
import csv
import matplotlib.pyplot as plt

with open({csv_name!r}) as fh:
    rows = list(csv.DictReader(fh))
t = [float(r[{x!r}]) for r in rows]
columns = {columns!r}
fig, axes = plt.subplots(len(columns), 1, sharex=True, squeeze=False,
                         figsize=(6, 2 * len(columns)))
for ax, col in zip(axes[:, 0], columns):
    ax.plot(t, [float(r[col]) for r in rows])
    ax.set_ylabel(col)
    ax.set_yscale({scale!r})
axes[-1, 0].set_xlabel({x!r})
fig.tight_layout()
fig.savefig({png!r})
'''


def cmd_plot(args) -> int:
    out = Path(args.output_dir) if args.output_dir else SimConfig().resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if (out / "diagnostics.csv").exists() or args.force:
        cols = ["F_max", "speed_variation", "h2s_norm", "lambda_sup", "area", "perimeter"]
        (out / "plot_diagnostics.py").write_text(_PLOT_TEMPLATE.format(
            title="diagnostics", csv_name="diagnostics.csv", x="time",
            columns=cols, png="diagnostics.png", scale="linear"))
        written.append("plot_diagnostics.py")
    if (out / "twin.csv").exists() or args.force:
        cols = ["d_h1", "d_speed", "d_total"]
        (out / "plot_twin.py").write_text(_PLOT_TEMPLATE.format(
            title="twin-run distances", csv_name="twin.csv", x="time",
            columns=cols, png="twin.png", scale="log"))
        written.append("plot_twin.py")
    if not written:
        print(f"no CSV files found in {out}", file=sys.stderr)
        return EXIT_USAGE
    print("wrote " + ", ".join(written))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqgfront", description="SQG sharp-front contour dynamics")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="evolve a scenario")
    _add_config_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diagnose", help="diagnostics record for a snapshot file")
    p.add_argument("snapshot")
    p.add_argument("--s", default=None)
    p.add_argument("--threads", default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("twin", help="twin-run stability experiment")
    _add_config_args(p)
    p.add_argument("--delta", default=1e-6)
    p.add_argument("--mode", default=2)
    p.set_defaults(func=cmd_twin)

    p = sub.add_parser("converge", help="spatial and temporal self-convergence")
    p.add_argument("--scenario", default="perturbed_circle")
    p.add_argument("--n-list", default="32,64,128")
    p.add_argument("--dt-list", default="2e-3,1e-3,5e-4")
    p.add_argument("--t-end", default=0.1)
    p.add_argument("--param", action="append", default=[])
    p.add_argument("--threads", default=1)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("reparam", help="mollify and reproject a snapshot")
    p.add_argument("snapshot")
    p.add_argument("--eps", default=0.0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_reparam)

    p = sub.add_parser("plot", help="write plotting scripts next to the CSV output")
    p.add_argument("--output-dir")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if not getattr(args, "func", None):
            raise UsageError("a command is required (run, diagnose, twin, converge, reparam, plot)")
        return args.func(args)
    except (UsageError, ConfigError, SnapshotError, ValueError, OSError) as exc:
        print(f"sqgfront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
