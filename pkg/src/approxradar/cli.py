"""Command-line front end: ``approxradar <subcommand> [flags]``.

Tabular results are CSV, single results JSON. Output goes to ``--output``,
else to ``<output_dir>/<subcommand>.<ext>`` when an output directory is set
(flag, config file or $APPROXRADAR_OUTPUT_DIR), else to stdout. Failures
exit nonzero and print one JSON error object to stderr.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys

from . import dse
from .config import RunConfig, parse_config
from .errors import ApproxRadarError, ParameterError
from .errstat import CSV_HEADER as METRICS_HEADER, DEFAULT_SAMPLES, eval_metrics
from .fxp import parse_model, parse_pair
from .radar import ESTIMATOR_MODES, PROBE_BLOCKS, resilience_probe, simulate

DEFAULT_SIGMAS = (0.0, 0.05, 0.2, 0.5)


class UsageError(ApproxRadarError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _snr(text: str) -> float:
    v = float(text.replace("−", "-"))
    if math.isnan(v):
        raise argparse.ArgumentTypeError("snr must be a number or inf")
    return v


# -- flag groups -------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", metavar="PATH", help="run config file (key = value lines)")
    p.add_argument("-o", "--output", metavar="PATH", help="write the result to PATH")
    p.add_argument("--output-dir", metavar="DIR", help="directory for the result file")
    p.add_argument("--seed", type=int, help="master seed (default: config or 0)")


def _scene(p):
    p.add_argument("--range", dest="range_m", type=float, metavar="M", help="target range in metres")
    p.add_argument("--velocity", dest="velocity_mps", type=float, metavar="MPS",
                   help="target radial velocity in m/s")
    p.add_argument("--mode", dest="estimator_mode", choices=ESTIMATOR_MODES,
                   help="periodogram construction")
    p.add_argument("--twiddle-sign", type=int, choices=(1, -1),
                   help="+1 for a true IFFT, -1 for exp(-j2pi/N) twiddles")


def _args_simulate(p):
    _common(p)
    _scene(p)
    p.add_argument("--pair", help="operator pair spec, e.g. loa4+tmul6 (default: first config pair)")
    p.add_argument("--snr", type=_snr, default=math.inf, help="SNR in dB, 'inf' for noiseless")


def _args_sweep(p):
    _common(p)
    _scene(p)
    p.add_argument("--pair", action="append", help="operator pair spec; repeat for several")
    p.add_argument("--snr-start", type=_snr, help="first SNR in dB")
    p.add_argument("--snr-stop", type=_snr, help="last SNR in dB (inclusive)")
    p.add_argument("--snr-step", type=float, help="SNR step in dB")
    p.add_argument("--runs", type=int, help="Monte Carlo runs per (pair, SNR)")


def _args_metrics(p):
    _common(p)
    p.add_argument("--model", action="append", required=True,
                   help="operator token, e.g. loa4, tmul6, fixture:add16se_3BD; repeatable")
    p.add_argument("--kind", choices=("adder", "mult"), help="force adder/multiplier (needed for acc)")
    p.add_argument("--width", type=int, default=16, help="operand width in bits (default 16)")
    p.add_argument("--mode", dest="eval_mode", choices=("exhaustive", "sampled"),
                   help="default: exhaustive up to 10 bits, sampled above")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="pairs drawn in sampled mode")


def _args_pareto(p):
    _common(p)
    p.add_argument("--cost", metavar="CSV", help="cost table (default: config cost_table)")
    p.add_argument("--accuracy", metavar="CSV",
                   help="sweep CSV with deviations (default: bundled fixture accuracy table)")
    p.add_argument("--max-power", type=float, metavar="MW", help="keep points with power < MW")
    p.add_argument("--max-area", type=float, metavar="MM2", help="keep points with area < MM2")
    p.add_argument("--max-dev", type=float, metavar="M", help="keep points with deviation < M")
    p.add_argument("--positive-snr", action="store_true",
                   help="average deviation over SNR > 0 only")
    p.add_argument("--only-passing", action="store_true",
                   help="emit only points that satisfy the constraints")


def _args_probe(p):
    _common(p)
    _scene(p)
    p.add_argument("--pair", help="operator pair spec (default acc+acc)")
    p.add_argument("--block", action="append", choices=PROBE_BLOCKS,
                   help="injection point; repeatable (default: both)")
    p.add_argument("--sigma", action="append", type=float,
                   help="noise standard deviation; repeatable (default 0, 0.05, 0.2, 0.5)")
    p.add_argument("--runs", type=int, help="runs per sigma")


# -- helpers -------------------------------------------------------------------------

def _load(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig()
    radar_over = {k: getattr(args, k) for k in ("estimator_mode", "twiddle_sign")
                  if getattr(args, k, None) is not None}
    target_over = {k: getattr(args, k) for k in ("range_m", "velocity_mps")
                   if getattr(args, k, None) is not None}
    radar = dataclasses.replace(cfg.radar, **radar_over)
    target = dataclasses.replace(cfg.target, **target_over)
    target.validate(radar)
    top = {"radar": radar, "target": target}
    if args.seed is not None:
        top["seed"] = args.seed
    if args.output_dir:
        top["output_dir"] = args.output_dir
    return dataclasses.replace(cfg, **top)


def _emit(args, cfg: RunConfig, name: str, text: str):
    path = args.output
    if not path and cfg.output_dir:
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, name)
    if path:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _finite_or_str(v: float):
    return v if math.isfinite(v) else str(v)


# -- subcommands ---------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _load(args)
    pair = parse_pair(args.pair or cfg.pairs[0])
    _, est = simulate(cfg.radar, cfg.target, pair, args.snr, cfg.seed)
    out = {
        "pair": pair.name,
        "snr_db": _finite_or_str(args.snr),
        "seed": cfg.seed,
        "estimator_mode": cfg.estimator_mode,
        "range_m": est.range_m,
        "peak_bin": est.peak_bin,
        "peak_power_db": _finite_or_str(est.peak_power_db),
        "deviation_m": abs(est.range_m - cfg.target.range_m),
        "cp_exceeded": cfg.target.delay_s(cfg.radar) > cfg.radar.cp_s,
    }
    _emit(args, cfg, "simulate.json", json.dumps(out, indent=2) + "\n")
    return 0


def cmd_profile(args) -> int:
    cfg = _load(args)
    pair = parse_pair(args.pair or cfg.pairs[0])
    profile, _ = simulate(cfg.radar, cfg.target, pair, args.snr, cfg.seed)
    db = profile.power_db()
    rows = [(b, repr(float(r)), repr(float(p)), repr(float(d)))
            for b, (r, p, d) in enumerate(zip(profile.range_axis_m, profile.power, db))]
    _emit(args, cfg, "profile.csv", _csv_text(["bin", "range_m", "power_norm", "power_db"], rows))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    start = cfg.snr_start_db if args.snr_start is None else args.snr_start
    stop = cfg.snr_stop_db if args.snr_stop is None else args.snr_stop
    step = cfg.snr_step_db if args.snr_step is None else args.snr_step
    runs = cfg.runs if args.runs is None else args.runs
    pairs = args.pair or list(cfg.pairs)
    rows = dse.sweep(cfg.radar, cfg.target, pairs, dse.snr_grid(start, stop, step), runs, cfg.seed)
    _emit(args, cfg, "sweep.csv", dse.sweep_csv_text(rows))
    return 0


def cmd_metrics(args) -> int:
    cfg = _load(args)
    mode = args.eval_mode or ("exhaustive" if args.width <= 10 else "sampled")
    rows = []
    for token in args.model:
        model = parse_model(token, args.kind)
        m = eval_metrics(model, args.width, mode, cfg.seed, args.samples)
        rows.append(m.csv_row())
    _emit(args, cfg, "metrics.csv", _csv_text(METRICS_HEADER, rows))
    return 0


def cmd_pareto(args) -> int:
    cfg = _load(args)
    cost_path = args.cost or cfg.cost_table_path
    if not cost_path:
        raise ParameterError("pareto needs a cost table (--cost or cost_table in the config)")
    costs = dse.read_cost_table(cost_path)
    rows = dse.read_sweep_csv(args.accuracy) if args.accuracy else dse.reference_accuracy()
    window = dse.POSITIVE_SNR if args.positive_snr else None
    points = dse.join_costs(rows, costs, window)
    constraints = dse.Constraints(args.max_power, args.max_area, args.max_dev, window)
    _emit(args, cfg, "pareto.json", dse.design_points_json(points, constraints, args.only_passing))
    return 0


def cmd_probe(args) -> int:
    cfg = _load(args)
    pair = parse_pair(args.pair) if args.pair else None
    runs = cfg.runs if args.runs is None else args.runs
    blocks = args.block or list(PROBE_BLOCKS)
    sigmas = args.sigma or list(DEFAULT_SIGMAS)
    rows = []
    for block in blocks:
        for sigma in sigmas:
            kw = {"pair": pair} if pair else {}
            dev = resilience_probe(cfg.radar, cfg.target, block, sigma, runs, cfg.seed, **kw)
            rows.append((block, repr(float(sigma)), runs, repr(dev)))
    _emit(args, cfg, "probe.csv", _csv_text(["block", "sigma", "runs", "mean_abs_dev_m"], rows))
    return 0


COMMANDS = {
    "simulate": (cmd_simulate, _args_simulate, "one noisy/noiseless range estimate as JSON"),
    "profile": (cmd_profile, _args_simulate, "range profile CSV: bin,range_m,power_norm,power_db"),
    "sweep": (cmd_sweep, _args_sweep, "Monte Carlo accuracy CSV over pairs and SNRs"),
    "metrics": (cmd_metrics, _args_metrics, "operator error metrics CSV (EP, MAE, WCE, MRE)"),
    "pareto": (cmd_pareto, _args_pareto, "design points with Pareto and constraint flags as JSON"),
    "probe": (cmd_probe, _args_probe, "error-resilience probe CSV"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="approxradar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, add_args, help_text) in COMMANDS.items():
        add_args(sub.add_parser(name, help=help_text, description=help_text))
    return parser


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 2


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command][0](args)
    except ApproxRadarError as exc:
        return _fail(type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail("OSError", str(exc))


if __name__ == "__main__":
    sys.exit(main())
