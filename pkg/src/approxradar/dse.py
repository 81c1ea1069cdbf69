"""
Design-space exploration over operator pairs.

A sweep measures range accuracy per (pair, SNR); a cost table supplies area
and power per pair. Joining the two gives design points that can be filtered
against user constraints and reduced to their Pareto front.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .fxp import OperatorPair, parse_pair
from .radar import RadarConfig, TargetModel, run_pipeline, run_seeds

log = logging.getLogger(__name__)

COST_HEADER = ["pair", "area_mm2", "power_mw", "baseline", "source"]
SWEEP_HEADER = ["pair", "snr_db", "runs", "mean_range_m", "mean_abs_dev_m", "std_m"]


@dataclass(frozen=True)
class CostRecord:
    pair_name: str
    area_mm2: float
    power_mw: float
    baseline: bool = False
    source: str = ""

    def __post_init__(self):
        if not (self.area_mm2 > 0 and self.power_mw > 0):
            raise ParameterError(f"cost record '{self.pair_name}' needs positive area and power")


@dataclass(frozen=True)
class AccuracyRow:
    pair_name: str
    snr_db: float
    runs: int
    mean_range_m: float
    mean_abs_dev_m: float
    std_m: float


@dataclass(frozen=True)
class DesignPoint:
    pair_name: str
    mean_abs_dev_m: float
    area_mm2: float
    power_mw: float

    def objectives(self):
        return (self.mean_abs_dev_m, self.area_mm2, self.power_mw)


@dataclass(frozen=True)
class Constraints:
    max_power_mw: float | None = None
    max_area_mm2: float | None = None
    max_dev_m: float | None = None
    snr_window: tuple[float, float] | None = None

    @property
    def has_bounds(self) -> bool:
        return any(v is not None for v in (self.max_power_mw, self.max_area_mm2, self.max_dev_m))


POSITIVE_SNR = (math.nextafter(0.0, 1.0), math.inf)


# -- accuracy sweep -------------------------------------------------------------

def _as_pair(p) -> OperatorPair:
    return parse_pair(p) if isinstance(p, str) else p


def sweep(cfg: RadarConfig, tgt: TargetModel, pairs: Sequence, snr_grid: Iterable[float],
          runs: int = 100, seed: int = 0) -> list[AccuracyRow]:
    """Monte Carlo range accuracy for every (pair, snr).

    Run ``i`` uses the same frame and noise realization for every pair and
    SNR (common random numbers), so differences between rows come from the
    operators and the noise level only.
    """
    pairs = [_as_pair(p) for p in pairs]
    for p in pairs:
        p.require_functional()
    seeds = run_seeds(seed, runs)
    rows = []
    for pair in pairs:
        for snr in snr_grid:
            est = np.array([run_pipeline(cfg, tgt, pair, float(snr), s).range_m for s in seeds])
            rows.append(AccuracyRow(pair.name, float(snr), runs, float(est.mean()),
                                    float(np.abs(est - tgt.range_m).mean()), float(est.std())))
    return rows


def snr_grid(start_db: float = -5.0, stop_db: float = 10.0, step_db: float = 1.0) -> list[float]:
    """Inclusive SNR grid."""
    if step_db <= 0:
        raise ParameterError("snr step must be positive")
    count = int(math.floor((stop_db - start_db) / step_db + 1e-9)) + 1
    if count < 1:
        raise ParameterError("snr grid is empty")
    return [start_db + i * step_db for i in range(count)]


# -- joins, filters, fronts -----------------------------------------------------

def _in_window(snr, window):
    return window is None or window[0] <= snr <= window[1]


def _baseline(costs: Sequence[CostRecord]) -> CostRecord:
    base = [c for c in costs if c.baseline]
    if len(base) != 1:
        raise ParameterError(f"cost table must flag exactly one baseline, found {len(base)}")
    return base[0]


def unmatched_pairs(rows: Sequence[AccuracyRow], costs: Sequence[CostRecord]) -> list[str]:
    """Pairs with accuracy rows but no cost record (the join's skip report)."""
    have = {c.pair_name for c in costs}
    return sorted({r.pair_name for r in rows} - have)


def join_costs(rows: Sequence[AccuracyRow], costs: Sequence[CostRecord],
               snr_window: tuple[float, float] | None = None) -> list[DesignPoint]:
    """One design point per pair present in both tables.

    Deviation is the mean of ``mean_abs_dev_m`` over rows inside
    ``snr_window`` (all rows when None). Pairs without a cost record are
    skipped and logged; see ``unmatched_pairs``.
    """
    _baseline(costs)
    by_name = {c.pair_name: c for c in costs}
    devs: dict[str, list[float]] = {}
    for r in rows:
        if _in_window(r.snr_db, snr_window):
            devs.setdefault(r.pair_name, []).append(r.mean_abs_dev_m)
    skipped = unmatched_pairs(rows, costs)
    if skipped:
        log.warning("no cost record for: %s", ", ".join(skipped))
    points = []
    for name, d in devs.items():
        c = by_name.get(name)
        if c is not None:
            points.append(DesignPoint(name, float(np.mean(d)), c.area_mm2, c.power_mw))
    return points


def savings_summary(costs: Sequence[CostRecord]) -> tuple[float, float]:
    """Mean (area, power) saving in percent of the non-baseline records."""
    base = _baseline(costs)
    others = [c for c in costs if not c.baseline]
    if not others:
        raise DegenerateInputError("no non-baseline cost records")
    area = float(np.mean([(1 - c.area_mm2 / base.area_mm2) * 100 for c in others]))
    power = float(np.mean([(1 - c.power_mw / base.power_mw) * 100 for c in others]))
    return area, power


def filter_constraints(points: Sequence[DesignPoint], constraints: Constraints) -> list[DesignPoint]:
    """Keep points strictly inside every bound that is set."""
    if not constraints.has_bounds:
        raise ParameterError("constraints need at least one of max_power_mw, max_area_mm2, max_dev_m")
    c = constraints
    return [p for p in points
            if (c.max_power_mw is None or p.power_mw < c.max_power_mw)
            and (c.max_area_mm2 is None or p.area_mm2 < c.max_area_mm2)
            and (c.max_dev_m is None or p.mean_abs_dev_m < c.max_dev_m)]


def dominates(p: DesignPoint, q: DesignPoint) -> bool:
    a, b = p.objectives(), q.objectives()
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def pareto_front(points: Sequence[DesignPoint]) -> list[DesignPoint]:
    """Non-dominated points under minimization of (deviation, area, power)."""
    if not points:
        raise DegenerateInputError("pareto front of an empty set")
    return [p for p in points if not any(dominates(q, p) for q in points if q is not p)]


# -- file formats -----------------------------------------------------------------

def read_cost_table(path_or_file) -> list[CostRecord]:
    fh = open(path_or_file, newline="") if not hasattr(path_or_file, "read") else path_or_file
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(COST_HEADER) - set(reader.fieldnames):
            raise ParameterError(f"cost table header must be {','.join(COST_HEADER)}")
        recs = []
        for row in reader:
            flag = row["baseline"].strip()
            if flag not in ("0", "1"):
                raise ParameterError(f"baseline column must be 0 or 1, got '{flag}'")
            recs.append(CostRecord(row["pair"].strip(), float(row["area_mm2"]),
                                   float(row["power_mw"]), flag == "1", row["source"].strip()))
    _baseline(recs)
    return recs


def write_cost_table(costs: Sequence[CostRecord], fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COST_HEADER)
    for c in costs:
        w.writerow([c.pair_name, repr(c.area_mm2), repr(c.power_mw), int(c.baseline), c.source])


def write_sweep_csv(rows: Sequence[AccuracyRow], fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([r.pair_name, repr(r.snr_db), r.runs, repr(r.mean_range_m),
                    repr(r.mean_abs_dev_m), repr(r.std_m)])


def sweep_csv_text(rows: Sequence[AccuracyRow]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


def read_sweep_csv(path_or_file) -> list[AccuracyRow]:
    fh = open(path_or_file, newline="") if not hasattr(path_or_file, "read") else path_or_file
    with fh:
        return [AccuracyRow(r["pair"], float(r["snr_db"]), int(r["runs"]), float(r["mean_range_m"]),
                            float(r["mean_abs_dev_m"]), float(r["std_m"]))
                for r in csv.DictReader(fh)]


def design_points_json(points: Sequence[DesignPoint], constraints: Constraints | None = None,
                       only_passing: bool = False) -> str:
    """Design points sorted by name with ``pareto``/``passes_constraints`` flags."""
    front = {p.pair_name for p in pareto_front(points)} if points else set()
    if constraints is not None and constraints.has_bounds:
        passing = {p.pair_name for p in filter_constraints(points, constraints)}
    else:
        passing = {p.pair_name for p in points}
    out = [{"pair": p.pair_name, "dev_m": p.mean_abs_dev_m, "area_mm2": p.area_mm2,
            "power_mw": p.power_mw, "pareto": p.pair_name in front,
            "passes_constraints": p.pair_name in passing}
           for p in sorted(points, key=lambda p: p.pair_name)
           if not only_passing or p.pair_name in passing]
    return json.dumps(out, indent=2) + "\n"


# -- bundled fixture ----------------------------------------------------------------

def _data_file(name):
    return resources.files("approxradar").joinpath("data", name)


def reference_costs() -> list[CostRecord]:
    """Cost table reproducing the published savings and selection outcomes."""
    with _data_file("reference_costs.csv").open("r", newline="") as fh:
        return read_cost_table(fh)


def reference_accuracy() -> list[AccuracyRow]:
    """Illustrative per-SNR deviations for the fixture-only pairs."""
    with _data_file("reference_accuracy.csv").open("r", newline="") as fh:
        return read_sweep_csv(fh)

