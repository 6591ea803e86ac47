"""Monte Carlo size and power experiments.

Replicate ``r`` of every cell draws its data from ``RngStream(seed, r)``
(substream 0) and its bootstrap resamples from substream 1, so a report
depends only on the plan, never on how replicates are scheduled.  The same
replicate streams are reused across the beta grid.

Set ``CATGINI_NUM_WORKERS`` (or pass ``workers``) to spread replicates over
processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .core import CatGiniError, DataError, RngStream
from .inference import (
    METHODS,
    added_value_pair,
    asn_test,
    bootstrap_test,
    cgc_difference,
    projection_test,
)
from .simgen import ScenarioConfig, format_flat, gen_scenario, parse_flat

MODES = ("compare", "added_value")
WORKERS_ENV = "CATGINI_NUM_WORKERS"
REPORT_COLUMNS = ("beta", "method", "rejection_rate", "mean_dn", "mc_se", "time")


class ReplicateAbortError(CatGiniError):
    """A replicate failed; the whole cell is aborted rather than skipped."""

    def __init__(self, beta, replicate, cause):
        super().__init__(f"replicate {replicate} at beta={beta} failed: {cause}")
        self.beta = beta
        self.replicate = replicate
        self.cause = cause


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to reproduce one simulation table block."""
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    beta_grid: tuple = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    replications: int = 3000
    alpha: float = 0.05
    methods: tuple = ("asN", "bootstrap")
    bootstrap_b: int = 1000
    mode: str = "compare"
    seed: int = 0
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "beta_grid", tuple(float(b) for b in self.beta_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.scenario.seed != self.seed:
            # the plan seed drives every replicate stream, so it is the one kept
            object.__setattr__(self, "scenario",
                               ScenarioConfig(**{**self.scenario.to_dict(), "seed": self.seed}))
        if not self.beta_grid:
            raise DataError("beta_grid must not be empty")
        for b in self.beta_grid:
            self.scenario.with_beta(b)
        if self.replications < 1:
            raise DataError(f"replications must be >= 1, got {self.replications}")
        if not 0.0 < self.alpha < 1.0:
            raise DataError(f"alpha must lie in (0, 1), got {self.alpha}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise DataError(f"methods must be a non-empty subset of {METHODS}, got {bad}")
        if self.bootstrap_b < 1:
            raise DataError(f"bootstrap_b must be >= 1, got {self.bootstrap_b}")
        if self.mode not in MODES:
            raise DataError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must be a non-negative 64-bit integer")

    def to_flat(self) -> dict:
        out = self.scenario.to_flat()
        out.pop("beta")
        out.update(beta_grid=list(self.beta_grid), replications=self.replications,
                   alpha=self.alpha, methods=list(self.methods),
                   bootstrap_b=self.bootstrap_b, mode=self.mode, seed=self.seed,
                   timing=self.timing)
        return out

    @classmethod
    def from_flat(cls, kv: dict) -> "ExperimentPlan":
        kv = dict(kv)
        own = {}
        for f in fields(cls):
            if f.name != "scenario" and f.name in kv:
                own[f.name] = kv.pop(f.name)
        if "seed" in own:
            kv["seed"] = own["seed"]
        scenario = ScenarioConfig.from_flat(kv)
        return cls(scenario=scenario, **own)


def load_plan(path) -> ExperimentPlan:
    with open(path, encoding="utf-8") as fh:
        return ExperimentPlan.from_flat(parse_flat(fh.read()))


def save_plan(plan: ExperimentPlan, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_flat(plan.to_flat()))


@dataclass(frozen=True)
class ReportRow:
    beta: float
    method: str
    rejections: int
    replications: int
    rejection_rate: float
    mean_dn: float
    mc_se: float
    wall_time: float


@dataclass(frozen=True)
class ScenarioReport:
    rows: tuple
    plan: dict | None = None

    def cell(self, beta: float, method: str) -> ReportRow:
        for r in self.rows:
            if r.beta == beta and r.method == method:
                return r
        raise KeyError((beta, method))

    def to_dict(self) -> dict:
        return {"plan": self.plan,
                "rows": [{f.name: getattr(r, f.name) for f in fields(ReportRow)}
                         for r in self.rows]}

    @classmethod
    def from_dict(cls, obj) -> "ScenarioReport":
        rows = tuple(ReportRow(**r) for r in obj["rows"])
        return cls(rows=rows, plan=obj.get("plan"))


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _one_replicate(args):
    """Run every method on replicate ``r``; returns ``(d_n, rejections)``."""
    plan, beta, r = args
    stream = RngStream(plan.seed, r)
    cfg = plan.scenario.with_beta(beta)
    try:
        data = gen_scenario(cfg, stream.substream(0))
        if plan.mode == "added_value":
            data = added_value_pair(data)
        dn = cgc_difference(data).d_n
        out = []
        for m in plan.methods:
            if m == "asN":
                out.append(asn_test(data, plan.alpha).reject)
            elif m == "projection":
                out.append(projection_test(data, plan.alpha).reject)
            else:
                res = bootstrap_test(data, plan.bootstrap_b, stream.substream(1))
                out.append(res.reject(plan.alpha))
    except CatGiniError as exc:
        raise ReplicateAbortError(beta, r, exc) from exc
    return dn, out


def _n_workers(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def _map_replicates(plan, beta, workers):
    jobs = [(plan, beta, r) for r in range(plan.replications)]
    if workers == 1:
        return [_one_replicate(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        # map preserves replicate order regardless of completion order
        return list(ex.map(_one_replicate, jobs, chunksize=chunk))


def _cell_rows(plan, beta, workers):
    t0 = time.perf_counter()
    results = _map_replicates(plan, beta, workers)
    elapsed = time.perf_counter() - t0 if plan.timing else 0.0
    R = plan.replications
    mean_dn = math.fsum(dn for dn, _ in results) / R
    rows = []
    for j, m in enumerate(plan.methods):
        hits = sum(1 for _, rej in results if rej[j])
        rate = hits / R
        rows.append(ReportRow(beta=beta, method=m, rejections=hits, replications=R,
                              rejection_rate=rate, mean_dn=mean_dn,
                              mc_se=math.sqrt(rate * (1.0 - rate) / R),
                              wall_time=elapsed))
    return rows


def run_experiment(plan: ExperimentPlan, beta: float | None = None,
                   workers: int | None = None) -> ScenarioReport:
    """Rejection rates and mean ``D_n`` at a single ``beta``.

    ``beta`` defaults to the scenario's own value.
    """
    beta = plan.scenario.beta if beta is None else float(beta)
    rows = _cell_rows(plan, beta, _n_workers(workers))
    return ScenarioReport(rows=tuple(rows), plan=plan.to_flat())


def run_beta_sweep(plan: ExperimentPlan, workers: int | None = None) -> ScenarioReport:
    """Run every point of ``plan.beta_grid``; rows are ordered by beta, then method."""
    workers = _n_workers(workers)
    rows = []
    for beta in sorted(plan.beta_grid):
        rows.extend(_cell_rows(plan, beta, workers))
    return ScenarioReport(rows=tuple(rows), plan=plan.to_flat())


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def fmt_float(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(x)
    return format(x, ".17g")


def dumps17(obj, indent: int | None = 2, _level: int = 0) -> str:
    """JSON encoding with every float written to 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps17(v, indent, _level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _row_cells(r):
    return [fmt_float(r.beta), r.method, fmt_float(r.rejection_rate),
            fmt_float(r.mean_dn), fmt_float(r.mc_se), fmt_float(r.wall_time)]


def report_to_csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    if report.plan:
        for line in format_flat(report.plan).splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in report.rows:
        w.writerow(_row_cells(r))
    return buf.getvalue()


def report_to_markdown(report: ScenarioReport) -> str:
    """Table with one row per (beta, method), rates to 4 decimals, mean D_n in parentheses."""
    lines = []
    if report.plan:
        lines += ["```toml", format_flat(report.plan).rstrip("\n"), "```", ""]
    lines.append("| beta | method | rejection rate | (mean D_n) | MC s.e. | time [s] |")
    lines.append("|---:|:---|---:|---:|---:|---:|")
    for r in report.rows:
        lines.append(f"| {r.beta:.1f} | {r.method} | {r.rejection_rate:.4f} | "
                     f"({r.mean_dn:.4f}) | {r.mc_se:.4f} | {r.wall_time:.2f} |")
    return "\n".join(lines) + "\n"


def report_to_json(report: ScenarioReport) -> str:
    return dumps17(report.to_dict()) + "\n"


def report_from_json(text: str) -> ScenarioReport:
    return ScenarioReport.from_dict(json.loads(text))


_FORMATS = {"csv": report_to_csv, "json": report_to_json, "markdown": report_to_markdown,
            "md": report_to_markdown}


def export_report(report: ScenarioReport, path, fmt: str = "csv") -> str:
    """Write ``report`` to ``path`` (``"-"`` returns the text only).

    Columns are always ``beta, method, rejection_rate, mean_dn, mc_se, time``.
    """
    if not report.rows:
        raise DataError("report has no rows")
    try:
        text = _FORMATS[fmt](report)
    except KeyError:
        raise DataError(f"unknown format {fmt!r}; expected csv, json or markdown") from None
    if path is not None and str(path) != "-":
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise DataError(f"cannot write report to {path}: {exc}") from None
    return text
