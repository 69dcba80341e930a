"""Scenario files, the check registry and report emission.

A scenario is one JSON file::

    {
      "name": "demo",
      "seed": 0,
      "data": {"rate": 1.0},
      "checks": ["eq_2_20", "eq_2_22"],
      "sources": ["exact", "grid"],
      "tuples": [{"alpha": 5, "beta": 2, "T": 1, "lam": 1}],
      "params": {"alpha": [5, 16], "beta": [2, 4], "T": [1]},
      "time_points": 33
    }

``tuples`` lists parameter sets explicitly; ``params`` adds their Cartesian
product.  ``data`` (and the optional ``partner`` for pair checks) is either
``{"rate": r, "dim": n}``, a serialised chirped Gaussian under
``"gaussian"``, or ``{"random": {...}}`` drawn from the scenario generator.
Check names may carry the ``check_`` prefix.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import convexity as cv
from .errors import ConfigError, EndpointInfiniteError, NumericalGuardError
from .gaussian_calculus import ChirpedGaussian, gaussian, random_chirped

SCHEDULE_KEYS = ("alpha", "beta", "T")
PARAM_KEYS = {
    "alpha", "beta", "T", "lam", "gamma", "p", "radial", "variant", "nu", "route",
    "weight", "t_min", "t_max", "points",
}
DATA_KEYS = {"name", "seed", "data", "partner", "checks", "sources", "source", "tuples",
             "params", "time_points", "tolerance_scale", "sweep"}


# check registry -----------------------------------------------------------


def _sched(p: dict, points: int) -> cv.ConvexitySchedule:
    try:
        return cv.ConvexitySchedule.make(float(p["alpha"]), float(p["beta"]), float(p["T"]), points)
    except KeyError as exc:
        raise ConfigError(f"missing schedule parameter {exc.args[0]!r}") from None


def _needs_partner(v0):
    if v0 is None:
        raise ConfigError("pair checks need a 'partner' datum")
    return v0


CheckRunner = Callable[..., cv.ConvexityReport]

REGISTRY: dict[str, CheckRunner] = {
    "eq_2_20": lambda u0, v0, p, n, src: cv.check_eq_2_20(u0, p.get("lam", 1.0), _sched(p, n), src),
    "eq_2_21": lambda u0, v0, p, n, src: cv.check_eq_2_21(u0, p.get("lam", 1.0), _sched(p, n), src),
    "eq_2_22": lambda u0, v0, p, n, src: cv.check_eq_2_22(u0, _sched(p, n), src),
    "eq_2_23": lambda u0, v0, p, n, src: cv.check_eq_2_23(u0, _sched(p, n), src),
    "logconvex_G": lambda u0, v0, p, n, src: cv.check_logconvex_G(
        u0, _sched(p, n), p.get("lam", 1.0), p.get("weight", "linear"), src),
    "cor_3_1": lambda u0, v0, p, n, src: cv.check_cor_3_1(
        u0, p.get("gamma", 1.0), _sched(p, n), p.get("variant", "theta"), src),
    "cor_3_2_3_3": lambda u0, v0, p, n, src: cv.check_cor_3_2_3_3(
        u0, _sched(p, n), p.get("p", 2.0), p.get("gamma"), bool(p.get("radial", False)),
        p.get("variant", "theta"), src),
    "cor_3_4": lambda u0, v0, p, n, src: cv.check_cor_3_4(
        u0, _needs_partner(v0), _sched(p, n), p.get("variant", "dos3"), p.get("lam"), src),
    "variance_convexity": lambda u0, v0, p, n, src: cv.check_variance_convexity(
        u0, _needs_partner(v0),
        np.linspace(float(p.get("t_min", -1.0)), float(p.get("t_max", 1.0)), int(p.get("points", 41))),
        src),
    "cor_3_5": lambda u0, v0, p, n, src: cv.check_cor_3_5(
        u0, p.get("nu", 1.0), _sched(p, n), p.get("variant", "gal1"), p.get("route", "delegate"), src),
}


def canonical_check(name: str) -> str:
    key = name[len("check_"):] if name.startswith("check_") else name
    if key not in REGISTRY:
        raise ConfigError(f"unknown check {name!r}; known: {', '.join(REGISTRY)}")
    return key


# scenario ---------------------------------------------------------------------


def _parse_datum(spec: Any, rng: np.random.Generator) -> dict:
    """Normalise a data directive to a serialised Gaussian."""
    if not isinstance(spec, dict):
        raise ConfigError("data entries must be JSON objects")
    try:
        if "gaussian" in spec:
            return ChirpedGaussian.from_dict(spec["gaussian"]).to_dict()
        if "rate" in spec:
            return gaussian(float(spec["rate"]), int(spec.get("dim", 1)),
                            lin=float(spec.get("lin", 0.0))).to_dict()
        if "random" in spec:
            opts = dict(spec["random"])
            g = random_chirped(rng, int(opts.get("dim", 1)),
                               tuple(opts.get("re_range", (0.3, 3.0))),
                               float(opts.get("im_bound", 2.0)), float(opts.get("lin_bound", 2.0)),
                               bool(opts.get("real", False)))
            return g.to_dict()
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad data entry {spec!r}: {exc}") from None
    raise ConfigError(f"data entry needs 'gaussian', 'rate' or 'random': {spec!r}")


def _expand(tuples: list, grid: dict) -> list[dict]:
    out = [dict(t) for t in tuples]
    if grid:
        keys = list(grid)
        values = [v if isinstance(v, list) else [v] for v in grid.values()]
        if any(len(v) == 0 for v in values):
            raise ConfigError("parameter grids must be non-empty")
        out += [dict(zip(keys, combo)) for combo in itertools.product(*values)]
    for t in out:
        unknown = set(t) - PARAM_KEYS
        if unknown:
            raise ConfigError(f"unknown parameters {sorted(unknown)}")
    return out


@dataclass
class Scenario:
    name: str
    seed: int
    data: list[dict]
    partner: dict | None
    checks: list[str]
    sources: list[str]
    tuples: list[dict]
    time_points: int = 33
    tolerance_scale: float = 1.0
    sweep: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict, seed: int | None = None) -> "Scenario":
        if not isinstance(raw, dict):
            raise ConfigError("scenario must be a JSON object")
        unknown = set(raw) - DATA_KEYS
        if unknown:
            raise ConfigError(f"unknown scenario keys {sorted(unknown)}")
        seed = int(raw.get("seed", 0)) if seed is None else int(seed)
        rng = np.random.default_rng(seed)
        data_raw = raw.get("data", {"rate": 1.0})
        data = [_parse_datum(d, rng) for d in (data_raw if isinstance(data_raw, list) else [data_raw])]
        partner = _parse_datum(raw["partner"], rng) if "partner" in raw else None
        checks = [canonical_check(c) for c in raw.get("checks", [])]
        if not checks:
            raise ConfigError("scenario lists no checks")
        sources = raw.get("sources", raw.get("source", ["exact"]))
        sources = [sources] if isinstance(sources, str) else list(sources)
        if not sources or any(s not in ("exact", "grid") for s in sources):
            raise ConfigError("sources must be drawn from 'exact' and 'grid'")
        tuples = _expand(raw.get("tuples", []), raw.get("params", {}))
        if not tuples:
            raise ConfigError("scenario has no parameter tuples")
        points = int(raw.get("time_points", 33))
        if points < 3:
            raise ConfigError("time_points must be at least 3")
        return cls(str(raw.get("name", "scenario")), seed, data, partner, checks, sources, tuples,
                   points, float(raw.get("tolerance_scale", 1.0)), dict(raw.get("sweep", {})))

    @classmethod
    def load(cls, path, seed: int | None = None) -> "Scenario":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from None
        return cls.from_dict(raw, seed)


def bundled_scenario_path(name: str = "theorem_1_2_gaussian.json"):
    return resources.files("logconvex.scenarios").joinpath(name)


def load_bundled(name: str = "theorem_1_2_gaussian.json", seed: int | None = None) -> Scenario:
    return Scenario.from_dict(json.loads(bundled_scenario_path(name).read_text()), seed)


# execution ----------------------------------------------------------------------


@dataclass(frozen=True)
class Task:
    index: int
    check: str
    datum: dict
    partner: dict | None
    params: dict
    source: str
    time_points: int
    tolerance_scale: float


def _rescale(rep: cv.ConvexityReport, factor: float) -> cv.ConvexityReport:
    if factor == 1.0 or rep.status not in ("pass", "fail") or rep.check == "cor_3_2_3_3":
        return rep
    return dataclasses.replace(rep, tolerance=rep.tolerance * factor, status="")


def execute(task: Task):
    """Run one tuple; guard failures come back as ``("guard", message)``."""
    u0 = ChirpedGaussian.from_dict(task.datum)
    v0 = ChirpedGaussian.from_dict(task.partner) if task.partner is not None else None
    try:
        rep = REGISTRY[task.check](u0, v0, task.params, task.time_points, task.source)
    except EndpointInfiniteError:
        rep = cv.ConvexityReport(task.check, dict(task.params), [], [], [], math.nan,
                                 status="skipped", path=task.source)
    except NumericalGuardError as exc:
        return ("guard", f"{type(exc).__name__}: {exc}")
    except (ValueError, TypeError) as exc:
        return ("config", f"{type(exc).__name__}: {exc}")
    return _rescale(rep, task.tolerance_scale)


def tasks_for(sc: Scenario, tolerance_scale: float | None = None) -> list[Task]:
    scale = sc.tolerance_scale if tolerance_scale is None else tolerance_scale
    out = []
    for check in sc.checks:
        for datum in sc.data:
            for params in sc.tuples:
                for source in sc.sources:
                    out.append(Task(len(out), check, datum, sc.partner, params, source,
                                    sc.time_points, scale))
    return out


def execute_all(tasks: list[Task], jobs: int = 1) -> list[cv.ConvexityReport]:
    """Results in task order; guard and config failures are raised with context."""
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(execute, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [execute(t) for t in tasks]
    for task, res in zip(tasks, results):
        if isinstance(res, tuple):
            kind, msg = res
            context = f"{task.check} tuple {task.index} {task.params} ({task.source}): {msg}"
            raise (NumericalGuardError if kind == "guard" else ConfigError)(context)
    return results


@dataclass
class RunSummary:
    scenario: str
    seed: int
    counts: dict[str, dict[str, int]]
    min_margins: dict[str, float | None]
    wall_clock: float = 0.0

    @property
    def total(self) -> int:
        return sum(sum(c.values()) for c in self.counts.values())

    @property
    def failed(self) -> int:
        return sum(c["fail"] for c in self.counts.values())

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> dict:
        # wall-clock time is left out so that repeated runs are byte-identical
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "tuples": self.total,
            "counts": self.counts,
            "min_margins": self.min_margins,
            "exit_code": self.exit_code,
        }


def summarize(name: str, seed: int, reports: list[cv.ConvexityReport]) -> RunSummary:
    counts: dict[str, dict[str, int]] = {}
    mins: dict[str, float | None] = {}
    for rep in reports:
        c = counts.setdefault(rep.check, {s: 0 for s in cv.STATUSES})
        c[rep.status] += 1
        mins.setdefault(rep.check, None)
        if rep.status in ("pass", "fail") and math.isfinite(rep.min_margin):
            prev = mins[rep.check]
            mins[rep.check] = rep.min_margin if prev is None else min(prev, rep.min_margin)
    return RunSummary(name, seed, counts, mins)


def emit_plot_data(report: cv.ConvexityReport) -> str:
    """CSV text with columns ``t, lhs_log, rhs_log``."""
    lines = ["t,lhs_log,rhs_log"]
    for t, lhs, rhs, _ in report.rows():
        lines.append(f"{t!r},{lhs!r},{rhs!r}")
    return "\n".join(lines) + "\n"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _report_stem(task: Task) -> str:
    return f"{task.index:03d}_{task.check}_{task.source}"


def write_reports(out_dir: Path, tasks: list[Task], reports: list[cv.ConvexityReport]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "plot").mkdir(exist_ok=True)
    for task, rep in zip(tasks, reports):
        stem = _report_stem(task)
        (out_dir / f"{stem}.csv").write_text(rep.csv_text())
        (out_dir / f"{stem}.json").write_text(_dump(_jsonable(rep.summary())))
        (out_dir / "plot" / f"{stem}.csv").write_text(emit_plot_data(rep))


def run(scenario: Scenario, out_dir=None, jobs: int = 1,
        tolerance_scale: float | None = None) -> tuple[RunSummary, list[cv.ConvexityReport]]:
    start = time.perf_counter()
    tasks = tasks_for(scenario, tolerance_scale)
    reports = execute_all(tasks, jobs)
    summary = summarize(scenario.name, scenario.seed, reports)
    summary.wall_clock = time.perf_counter() - start
    if out_dir is not None:
        out = Path(out_dir)
        write_reports(out, tasks, reports)
        (out / "run_summary.json").write_text(_dump(_jsonable(summary.to_dict())))
    return summary, reports


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


# sweeps -------------------------------------------------------------------------


def parse_axis(text: str) -> tuple[str, list[float]]:
    """``name=start:stop:count`` or ``name=v1,v2,...``."""
    try:
        name, spec = text.split("=", 1)
        if ":" in spec:
            a, b, k = spec.split(":")
            values = np.linspace(float(a), float(b), int(k)).tolist()
        else:
            values = [float(v) for v in spec.split(",")]
    except ValueError:
        raise ConfigError(f"bad axis {text!r}; use name=start:stop:count or name=v1,v2") from None
    if name not in PARAM_KEYS or not values:
        raise ConfigError(f"bad axis {text!r}")
    return name, values


@dataclass
class SweepResult:
    check: str
    source: str
    axes: dict[str, list[float]]
    statuses: np.ndarray       # shape (len(second axis), len(first axis)) or (1, k)
    min_margins: np.ndarray

    def matrix_csv(self) -> str:
        names = list(self.axes)
        cols = self.axes[names[0]]
        rows = self.axes[names[1]] if len(names) > 1 else [math.nan]
        row_name = names[1] if len(names) > 1 else "-"
        lines = [",".join([f"{row_name}\\{names[0]}", *(repr(float(c)) for c in cols)])]
        for i, r in enumerate(rows):
            cells = []
            for j in range(len(cols)):
                st = self.statuses[i, j]
                cells.append(repr(float(self.min_margins[i, j])) if st in ("pass", "fail") else st)
            lines.append(",".join([repr(float(r)), *cells]))
        return "\n".join(lines) + "\n"


def sweep(scenario: Scenario, axes: dict[str, list[float]] | None = None, out_dir=None,
          jobs: int = 1, tolerance_scale: float | None = None) -> list[SweepResult]:
    """Min-margin matrices over one or two parameter axes.

    The remaining parameters come from the scenario's first tuple; only the
    first data entry is used.
    """
    axes = dict(axes or scenario.sweep)
    if not 1 <= len(axes) <= 2:
        raise ConfigError("a sweep needs one or two axes")
    names = list(axes)
    base = scenario.tuples[0]
    first = axes[names[0]]
    second = axes[names[1]] if len(names) > 1 else [None]
    grid = []
    for b in second:
        for a in first:
            t = {**base, names[0]: a}
            if b is not None:
                t[names[1]] = b
            grid.append(t)
    sub = dataclasses.replace(scenario, data=scenario.data[:1], tuples=grid)
    tasks = tasks_for(sub, tolerance_scale)
    reports = execute_all(tasks, jobs)
    results = []
    shape = (len(second), len(first))
    for check in sub.checks:
        for source in sub.sources:
            reps = [r for t, r in zip(tasks, reports) if t.check == check and t.source == source]
            st = np.array([r.status for r in reps], dtype=object).reshape(shape)
            mm = np.array([r.min_margin if r.status in ("pass", "fail") else math.nan
                           for r in reps]).reshape(shape)
            results.append(SweepResult(check, source, {k: axes[k] for k in names}, st, mm))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for res in results:
            (out / f"sweep_{res.check}_{res.source}.csv").write_text(res.matrix_csv())
    return results


def log(msg: str) -> None:
    print(msg, file=sys.stderr)
