"""Batch evaluation: run the certified and plain optimizers across an
accuracy ladder, estimate complexities, and emit one CSV row per
(function, accuracy) pair plus log-log companion files for plotting.

Configs are flat ``key = value`` text files; unknown keys are rejected
outright so typos fail fast instead of silently using defaults.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..complexity import estimate_sc
from ..core import (
    NOT_REACHED,
    certificate_validity,
    diameter,
    sigma_from_trace,
    zeta_from_trace,
)
from ..optimizers import cdoo_run, ncdoo_run, ps_run_1d, ps_run_grid
from ..partition import bisection_setup
from .registry import LABELS, default_algorithm, get_function

CSV_COLUMNS = (
    "function",
    "d",
    "L",
    "Lip",
    "eps",
    "sigma",
    "zeta",
    "SC",
    "SNC",
    "integral",
    "a_bound",
    "sandwich_lower",
    "sandwich_upper",
    "verdicts",
)

_SCALAR_KEYS = {
    "functions",
    "L",
    "eps-count",
    "eps-floor",
    "budget",
    "grid-step-divisor",
    "integral-method",
    "mc-samples",
    "seed",
    "jobs",
    "out",
    "plot-stem",
}
_PREFIX_KEYS = ("budget.", "algorithm.")
_ALGORITHMS = ("cdoo", "ps1d", "psgrid")


@dataclass(frozen=True)
class SweepConfig:
    """Parsed sweep parameters; every field has a workable default."""

    functions: tuple[str, ...] = LABELS
    lip: float = 1.0
    eps_count: int = 6
    eps_floor: float = 1e-6
    budget: int = 120_000
    budgets: dict = field(default_factory=dict)
    algorithms: dict = field(default_factory=dict)
    grid_step_divisor: float = 8.0
    integral_method: str = "grid"
    mc_samples: int = 20_000
    seed: int = 0
    jobs: int = 1
    out: str = "sweep.csv"
    plot_stem: Optional[str] = None


def parse_sweep_config(text: str) -> SweepConfig:
    """Parse a flat ``key = value`` config.

    Blank lines and ``#`` comments are ignored.  Per-function overrides
    use dotted keys, for example ``budget.tent-d1 = 4000``.  Any key
    outside the schema raises with the offending name.
    """
    values: dict = {}
    budgets: dict = {}
    algorithms: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _SCALAR_KEYS:
            if key in values:
                raise ValueError(f"line {lineno}: duplicate key {key!r}")
            values[key] = value
        elif key.startswith(_PREFIX_KEYS[0]):
            budgets[key[len(_PREFIX_KEYS[0]) :]] = value
        elif key.startswith(_PREFIX_KEYS[1]):
            algorithms[key[len(_PREFIX_KEYS[1]) :]] = value
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")

    def convert(key: str, caster, default):
        if key not in values:
            return default
        try:
            return caster(values[key])
        except ValueError as exc:
            raise ValueError(f"key {key!r}: {exc}") from None

    functions = tuple(
        name.strip() for name in values.get("functions", "").split(",") if name.strip()
    ) or LABELS
    for name in functions:
        if name not in LABELS:
            raise ValueError(f"unknown function {name!r} in 'functions'")
    for name in list(budgets) + list(algorithms):
        if name not in LABELS:
            raise ValueError(f"override for unknown function {name!r}")
    for name, algo in algorithms.items():
        if algo not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r} for {name!r}")
    config = SweepConfig(
        functions=functions,
        lip=convert("L", float, 1.0),
        eps_count=convert("eps-count", int, 6),
        eps_floor=convert("eps-floor", float, 1e-6),
        budget=convert("budget", int, 120_000),
        budgets={name: int(v) for name, v in budgets.items()},
        algorithms=dict(algorithms),
        grid_step_divisor=convert("grid-step-divisor", float, 8.0),
        integral_method=values.get("integral-method", "grid"),
        mc_samples=convert("mc-samples", int, 20_000),
        seed=convert("seed", int, 0),
        jobs=convert("jobs", int, 1),
        out=values.get("out", "sweep.csv"),
        plot_stem=values.get("plot-stem"),
    )
    if config.lip <= 0:
        raise ValueError("L must be positive")
    if config.eps_count < 1:
        raise ValueError("eps-count must be at least 1")
    if config.budget < 1 or any(b < 1 for b in config.budgets.values()):
        raise ValueError("budgets must be positive")
    if config.grid_step_divisor < 8 * (1 - 1e-12):
        raise ValueError("grid-step-divisor must be at least 8")
    if config.integral_method not in ("grid", "montecarlo"):
        raise ValueError(f"unknown integral-method {config.integral_method!r}")
    if config.jobs < 1:
        raise ValueError("jobs must be at least 1")
    return config


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def _compute_row(config: SweepConfig, label: str, eps: float) -> dict:
    fn = get_function(label, lip=config.lip)
    algorithm = config.algorithms.get(label) or default_algorithm(fn)
    budget = config.budgets.get(label, config.budget)
    if algorithm == "cdoo":
        certified = cdoo_run(fn, eps, budget)
    elif algorithm == "ps1d":
        certified = ps_run_1d(fn, eps, budget)
    else:
        certified = ps_run_grid(fn, eps, budget)
    sigma = sigma_from_trace(certified, eps)
    twin = ncdoo_run(fn, budget)
    zeta = zeta_from_trace(twin, fn.known_max, eps)
    report = estimate_sc(
        fn,
        eps,
        grid_step=(eps / fn.lip_bound) / config.grid_step_divisor,
        integral_method=config.integral_method,
        mc_samples=config.mc_samples,
        seed=config.seed,
    )
    partition, _ = bisection_setup(fn)
    ratio = 4.0 * partition.diam_bound / partition.separation
    a_factor = 1.0 + partition.arity * (
        1.0 if ratio <= 1.0 else ratio ** fn.dim
    )
    a_bound = a_factor * report.sc
    cert_ok = certificate_validity(certified, fn.known_max).ok
    if sigma is NOT_REACHED or math.isinf(sigma):
        prop1 = "na"
    else:
        prop1 = "pass" if sigma <= 2.0 * a_bound else "fail"
    sandwich_ok = (
        report.verdicts["sandwich_lower"] and report.verdicts["sandwich_upper"]
    )
    verdicts = ";".join(
        (
            f"cert={'pass' if cert_ok else 'fail'}",
            f"prop1={prop1}",
            f"sandwich={'pass' if sandwich_ok else 'fail'}",
        )
    )
    return {
        "function": label,
        "d": fn.dim,
        "L": config.lip,
        "Lip": fn.exact_lip,
        "eps": eps,
        "sigma": sigma,
        "zeta": zeta,
        "SC": report.sc,
        "SNC": report.snc,
        "integral": report.integral,
        "a_bound": a_bound,
        "sandwich_lower": report.c_lower * report.integral,
        "sandwich_upper": report.c_upper * report.integral,
        "verdicts": verdicts,
    }


def _error_row(config: SweepConfig, label: str, eps: float, exc: Exception) -> dict:
    fn_dim = {"d1": 1, "d2": 2}.get(label.rsplit("-", 1)[-1], "")
    row = {column: "ERROR" for column in CSV_COLUMNS}
    row.update(
        {
            "function": label,
            "d": fn_dim,
            "L": config.lip,
            "eps": eps,
            "verdicts": f"error:{type(exc).__name__}",
        }
    )
    return row


@dataclass(frozen=True)
class SweepResult:
    csv_path: str
    plot_paths: tuple[str, ...]
    rows: tuple[dict, ...]


def run_sweep(config: SweepConfig) -> SweepResult:
    """Execute a sweep and write its CSV and plot-data files.

    Rows are computed per (function, accuracy) pair, in parallel when
    ``jobs`` exceeds one, but always written in configuration order, so
    repeated runs of the same config produce identical bytes.  A row
    whose computation raises is emitted with ERROR cells and the
    exception type in the verdicts column; the sweep itself continues.
    """
    tasks: list[tuple[str, float]] = []
    for label in config.functions:
        fn = get_function(label, lip=config.lip)
        eps0 = fn.lip_bound * diameter(fn.domain, fn.norm)
        for j in range(1, config.eps_count + 1):
            eps = eps0 * 0.5**j
            if eps < config.eps_floor:
                break
            tasks.append((label, eps))

    def compute(task: tuple[str, float]) -> dict:
        label, eps = task
        try:
            return _compute_row(config, label, eps)
        except Exception as exc:
            return _error_row(config, label, eps, exc)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(compute, tasks))
    else:
        rows = [compute(task) for task in tasks]

    with open(config.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[column]) for column in CSV_COLUMNS])

    stem = config.plot_stem
    if stem is None:
        stem = os.path.splitext(config.out)[0]
    plot_paths = _write_plot_data(stem, config.functions, rows)
    return SweepResult(
        csv_path=config.out, plot_paths=tuple(plot_paths), rows=tuple(rows)
    )


def _log10_or_none(value) -> Optional[float]:
    if not isinstance(value, (int, float)):
        return None
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        return None
    return math.log10(value)


def _write_plot_data(stem: str, functions: tuple[str, ...], rows: list[dict]) -> list[str]:
    """One two-column log-log file per comparison, with per-function
    blocks separated by blank lines.  Rows with undefined logs (errors,
    unreached stops) are dropped."""
    comparisons = (
        ("sigma-vs-bound", "log10(sigma) log10(2*a_bound)", "sigma",
         lambda row: 2.0 * row["a_bound"] if isinstance(row["a_bound"], float) else None),
        ("sigma-vs-zeta", "log10(sigma) log10(zeta)", "sigma", lambda row: row["zeta"]),
        ("sc-vs-integral", "log10(SC) log10(integral)", "SC", lambda row: row["integral"]),
    )
    paths = []
    for name, header, x_key, y_of in comparisons:
        path = f"{stem}.{name}.dat"
        with open(path, "w") as handle:
            handle.write(f"# {header}\n")
            for label in functions:
                block = [
                    (_log10_or_none(row[x_key]), _log10_or_none(y_of(row)))
                    for row in rows
                    if row["function"] == label
                ]
                block = [(x, y) for x, y in block if x is not None and y is not None]
                if not block:
                    continue
                handle.write(f"# function={label}\n")
                for x, y in block:
                    handle.write(f"{x!r} {y!r}\n")
                handle.write("\n")
        paths.append(path)
    return paths
