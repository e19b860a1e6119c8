"""Parameter-grid evaluation of Fisher informations and figure presets.

Grids are cartesian products evaluated row-major over the axes in declaration
order.  A failing point is recorded with its error message and never aborts
the sweep.  Output tables (CSV, JSON lines, gnuplot) are byte-for-byte
reproducible for a given configuration.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigInvalid, DetectorError, UnknownFigure
from .qfi import METHODS, PARAMS, QfiResult, compute_qfi

log = logging.getLogger(__name__)

COORDINATES = ("theta", "phi", "tau", "a", "beta", "w", "omega")
FORMATS = ("csv", "jsonl", "gnuplot")
NONREL_W_MAX = 0.2
THREADS_ENV = "QFI_DETECTOR_THREADS"


@dataclass(frozen=True)
class Axis:
    """A swept coordinate: either ``values`` or a start/stop/count range."""

    name: str
    start: Optional[float] = None
    stop: Optional[float] = None
    count: int = 0
    spacing: str = "linear"
    values: Optional[tuple] = None

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def problems(self):
        where = f"axes.{self.name}"
        if self.name not in COORDINATES:
            yield where, f"unknown coordinate (expected one of {', '.join(COORDINATES)})"
        if self.values is not None:
            if len(self.values) < 1:
                yield where, "explicit values must not be empty"
            elif not all(math.isfinite(float(v)) for v in self.values):
                yield where, "values must be finite"
            return
        if self.start is None or self.stop is None:
            yield where, "needs start and stop (or explicit values)"
            return
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            yield where, "start and stop must be finite"
        if self.count < 2:
            yield where, f"count must be >= 2, got {self.count}"
        if self.spacing not in ("linear", "log"):
            yield where, f"spacing must be 'linear' or 'log', got {self.spacing!r}"
        elif self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            yield where, "log spacing needs positive start and stop"

    @classmethod
    def from_dict(cls, d: Mapping) -> "Axis":
        values = d.get("values")
        return cls(name=d.get("name", ""), start=d.get("start"), stop=d.get("stop"),
                   count=int(d.get("count", 0)), spacing=d.get("spacing", "linear"),
                   values=tuple(values) if values is not None else None)


@dataclass(frozen=True)
class SweepConfig:
    param: str
    axes: tuple
    fixed: Mapping[str, float] = field(default_factory=dict)
    methods: tuple = ("closed-form",)
    target: str = "grid"
    output: Optional[str] = None
    fmt: str = "csv"
    allow_outside_validity: bool = False

    def validate(self) -> None:
        problems = []
        if self.param not in PARAMS:
            problems.append(("param", f"must be one of {', '.join(PARAMS)}"))
        if not self.axes:
            problems.append(("axes", "at least one axis is required"))
        names = [ax.name for ax in self.axes]
        for ax in self.axes:
            problems.extend(ax.problems())
        dup = sorted({n for n in names if names.count(n) > 1})
        if dup:
            problems.append(("axes", f"duplicate axes {dup}"))
        for k, v in self.fixed.items():
            if k not in COORDINATES:
                problems.append((f"fixed.{k}", "unknown coordinate"))
            elif k in names:
                problems.append((f"fixed.{k}", "also declared as an axis"))
            elif not isinstance(v, (int, float)) or not math.isfinite(v):
                problems.append((f"fixed.{k}", "must be a finite number"))
        given = set(names) | set(self.fixed)
        for k in ("theta", "tau"):
            if k not in given:
                problems.append((k, "must be given as an axis or fixed value"))
        if ("a" in given) == ("beta" in given):
            problems.append(("a/beta", "give exactly one of a or beta"))
        if not self.methods:
            problems.append(("methods", "at least one method is required"))
        for m in self.methods:
            if m not in METHODS:
                problems.append(("methods", f"unknown method {m!r}"))
        if self.fmt not in FORMATS:
            problems.append(("fmt", f"must be one of {', '.join(FORMATS)}"))
        if not self.allow_outside_validity:
            ws = [abs(float(self.fixed["w"]))] if "w" in self.fixed else []
            for ax in self.axes:
                if ax.name == "w" and not list(ax.problems()):
                    ws.extend(np.abs(ax.grid()).tolist())
            if ws and max(ws) > NONREL_W_MAX:
                problems.append(("w", f"exceeds the order-w^2 validity bound {NONREL_W_MAX} "
                                      "(set allow_outside_validity to override)"))
        if problems:
            raise ConfigInvalid(problems)

    @property
    def axis_names(self):
        return [ax.name for ax in self.axes]

    def points(self):
        grids = [ax.grid() for ax in self.axes]
        for combo in itertools.product(*grids):
            yield dict(zip(self.axis_names, (float(c) for c in combo)))

    @classmethod
    def from_dict(cls, d: Mapping) -> "SweepConfig":
        version = d.get("schema_version", 1)
        if version != 1:
            raise ConfigInvalid([("schema_version", f"unsupported version {version!r}")])
        try:
            axes = tuple(Axis.from_dict(a) for a in d.get("axes", ()))
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid([("axes", str(exc))]) from exc
        methods = d.get("methods", ("closed-form",))
        if isinstance(methods, str):
            methods = (methods,)
        return cls(param=d.get("param", ""), axes=axes, fixed=dict(d.get("fixed", {})),
                   methods=tuple(methods), target=d.get("target", "grid"),
                   output=d.get("output"), fmt=d.get("format", d.get("fmt", "csv")),
                   allow_outside_validity=bool(d.get("allow_outside_validity", False)))


@dataclass
class SweepRecord:
    coordinates: dict
    results: list
    error: Optional[str] = None
    wall_time: float = 0.0

    def value(self, method: str) -> float:
        for r in self.results:
            if r.method == method:
                return r.fisher
        return math.nan

    def spread(self) -> float:
        if self.error is not None:
            return math.nan
        vals = [r.fisher for r in self.results]
        if len(vals) < 2:
            return 0.0
        hi, lo = max(vals), min(vals)
        return (hi - lo) / max(abs(hi), abs(lo), np.finfo(float).tiny)

    def as_dict(self, include_timing=False) -> dict:
        d = {"coordinates": self.coordinates,
             "results": [r.as_dict() for r in self.results],
             "error": self.error}
        if include_timing:
            d["wall_time"] = self.wall_time
        return d


def _evaluate(param, methods, coords) -> SweepRecord:
    t0 = time.perf_counter()
    kw = dict(coords)
    theta = kw.pop("theta")
    tau = kw.pop("tau")
    results, errors = [], []
    for m in methods:
        try:
            results.append(compute_qfi(param, theta, tau, method=m, **kw))
        except (DetectorError, ValueError, ArithmeticError) as exc:
            errors.append(f"{m}: {type(exc).__name__}: {exc}")
    return SweepRecord(coords, results, "; ".join(errors) or None,
                       time.perf_counter() - t0)


def worker_count(requested: Optional[int] = None) -> int:
    n = requested or min(4, os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, cap)
    return max(1, n)


def run_grid(cfg: SweepConfig, workers: Optional[int] = None) -> list:
    """Evaluate every grid point; returns records in row-major order."""
    cfg.validate()
    fixed = {k: float(v) for k, v in cfg.fixed.items()}
    coords = [dict(fixed, **pt) for pt in cfg.points()]
    n = worker_count(workers)

    def job(c):
        return _evaluate(cfg.param, cfg.methods, c)

    if n == 1 or len(coords) < 256:
        return [job(c) for c in coords]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(job, coords, chunksize=64))


# -- output -------------------------------------------------------------------

def _fmt(x) -> str:
    return format(float(x), ".17g")


def _columns(cfg):
    cols = [f"{cfg.param}_{m}" for m in cfg.methods]
    if len(cfg.methods) > 1:
        cols.append(f"{cfg.param}_spread")
    return cols


def _row(rec, cfg):
    row = [_fmt(rec.coordinates[n]) for n in cfg.axis_names]
    row += [_fmt(rec.value(m)) for m in cfg.methods]
    if len(cfg.methods) > 1:
        row.append(_fmt(rec.spread()))
    return row


def format_table(records: Sequence[SweepRecord], cfg: SweepConfig,
                 fmt: Optional[str] = None, include_timing: bool = False) -> str:
    fmt = fmt or cfg.fmt
    buf = io.StringIO(newline="")
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(cfg.axis_names + _columns(cfg) + ["error"])
        for rec in records:
            writer.writerow(_row(rec, cfg) + [rec.error or ""])
    elif fmt == "jsonl":
        for rec in records:
            buf.write(json.dumps(rec.as_dict(include_timing), sort_keys=True) + "\n")
    elif fmt == "gnuplot":
        buf.write("# " + " ".join(cfg.axis_names + _columns(cfg)) + "\n")
        outer = None
        for rec in records:
            key = rec.coordinates[cfg.axis_names[0]]
            if len(cfg.axes) > 1 and outer is not None and key != outer:
                buf.write("\n\n")
            outer = key
            buf.write(" ".join(_row(rec, cfg)) + "\n")
    else:
        raise ConfigInvalid([("fmt", f"must be one of {', '.join(FORMATS)}")])
    return buf.getvalue()


def write_table(records, cfg: SweepConfig, path, fmt: Optional[str] = None) -> Path:
    path = Path(path)
    path.write_bytes(format_table(records, cfg, fmt).encode("utf-8"))
    return path


# -- figure presets -----------------------------------------------------------

FIGURE_POINTS = 201
PI = math.pi


def _series(name, values):
    return Axis(name, values=tuple(values))


def _sweep(name, start, stop):
    return Axis(name, start, stop, FIGURE_POINTS)


# id -> (description, param, axes, fixed)
FIGURES = {
    "fig1a": ("F_phi vs theta for tau = 1, 2, 3", "phi",
              (_series("tau", (1, 2, 3)), _sweep("theta", 0.0, PI)),
              {"a": PI, "w": 0.01}),
    "fig1b": ("F_phi vs tau for theta = pi/2, pi/3, pi/6", "phi",
              (_series("theta", (PI / 2, PI / 3, PI / 6)), _sweep("tau", 0.0, 5.0)),
              {"a": PI, "w": 0.01}),
    "fig2": ("F_phi vs acceleration for tau = 1, 2, 3", "phi",
             (_series("tau", (1, 2, 3)), _sweep("a", 0.5, 50.0)),
             {"theta": PI / 2, "w": 0.01}),
    "fig3": ("F_phi vs drift w", "phi",
             (_sweep("w", 0.0, 0.1),),
             {"theta": PI / 2, "tau": 1.0, "a": PI}),
    "fig4a": ("F_theta vs theta for tau = 1, 2, 3", "theta",
              (_series("tau", (1, 2, 3)), _sweep("theta", -PI, PI)),
              {"a": PI, "w": 0.01}),
    "fig4b": ("F_theta vs tau for theta = 0, pi/3, pi/2", "theta",
              (_series("theta", (0.0, PI / 3, PI / 2)), _sweep("tau", 0.0, 5.0)),
              {"a": PI, "w": 0.01}),
    "fig5": ("F_theta vs acceleration for tau = 1, 2, 3", "theta",
             (_series("tau", (1, 2, 3)), _sweep("a", 0.5, 50.0)),
             {"theta": 0.0, "w": 0.01}),
    "fig6": ("F_beta vs tau for beta = 1, 2, 3", "beta",
             (_series("beta", (1, 2, 3)), _sweep("tau", 0.0, 10.0)),
             {"theta": PI, "w": 0.01}),
    "fig6a": ("F_beta vs theta for tau = 10, 5, 1 at beta = 10", "beta",
              (_series("tau", (10, 5, 1)), _sweep("theta", 0.0, 2 * PI)),
              {"beta": 10.0, "w": 0.01}),
    "fig6b": ("F_beta vs tau for theta = pi, 2pi/3, pi/2 at beta = 10", "beta",
              (_series("theta", (PI, 2 * PI / 3, PI / 2)), _sweep("tau", 0.0, 50.0)),
              {"beta": 10.0, "w": 0.01}),
    "fig7": ("F_theta vs drift w", "theta",
             (_sweep("w", 0.0, 0.1),),
             {"theta": 0.0, "tau": 1.0, "a": PI}),
    "fig8": ("F_beta vs drift w", "beta",
             (_sweep("w", 0.0, 0.1),),
             {"theta": PI, "tau": 1.0, "beta": 1.0}),
}


def figure_config(fig_id: str, methods: Optional[Sequence[str]] = None,
                  fmt: str = "csv") -> SweepConfig:
    try:
        _, param, axes, fixed = FIGURES[fig_id]
    except KeyError:
        raise UnknownFigure(f"unknown figure {fig_id!r}; known: {', '.join(FIGURES)}") from None
    if methods is None:
        methods = ("bloch-derivative",) if param == "beta" else ("closed-form",)
    return SweepConfig(param=param, axes=axes, fixed=dict(fixed), methods=tuple(methods),
                       target=fig_id, fmt=fmt)


def run_figure(fig_id: str, methods: Optional[Sequence[str]] = None,
               workers: Optional[int] = None) -> list:
    return run_grid(figure_config(fig_id, methods), workers)
