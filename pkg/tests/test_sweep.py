import json
import math
import time

import numpy as np
import pytest

from relqfi import ConfigInvalid, UnknownFigure
from relqfi.sweep import (FIGURE_POINTS, FIGURES, Axis, SweepConfig,
                          figure_config, format_table, run_figure, run_grid,
                          worker_count, write_table)

PI = math.pi


def config(**kw):
    d = {"schema_version": 1, "param": "phi",
         "axes": [{"name": "theta", "start": 0.0, "stop": PI, "count": 5}],
         "fixed": {"tau": 1.0, "a": PI, "w": 0.01}}
    d.update(kw)
    return SweepConfig.from_dict(d)


def test_cardinality_and_order():
    cfg = config(axes=[{"name": "theta", "values": [0.5, 1.0]},
                       {"name": "tau", "start": 0.0, "stop": 1.0, "count": 3}],
                 fixed={"a": PI, "w": 0.01})
    recs = run_grid(cfg)
    assert len(recs) == 6
    coords = [(r.coordinates["theta"], r.coordinates["tau"]) for r in recs]
    assert coords == [(0.5, 0.0), (0.5, 0.5), (0.5, 1.0), (1.0, 0.0), (1.0, 0.5), (1.0, 1.0)]
    two = run_grid(config(axes=[{"name": "theta", "start": 0.1, "stop": 0.2, "count": 2}]))
    assert len(two) == 2


def test_log_axis():
    ax = Axis("a", 0.1, 10.0, 3, "log")
    np.testing.assert_allclose(ax.grid(), [0.1, 1.0, 10.0])


def test_failing_point_is_isolated():
    cfg = config(axes=[{"name": "a", "values": [1.0, 0.0, 2.0]}],
                 fixed={"theta": PI / 2, "tau": 1.0, "w": 0.01})
    recs = run_grid(cfg)
    assert [r.error is None for r in recs] == [True, False, True]
    assert "FormulaDomainError" in recs[1].error
    assert math.isnan(recs[1].value("closed-form"))
    assert math.isnan(recs[1].spread())
    text = format_table(recs, cfg, "csv")
    assert text.count("\r\n") == 4


def test_multiple_methods_report_spread():
    cfg = config(methods=["closed-form", "bloch-derivative", "sld-oracle"])
    recs = run_grid(cfg)
    assert all(r.spread() <= 1e-6 for r in recs)
    header = format_table(recs, cfg, "csv").splitlines()[0]
    assert header == "theta,phi_closed-form,phi_bloch-derivative,phi_sld-oracle,phi_spread,error"


def test_output_is_deterministic(tmp_path):
    cfg = config(axes=[{"name": "theta", "start": 0.0, "stop": PI, "count": 300}])
    a = write_table(run_grid(cfg, workers=1), cfg, tmp_path / "a.csv").read_bytes()
    b = write_table(run_grid(cfg, workers=4), cfg, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_formats():
    cfg = config(axes=[{"name": "tau", "values": [1.0, 2.0]},
                       {"name": "theta", "values": [0.5, 1.0]}],
                 fixed={"a": PI, "w": 0.01})
    recs = run_grid(cfg)
    rows = [json.loads(line) for line in format_table(recs, cfg, "jsonl").splitlines()]
    assert len(rows) == 4 and "wall_time" not in rows[0]
    assert rows[0]["coordinates"] == {"a": PI, "w": 0.01, "tau": 1.0, "theta": 0.5}
    gp = format_table(recs, cfg, "gnuplot")
    assert gp.startswith("# tau theta phi_closed-form\n")
    # blocks separated by two blank lines for gnuplot's index selector
    assert len(gp.split("\n\n\n")) == 2
    with pytest.raises(ConfigInvalid):
        format_table(recs, cfg, "xlsx")


def test_values_round_trip_exactly():
    cfg = config()
    recs = run_grid(cfg)
    lines = format_table(recs, cfg, "csv").splitlines()[1:]
    for rec, line in zip(recs, lines):
        assert float(line.split(",")[1]) == rec.value("closed-form")


@pytest.mark.parametrize("mutate,field", [
    (dict(param="gamma"), "param"),
    (dict(axes=[]), "axes"),
    (dict(axes=[{"name": "theta", "start": 0, "stop": 1, "count": 1}]), "axes.theta"),
    (dict(axes=[{"name": "zeta", "start": 0, "stop": 1, "count": 3}]), "axes.zeta"),
    (dict(axes=[{"name": "a", "start": 0, "stop": 1, "count": 3, "spacing": "log"}]), "axes.a"),
    (dict(fixed={"tau": 1.0, "a": PI, "w": 0.5}), "w"),
    (dict(fixed={"tau": 1.0, "a": PI, "beta": 1.0}), "a/beta"),
    (dict(fixed={"a": PI}), "tau"),
    (dict(fixed={"tau": 1.0, "a": PI, "theta": 1.0}), "fixed.theta"),
    (dict(methods=["magic"]), "methods"),
    (dict(format="xml"), "fmt"),
    (dict(schema_version=2), "schema_version"),
])
def test_invalid_configs(mutate, field):
    with pytest.raises(ConfigInvalid) as info:
        config(**mutate).validate()
    assert field in [p[0] for p in info.value.problems]


def test_validity_bound_can_be_overridden():
    cfg = config(fixed={"tau": 1.0, "a": PI, "w": 0.5}, allow_outside_validity=True)
    assert len(run_grid(cfg)) == 5


def test_problems_are_all_reported():
    with pytest.raises(ConfigInvalid) as info:
        config(param="gamma", methods=["magic"]).validate()
    assert len(info.value.problems) >= 2


def test_large_grid_is_fast():
    cfg = config(axes=[{"name": "theta", "start": 0.0, "stop": PI, "count": 11},
                       {"name": "tau", "start": 0.1, "stop": 5.0, "count": 11},
                       {"name": "a", "start": 0.5, "stop": 20.0, "count": 11}],
                 fixed={"w": 0.01})
    t0 = time.perf_counter()
    recs = run_grid(cfg)
    assert time.perf_counter() - t0 < 3.0
    assert len(recs) == 1331 and all(r.error is None for r in recs)


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("QFI_DETECTOR_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.setenv("QFI_DETECTOR_THREADS", "junk")
    assert worker_count(3) == 3


def test_unknown_figure():
    with pytest.raises(UnknownFigure):
        figure_config("fig99")


@pytest.mark.parametrize("fig_id", sorted(FIGURES))
def test_figure_presets(fig_id):
    cfg = figure_config(fig_id)
    cfg.validate()
    swept = [ax for ax in cfg.axes if ax.values is None]
    assert len(swept) == 1 and swept[0].count == FIGURE_POINTS
    recs = run_figure(fig_id)
    assert all(r.error is None for r in recs)
    assert all(np.isfinite(r.results[0].fisher) for r in recs)


# frozen from the first run verified against the high-precision oracle
GOLDEN = [
    ("fig2", 0, 0.3678768719921784),
    ("fig3", 0, 0.2690023171439598),
    ("fig3", 200, 0.26906558095438204),
    ("fig4a", 50, 0.1256291780466714),
    ("fig6", 13, 0.3192758188487336),
    ("fig6", 200, 0.1966130257122073),
    ("fig6b", 200, 4.5409454088362864e-05),
    ("fig8", 200, 0.29405270787295756),
]


@pytest.mark.parametrize("fig_id,index,value", GOLDEN)
def test_figure_golden_values(fig_id, index, value):
    rec = run_figure(fig_id)[index]
    assert rec.results[0].fisher == pytest.approx(value, rel=1e-10)
