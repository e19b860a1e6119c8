"""Acceptance checks, shared by ``relqfi verify`` and the test-suite.

Each check returns ``(passed, detail)``; ``run_suites`` adds timing and
enforces the per-check runtime budget.
"""
from __future__ import annotations

import itertools
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import bloch_vector, integrate_bloch
from .qfi import (bloch_dbeta, compute_qfi, qfi_bloch, qfi_phi_from_rate,
                  qfi_sld, density_matrix, qfi_theta_from_rate, qfi_ultrarel)
from .rates import (DetectorParams, QuadratureSpec, rates_inertial,
                    rates_nonrel, rates_numeric, rates_ultrarel)
from .sweep import FIGURES, figure_config, format_table, run_figure, run_grid
from .trajectory import Trajectory

PI = math.pi

ROUTE_THETA = (0.3, 0.9, PI / 2, 2.2, 2.9)
ROUTE_TAU = (0.25, 0.5, 1.0, 2.0, 3.0)
ROUTE_A = (0.5, 1.0, PI, 5.0, 10.0)
ROUTE_W = (0.0, 0.05, 0.1)
ROUTE_PHI = 0.7


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float
    budget: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.elapsed:.2f}s / {self.budget:g}s)"


def _rel(x, y):
    return abs(x - y) / max(abs(x), abs(y), 1e-300)


def check_inertial(seed=0):
    """Inertial QFI: closed forms vs exp(-tau), and an ODE tangent route."""
    p = DetectorParams.rescaled()
    rc = rates_inertial(p)
    h = rc.A / p.gamma0
    worst_closed = worst_ode = 0.0
    for theta, phi, tau in itertools.product(np.linspace(0, 2 * PI, 9),
                                             np.linspace(0, 2 * PI, 5)[:-1],
                                             (0.0, 0.5, 1.0, 2.0, 5.0)):
        f_th = float(qfi_theta_from_rate(theta, tau, h))
        f_ph = float(qfi_phi_from_rate(theta, tau, h))
        worst_closed = max(worst_closed, abs(f_th - math.exp(-tau)),
                           abs(f_ph - math.sin(theta) ** 2 * math.exp(-tau)))
        if phi != 0.0:
            continue  # the ODE cross-check at one azimuth keeps this fast
        st, ct = math.sin(theta), math.cos(theta)
        y0 = [st * math.cos(phi), st * math.sin(phi), ct]
        v = integrate_bloch(y0, rc.A, rc.B, p.Omega, tau, tol=1e-12)
        d_th = integrate_bloch([ct * math.cos(phi), ct * math.sin(phi), -st],
                               rc.A, 0.0, p.Omega, tau, tol=1e-12)
        d_ph = integrate_bloch([-st * math.sin(phi), st * math.cos(phi), 0.0],
                               rc.A, 0.0, p.Omega, tau, tol=1e-12)
        worst_ode = max(worst_ode, abs(qfi_bloch(v, d_th) - math.exp(-tau)),
                        abs(qfi_bloch(v, d_ph) - st**2 * math.exp(-tau)))
    ok = worst_closed <= 1e-12 and worst_ode <= 1e-8
    return ok, f"closed-form max err {worst_closed:.2e} (<=1e-12), ODE max err {worst_ode:.2e} (<=1e-8)"


def check_thermality(seed=0):
    """Numeric Fourier route reproduces the Planck factor and detailed balance."""
    p = DetectorParams(omega0=1.0, mu=0.1)
    worst_planck = worst_ratio = 0.0
    for a in (0.5, 1.0, PI, 10.0):
        rc = rates_numeric(Trajectory.uniform(a), p)
        x = 2 * PI * p.omega0 / a
        planck = p.mu**2 * p.omega0 / (2 * PI) / (math.exp(x) - 1.0)
        worst_planck = max(worst_planck, _rel(rc.gamma_plus, planck))
        worst_ratio = max(worst_ratio, _rel(rc.gamma_plus / rc.gamma_minus, math.exp(-x)))
    ok = worst_planck <= 1e-3 and worst_ratio <= 1e-3
    return ok, f"Planck rel err {worst_planck:.2e}, detailed-balance rel err {worst_ratio:.2e} (<=1e-3)"


EXPANSION_QUAD = QuadratureSpec(eps_schedule=tuple(2e-2 / 2**k for k in range(5)),
                                rel_tol=1e-9)


def expansion_constants(a=1.0, ws=(0.05, 0.025), quad=EXPANSION_QUAD):
    """Per w: (A_numeric - A_closed) / (mu^2 w^4), the difference, its error."""
    p = DetectorParams(omega0=1.0, mu=0.1)
    out = []
    for w in ws:
        num = rates_numeric(Trajectory.drifted(a, w), p, quad)
        closed = rates_nonrel(p, a, w)
        diff = num.A - closed.A
        out.append((diff / (p.mu**2 * w**4), diff, num.error))
    return out


def check_expansion(seed=0):
    (k1, d1, e1), (k2, d2, e2) = expansion_constants()
    ratio = k2 / k1
    # the w^4 signal must stand well clear of the quadrature error
    resolved = abs(d1) > 10 * e1 and abs(d2) > 10 * e2
    ok = 0.5 <= ratio <= 2.0 and resolved
    return ok, (f"K(w=0.05)={k1:.4e}, K(w=0.025)={k2:.4e}, ratio {ratio:.4f} "
                f"(band [0.5, 2]); quadrature err {max(e1, e2):.1e}")


def route_grid():
    return itertools.product(ROUTE_THETA, ROUTE_TAU, ROUTE_A, ROUTE_W)


def check_routes(seed=0):
    worst = {"phi": 0.0, "theta": 0.0, "beta": 0.0}
    for theta, tau, a, w in route_grid():
        for param in worst:
            vals = [compute_qfi(param, theta, tau, a=a, w=w, phi=ROUTE_PHI, method=m).fisher
                    for m in ("closed-form", "bloch-derivative", "sld-oracle")]
            worst[param] = max(worst[param], _rel(max(vals), min(vals)))
    # random mixed states: Bloch formula against the SLD oracle
    rng = np.random.default_rng(seed)
    worst_rand = 0.0
    for _ in range(50):
        v = rng.normal(size=3)
        v *= 0.6 / np.linalg.norm(v)
        dv = rng.normal(size=3)
        f_bloch = qfi_bloch(v, dv)
        f_sld = qfi_sld(lambda x: density_matrix(v + x * dv), 0.0, 1e-3)
        worst_rand = max(worst_rand, _rel(f_bloch, f_sld))
    ok = max(worst.values()) <= 1e-6 and worst_rand <= 1e-6
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"max relative spread {detail}; random states {worst_rand:.1e} (<=1e-6)"


def _column(records, method):
    return np.array([r.value(method) for r in records])


def check_figures(seed=0):
    notes, ok = [], True

    # symmetry axes
    sym = 0.0
    for tau, d in itertools.product((1.0, 2.0, 3.0), np.linspace(0.05, 1.5, 12)):
        kw = dict(a=PI, w=0.01)
        sym = max(sym,
                  abs(compute_qfi("phi", PI / 2 + d, tau, **kw).fisher
                      - compute_qfi("phi", PI / 2 - d, tau, **kw).fisher),
                  abs(compute_qfi("theta", d, tau, **kw).fisher
                      - compute_qfi("theta", -d, tau, **kw).fisher))
    for tau, d in itertools.product((1.0, 5.0, 10.0), np.linspace(0.05, 1.5, 12)):
        kw = dict(beta=10.0, w=0.01, method="bloch-derivative")
        sym = max(sym, abs(compute_qfi("beta", PI + d, tau, **kw).fisher
                           - compute_qfi("beta", PI - d, tau, **kw).fisher))
    ok &= sym <= 1e-12
    notes.append(f"symmetry {sym:.1e}")

    # decreasing in acceleration, vanishing at a = 50
    for fig in ("fig2", "fig5"):
        recs = run_figure(fig)
        vals = _column(recs, "closed-form").reshape(3, -1)
        dec = bool(np.all(np.diff(vals, axis=1) < 0))
        last = vals[0, -1]
        ok &= dec and last < 1e-3
        notes.append(f"{fig} decreasing={dec} F(a=50,tau=1)={last:.1e}")

    # increasing in w
    for fig, method in (("fig3", "closed-form"), ("fig7", "closed-form"), ("fig8", "bloch-derivative")):
        vals = _column(run_figure(fig), method)
        inc = bool(np.all(np.diff(vals) > 0))
        ok &= inc
        notes.append(f"{fig} increasing={inc}")

    # long-time plateau independent of the initial state
    plateau = [compute_qfi("beta", th, 50.0, beta=10.0, w=0.01).fisher
               for th in (PI, 2 * PI / 3, PI / 2)]
    spread = (max(plateau) - min(plateau)) / max(plateau)
    ok &= spread <= 0.01
    notes.append(f"beta=10 plateau spread {spread:.1e}")

    # beta = 1: rises, peaks, settles to a nonzero value
    taus = np.linspace(0.0, 50.0, 1001)
    f = np.array([compute_qfi("beta", PI, t, beta=1.0, w=0.01).fisher for t in taus])
    k = int(np.argmax(f))
    interior = 0 < k < len(taus) - 1 and f[k] > f[-1] * (1 + 1e-6)
    ok &= interior and f[-1] > 0.01
    notes.append(f"beta=1 peak at tau={taus[k]:.2f} ({f[k]:.3f}), plateau {f[-1]:.3f}")
    return bool(ok), "; ".join(notes)


def check_ultrarel(seed=0):
    p = DetectorParams(omega0=1.0, mu=0.1)
    exact = all(qfi_ultrarel(th) == (1.0, math.sin(th) ** 2)
                for th in np.linspace(0, 2 * PI, 17))
    lim = rates_ultrarel(p, 1.0, limit=True)
    worst_bloch = 0.0
    for th, tau in itertools.product(np.linspace(0.1, 3.0, 7), (0.0, 1.0, 10.0, 100.0)):
        v = bloch_vector(th, 0.0, tau, lim.A, lim.B, 1.0)
        dth = np.array([math.cos(th) * math.cos(tau), math.cos(th) * math.sin(tau), -math.sin(th)])
        dph = np.array([-v[1], v[0], 0.0])
        worst_bloch = max(worst_bloch, abs(qfi_bloch(v, dth) - 1.0),
                          abs(qfi_bloch(v, dph) - math.sin(th) ** 2))
    worst_w4 = 0.0
    for a in (0.5, 1.0, PI, 10.0):
        rc = rates_ultrarel(p, a, 10.0)
        ref = p.gamma0 / math.tanh(PI * p.omega0 / a)
        worst_w4 = max(worst_w4, _rel(rc.A * 1e4, ref), _rel(rc.B * 1e4, -p.gamma0))
    ok = exact and lim.A == 0.0 and lim.B == 0.0 and worst_bloch <= 1e-12 and worst_w4 <= 1e-12
    return ok, (f"closed form exact={exact}, Bloch route err {worst_bloch:.1e}, "
                f"w=10 suppression rel err {worst_w4:.1e} (<=1e-12)")


def check_derivatives(seed=0):
    worst = 0.0
    for theta, tau, a, w in route_grid():
        beta = 2 * PI / a
        d_an = bloch_dbeta(theta, ROUTE_PHI, tau, beta, w)
        d_fd = bloch_dbeta(theta, ROUTE_PHI, tau, beta, w, method="fd")
        worst = max(worst, float(np.max(np.abs(d_an - d_fd))))
    return worst <= 1e-6, f"max |analytic - FD| {worst:.1e} (<=1e-6)"


def check_determinism(seed=0):
    same = True
    with tempfile.TemporaryDirectory() as tmp:
        for fig in FIGURES:
            cfg = figure_config(fig)
            outs = []
            for k, workers in enumerate((1, 4)):
                path = Path(tmp) / f"{fig}_{k}.csv"
                path.write_bytes(format_table(run_grid(cfg, workers), cfg).encode())
                outs.append(path.read_bytes())
            same &= outs[0] == outs[1]
    return same, f"{len(FIGURES)} figures byte-identical across runs: {same}"


SUITES = {
    "inertial": (check_inertial, 1.0),
    "thermality": (check_thermality, 60.0),
    "expansion": (check_expansion, 120.0),
    "routes": (check_routes, 30.0),
    "figures": (check_figures, 60.0),
    "ultrarel": (check_ultrarel, 10.0),
    "derivatives": (check_derivatives, 30.0),
    "determinism": (check_determinism, 60.0),
}


def run_check(name: str, seed: int = 0) -> CheckResult:
    func, budget = SUITES[name]
    t0 = time.perf_counter()
    try:
        passed, detail = func(seed=seed)
    except Exception as exc:  # a crashing check is a failing check
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    if elapsed > budget:
        passed = False
        detail += "; over runtime budget"
    return CheckResult(name, bool(passed), detail, elapsed, budget)


def run_suites(names=None, seed: int = 0):
    return [run_check(n, seed) for n in (names or SUITES)]
