"""Lindblad rate coefficients for the two-level detector.

Rates follow the convention

    gamma_-+ = mu^2 * Re int exp(+-i w0 s) G+(s - i eps) ds,

so that the inertial detector has gamma_- = gamma0 = mu^2 w0 / 2pi (decay) and
gamma_+ = 0.  Closed forms are evaluated in overflow-safe form; ``rates_numeric``
is an independent quadrature route over the Wightman function.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, special

from .errors import NonConvergence, WindowTooSmall
from .trajectory import FOUR_PI2, Kind, Trajectory, wightman

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectorParams:
    """Level spacing ``omega0`` and coupling ``mu`` of the detector."""

    omega0: float = 1.0
    mu: float = 0.1

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")
        if not self.mu >= 0:
            raise ValueError(f"mu must be >= 0, got {self.mu!r}")

    @property
    def gamma0(self) -> float:
        """Inertial spontaneous emission rate."""
        return self.mu**2 * self.omega0 / (2.0 * np.pi)

    @property
    def Omega(self) -> float:
        # Lamb shift neglected
        return self.omega0

    @classmethod
    def rescaled(cls) -> "DetectorParams":
        """omega0 = 1 and gamma0 = 1, the units used by the qfi module."""
        return cls(omega0=1.0, mu=math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class RateCoefficients:
    gamma_plus: float
    gamma_minus: float
    A: float
    B: float
    gamma_z: float = 0.0
    error: float = 0.0

    @classmethod
    def from_gammas(cls, gamma_plus, gamma_minus, error=0.0):
        return cls(gamma_plus, gamma_minus, gamma_plus + gamma_minus,
                   gamma_plus - gamma_minus, 0.0, error)

    def is_physical(self, tol: float = 1e-12) -> bool:
        return self.A + tol * max(1.0, abs(self.A)) >= abs(self.B)

    def as_dict(self) -> dict:
        return {"gamma_plus": self.gamma_plus, "gamma_minus": self.gamma_minus,
                "gamma_z": self.gamma_z, "A": self.A, "B": self.B,
                "error": self.error}


# -- stable special functions -------------------------------------------------

def coth(x):
    """coth for x > 0; equals 1 to machine precision once x > ~19."""
    return 1.0 / np.tanh(x)


def planck(x):
    """1 / (e^x - 1) for x > 0 without overflow."""
    return np.exp(-x) / -np.expm1(-x)


def _bernoulli(n):
    """Exact Bernoulli numbers B_0..B_n (Akiyama-Tanigawa)."""
    out, row = [], []
    for m in range(n + 1):
        row.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        out.append(row[0])
    return out


# x coth(x/2) - 2 = sum_{n>=1} 2 B_2n x^2n / (2n)!; converges for |x| < 2 pi
_SERIES_TERMS = 16
_XCOTH_SERIES = tuple(float(2 * b / math.factorial(2 * n))
                      for n, b in enumerate(_bernoulli(2 * _SERIES_TERMS)[2::2], start=1))
_SERIES_SWITCH = 1.5


def xcoth_minus_two(x):
    """x coth(x/2) - 2 without cancellation at small x."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    series = sum(c * xs ** (2 * k + 2) for k, c in enumerate(_XCOTH_SERIES))
    xl = np.where(small, 1.0, x)
    direct = xl * coth(0.5 * xl) - 2.0
    return np.where(small, series, direct)


def drift_coefficient(a, omega0=1.0):
    """Coefficient f(a) of the order-w^2 response correction.

    f(a) = a e^x / (6 (e^x - 1)^2) * [2 + 9 w0^2/a^2
           - x (1 + w0^2/a^2) coth(x/2)],    x = 2 pi w0 / a.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ValueError("acceleration must be > 0")
    x = 2.0 * np.pi * omega0 / a
    r2 = (omega0 / a) ** 2
    # e^x/(e^x-1)^2 written with e^-x so it underflows instead of overflowing
    weight = np.exp(-x) / np.expm1(-x) ** 2
    d = xcoth_minus_two(x)
    bracket = r2 * (7.0 - d) - d
    return a * weight * bracket / 6.0


def _check_a(a):
    if not a > 0 or not np.isfinite(a):
        raise ValueError(f"acceleration must be finite and > 0, got {a!r}")


# -- closed forms -------------------------------------------------------------

def rates_inertial(p: DetectorParams) -> RateCoefficients:
    """Rates of a detector on any inertial worldline (independent of w)."""
    g0 = p.gamma0
    return RateCoefficients(0.0, g0, g0, -g0)


def rates_nonrel(p: DetectorParams, a: float, w: float) -> RateCoefficients:
    """Order-w^2 rates on the drifted-acceleration worldline (|w| << 1)."""
    _check_a(a)
    x = 2.0 * np.pi * p.omega0 / a
    g0 = p.gamma0
    mu2 = p.mu**2
    corr = mu2 * drift_coefficient(a, p.omega0) * w * w
    n = planck(x)
    gplus = mu2 * p.omega0 / (2.0 * np.pi) * n - corr
    gminus = mu2 * p.omega0 / (2.0 * np.pi) * (1.0 + n) - corr
    A = g0 * (coth(0.5 * x) - 4.0 * np.pi / p.omega0 * drift_coefficient(a, p.omega0) * w * w)
    return RateCoefficients(float(gplus), float(gminus), float(A), -g0)


def rates_ultrarel(p: DetectorParams, a: float, w: Optional[float] = None,
                   limit: bool = False) -> RateCoefficients:
    """Rates in the ultra-relativistic regime, suppressed by w^-4.

    This is a model form: the uniform-acceleration rates scaled by w^-4.
    It is not the exact large-w limit of the drifted correlator.
    ``limit=True`` returns the w -> infinity values A = B = 0.
    """
    _check_a(a)
    if limit:
        return RateCoefficients(0.0, 0.0, 0.0, 0.0)
    if w is None or not w > 0:
        raise ValueError(f"finite-w ultra-relativistic rates need w > 0, got {w!r}")
    x = 2.0 * np.pi * p.omega0 / a
    s = 1.0 / w**4
    g0 = p.gamma0
    n = planck(x)
    base = p.mu**2 * p.omega0 / (2.0 * np.pi)
    return RateCoefficients(float(base * n * s), float(base * (1.0 + n) * s),
                            float(g0 * coth(0.5 * x) * s), -g0 * s)


# -- numeric route ------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for ``rates_numeric``.

    ``window`` and ``eps_schedule`` are in units of the trajectory time scale
    (1/alpha for accelerated kinds, 1/omega0 for the inertial kind) unless
    ``absolute`` is set.
    """

    window: Optional[float] = None
    eps_schedule: Sequence[float] = (1e-2, 5e-3, 2.5e-3)
    rel_tol: float = 1e-4
    max_subdivisions: int = 400
    absolute: bool = False
    quad_epsrel: float = 1e-12

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_schedule)
        object.__setattr__(self, "eps_schedule", eps)
        if len(eps) < 2:
            raise ValueError("eps_schedule needs at least two regulators")
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps_schedule must be positive and strictly decreasing")
        if self.window is not None and not self.window > 0:
            raise ValueError("window must be > 0")
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


def richardson_zero(eps: Sequence[float], values: Sequence[float]):
    """Extrapolate values(eps) to eps = 0 assuming a power series in eps.

    Returns ``(estimate, error)`` where ``error`` is the change between the
    last two orders of the Neville table.
    """
    eps = np.asarray(eps, dtype=float)
    col = np.asarray(values, dtype=float)
    prev = col
    for j in range(1, len(col)):
        nxt = (col[1:] * eps[:-j] - col[:-1] * eps[j:]) / (eps[:-j] - eps[j:])
        prev, col = col, nxt
    return float(col[0]), float(abs(col[0] - prev[-1]))


def _response(traj, energy, eps, window, spec):
    """Re int_{-T}^{T} exp(-i E s) G+(s - i eps) ds for an even G."""
    delta = min(10.0 * eps, window)
    kw = dict(limit=spec.max_subdivisions, epsabs=0.0, epsrel=spec.quad_epsrel)

    def centre(s):
        return (np.exp(-1j * energy * s) * wightman(traj, s, eps)).real

    def g_re(s):
        return wightman(traj, s, eps).real

    def g_im(s):
        return wightman(traj, s, eps).imag

    with np.errstate(all="ignore"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            c, _ = integrate.quad(centre, 0.0, delta, **dict(kw, limit=2 * spec.max_subdivisions))
            if window > delta:
                o1, _ = integrate.quad(g_re, delta, window, weight="cos", wvar=energy, **kw)
                o2, _ = integrate.quad(g_im, delta, window, weight="sin", wvar=energy, **kw)
            else:
                o1 = o2 = 0.0
    return 2.0 * (c + o1 + o2)


def _inertial_tail(energy, window):
    """2 Re int_T^inf exp(-iEs) (-1/(4 pi^2 s^2)) ds, regulator dropped."""
    si, _ = special.sici(abs(energy) * window)
    # int_T^inf cos(Es)/s^2 ds = cos(ET)/T - |E| (pi/2 - Si(|E| T))
    tail = np.cos(energy * window) / window - abs(energy) * (0.5 * np.pi - si)
    return -2.0 * tail / FOUR_PI2


def rates_numeric(traj: Trajectory, p: DetectorParams,
                  quad: Optional[QuadratureSpec] = None) -> RateCoefficients:
    """Rates from adaptive quadrature of the Wightman function.

    Each regulator in the schedule gives a finite-eps transform; the results
    are extrapolated to eps -> 0.  Raises ``NonConvergence`` or
    ``WindowTooSmall`` when the respective error estimate exceeds
    ``quad.rel_tol`` relative to A.
    """
    quad = quad or QuadratureSpec()
    if traj.kind.accelerated:
        scale = 1.0 / traj.alpha
        default_window = 40.0
    else:
        scale = 1.0 / p.omega0
        default_window = 1e3
    if quad.absolute:
        scale = 1.0
    window = (quad.window if quad.window is not None else default_window) * scale
    eps = [e * scale for e in quad.eps_schedule]
    w0 = p.omega0
    mu2 = p.mu**2

    # e^{-i w0 s} feeds absorption (gamma_+), e^{+i w0 s} emission (gamma_-)
    plus_vals, minus_vals = [], []
    for e in eps:
        plus_vals.append(_response(traj, w0, e, window, quad))
        minus_vals.append(_response(traj, -w0, e, window, quad))

    if traj.kind.accelerated:
        tail = 2.0 * abs(complex(wightman(traj, window, eps[-1]))) * scale
        plus_tail = minus_tail = 0.0
    else:
        plus_tail = _inertial_tail(w0, window)
        minus_tail = _inertial_tail(-w0, window)
        # remainder after the analytic tail is O(1/(w0 T)^2) of that tail
        tail = 1.0 / (FOUR_PI2 * w0**2 * window**3)

    gp, err_p = richardson_zero(eps, plus_vals)
    gm, err_m = richardson_zero(eps, minus_vals)
    gp = mu2 * (gp + plus_tail)
    gm = mu2 * (gm + minus_tail)
    err = mu2 * (err_p + err_m)
    scale_A = max(abs(gp) + abs(gm), np.finfo(float).tiny)
    log.debug("rates_numeric %s: gamma+=%g gamma-=%g err=%g tail=%g",
              traj, gp, gm, err, mu2 * tail)
    if mu2 * tail > quad.rel_tol * scale_A:
        raise WindowTooSmall(
            f"tail estimate {mu2 * tail:.3e} exceeds {quad.rel_tol:.1e} x A ({scale_A:.3e})")
    if err > quad.rel_tol * scale_A:
        raise NonConvergence(
            f"extrapolation residual {err:.3e} exceeds {quad.rel_tol:.1e} x A ({scale_A:.3e})")
    return RateCoefficients.from_gammas(gp, gm, error=err + mu2 * tail)


def rates_for(traj: Trajectory, p: DetectorParams) -> RateCoefficients:
    """Closed-form rates matching the trajectory family."""
    kind = traj.kind
    if kind is Kind.INERTIAL_DRIFT:
        return rates_inertial(p)
    if kind in (Kind.UNIFORM_ACCELERATION, Kind.DRIFTED_NONREL):
        return rates_nonrel(p, traj.a, traj.w)
    if kind is Kind.DRIFTED_ULTRAREL:
        return rates_ultrarel(p, traj.a, traj.w)
    raise ValueError("no closed form for the exact drifted trajectory; use rates_numeric")
