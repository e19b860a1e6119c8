"""Bloch-vector evolution under the detector's Lindblad generator.

In Bloch form the master equation is

    dw1/dtau = -(A/2) w1 - Omega w2
    dw2/dtau =  Omega w1 - (A/2) w2
    dw3/dtau = -A w3 + B

with A = gamma_+ + gamma_-, B = gamma_+ - gamma_-.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonPhysicalDensity, StepTooLarge
from .rates import DetectorParams, RateCoefficients

_TAYLOR_SWITCH = 1e-8
MAX_EVALS = 200_000


@dataclass(frozen=True)
class BlochState:
    w1: float
    w2: float
    w3: float

    @classmethod
    def from_array(cls, v) -> "BlochState":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def is_physical(self, tol: float = 1e-12) -> bool:
        return self.w1**2 + self.w2**2 + self.w3**2 <= 1.0 + tol


@dataclass(frozen=True)
class InitialState:
    """sin(theta/2)|0> + exp(-i phi) cos(theta/2)|1>; theta = 0 is excited."""

    theta: float
    phi: float = 0.0

    def bloch(self) -> BlochState:
        st = np.sin(self.theta)
        return BlochState(st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta))


def relax_factor(A, tau):
    """(1 - exp(-A tau)) / A, continuous through A = 0."""
    A = np.asarray(A, dtype=float)
    tau = np.asarray(tau, dtype=float)
    x = A * tau
    small = np.abs(x) < _TAYLOR_SWITCH
    safe_A = np.where(small, 1.0, A)
    exact = -np.expm1(-x) / safe_A
    return np.where(small, tau * (1.0 - 0.5 * x), exact)


def propagate(w0, A, B, Omega, tau):
    """Evolve an arbitrary Bloch vector ``w0`` for proper time ``tau``."""
    w0 = np.asarray(w0, dtype=float)
    half = np.exp(-0.5 * A * tau)
    c, s = np.cos(Omega * tau), np.sin(Omega * tau)
    w1 = (w0[0] * c - w0[1] * s) * half
    w2 = (w0[0] * s + w0[1] * c) * half
    w3 = w0[2] * np.exp(-A * tau) + B * relax_factor(A, tau)
    return np.array([w1, w2, w3])


def bloch_vector(theta, phi, tau, A, B, Omega):
    """Closed-form evolved Bloch vector of the (theta, phi) family.

    Broadcasts over array arguments; the leading axis has length 3.
    """
    half = np.exp(-0.5 * A * tau)
    st = np.sin(theta)
    arg = Omega * tau + phi
    return np.array([
        st * np.cos(arg) * half,
        st * np.sin(arg) * half,
        np.cos(theta) * np.exp(-A * tau) + B * relax_factor(A, tau),
    ])


def _check_inputs(rc: RateCoefficients, tau):
    if np.any(np.asarray(tau) < 0):
        raise ValueError("tau must be >= 0")
    if not rc.is_physical():
        raise NonPhysicalDensity(f"rates violate A >= |B|: A={rc.A!r}, B={rc.B!r}")


def evolve_closed_form(init: InitialState, rc: RateCoefficients,
                       p: DetectorParams, tau: float) -> BlochState:
    _check_inputs(rc, tau)
    return BlochState.from_array(
        bloch_vector(init.theta, init.phi, tau, rc.A, rc.B, p.Omega))


def evolve_ode(init: InitialState, rc: RateCoefficients, p: DetectorParams,
               tau: float, tol: float = 1e-10, max_step: float = np.inf) -> BlochState:
    """Integrate the Bloch equations numerically (DOP853).

    Raises ``StepTooLarge`` if the integrator cannot meet ``tol``.
    """
    _check_inputs(rc, tau)
    y = integrate_bloch(init.bloch().as_array(), rc.A, rc.B, p.Omega, tau,
                        tol=tol, max_step=max_step)
    return BlochState.from_array(y)


class _BudgetExceeded(Exception):
    pass


def integrate_bloch(y0, A, B, Omega, tau, tol=1e-10, max_step=np.inf,
                    max_evals=MAX_EVALS):
    """Numerically integrate the Bloch equations from an arbitrary ``y0``.

    With ``B = 0`` this also propagates a tangent vector (the derivative of
    the state with respect to any parameter of the initial condition).
    Raises ``StepTooLarge`` when the tolerance cannot be met within
    ``max_evals`` right-hand-side evaluations (stiff rates, tiny steps).
    """
    y0 = np.asarray(y0, dtype=float)
    if not all(np.isfinite(v) for v in (A, B, Omega, tau)) or not np.all(np.isfinite(y0)):
        raise ValueError("rates, frequency, time and initial state must be finite")
    if tau == 0:
        return y0.copy()
    count = [0]

    def rhs(_t, y):
        count[0] += 1
        if count[0] > max_evals:
            raise _BudgetExceeded
        return [-0.5 * A * y[0] - Omega * y[1],
                Omega * y[0] - 0.5 * A * y[1],
                -A * y[2] + B]

    try:
        sol = solve_ivp(rhs, (0.0, tau), y0, method="DOP853", rtol=tol,
                        atol=tol * 1e-2, max_step=max_step)
    except _BudgetExceeded:
        raise StepTooLarge(f"tolerance {tol:g} not reached within {max_evals} "
                           "evaluations; the step size needed is too small") from None
    if not sol.success:
        raise StepTooLarge(f"integration failed at tol={tol:g}: {sol.message}")
    return sol.y[:, -1]
