"""Quantum Fisher information of the evolved detector state.

Everything here works in rescaled units: time in units of 1/gamma0 and
acceleration in units of omega0, so the decay rate of the Bloch vector is the
dimensionless factor ``h(a, w) = A / gamma0`` and ``B / gamma0 = -1``.  The
rotation frequency ``omega`` (= Omega / gamma0) only shifts the phase and
never changes a Fisher information; it defaults to 1.

Three routes are provided for each parameter:

``closed-form``       explicit formulas in terms of h
``bloch-derivative``  |dw|^2 + (w.dw)^2 / (1 - |w|^2) with an analytic dw
``sld-oracle``        spectral SLD formula on 2x2 density matrices, with the
                      parameter derivative taken by finite differences
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dynamics import bloch_vector, relax_factor
from .errors import (BranchAmbiguity, DerivativeUnstable, FormulaDomainError,
                     NonPhysicalDensity)
from .rates import coth, drift_coefficient, xcoth_minus_two

DELTA_PURE = 1e-9
METHODS = ("closed-form", "bloch-derivative", "sld-oracle")
PARAMS = ("theta", "phi", "beta")

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass(frozen=True)
class EstimationParameter:
    label: str
    value: float

    def __post_init__(self):
        if self.label not in PARAMS:
            raise ValueError(f"unknown parameter {self.label!r}")
        if self.label == "beta" and not self.value > 0:
            raise ValueError("beta must be > 0")

    @property
    def a(self) -> float:
        """Rescaled acceleration 2 pi / beta (beta parameter only)."""
        if self.label != "beta":
            raise AttributeError("only beta maps to an acceleration")
        return 2.0 * math.pi / self.value


@dataclass(frozen=True)
class QfiResult:
    param: EstimationParameter
    fisher: float
    method: str
    derivative_norm: Optional[float] = None

    def as_dict(self) -> dict:
        return {"param": self.param.label, "value": self.param.value,
                "method": self.method, "fisher": self.fisher,
                "derivative_norm": self.derivative_norm}


# -- decay factor -------------------------------------------------------------

def _check_a(a):
    if not np.all(np.asarray(a) > 0):
        raise FormulaDomainError(f"rescaled acceleration must be > 0, got {a!r}")


def decay_factor(a, w):
    """h(a, w) = coth(pi/a) - 4 pi f(a) w^2, the rescaled decay rate."""
    _check_a(a)
    return coth(np.pi / np.asarray(a, dtype=float)) - 4.0 * np.pi * drift_coefficient(a) * w * w


def _half_csch2(beta):
    # 1 / (2 sinh^2(beta/2)) = 2 e^-beta / (1 - e^-beta)^2
    return 2.0 * np.exp(-beta) / np.expm1(-beta) ** 2


def decay_factor_dbeta(beta, w):
    """d h / d beta at fixed w, where a = 2 pi / beta."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise FormulaDomainError("beta must be > 0")
    k2 = beta**2 / (4.0 * np.pi**2)
    cth = coth(0.5 * beta)
    hc = _half_csch2(beta)
    # f = P Q with P = pi / (12 beta sinh^2(beta/2))
    P = np.pi / (6.0 * beta) * hc
    d = xcoth_minus_two(beta)
    Q = k2 * (7.0 - d) - d
    dP = -P * (1.0 / beta + cth)
    dQ = 9.0 * beta / (2.0 * np.pi**2) - (1.0 + 3.0 * k2) * cth + beta * (1.0 + k2) * hc
    return -hc - 4.0 * np.pi * w * w * (dP * Q + P * dQ)


# -- Bloch-vector formula -----------------------------------------------------

def qfi_bloch(omega, domega) -> float:
    """Fisher information from a Bloch vector and its parameter derivative."""
    omega = np.asarray(omega, dtype=float)
    domega = np.asarray(domega, dtype=float)
    if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(domega))):
        raise ValueError("Bloch vector and derivative must be finite")
    n2 = float(omega @ omega)
    if n2 > (1.0 + DELTA_PURE) ** 2:
        raise NonPhysicalDensity(f"|w| = {math.sqrt(n2):.12g} > 1")
    d2 = float(domega @ domega)
    dot = float(omega @ domega)
    if math.sqrt(n2) >= 1.0 - DELTA_PURE:
        if abs(dot) > 1e-6:
            raise BranchAmbiguity(
                f"pure state with radial derivative w.dw = {dot:.3e}")
        return d2
    return d2 + dot * dot / (1.0 - n2)


def density_matrix(omega) -> np.ndarray:
    """(I + w . sigma) / 2."""
    omega = np.asarray(omega, dtype=float)
    return 0.5 * (np.eye(2) + np.tensordot(omega, PAULI, axes=1))


def _sld_fisher(rho, drho, tol=1e-12):
    lam, vec = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if lam[0] < -1e-10:
        raise NonPhysicalDensity(f"negative eigenvalue {lam[0]:.3e}")
    d = vec.conj().T @ drho @ vec
    total = 0.0
    for i in range(len(lam)):
        for j in range(len(lam)):
            s = lam[i] + lam[j]
            if s > tol:
                total += 2.0 * abs(d[i, j]) ** 2 / s
    return float(total)


def qfi_sld(rho_of_X: Callable[[float], np.ndarray], X: float,
            fd_step: float = 1e-3) -> float:
    """Spectral SLD Fisher information with a finite-difference derivative.

    The derivative is a Richardson-corrected central difference; the result
    is recomputed with half the step and ``DerivativeUnstable`` is raised when
    the two differ by more than 1e-6 relative.
    """
    if not fd_step > 0:
        raise ValueError("fd_step must be > 0")
    rho = np.asarray(rho_of_X(X), dtype=complex)
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise NonPhysicalDensity("density matrix does not have unit trace")
    samples = {}

    def central(h):
        for x in (X + h, X - h):
            if x not in samples:
                samples[x] = np.asarray(rho_of_X(x), dtype=complex)
        return (samples[X + h] - samples[X - h]) / (2.0 * h)

    h = fd_step
    d1, d2, d4 = central(h), central(h / 2), central(h / 4)
    f_coarse = _sld_fisher(rho, (4.0 * d2 - d1) / 3.0)
    f_fine = _sld_fisher(rho, (4.0 * d4 - d2) / 3.0)
    if abs(f_fine - f_coarse) > 1e-6 * max(abs(f_fine), 1e-12):
        raise DerivativeUnstable(
            f"SLD Fisher information moved from {f_coarse!r} to {f_fine!r} on halving the step")
    for x in (X + h, X - h, X + h / 4, X - h / 4):
        lam = np.linalg.eigvalsh(0.5 * (samples[x] + samples[x].conj().T))
        if lam[0] < -1e-10:
            raise NonPhysicalDensity(f"negative eigenvalue {lam[0]:.3e} at X={x!r}")
    return f_fine


# -- evolved state and its derivatives ----------------------------------------

def evolved_bloch(theta, phi, tau, a, w, omega=1.0):
    """Bloch vector at rescaled time ``tau`` for acceleration ``a`` and drift ``w``."""
    h = decay_factor(a, w)
    return bloch_vector(theta, phi, tau, h, -1.0, omega)


def _bloch_dtheta(theta, phi, tau, h, omega):
    half = np.exp(-0.5 * h * tau)
    arg = omega * tau + phi
    ct = np.cos(theta)
    return np.array([ct * np.cos(arg) * half, ct * np.sin(arg) * half,
                     -np.sin(theta) * np.exp(-h * tau)])


def _bloch_dphi(theta, phi, tau, h, omega):
    v = bloch_vector(theta, phi, tau, h, -1.0, omega)
    return np.array([-v[1], v[0], np.zeros_like(v[2])])


def _bloch_dA(theta, phi, tau, A, B, omega):
    """Partial derivative of the evolved Bloch vector with respect to A."""
    v = bloch_vector(theta, phi, tau, A, B, omega)
    e = np.exp(-A * tau)
    R = relax_factor(A, tau)
    x = A * tau
    small = np.abs(x) < 1e-6
    safe_A = np.where(small, 1.0, A)
    # dR/dA = (tau e^{-A tau} - R) / A, -> -tau^2/2 as A -> 0
    dR = np.where(small, -0.5 * tau * tau * (1.0 - 2.0 * x / 3.0),
                  (tau * e - R) / safe_A)
    return np.array([-0.5 * tau * v[0], -0.5 * tau * v[1],
                     -tau * np.cos(theta) * e + B * dR])


def bloch_dbeta(theta, phi, tau, beta, w, omega=1.0, method="analytic",
                fd_step=None):
    """Derivative of the evolved Bloch vector with respect to beta = 2 pi / a.

    ``method="analytic"`` uses the chain rule through h(beta); ``"fd"`` uses
    central differences (step 1e-5 max(1, beta), two halvings, Richardson).
    """
    if not beta > 0:
        raise FormulaDomainError("beta must be > 0")
    if method == "analytic":
        h = decay_factor(2.0 * np.pi / beta, w)
        return _bloch_dA(theta, phi, tau, h, -1.0, omega) * decay_factor_dbeta(beta, w)
    if method != "fd":
        raise ValueError(f"unknown derivative method {method!r}")
    h0 = fd_step if fd_step is not None else 1e-5 * max(1.0, abs(beta))
    if not 0 < h0 < beta:
        raise ValueError("fd_step must lie in (0, beta)")

    def state(b):
        return evolved_bloch(theta, phi, tau, 2.0 * np.pi / b, w, omega)

    table = [(state(beta + s) - state(beta - s)) / (2.0 * s) for s in (h0, h0 / 2, h0 / 4)]
    r1 = [(4.0 * table[i + 1] - table[i]) / 3.0 for i in range(2)]
    return (16.0 * r1[1] - r1[0]) / 15.0


# -- closed forms -------------------------------------------------------------

def _check_tau(tau):
    if np.any(np.asarray(tau) < 0):
        raise FormulaDomainError("tau must be >= 0")


def qfi_phi_from_rate(theta, tau, h):
    _check_tau(tau)
    return np.sin(theta) ** 2 * np.exp(-h * tau)


def qfi_theta_from_rate(theta, tau, h):
    """Weight-parameter Fisher information for decay factor ``h`` (B/A = -1/h).

    Written with x = 1 - exp(-h tau) so it is exact at tau = 0 and does not
    overflow at long times.
    """
    _check_tau(tau)
    if np.any(np.asarray(h) < 1.0 - 1e-12):
        raise FormulaDomainError(f"decay factor {h!r} < 1 means A < |B|")
    e = np.exp(-h * tau)
    x = -np.expm1(-h * tau)
    c = np.cos(theta)
    s2 = np.sin(theta) ** 2
    k = 1.0 + h * c
    # h^2 (1 - |w|^2) = x * denom; zero only for h = 1, theta = pi, where the
    # ground state stays pure and the correction vanishes with sin^2(theta)
    denom = e * k * k + (h * h - 1.0)
    num = x * k * k
    pure = denom <= 0
    corr = np.where(pure, 0.0, num / np.where(pure, 1.0, denom))
    return c * c * e + s2 * e * e * (1.0 + corr)


def qfi_phi_closed(theta, tau, a, w):
    """F_phi = sin^2(theta) exp(-h(a, w) tau)."""
    return qfi_phi_from_rate(theta, tau, decay_factor(a, w))


def qfi_theta_closed(theta, tau, a, w):
    return qfi_theta_from_rate(theta, tau, decay_factor(a, w))


def qfi_ultrarel(theta):
    """(F_theta, F_phi) once both rates vanish: the state only rotates."""
    return 1.0, math.sin(theta) ** 2


def qfi_beta(theta, phi, tau, beta, w, fd_step=None, omega=1.0) -> float:
    """Fisher information for beta = 2 pi / a.

    The chain-rule derivative is checked against finite differences on every
    call; ``DerivativeUnstable`` is raised if they differ by more than 1e-6.
    """
    _check_tau(tau)
    v = evolved_bloch(theta, phi, tau, 2.0 * np.pi / beta, w, omega)
    dv = bloch_dbeta(theta, phi, tau, beta, w, omega)
    dv_fd = bloch_dbeta(theta, phi, tau, beta, w, omega, method="fd", fd_step=fd_step)
    gap = float(np.max(np.abs(dv - dv_fd)))
    if gap > 1e-6:
        raise DerivativeUnstable(f"analytic and finite-difference d/dbeta differ by {gap:.3e}")
    return qfi_bloch(v, dv)


# -- dispatcher ---------------------------------------------------------------

def compute_qfi(param: str, theta: float, tau: float, *, a: Optional[float] = None,
                beta: Optional[float] = None, w: float = 0.0, phi: float = 0.0,
                method: str = "closed-form", omega: float = 1.0,
                fd_step: Optional[float] = None) -> QfiResult:
    """Fisher information for ``param`` by the requested route.

    Pass either ``a`` or ``beta`` (= 2 pi / a).  The beta parameter has no
    closed form; its ``closed-form`` request falls back to ``bloch-derivative``.
    """
    if (a is None) == (beta is None):
        raise ValueError("pass exactly one of a or beta")
    if beta is not None:
        if not beta > 0:
            raise FormulaDomainError("beta must be > 0")
        a = 2.0 * math.pi / beta
    _check_a(a)
    _check_tau(tau)
    beta = 2.0 * math.pi / a
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    value = {"theta": theta, "phi": phi, "beta": beta}[param]
    label = EstimationParameter(param, value)
    h = float(decay_factor(a, w))

    if param == "beta" and method == "closed-form":
        method = "bloch-derivative"

    if method == "closed-form":
        if param == "phi":
            f = float(qfi_phi_from_rate(theta, tau, h))
        else:
            f = float(qfi_theta_from_rate(theta, tau, h))
        return QfiResult(label, f, method)

    if method == "bloch-derivative":
        v = bloch_vector(theta, phi, tau, h, -1.0, omega)
        if param == "phi":
            dv = _bloch_dphi(theta, phi, tau, h, omega)
            f = qfi_bloch(v, dv)
        elif param == "theta":
            dv = _bloch_dtheta(theta, phi, tau, h, omega)
            f = qfi_bloch(v, dv)
        else:
            dv = bloch_dbeta(theta, phi, tau, beta, w, omega)
            f = qfi_beta(theta, phi, tau, beta, w, fd_step=fd_step, omega=omega)
        return QfiResult(label, float(f), method, float(dv @ dv))

    if param == "phi":
        def rho(x):
            return density_matrix(bloch_vector(theta, x, tau, h, -1.0, omega))
    elif param == "theta":
        def rho(x):
            return density_matrix(bloch_vector(x, phi, tau, h, -1.0, omega))
    else:
        def rho(x):
            return density_matrix(evolved_bloch(theta, phi, tau, 2.0 * math.pi / x, w, omega))
    step = fd_step if fd_step is not None else 1e-3 * max(1.0, abs(value))
    if param == "beta":
        step = min(step, 0.25 * beta)
    return QfiResult(label, qfi_sld(rho, value, step), method)
