"""Detector worldlines and the massless-scalar Wightman function along them.

All quantities are in natural units.  The regulator is applied uniformly as
``G(dtau - i*eps)``: the lag is shifted into the lower half plane in the final
lag-only expression of every trajectory family.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

FOUR_PI2 = 4.0 * np.pi**2
SIXTEEN_PI2 = 16.0 * np.pi**2


class Kind(str, enum.Enum):
    INERTIAL_DRIFT = "inertial"
    UNIFORM_ACCELERATION = "uniform"
    DRIFTED_ACCELERATION = "drifted"
    DRIFTED_NONREL = "nonrel"
    DRIFTED_ULTRAREL = "ultrarel"

    @property
    def accelerated(self) -> bool:
        return self is not Kind.INERTIAL_DRIFT


@dataclass(frozen=True)
class Trajectory:
    """A stationary worldline.

    ``a`` is the proper acceleration (absent for the inertial family) and
    ``w = dy/dtau`` the constant transverse four-velocity component.
    """

    kind: Kind
    a: Optional[float] = None
    w: float = 0.0

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not np.isfinite(self.w) or self.w < 0:
            raise ValueError(f"w must be finite and >= 0, got {self.w!r}")
        if kind is Kind.INERTIAL_DRIFT:
            if self.a is not None:
                raise ValueError("inertial trajectory takes no acceleration")
            return
        if self.a is None or not self.a > 0 or not np.isfinite(self.a):
            raise ValueError(f"accelerated trajectory needs a > 0, got {self.a!r}")
        if kind is Kind.UNIFORM_ACCELERATION and self.w != 0:
            raise ValueError("uniform acceleration has w = 0")

    @classmethod
    def inertial(cls, w: float = 0.0) -> "Trajectory":
        return cls(Kind.INERTIAL_DRIFT, None, w)

    @classmethod
    def uniform(cls, a: float) -> "Trajectory":
        return cls(Kind.UNIFORM_ACCELERATION, a, 0.0)

    @classmethod
    def drifted(cls, a: float, w: float) -> "Trajectory":
        return cls(Kind.DRIFTED_ACCELERATION, a, w)

    @classmethod
    def nonrel(cls, a: float, w: float) -> "Trajectory":
        return cls(Kind.DRIFTED_NONREL, a, w)

    @classmethod
    def ultrarel(cls, a: float, w: float) -> "Trajectory":
        return cls(Kind.DRIFTED_ULTRAREL, a, w)

    @property
    def alpha(self) -> Optional[float]:
        """Rapidity rate a/sqrt(1 + w^2) of the hyperbolic part of the motion."""
        if self.a is None:
            return None
        return self.a / np.sqrt(1.0 + self.w**2)

    def worldline(self, tau):
        """Coordinates (t, x, y, z) at proper time ``tau``."""
        tau = np.asarray(tau, dtype=float)
        zero = np.zeros_like(tau)
        if self.kind is Kind.INERTIAL_DRIFT:
            return np.sqrt(1.0 + self.w**2) * tau, zero, self.w * tau, zero
        al = self.alpha
        r = self.a / al**2
        return r * np.sinh(al * tau), r * np.cosh(al * tau), self.w * tau, zero


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise ValueError(f"regulator eps must be > 0, got {eps!r}")


def _inv_sinh2_minus(u, k):
    """1 / (sinh(u)^2 - k u^2) without overflow for large |Re u|."""
    s = np.where(u.real < 0, -1.0, 1.0)
    q = np.exp(-2.0 * s * u)
    one_minus_q = -np.expm1(-2.0 * s * u)
    return 4.0 * q / (one_minus_q**2 - 4.0 * k * u * u * q)


def _uniform(a, z):
    return -(a * a / SIXTEEN_PI2) * _inv_sinh2_minus(0.5 * a * z, 0.0)


def wightman(traj: Trajectory, dtau, eps: float):
    """Vacuum two-point function G+(dtau - i eps) along ``traj``.

    Vectorised over ``dtau``; returns complex values.
    """
    _check_eps(eps)
    z = np.asarray(dtau, dtype=float) - 1j * eps
    kind = traj.kind
    if kind is Kind.INERTIAL_DRIFT:
        # the drift leaves the interval Lorentz invariant: sigma^2 = -dtau^2
        return -1.0 / (FOUR_PI2 * z * z)
    if kind is Kind.UNIFORM_ACCELERATION:
        return _uniform(traj.a, z)
    if kind is Kind.DRIFTED_ACCELERATION:
        w2 = traj.w**2
        al = traj.alpha
        u = 0.5 * al * z
        pref = al * al / (SIXTEEN_PI2 * (1.0 + w2))
        return -pref * _inv_sinh2_minus(u, w2 / (1.0 + w2))
    if kind is Kind.DRIFTED_NONREL:
        return wightman_nonrel_expansion(traj.a, traj.w, dtau, eps)
    if kind is Kind.DRIFTED_ULTRAREL:
        # model form: uniform correlator scaled by w^-4
        if traj.w <= 0:
            raise ValueError("ultra-relativistic form needs w > 0")
        return _uniform(traj.a, z) / traj.w**4
    raise ValueError(f"unknown trajectory kind {kind!r}")


def wightman_nonrel_expansion(a: float, w: float, dtau, eps: float):
    """Drifted-acceleration Wightman function truncated at order w^2.

    Intended for |w| <= 0.2; no bound is enforced.
    """
    _check_eps(eps)
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a!r}")
    z = np.asarray(dtau, dtype=float) - 1j * eps
    g0 = _uniform(a, z)
    if w == 0:
        return g0
    az = a * z
    # sinh(az)/sinh^4(az/2) = 2 cosh(az/2)/sinh^3(az/2), kept in overflow-safe form
    c2 = _inv_sinh2_minus(0.5 * az, 0.0)
    s = np.where(az.real < 0, -1.0, 1.0)
    coth_half = s * (1.0 + np.exp(-s * az)) / (-np.expm1(-s * az))
    corr = (az / 4.0) * 2.0 * coth_half * c2 + (az * az / 4.0) * c2 * c2
    return (1.0 - 2.0 * w * w) * g0 - (a * a / SIXTEEN_PI2) * corr * w * w
