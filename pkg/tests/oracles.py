"""Arbitrary-precision reference implementations used only by the tests.

These are written from first principles (worldline embedding, Bloch-vector
derivatives by numerical differentiation) rather than by transcribing the
closed forms in the package, so that agreement is meaningful.
"""
import mpmath as mp

mp.mp.dps = 40


def interval_sq(a, w, z):
    """Minkowski interval between the worldline points at proper times z and 0.

    ``a=None`` selects the inertial worldline.  ``z`` may be complex.
    """
    z = mp.mpc(z)
    w = mp.mpf(w)
    if a is None:
        dt = mp.sqrt(1 + w * w) * z
        return -dt * dt + (w * z) ** 2
    a = mp.mpf(a)
    al = a / mp.sqrt(1 + w * w)
    r = a / al**2
    dt = r * mp.sinh(al * z)
    dx = r * mp.cosh(al * z) - r
    return -dt * dt + dx * dx + (w * z) ** 2


def wightman(a, w, dtau, eps):
    """1 / (4 pi^2 sigma^2) along the worldline at the regulated lag."""
    z = mp.mpf(dtau) - 1j * mp.mpf(eps)
    return 1 / (4 * mp.pi**2 * interval_sq(a, w, z))


def wightman_w2_taylor(a, w, dtau, eps):
    """Exact worldline Wightman function truncated at first order in w^2."""
    g0 = wightman_u(a, mp.mpf(0), dtau, eps)
    # the function is analytic in u = w^2, so a central difference at 0 is fine
    slope = mp.diff(lambda u: wightman_u(a, u, dtau, eps), mp.mpf(0))
    return g0 + slope * mp.mpf(w) ** 2


def wightman_u(a, u, dtau, eps):
    """Wightman function as an analytic function of u = w^2 (u may be < 0)."""
    z = mp.mpf(dtau) - 1j * mp.mpf(eps)
    a = mp.mpf(a)
    al = a / mp.sqrt(1 + u)
    r = a / al**2
    dt = r * mp.sinh(al * z)
    dx = r * mp.cosh(al * z) - r
    return 1 / (4 * mp.pi**2 * (-dt * dt + dx * dx + u * z * z))


def drift_f(a, omega0=1):
    a, w0 = mp.mpf(a), mp.mpf(omega0)
    x = 2 * mp.pi * w0 / a
    return (a * mp.exp(x) / (6 * (mp.exp(x) - 1) ** 2)
            * (2 + 9 * w0**2 / a**2 - x * (1 + w0**2 / a**2) * mp.coth(x / 2)))


def decay_h(a, w):
    """A / gamma0 in rescaled units."""
    a, w = mp.mpf(a), mp.mpf(w)
    e = mp.exp(2 * mp.pi / a)
    return (e + 1) / (e - 1) - 4 * mp.pi * drift_f(a) * w * w


def bloch(theta, phi, tau, h, omega=1):
    """Evolved Bloch vector with A = h and B = -1 (rescaled units)."""
    half = mp.exp(-h * tau / 2)
    st = mp.sin(theta)
    arg = omega * tau + phi
    return [st * mp.cos(arg) * half, st * mp.sin(arg) * half,
            mp.cos(theta) * mp.exp(-h * tau) - (1 - mp.exp(-h * tau)) / h]


def fisher_bloch(vec_of_x, x):
    """Bloch-vector Fisher information with the derivative taken numerically."""
    v = vec_of_x(x)
    dv = [mp.diff(lambda t, k=k: vec_of_x(t)[k], x) for k in range(3)]
    n2 = sum(c * c for c in v)
    d2 = sum(c * c for c in dv)
    dot = sum(p * q for p, q in zip(v, dv))
    if abs(1 - n2) < mp.mpf(10) ** -30:
        return d2
    return d2 + dot * dot / (1 - n2)


def fisher(param, theta, tau, a, w, phi=0.0):
    theta, tau, phi = mp.mpf(theta), mp.mpf(tau), mp.mpf(phi)
    if param == "theta":
        return fisher_bloch(lambda t: bloch(t, phi, tau, decay_h(a, w)), theta)
    if param == "phi":
        return fisher_bloch(lambda p: bloch(theta, p, tau, decay_h(a, w)), phi)
    beta = 2 * mp.pi / mp.mpf(a)
    return fisher_bloch(lambda b: bloch(theta, phi, tau, decay_h(2 * mp.pi / b, w)), beta)
