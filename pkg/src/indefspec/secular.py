"""Secular functions of the indefinite transmission problem.

Everything is built on the entire function

    g(u) = tan(sqrt(u)) / sqrt(u),

which is even in sqrt(u) and therefore independent of the branch of the
square root. Its reflection g(-w) = tanh(sqrt(w)) / sqrt(w) supplies the
hyperbolic side. With c = (n pi)^2,

    F(lambda)        = g(-(lambda + c)) - g(lambda - c)
    H(lambda, delta) = (1 + delta) g(-((1 + delta) lambda + c)) - g(lambda - c)

so H(lambda, 0) = F(lambda).
"""

import cmath
from fractions import Fraction
import math

import numpy as np

from .errors import DeltaOutOfRange, DomainError, PoleProximity

SERIES_RADIUS = 1e-2
SERIES_TERM_TOL = 1e-18
POLE_EXCLUSION = 1e-8
SATURATION = 350.0
REAL_TOL = 1e-12


def _tangent_series_coefficients(count):
    # tan(x)/x = sum_k c_k x^(2k), c_k = T_{k+1} / (2k+1)! with tangent numbers T.
    t = [0] * (count + 1)
    t[1] = 1
    for k in range(2, count + 1):
        t[k] = (k - 1) * t[k - 1]
    for k in range(2, count + 1):
        for j in range(k, count + 1):
            t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j]
    return np.array(
        [float(Fraction(t[k + 1], math.factorial(2 * k + 1))) for k in range(count)]
    )


_COEFFS = _tangent_series_coefficients(80)


def g_series(u, tol=SERIES_TERM_TOL):
    """Maclaurin series of tan(sqrt(u))/sqrt(u), summed until a term drops below `tol`.

    Usable for |u| well inside the radius of convergence (pi/2)^2.
    """
    u = np.asarray(u, dtype=complex)
    total = np.zeros_like(u)
    power = np.ones_like(u)
    for c in _COEFFS:
        term = c * power
        total = total + term
        if np.all(np.abs(term) < tol):
            break
        power = power * u
    else:
        raise ValueError("series did not converge; |u| too large")
    return total


def _g_series_prime(u, tol=SERIES_TERM_TOL):
    u = np.asarray(u, dtype=complex)
    total = np.zeros_like(u)
    power = np.ones_like(u)
    for k in range(1, len(_COEFFS)):
        term = k * _COEFFS[k] * power
        total = total + term
        if np.all(np.abs(term) < tol):
            break
        power = power * u
    return total


def _check_poles(u, radius):
    re = np.maximum(u.real, 0.0)
    k0 = np.floor(np.sqrt(re) / np.pi - 0.5)
    for shift in (-1.0, 0.0, 1.0):
        k = np.maximum(k0 + shift, 0.0)
        pole = ((k + 0.5) * np.pi) ** 2
        near = np.abs(u - pole) < radius
        if np.any(near):
            i = np.flatnonzero(near.ravel())[0]
            raise PoleProximity(complex(u.ravel()[i]), float(pole.ravel()[i]), radius)


def _closed_form(u):
    s = np.sqrt(u)
    out = np.empty_like(u)
    sat = np.abs(s.imag) > SATURATION
    # tan saturates to +-i once |Im sqrt(u)| is large
    out[sat] = 1j * np.sign(s.imag[sat]) / s[sat]
    ok = ~sat
    out[ok] = np.tan(s[ok]) / s[ok]
    return out


def _g_scalar(u, pole_exclusion):
    # same algorithm as the array path, without numpy overhead
    if pole_exclusion:
        k0 = math.floor(math.sqrt(max(u.real, 0.0)) / math.pi - 0.5)
        for k in (k0 - 1, k0, k0 + 1):
            pole = ((max(k, 0) + 0.5) * math.pi) ** 2
            if abs(u - pole) < pole_exclusion:
                raise PoleProximity(u, pole, pole_exclusion)
    if abs(u) < SERIES_RADIUS:
        total, power = 0j, 1 + 0j
        for c in _COEFFS:
            term = c * power
            total += term
            if abs(term) < SERIES_TERM_TOL:
                return total
            power *= u
        raise ValueError("series did not converge; |u| too large")
    s = cmath.sqrt(u)
    if abs(s.imag) > SATURATION:
        return 1j * math.copysign(1.0, s.imag) / s
    return cmath.tan(s) / s


def _g_array(u, pole_exclusion):
    u = np.asarray(u, dtype=complex)
    if u.ndim == 0:
        return np.complex128(_g_scalar(complex(u), pole_exclusion))
    if pole_exclusion:
        _check_poles(u, pole_exclusion)
    out = np.empty_like(u)
    small = np.abs(u) < SERIES_RADIUS
    if np.any(small):
        out[small] = g_series(u[small])
    if not np.all(small):
        out[~small] = _closed_form(u[~small])
    return out


def _g_prime_array(u, g):
    # g'(u) = (1 - g + u g^2) / (2u), from tan' = 1 + tan^2.
    if np.ndim(u) == 0:
        u, g = complex(u), complex(g)
        if abs(u) < SERIES_RADIUS:
            return np.complex128(_g_series_prime(u))
        return np.complex128((1.0 - g + u * g * g) / (2.0 * u))
    out = np.empty_like(u)
    small = np.abs(u) < SERIES_RADIUS
    if np.any(small):
        out[small] = _g_series_prime(u[small])
    big = ~small
    out[big] = (1.0 - g[big] + u[big] * g[big] ** 2) / (2.0 * u[big])
    return out


def _unwrap(x, like):
    return complex(x) if np.ndim(like) == 0 else x


def eval_g(u, pole_exclusion=POLE_EXCLUSION):
    """Evaluate g(u) = tan(sqrt(u))/sqrt(u) for scalar or array complex `u`.

    Raises PoleProximity within `pole_exclusion` of ((k+1/2) pi)^2.
    """
    return _unwrap(_g_array(u, pole_exclusion), u)


def eval_g_prime(u, pole_exclusion=POLE_EXCLUSION):
    ua = np.asarray(u, dtype=complex)
    return _unwrap(_g_prime_array(ua, _g_array(ua, pole_exclusion)), u)


def _c(n):
    n = int(n)
    if n < 1:
        raise DomainError(f"transverse index must be >= 1, got {n}")
    return (n * np.pi) ** 2


def check_delta(delta):
    delta = complex(delta)
    if not abs(delta) < 1.0:
        raise DeltaOutOfRange(f"|delta| must be < 1, got |{delta}| = {abs(delta):g}")
    return delta


def eval_F(lam, n, pole_exclusion=POLE_EXCLUSION):
    """F(lambda) = tanh(sqrt(lambda+c))/sqrt(lambda+c) - tan(sqrt(lambda-c))/sqrt(lambda-c)."""
    c = _c(n)
    lam_a = np.asarray(lam, dtype=complex)
    out = _g_array(-(lam_a + c), pole_exclusion) - _g_array(lam_a - c, pole_exclusion)
    return _unwrap(out, lam)


def eval_F_prime(lam, n, pole_exclusion=POLE_EXCLUSION):
    c = _c(n)
    lam_a = np.asarray(lam, dtype=complex)
    up, um = -(lam_a + c), lam_a - c
    gp, gm = _g_array(up, pole_exclusion), _g_array(um, pole_exclusion)
    out = -_g_prime_array(up, gp) - _g_prime_array(um, gm)
    return _unwrap(out, lam)


def F_prime_at_root(lam, n):
    """Reduced form of F' valid only where F(lambda) = 0.

    Uses the root identity to eliminate the tan term; kept separate from
    `eval_F_prime` so the two can cross-check each other.
    """
    c = _c(n)
    lam = complex(lam)
    t = complex(_g_array(np.asarray(-(lam + c)), 0))  # tanh(sqrt(w))/sqrt(w)
    return -t * t + c / (lam * lam - c * c) * (t - 1.0)


def eval_H(lam, delta, n, pole_exclusion=POLE_EXCLUSION):
    """H(lambda, delta) = (1+delta) g(-((1+delta) lambda + c)) - g(lambda - c)."""
    c = _c(n)
    delta = check_delta(delta)
    lam_a = np.asarray(lam, dtype=complex)
    out = (1.0 + delta) * _g_array(-((1.0 + delta) * lam_a + c), pole_exclusion) - _g_array(
        lam_a - c, pole_exclusion
    )
    return _unwrap(out, lam)


def eval_H_prime(lam, delta, n, pole_exclusion=POLE_EXCLUSION):
    """Partial derivative of H with respect to lambda."""
    c = _c(n)
    delta = check_delta(delta)
    lam_a = np.asarray(lam, dtype=complex)
    up, um = -((1.0 + delta) * lam_a + c), lam_a - c
    gp, gm = _g_array(up, pole_exclusion), _g_array(um, pole_exclusion)
    out = -((1.0 + delta) ** 2) * _g_prime_array(up, gp) - _g_prime_array(um, gm)
    return _unwrap(out, lam)


def eval_H_delta(lam, delta, n, pole_exclusion=POLE_EXCLUSION):
    """Partial derivative of H with respect to delta."""
    c = _c(n)
    delta = check_delta(delta)
    lam_a = np.asarray(lam, dtype=complex)
    up = -((1.0 + delta) * lam_a + c)
    gp = _g_array(up, pole_exclusion)
    out = gp - (1.0 + delta) * lam_a * _g_prime_array(up, gp)
    return _unwrap(out, lam)


def real_value(z, tol=REAL_TOL):
    """Return the real part of `z`, asserting its imaginary part is negligible."""
    z = np.asarray(z, dtype=complex)
    bad = np.abs(z.imag) > tol * np.maximum(np.abs(z), 1e-300)
    bad &= np.abs(z.imag) > 1e-300
    if np.any(bad):
        raise ArithmeticError("expected a real result, got a significant imaginary part")
    return float(z.real) if z.ndim == 0 else z.real


def eval_G(lam, n):
    """Gap function on [0, (n pi)^2); zero at 0 and increasing on the interval."""
    c = _c(n)
    lam_a = np.asarray(lam, dtype=float)
    if np.any(lam_a < 0.0) or np.any(lam_a >= c):
        raise DomainError(f"eval_G requires 0 <= lambda < (n pi)^2 = {c:.6g}")
    # sqrt(w)/tanh(sqrt(w)) = 1/g(-w)
    out = 1.0 / _g_array(-(lam_a + c), 0) - 1.0 / _g_array(-(c - lam_a), 0)
    out = real_value(out)
    return float(out) if np.ndim(lam) == 0 else out


def compatibility_residuals(delta, n):
    """Residuals of the two exceptional-root compatibility conditions.

    A zero of the first (second) residual means lambda = (n pi)^2
    (lambda = -(n pi)^2/(1+delta)) solves the perturbed secular equation.
    """
    c = _c(n)
    delta = check_delta(delta)
    r1 = complex(_g_array(np.asarray(-(2.0 + delta) * c), 0)) - 1.0 / (1.0 + delta)
    r2 = complex(_g_array(np.asarray(-(2.0 + delta) / (1.0 + delta) * c), 0)) - (1.0 + delta)
    return r1, r2


def reference_constant():
    """Upper bound on |Re tanh(z)/z| for |Re z| >= pi; approximately 0.32."""
    return (math.sinh(2 * math.pi) + 1.0) / (math.cosh(2 * math.pi) - 1.0) / math.pi


def poles(n, lam_max):
    """Positive poles of F in (0, lam_max]: (n pi)^2 + ((k+1/2) pi)^2."""
    c = _c(n)
    out = []
    k = 0
    while c + ((k + 0.5) * np.pi) ** 2 <= lam_max:
        out.append(c + ((k + 0.5) * np.pi) ** 2)
        k += 1
    return out
