"""Eigenfunctions, normalisation constants and kernel functions.

An eigenfunction of the (perturbed) operator separates as
f(x, y) = psi(x) chi_n(y) with chi_n(y) = sqrt(2) sin(n pi y) and, writing
k = sqrt(lambda - (n pi)^2), q = sqrt((1 + delta) lambda + (n pi)^2),

    psi(x) = N sinh(q) sin(k (1 - x))    for x > 0,
    psi(x) = N sin(k) sinh(q (1 + x))    for x < 0.

Principal square roots are used throughout; N is chosen positive real.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, RootResidualTooLarge
from .numerics import (
    SolverConfig,
    gauss_legendre_rule,
    integrate,
    one_sided_derivative,
    second_difference,
)
from .secular import check_delta, eval_H
from .spectrum import Eigenvalue, ModeIndex

REMOVABLE_THRESHOLD = 1e-4
FD_STEP = 1e-4


@dataclass(frozen=True)
class ModeSpec:
    index: ModeIndex
    delta: complex
    lam: complex
    normalization: complex

    @property
    def n(self):
        return self.index.n

    def wavenumbers(self):
        c = (self.n * math.pi) ** 2
        k = np.sqrt(complex(self.lam) - c)
        q = np.sqrt((1.0 + self.delta) * complex(self.lam) + c)
        return k, q


def _check_range(x, lo, hi, name):
    xa = np.asarray(x, dtype=float)
    if np.any(xa < lo) or np.any(xa > hi) or np.any(np.isnan(xa)):
        raise DomainError(f"{name} must lie in [{lo}, {hi}]")
    return xa


def chi(n, y):
    """Transverse Dirichlet factor sqrt(2) sin(n pi y) on [0, 1]."""
    ya = _check_range(y, 0.0, 1.0, "y")
    out = math.sqrt(2.0) * np.sin(int(n) * math.pi * ya)
    return float(out) if np.ndim(y) == 0 else out


def _sin_ratio(t):
    # sin(2t)/(4t), entire in t
    t = complex(t)
    if abs(t) < REMOVABLE_THRESHOLD:
        return 0.5 - t * t / 3.0 + t**4 / 15.0
    return np.sin(2 * t) / (4 * t)


def _sinh_ratio(t):
    t = complex(t)
    if abs(t) < REMOVABLE_THRESHOLD:
        return 0.5 + t * t / 3.0 + t**4 / 15.0
    return np.sinh(2 * t) / (4 * t)


def _real_ratio(fn, t):
    return fn(t).real


def inverse_square_norm_unperturbed(lam, n):
    """|N|^-2 for delta = 0, from the closed form for the unperturbed problem.

    The closed form integrates psi^2 rather than |psi|^2; for real roots the
    two differ at most by a sign (lambda = 0 gives the negative value), so
    the modulus is returned.
    """
    c = (int(n) * math.pi) ** 2
    k = np.sqrt(complex(lam) - c)
    q = np.sqrt(complex(lam) + c)
    value = np.sinh(q) ** 2 * (0.5 - _sin_ratio(k)) + np.sin(k) ** 2 * (-0.5 + _sinh_ratio(q))
    return abs(complex(value))


def inverse_square_norm_perturbed(lam, delta, n):
    """|N|^-2 for general delta, written with real and imaginary parts of the roots."""
    c = (int(n) * math.pi) ** 2
    k = np.sqrt(complex(lam) - c)
    q = np.sqrt((1.0 + complex(delta)) * complex(lam) + c)
    first = abs(np.sinh(q)) ** 2 * (_real_ratio(_sinh_ratio, k.imag) - _real_ratio(_sin_ratio, k.real))
    second = abs(np.sin(k)) ** 2 * (-_real_ratio(_sin_ratio, q.imag) + _real_ratio(_sinh_ratio, q.real))
    return float(first + second)


def normalization_constant(index, lam, delta=0.0, config=None):
    """Positive real N making psi (and hence f) unit in L^2."""
    config = config or SolverConfig()
    delta = check_delta(delta)
    res = abs(eval_H(complex(lam), delta, index.n, config.pole_exclusion))
    if not res < max(config.residual_tol, 1e-10):
        raise RootResidualTooLarge(f"|H| = {res:.3g} at lambda={lam} is not a root")
    if delta == 0:
        inv = inverse_square_norm_unperturbed(lam, index.n)
    else:
        inv = inverse_square_norm_perturbed(lam, delta, index.n)
    return complex(1.0 / math.sqrt(inv))


def mode_spec(eig, config=None):
    """Build a ModeSpec from an eigenvalue record."""
    if not isinstance(eig, Eigenvalue):
        raise TypeError("expected an Eigenvalue record")
    N = normalization_constant(eig.index, eig.value, eig.delta, config)
    return ModeSpec(index=eig.index, delta=eig.delta, lam=eig.value, normalization=N)


def psi_right(spec, x):
    k, q = spec.wavenumbers()
    return spec.normalization * np.sinh(q) * np.sin(k * (1.0 - np.asarray(x, dtype=float)))


def psi_left(spec, x):
    k, q = spec.wavenumbers()
    return spec.normalization * np.sin(k) * np.sinh(q * (1.0 + np.asarray(x, dtype=float)))


def psi(spec, x):
    """One-dimensional profile psi(x) on [-1, 1] (complex)."""
    xa = _check_range(x, -1.0, 1.0, "x")
    out = np.where(xa >= 0.0, psi_right(spec, xa), psi_left(spec, xa))
    return complex(out) if np.ndim(x) == 0 else out


def f2d(spec, x, y):
    """Two-dimensional eigenfunction psi(x) chi_n(y); broadcasts x against y."""
    return psi(spec, x) * chi(spec.n, y)


def kernel_function(k, x, y):
    """Harmonic kernel element sinh(k pi (1 - |x|)) sin(k pi y)."""
    k = int(k)
    if k < 1:
        raise DomainError("k must be >= 1")
    xa = _check_range(x, -1.0, 1.0, "x")
    ya = _check_range(y, 0.0, 1.0, "y")
    out = np.sinh(k * math.pi * (1.0 - np.abs(xa))) * np.sin(k * math.pi * ya)
    return float(out) if np.ndim(out) == 0 else out


def kernel_normal_derivatives(k, y, h=FD_STEP):
    """Outward normal derivatives of the kernel element on both sides of x = 0."""
    right = lambda x: np.sinh(k * math.pi * (1.0 - x)) * np.sin(k * math.pi * y)
    left = lambda x: np.sinh(k * math.pi * (1.0 + x)) * np.sin(k * math.pi * y)
    # outward normal of the right half points to -x, of the left half to +x
    return -one_sided_derivative(right, 0.0, h), one_sided_derivative(left, 0.0, -h)


def interface_derivatives(spec, h=FD_STEP):
    """(psi'(0+), psi'(0-)) by fourth-order one-sided differences."""
    d_plus = one_sided_derivative(lambda x: psi_right(spec, x), 0.0, h)
    d_minus = one_sided_derivative(lambda x: psi_left(spec, x), 0.0, -h)
    return complex(d_plus), complex(d_minus)


def interface_residual(spec, h=FD_STEP):
    """Relative defect of (1 + delta) psi'(0+) + psi'(0-) = 0."""
    d_plus, d_minus = interface_derivatives(spec, h)
    scale = max(abs(d_plus), abs(d_minus))
    return abs((1.0 + spec.delta) * d_plus + d_minus) / scale


def ode_residual(spec, points=64, h=1e-3):
    """Max residual of the two half-line ODEs relative to sup |psi|."""
    c = (spec.n * math.pi) ** 2
    lam = complex(spec.lam)
    xs_r = np.linspace(2 * h, 1.0 - 2 * h, points)
    xs_l = -xs_r
    r_plus = -second_difference(lambda x: psi_right(spec, x), xs_r, h) - (lam - c) * psi_right(spec, xs_r)
    r_minus = second_difference(lambda x: psi_left(spec, x), xs_l, h) - (
        (1.0 + spec.delta) * lam + c) * psi_left(spec, xs_l)
    sup = np.max(np.abs(psi(spec, np.linspace(-1, 1, 401))))
    return float(max(np.max(np.abs(r_plus)), np.max(np.abs(r_minus))) / sup)


def square_norm(spec, rel_tol=1e-12):
    """L^2(-1, 1) norm squared of psi by Gauss-Legendre quadrature."""
    return integrate(lambda x: np.abs(psi(spec, x)) ** 2, -1.0, 1.0, rel_tol=rel_tol)


def _tensor_rule(q):
    xr = [gauss_legendre_rule(q, -1.0, 0.0), gauss_legendre_rule(q, 0.0, 1.0)]
    yr = gauss_legendre_rule(q, 0.0, 1.0)
    xs = np.concatenate([r.nodes for r in xr])
    wx = np.concatenate([r.weights for r in xr])
    X, Y = np.meshgrid(xs, yr.nodes, indexing="ij")
    return X, Y, np.outer(wx, yr.weights)


def gram_matrix(specs, order=64, tol=1e-12):
    """Matrix of L^2(rectangle) inner products <f_i, f_j> by tensor Gauss-Legendre.

    The x-rule is split at the interface. The order is doubled until two
    successive matrices agree entrywise to `tol`.
    """
    def at(q):
        X, Y, W = _tensor_rule(q)
        vals = np.array([f2d(s, X, Y).ravel() for s in specs])
        return (vals * W.ravel()) @ vals.conj().T

    previous = at(order)
    while order < 1024:
        order *= 2
        current = at(order)
        if np.max(np.abs(current - previous)) < tol:
            return current
        previous = current
    return previous


def inner_product_2d(a, b, order=64):
    """<f_a, f_b> over the rectangle."""
    return complex(gram_matrix([a, b], order)[0, 1])


def eigenfunction_distance(a, b, points=201):
    """Sup-grid distance between two profiles, modulo the sign ambiguity of the branch."""
    xs = np.linspace(-1.0, 1.0, points)
    pa, pb = psi(a, xs), psi(b, xs)
    return float(min(np.max(np.abs(pa - pb)), np.max(np.abs(pa + pb))))


def sample_grid(spec, K=201):
    """Sample f on a K x K grid over the rectangle; rows ordered y-major."""
    xs = np.linspace(-1.0, 1.0, K)
    ys = np.linspace(0.0, 1.0, K)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    return X, Y, f2d(spec, X, Y)
