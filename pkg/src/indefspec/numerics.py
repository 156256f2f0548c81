"""Quadrature, finite differences and convergence-order estimation.

These routines serve as independent oracles for the spectral solvers, so
they avoid calling into the secular-equation code entirely.
"""

from dataclasses import dataclass, field, asdict
from functools import lru_cache
import math

import numpy as np

from .errors import DegenerateInput, NoConvergence


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and sizes shared by every solver in the package."""

    residual_tol: float = 1e-12
    bracket_width_tol: float = 1e-8
    quad_rel_tol: float = 1e-10
    pole_exclusion: float = 1e-8
    fd_grid_sizes: tuple = (400, 800, 1600)
    continuation_steps: int = 32

    def __post_init__(self):
        for name in ("residual_tol", "bracket_width_tol", "quad_rel_tol", "pole_exclusion"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        sizes = tuple(int(s) for s in self.fd_grid_sizes)
        if not sizes or any(s <= 0 or s % 2 for s in sizes):
            raise ValueError("fd_grid_sizes must be positive even integers")
        object.__setattr__(self, "fd_grid_sizes", sizes)
        if int(self.continuation_steps) < 1:
            raise ValueError("continuation_steps must be >= 1")

    def as_dict(self):
        d = asdict(self)
        d["fd_grid_sizes"] = list(self.fd_grid_sizes)
        return d


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple = field(default=(-1.0, 1.0))

    def __call__(self, f):
        """Apply the rule to a vectorised integrand."""
        return np.sum(self.weights * f(self.nodes))


def _legendre_pair(order, x):
    """Return (P_order(x), P_order'(x)) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, order + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    return p, order * (x * p - p_prev) / (x * x - 1.0)


@lru_cache(maxsize=64)
def _legendre_reference(order):
    k = np.arange(1, order + 1)
    x = np.cos(np.pi * (k - 0.25) / (order + 0.5))
    for _ in range(100):
        p, dp = _legendre_pair(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    _, dp = _legendre_pair(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    idx = np.argsort(x)
    x, w = x[idx], w[idx]
    # exact reflection symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_rule(order, a=-1.0, b=1.0):
    """Gauss-Legendre rule with `order` points mapped onto (a, b).

    Parameters
    ----------
    order : int
        Number of nodes, >= 1. The rule is exact for polynomials of
        degree <= 2*order - 1.
    a, b : float
        Integration interval.

    Returns
    -------
    QuadratureRule
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be >= 1")
    if order == 1:
        x, w = np.array([0.0]), np.array([2.0])
    else:
        x, w = _legendre_reference(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return QuadratureRule(nodes=mid + half * x, weights=half * w, interval=(float(a), float(b)))


def _pieces(a, b):
    if a < 0.0 < b:
        return [(a, 0.0), (0.0, b)]
    return [(a, b)]


def integrate(f, a, b, rel_tol=1e-10, abs_tol=0.0, start_order=16, max_order=1024):
    """Integrate a vectorised function over (a, b) by Gauss-Legendre order doubling.

    The interval is split at 0 whenever it straddles it, because the
    eigenfunctions are only continuous across the interface. Convergence
    is declared when two successive estimates differ by less than
    ``rel_tol * |I| + abs_tol``.
    """
    pieces = _pieces(float(a), float(b))
    order = start_order
    previous = None
    while order <= max_order:
        estimate = sum(gauss_legendre_rule(order, lo, hi)(f) for lo, hi in pieces)
        if previous is not None and abs(estimate - previous) <= rel_tol * abs(estimate) + abs_tol:
            return _scalar(estimate)
        previous = estimate
        order *= 2
    raise NoConvergence(
        f"quadrature did not reach rel_tol={rel_tol:g} by order {max_order} on ({a}, {b})"
    )


def _scalar(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def central_difference(f, x, h):
    """Second-order central difference of f at x."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def one_sided_derivative(f, x, h):
    """Fourth-order one-sided first derivative; h < 0 differences to the left."""
    f0, f1, f2, f3, f4 = (f(x + k * h) for k in range(5))
    return (-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) / (12.0 * h)


def second_difference(f, x, h):
    """Fourth-order (5-point) central second derivative."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def richardson_order(errors):
    """Empirical convergence order from ``(h, e)`` pairs.

    Returns the least-squares slope of log(e) against log(h). Raises
    DegenerateInput when any error is exactly zero; callers report that
    case as an infinite order.
    """
    errors = list(errors)
    if len(errors) < 2:
        raise ValueError("need at least two (h, e) pairs")
    hs = np.array([float(h) for h, _ in errors])
    es = np.array([float(e) for _, e in errors])
    if np.any(np.diff(hs) >= 0):
        raise ValueError("h must be strictly decreasing")
    if np.any(es == 0.0):
        raise DegenerateInput("zero error encountered; convergence order is infinite")
    if np.any(es < 0):
        raise ValueError("errors must be non-negative")
    lh, le = np.log(hs), np.log(es)
    lh0 = lh - lh.mean()
    return float(np.dot(lh0, le - le.mean()) / np.dot(lh0, lh0))


INFINITE_ORDER = math.inf
