"""Finite-difference oracle for the one-dimensional transmission problem.

For a fixed transverse index n the separated problem reads

    -(a psi')' + (n pi)^2 a psi = lambda psi   on (-1, 1),   psi(+-1) = 0,

with a = sgn(x). Writing it in flux form on a uniform grid whose middle
node sits on the interface gives a symmetric tridiagonal matrix; its
eigenvalues are extracted window by window with Sturm-sequence bisection.
Nothing here touches the secular equation.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateInput, InvalidGrid
from .numerics import INFINITE_ORDER, SolverConfig, richardson_order

BISECTION_WIDTH = 1e-10


@dataclass(frozen=True)
class TridiagonalMatrix:
    diag: np.ndarray
    offdiag: np.ndarray
    h: float

    @property
    def size(self):
        return len(self.diag)

    def matvec(self, v):
        v = np.asarray(v)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm(self):
        """Infinity norm (max absolute row sum)."""
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())


@dataclass(frozen=True)
class OracleSpectrum:
    n: int
    h: float
    eigenvalues: np.ndarray


def grid(N):
    """Interior nodes of the uniform grid with N cells on (-1, 1)."""
    h = 2.0 / N
    return -1.0 + h * np.arange(1, N), h


def assemble_flux(N, coefficient, zero_order):
    """Assemble -(a u')' + q u with Dirichlet ends on N uniform cells.

    `coefficient(x)` is sampled at cell midpoints and `zero_order(x)` at
    interior nodes; both are vectorised callables.
    """
    N = int(N)
    if N < 8 or N % 2:
        raise InvalidGrid(f"N must be even and >= 8, got {N}")
    x, h = grid(N)
    mid = -1.0 + h * (np.arange(N) + 0.5)
    a = np.asarray(coefficient(mid), dtype=float)
    q = np.asarray(zero_order(x), dtype=float)
    diag = (a[1:] + a[:-1]) / h**2 + q
    off = -a[1:-1] / h**2
    return TridiagonalMatrix(diag=diag, offdiag=off, h=h)


def assemble(n, N):
    """Flux-form matrix of sgn * (-d^2/dx^2 + (n pi)^2) for transverse index n."""
    c = (int(n) * math.pi) ** 2
    # np.sign gives 0 at the interface node, the average of the two sides
    return assemble_flux(N, np.sign, lambda x: c * np.sign(x))


def sturm_count(M, shifts):
    """Number of eigenvalues of M strictly below each shift (Sylvester inertia)."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    tiny = np.finfo(float).eps * max(M.norm(), 1.0)
    off2 = M.offdiag**2
    count = np.zeros(shifts.shape, dtype=np.int64)
    d = M.diag[0] - shifts
    d = np.where(d == 0.0, -tiny, d)
    count += d < 0
    for i in range(1, M.size):
        d = (M.diag[i] - shifts) - off2[i - 1] / d
        d = np.where(d == 0.0, -tiny, d)
        count += d < 0
    return count


def eigenvalues_in_window(M, lo, hi, width=BISECTION_WIDTH):
    """All eigenvalues of M in (lo, hi], increasing, to absolute width `width`."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    c_lo, c_hi = sturm_count(M, [lo, hi])
    k = np.arange(c_lo, c_hi)
    if len(k) == 0:
        return np.empty(0)
    left = np.full(len(k), float(lo))
    right = np.full(len(k), float(hi))
    while np.max(right - left) > width:
        mid = 0.5 * (left + right)
        below = sturm_count(M, mid)
        above = below > k
        right = np.where(above, mid, right)
        left = np.where(above, left, mid)
    return 0.5 * (left + right)


def oracle_spectrum(n, N, lo, hi):
    M = assemble(n, N)
    return OracleSpectrum(n=int(n), h=M.h, eigenvalues=eigenvalues_in_window(M, lo, hi))


def nearest(values, target):
    values = np.asarray(values)
    return float(values[np.argmin(np.abs(values - target))])


def oracle_compare(n, m_range, grid_sizes=None, config=None, exact_floor=10 * BISECTION_WIDTH):
    """Compare oracle eigenvalues with secular roots over a grid-refinement sequence.

    Returns a list of dicts, one per mode m, with the per-grid errors, the
    Richardson order (``inf`` when the oracle reproduces the root to the
    bisection resolution) and the finest-grid agreement.
    """
    from .spectrum import solve_unperturbed

    config = config or SolverConfig()
    grid_sizes = sorted(grid_sizes or config.fd_grid_sizes)
    ms = list(m_range)
    m_max = max(abs(m) for m in ms)
    roots = {e.index.m: e.value.real for e in solve_unperturbed(n, m_max, config)}
    span = max(abs(roots[m]) for m in ms)
    lo, hi = -span - 5.0, span + 5.0
    spectra = {N: oracle_spectrum(n, N, lo, hi) for N in grid_sizes}
    rows = []
    for m in ms:
        target = roots[m]
        errors = []
        for N in grid_sizes:
            err = abs(nearest(spectra[N].eigenvalues, target) - target)
            errors.append((2.0 / N, err))
        cleaned = [(h, 0.0 if e < exact_floor else e) for h, e in errors]
        try:
            order = richardson_order(cleaned)
        except DegenerateInput:
            order = INFINITE_ORDER
        rows.append({
            "n": int(n),
            "m": m,
            "secular": target,
            "errors": errors,
            "order": order,
            "finest_error": errors[-1][1],
        })
    return rows
