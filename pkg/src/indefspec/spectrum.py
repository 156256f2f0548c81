"""Eigenvalues of the indefinite Laplacian and of its contrast perturbations.

For each transverse index n the eigenvalues lambda_{n,m}, m in Z, are the
roots of F. Positive roots are bracketed between consecutive tan branches,
bisected and polished by safeguarded Newton; the negative ones follow by
reflection. Roots of H(., delta) are reached from delta = 0 by complex
Newton continuation along a straight path in delta.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
import math
from typing import Optional

import numpy as np

from .errors import (
    BracketNotFound,
    ContinuationStall,
    DeltaOutOfRange,
    IndefSpecError,
    NewtonDivergence,
    PoleProximity,
)
from .numerics import SolverConfig
from .secular import (
    eval_F,
    eval_F_prime,
    eval_H,
    eval_H_delta,
    eval_H_prime,
)

MAX_DELTA = 0.38
POLISH_TOL = 1e-13
SCAN_PANELS = 2**10
MAX_HALVINGS = 12
MAX_ATTEMPTS_PER_STEP = 16


class Source(str, Enum):
    BRACKETED = "Bracketed"
    SYMMETRY = "Symmetry"
    CONTINUATION = "Continuation"


@dataclass(frozen=True, order=True)
class ModeIndex:
    n: int
    m: int

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class Bracket:
    n: int
    m: int
    lo: float
    hi: float


@dataclass(frozen=True)
class Eigenvalue:
    index: ModeIndex
    delta: complex
    value: complex
    residual: float
    derivative: complex
    source: Source
    bracket: Optional[tuple] = None
    path: tuple = field(default=(), compare=False)

    @property
    def n(self):
        return self.index.n

    @property
    def m(self):
        return self.index.m


def _c(n):
    return (n * math.pi) ** 2


def _F(lam, n, config):
    return eval_F(lam, n, config.pole_exclusion).real


def bracket_positive_roots(n, m_max, config=None):
    """Sign-verified brackets for lambda_{n,1}, ..., lambda_{n,m_max}.

    The m-th root sits on the m-th rising branch of tan, i.e. its
    longitudinal wavenumber sqrt(lambda - (n pi)^2) lies in (m pi, (m+1/2) pi).
    """
    config = config or SolverConfig()
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    c = _c(n)
    eps = config.pole_exclusion
    out = []
    for m in range(1, m_max + 1):
        lo = c + (m * math.pi) ** 2 + eps
        hi = c + ((m + 0.5) * math.pi) ** 2 - 2 * eps
        f_lo, f_hi = _F(lo, n, config), _F(hi, n, config)
        if f_lo * f_hi >= 0:
            lo, hi = _subdivide(n, m, config)
        out.append(Bracket(n=n, m=m, lo=lo, hi=hi))
    return out


def _subdivide(n, m, config):
    c = _c(n)
    eps = config.pole_exclusion
    a = c + ((m - 0.5) * math.pi) ** 2 + 2 * eps
    b = c + ((m + 0.5) * math.pi) ** 2 - 2 * eps
    xs = np.linspace(a, b, SCAN_PANELS + 1)
    fs = eval_F(xs, n, eps).real
    idx = np.flatnonzero(fs[:-1] * fs[1:] < 0)
    if len(idx) == 0:
        raise BracketNotFound(f"no sign change of F for (n={n}, m={m})")
    i = idx[-1]
    return float(xs[i]), float(xs[i + 1])


def _bisect(f, lo, hi, width=None, residual=None, max_iter=200):
    f_lo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if residual is not None and abs(f_mid) < residual:
            return mid, mid
        if f_lo * f_mid <= 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if width is not None and hi - lo < width:
            break
    return lo, hi


def _polish(n, lo, hi, config):
    """Newton inside [lo, hi]; steps larger than half the bracket are refused."""
    f = lambda x: _F(x, n, config)
    x = 0.5 * (lo + hi)
    for _ in range(60):
        fx = f(x)
        if abs(fx) < POLISH_TOL:
            return x
        d = eval_F_prime(x, n, config.pole_exclusion).real
        step = fx / d if d != 0 else math.inf
        if not abs(step) <= 0.5 * (hi - lo):
            raise NewtonDivergence(f"Newton step {step:.3g} exceeds half bracket at n={n}")
        x_new = x - step
        if not lo <= x_new <= hi:
            raise NewtonDivergence(f"Newton left bracket [{lo}, {hi}] at n={n}")
        if x_new == x:
            return x
        x = x_new
    return x


def _root_in_bracket(n, lo, hi, config):
    f = lambda x: _F(x, n, config)
    lo, hi = _bisect(f, lo, hi, width=config.bracket_width_tol)
    try:
        x = _polish(n, lo, hi, config)
    except NewtonDivergence:
        a, b = _bisect(f, lo, hi, residual=POLISH_TOL)
        x = 0.5 * (a + b)
    return x


def _record(n, m, delta, value, source, config, bracket=None, path=()):
    value = complex(value)
    res = abs(eval_H(value, delta, n, config.pole_exclusion))
    der = eval_H_prime(value, delta, n, config.pole_exclusion)
    return Eigenvalue(
        index=ModeIndex(n, m),
        delta=complex(delta),
        value=value,
        residual=float(res),
        derivative=complex(der),
        source=source,
        bracket=bracket,
        path=path,
    )


def solve_unperturbed(n, m_max, config=None):
    """Eigenvalues lambda_{n,m}, |m| <= m_max, of the unperturbed operator.

    Returns 2*m_max + 1 records ordered by m. The m = 0 entry is the exact
    zero root; negative m are reflections of positive ones.
    """
    config = config or SolverConfig()
    n = int(n)
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    zero = _record(n, 0, 0.0, 0.0, Source.BRACKETED, config)
    positive = []
    if m_max >= 1:
        for b in bracket_positive_roots(n, m_max, config):
            x = _root_in_bracket(n, b.lo, b.hi, config)
            positive.append(_record(n, b.m, 0.0, x, Source.BRACKETED, config, bracket=(b.lo, b.hi)))
    negative = [
        replace(e, index=ModeIndex(n, -e.m), value=complex(-e.value.real, 0.0), source=Source.SYMMETRY,
                bracket=(-e.bracket[1], -e.bracket[0]))
        for e in reversed(positive)
    ]
    # F is odd, so F' is even and the residual is unchanged by reflection
    return negative + [zero] + positive


def negative_poles(n, lam_min):
    """Poles of F on the negative axis down to lam_min, in decreasing order."""
    c = _c(n)
    out = []
    k = 0
    while -c - ((k + 0.5) * math.pi) ** 2 >= lam_min:
        out.append(-c - ((k + 0.5) * math.pi) ** 2)
        k += 1
    return out


def scan_roots(n, lo, hi, panels=SCAN_PANELS, config=None):
    """Locate and refine every root of F in [lo, hi] by a pole-aware sign scan.

    The interval is cut at the poles of F (on both half-axes) so that sign
    flips across a pole are never mistaken for roots. No symmetry is used.
    """
    config = config or SolverConfig()
    eps = config.pole_exclusion
    c = _c(n)
    cuts = [p for p in negative_poles(n, lo) if lo < p < hi]
    k = 0
    while True:
        p = c + ((k + 0.5) * math.pi) ** 2
        if p > hi:
            break
        if p > lo:
            cuts.append(p)
        k += 1
    edges = [lo] + sorted(cuts) + [hi]
    roots = []
    for a, b in zip(edges[:-1], edges[1:]):
        a2 = a + 2 * eps if a != lo else a
        b2 = b - 2 * eps if b != hi else b
        if not a2 < b2:
            continue
        xs = np.linspace(a2, b2, panels + 1)
        fs = eval_F(xs, n, eps).real
        for i in np.flatnonzero(fs[:-1] * fs[1:] < 0):
            roots.append(_root_in_bracket(n, float(xs[i]), float(xs[i + 1]), config))
        for i in np.flatnonzero(fs == 0):
            roots.append(float(xs[i]))
    return sorted(roots)


def sign_changes(n, lo, hi, points):
    """Number of sign changes of F on a uniform grid (no pole in [lo, hi] assumed)."""
    xs = np.linspace(lo, hi, points)
    fs = eval_F(xs, n).real
    return int(np.count_nonzero(fs[:-1] * fs[1:] <= 0))


def count_eigenvalues(n_max, bound, config=None):
    """Number of (n, m) records with n <= n_max and |lambda_{n,m}| <= bound."""
    config = config or SolverConfig()
    total = 0
    for n in range(1, n_max + 1):
        c = _c(n)
        total += 1
        m = 1
        # the m-th root exceeds (n pi)^2 + (m pi)^2
        while c + (m * math.pi) ** 2 < bound:
            lo = c + (m * math.pi) ** 2 + config.pole_exclusion
            hi = c + ((m + 0.5) * math.pi) ** 2 - 2 * config.pole_exclusion
            if _F(lo, n, config) * _F(hi, n, config) >= 0:
                lo, hi = _subdivide(n, m, config)
            if _root_in_bracket(n, lo, hi, config) <= bound:
                total += 2
            m += 1
    return total


def merge_spectrum(records, tol=1e-9):
    """Group records whose eigenvalues coincide within `tol` (accidental multiplicity)."""
    ordered = sorted(records, key=lambda e: (e.value.real, e.value.imag))
    groups = []
    for e in ordered:
        if groups and abs(e.value - groups[-1][0].value) <= tol:
            groups[-1].append(e)
        else:
            groups.append([e])
    return groups


def _check_delta(delta):
    delta = complex(delta)
    if abs(delta) > MAX_DELTA + 1e-15:
        raise DeltaOutOfRange(f"|delta| = {abs(delta):g} exceeds the validated bound {MAX_DELTA}")
    return delta


def _newton_H(lam, delta, n, config, max_iter=30):
    for it in range(max_iter):
        h = eval_H(lam, delta, n, config.pole_exclusion)
        d = eval_H_prime(lam, delta, n, config.pole_exclusion)
        if d == 0:
            raise NewtonDivergence("vanishing derivative")
        step = h / d
        lam = lam - step
        if abs(step) <= 4 * np.finfo(float).eps * (1.0 + abs(lam)):
            break
    h = eval_H(lam, delta, n, config.pole_exclusion)
    if not abs(h) < config.residual_tol:
        raise NewtonDivergence(f"residual {abs(h):.3g} after {max_iter} iterations")
    return lam


def continue_to_delta(seed, delta_target, steps=None, config=None):
    """Follow a root of H(., delta) from seed.delta to delta_target.

    delta moves along a straight segment. Each step runs complex Newton
    from the previous root; a step is rejected when Newton fails or when
    the move disagrees with the implicit-function prediction by more than
    an order of magnitude, and the delta increment is then halved. After
    an accepted step the increment grows back toward its base size.
    """
    config = config or SolverConfig()
    steps = int(steps or config.continuation_steps)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    delta_target = _check_delta(delta_target)
    start = _check_delta(seed.delta)
    n = seed.index.n
    if not seed.residual < max(config.residual_tol, 1e-10):
        raise ValueError(f"seed residual {seed.residual:.3g} too large to continue from")
    if seed.derivative == 0:
        raise ValueError("seed is not a simple root")

    lam = complex(seed.value)
    base = 1.0 / steps
    t, dt = 0.0, base
    halvings = 0
    accepted = 0
    attempts = 0
    while t < 1.0:
        attempts += 1
        if attempts > MAX_ATTEMPTS_PER_STEP * steps:
            raise ContinuationStall(
                f"continuation of (n={n}, m={seed.index.m}) made no progress past t={t:.3g}")
        dt = min(dt, 1.0 - t)
        t_new = 1.0 if dt >= 1.0 - t else t + dt
        d_old = start + t * (delta_target - start)
        d_new = start + t_new * (delta_target - start)
        try:
            slope = -eval_H_delta(lam, d_old, n, config.pole_exclusion) / eval_H_prime(
                lam, d_old, n, config.pole_exclusion)
            predicted = abs(slope * (d_new - d_old))
            lam_new = _newton_H(lam, d_new, n, config)
            if abs(lam_new - lam) > 10.0 * predicted + 1e-8 * (1.0 + abs(lam)):
                raise NewtonDivergence("jumped to a different branch")
        except (NewtonDivergence, PoleProximity, ZeroDivisionError, FloatingPointError):
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise ContinuationStall(
                    f"continuation of (n={n}, m={seed.index.m}) stalled at delta={d_old}"
                ) from None
            dt *= 0.5
            continue
        lam, t = lam_new, t_new
        halvings = 0
        accepted += 1
        dt = min(2.0 * dt, base)
    if delta_target == start:
        lam = complex(seed.value)
    else:
        lam = _newton_H(lam, delta_target, n, config)
    return _record(n, seed.index.m, delta_target, lam, Source.CONTINUATION, config,
                   path=(complex(start), complex(delta_target), accepted))


def solve_mode(index, config=None):
    """Unperturbed eigenvalue record for a single (n, m)."""
    config = config or SolverConfig()
    records = solve_unperturbed(index.n, abs(index.m), config)
    return next(e for e in records if e.index.m == index.m)


def solve_perturbed(n, m_max, delta, config=None):
    """Records for |m| <= m_max at contrast perturbation delta, by continuation."""
    config = config or SolverConfig()
    delta = _check_delta(delta)
    base = solve_unperturbed(n, m_max, config)
    if delta == 0:
        return base
    return [continue_to_delta(e, delta, config=config) for e in base]


def convergence_study(index, delta_sequence, config=None):
    """Rows (delta, lambda_delta, |lambda_delta - lambda|) along a delta sequence."""
    config = config or SolverConfig()
    deltas = [complex(d) for d in delta_sequence]
    if not deltas:
        return []
    for d in deltas:
        _check_delta(d)
    seed = solve_mode(index, config)
    rows = []
    for d in deltas:
        e = continue_to_delta(seed, d, config=config)
        rows.append((d, e.value, abs(e.value - seed.value)))
    return rows


__all__ = [
    "Bracket",
    "Eigenvalue",
    "IndefSpecError",
    "ModeIndex",
    "Source",
    "bracket_positive_roots",
    "continue_to_delta",
    "convergence_study",
    "count_eigenvalues",
    "merge_spectrum",
    "scan_roots",
    "sign_changes",
    "solve_mode",
    "solve_perturbed",
    "solve_unperturbed",
]
