"""Invariant and oracle checks aggregated into a pass/fail report."""

from dataclasses import dataclass
import math
import time

import numpy as np

from . import fd_oracle
from .errors import IndefSpecError
from .modes import (
    eigenfunction_distance,
    gram_matrix,
    interface_residual,
    kernel_function,
    kernel_normal_derivatives,
    mode_spec,
    ode_residual,
    psi,
    square_norm,
)
from .numerics import central_difference, richardson_order
from .secular import (
    compatibility_residuals,
    eval_F,
    eval_F_prime,
    eval_g,
    eval_G,
    g_series,
    reference_constant,
)
from .spectrum import (
    MAX_DELTA,
    ModeIndex,
    continue_to_delta,
    count_eigenvalues,
    scan_roots,
    solve_mode,
    solve_unperturbed,
)

LEVELS = {
    "quick": {"n_max": 2, "n_roots": 2, "grid_sizes": (200, 400, 800), "m_sym": 5, "accum_n": 2},
    "full": {"n_max": 5, "n_roots": 10, "grid_sizes": (400, 800, 1600), "m_sym": 10, "accum_n": 5},
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: object
    threshold: object
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured={_fmt(self.measured)} threshold={_fmt(self.threshold)} ({self.seconds:.2f}s) {self.detail}".rstrip()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def check_zero_root(n_max=10):
    worst = max(abs(eval_F(0.0, n)) for n in range(1, n_max + 1))
    return CheckResult("zero_root", worst < 1e-13, worst, 1e-13, f"n=1..{n_max}")


def f_prime_zero_closed_form(n):
    x = n * math.pi
    return (2 * x - math.sinh(2 * x)) / (2 * x**3 * math.cosh(x) ** 2)


def check_f_prime_closed_form(n_max=10):
    worst = 0.0
    negative = True
    for n in range(1, n_max + 1):
        got = eval_F_prime(0.0, n).real
        ref = f_prime_zero_closed_form(n)
        worst = max(worst, abs(got - ref) / abs(ref))
        negative &= got < 0
    return CheckResult("F_prime_closed_form", worst < 1e-10 and negative, worst, 1e-10,
                       "F'(0) < 0 for all n" if negative else "F'(0) >= 0 somewhere")


def check_spectral_gap(n_max=5, points=10_000):
    changes = 0
    for n in range(1, n_max + 1):
        c = (n * math.pi) ** 2
        for lo, hi in ((-c + 1e-6, -1e-6), (1e-6, c - 1e-6)):
            xs = np.linspace(lo, hi, points)
            fs = eval_F(xs, n).real
            changes += int(np.count_nonzero(np.sign(fs[:-1]) != np.sign(fs[1:])))
    return CheckResult("spectral_gap", changes == 0, changes, 0, f"sign changes for n=1..{n_max}")


def check_symmetry(n_max=5, m_max=10):
    worst = 0.0
    simple = True
    min_deriv = math.inf
    for n in range(1, n_max + 1):
        records = solve_unperturbed(n, m_max)
        positive = [e.value.real for e in records if e.m > 0]
        lo = -positive[-1] - 0.5 * math.pi**2 * (m_max + 0.5)
        scanned = scan_roots(n, lo, -1e-6)[-m_max:]
        if len(scanned) != m_max:
            return CheckResult("symmetry", False, len(scanned), m_max, f"n={n}: wrong root count")
        for lam_pos, lam_neg in zip(positive, reversed(scanned)):
            worst = max(worst, abs(lam_neg + lam_pos))
        for lam in positive + scanned + [0.0]:
            d = eval_F_prime(lam, n).real
            min_deriv = min(min_deriv, abs(d))
            simple &= d < 0
    ok = worst < 1e-10 and simple and min_deriv > 1e-8
    return CheckResult("symmetry_and_simplicity", ok, worst, 1e-10,
                       f"min|F'|={min_deriv:.3e}, all F'<0: {simple}")


def check_oracle(n_values=(1, 2), m_range=range(-3, 4), grid_sizes=(400, 800, 1600)):
    rows = []
    ok = True
    for n in n_values:
        for r in fd_oracle.oracle_compare(n, m_range, grid_sizes):
            band = max(1e-3, 1e-4 * abs(r["secular"]))
            order_ok = math.isinf(r["order"]) or 1.7 <= r["order"] <= 2.3
            agree = r["finest_error"] <= band
            ok &= order_ok and agree
            rows.append((n, r["m"], r["order"], r["finest_error"]))
    orders = [o for *_, o, _ in rows if not math.isinf(o)]
    detail = f"orders in [{min(orders):.3f}, {max(orders):.3f}]; N={list(grid_sizes)}"
    worst = max(e for *_, e in rows)
    return CheckResult("oracle_equivalence", ok, worst, "max(1e-3, 1e-4|lambda|)", detail)


def check_oracle_gap(n_values=(1, 2), N=1600, assembler=None):
    assembler = assembler or fd_oracle.assemble
    found = 0
    for n in n_values:
        M = assembler(n, N)
        found += len(fd_oracle.eigenvalues_in_window(M, 0.5, (n * math.pi) ** 2 - 0.5))
    return CheckResult("oracle_gap", found == 0, found, 0,
                       f"eigenvalues in (0.5, (n pi)^2-0.5), n={list(n_values)}, N={N}")


def check_oracle_indefinite(n=1, N=800):
    ev = fd_oracle.eigenvalues_in_window(fd_oracle.assemble(n, N), -100.0, 100.0)
    pos, neg = int(np.sum(ev > 1e-6)), int(np.sum(ev < -1e-6))
    M = fd_oracle.assemble(n, N)
    big = 10 * M.norm()
    total = int(fd_oracle.sturm_count(M, [big])[0] - fd_oracle.sturm_count(M, [-big])[0])
    ok = pos > 0 and neg > 0 and total == M.size
    return CheckResult("oracle_indefinite", ok, (neg, pos), "both > 0", f"Sturm total {total} of {M.size}")


def _modes(n_max=3, m_max=2):
    return [mode_spec(solve_mode(ModeIndex(n, m))) for n in range(1, n_max + 1) for m in range(-m_max, m_max + 1)]


def _perturbed_modes(delta, n_max=3, m_max=2):
    out = []
    for n in range(1, n_max + 1):
        for m in range(-m_max, m_max + 1):
            out.append(mode_spec(continue_to_delta(solve_mode(ModeIndex(n, m)), delta)))
    return out


def check_normalization(n_max=3):
    worst = 0.0
    for delta in (0.0, 0.1, 0.05j):
        specs = _modes(n_max) if delta == 0 else _perturbed_modes(delta, n_max)
        for s in specs:
            worst = max(worst, abs(square_norm(s) - 1.0))
    return CheckResult("normalization", worst < 1e-8, worst, 1e-8, "delta in {0, 0.1, 0.05i}")


def check_orthonormality(n_max=3):
    specs = _modes(n_max)
    G = gram_matrix(specs)
    err = float(np.max(np.abs(G - np.eye(len(specs)))))
    return CheckResult("orthonormality", err < 1e-7, err, 1e-7, f"{len(specs)} modes")


def check_interface(n_max=3):
    worst0 = max(interface_residual(s) for s in _modes(n_max))
    worst1 = max(interface_residual(s) for d in (0.1, 0.05j) for s in _perturbed_modes(d, n_max))
    worst = max(worst0, worst1)
    return CheckResult("interface_conditions", worst < 1e-8, worst, 1e-8,
                       f"delta=0: {worst0:.2e}; delta!=0: {worst1:.2e}")


def check_ode_residual(n_max=3):
    worst = max(ode_residual(s) for s in _modes(n_max))
    return CheckResult("ode_residual", worst < 1e-6, worst, 1e-6)


def check_reflection(n_max=3):
    xs = np.linspace(0.0, 1.0, 101)
    worst = 0.0
    for n in range(1, n_max + 1):
        s = mode_spec(solve_mode(ModeIndex(n, 0)))
        scale = np.max(np.abs(psi(s, xs)))
        worst = max(worst, float(np.max(np.abs(psi(s, xs) - psi(s, -xs))) / scale))
    return CheckResult("kernel_reflection_symmetry", worst < 1e-10, worst, 1e-10)


def laplacian_5pt(f, x, y, h):
    return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / h**2


def check_kernel(ks=(1, 2, 3), h=1e-3):
    worst_ratio = 0.0
    boundary = 0.0
    neumann = 0.0
    rng = np.random.default_rng(7)
    for k in ks:
        f = lambda x, y: kernel_function(k, x, y)
        sup = math.sinh(k * math.pi)
        # truncation bound of the 5-point stencil: h^2/12 (f_xxxx + f_yyyy)
        bound = h**2 / 6.0 * (k * math.pi) ** 4 * sup + 1e-8 * sup
        for sign in (1, -1):
            x = sign * rng.uniform(0.05, 0.95, 20)
            y = rng.uniform(0.05, 0.95, 20)
            worst_ratio = max(worst_ratio, float(np.max(np.abs(laplacian_5pt(f, x, y, h))) / bound))
        t = np.linspace(0, 1, 16)
        edges = [(-np.ones(16), t), (np.ones(16), t), (2 * t - 1, np.zeros(16)), (2 * t - 1, np.ones(16))]
        boundary = max(boundary, max(float(np.max(np.abs(f(ex, ey)))) for ex, ey in edges) / sup)
        for y in (0.25, 0.5, 0.8):
            dp, dm = kernel_normal_derivatives(k, y)
            neumann = max(neumann, abs(dp - dm) / abs(dp))
    ok = worst_ratio <= 1.0 and boundary < 1e-12 and neumann < 1e-8
    return CheckResult("kernel_functions", ok, worst_ratio, "<= 1 (Laplacian / h^2 bound)",
                       f"boundary={boundary:.1e}, neumann mismatch={neumann:.1e}")


def check_convergence(modes=((1, 1), (1, 0)), deltas=(1e-1, 1e-2, 1e-3)):
    ok = True
    orders = []
    ratios = []
    for n, m in modes:
        seed = solve_mode(ModeIndex(n, m))
        base = mode_spec(seed)
        for unit in (1.0, 1j):
            errs, dists = [], []
            for d in deltas:
                e = continue_to_delta(seed, unit * d)
                errs.append(abs(e.value - seed.value))
                dists.append(eigenfunction_distance(mode_spec(e), base))
                half = continue_to_delta(seed, unit * d / 2)
                ratios.append(errs[-1] / abs(half.value - seed.value))
            ok &= all(a > b for a, b in zip(errs, errs[1:]))
            ok &= all(a > b for a, b in zip(dists, dists[1:]))
            orders.append(richardson_order(list(zip(deltas, errs))))
    ok &= all(0.9 <= p <= 1.1 for p in orders) and all(1.8 <= r <= 2.2 for r in ratios)
    return CheckResult("delta_convergence", ok, (min(orders), max(orders)), "order in [0.9, 1.1]",
                       f"halving ratios in [{min(ratios):.3f}, {max(ratios):.3f}]")


def check_round_trip(n_max=2, m_max=2, delta=0.2 + 0.1j):
    worst = 0.0
    for n in range(1, n_max + 1):
        for m in range(-m_max, m_max + 1):
            seed = solve_mode(ModeIndex(n, m))
            back = continue_to_delta(continue_to_delta(seed, delta), 0.0)
            worst = max(worst, abs(back.value - seed.value))
    return CheckResult("continuation_round_trip", worst < 1e-10, worst, 1e-10)


def check_compatibility(radius=MAX_DELTA, samples=64, n_max=20):
    worst = math.inf
    for n in range(1, n_max + 1):
        for t in np.arange(samples) * 2 * math.pi / samples:
            r1, r2 = compatibility_residuals(radius * np.exp(1j * t), n)
            worst = min(worst, abs(r1), abs(r2))
    const = reference_constant()
    lower = (1 - radius) / (1 + radius) ** 2
    ok = worst > 1e-2 and abs(const - 0.32) < 0.005 and lower > const
    return CheckResult("compatibility_bound", ok, worst, 1e-2,
                       f"reference constant {const:.4f} (~0.32) < (1-c)/(1+c)^2 = {lower:.4f}")


def check_accumulation(n_max=5, bounds=(1e2, 1e3, 1e4)):
    counts = [count_eigenvalues(n_max, b) for b in bounds]
    ok = all(a < b for a, b in zip(counts, counts[1:]))
    return CheckResult("accumulation", ok, counts, "strictly increasing", f"Lambda={list(bounds)}")


def check_g_consistency():
    rng = np.random.default_rng(11)
    r = 10 ** rng.uniform(-3, 0, 200)
    u = r * np.exp(1j * rng.uniform(0, 2 * np.pi, 200))
    s = np.sqrt(u)
    closed = np.tan(s) / s
    err = float(np.max(np.abs(g_series(u) - closed)))
    # crossing the cut of sqrt on the negative real axis
    v = -rng.uniform(0.02, 50, 100) + 0j
    # +0 and -0 imaginary parts put sqrt on opposite sides of its cut
    above, below = eval_g(v), eval_g(np.conj(v))
    assert np.all(np.sqrt(v).imag * np.sqrt(np.conj(v)).imag < 0)
    cut = float(np.max(np.abs(above - below)))
    ok = err < 1e-12 and cut < 1e-14
    return CheckResult("g_series_and_branch", ok, max(err, cut), 1e-12, f"series {err:.1e}, cut {cut:.1e}")


def check_oddness(samples=1000):
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in range(1, 6):
        lam = rng.uniform(-100, 100, samples)
        try:
            a, b = eval_F(lam, n), eval_F(-lam, n)
        except IndefSpecError:
            continue
        worst = max(worst, float(np.max(np.abs(a + b) / (1 + np.abs(a)))))
    return CheckResult("F_oddness", worst < 1e-12, worst, 1e-12)


def check_derivative_fd():
    worst = 0.0
    for n in (1, 2, 3):
        for lam in (-40.0, -5.0, 0.0, 7.0, 25.0, 60.0):
            exact = eval_F_prime(lam, n)
            e4 = abs(central_difference(lambda x: eval_F(x, n), lam, 1e-4) - exact)
            worst = max(worst, e4 / abs(exact))
    return CheckResult("F_prime_vs_fd", worst < 1e-6, worst, 1e-6)


def check_gap_function(n_max=5, points=1000):
    worst = math.inf
    for n in range(1, n_max + 1):
        c = (n * math.pi) ** 2
        worst = min(worst, float(np.min(eval_G(np.linspace(1e-6, c - 1e-6, points), n))))
    return CheckResult("gap_function_positive", worst > 0, worst, "> 0")


def run_suite(level="quick", config=None):
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    p = LEVELS[level]
    n_max = p["n_max"]
    checks = [
        lambda: check_zero_root(10 if level == "full" else n_max),
        lambda: check_f_prime_closed_form(10 if level == "full" else n_max),
        lambda: check_spectral_gap(n_max),
        check_gap_function,
        check_oddness,
        check_g_consistency,
        check_derivative_fd,
        lambda: check_symmetry(n_max, p["m_sym"]),
        lambda: check_oracle((1, 2), range(-3, 4), p["grid_sizes"]),
        lambda: check_oracle_gap((1, 2), p["grid_sizes"][-1]),
        lambda: check_oracle_indefinite(1, 800),
        lambda: check_normalization(min(3, n_max + 1)),
        lambda: check_orthonormality(3),
        lambda: check_interface(min(3, n_max + 1)),
        lambda: check_ode_residual(3),
        lambda: check_reflection(3),
        check_kernel,
        check_convergence,
        check_round_trip,
        check_compatibility,
        lambda: check_accumulation(p["accum_n"]),
    ]
    results = []
    for fn in checks:
        t0 = time.perf_counter()
        try:
            r = fn()
        except IndefSpecError as exc:
            r = CheckResult(getattr(fn, "__name__", "check"), False, None, None, f"error: {exc}")
        r.seconds = time.perf_counter() - t0
        results.append(r)
    return results
