"""Root brackets, unperturbed spectrum, scans and delta continuation."""

import math

import pytest

from indefspec.errors import ContinuationStall, DeltaOutOfRange
from indefspec.numerics import SolverConfig
from indefspec.secular import eval_F, eval_F_prime, eval_H
from indefspec.spectrum import (
    Eigenvalue,
    ModeIndex,
    Source,
    bracket_positive_roots,
    continue_to_delta,
    convergence_study,
    count_eigenvalues,
    merge_spectrum,
    scan_roots,
    solve_mode,
    solve_perturbed,
    solve_unperturbed,
)

# frozen roots of the unperturbed secular equation
LAMBDA_1_1 = 23.646319543193886
LAMBDA_1_2 = 58.64636330036577
LAMBDA_1_3 = 113.22809734839561
LAMBDA_2_1 = 51.67427456767072


def test_first_bracket_location():
    (b,) = bracket_positive_roots(1, 1)
    assert 2 * math.pi**2 < b.lo < b.hi < math.pi**2 + (1.5 * math.pi) ** 2
    assert eval_F(b.lo, 1).real * eval_F(b.hi, 1).real < 0


def test_brackets_disjoint_and_increasing():
    bs = bracket_positive_roots(1, 5)
    assert len(bs) == 5
    assert all(a.hi < b.lo for a, b in zip(bs, bs[1:]))


def test_bracket_above_threshold():
    (b, *_) = bracket_positive_roots(3, 1)
    assert b.lo > (3 * math.pi) ** 2


def test_bracket_rejects_zero_count():
    with pytest.raises(ValueError):
        bracket_positive_roots(1, 0)


def test_unperturbed_ordering_and_zero():
    recs = solve_unperturbed(1, 3)
    assert [e.m for e in recs] == [-3, -2, -1, 0, 1, 2, 3]
    zero = recs[3]
    assert zero.value == 0 and zero.residual < 1e-13


@pytest.mark.parametrize("n,m,value", [(1, 1, LAMBDA_1_1), (1, 2, LAMBDA_1_2), (1, 3, LAMBDA_1_3), (2, 1, LAMBDA_2_1)])
def test_frozen_roots(n, m, value):
    assert solve_mode(ModeIndex(n, m)).value.real == pytest.approx(value, rel=1e-13)


def test_reflection_pair():
    recs = {e.m: e for e in solve_unperturbed(1, 1)}
    assert recs[-1].value == -recs[1].value
    assert recs[-1].source is Source.SYMMETRY and recs[1].source is Source.BRACKETED
    assert 19.74 < recs[1].value.real < 32.08


def test_roots_are_simple_and_decreasing():
    for e in solve_unperturbed(4, 8):
        d = eval_F_prime(e.value, 4).real
        assert d < 0 and abs(d) > 1e-8
        assert e.residual < 1e-12


def test_scan_finds_negative_roots_independently():
    n = 2
    recs = [e for e in solve_unperturbed(n, 6) if e.m > 0]
    neg = scan_roots(n, -recs[-1].value.real - 1.0, -1e-6)
    assert len(neg) == 6
    for e, r in zip(recs, reversed(neg)):
        assert abs(r + e.value.real) < 1e-10


def test_scan_gap_is_empty():
    assert scan_roots(1, 1e-6, math.pi**2 - 1e-6) == []
    assert scan_roots(1, -math.pi**2 + 1e-6, -1e-6) == []


def test_accumulation_counts():
    counts = [count_eigenvalues(5, b) for b in (1e2, 1e3, 1e4)]
    assert counts == [13, 93, 315]


def test_merge_groups_coincident_values():
    recs = solve_unperturbed(1, 1) + solve_unperturbed(2, 0)
    groups = merge_spectrum(recs)
    assert [len(g) for g in groups] == [1, 2, 1]


def test_continuation_identity(lam11):
    e = continue_to_delta(lam11, 0.0)
    assert abs(e.value - lam11.value) < 1e-12
    assert e.source is Source.CONTINUATION


def test_continuation_small_real_delta(lam11):
    e = continue_to_delta(lam11, 1e-3)
    assert 1e-4 < abs(e.value - lam11.value) < 1e-2
    assert abs(eval_H(e.value, 1e-3, 1)) < 1e-12


def test_continuation_moves_zero_mode(lam10):
    e = continue_to_delta(lam10, 1e-2j)
    assert abs(e.value) > 0 and abs(e.value.imag) > 0
    assert e.residual < 1e-12


def test_continuation_round_trip(lam11):
    there = continue_to_delta(lam11, 0.2 + 0.1j)
    back = continue_to_delta(there, 0.0)
    assert abs(back.value - lam11.value) < 1e-10


def test_continuation_delta_limit(lam11):
    with pytest.raises(DeltaOutOfRange):
        continue_to_delta(lam11, 0.5)


def test_continuation_stall_is_reported(lam11):
    cfg = SolverConfig(residual_tol=1e-30)
    with pytest.raises(ContinuationStall):
        continue_to_delta(lam11, 0.1, config=cfg)


def test_solve_perturbed_keeps_order():
    recs = solve_perturbed(1, 2, 0.05)
    assert [e.m for e in recs] == [-2, -1, 0, 1, 2]
    assert all(e.residual < 1e-12 for e in recs)


@pytest.mark.parametrize("scale", [1.0, 1j])
def test_convergence_study_decreasing(scale):
    rows = convergence_study(ModeIndex(1, 1), [scale * d for d in (1e-1, 1e-2, 1e-3)])
    errs = [r[2] for r in rows]
    assert errs[0] > errs[1] > errs[2] > 0
    assert 8 < errs[1] / errs[2] < 12


def test_convergence_study_empty():
    assert convergence_study(ModeIndex(1, 1), []) == []


def test_mode_index_validation():
    with pytest.raises(ValueError):
        ModeIndex(0, 1)
    assert isinstance(solve_mode(ModeIndex(1, -2)), Eigenvalue)
