"""Exact enumeration oracle: moments, lemma suites, decompositions."""

import math
from fractions import Fraction
from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from friedman_bounds import BudgetError, DomainError, RankMatrix, friedman_statistic
from friedman_bounds.exact import (all_pass, beta_fourth_moment_direct, centered_doubled,
                                   exact_f_distribution, joint_moments, mono_moment,
                                   point_mass_at_zero, rho_moment, single_trial_moments,
                                   verify_index_decomposition, verify_inequalities,
                                   verify_lemma_formulas)


def test_single_trial_examples():
    assert rho_moment(3, (2,)) == Fraction(2, 3)
    assert rho_moment(2, (4,)) == Fraction(1, 16)
    assert rho_moment(4, (1, 1)) == Fraction(-5, 12)


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_marginal_enumeration_equals_full_permutation_sum(r):
    # the library enumerates ordered distinct value tuples; cross-check the
    # same moments against a sum over all r! permutations
    vals = centered_doubled(r)
    cases = [(2,), (4,), (1, 1), (3, 1), (2, 2)]
    if r >= 3:
        cases += [(2, 1, 1)]
    if r >= 4:
        cases += [(1, 1, 1, 1)]
    for powers in cases:
        total = Fraction(0)
        for perm in permutations(vals):
            term = 1
            for v, p in zip(perm, powers):
                term *= v ** p
            total += term
        brute = Fraction(total, math.factorial(r) * 2 ** sum(powers))
        assert rho_moment(r, powers) == brute


def test_single_trial_table_and_domain():
    table = single_trial_moments(3)
    assert table["E[rho^2]"] == Fraction(2, 3)
    assert table["E[rho rho']"] == Fraction(-1, 3)
    with pytest.raises(DomainError):
        single_trial_moments(11)
    with pytest.raises(DomainError):
        rho_moment(2, (1, 1, 1))


def test_joint_examples():
    jm = joint_moments(3, 2)
    assert jm["E[F]"] == 2
    assert jm["E[F^2]"] == 6
    assert jm["E[T^2]"] == 3
    assert joint_moments(4, 4)["E[S^4]"] == Fraction(1197, 800)


def test_joint_budget():
    with pytest.raises(BudgetError):
        joint_moments(6, 4)  # 720^4 is far beyond the cap
    with pytest.raises(BudgetError):
        exact_f_distribution(5, 5)


@pytest.mark.parametrize("r,n", [(2, 3), (2, 4), (3, 2)])
def test_cross_path_consistency(r, n):
    # rational enumeration vs the floating ranks-core path over the same space
    jm = joint_moments(r, n)
    total = 0.0
    count = 0
    for config in product(permutations(range(1, r + 1)), repeat=n):
        total += friedman_statistic(RankMatrix(list(config))).f_r
        count += 1
    assert count == math.factorial(r) ** n
    mean = total / count
    assert mean == pytest.approx(float(jm["E[F]"]), rel=1e-10)


@pytest.mark.parametrize("r,n", [(2, 2), (3, 2), (3, 3), (4, 2)])
def test_t_statistic_moments_vs_direct(r, n):
    # direct tally of T_1 = sum_l S_l rho_1(l) over the full configuration
    # space, on the doubled-integer scale: T = (c/4) sum_l Q_l D_1(l)
    jm = joint_moments(r, n)
    m1 = Fraction(0)
    m2 = Fraction(0)
    m4 = Fraction(0)
    count = 0
    for config in product(permutations(centered_doubled(r)), repeat=n):
        q = [sum(row[j] for row in config) for j in range(r)]
        x = sum(qj * d for qj, d in zip(q, config[0]))
        m1 += x
        m2 += x * x
        m4 += x ** 4
        count += 1
    scale = Fraction(3, 4 * r * (r + 1) * n)
    assert scale * (m1 / count) ** 2 == jm["E[T]^2"]
    assert scale * (m2 / count) == jm["E[T^2]"]
    assert scale * scale * (m4 / count) == jm["E[T^4]"]


@pytest.mark.parametrize("r,n", [(2, 3), (3, 2), (4, 2)])
def test_pair_moments_vs_vector_distribution(r, n):
    # the two-column convolution against a tally over full configurations
    jm = joint_moments(r, n)
    t11 = Fraction(0)
    t22 = Fraction(0)
    count = 0
    for config in product(permutations(centered_doubled(r)), repeat=n):
        q0 = sum(row[0] for row in config)
        q1 = sum(row[1] for row in config)
        t11 += q0 * q1
        t22 += q0 * q0 * q1 * q1
        count += 1
    c2 = Fraction(12, r * (r + 1) * n)
    assert c2 / 4 * (t11 / count) == jm["E[S_j S_k]"]
    assert c2 * c2 / 16 * (t22 / count) == jm["E[S_j^2 S_k^2]"]


def test_point_mass_at_zero_closed_form():
    assert point_mass_at_zero(4, 2) == Fraction(6, 16)
    for k in (1, 2, 3):
        n = 2 * k
        assert point_mass_at_zero(n, 2) == Fraction(math.comb(n, k), 2 ** n)


def test_f_distribution_is_a_law():
    atoms = exact_f_distribution(3, 3)
    assert sum(p for _, p in atoms) == 1
    assert all(a >= 0 for a, _ in atoms)
    mean = sum(a * p for a, p in atoms)
    assert mean == 2  # E[F_3] = r - 1


def test_lemma_suite_green():
    report = verify_lemma_formulas(r_max=6, n_max=4)
    assert all_pass(report)
    assert any(e["status"] == "skip" for e in report)  # r=2 three-index entries


def test_inequality_suite_green():
    report = verify_inequalities(8)
    assert all_pass(report)
    # the corrected third-moment cap is tracked with a note
    noted = [e for e in report if "corrected cap" in e["identity"]]
    assert noted and all(e["status"] == "pass" for e in noted)


def test_quartic_weight_identity_r5():
    rr = Fraction(5)
    vals = [Fraction(v, 2) for v in centered_doubled(5)]
    lhs = Fraction(sum(((rr ** 2 - 1) - 12 * v ** 2) ** 2 * v ** 4 for v in vals), 5)
    assert lhs == 3744
    assert lhs <= Fraction(3, 140) * 5 ** 8  # 8370.5 cap


def test_normalized_spread_r2_is_zero():
    vals = [Fraction(v, 2) for v in centered_doubled(2)]
    diffs = [(a, b) for a in vals for b in vals if a != b]
    got = sum((Fraction(6, 2 * 3) * (a - b) ** 2 - 1) ** 2 for a, b in diffs) / len(diffs)
    assert got == 0  # (r-2) factor vanishes


def test_decomposition_suite():
    for r in (3, 4, 5):
        report = verify_index_decomposition(r, trials=30, seed=7)
        assert all_pass(report)
    counting = [e for e in verify_index_decomposition(4, trials=1, seed=0)
                if "counting" in e["identity"]]
    assert counting[0]["lhs"] == "256"


def test_beta_fourth_moment():
    # r=4 value also appears inside the decomposition suite cross-check
    direct = beta_fourth_moment_direct(4)
    tuple_sum = sum(mono_moment(4, t) ** 2 for t in product(range(4), repeat=4))
    assert direct == tuple_sum == Fraction(385, 3)
    assert direct <= Fraction(79, 345600) * 4 ** 10


@given(r=st.integers(3, 5), seed=st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_four_index_decomposition_property(r, seed):
    import random
    rng = random.Random(seed)
    raw = {t: rng.randint(-9, 9) for t in product(range(r), repeat=4)}
    f = {}
    for t in raw:
        f[t] = Fraction(sum(raw[tuple(t[i] for i in p)] for p in permutations(range(4))), 24)
    idxs = range(r)
    lhs = sum(f[t] for t in product(idxs, repeat=4))
    rhs = (sum(f[(j, j, j, j)] for j in idxs)
           + 4 * sum(f[(l, j, j, j)] for l in idxs for j in idxs if j != l)
           + 3 * sum(f[(l, l, s, s)] for l in idxs for s in idxs if s != l)
           + 6 * sum(f[(l, j, s, s)] for l, j, s in permutations(idxs, 3))
           + sum(f[t] for t in permutations(idxs, 4)))
    assert lhs == rhs
