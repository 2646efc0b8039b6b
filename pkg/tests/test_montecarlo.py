"""Samplers, distance estimators, and the smoothing test function."""

import math

import numpy as np
import pytest

from friedman_bounds import ChiSquareLaw, DomainError, bound_kolmogorov, chisq_cdf
from friedman_bounds.montecarlo import (RngContract, estimate_kolmogorov, estimate_smooth_gap,
                                        estimate_wasserstein, exact_kolmogorov,
                                        exact_smooth_gap, rate_experiment, sample_rank_matrix,
                                        smoothing_function)
from friedman_bounds.testfunctions import cosine, identity, power


def chisq_upper_quantile(p, alpha):
    """Test-side quantile via bisection on the package CDF."""
    law = ChiSquareLaw(p)
    lo, hi = 0.0, 10.0
    while 1.0 - chisq_cdf(law, hi) > alpha:
        hi *= 2.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if 1.0 - chisq_cdf(law, mid) > alpha:
            lo = mid
        else:
            hi = mid
    return hi


def test_sampler_shapes_and_determinism():
    gen = RngContract(seed=9).generator()
    m = sample_rank_matrix(5, 4, gen)
    assert m.n == 5 and m.r == 4
    m1 = sample_rank_matrix(3, 3, RngContract(seed=1, stream=2).generator())
    m2 = sample_rank_matrix(3, 3, RngContract(seed=1, stream=2).generator())
    assert np.array_equal(m1.ranks, m2.ranks)
    m3 = sample_rank_matrix(3, 3, RngContract(seed=1, stream=3).generator())
    assert not np.array_equal(m1.ranks, m3.ranks)


def test_sampler_r2_frequencies():
    gen = RngContract(seed=31).generator()
    draws = 100_000
    rows = gen.permuted(np.tile(np.arange(1, 3), (draws, 1)), axis=1)
    frac = np.mean(rows[:, 0] == 1)
    sigma = 0.5 / math.sqrt(draws)
    assert abs(frac - 0.5) <= 4 * sigma


def test_sampler_uniformity_gof():
    # frequencies of the 6 permutations at r=3 pass a GOF test at alpha=1e-6
    draws = 1_000_000
    gen = RngContract(seed=77).generator()
    rows = gen.permuted(np.tile(np.arange(1, 4), (draws, 1)), axis=1)
    codes = rows[:, 0] * 9 + rows[:, 1] * 3 + rows[:, 2]
    _, counts = np.unique(codes, return_counts=True)
    assert len(counts) == 6
    expected = draws / 6.0
    stat = float(np.sum((counts - expected) ** 2 / expected))
    assert stat <= chisq_upper_quantile(5, 1e-6)


def test_dkw_half_width_scaling():
    rng = RngContract(seed=5)
    est1 = estimate_kolmogorov(3, 2, 2000, rng)
    est2 = estimate_kolmogorov(3, 2, 4000, rng)
    assert est1.half_width / est2.half_width == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert est1.half_width == pytest.approx(math.sqrt(math.log(200.0) / (2 * 2000)), rel=1e-12)
    with pytest.raises(DomainError):
        estimate_kolmogorov(3, 2, 999, rng)


def test_kolmogorov_exact_two_atom_law():
    # r=2, n=2: F in {0, 2} with probability 1/2 each; d_K = 1/2 at the origin
    est = exact_kolmogorov(2, 2)
    assert est.method == "exact-enumeration"
    assert est.value == pytest.approx(0.5, abs=1e-12)
    mc = estimate_kolmogorov(2, 2, 200_000, RngContract(seed=8))
    assert abs(mc.value - est.value) <= mc.half_width


def test_kolmogorov_threads_do_not_change_result():
    a = estimate_kolmogorov(10, 3, 50_000, RngContract(seed=4), threads=1)
    b = estimate_kolmogorov(10, 3, 50_000, RngContract(seed=4), threads=4)
    assert a.value == b.value


def test_exact_smooth_gap_examples():
    assert exact_smooth_gap(4, 3, identity()) == pytest.approx(0.0, abs=1e-12)
    assert exact_smooth_gap(4, 3, power(2)) == pytest.approx(1.0, abs=1e-12)
    gap = exact_smooth_gap(8, 3, cosine(0.01))
    target = 0.01 ** 2 * 2 / 8
    assert abs(gap - target) <= 0.25 * target


def test_estimate_smooth_gap_brackets_exact():
    exact_gap = exact_smooth_gap(4, 3, cosine(1.0))
    est = estimate_smooth_gap(4, 3, cosine(1.0), 200_000, RngContract(seed=12))
    assert abs(est.value - exact_gap) <= est.half_width + 1e-3


def test_rate_experiment_table():
    rows = rate_experiment(3, [2, 4, 8], power(2), mode="exact")
    assert [row["n_times_gap"] for row in rows] == pytest.approx([4.0, 4.0, 4.0])
    assert all(row["method"] == "exact-enumeration" for row in rows)

    rows = rate_experiment(3, [2, 4, 8], cosine(1.0), mode="exact")
    for row in rows:
        assert row["gap_below_bound"] is True
        assert row["gap"] <= row["bound_compact"]

    rows = rate_experiment(3, [16], power(2), mode="auto", samples=50_000,
                           rng=RngContract(seed=3))
    assert rows[0]["method"] == "monte-carlo"  # 6^16 exceeds the budget


def test_wasserstein_below_prop_bound():
    est = estimate_wasserstein(400, 100_000, RngContract(seed=21))
    bound = (87 + 48 / math.sqrt(400)) / math.sqrt(400)
    assert bound == pytest.approx(4.47, abs=1e-12)
    assert est.value <= bound


def test_smoothing_function_shape():
    alpha, z = 0.8, 3.0
    h = smoothing_function(alpha, z)
    assert h.fn(z - alpha) == 1.0
    assert h.fn(z - alpha - 5.0) == 1.0
    assert h.fn(z) == 0.0
    assert h.fn(z + 2.0) == 0.0
    assert h.norm(1) == pytest.approx(2 / alpha)
    assert h.norm(2) == pytest.approx(8 / alpha ** 2)
    assert h.norm(3) == pytest.approx(32 / alpha ** 3)
    # nonincreasing on a grid
    xs = np.linspace(z - alpha - 1, z + 1, 2000)
    vals = np.array([h.fn(float(x)) for x in xs])
    assert np.all(np.diff(vals) <= 1e-12)
    assert np.all((vals >= 0.0) & (vals <= 1.0))


def test_smoothing_function_smoothness_at_knots():
    alpha, z = 1.3, 2.0
    h = smoothing_function(alpha, z)
    knots = [z - alpha, z - 0.75 * alpha, z - 0.25 * alpha, z]
    eps = 1e-7
    for x in knots:
        # value, first and second one-sided differences agree: h is C^2
        left = h.fn(x - eps)
        right = h.fn(x + eps)
        assert abs(left - right) <= 1e-6
        dl = (h.fn(x) - h.fn(x - eps)) / eps
        dr = (h.fn(x + eps) - h.fn(x)) / eps
        assert abs(dl - dr) <= 1e-5
        d2l = (h.fn(x) - 2 * h.fn(x - eps) + h.fn(x - 2 * eps)) / eps ** 2
        d2r = (h.fn(x + 2 * eps) - 2 * h.fn(x + eps) + h.fn(x)) / eps ** 2
        assert abs(d2l - d2r) <= 1e-2 * max(1.0, h.norm(2))


def test_smoothing_function_exact_knot_values():
    # continuity is exact at the four knots of the core ramp
    h = smoothing_function(2.0, 0.0)  # maps x in [-2, 0] onto the core [-1, 1]
    assert h.fn(-2.0) == 1.0
    assert h.fn(-1.5) == pytest.approx(1 - (2 / 3) * (1 / 2) ** 3, abs=1e-12)
    assert h.fn(-1.0) == pytest.approx(0.5, abs=1e-12)
    assert h.fn(-0.5) == pytest.approx((2 / 3) * (1 / 2) ** 3, abs=1e-12)
    assert h.fn(0.0) == 0.0


def test_estimate_below_kolmogorov_bound_small_case():
    est = estimate_kolmogorov(100, 2, 100_000, RngContract(seed=6))
    assert est.value <= min(1.0, bound_kolmogorov(100, 2)) + est.half_width


def test_release_gate_gap_below_every_applicable_bound():
    # zero observed violations across every simultaneously valid smooth bound
    from friedman_bounds import SmoothNorms, bound_r2_special, bound_sharp, bound_compact, bound_trivial

    cases = [(r, n) for r in (2, 3) for n in (2, 4, 8)] + [(4, 2), (4, 3)]
    funcs = [cosine(0.5), cosine(1.0), cosine(2.0)]
    for r, n in cases:
        for h in funcs:
            gap = exact_smooth_gap(n, r, h)
            norms = SmoothNorms(h.norm(1), h.norm(2), h.norm(3))
            assert gap <= bound_compact(n, r, norms), (r, n, h.label)
            assert gap <= bound_trivial(r, norms.h1), (r, n, h.label)
            if n >= 2:
                assert gap <= bound_sharp(n, r, norms), (r, n, h.label)
            if r == 2:
                assert gap <= bound_r2_special(n, "smooth", norms), (r, n, h.label)
