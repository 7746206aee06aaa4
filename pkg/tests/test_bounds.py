"""Closed-form bound calculators: independent series/tail cross-checks,
frozen worked values, and the Monte-Carlo lower-bound harness."""

import math
from itertools import product

import pytest

from gridsign.bounds import (
    SAP_GROWTH_RATE,
    ambiguous_node_rate,
    bad_region_prob_bound,
    exact_bad_region_prob,
    expander_error_bound,
    expander_error_given_bad,
    lower_bound_estimate,
    mincut_recovery_condition,
    mincut_region_count_bound,
    refined_constant,
    series_error_bound,
)
from gridsign.census import count_saps
from gridsign.graphs import build_grid


def _tail_by_enumeration(i, p):
    """Sum over all corruption patterns of i elements with at least half bad."""
    total = 0.0
    for bits in product((0, 1), repeat=i):
        k = sum(bits)
        if 2 * k >= i:
            total += p**k * (1 - p) ** (i - k)
    return total


@pytest.mark.parametrize("i", [4, 6, 8, 10, 12])
@pytest.mark.parametrize("p", [0.01, 0.05, 0.15, 0.3, 0.5])
def test_exact_tail_matches_enumeration(i, p):
    assert exact_bad_region_prob(i, p) == pytest.approx(
        _tail_by_enumeration(i, p), rel=1e-12)


def test_tail_worked_value():
    assert exact_bad_region_prob(4, 0.01) == pytest.approx(0.00059203, abs=1e-8)
    assert exact_bad_region_prob(4, 0.0) == 0.0
    assert exact_bad_region_prob(4, 0.5) == pytest.approx(11 / 16)


def test_bound_ordering_exact_tight_loose():
    for p in (0.005, 0.01, 0.05, 0.1, 0.25, 0.4, 0.5):
        for i in range(4, 17, 2):
            exact = exact_bad_region_prob(i, p)
            tight = bad_region_prob_bound(i, p, tight=True)
            loose = bad_region_prob_bound(i, p)
            assert exact <= tight <= loose
            assert tight == pytest.approx((2 * math.e * p) ** (i / 2), rel=1e-12)
            assert loose == pytest.approx((3 * math.sqrt(p)) ** i, rel=1e-12)


def test_tail_validation():
    with pytest.raises(ValueError):
        exact_bad_region_prob(0, 0.1)
    with pytest.raises(ValueError):
        bad_region_prob_bound(4, 0.7)


def test_series_coefficients_match_partial_sums():
    # type-1 coefficient is (1/16) sum k x^k over k >= 2 with x = 81 p;
    # boundary coefficient is (2/9) sum k^2 y^k over k >= 2 with y = 9 sqrt(p)
    p = 1 / 200
    sb = series_error_bound(p, 400)
    x = 81 * p
    y = 9 * math.sqrt(p)
    t1 = sum(k * x**k for k in range(2, 400)) / 16
    bc = (2 / 9) * sum(k * k * y**k for k in range(2, 400))
    assert sb.type1_coefficient == pytest.approx(t1, rel=1e-12)
    assert sb.boundary_coefficient == pytest.approx(bc, rel=1e-12)
    assert sb.converged


def test_series_worked_values():
    sb = series_error_bound(1 / 162, 400)
    assert sb.type1_coefficient == pytest.approx(0.09375, rel=1e-12)
    assert sb.boundary_coefficient == pytest.approx(10.518783062034673, rel=1e-12)
    assert sb.value == pytest.approx(247.87566124069346, rel=1e-12)
    assert sb.converged


def test_series_divergence_threshold():
    diverged = series_error_bound(1 / 81, 400)
    assert not diverged.converged
    assert math.isinf(diverged.type1_coefficient)
    assert math.isinf(diverged.value)
    assert series_error_bound(1 / 81 - 1e-9, 400).converged


def test_series_scaling_in_n():
    p = 1 / 400
    a = series_error_bound(p, 100)
    b = series_error_bound(p, 400)
    assert a.type1_coefficient == b.type1_coefficient
    assert b.value == pytest.approx(400 * a.type1_coefficient
                                    + 20 * a.boundary_coefficient, rel=1e-12)


def test_series_small_p_limit_of_type1_term():
    # leading term is (1/16) * 2 * (81 p)^2 = 820.125 p^2
    p = 1e-7
    sb = series_error_bound(p, 4)
    assert sb.type1_coefficient / p**2 == pytest.approx(820.125, rel=1e-4)


def test_series_validation():
    with pytest.raises(ValueError):
        series_error_bound(0.01, 2)
    with pytest.raises(ValueError):
        series_error_bound(0.6, 100)


def test_refined_constant_frozen_values():
    census = count_saps(12)
    rc = refined_constant(0.017, census, 12)
    assert rc.explicit_term == pytest.approx(0.0022510720332606779, rel=1e-14)
    assert rc.remainder_term == pytest.approx(54.984996583236594, rel=1e-14)
    assert rc.total == pytest.approx(190267.29292480915, rel=1e-14)
    assert rc.remainder_ratio == pytest.approx(0.64903056077202392, rel=1e-14)
    assert rc.converged


def test_refined_constant_report_reproducible():
    census = count_saps(12)
    a = refined_constant(0.017, census, 12).report()
    b = refined_constant(0.017, census, 12).report()
    assert a == b
    assert "total 190267.29292480915" in a
    assert a.endswith("converged 1\n")


def test_refined_constant_explicit_term_at_minimal_imax():
    census = count_saps(12)
    p = 0.01
    rc = refined_constant(p, census, 4)
    # the single perimeter-4 loop has enclosed area 1
    assert rc.explicit_term == pytest.approx(exact_bad_region_prob(4, p), rel=1e-12)


def test_refined_constant_monotone_in_p():
    census = count_saps(12)
    totals = [refined_constant(p, census, 12).total for p in (0.005, 0.01, 0.017)]
    assert totals[0] <= totals[1] <= totals[2]


def test_refined_constant_divergence():
    census = count_saps(12)
    # b = 2 e p growth^2 crosses 1 near p = 0.0262
    limit = 1.0 / (2 * math.e * SAP_GROWTH_RATE**2)
    rc = refined_constant(limit * 1.05, census, 12)
    assert not rc.converged and math.isinf(rc.total)
    assert refined_constant(limit * 0.95, census, 12).converged


def test_refined_constant_validation():
    census = count_saps(8)
    with pytest.raises(ValueError):
        refined_constant(0.0, census, 8)
    with pytest.raises(ValueError):
        refined_constant(0.01, census, 7)
    with pytest.raises(ValueError):
        refined_constant(0.01, census, 12)  # census too small


def test_ambiguous_node_rate():
    assert ambiguous_node_rate(0.1) == pytest.approx(6 * 0.01 * 0.81, rel=1e-12)
    assert ambiguous_node_rate(0.0) == 0.0
    with pytest.raises(ValueError):
        ambiguous_node_rate(0.6)


def test_lower_bound_estimate_matches_predicted_ambiguity_rate():
    g = build_grid(20, 20)
    p, q, trials = 0.05, 0.4, 200
    stats = lower_bound_estimate(g, p, q, trials, seed=0)
    assert stats.n_white == 200
    assert stats.n_white_deg4 == 162
    rate = ambiguous_node_rate(p)
    expected = trials * stats.n_white_deg4 * rate
    sigma = (trials * stats.n_white_deg4 * rate * (1 - rate)) ** 0.5
    assert abs(stats.total_ambiguous_deg4 - expected) <= 3 * sigma
    # on ambiguous degree-4 nodes the rule is guessing against node noise q
    assert stats.error_rate_on_ambiguous == pytest.approx(q, abs=0.08)
    assert 0.0 <= stats.mean_error <= stats.n_white
    assert stats.stderr_error > 0.0


def test_lower_bound_estimate_deterministic():
    g = build_grid(8, 8)
    a = lower_bound_estimate(g, 0.1, 0.4, 50, seed=3)
    b = lower_bound_estimate(g, 0.1, 0.4, 50, seed=3)
    assert a == b


def test_lower_bound_validation():
    g = build_grid(4, 4)
    with pytest.raises(ValueError):
        lower_bound_estimate(g, 0.1, 0.4, 0, seed=0)


def test_expander_calculators():
    assert expander_error_bound(0.5, 3, 0.05, 100) == pytest.approx(30.0)
    assert expander_error_given_bad(0.5, 3, 15) == pytest.approx(20.0)
    assert mincut_region_count_bound(4, 16, 4) == pytest.approx(256.0)
    assert mincut_region_count_bound(2, 10, 2) == pytest.approx(100.0)
    assert mincut_recovery_condition(14, 16, 3) is True
    assert mincut_recovery_condition(11, 16, 3) is False
    with pytest.raises(ValueError):
        expander_error_bound(0.0, 3, 0.05, 100)
    with pytest.raises(ValueError):
        expander_error_bound(0.5, 2, 0.05, 100)
    with pytest.raises(ValueError):
        expander_error_given_bad(0.5, 3, -1)
    with pytest.raises(ValueError):
        mincut_region_count_bound(0, 16, 4)
