"""Tests for src.analysis.asymptotics: closed forms, limits, bounds and convergence tables."""

import math
from fractions import Fraction

import pytest

from src.analysis.asymptotics import (
    BoundParams,
    LimitReport,
    LimitRow,
    banzhaf_affirmative_success,
    banzhaf_decisiveness,
    banzhaf_efficiency,
    bounds,
    chebyshev_weight,
    closed_forms,
    convergence_table,
    db_approx,
    effb_bound,
    hoeffding,
    limits,
    pweight,
    sb_approx,
    sbp_bound,
    shapley_efficiency,
    shapley_success_limit,
)
from src.analysis.engine import analyze
from src.config import Settings
from src.data.measures import penrose_banzhaf, shapley_shubik, tail_integrals
from src.data.systems import simple_majority, unit_weight_system
from src.errors import DomainError
from tests.conftest import mixture_measure

F = Fraction
HALF = F(1, 2)


class TestClosedForms:
    def test_majority_odd(self):
        forms = closed_forms(3, F(2, 3))
        assert forms.majority_s_plus == F(5, 12)
        assert forms.majority_s == F(5, 6)

    def test_majority_even(self):
        forms = closed_forms(4, F(5, 8))
        assert forms.majority_s_plus == F(3, 8) - F(1, 40)
        assert forms.majority_s_minus == F(3, 8) + F(3, 40)
        assert forms.majority_s == F(3, 4) + F(1, 20)

    def test_general_r_matches_majority(self):
        for n in range(2, 30):
            forms = closed_forms(n, simple_majority(n).relative_quota)
            assert forms.s_plus == forms.majority_s_plus
            assert forms.s_minus == forms.majority_s_minus

    def test_decisiveness(self):
        forms = closed_forms(10, F(3, 5))
        assert forms.d == F(1, 10)
        assert forms.d_plus == F(5, 110)
        assert forms.d_minus == F(6, 110)

    def test_success_cut(self):
        assert closed_forms(10, F(11, 20)).success_cut == 5

    @pytest.mark.parametrize("r", ["0.55", "0.6", "2/3", "0.75", None])
    def test_match_engine(self, r):
        mu = shapley_shubik()
        for n in range(2, 51):
            rel = simple_majority(n).relative_quota if r is None else F(r)
            forms = closed_forms(n, rel)
            vp = analyze(unit_weight_system(n, rel), mu)
            assert vp.value("SPlus") == forms.s_plus
            assert vp.value("SMinus") == forms.s_minus
            assert vp.value("DPlus") == forms.d_plus
            assert vp.value("DMinus") == forms.d_minus
            assert vp.efficiency == forms.efficiency

    def test_r_domain(self):
        with pytest.raises(DomainError):
            closed_forms(10, 1)

    def test_shapley_efficiency_non_integer_quota(self):
        assert shapley_efficiency(4, F(5, 2)) == F(2, 5)

    @pytest.mark.parametrize("n", [1000, 10_000])
    def test_shapley_efficiency_limit(self, n):
        value = closed_forms(n, F(3, 5)).efficiency
        assert abs(value - F(2, 5)) <= F(2, n)

    def test_shapley_efficiency_engine_at_1000(self):
        report = analyze(unit_weight_system(1000, F(3, 5)), shapley_shubik())
        assert report.efficiency == closed_forms(1000, F(3, 5)).efficiency


class TestBanzhafExact:
    def test_efficiency_odd_majority_is_half(self):
        for n in (1, 3, 9, 21):
            assert banzhaf_efficiency(n, simple_majority(n).relative_quota) == HALF

    def test_efficiency_even_majority_below_half(self):
        assert banzhaf_efficiency(4, F(5, 8)) == F(5, 16)

    def test_matches_engine(self):
        mu = penrose_banzhaf()
        for n in (5, 12, 17):
            r = F(3, 5)
            report = analyze(unit_weight_system(n, r), mu)
            assert banzhaf_efficiency(n, r) == report.efficiency
            assert banzhaf_affirmative_success(n, r) == report.value("SPlus")
            assert banzhaf_decisiveness(n, r) == report.value("D")

    def test_decisiveness_majority3(self):
        assert banzhaf_decisiveness(3, F(2, 3)) == HALF

    @pytest.mark.parametrize("n", [100_001, 100_003])
    def test_decisiveness_log_gamma_path(self, n):
        d_b = banzhaf_decisiveness(n, F(n + 1, 2 * n))
        assert isinstance(d_b, float)
        assert 0.99 <= d_b * math.sqrt(2 * math.pi * n) / 2 <= 1.01

    def test_log_gamma_agrees_with_exact(self):
        n, r = 2001, F(1001, 2001)
        exact = banzhaf_decisiveness(n, r, Settings(exact_binomial_below=10_000))
        approx = banzhaf_decisiveness(n, r, Settings(exact_binomial_below=100))
        assert approx == pytest.approx(float(exact), rel=1e-9)


class TestLimits:
    def test_banzhaf_three_way(self):
        assert limits("2/5").banzhaf_efficiency == 1
        assert limits(HALF).banzhaf_efficiency == HALF
        assert limits("3/5").banzhaf_efficiency == 0
        assert limits(HALF).banzhaf_s_plus == F(1, 4)
        assert limits("3/5").banzhaf_s_minus == HALF

    def test_shapley(self):
        lim = limits("3/5")
        assert lim.shapley_efficiency == F(2, 5)
        assert lim.shapley_s_plus == HALF - F(9, 50)
        assert lim.shapley_s_minus == HALF - F(4, 50)

    def test_success_limit_maximised_at_half(self):
        grid = [F(j, 100) for j in range(101)]
        values = [shapley_success_limit(r) for r in grid]
        assert max(values) == F(3, 4)
        assert values.index(F(3, 4)) == 50
        assert shapley_success_limit(0) == shapley_success_limit(1) == HALF

    def test_success_limit_sum(self):
        for j in range(1, 100):
            lim = limits(F(j, 100))
            assert lim.shapley_s == shapley_success_limit(F(j, 100))

    def test_approximations(self):
        assert limits(HALF).db_approx(100) == pytest.approx(2 / math.sqrt(200 * math.pi))
        assert limits(HALF).db_approx is db_approx
        assert sb_approx(50) == pytest.approx(0.5 + 1 / math.sqrt(100 * math.pi))

    def test_belief_limits(self):
        lim = limits(HALF, mixture_measure())
        tails = tail_integrals(mixture_measure(), HALF)
        assert lim.belief_efficiency == tails.mass_tail == HALF
        assert lim.belief_s_plus == tails.first_moment_tail
        assert lim.belief_s_minus == tails.complement_moment_tail

    def test_no_belief_limits_without_mu(self):
        assert limits(HALF).belief_s is None

    def test_atom_at_r_warned(self, caplog):
        lim = limits(HALF, penrose_banzhaf())
        assert lim.atom_at_r == 1
        assert "atom" in caplog.text

    def test_r_domain(self):
        with pytest.raises(DomainError):
            limits(0)


class TestBounds:
    def test_effb_example(self):
        assert effb_bound("3/5", 100) == pytest.approx(math.exp(-2))

    def test_hoeffding_zero_deviation(self):
        assert hoeffding(0, 5) == 1

    def test_pweight_equal_weights(self):
        n, alpha = 40, 0.1
        assert pweight(alpha, [1] * n) == pytest.approx(2 * math.exp(-2 * alpha**2 * n))

    def test_chebyshev(self):
        assert chebyshev_weight(0.5, 0.5, [1, 1, 1, 1]) == pytest.approx(0.25)

    @pytest.mark.parametrize("r", ["1/2", "2/5"])
    def test_bounds_need_r_above_half(self, r):
        with pytest.raises(DomainError):
            effb_bound(r, 10)
        with pytest.raises(DomainError):
            sbp_bound(r, 10)

    def test_negative_deviation(self):
        with pytest.raises(DomainError):
            hoeffding(-1, 1)

    @pytest.mark.parametrize("r", ["0.55", "0.6", "0.7"])
    @pytest.mark.parametrize("n", [50, 100, 200])
    def test_exact_values_below_bounds(self, r, n):
        assert float(banzhaf_efficiency(n, r)) <= effb_bound(r, n)
        assert float(banzhaf_affirmative_success(n, r)) <= sbp_bound(r, n)

    def test_bounds_record(self):
        values = bounds(BoundParams(deviation=2, sigma_sq=8, relative_quota=F(3, 5), n_voters=100))
        assert values.hoeffding == pytest.approx(math.exp(-1))
        assert values.effb == pytest.approx(math.exp(-2))
        assert values.pweight is None


class TestConvergenceTable:
    def test_shapley_efficiency_gaps_shrink(self):
        report = convergence_table("E", F(3, 5), shapley_shubik(), [11, 101, 1001])
        gaps = [row.gap for row in report.rows]
        assert gaps == sorted(gaps, reverse=True)
        for row in report.rows:
            n = row.n_voters
            assert row.gap < 1 / (n + 1) + 1 / n

    def test_banzhaf_decisiveness_ratio(self):
        report = convergence_table("D", HALF, penrose_banzhaf(), [101, 1001, 10_001], simple=True)
        ratios = [float(row.value) / row.approx for row in report.rows]
        assert all(abs(x - 1) < 0.01 for x in ratios)
        assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)

    def test_shapley_success_simple(self):
        ns = list(range(3, 40, 2))
        report = convergence_table("S", HALF, shapley_shubik(), ns, simple=True)
        for row in report.rows:
            assert row.value == F(3, 4) + F(1, 4 * row.n_voters)
            assert row.limit == F(3, 4)

    def test_bounds_attached(self):
        report = convergence_table("E", F(3, 5), penrose_banzhaf(), [50, 100])
        assert all(row.bound is not None and float(row.value) <= row.bound for row in report.rows)

    def test_banzhaf_at_half_no_atom_warning(self, caplog):
        report = convergence_table("E", HALF, penrose_banzhaf(), [11])
        assert report.rows[0].limit == HALF
        assert "atom" not in caplog.text

    def test_mixture_uses_engine(self):
        report = convergence_table("E", HALF, mixture_measure(), [9, 15])
        assert report.rows[0].limit == HALF

    def test_frame(self):
        df = convergence_table("E", F(3, 5), shapley_shubik(), [10, 20]).to_frame()
        assert list(df.columns) == ["N", "E", "limit", "gap", "bound", "approx"]

    def test_unsorted_ns(self):
        with pytest.raises(DomainError):
            convergence_table("E", F(3, 5), shapley_shubik(), [20, 10])

    def test_unknown_quantity(self):
        with pytest.raises(DomainError):
            convergence_table("X", F(3, 5), shapley_shubik(), [10])

    def test_report_rejects_value_above_bound(self):
        row = LimitRow(n_voters=10, value=F(1, 2), limit=F(0), gap=0.5, bound=0.1)
        with pytest.raises(ValueError):
            LimitReport("E", "penrose-banzhaf", F(3, 5), False, (row,))
