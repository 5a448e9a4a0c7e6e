"""
Tests for generalized two-color urns, the multi-color Polya urn and the
walk/urn coupling.
"""
import math

import numpy as np
import pytest

from app.core.exceptions import ConfigError
from app.core.rng import derive_seed, make_generator
from app.modules.urn_models.models import MultiUrnState, UrnState
from app.modules.urn_models.services import (
    coupled_mvrrw_urn,
    friedman_target,
    init_multi_polya,
    init_urn,
    loop_graph_ratio,
    multi_polya_step,
    regime_statistic,
    run_multi_polya,
    run_urn,
    supermartingale_diag,
    supermartingale_drift,
    urn_fraction,
    urn_step,
)


class TestTwoColorUrn:
    """Test single draws and deterministic helpers"""

    @pytest.mark.parametrize("args", [(0, 0, 1, 0, 0, 1), (-1, 2, 1, 0, 0, 1), (1, 1, -1, 0, 0, 1)])
    def test_init_rejects_bad_input(self, args):
        """Test that empty urns and negative params are rejected"""
        with pytest.raises(ConfigError):
            init_urn(*args)

    def test_step_adds_one_row(self):
        """Test that a draw adds (a, b) or (c, d)"""
        state = init_urn(1, 1, 2, 1, 0, 3)
        urn_step(state, make_generator(1))
        assert (state.X, state.Y) in {(3.0, 2.0), (1.0, 4.0)}
        assert state.n == 1

    def test_statistics_by_hand(self):
        """Test the three regime statistics on fixed counts"""
        state = UrnState(X=math.e ** 2, Y=math.e, a=1, b=0, c=2, d=1, n=5)
        assert regime_statistic(state, "thurn1") == pytest.approx(2.0)
        assert regime_statistic(state, "thurn2") == pytest.approx(math.e / 2 - 1)
        assert regime_statistic(state, "fraction") == pytest.approx(urn_fraction(state))

    def test_statistics_undefined(self):
        """Test that thurn statistics refuse degenerate counts"""
        state = init_urn(1, 1, 1, 0, 1, 1)
        with pytest.raises(ConfigError):
            regime_statistic(state, "thurn1")
        with pytest.raises(ConfigError):
            regime_statistic(state, "thurn2")
        with pytest.raises(ConfigError):
            regime_statistic(state, "median")

    def test_friedman_target(self):
        """Test the Friedman limit and its regime check"""
        assert friedman_target(2, 1, 0, 1) == pytest.approx(0.5)
        assert friedman_target(5, 2, 0, 1) == pytest.approx(4 / 6)
        with pytest.raises(ConfigError):
            friedman_target(1, 1, 0, 1)

    def test_loop_graph_ratio(self):
        """Test Y log n / n"""
        state = UrnState(X=10, Y=5, a=1, b=0, c=1, d=1, n=100)
        assert loop_graph_ratio(state) == pytest.approx(5 * math.log(100) / 100)


class TestRunUrn:
    """Test trajectories"""

    def test_records_and_final_state(self):
        """Test recording marks and that a balanced urn grows by one per draw"""
        state = init_urn(1, 1, 1, 0, 0, 1)
        trajectory = run_urn(state, 1000, seed=3, record_at=[10, 100, 100, 1000], which="fraction")
        assert trajectory.ns == [10, 100, 1000]
        assert state.n == 1000
        assert state.X + state.Y == pytest.approx(1002)
        assert trajectory.stat[-1] == pytest.approx(urn_fraction(state))

    def test_undefined_statistic_is_nan(self):
        """Test that thurn1 records nan while X or Y is still 1"""
        state = init_urn(1, 1, 2, 0, 0, 1)
        trajectory = run_urn(state, 1, seed=4, record_at=[0], which="thurn1")
        assert trajectory.ns == [0]
        assert math.isnan(trajectory.stat[0])

    def test_seed_reproducible(self):
        """Test that a seed fixes the trajectory"""
        a = init_urn(1, 1, 2, 1, 0, 1)
        b = init_urn(1, 1, 2, 1, 0, 1)
        run_urn(a, 5000, seed=12)
        run_urn(b, 5000, seed=12)
        assert (a.X, a.Y) == (b.X, b.Y)

    def test_negative_steps(self):
        """Test that negative steps raise ConfigError"""
        with pytest.raises(ConfigError):
            run_urn(init_urn(1, 1, 1, 0, 0, 1), -1)

    def test_polya_fraction_is_martingale(self):
        """Test that the Polya fraction keeps its initial mean"""
        fractions = []
        for r in range(2000):
            state = init_urn(1, 2, 1, 0, 0, 1)
            run_urn(state, 200, seed=derive_seed(99, r))
            fractions.append(urn_fraction(state))
        fractions = np.asarray(fractions)
        se = fractions.std(ddof=1) / math.sqrt(fractions.size)
        assert abs(fractions.mean() - 1 / 3) < 4 * se

    def test_friedman_fraction_converges(self):
        """Test X/(X+Y) -> (a-d)/((a-d)+b) for a=2, b=1, c=0, d=1"""
        fractions = []
        for r in range(20):
            state = init_urn(1, 1, 2, 1, 0, 1)
            run_urn(state, 100_000, seed=derive_seed(7, r))
            fractions.append(urn_fraction(state))
        assert abs(np.mean(fractions) - 0.5) < 0.05

    def test_thurn1_tends_to_a(self):
        """Test log X / log Y -> a for a=2, b=c=0, d=1"""
        values = []
        for r in range(21):
            state = init_urn(1, 1, 2, 0, 0, 1)
            run_urn(state, 100_000, seed=derive_seed(8, r))
            values.append(regime_statistic(state, "thurn1"))
        assert 1.5 <= float(np.median(values)) <= 2.5

    def test_thurn2_settles(self):
        """Test that X/Y - log Y fluctuates less late than early"""
        early = list(np.unique(np.logspace(2, 3, 10).astype(int)))
        late = list(np.unique(np.logspace(4, 5, 10).astype(int)))
        calmer = 0
        replicas = 40
        for r in range(replicas):
            state = init_urn(1, 1, 1, 0, 1, 1)
            trajectory = run_urn(state, 100_000, seed=derive_seed(10, r), record_at=early + late, which="thurn2")
            stat = np.asarray(trajectory.stat)
            n_early = len(early)
            if np.nanstd(stat[:n_early]) > np.nanstd(stat[n_early:]):
                calmer += 1
        assert calmer >= 0.8 * replicas


class TestMultiPolya:
    """Test the d-color Polya urn and its supermartingale"""

    def test_init(self):
        """Test d colors with one ball each"""
        state = init_multi_polya(4)
        assert state.t == 4 and state.d == 4
        with pytest.raises(ConfigError):
            init_multi_polya(1)

    def test_step_and_run(self):
        """Test that each draw adds one ball"""
        state = init_multi_polya(3)
        multi_polya_step(state, make_generator(5))
        assert state.t == 4
        run_multi_polya(state, 1000, seed=6)
        assert state.t == 1004
        assert state.counts.min() >= 1

    def test_supermartingale_nonnegative_with_nonpositive_drift(self):
        """Test M_i(t) >= 0 and E[dM_i] <= 0 along a run"""
        state = init_multi_polya(3)
        run_multi_polya(state, 5000, seed=7)
        for i in range(1, 4):
            if state.counts[i - 1] >= 2:
                assert supermartingale_diag(state, i) >= 0.0
                assert supermartingale_drift(state, i) <= 1e-15

    def test_drift_formula(self):
        """Test the one-step drift on fixed counts"""
        state = MultiUrnState(counts=np.array([3, 5, 2], dtype=np.int64))
        expected = math.log1p(1 / 10) - 3 / 10 * math.log1p(1 / 2)
        assert supermartingale_drift(state, 1) == pytest.approx(expected)
        with pytest.raises(ConfigError):
            supermartingale_diag(MultiUrnState(counts=np.array([1, 5, 2])), 1)
        with pytest.raises(ConfigError):
            supermartingale_diag(state, 4)


class TestCoupling:
    """Test the shared-uniform walk/urn coupling"""

    @pytest.mark.parametrize("h0,c,seed", [(0, 2, 1), (1, 1, 2), (5, 3, 3)])
    def test_walk_dominates_urn(self, h0, c, seed):
        """Test that W at visits to {1, 2} never falls below the urn's second color"""
        result = coupled_mvrrw_urn(20_000, seed=seed, h0=h0, c=c)
        assert result.dominated
        assert result.first_violation is None
        assert result.min_gap >= 0.0
        assert result.X == pytest.approx(2 + 20_000)

    def test_schedule_must_start_above_weight(self):
        """Test that H(1) <= W(0) is rejected"""
        with pytest.raises(ConfigError):
            coupled_mvrrw_urn(100, h0=0, c=1)
        with pytest.raises(ConfigError):
            coupled_mvrrw_urn(0)
