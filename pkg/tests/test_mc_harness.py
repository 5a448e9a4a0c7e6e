"""
Tests for ensemble orchestration, CSV persistence and aggregation.
"""
import json

import pytest
from pydantic import ValidationError

from app.core.exceptions import ConfigError, PersistenceError
from app.core.rng import derive_seed, splitmix64
from app.modules.mc_harness import storage
from app.modules.mc_harness.schemas import EnsembleConfig
from app.modules.mc_harness.services import (
    aggregate,
    build_statistics,
    checkpoint_plan,
    resolve_workers,
    run_ensemble,
)
from app.modules.rate_analysis.models import CheckpointRecord


def config(tmp_path, **overrides) -> EnsembleConfig:
    data = {"t_max": 2000, "replicas": 2, "out_dir": str(tmp_path), "workers": 1, "base_seed": 17}
    data.update(overrides)
    return EnsembleConfig.model_validate(data)


class TestSeeds:
    """Test replica seed derivation"""

    def test_derivation_is_stable(self):
        """Test that seeds depend only on (base, index)"""
        assert derive_seed(1, 0) == derive_seed(1, 0)
        assert derive_seed(1, 0) != derive_seed(1, 1)
        assert derive_seed(1, 0) != derive_seed(2, 0)
        assert 0 <= derive_seed(2**64 - 1, 5) < 2**64

    def test_splitmix_reference_value(self):
        """Test the mixer on the first SplitMix64 output for state 0"""
        assert splitmix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF


class TestCheckpointPlan:
    """Test checkpoint plans clipped to [t0, t_max]"""

    def test_plan_ends_at_horizon(self):
        """Test that t_max is appended after the last cube"""
        assert checkpoint_plan(3, None, 3, 100) == [(2, 8), (3, 27), (4, 64), (5, 100)]

    def test_horizon_on_schedule(self):
        """Test that a horizon on the schedule is not duplicated"""
        assert checkpoint_plan(3, None, 3, 64) == [(2, 8), (3, 27), (4, 64)]

    def test_horizon_at_t0(self):
        """Test a single checkpoint when t_max = t0"""
        assert checkpoint_plan(3, None, 3, 3) == [(2, 3)]

    def test_k_max_cuts_schedule(self):
        """Test that k_max limits the schedule before t_max"""
        assert checkpoint_plan(2, 3, 1, 100) == [(1, 1), (2, 4), (3, 9), (4, 100)]

    def test_errors(self):
        """Test m <= 1 and t_max < t0"""
        with pytest.raises(ConfigError):
            checkpoint_plan(1.0, None, 1, 10)
        with pytest.raises(ConfigError):
            checkpoint_plan(3, None, 10, 5)

    def test_resolve_workers(self):
        """Test workers are capped by the replica count"""
        assert resolve_workers(8, 3) == 3
        assert resolve_workers(1, 10) == 1


class TestEnsembleConfig:
    """Test config validation"""

    def test_mvrrw_needs_schedule(self, tmp_path):
        """Test mvrrw without a schedule"""
        with pytest.raises(ValidationError):
            config(tmp_path, mode="mvrrw")

    def test_vrrw_rejects_schedule(self, tmp_path):
        """Test vrrw with a schedule"""
        with pytest.raises(ValidationError):
            config(tmp_path, schedule={"special": "3", "h0": 0, "c": 2})

    def test_urn_defaults(self, tmp_path):
        """Test urn mode fills in Polya parameters"""
        cfg = config(tmp_path, mode="urn")
        assert cfg.urn is not None and cfg.urn.a == 1.0


class TestRunEnsemble:
    """Test full ensemble runs"""

    def test_trivial_run(self, tmp_path):
        """Test R=1 on K_3 with t_max = t0 gives one checkpoint at distance 0"""
        report = run_ensemble(config(tmp_path, t_max=3, replicas=1))
        stats = report.statistics
        assert len(stats.checkpoints) == 1
        assert stats.checkpoints[0].t == 3
        assert stats.checkpoints[0].sup_dist[2] == 0.0
        assert report.total_steps == 0
        assert (tmp_path / "records_0.csv").exists()
        assert (tmp_path / "report.json").exists()

    def test_outputs_and_report(self, tmp_path):
        """Test one CSV per replica, quantiles and a band for d=3 with a leaf"""
        report = run_ensemble(config(
            tmp_path, graph={"d": 3, "leaves": [0, 0, 1]}, t_max=20_000, m=2, replicas=3, burn_in=100,
        ))
        assert sorted(p.split("/")[-1] for p in report.files) == [
            "records_0.csv", "records_1.csv", "records_2.csv",
        ]
        stats = report.statistics
        assert stats.has_leaf and stats.band == {"upper": pytest.approx(1 / 3), "lower": pytest.approx(0.5)}
        assert stats.slope_sup_dist is not None and stats.slope_leaf is not None
        assert set(stats.verdict) == {"upper", "lower", "leaf"}
        assert stats.checkpoints[-1].t == 20_000
        assert report.total_steps == 3 * (20_000 - 4)
        assert report.steps_per_sec > 0
        saved = json.loads((tmp_path / "report.json").read_text())
        assert saved["statistics"]["replicas"] == 3

    def test_records_conserve_weight(self, tmp_path):
        """Test Z and L columns sum to t in every persisted row"""
        run_ensemble(config(tmp_path, graph={"d": 4, "leaves": [1, 0, 0, 2]}, t_max=50_000))
        d, records = storage.read_records(tmp_path / "records_1.csv")
        assert d == 4
        for r in records:
            assert sum(r.totals) + sum(r.leaf_totals) == r.t

    def test_byte_identical_reruns(self, tmp_path):
        """Test the same config twice writes identical CSVs"""
        first, second = tmp_path / "a", tmp_path / "b"
        run_ensemble(config(first, t_max=30_000, replicas=3))
        run_ensemble(config(second, t_max=30_000, replicas=3))
        for i in range(3):
            name = f"records_{i}.csv"
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_worker_count_does_not_change_output(self, tmp_path):
        """Test that parallel and inline runs persist the same records"""
        inline, pooled = tmp_path / "inline", tmp_path / "pooled"
        run_ensemble(config(inline, t_max=10_000, replicas=3, workers=1))
        run_ensemble(config(pooled, t_max=10_000, replicas=3, workers=2))
        for i in range(3):
            name = f"records_{i}.csv"
            assert (inline / name).read_bytes() == (pooled / name).read_bytes()

    def test_adding_replicas_keeps_existing(self, tmp_path):
        """Test that replica i has the same trajectory whatever R is"""
        small, large = tmp_path / "small", tmp_path / "large"
        run_ensemble(config(small, replicas=2))
        run_ensemble(config(large, replicas=4))
        assert (small / "records_1.csv").read_bytes() == (large / "records_1.csv").read_bytes()

    def test_mvrrw_run(self, tmp_path):
        """Test a modified-walk ensemble reports excursions and is flagged"""
        report = run_ensemble(config(
            tmp_path, mode="mvrrw", schedule={"special": "3", "h0": 0, "c": 2}, t_max=20_000, xi_from=100,
        ))
        summary = report.replica_summaries[0]
        assert summary.special_visits > 0
        assert summary.excursions is not None
        assert summary.xi_range is not None and 0 < summary.xi_range[0] <= summary.xi_range[1] < 1
        assert any("mvrrw" in flag for flag in report.statistics.flags)
        assert report.statistics.band is None

    def test_d_partite_run(self, tmp_path):
        """Test a d-partite ensemble is flagged instead of banded"""
        graph = {"family": "d_partite", "classes": [2, 1, 1], "leaf_attachments": [{"class": 1, "members": [1, 2]}]}
        report = run_ensemble(config(tmp_path, graph=graph, t_max=5000))
        assert report.statistics.family == "d_partite"
        assert report.statistics.band is None
        assert report.statistics.flags

    def test_two_vertex_run(self, tmp_path):
        """Test d=2 with a leaf on each side reports xi_L and xi_R"""
        report = run_ensemble(config(tmp_path, graph={"d": 2, "leaves": [1, 1]}, t_max=5000))
        summary = report.replica_summaries[0]
        assert summary.xi_L is not None and summary.xi_R is not None
        assert any(flag.startswith("d=2") for flag in report.statistics.flags)

    def test_urn_run(self, tmp_path):
        """Test an urn ensemble writes urn.csv and per-checkpoint quantiles"""
        report = run_ensemble(config(tmp_path, mode="urn", t_max=1000, replicas=3))
        assert (tmp_path / "urn.csv").exists()
        assert report.urn[-1].n == 1000
        assert len(report.urn[-1].fraction) == 5
        lines = (tmp_path / "urn.csv").read_text().splitlines()
        assert lines[0] == "replica,n,X,Y,stat"

    def test_horizon_below_t0(self, tmp_path):
        """Test a horizon before t0 is a config error"""
        with pytest.raises(ConfigError):
            run_ensemble(config(tmp_path, graph={"d": 3, "leaves": [0, 0, 1]}, t_max=2))

    def test_unwritable_output(self, tmp_path):
        """Test an output path under a regular file"""
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(PersistenceError):
            run_ensemble(config(blocker / "out"))


class TestAggregate:
    """Test rebuilding reports from CSVs"""

    def test_aggregate_matches_run(self, tmp_path):
        """Test aggregate(run outputs) reproduces the run's statistics"""
        cfg = config(tmp_path, graph={"d": 3, "leaves": [0, 0, 1]}, t_max=20_000, m=2, replicas=3, burn_in=100)
        report = run_ensemble(cfg)
        rebuilt = aggregate(report.files, graph=cfg.graph, burn_in=100)
        assert rebuilt.statistics == report.statistics

    def test_split_file_lists(self, tmp_path):
        """Test that the order of files does not matter"""
        report = run_ensemble(config(tmp_path, t_max=20_000, m=2, replicas=4, burn_in=100))
        forward = aggregate(report.files, burn_in=100)
        backward = aggregate(list(reversed(report.files)), burn_in=100)
        assert forward.statistics == backward.statistics

    def test_empty_list(self):
        """Test that no files is an error"""
        with pytest.raises(ConfigError):
            aggregate([])

    def test_schedule_mismatch(self, tmp_path):
        """Test files from different horizons"""
        a, b = tmp_path / "a", tmp_path / "b"
        run_ensemble(config(a, replicas=1, t_max=1000))
        run_ensemble(config(b, replicas=1, t_max=5000))
        with pytest.raises(ConfigError):
            aggregate([a / "records_0.csv", b / "records_0.csv"])

    def test_schema_mismatch(self, tmp_path):
        """Test a CSV with foreign columns"""
        bogus = tmp_path / "records_0.csv"
        bogus.write_text("replica,k,t,pos,foo,bar,baz,eta,sup_dist,xi_12,Xi_12\n")
        with pytest.raises(ConfigError):
            aggregate([bogus])

    def test_missing_file(self, tmp_path):
        """Test an unreadable path"""
        with pytest.raises(PersistenceError):
            aggregate([tmp_path / "missing.csv"])

    def test_build_statistics_rejects_empty(self):
        """Test aggregation of nothing"""
        with pytest.raises(ConfigError):
            build_statistics([], d=3, has_leaf=False)


class TestStorage:
    """Test the CSV layer directly"""

    RECORDS = [
        CheckpointRecord(replica=0, k=1, t=8, pos="1.2", totals=(3, 2, 1), leaf_totals=(0, 0, 2),
                         eta=0.1 + 0.2, sup_dist=1 / 3, xi_12=0.6, Xi_12=None),
        CheckpointRecord(replica=0, k=2, t=27, pos="l1@3", totals=(9, 8, 7), leaf_totals=(0, 0, 3),
                         eta=2.5e-17, sup_dist=0.123456789012345678, xi_12=0.5, Xi_12=0.0625),
    ]

    def test_records_read_back_exactly(self, tmp_path):
        """Test that labels stay strings, floats keep every bit and a missing Xi_12 stays None"""
        path = storage.write_records(tmp_path / "records_0.csv", self.RECORDS, d=3)
        d, records = storage.read_records(path)
        assert d == 3
        assert records == self.RECORDS
        assert records[0].pos == "1.2"
        assert records[0].Xi_12 is None

    def test_file_layout(self, tmp_path):
        """Test the header order and the empty cell written for a missing value"""
        path = storage.write_records(tmp_path / "records_0.csv", self.RECORDS, d=3)
        lines = path.read_text().split("\n")
        assert lines[0] == ",".join(storage.record_columns(3))
        assert lines[0] == "replica,k,t,pos,Z_1,Z_2,Z_3,L_1,L_2,L_3,eta,sup_dist,xi_12,Xi_12"
        assert lines[1].startswith("0,1,8,1.2,3,2,1,0,0,2,")
        assert lines[1].endswith(",")
        assert lines[-1] == ""

    def test_malformed_row(self, tmp_path):
        """Test a non-integer time raises ConfigError with the line number"""
        path = storage.write_records(tmp_path / "records_0.csv", self.RECORDS[:1], d=3)
        text = path.read_text().replace("0,1,8,", "0,1,eight,", 1)
        path.write_text(text)
        with pytest.raises(ConfigError, match=":2:"):
            storage.read_records(path)

    def test_empty_file(self, tmp_path):
        """Test a zero-byte file raises ConfigError"""
        path = tmp_path / "records_0.csv"
        path.write_text("")
        with pytest.raises(ConfigError):
            storage.read_records(path)

    def test_urn_rows(self, tmp_path):
        """Test urn.csv columns and a missing statistic"""
        path = storage.write_urn_rows(tmp_path / "urn.csv", [(0, 10, 6.0, 7.0, 0.5), (1, 10, 8.0, 5.0, None)])
        lines = path.read_text().splitlines()
        assert lines == ["replica,n,X,Y,stat", "0,10,6,7,0.5", "1,10,8,5,"]
