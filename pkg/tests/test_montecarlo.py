import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqstep.construction import build_spec
from seqstep.montecarlo import (
    CSV_COLUMNS,
    ExperimentConfig,
    SweepRow,
    confidence_interval,
    csv_text,
    default_grid,
    read_csv,
    run_experiment,
    sweep_metadata,
    sweep_n,
    write_csv,
    write_metadata,
    z_star,
)
from seqstep.oracle import exact_fdr
from seqstep.rng import ConstantStream, CounterStream, derive_seed
from seqstep.threshold import ProcedureParams


def params_110(t=Fraction(9, 10)):
    return ProcedureParams.from_rates(Fraction(1, 10), Fraction(1, 2), t)


def config_110(n=11, trials=100, seed=1, **kw):
    return ExperimentConfig(
        params=params_110(),
        spec=build_spec(1, 10, n),
        n_trials=trials,
        master_seed=seed,
        **kw,
    )


class TestIntervals:
    def test_z_star_pinned(self):
        # scipy.stats.norm.ppf(0.995) and ppf(0.975)
        assert z_star(Fraction(99, 100)) == pytest.approx(2.5758293035489004, abs=1e-12)
        assert z_star(0.95) == pytest.approx(1.959963984540054, abs=1e-12)

    def test_clamping(self):
        low, high = confidence_interval(0.01, 0.02, Fraction(99, 100))
        assert low == 0.0
        low, high = confidence_interval(0.99, 0.02, Fraction(99, 100))
        assert high == 1.0
        low, high = confidence_interval(0.5, 0.0, Fraction(99, 100))
        assert (low, high) == (0.5, 0.5)

    def test_domain(self):
        with pytest.raises(ValueError):
            z_star(1.0)


class TestConfigValidation:
    def test_spec_params_must_share_ab(self):
        with pytest.raises(ValueError, match="layout built for"):
            ExperimentConfig(
                params=params_110(),
                spec=build_spec(1, 20, 21),
                n_trials=10,
                master_seed=0,
            )

    def test_c_above_half_rejected(self):
        p = ProcedureParams.from_rates(Fraction(3, 10), Fraction(3, 4), Fraction(1))
        with pytest.raises(ValueError, match="c <= 1/2"):
            ExperimentConfig(
                params=p, spec=build_spec(p.a, p.b, 10), n_trials=10, master_seed=0
            )

    def test_trials_positive(self):
        with pytest.raises(ValueError):
            config_110(trials=0)


class TestRunExperiment:
    def test_forced_all_win_trials(self):
        # Every trial forced to all-wins: cutoff 11, FDP = 3/11 each
        # time, so the estimate collapses onto the exact value.
        cfg = config_110(n=11, trials=50, seed=9)
        est = run_experiment(cfg, stream_factory=lambda seed, trial: ConstantStream(0))
        assert est.mean_fdp == pytest.approx(float(Fraction(3, 11)), abs=0)
        assert est.std_err == 0.0
        assert est.ci_low == est.ci_high == est.mean_fdp
        assert est.p_hit_end == 1.0
        assert est.mean_cutoff == 11.0
        assert est.z_hat == 0.0

    def test_fast_and_slow_paths_identical(self):
        cfg = config_110(n=33, trials=3000, seed=123)
        fast = run_experiment(cfg)
        slow = run_experiment(cfg, stream_factory=CounterStream.for_trial)
        assert fast == slow

    @given(st.integers(0, 2**32), st.integers(1, 60), st.integers(1, 3))
    @settings(max_examples=15, deadline=None)
    def test_paths_agree_property(self, seed, n, threads):
        cfg = ExperimentConfig(
            params=params_110(),
            spec=build_spec(1, 10, n),
            n_trials=64,
            master_seed=seed,
            thread_hint=threads,
        )
        assert run_experiment(cfg) == run_experiment(
            cfg, stream_factory=CounterStream.for_trial
        )

    def test_thread_hint_does_not_change_results(self):
        base = run_experiment(config_110(n=33, trials=5000, seed=3, thread_hint=1))
        for hint in (2, 5):
            other = run_experiment(config_110(n=33, trials=5000, seed=3, thread_hint=hint))
            assert other == base

    def test_null_free_mask_gives_exact_zero(self):
        cfg = config_110(n=22, trials=500, seed=5)
        est = run_experiment(cfg, null_mask=np.zeros(22, dtype=bool))
        assert est.mean_fdp == 0.0
        assert est.std_err == 0.0
        assert est.p_hit_end == 1.0  # every competition is a forced win

    def test_single_trial_has_zero_stderr(self):
        est = run_experiment(config_110(n=11, trials=1, seed=2))
        assert est.std_err == 0.0
        assert est.ci_low == est.ci_high == est.mean_fdp

    def test_tracks_exact_enumeration(self):
        cfg = config_110(n=22, trials=50_000, seed=77)
        est = run_experiment(cfg)
        exact = float(exact_fdr(1, 10, 1, 22, Fraction(1, 2)))
        assert abs(est.mean_fdp - exact) <= 4 * est.std_err


class TestSweep:
    def test_rows_follow_input_order_with_derived_seeds(self):
        rows = sweep_n(params_110(), [22, 11], n_trials=200, master_seed=50)
        assert [r.estimate.n for r in rows] == [22, 11]
        assert rows[0].seed == derive_seed(50, 22)
        assert rows[1].seed == derive_seed(50, 11)

    def test_grid_points_are_independent(self):
        # Dropping or reordering points must not change any other row.
        full = sweep_n(params_110(), [11, 22, 33], n_trials=300, master_seed=4)
        partial = sweep_n(params_110(), [33, 11], n_trials=300, master_seed=4)
        by_n_full = {r.estimate.n: r for r in full}
        by_n_partial = {r.estimate.n: r for r in partial}
        assert by_n_full[11] == by_n_partial[11]
        assert by_n_full[33] == by_n_partial[33]

    def test_default_grid_is_whole_cycles(self):
        grid = default_grid(params_110())
        assert grid[0] == 5 * 11 and grid[-1] == 100 * 11
        assert all(n % 11 == 0 for n in grid)
        assert len(grid) == 20


class TestCsv:
    def test_header_is_pinned(self):
        assert (
            ",".join(CSV_COLUMNS)
            == "n,trials,alpha,c,t,a,b,mean_fdp,std_err,ci_low,ci_high,p_hit_end,z_hat,mean_K,seed"
        )

    def test_round_trip(self, tmp_path):
        rows = sweep_n(params_110(), [11, 22], n_trials=400, master_seed=8)
        path = tmp_path / "sweep.csv"
        write_csv(path, rows)
        back = read_csv(path)
        assert len(back) == 2
        for rec, row in zip(back, rows):
            est = row.estimate
            assert rec["n"] == est.n
            assert rec["trials"] == est.n_trials
            assert rec["alpha"] == Fraction(1, 10)
            assert rec["c"] == Fraction(1, 2)
            assert rec["t"] == Fraction(9, 10)
            assert (rec["a"], rec["b"]) == (1, 10)
            # repr round-trip keeps floats bit-exact
            assert rec["mean_fdp"] == est.mean_fdp
            assert rec["std_err"] == est.std_err
            assert rec["ci_low"] == est.ci_low
            assert rec["ci_high"] == est.ci_high
            assert rec["p_hit_end"] == est.p_hit_end
            assert rec["z_hat"] == est.z_hat
            assert rec["mean_K"] == est.mean_cutoff
            assert rec["seed"] == row.seed

    def test_rates_serialized_exactly(self):
        rows = sweep_n(params_110(), [11], n_trials=10, master_seed=0)
        text = csv_text(rows)
        line = text.splitlines()[1]
        assert ",1/10,1/2,9/10,1,10," in line

    def test_reader_rejects_foreign_schema(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("n,mean\n1,0.5\n")
        with pytest.raises(ValueError, match="columns"):
            read_csv(path)


class TestMetadata:
    def test_contents_and_determinism(self, tmp_path):
        meta = sweep_metadata(params_110(), [11, 22], 400, 8)
        assert meta["alpha"] == "1/10"
        assert meta["t"] == "9/10"
        assert meta["n_values"] == [11, 22]
        assert meta["master_seed"] == 8
        assert meta["z_star"] == pytest.approx(2.5758293035489004)
        # execution hints must not leak in: equal runs, equal bytes
        assert "threads" not in json.dumps(meta)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        write_metadata(p1, meta)
        write_metadata(p2, sweep_metadata(params_110(), [11, 22], 400, 8))
        assert p1.read_bytes() == p2.read_bytes()
        parsed = json.loads(p1.read_text())
        assert parsed["csv_columns"] == CSV_COLUMNS
