"""Monte Carlo estimation of the FDR on periodic adversarial layouts.

Trials are independent and addressed by index; every draw is a pure
function of (master seed, trial, position), so results are bit-for-bit
reproducible for a given seed no matter how trials are chunked or how
many worker threads run them. Worker threads exist to honor a thread
hint, not to change semantics: buffers are written by trial index and
reduced in a fixed order.

The hot path only ever materializes true-null columns. False nulls win
deterministically, so the cutoff can be located from a per-trial scan
of candidate positions (one just before each true null, plus n), which
keeps the per-trial work proportional to the true-null count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import norm

from .construction import ConstructionSpec, labels, null_positions, win_threshold
from .rational import Rational
from .rng import CounterStream, derive_seed, draw_matrix
from .threshold import CompetitionSequence, ProcedureParams, reject_threshold

__all__ = [
    "ExperimentConfig",
    "FdrEstimate",
    "SweepRow",
    "z_star",
    "confidence_interval",
    "run_experiment",
    "default_grid",
    "sweep_n",
    "CSV_COLUMNS",
    "csv_text",
    "write_csv",
    "read_csv",
    "sweep_metadata",
    "write_metadata",
]

_INT64_GUARD = 2**62


@dataclass(frozen=True)
class ExperimentConfig:
    """One estimation run: procedure constants, layout, and trial budget."""

    params: ProcedureParams
    spec: ConstructionSpec
    n_trials: int
    master_seed: int
    confidence_level: Rational = Fraction(99, 100)
    thread_hint: int = 0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be a positive integer")
        if (self.spec.a, self.spec.b) != (self.params.a, self.params.b):
            raise ValueError(
                f"layout built for (a, b) = ({self.spec.a}, {self.spec.b}) but "
                f"params have ({self.params.a}, {self.params.b})"
            )
        if not (0 < self.confidence_level < 1):
            raise ValueError("confidence_level must lie in (0, 1)")
        if self.thread_hint < 0:
            raise ValueError("thread_hint must be >= 0 (0 means auto)")
        if self.params.c > Fraction(1, 2):
            raise ValueError(
                f"the adversarial layout requires c <= 1/2, got c = {self.params.c}"
            )


@dataclass(frozen=True)
class FdrEstimate:
    """Aggregate over trials at one n.

    z_hat is the mean of I_K / (D_K + 1) over trials that stop short of
    the end (and 0 when K = n); it tracks the lower-bound ratio that
    drives the failure regime, so watching it approach c/(1 - c) is a
    useful diagnostic.
    """

    n: int
    n_trials: int
    mean_fdp: float
    std_err: float
    ci_low: float
    ci_high: float
    p_hit_end: float
    z_hat: float
    mean_cutoff: float


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep plus everything needed to reproduce it."""

    params: ProcedureParams
    estimate: FdrEstimate
    seed: int


def z_star(level: Rational | float) -> float:
    """Two-sided normal quantile for the given confidence level."""
    lv = float(level)
    if not (0 < lv < 1):
        raise ValueError("confidence level must lie in (0, 1)")
    return float(norm.ppf((1 + lv) / 2))


def confidence_interval(
    mean: float, std_err: float, level: Rational | float
) -> tuple[float, float]:
    """Normal-approximation interval clamped to [0, 1]."""
    z = z_star(level)
    low = mean - z * std_err
    high = mean + z * std_err
    return max(0.0, low), min(1.0, high)


def _resolve_workers(thread_hint: int) -> int:
    if thread_hint > 0:
        return thread_hint
    return max(1, min(8, os.cpu_count() or 1))


def _fast_path_tables(params: ProcedureParams, n: int, null_pos: np.ndarray):
    """Precompute the candidate-scan tables, or None when int64 could overflow.

    The cutoff is the largest k with D_k <= floor((a v k - b u)/((a+b) v))
    (the T_k = 0 corner resolves itself: that bound is always below k).
    Between decoy wins D is flat and the bound is nondecreasing, so the
    largest passing k is always either n or the position just before
    some true null. Those candidate columns form a regular grid.
    """
    u, v = params.t.numerator, params.t.denominator
    a, b = params.a, params.b
    if max(b * (v * n + u), a * v * n, (a + b) * v * n) >= _INT64_GUARD:
        return None
    cand_k = np.concatenate([null_pos - 1, [n]]).astype(np.int64)
    dmax = (a * v * cand_k - b * u) // ((a + b) * v)
    dmax = np.clip(dmax, -1, n).astype(np.int32)
    valid = cand_k >= 1
    prior = np.arange(null_pos.size + 1, dtype=np.int32)
    return (
        cand_k.astype(np.int32),
        dmax,
        valid,
        prior,
        np.uint64(win_threshold(params.c)),
    )


def _scan_chunk(seed, lo, hi, n, null_pos, tables, out):
    """Outcomes for trials [lo, hi); writes the buffer slices in place."""
    cand_k, dmax, valid, prior, thr = tables
    fdp_buf, cutoff_buf, hit_buf, z_buf = out
    m = hi - lo
    if null_pos.size:
        draws = draw_matrix(seed, lo, hi, null_pos)
        wins = draws < thr
        null_wins = np.zeros((m, null_pos.size + 1), dtype=np.int32)
        np.cumsum(wins, axis=1, dtype=np.int32, out=null_wins[:, 1:])
    else:
        null_wins = np.zeros((m, 1), dtype=np.int32)
    decoys = prior[None, :] - null_wins
    ok = (decoys <= dmax[None, :]) & valid[None, :]
    # Candidate k values strictly increase left to right, so the row
    # maximum of (k if ok else -1) is the cutoff and argmax finds its
    # unique column.
    scores = np.where(ok, cand_k[None, :], np.int32(-1))
    j = np.argmax(scores, axis=1)
    rows = np.arange(m)
    best = scores[rows, j]
    found = best >= 0
    cutoff = np.where(found, best, 0).astype(np.int64)
    d_at = np.where(found, decoys[rows, j], 0).astype(np.int64)
    i_at = np.where(found, null_wins[rows, j], 0).astype(np.int64)
    t_at = cutoff - d_at
    fdp_buf[lo:hi] = i_at / np.maximum(t_at, 1)
    cutoff_buf[lo:hi] = cutoff
    hit = cutoff == n
    hit_buf[lo:hi] = hit
    z_buf[lo:hi] = np.where(hit, 0.0, i_at / (d_at + 1.0))


def _slow_trial(config, null_mask, trial, stream_factory):
    """Reference per-trial path: exact integers, arbitrary parameter size."""
    spec, params = config.spec, config.params
    stream = stream_factory(config.master_seed, trial)
    pos = np.flatnonzero(null_mask).astype(np.int64) + 1
    wins = np.ones(spec.n, dtype=bool)
    if pos.size:
        draws = np.asarray(stream.uint64_at(pos), dtype=np.uint64)
        wins[null_mask] = draws < np.uint64(win_threshold(params.c))
    seq = CompetitionSequence(wins=wins, true_null=null_mask)
    return reject_threshold(seq, params)


def run_experiment(
    config: ExperimentConfig,
    stream_factory=None,
    null_mask: np.ndarray | None = None,
) -> FdrEstimate:
    """Estimate the FDR (and diagnostics) over config.n_trials trials.

    stream_factory, when given, replaces the counter RNG with
    caller-built streams (factory(master_seed, trial) -> stream); this
    forces the slower per-trial path. null_mask overrides the layout's
    true-null labels, e.g. an all-False mask for a null-free baseline.

    Results do not depend on thread_hint or chunking; an identical
    config yields an identical estimate, bit for bit.
    """
    spec, params = config.spec, config.params
    n = spec.n
    trials = config.n_trials
    if null_mask is None:
        mask = labels(spec)
    else:
        mask = np.asarray(null_mask, dtype=bool)
        if mask.shape != (n,):
            raise ValueError("null_mask length must equal spec.n")

    fdp_buf = np.empty(trials, dtype=np.float64)
    cutoff_buf = np.empty(trials, dtype=np.int64)
    hit_buf = np.empty(trials, dtype=bool)
    z_buf = np.empty(trials, dtype=np.float64)

    null_pos = np.flatnonzero(mask).astype(np.int64) + 1
    tables = None if stream_factory is not None else _fast_path_tables(params, n, null_pos)

    if tables is not None:
        out = (fdp_buf, cutoff_buf, hit_buf, z_buf)
        # Chunk size only shapes memory use; every trial's outcome is a
        # pure function of its index, so results cannot depend on it.
        width = max(int(null_pos.size) + 1, 16)
        chunk = int(min(trials, max(256, (1 << 21) // width)))
        ranges = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
        workers = _resolve_workers(config.thread_hint)
        if workers == 1 or len(ranges) == 1:
            for lo, hi in ranges:
                _scan_chunk(config.master_seed, lo, hi, n, null_pos, tables, out)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(
                        _scan_chunk, config.master_seed, lo, hi, n, null_pos, tables, out
                    )
                    for lo, hi in ranges
                ]
                for f in futures:
                    f.result()
    else:
        factory = stream_factory or CounterStream.for_trial
        for trial in range(trials):
            oc = _slow_trial(config, mask, trial, factory)
            fdp_buf[trial] = float(oc.fdp)
            cutoff_buf[trial] = oc.cutoff
            hit_buf[trial] = oc.hit_end
            d_at = oc.cutoff - oc.discoveries
            z_buf[trial] = 0.0 if oc.hit_end else oc.false_discoveries / (d_at + 1.0)

    mean_fdp = float(np.mean(fdp_buf))
    if trials >= 2:
        std_err = float(np.std(fdp_buf, ddof=1) / math.sqrt(trials))
    else:
        std_err = 0.0
    low, high = confidence_interval(mean_fdp, std_err, config.confidence_level)
    return FdrEstimate(
        n=n,
        n_trials=trials,
        mean_fdp=mean_fdp,
        std_err=std_err,
        ci_low=low,
        ci_high=high,
        p_hit_end=float(np.mean(hit_buf)),
        z_hat=float(np.mean(z_buf)),
        mean_cutoff=float(np.mean(cutoff_buf)),
    )


def default_grid(params: ProcedureParams) -> list[int]:
    """Whole-cycle n values: multiples of a + b from 5 to 100 cycles."""
    period = params.a + params.b
    return [m * period for m in range(5, 101, 5)]


def sweep_n(
    params: ProcedureParams,
    n_values,
    n_trials: int,
    master_seed: int,
    confidence_level: Rational = Fraction(99, 100),
    thread_hint: int = 0,
) -> list[SweepRow]:
    """Run one experiment per n, in the order given.

    Each grid point gets its own child seed derived from (master_seed,
    n), so adding, dropping, or reordering points leaves every other
    point's trials untouched.
    """
    from .construction import build_spec

    rows = []
    for n in n_values:
        row_seed = derive_seed(master_seed, int(n))
        config = ExperimentConfig(
            params=params,
            spec=build_spec(params.a, params.b, int(n)),
            n_trials=n_trials,
            master_seed=row_seed,
            confidence_level=confidence_level,
            thread_hint=thread_hint,
        )
        rows.append(SweepRow(params=params, estimate=run_experiment(config), seed=row_seed))
    return rows


CSV_COLUMNS = [
    "n",
    "trials",
    "alpha",
    "c",
    "t",
    "a",
    "b",
    "mean_fdp",
    "std_err",
    "ci_low",
    "ci_high",
    "p_hit_end",
    "z_hat",
    "mean_K",
    "seed",
]


def _frac_str(x: Rational) -> str:
    return f"{x.numerator}/{x.denominator}"


def csv_text(rows: list[SweepRow]) -> str:
    """Render sweep rows to CSV; exact fractions for rates, repr for floats."""
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        e, p = row.estimate, row.params
        lines.append(
            ",".join(
                [
                    str(e.n),
                    str(e.n_trials),
                    _frac_str(p.alpha),
                    _frac_str(p.c),
                    _frac_str(p.t),
                    str(p.a),
                    str(p.b),
                    repr(e.mean_fdp),
                    repr(e.std_err),
                    repr(e.ci_low),
                    repr(e.ci_high),
                    repr(e.p_hit_end),
                    repr(e.z_hat),
                    repr(e.mean_cutoff),
                    str(row.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(path, rows: list[SweepRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(rows))


def read_csv(path) -> list[dict]:
    """Parse a sweep CSV back into typed dicts (exact Fractions for rates)."""
    import csv as _csv

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(
                f"unexpected sweep CSV columns: {reader.fieldnames!r}"
            )
        out = []
        for rec in reader:
            out.append(
                {
                    "n": int(rec["n"]),
                    "trials": int(rec["trials"]),
                    "alpha": Fraction(rec["alpha"]),
                    "c": Fraction(rec["c"]),
                    "t": Fraction(rec["t"]),
                    "a": int(rec["a"]),
                    "b": int(rec["b"]),
                    "mean_fdp": float(rec["mean_fdp"]),
                    "std_err": float(rec["std_err"]),
                    "ci_low": float(rec["ci_low"]),
                    "ci_high": float(rec["ci_high"]),
                    "p_hit_end": float(rec["p_hit_end"]),
                    "z_hat": float(rec["z_hat"]),
                    "mean_K": float(rec["mean_K"]),
                    "seed": int(rec["seed"]),
                }
            )
        return out


def sweep_metadata(
    params: ProcedureParams,
    n_values,
    n_trials: int,
    master_seed: int,
    confidence_level: Rational = Fraction(99, 100),
) -> dict:
    """Machine-readable record of how a sweep CSV was produced.

    Deliberately excludes execution hints (threads, chunking): two runs
    that must produce identical CSVs should produce identical metadata.
    """
    from . import __version__

    return {
        "generator": "seqstep",
        "version": __version__,
        "alpha": _frac_str(params.alpha),
        "c": _frac_str(params.c),
        "t": _frac_str(params.t),
        "a": params.a,
        "b": params.b,
        "n_values": [int(n) for n in n_values],
        "trials_per_n": int(n_trials),
        "master_seed": int(master_seed),
        "confidence_level": _frac_str(confidence_level),
        "interval_method": "normal-approximation, clamped to [0, 1]",
        "z_star": z_star(confidence_level),
        "csv_columns": list(CSV_COLUMNS),
    }


def write_metadata(path, meta: dict) -> None:
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
