"""Sequential rejection cutoff for paired target/decoy competitions.

A trial is a sequence of n competitions; competition j produces a
target win or a decoy win. Scanning prefixes, the procedure keeps the
largest cutoff k whose decoy-based estimate (decoy wins plus an
additive constant t, over target wins) stays within the configured
ratio a/b. All comparisons are exact: with t = u/v in lowest terms the
acceptance test at k is

    b * (v * D_k + u) <= a * v * max(T_k, 1)

in unbounded integers, where T_k and D_k count target and decoy wins in
the first k competitions. Ties pass: equality satisfies the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .rational import Rational

__all__ = [
    "ProcedureParams",
    "CompetitionSequence",
    "ScanCounts",
    "TrialOutcome",
    "BatchOutcomes",
    "reject_threshold",
    "scan_counts",
    "canonical_t",
    "fdp",
    "batch_outcomes",
    "batch_cutoffs",
    "discovery_indices",
]


@dataclass(frozen=True)
class ProcedureParams:
    """Validated bundle of procedure-level constants.

    alpha is the FDR budget, c the per-competition target-win
    probability under a true null, t the additive constant of the decoy
    estimate. a/b is (1 - c)/c * alpha reduced to lowest terms and is
    stored explicitly because every cutoff decision is an integer
    comparison against it.
    """

    alpha: Rational
    c: Rational
    t: Rational
    a: int
    b: int

    def __post_init__(self):
        for name in ("alpha", "c", "t"):
            val = getattr(self, name)
            if not isinstance(val, Fraction):
                raise TypeError(f"{name} must be a Fraction, got {type(val).__name__}")
        if not (0 < self.alpha < 1):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (0 < self.c < 1):
            raise ValueError(f"c must lie in (0, 1), got {self.c}")
        # t = 0 would zero the estimator's additive safeguard; the procedure
        # is defined for t in (0, 1].
        if not (0 < self.t <= 1):
            raise ValueError(f"t must lie in (0, 1], got {self.t}")
        ratio = (1 - self.c) / self.c * self.alpha
        if (self.a, self.b) != (ratio.numerator, ratio.denominator):
            raise ValueError(
                f"(a, b) = ({self.a}, {self.b}) does not match "
                f"(1 - c)/c * alpha = {ratio} in lowest terms"
            )

    @classmethod
    def from_rates(cls, alpha: Rational, c: Rational, t: Rational = Fraction(1)) -> "ProcedureParams":
        """Build params from the rates alone, deriving (a, b)."""
        ratio = (1 - c) / c * alpha
        return cls(alpha=alpha, c=c, t=t, a=ratio.numerator, b=ratio.denominator)

    def with_t(self, t: Rational) -> "ProcedureParams":
        return ProcedureParams(alpha=self.alpha, c=self.c, t=t, a=self.a, b=self.b)


class CompetitionSequence:
    """One trial's competition results plus ground-truth labels.

    wins[j] is True when competition j + 1 is a target win; true_null[j]
    is True when hypothesis j + 1 is a true null. Labels are carried for
    scoring only: the cutoff never reads them.
    """

    __slots__ = ("wins", "true_null")

    def __init__(self, wins, true_null):
        w = np.asarray(wins, dtype=bool)
        lab = np.asarray(true_null, dtype=bool)
        if w.ndim != 1 or lab.ndim != 1:
            raise ValueError("wins and true_null must be one-dimensional")
        if w.shape != lab.shape:
            raise ValueError("wins and true_null must have equal length")
        self.wins = w
        self.true_null = lab

    def __len__(self) -> int:
        return int(self.wins.shape[0])

    @classmethod
    def from_pvalues(cls, pvalues, c: Rational, true_null) -> "CompetitionSequence":
        """Label competition j a target win exactly when p_j <= c.

        p-values are compared as exact rationals; pass Fractions (or
        ints) to keep boundary cases deterministic.
        """
        wins = [Fraction(p) <= c for p in pvalues]
        return cls(wins, true_null)


@dataclass(frozen=True)
class ScanCounts:
    """Prefix counts for one sequence, indexed k = 0..n inclusive.

    target_wins[k] = T_k, decoy_wins[k] = D_k, false_wins[k] = I_k (target
    wins at true nulls), nulls[k] = number of true nulls among the first
    k. Row 0 is the empty prefix.
    """

    target_wins: np.ndarray
    decoy_wins: np.ndarray
    false_wins: np.ndarray
    nulls: np.ndarray

    @property
    def n(self) -> int:
        return int(self.target_wins.shape[0]) - 1


@dataclass(frozen=True)
class TrialOutcome:
    """Result of applying the cutoff to one sequence."""

    cutoff: int
    discoveries: int
    false_discoveries: int
    fdp: Rational
    hit_end: bool


class BatchOutcomes(NamedTuple):
    """Vectorized trial outcomes; arrays are aligned by trial row."""

    cutoff: np.ndarray
    discoveries: np.ndarray
    false_discoveries: np.ndarray


def scan_counts(seq: CompetitionSequence) -> ScanCounts:
    """Cumulative win/label counts with a leading zero row."""
    n = len(seq)
    t = np.zeros(n + 1, dtype=np.int64)
    d = np.zeros(n + 1, dtype=np.int64)
    f = np.zeros(n + 1, dtype=np.int64)
    m = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(seq.wins, dtype=np.int64, out=t[1:])
    d[1:] = np.arange(1, n + 1, dtype=np.int64) - t[1:]
    np.cumsum(seq.wins & seq.true_null, dtype=np.int64, out=f[1:])
    np.cumsum(seq.true_null, dtype=np.int64, out=m[1:])
    return ScanCounts(target_wins=t, decoy_wins=d, false_wins=f, nulls=m)


def reject_threshold(seq: CompetitionSequence, params: ProcedureParams) -> TrialOutcome:
    """Largest k in [n] passing the estimate bound, or 0 if none does.

    Scalar reference path in exact Python integers; immune to overflow
    at any n or parameter size. The vectorized paths are tested against
    this function.
    """
    u, v = params.t.numerator, params.t.denominator
    a, b = params.a, params.b
    n = len(seq)
    best_k = best_t = best_i = 0
    t_count = d_count = i_count = 0
    wins = seq.wins
    nulls = seq.true_null
    for k in range(1, n + 1):
        if wins[k - 1]:
            t_count += 1
            if nulls[k - 1]:
                i_count += 1
        else:
            d_count += 1
        if b * (v * d_count + u) <= a * v * max(t_count, 1):
            best_k, best_t, best_i = k, t_count, i_count
    return TrialOutcome(
        cutoff=best_k,
        discoveries=best_t,
        false_discoveries=best_i,
        fdp=Fraction(best_i, max(best_t, 1)),
        hit_end=best_k == n,
    )


def canonical_t(t: Rational, b: int) -> Rational:
    """Smallest multiple of 1/b producing the same cutoffs as t.

    ceil(t * b)/b; cutoffs depend on t only through this value, so it is
    the canonical representative of t's equivalence class for a given b.
    """
    if b < 1:
        raise ValueError("b must be a positive integer")
    if not (0 < t <= 1):
        raise ValueError(f"t must lie in (0, 1], got {t}")
    return Fraction(math.ceil(t * b), b)


def fdp(outcome: TrialOutcome) -> Rational:
    """False discovery proportion of one outcome, 0/max(0,1) = 0 when empty."""
    return Fraction(outcome.false_discoveries, max(outcome.discoveries, 1))


def discovery_indices(seq: CompetitionSequence, outcome: TrialOutcome) -> np.ndarray:
    """1-based indices reported as discoveries: target wins at or below the cutoff."""
    prefix = seq.wins[: outcome.cutoff]
    return np.flatnonzero(prefix).astype(np.int64) + 1


_INT64_GUARD = 2**62


def batch_outcomes(
    wins: np.ndarray,
    true_null: np.ndarray,
    params: ProcedureParams,
    t: Rational | None = None,
) -> BatchOutcomes:
    """Apply the cutoff to every row of a win matrix at once.

    wins is (trials, n) boolean, true_null is (n,) boolean shared by all
    rows. Intended for exhaustive enumeration and moderate n; comparisons
    run in int64, and inputs large enough to overflow that are refused
    (the scalar path has no such limit).
    """
    t = params.t if t is None else t
    return batch_cutoffs(wins, true_null, params.a, params.b, t)


def batch_cutoffs(
    wins: np.ndarray, true_null: np.ndarray, a: int, b: int, t: Rational
) -> BatchOutcomes:
    """batch_outcomes for a bare (a, b, t) triple; the cutoff needs no more."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive integers")
    if not (0 < t <= 1):
        raise ValueError(f"t must lie in (0, 1], got {t}")
    u, v = t.numerator, t.denominator
    w = np.asarray(wins, dtype=bool)
    if w.ndim != 2:
        raise ValueError("wins must be a 2-d matrix of trials by competitions")
    lab = np.asarray(true_null, dtype=bool)
    n = w.shape[1]
    if lab.shape != (n,):
        raise ValueError("true_null length must match the competition count")
    if max(b * (v * n + u), a * v * n) >= _INT64_GUARD:
        raise OverflowError(
            "parameters too large for the int64 batch path; use reject_threshold"
        )
    if n == 0:
        zeros = np.zeros(w.shape[0], dtype=np.int64)
        return BatchOutcomes(cutoff=zeros, discoveries=zeros.copy(), false_discoveries=zeros.copy())

    t_cum = np.cumsum(w, axis=1, dtype=np.int64)
    k_grid = np.arange(1, n + 1, dtype=np.int64)
    d_cum = k_grid[None, :] - t_cum
    ok = b * (v * d_cum + u) <= a * v * np.maximum(t_cum, 1)

    any_ok = ok.any(axis=1)
    # Rightmost passing k: argmax of the reversed mask finds the first
    # True from the end.
    last = n - np.argmax(ok[:, ::-1], axis=1)
    cutoff = np.where(any_ok, last, 0)

    rows = np.arange(w.shape[0])
    gather = np.maximum(cutoff - 1, 0)
    disc = np.where(cutoff > 0, t_cum[rows, gather], 0)
    i_cum = np.cumsum(w & lab[None, :], axis=1, dtype=np.int64)
    false_disc = np.where(cutoff > 0, i_cum[rows, gather], 0)
    return BatchOutcomes(
        cutoff=cutoff.astype(np.int64),
        discoveries=disc.astype(np.int64),
        false_discoveries=false_disc.astype(np.int64),
    )
