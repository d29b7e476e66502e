"""Keyed counter-based random draws.

Each 64-bit draw is a pure function of (master seed, trial index,
position index), so any trial can be regenerated in isolation and a
batch of trials can be produced as one vectorized grid. There is no
sequential generator state to split or jump: reordering trials across
worker threads cannot change a single draw.

The mixer is the SplitMix64 output finalizer applied to a golden-ratio
weighted counter. Distinct keys yield streams that pass standard
equidistribution smoke tests; the statistical burden here is light
(Bernoulli thinning), the structural burden (reproducibility under any
scheduling) is the one that matters.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MULT1 = np.uint64(0xBF58476D1CE4E5B9)
_MULT2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64

_WORD = 2**64


def mix64(z):
    """SplitMix64 finalizer on uint64 scalars or arrays, wrapping mod 2**64."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _MULT1
        z = (z ^ (z >> _U64(27))) * _MULT2
        z = z ^ (z >> _U64(31))
    return z


def stream_key(master_seed: int, trial: int) -> int:
    """Key for one trial's stream. trial is 0-based and non-negative."""
    if trial < 0:
        raise ValueError("trial index must be non-negative")
    base = mix64(_U64(master_seed % _WORD))
    with np.errstate(over="ignore"):
        return int(mix64(base + _GOLDEN * _U64(trial + 1)))


def derive_seed(master_seed: int, salt: int) -> int:
    """Deterministic child seed, e.g. one per point of a parameter sweep.

    Child streams are keyed through two finalizer applications, so
    distinct salts give unrelated families of trial streams.
    """
    base = mix64(_U64(master_seed % _WORD))
    with np.errstate(over="ignore"):
        return int(mix64(base + _GOLDEN * _U64(salt % _WORD)))


class CounterStream:
    """Draws for a single trial, addressed by 1-based position index."""

    def __init__(self, key: int):
        self.key = _U64(key % _WORD)

    @classmethod
    def for_trial(cls, master_seed: int, trial: int) -> "CounterStream":
        return cls(stream_key(master_seed, trial))

    def uint64_at(self, positions) -> np.ndarray:
        """Uniform uint64 draws at the given positions (any order, any repeats)."""
        pos = np.asarray(positions, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return mix64(self.key + _GOLDEN * pos)


class ConstantStream:
    """Test double: every draw returns the same uint64 value.

    value 0 forces a win against any positive threshold; 2**64 - 1
    forces a loss against any threshold that is not the full word.
    """

    def __init__(self, value: int):
        self.value = _U64(value % _WORD)

    def uint64_at(self, positions) -> np.ndarray:
        pos = np.asarray(positions, dtype=np.uint64)
        return np.full(pos.shape, self.value, dtype=np.uint64)


def draw_matrix(master_seed: int, trial_lo: int, trial_hi: int, positions) -> np.ndarray:
    """Grid of draws for trials [trial_lo, trial_hi) at the given positions.

    Row i equals CounterStream.for_trial(master_seed, trial_lo + i)
    .uint64_at(positions) exactly; the grid form exists so the Monte
    Carlo hot path can stay inside numpy.
    """
    if trial_lo < 0 or trial_hi < trial_lo:
        raise ValueError("bad trial range")
    trials = np.arange(trial_lo, trial_hi, dtype=np.uint64)
    pos = np.asarray(positions, dtype=np.uint64)
    base = mix64(_U64(master_seed % _WORD))
    with np.errstate(over="ignore"):
        keys = mix64(base + _GOLDEN * (trials + _U64(1)))
        return mix64(keys[:, None] + _GOLDEN * pos[None, :])
