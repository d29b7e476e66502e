"""Adversarial periodic placement of true nulls.

For coprime a < b with (1 - c)/c * alpha = a/b, hypotheses are laid out
in cycles of length a + b. Within each cycle exactly 2a + 1 positions
carry true nulls; every other position is a false null whose target
always wins. The true-null offsets are the residues

    -j * a^{-1}  (mod a + b),  j = 0, ..., 2a

mapped to 1..a+b (residue 0 is written as a + b). Since
-a^{-1} = b^{-1} (mod a + b), the same set is j * b^{-1}. This spacing
pins the decoy estimate right at its acceptance boundary near the end
of each cycle, which is what makes small additive constants t fail.

Sampling is exact: a true null wins with probability exactly c via a
single uint64 threshold comparison per draw, and false-null wins are
deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rational import Rational
from .threshold import CompetitionSequence

__all__ = [
    "ConstructionSpec",
    "mod_inverse",
    "derive_ab",
    "build_spec",
    "labels",
    "null_positions",
    "win_threshold",
    "sample_trial",
]


def mod_inverse(x: int, modulus: int) -> int:
    """Multiplicative inverse of x modulo modulus, in 0..modulus-1.

    Extended Euclid; raises ValueError when gcd(x, modulus) != 1.
    """
    if modulus < 1:
        raise ValueError("modulus must be a positive integer")
    old_r, r = x % modulus, modulus
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise ValueError(f"{x} has no inverse modulo {modulus} (gcd = {old_r})")
    return old_s % modulus


def derive_ab(alpha: Rational, c: Rational) -> tuple[int, int]:
    """(a, b) with a/b = (1 - c)/c * alpha in lowest terms."""
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not (0 < c < 1):
        raise ValueError(f"c must lie in (0, 1), got {c}")
    ratio = (1 - c) / c * alpha
    return ratio.numerator, ratio.denominator


@dataclass(frozen=True)
class ConstructionSpec:
    """Periodic label layout for n hypotheses.

    cycle_null_offsets are the 1-based within-cycle positions carrying
    true nulls; position k (1-based) is a true null iff
    ((k - 1) mod period) + 1 is in the set.
    """

    a: int
    b: int
    n: int
    period: int
    cycle_null_offsets: frozenset[int]

    def __post_init__(self):
        if self.period != self.a + self.b:
            raise ValueError("period must equal a + b")
        if not self.cycle_null_offsets:
            raise ValueError("empty true-null offset set")
        bad = [o for o in self.cycle_null_offsets if not 1 <= o <= self.period]
        if bad:
            raise ValueError(f"offsets outside 1..{self.period}: {sorted(bad)}")
        if len(self.cycle_null_offsets) != 2 * self.a + 1:
            raise ValueError(
                f"expected {2 * self.a + 1} true-null offsets per cycle, "
                f"got {len(self.cycle_null_offsets)}"
            )

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": self.a,
                "b": self.b,
                "n": self.n,
                "period": self.period,
                "cycle_null_offsets": sorted(self.cycle_null_offsets),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ConstructionSpec":
        obj = json.loads(text)
        return cls(
            a=obj["a"],
            b=obj["b"],
            n=obj["n"],
            period=obj["period"],
            cycle_null_offsets=frozenset(obj["cycle_null_offsets"]),
        )


def build_spec(a: int, b: int, n: int) -> ConstructionSpec:
    """Construct the periodic layout for coprime a < b and n >= 1 hypotheses."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive integers")
    if a >= b:
        raise ValueError(f"the construction needs a < b, got a = {a}, b = {b}")
    if math.gcd(a, b) != 1:
        raise ValueError(f"a and b must be coprime, got gcd = {math.gcd(a, b)}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    period = a + b
    inv_a = mod_inverse(a, period)
    offsets = set()
    for j in range(2 * a + 1):
        r = (-j * inv_a) % period
        offsets.add(period if r == 0 else r)
    # Distinctness of the 2a + 1 residues holds whenever gcd(a, a+b) = 1;
    # the spec checked here would catch an inverse bug.
    if len(offsets) != 2 * a + 1:
        raise AssertionError("true-null offsets collided; broken modular inverse")
    return ConstructionSpec(
        a=a, b=b, n=n, period=period, cycle_null_offsets=frozenset(offsets)
    )


def labels(spec: ConstructionSpec) -> np.ndarray:
    """Boolean true-null mask of length n (index j is position j + 1)."""
    offsets = np.asarray(sorted(spec.cycle_null_offsets), dtype=np.int64)
    within = (np.arange(spec.n, dtype=np.int64) % spec.period) + 1
    return np.isin(within, offsets)


def null_positions(spec: ConstructionSpec) -> np.ndarray:
    """Sorted 1-based positions of the true nulls."""
    return np.flatnonzero(labels(spec)).astype(np.int64) + 1


def win_threshold(c: Rational) -> int:
    """Threshold h such that a uint64 draw U wins iff U < h.

    U < h with h = ceil(c * 2**64) is equivalent to U * den < num * 2**64
    for c = num/den, so the win probability is exactly c whenever
    c * 2**64 is an integer and within 2**-64 of c otherwise; that
    granularity is the draw's, not an approximation added here.
    """
    if not (0 < c < 1):
        raise ValueError(f"win probability must lie in (0, 1), got {c}")
    num, den = c.numerator, c.denominator
    return -((-num << 64) // den)


def sample_trial(spec: ConstructionSpec, c: Rational, stream) -> CompetitionSequence:
    """Sample one trial: false nulls always win, true nulls win w.p. c.

    stream supplies uint64 draws addressed by 1-based position (see
    rng.CounterStream); only true-null positions consume draws.
    """
    if not (0 < c <= Fraction(1, 2)):
        raise ValueError(f"the construction requires 0 < c <= 1/2, got {c}")
    lab = labels(spec)
    pos = np.flatnonzero(lab).astype(np.int64) + 1
    wins = np.ones(spec.n, dtype=bool)
    draws = np.asarray(stream.uint64_at(pos), dtype=np.uint64)
    if draws.shape != pos.shape:
        raise ValueError("stream returned a draw count different from the position count")
    wins[lab] = draws < np.uint64(win_threshold(c))
    return CompetitionSequence(wins=wins, true_null=lab)
