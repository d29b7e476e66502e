"""Simulation lab for competition-based FDR control.

Exact rational rejection thresholds for target/decoy competition
procedures, an adversarial periodic true-null layout that breaks small
additive constants, exhaustive small-instance oracles, and a
reproducible Monte Carlo engine for estimating the realized FDR.
"""

__version__ = "0.1.0"

from .construction import ConstructionSpec, build_spec, derive_ab, sample_trial
from .montecarlo import (
    ExperimentConfig,
    FdrEstimate,
    run_experiment,
    sweep_n,
)
from .oracle import (
    ExhaustReport,
    check_cutoff_bound,
    check_cutoff_residues,
    check_threshold_equivalence,
    exact_fdr,
)
from .rational import Rational, make_rational, parse_rational
from .threshold import (
    CompetitionSequence,
    ProcedureParams,
    TrialOutcome,
    canonical_t,
    reject_threshold,
    scan_counts,
)

__all__ = [
    "__version__",
    "Rational",
    "make_rational",
    "parse_rational",
    "ProcedureParams",
    "CompetitionSequence",
    "TrialOutcome",
    "reject_threshold",
    "scan_counts",
    "canonical_t",
    "ConstructionSpec",
    "build_spec",
    "derive_ab",
    "sample_trial",
    "ExperimentConfig",
    "FdrEstimate",
    "run_experiment",
    "sweep_n",
    "ExhaustReport",
    "check_threshold_equivalence",
    "check_cutoff_bound",
    "check_cutoff_residues",
    "exact_fdr",
]
