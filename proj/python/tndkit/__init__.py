"""Test-negative-design vaccine-effectiveness estimation."""

from _tndkit import (
    DgpConfig,
    TndError,
    estimate,
    oracle_check,
    run_study_json,
    simulate_tnd,
    split_folds,
    truth_mrr,
)

__all__ = [
    "DgpConfig",
    "TndError",
    "estimate",
    "oracle_check",
    "run_study_json",
    "simulate_tnd",
    "split_folds",
    "truth_mrr",
]
