"""Collective perception swarm simulation with adaptive sensor degradation filtering."""

from ._core import (  # noqa: F401
    Arena,
    ConfigError,
    DomainError,
    Error,
    FilterMode,
    ParseError,
    Regime,
    TrialConfig,
    TrialLog,
    activation_threshold,
    combined_score,
    convergence_step,
    generate_arena,
    informed_fuse,
    load_arena,
    local_confidence,
    local_estimate,
    run_sweep,
    run_trial,
    ScoreReport,
    score_trial,
    should_activate,
    social_fuse,
    t_quantile,
    trial_scores,
    update_assumed_accuracy,
)
from ._core import __version__  # noqa: F401
