"""Python access to the ShufflEval core."""

from ._shuffleval import (
    ArgumentError,
    CapacityError,
    ConfigError,
    Error,
    UndefinedCorrelation,
    __version__,
    bootstrap_ci,
    enumerate_nonidentity,
    extract_translation,
    occam_bound,
    occam_bound_simplified,
    parse_choice,
    pearson,
    render_baseline_prompt,
    render_ideation_prompt,
    render_shuffle_prompt,
    repair_structured_output,
    sample_nonidentity,
    shuffleval_score,
    whalebreak_gap_limit,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
