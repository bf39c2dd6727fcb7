"""Sequential search for a hidden-Markov-modulated anomaly over M processes.

The package simulates probing policies that locate one anomalous cell among
M by accumulating per-cell log-likelihood-ratio scores, stopping when the
leader's margin reaches -log(c). It ships the belief-adaptive policy, its
sampling-gated variant, static-mixture baselines, an oracle-informed variant,
rate-function analysis with numeric cross-checks, and a Monte Carlo harness
with a CSV reporting contract.
"""

from .analysis import (InequalityReport, InequalityViolation, QuadratureError,
                       RateGap, RateReport, component_rate, kl_divergence,
                       mixture_kl_slack, palette_rate, pooled_rate_gap)
from .distributions import (Exponential, Geometric, Mixture, SupportError,
                            TabulatedDiscrete, mixture_pdf, two_point_mixture)
from .harness import (CSV_COLUMNS, ExperimentConfig, SweepResult, SweepRow,
                      TrialOutcome, aggregate_bayes_risk,
                      aggregate_sampling_risk, run_block, run_sweep, run_trial,
                      trial_seeds)
from .policies import (DEFAULT_LLR_CLAMP, AdhmOraclePolicy, AdhmPolicy,
                       AdhmPPolicy, ChernoffPolicy, DgfPolicy, PolicySpec,
                       StepDecision, belief_update, build_policy, filter_step,
                       mixture_llr, predict_step)
from .world import (HmmParams, HmmWorld, OraclePalette, OracleWorld,
                    anomalous_marginal, hmm_step, stationary_p0)

__version__ = "0.1.0"

__all__ = [
    "AdhmOraclePolicy", "AdhmPPolicy", "AdhmPolicy", "ChernoffPolicy",
    "CSV_COLUMNS", "DEFAULT_LLR_CLAMP", "DgfPolicy", "ExperimentConfig",
    "Exponential", "Geometric", "HmmParams", "HmmWorld", "InequalityReport",
    "InequalityViolation", "Mixture", "OraclePalette", "OracleWorld",
    "PolicySpec", "QuadratureError", "RateGap", "RateReport", "StepDecision",
    "SupportError", "SweepResult", "SweepRow", "TabulatedDiscrete",
    "TrialOutcome", "aggregate_bayes_risk", "aggregate_sampling_risk",
    "anomalous_marginal", "belief_update", "build_policy", "component_rate",
    "filter_step", "hmm_step", "kl_divergence", "mixture_kl_slack",
    "mixture_llr", "mixture_pdf", "palette_rate", "pooled_rate_gap",
    "predict_step", "run_block", "run_sweep", "run_trial", "stationary_p0",
    "trial_seeds", "two_point_mixture", "__version__",
]
