"""Multi-objective advantage balancing for group-relative policy updates.

The package bundles four layers that can be used independently:

* :mod:`pfab.parsing` / :mod:`pfab.rewards`: rule-based scoring of
  tag-structured responses (format tiers, temporal IoU, choice accuracy,
  length decay).
* :mod:`pfab.minnorm`: Frank-Wolfe solver for the minimum-norm point of
  a delta matrix over the probability simplex.
* :mod:`pfab.advantage`: grouped advantage engines, the min-norm
  balancing engine and the static-weight baseline, plus the Pareto
  stationarity residual diagnostic.
* :mod:`pfab.simulator`: a deterministic multi-objective bandit trainer
  for comparing the engines under conflicting rewards.
"""

from .advantage import (
    AdvantageParams,
    AdvantageVector,
    GroupedRewardMatrix,
    GroupResidual,
    GrpoParams,
    center_rewards,
    grpo_advantages,
    pareto_residual,
    pfab_advantages,
    standardize,
)
from .fixtures import discrimination_fixture
from .minnorm import (
    SimplexWeights,
    SolverParams,
    StandardizedDeltas,
    exact_line_search,
    lmo,
    min_norm_weights,
    objective,
)
from .parsing import (
    CAUSAL_KEYWORDS,
    KeywordReport,
    ParsedResponse,
    TimeSegment,
    check_causal_keywords,
    extract_choice,
    extract_segments,
    parse_response,
    render_response,
)
from .rewards import (
    InvalidRecordError,
    RewardConfig,
    RewardVector,
    ScoredRecord,
    TaskRecord,
    accuracy_reward,
    format_reward,
    length_reward,
    linear_iou_reward,
    score_record,
    segment_iou,
)
from .simulator import (
    EnvConfig,
    PolicyTable,
    SyntheticEnv,
    TrainConfig,
    TrainingTrace,
    build_env,
    exact_kl,
    pareto_front_oracle,
    run_experiment,
    sample_group,
    summarize,
    surrogate_loss,
    train_step,
)

__version__ = "0.1.0"

__all__ = [
    "AdvantageParams",
    "AdvantageVector",
    "CAUSAL_KEYWORDS",
    "EnvConfig",
    "GroupResidual",
    "GroupedRewardMatrix",
    "GrpoParams",
    "InvalidRecordError",
    "KeywordReport",
    "ParsedResponse",
    "PolicyTable",
    "RewardConfig",
    "RewardVector",
    "ScoredRecord",
    "SimplexWeights",
    "SolverParams",
    "StandardizedDeltas",
    "SyntheticEnv",
    "TaskRecord",
    "TimeSegment",
    "TrainConfig",
    "TrainingTrace",
    "accuracy_reward",
    "build_env",
    "center_rewards",
    "check_causal_keywords",
    "discrimination_fixture",
    "exact_kl",
    "exact_line_search",
    "extract_choice",
    "extract_segments",
    "format_reward",
    "grpo_advantages",
    "length_reward",
    "linear_iou_reward",
    "lmo",
    "min_norm_weights",
    "objective",
    "pareto_front_oracle",
    "pareto_residual",
    "parse_response",
    "pfab_advantages",
    "render_response",
    "run_experiment",
    "sample_group",
    "score_record",
    "segment_iou",
    "standardize",
    "summarize",
    "surrogate_loss",
    "train_step",
]
