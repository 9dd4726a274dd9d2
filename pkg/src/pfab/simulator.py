"""Deterministic multi-objective bandit trainer.

A contextual bandit stands in for the rollout environment: each prompt
has K candidate responses with a fixed M-dimensional reward vector each,
and the policy is an explicit per-prompt categorical distribution over
candidates. That is exactly the information the advantage engines and
the clipped surrogate consume, so the optimization behavior of the two
engines can be compared at desk scale with exact KL terms and analytic
gradients (no autodiff).

Training draws a group of G candidates per prompt, scores them from the
reward table, computes advantages with the selected engine, and takes
one gradient step on the clipped surrogate with KL penalty. Everything
is keyed by integer seeds: rerunning with the same environment seed,
train seed, and config reproduces traces bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .advantage import (
    AdvantageParams,
    GroupedRewardMatrix,
    GrpoParams,
    grpo_advantages,
    pareto_residual,
    pfab_advantages,
)
from .minnorm import SolverParams

#: Note on preset arity: with exactly two objectives, standardized columns
#: have equal norms, so the min-norm weights are always (0.5, 0.5) and the
#: balancing engine coincides with the uniform-weight baseline (modulo the
#: normalization guard). The two-objective presets therefore exercise the
#: shared machinery, while "threeway" is the preset on which the engines
#: genuinely diverge.
PRESETS = ("anticorrelated", "sparse-vs-dense", "threeway")
ENGINES = ("pfab", "grpo")

_MAX_BUILD_ATTEMPTS = 32


@dataclass(frozen=True)
class EnvConfig:
    """Synthetic environment dimensions; objectives come from the preset."""

    preset: str
    prompts: int = 4
    candidates: int = 8


@dataclass(frozen=True)
class SyntheticEnv:
    """Per-prompt candidate reward tables, deterministic from the seed."""

    rewards: np.ndarray  # (P, K, M)
    objective_names: tuple[str, ...]
    seed: int
    preset: str

    def __post_init__(self) -> None:
        rewards = np.asarray(self.rewards, dtype=float)
        object.__setattr__(self, "rewards", rewards)
        if rewards.ndim != 3:
            raise ValueError(f"reward table must be (P, K, M), got {rewards.shape}")
        if not np.all(np.isfinite(rewards)):
            raise ValueError("reward table must be finite")

    @property
    def n_prompts(self) -> int:
        return self.rewards.shape[0]

    @property
    def n_candidates(self) -> int:
        return self.rewards.shape[1]

    @property
    def n_objectives(self) -> int:
        return self.rewards.shape[2]

    def uniform_baseline(self) -> np.ndarray:
        """Expected per-objective reward under the uniform policy."""
        return self.rewards.mean(axis=(0, 1))


@dataclass
class PolicyTable:
    """Explicit categorical policy logits with a frozen KL reference."""

    logits: np.ndarray  # (P, K)
    ref_logits: np.ndarray  # (P, K)

    @classmethod
    def init_uniform(cls, n_prompts: int, n_candidates: int) -> "PolicyTable":
        z = np.zeros((n_prompts, n_candidates))
        return cls(logits=z, ref_logits=z.copy())

    def probs(self) -> np.ndarray:
        return np.exp(log_softmax(self.logits))


@dataclass(frozen=True)
class TrainConfig:
    steps: int
    seed: int = 0
    group_size: int = 8
    clip_eps: float = 0.2
    kl_beta: float = 0.04
    learning_rate: float = 0.05
    engine: str = "pfab"
    grpo_weights: Optional[tuple[float, ...]] = None
    max_grad_norm: float = 1.0

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.group_size < 2:
            raise ValueError("group size must be at least 2")
        if not 0.0 < self.clip_eps < 1.0:
            raise ValueError("clip_eps must lie in (0, 1)")
        if self.kl_beta < 0:
            raise ValueError("kl_beta must be nonnegative")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}, expected one of {ENGINES}")


@dataclass(frozen=True)
class StepRecord:
    step: int
    mean_rewards: np.ndarray  # (M,) sample mean per objective
    min_obj_mean: float
    residual_mean: float
    alpha_mean: np.ndarray  # (M,) mean weights used across groups
    kl: float
    loss: float
    front_fraction: float  # share of prompts whose modal candidate is nondominated


@dataclass
class TrainingTrace:
    engine: str
    objective_names: tuple[str, ...]
    records: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def mean_rewards(self) -> np.ndarray:
        return np.array([r.mean_rewards for r in self.records]).reshape(
            len(self.records), len(self.objective_names)
        )

    def alpha_means(self) -> np.ndarray:
        return np.array([r.alpha_mean for r in self.records]).reshape(
            len(self.records), len(self.objective_names)
        )


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise numerically stable log softmax."""
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def exact_kl(p: np.ndarray, q: np.ndarray) -> float:
    """Categorical KL(p || q) computed exactly; 0 iff p == q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    support = p > 0
    if np.any(q[support] <= 0):
        raise ValueError("q must be positive wherever p is positive")
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def _conflicting(prompt_rewards: np.ndarray) -> bool:
    """True iff no candidate attains the columnwise maximum on every objective."""
    best = prompt_rewards.max(axis=0)
    return not np.any(np.all(prompt_rewards == best, axis=1))


def _anticorrelated_table(rng: np.random.Generator, p: int, k: int) -> np.ndarray:
    """Candidates trade off the two objectives along a descending front.

    Positions along the front are stratified so both objectives always
    spread out, which keeps the per-prompt sample correlation negative.
    Half the candidates are pushed well below the front (depth subtracted
    from both objectives), leaving room for a trained policy to beat the
    uniform baseline.
    """
    rewards = np.empty((p, k, 2))
    n_front = (k + 1) // 2
    for i in range(p):
        u = (np.arange(k) + rng.uniform(size=k)) / k
        base = np.stack([0.05 + 0.9 * u, 0.95 - 0.9 * u], axis=1)
        depth = np.zeros((k, 1))
        depth[n_front:, 0] = rng.uniform(0.3, 0.5, size=k - n_front)
        table = np.clip(base - depth, 0.0, None)
        rewards[i] = table[rng.permutation(k)]
    return rewards


def _sparse_vs_dense_table(rng: np.random.Generator, p: int, k: int) -> np.ndarray:
    """Objective "sparse" is binary with at most 20% positives per prompt;
    objective "dense" is continuous with high variance."""
    rewards = np.empty((p, k, 2))
    n_pos = max(1, int(0.2 * k))
    for i in range(p):
        dense = rng.uniform(0.0, 1.0, size=k)
        sparse = np.zeros(k)
        positives = rng.choice(k, size=n_pos, replace=False)
        sparse[positives] = 1.0
        rewards[i, :, 0] = sparse
        rewards[i, :, 1] = dense
    return rewards


def _threeway_table(rng: np.random.Generator, p: int, k: int) -> np.ndarray:
    """Three objectives in a tug-of-war: front candidates sit at varied
    barycentric positions with varied magnitudes, the rest are dominated."""
    rewards = np.empty((p, k, 3))
    for i in range(p):
        n_front = (k + 1) // 2
        position = rng.dirichlet(np.ones(3), size=n_front)
        magnitude = rng.uniform(0.7, 1.0, size=(n_front, 1))
        front = position * magnitude
        dominated = rng.uniform(0.0, 0.2, size=(k - n_front, 3))
        table = np.concatenate([front, dominated], axis=0)
        rewards[i] = table[rng.permutation(k)]
    return rewards


def build_env(spec: EnvConfig, seed: int) -> SyntheticEnv:
    """Build a preset environment, deterministic from the seed.

    Tables are redrawn (deterministically) until at least one prompt has
    conflicting objectives, which every preset reaches almost surely on
    the first attempt.
    """
    if spec.preset not in PRESETS:
        raise ValueError(f"unknown preset {spec.preset!r}, expected one of {PRESETS}")
    if spec.candidates < 2:
        raise ValueError("need at least 2 candidates per prompt")
    if spec.prompts < 1:
        raise ValueError("need at least 1 prompt")

    names = {
        "anticorrelated": ("obj_a", "obj_b"),
        "sparse-vs-dense": ("sparse", "dense"),
        "threeway": ("obj_a", "obj_b", "obj_c"),
    }[spec.preset]
    builders = {
        "anticorrelated": _anticorrelated_table,
        "sparse-vs-dense": _sparse_vs_dense_table,
        "threeway": _threeway_table,
    }
    for attempt in range(_MAX_BUILD_ATTEMPTS):
        rng = np.random.default_rng([seed, attempt])
        table = builders[spec.preset](rng, spec.prompts, spec.candidates)
        if any(_conflicting(table[i]) for i in range(spec.prompts)):
            return SyntheticEnv(
                rewards=table, objective_names=names, seed=seed, preset=spec.preset
            )
    raise RuntimeError(f"could not build a conflicting {spec.preset} table from seed {seed}")


def sample_group(
    policy: PolicyTable, prompt: int, g: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw g candidates for one prompt and their snapshot log-probs."""
    if g < 2:
        raise ValueError("group size must be at least 2")
    logp = log_softmax(policy.logits[prompt])
    indices = rng.choice(policy.logits.shape[1], size=g, p=np.exp(logp))
    return indices, logp[indices]


def surrogate_loss(
    ratios: np.ndarray,
    advantages: np.ndarray,
    clip_eps: float,
    kl: float,
    beta: float,
) -> float:
    """Clipped surrogate with KL penalty.

    Returns -(1/N) sum_i [min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i)
    - beta * kl], where kl is the exact categorical KL to the reference
    averaged over the prompts in the batch.
    """
    ratios = np.asarray(ratios, dtype=float)
    advantages = np.asarray(advantages, dtype=float)
    if ratios.shape != advantages.shape:
        raise ValueError("ratios and advantages must have matching shapes")
    if np.any(ratios <= 0):
        raise ValueError("probability ratios must be positive")
    clipped = np.clip(ratios, 1.0 - clip_eps, 1.0 + clip_eps)
    term = np.minimum(ratios * advantages, clipped * advantages)
    return float(-(term - beta * kl).mean())


@dataclass(frozen=True)
class _Batch:
    prompt_idx: np.ndarray
    cand_idx: np.ndarray
    old_logp: np.ndarray
    advantages: np.ndarray


def _loss_and_grad(
    logits: np.ndarray,
    batch: _Batch,
    ref_logits: np.ndarray,
    cfg: TrainConfig,
) -> tuple[float, np.ndarray]:
    """Surrogate loss and its analytic gradient w.r.t. the policy logits.

    The clipped-and-active branch of the min contributes zero gradient
    (the usual subgradient convention); the KL penalty is exact.
    """
    logp = log_softmax(logits)
    probs = np.exp(logp)
    ref_logp = log_softmax(ref_logits)

    lp = logp[batch.prompt_idx, batch.cand_idx]
    ratios = np.exp(lp - batch.old_logp)
    adv = batch.advantages
    eps = cfg.clip_eps

    kl_per_prompt = (probs * (logp - ref_logp)).sum(axis=1)
    kl = float(kl_per_prompt.mean())
    loss = surrogate_loss(ratios, adv, eps, kl, cfg.kl_beta)

    # gradient flows unless the min picked a clipped branch that is active
    active = ~(((ratios > 1.0 + eps) & (adv > 0)) | ((ratios < 1.0 - eps) & (adv < 0)))
    coeff = np.where(active, ratios * adv, 0.0)

    n = len(coeff)
    grad = np.zeros_like(logits)
    # d lp_i / d z[p] = onehot(k_i) - probs[p]
    np.add.at(grad, (batch.prompt_idx, batch.cand_idx), coeff)
    per_prompt = np.zeros(logits.shape[0])
    np.add.at(per_prompt, batch.prompt_idx, coeff)
    grad -= per_prompt[:, None] * probs
    grad /= -n  # the surrogate enters the loss with a leading minus

    n_prompts = logits.shape[0]
    kl_grad = probs * ((logp - ref_logp) - kl_per_prompt[:, None])
    grad += (cfg.kl_beta / n_prompts) * kl_grad
    return loss, grad


def train_step(
    policy: PolicyTable,
    env: SyntheticEnv,
    cfg: TrainConfig,
    rng: np.random.SeedSequence,
    step: int = 0,
) -> tuple[PolicyTable, StepRecord]:
    """One sampling round plus one gradient step on the surrogate.

    Sampling is keyed per prompt from the supplied seed sequence, so the
    step is reproducible and prompts could be drawn in parallel.
    """
    p, _, m = env.rewards.shape
    g = cfg.group_size
    snapshot = policy.logits.copy()

    children = rng.spawn(p)
    prompt_idx = np.repeat(np.arange(p), g)
    cand_idx = np.empty(p * g, dtype=int)
    old_logp = np.empty(p * g)
    for i in range(p):
        idx, lp = sample_group(policy, i, g, np.random.default_rng(children[i]))
        cand_idx[i * g : (i + 1) * g] = idx
        old_logp[i * g : (i + 1) * g] = lp

    rewards = env.rewards[prompt_idx, cand_idx]  # (P*G, M)
    matrix = GroupedRewardMatrix(
        rewards=rewards, groups=prompt_idx, objective_names=env.objective_names
    )

    if cfg.engine == "pfab":
        adv = pfab_advantages(matrix)
        residual_mean = float(np.mean([v for v in adv.group_residuals.values()]))
    else:
        weights = None if cfg.grpo_weights is None else np.asarray(cfg.grpo_weights)
        adv = grpo_advantages(matrix, GrpoParams(weights=weights))
        residuals = pareto_residual(matrix, AdvantageParams(), SolverParams())
        residual_mean = float(np.mean([r.value for r in residuals.values()]))
    alpha_mean = np.mean(
        [adv.group_weights[gid].weights for gid in sorted(adv.group_weights)], axis=0
    )

    batch = _Batch(
        prompt_idx=prompt_idx, cand_idx=cand_idx, old_logp=old_logp, advantages=adv.values
    )
    loss, grad = _loss_and_grad(snapshot, batch, policy.ref_logits, cfg)
    gnorm = float(np.linalg.norm(grad))
    if gnorm > cfg.max_grad_norm:
        grad = grad * (cfg.max_grad_norm / gnorm)
    policy.logits = snapshot - cfg.learning_rate * grad

    ref_logp = log_softmax(policy.ref_logits)
    snap_logp = log_softmax(snapshot)
    kl = float(
        np.mean(
            [exact_kl(np.exp(snap_logp[i]), np.exp(ref_logp[i])) for i in range(p)]
        )
    )

    fronts = pareto_front_oracle(env)
    modal = snapshot.argmax(axis=1)
    front_fraction = float(np.mean([modal[i] in fronts[i] for i in range(p)]))

    record = StepRecord(
        step=step,
        mean_rewards=rewards.mean(axis=0),
        min_obj_mean=float(rewards.mean(axis=0).min()),
        residual_mean=residual_mean,
        alpha_mean=alpha_mean,
        kl=kl,
        loss=loss,
        front_fraction=front_fraction,
    )
    return policy, record


def run_experiment(cfg: TrainConfig, env: SyntheticEnv) -> TrainingTrace:
    """Train for cfg.steps rounds; deterministic given (cfg.seed, env.seed)."""
    policy = PolicyTable.init_uniform(env.n_prompts, env.n_candidates)
    trace = TrainingTrace(engine=cfg.engine, objective_names=env.objective_names)
    for step in range(cfg.steps):
        seq = np.random.SeedSequence(entropy=(cfg.seed, env.seed, step))
        policy, record = train_step(policy, env, cfg, seq, step=step)
        trace.records.append(record)
    return trace


def pareto_front_oracle(env: SyntheticEnv) -> list[set[int]]:
    """Nondominated candidate indices per prompt, by exhaustive check.

    A candidate is dominated iff some other candidate is >= on every
    objective and > on at least one, so exact duplicates are both kept.
    """
    fronts = []
    for i in range(env.n_prompts):
        r = env.rewards[i]
        geq = np.all(r[:, None, :] >= r[None, :, :], axis=2)
        gt = np.any(r[:, None, :] > r[None, :, :], axis=2)
        dominated = np.any(geq & gt, axis=0)
        fronts.append(set(np.flatnonzero(~dominated).tolist()))
    return fronts


def summarize(trace: TrainingTrace, env: SyntheticEnv) -> dict:
    """Plot-ready summary of one training run.

    Final reward statistics average the last 10% of steps (at least one).
    ``front_step_fraction`` is the share of steps whose modal candidate
    was nondominated for every prompt. ``max_alpha_gap_from_uniform`` is
    the largest per-step deviation of the mean objective weights from
    uniform, reported without any directional claim.
    """
    m = len(trace.objective_names)
    if len(trace) == 0:
        summary = {
            "engine": trace.engine,
            "steps": 0,
            "final_mean_rewards": {n: None for n in trace.objective_names},
            "min_objective_mean": None,
            "summed_mean_reward": None,
            "residual_mean_last_10pct": None,
            "front_step_fraction": None,
            "max_alpha_gap_from_uniform": None,
            "uniform_baseline": {
                n: float(v)
                for n, v in zip(trace.objective_names, env.uniform_baseline())
            },
        }
        return summary

    tail = max(1, len(trace) // 10)
    rewards = trace.mean_rewards()
    final = rewards[-tail:].mean(axis=0)
    residual_tail = trace.column("residual_mean")[-tail:].mean()
    alpha_gap = float(np.abs(trace.alpha_means() - 1.0 / m).max())
    front_steps = float(np.mean(trace.column("front_fraction") == 1.0))
    return {
        "engine": trace.engine,
        "steps": len(trace),
        "final_mean_rewards": {
            n: float(v) for n, v in zip(trace.objective_names, final)
        },
        "min_objective_mean": float(final.min()),
        "summed_mean_reward": float(final.sum()),
        "residual_mean_last_10pct": float(residual_tail),
        "front_step_fraction": front_steps,
        "max_alpha_gap_from_uniform": alpha_gap,
        "uniform_baseline": {
            n: float(v) for n, v in zip(trace.objective_names, env.uniform_baseline())
        },
    }
