"""Group-relative advantage computation for multi-objective rewards.

Two engines share the same grouped-reward input:

* ``pfab_advantages``: per group, center the reward matrix, standardize
  the columns with spread above a validity threshold, solve the
  minimum-norm problem over the simplex in standardized space, apply the
  resulting weights to the centered (unstandardized) rewards, and
  z-normalize. Objectives whose in-group dispersion is below the
  threshold are excluded; if none survive, the weights fall back to
  uniform and the group's advantages are exactly zero.
* ``grpo_advantages``: the static-weight baseline, z-scoring the
  weighted reward total within each group.

``pareto_residual`` exposes the achieved min-norm value per group, which
vanishes exactly when the origin lies in the convex hull of the
standardized columns (no common ascent direction remains).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .minnorm import SimplexWeights, SolverParams, StandardizedDeltas, min_norm_weights


@dataclass(frozen=True)
class GroupedRewardMatrix:
    """Rewards for N samples over M objectives plus a group id per sample."""

    rewards: np.ndarray
    groups: np.ndarray
    objective_names: tuple[str, ...]

    def __post_init__(self) -> None:
        rewards = np.asarray(self.rewards, dtype=float)
        groups = np.asarray(self.groups, dtype=int)
        object.__setattr__(self, "rewards", rewards)
        object.__setattr__(self, "groups", groups)
        if rewards.ndim != 2 or rewards.shape[0] < 1 or rewards.shape[1] < 1:
            raise ValueError(f"reward matrix must be (N, M) with N, M >= 1, got {rewards.shape}")
        if groups.shape != (rewards.shape[0],):
            raise ValueError("group vector length must match the number of samples")
        if len(self.objective_names) != rewards.shape[1]:
            raise ValueError("objective names must match the number of columns")

    @property
    def n_samples(self) -> int:
        return self.rewards.shape[0]

    @property
    def n_objectives(self) -> int:
        return self.rewards.shape[1]

    def group_rows(self) -> dict[int, np.ndarray]:
        """Row indices per group id, in ascending group order."""
        return {int(g): np.flatnonzero(self.groups == g) for g in np.unique(self.groups)}


@dataclass(frozen=True)
class AdvantageParams:
    """Validity threshold and normalization guard.

    ``tau`` excludes objectives whose in-group population std is not
    strictly above it; ``eps`` guards the final z-normalization. The
    dispersion convention is population (divide by the group size)
    throughout.
    """

    tau: float = 1e-6
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.tau <= 0 or self.eps <= 0:
            raise ValueError("tau and eps must be positive")


@dataclass(frozen=True)
class GrpoParams:
    """Static objective weights for the baseline; None means uniform."""

    weights: Optional[np.ndarray] = None
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or np.any(w < 0) or w.sum() <= 0:
                raise ValueError("weights must be nonnegative with positive sum")
            object.__setattr__(self, "weights", w / w.sum())


@dataclass(frozen=True)
class AdvantageVector:
    """Per-sample advantages plus per-group solver outputs.

    ``group_residuals`` holds the achieved min-norm value per group (empty
    for the GRPO baseline, which solves no such problem). ``diagnostics``
    carries per-group notes such as "degenerate" (no valid objectives) or
    "singleton" (group of size one, forced to zero advantage).
    """

    values: np.ndarray
    group_weights: dict[int, SimplexWeights]
    group_residuals: dict[int, float] = field(default_factory=dict)
    diagnostics: dict[int, tuple[str, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class GroupResidual:
    """Min-norm residual of one group; degenerate means no valid objectives."""

    value: float
    degenerate: bool


def center_rewards(m: GroupedRewardMatrix) -> np.ndarray:
    """Subtract the per-group column mean from every reward entry."""
    centered = np.empty_like(m.rewards)
    for rows in m.group_rows().values():
        block = m.rewards[rows]
        centered[rows] = block - block.mean(axis=0)
    return centered


def standardize(
    d_group: np.ndarray, tau: float
) -> tuple[StandardizedDeltas, tuple[int, ...], np.ndarray]:
    """Filter and scale the centered block of one group.

    Returns the standardized matrix over the valid objectives (population
    std strictly above ``tau``), the valid index set, and the full sigma
    vector. The valid set may be empty.
    """
    d_group = np.asarray(d_group, dtype=float)
    sigma = d_group.std(axis=0)
    valid = tuple(int(j) for j in np.flatnonzero(sigma > tau))
    matrix = d_group[:, valid] / sigma[list(valid)] if valid else d_group[:, :0]
    return (
        StandardizedDeltas(matrix=matrix, columns=valid, n_objectives=d_group.shape[1]),
        valid,
        sigma,
    )


def _normalize(raw: np.ndarray, eps: float) -> np.ndarray:
    return (raw - raw.mean()) / (raw.std() + eps)


def _uniform_weights(n_objectives: int) -> SimplexWeights:
    return SimplexWeights(
        weights=np.full(n_objectives, 1.0 / n_objectives),
        residual=0.0,
        iterations=0,
        converged=True,
    )


def pfab_advantages(
    m: GroupedRewardMatrix,
    params: AdvantageParams = AdvantageParams(),
    solver: SolverParams = SolverParams(),
) -> AdvantageVector:
    """Min-norm balanced advantages, one solve per group.

    Groups with no valid objectives (including singletons, where every
    centered entry is zero) report uniform fallback weights, zero
    residual, and exactly zero advantages.
    """
    centered = center_rewards(m)
    values = np.zeros(m.n_samples)
    group_weights: dict[int, SimplexWeights] = {}
    group_residuals: dict[int, float] = {}
    diagnostics: dict[int, tuple[str, ...]] = {}

    for gid, rows in m.group_rows().items():
        block = centered[rows]
        notes = []
        if rows.size == 1:
            notes.append("singleton")
        d_hat, valid, _ = standardize(block, params.tau)
        if not valid:
            solution = _uniform_weights(m.n_objectives)
            notes.append("degenerate")
            # all objectives filtered: the centered block is numerically
            # flat, so the group carries no learning signal at all
            values[rows] = 0.0
        else:
            solution = min_norm_weights(d_hat, solver)
            raw = block @ solution.weights
            values[rows] = _normalize(raw, params.eps)
        group_weights[gid] = solution
        group_residuals[gid] = solution.residual
        if notes:
            diagnostics[gid] = tuple(notes)

    return AdvantageVector(
        values=values,
        group_weights=group_weights,
        group_residuals=group_residuals,
        diagnostics=diagnostics,
    )


def grpo_advantages(
    m: GroupedRewardMatrix, params: GrpoParams = GrpoParams()
) -> AdvantageVector:
    """Static-weight baseline: z-score of the weighted reward total.

    With uniform weights the total is computed as an exact column mean,
    so groups whose rows sum identically get exactly zero advantage.
    """
    if params.weights is None:
        w = np.full(m.n_objectives, 1.0 / m.n_objectives)
        totals = m.rewards.mean(axis=1)
    else:
        w = np.asarray(params.weights, dtype=float)
        if w.shape != (m.n_objectives,):
            raise ValueError(
                f"weights have shape {w.shape}, expected ({m.n_objectives},)"
            )
        totals = m.rewards @ w

    values = np.zeros(m.n_samples)
    group_weights: dict[int, SimplexWeights] = {}
    diagnostics: dict[int, tuple[str, ...]] = {}
    static = SimplexWeights(weights=w, residual=0.0, iterations=0, converged=True)
    for gid, rows in m.group_rows().items():
        values[rows] = _normalize(totals[rows], params.eps)
        group_weights[gid] = static
        if rows.size == 1:
            values[rows] = 0.0
            diagnostics[gid] = ("singleton",)

    return AdvantageVector(
        values=values, group_weights=group_weights, diagnostics=diagnostics
    )


def pareto_residual(
    m: GroupedRewardMatrix,
    params: AdvantageParams = AdvantageParams(),
    solver: SolverParams = SolverParams(),
) -> dict[int, GroupResidual]:
    """Per-group min-norm residual ||D_hat @ alpha*||^2.

    A residual near zero means the origin lies in the convex hull of the
    group's standardized reward directions, i.e. the group is Pareto
    stationary. Groups with no valid objectives report residual 0 with
    the degenerate flag set.
    """
    centered = center_rewards(m)
    out: dict[int, GroupResidual] = {}
    for gid, rows in m.group_rows().items():
        d_hat, valid, _ = standardize(centered[rows], params.tau)
        if not valid:
            out[gid] = GroupResidual(value=0.0, degenerate=True)
        else:
            solution = min_norm_weights(d_hat, solver)
            out[gid] = GroupResidual(value=solution.residual, degenerate=False)
    return out
