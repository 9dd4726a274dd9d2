"""Frank-Wolfe solver for the minimum-norm point over the simplex.

Solves min_{alpha in simplex} ||D_hat @ alpha||^2 for a standardized
delta matrix D_hat, using the conditional-gradient method with an exact
closed-form line search. The loop mirrors the four textbook steps:
gradient 2 D^T (D alpha), a one-hot linear minimization oracle, exact
line search clamped to [0, 1], and a convex-combination update. The
exact line search guarantees a monotonically nonincreasing objective.

Vertex-direction steps can never land exactly on the interior of a
simplex face, so when the minimizer has a zero component the loop only
approaches it sublinearly. The solve therefore finishes with one exact
equality-constrained solve per face and returns whichever solution is
better; on such instances this recovers the true minimum instead of a
zig-zag iterate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SolverParams:
    """Iteration budget and tolerances.

    ``tol`` terminates on the Euclidean norm of the weight change;
    ``line_search_guard`` triggers early termination when the step
    direction has numerically vanished.
    """

    max_iter: int = 50
    tol: float = 1e-6
    line_search_guard: float = 1e-12

    def __post_init__(self) -> None:
        if self.max_iter <= 0 or self.tol <= 0 or self.line_search_guard <= 0:
            raise ValueError("all solver parameters must be positive")


@dataclass(frozen=True)
class StandardizedDeltas:
    """Centered, per-column standardized reward deltas for one group.

    ``matrix`` has shape (group size, n valid objectives); ``columns``
    maps each kept column back to its objective index among the original
    ``n_objectives``. Columns produced by the standardization pipeline
    have zero mean and unit population dispersion; the solver itself
    accepts any matrix (the raw path in the CLI skips standardization).
    """

    matrix: np.ndarray
    columns: tuple[int, ...]
    n_objectives: int

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2:
            raise ValueError(f"delta matrix must be 2-d, got shape {mat.shape}")
        if mat.shape[1] != len(self.columns):
            raise ValueError("column labels do not match matrix width")
        if self.n_objectives < mat.shape[1]:
            raise ValueError("more valid columns than objectives")


@dataclass(frozen=True)
class SimplexWeights:
    """Solver output: weights on the full objective simplex.

    ``weights`` has length ``n_objectives`` with exact zeros at filtered
    objectives. ``residual`` is the achieved ||D_hat @ alpha||^2.
    ``iterations`` counts applied weight updates. The histories record
    the objective value and iterate (in valid-column space) at the start
    and after every update, for convergence diagnostics.
    """

    weights: np.ndarray
    residual: float
    iterations: int
    converged: bool
    objective_history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterate_history: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))


def objective(d_hat: StandardizedDeltas, alpha: np.ndarray) -> float:
    """||D_hat @ alpha||^2 for a simplex weight vector over the valid columns."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (d_hat.matrix.shape[1],):
        raise ValueError(
            f"alpha has shape {alpha.shape}, expected ({d_hat.matrix.shape[1]},)"
        )
    v = d_hat.matrix @ alpha
    return float(v @ v)


def lmo(gradient: np.ndarray) -> int:
    """Linear minimization oracle over the simplex: the index of the
    smallest gradient component, ties broken by smallest index."""
    gradient = np.asarray(gradient, dtype=float)
    if gradient.ndim != 1 or gradient.size == 0:
        raise ValueError("gradient must be a nonempty vector")
    return int(np.argmin(gradient))


def exact_line_search(
    current_dir: np.ndarray, step_dir: np.ndarray, guard: float = 1e-12
):
    """Closed-form step size for the quadratic objective.

    ``current_dir`` is D_hat @ alpha and ``step_dir`` is D_hat @ d. The
    unconstrained minimizer -<current, step>/||step||^2 is clamped to
    [0, 1]. Returns None (the early-termination signal) when
    ||step||^2 falls below ``guard``.
    """
    denom = float(step_dir @ step_dir)
    if denom < guard:
        return None
    gamma = -float(current_dir @ step_dir) / denom
    return min(1.0, max(0.0, gamma))


def _face_candidates(n: int):
    """Nonempty index subsets defining the simplex faces to solve exactly.

    Full enumeration is cheap for the handful of objectives this solver
    is built for; beyond that only singleton faces are tried (the loop
    already handles vertex optima well).
    """
    if n <= 6:
        for size in range(1, n + 1):
            yield from itertools.combinations(range(n), size)
    else:
        yield from ((j,) for j in range(n))


def _exact_face_solution(mat: np.ndarray) -> tuple[float, np.ndarray] | None:
    """Best feasible minimizer of ||mat @ alpha||^2 with sum(alpha) = 1
    over every simplex face, or None when no face yields a feasible point.

    Each face gives a tiny symmetric KKT system; singular faces (flat
    directions) fall back to a least-squares solve, which still returns a
    valid minimizer when one exists.
    """
    gram = mat.T @ mat
    n = gram.shape[0]
    best: tuple[float, np.ndarray] | None = None
    for subset in _face_candidates(n):
        idx = list(subset)
        k = len(idx)
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = 2.0 * gram[np.ix_(idx, idx)]
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[k] = 1.0
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, _, _, _ = np.linalg.lstsq(kkt, rhs, rcond=None)
            if not np.allclose(kkt @ sol, rhs, atol=1e-9):
                continue
        beta = sol[:k]
        if np.any(beta < -1e-12):
            continue
        alpha = np.zeros(n)
        alpha[idx] = np.clip(beta, 0.0, None)
        alpha /= alpha.sum()
        v = mat @ alpha
        value = float(v @ v)
        if best is None or value < best[0]:
            best = (value, alpha)
    return best


def min_norm_weights(
    d_hat: StandardizedDeltas, params: SolverParams = SolverParams()
) -> SimplexWeights:
    """Run Frank-Wolfe from the uniform initialization, then refine.

    The loop terminates when the weight change drops below ``params.tol``,
    on the line-search guard, or after ``params.max_iter`` updates;
    ``iterations`` and ``converged`` describe the loop alone. The final
    exact face solve replaces the iterate only when strictly better, and
    is appended to the histories so the recorded objective sequence stays
    nonincreasing. The returned weights are re-embedded into the full
    objective vector with zeros at invalid objectives.
    """
    mat = d_hat.matrix
    n = mat.shape[1]
    if n == 0:
        raise ValueError("solver requires at least one valid objective")

    alpha = np.full(n, 1.0 / n)
    projected = mat @ alpha
    objectives = [float(projected @ projected)]
    iterates = [alpha.copy()]
    iterations = 0
    converged = False

    for _ in range(params.max_iter):
        grad = 2.0 * (mat.T @ projected)
        vertex = lmo(grad)
        direction = -alpha.copy()
        direction[vertex] += 1.0
        gamma = exact_line_search(projected, mat @ direction, params.line_search_guard)
        if gamma is None:
            converged = True
            break
        new_alpha = alpha + gamma * direction
        step_norm = float(np.linalg.norm(new_alpha - alpha))
        alpha = new_alpha
        projected = mat @ alpha
        iterations += 1
        objectives.append(float(projected @ projected))
        iterates.append(alpha.copy())
        if step_norm < params.tol:
            converged = True
            break

    refined = _exact_face_solution(mat)
    if refined is not None and refined[0] < objectives[-1]:
        alpha = refined[1]
        objectives.append(refined[0])
        iterates.append(alpha.copy())

    weights = np.zeros(d_hat.n_objectives)
    weights[list(d_hat.columns)] = alpha
    return SimplexWeights(
        weights=weights,
        residual=objectives[-1],
        iterations=iterations,
        converged=converged,
        objective_history=np.asarray(objectives),
        iterate_history=np.asarray(iterates),
    )
