"""Exercise the simplex min-norm solver on hand-picked delta matrices.

The solver finds the convex combination of objective direction columns
with the smallest aggregate norm: a residual near zero means the columns
pull in perfectly opposing directions (no common ascent direction).
"""

import numpy as np

from pfab import StandardizedDeltas, min_norm_weights


def solve_and_print(label, matrix):
    matrix = np.asarray(matrix, dtype=float)
    d = StandardizedDeltas(
        matrix=matrix, columns=tuple(range(matrix.shape[1])),
        n_objectives=matrix.shape[1],
    )
    sol = min_norm_weights(d)
    print(f"--- {label} ---")
    print(f"  weights : {np.round(sol.weights, 6)}")
    print(f"  residual: {sol.residual:.3e}  (iterations {sol.iterations}, "
          f"converged {sol.converged})")
    print()


def main():
    u = np.array([1.0, -1.0, 0.5, -0.5])
    solve_and_print("two opposite columns (stationary point)",
                    np.stack([u, -u], axis=1))

    solve_and_print("single column", u[:, None])

    rng = np.random.default_rng(0)
    d = rng.normal(size=(8, 3))
    d = (d - d.mean(axis=0)) / d.std(axis=0)
    solve_and_print("random standardized 8x3 deltas", d)

    # equal-norm orthogonal columns split the weight evenly
    solve_and_print("orthogonal equal-norm columns",
                    np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))


if __name__ == "__main__":
    main()
