"""Shipped reward fixtures.

The discrimination fixture is a single group of three samples over three
objectives whose rows all sum to 6 while the per-objective dispersions
differ. Because every row total is identical, the uniform static-weight
baseline assigns exactly zero advantage to every sample; the min-norm
engine weights the objectives unevenly and separates the samples.
Entries are small integers so the equal row totals are exact in floating
point.
"""

from __future__ import annotations

import numpy as np

from .advantage import GroupedRewardMatrix

#: Centered columns are (2, -2, 0), (0, 1, -1), (-2, 1, 1): equal row
#: sums, unequal column dispersions.
DISCRIMINATION_REWARDS = np.array(
    [
        [4.0, 1.0, 1.0],
        [0.0, 2.0, 4.0],
        [2.0, 0.0, 4.0],
    ]
)

DISCRIMINATION_OBJECTIVES = ("a", "b", "c")


def discrimination_fixture() -> GroupedRewardMatrix:
    """The equal-row-sum, unequal-dispersion single-group fixture."""
    return GroupedRewardMatrix(
        rewards=DISCRIMINATION_REWARDS.copy(),
        groups=np.zeros(3, dtype=int),
        objective_names=DISCRIMINATION_OBJECTIVES,
    )


def discrimination_csv() -> str:
    """The fixture in the grouped-rewards CSV format the CLI reads."""
    lines = ["group_id," + ",".join(DISCRIMINATION_OBJECTIVES)]
    for row in DISCRIMINATION_REWARDS:
        lines.append("0," + ",".join(f"{v:.9g}" for v in row))
    return "\n".join(lines) + "\n"
