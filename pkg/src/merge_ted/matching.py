"""Minimum-cost assignment and the forest-matching matrix of the recurrence.

The forest matrix is square with four blocks. For forests of n1 and n2 trees:

    [ subtree distances (n1 x n2) | deletions: own diagonal slot, inf off ]
    [ insertions: own diagonal    | zeros                                 ]

Each tree owns exactly one deletion (insertion) slot, so a perfect assignment
deletes a tree at most once and at its own cost; the assignment optimum equals
the cheapest restricted forest mapping. Infinity is a true sentinel: entries
marked inf are never part of a returned assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(eq=False)
class CostMatrix:
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError(f"cost matrix must be square, got {self.entries.shape}")
        if np.isnan(self.entries).any():
            raise ValueError("cost matrix contains NaN")

    @property
    def n(self):
        return self.entries.shape[0]


def min_cost_assignment(matrix):
    """Optimal permutation and its total cost; raises if only inf rows remain."""
    entries = matrix.entries if isinstance(matrix, CostMatrix) else CostMatrix(matrix).entries
    n = entries.shape[0]
    if n == 0:
        return np.empty(0, dtype=int), 0.0
    try:
        rows, cols = linear_sum_assignment(entries)
    except ValueError as exc:
        raise ValueError("no finite assignment exists") from exc
    perm = np.empty(n, dtype=int)
    perm[rows] = cols
    total = float(entries[rows, cols].sum())
    if not np.isfinite(total):
        raise ValueError("no finite assignment exists")
    return perm, total


def build_forest_matrix(subtree_dists, delete_costs, insert_costs):
    subtree_dists = np.asarray(subtree_dists, dtype=float)
    delete_costs = np.asarray(delete_costs, dtype=float).ravel()
    insert_costs = np.asarray(insert_costs, dtype=float).ravel()
    n1, n2 = len(delete_costs), len(insert_costs)
    if subtree_dists.shape != (n1, n2):
        raise ValueError(
            f"subtree distance block is {subtree_dists.shape}, expected {(n1, n2)}")
    m = np.full((n1 + n2, n1 + n2), np.inf)
    m[:n1, :n2] = subtree_dists
    m[np.arange(n1), n2 + np.arange(n1)] = delete_costs
    m[n1 + np.arange(n2), np.arange(n2)] = insert_costs
    m[n1:, n2:] = 0.0
    return CostMatrix(m)
