"""Persistence diagrams and the two baseline distances between them.

Both distances use the L-infinity ground metric and allow points to retire to
the diagonal at half their persistence. The 1-Wasserstein distance minimizes
the summed displacement via one assignment on diagonal-augmented diagrams;
the bottleneck distance minimizes the maximum displacement via binary search
over candidate costs with a bipartite feasibility test at each step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .matching import CostMatrix, min_cost_assignment
from .mergetree import Interval


@dataclass(eq=False)
class PersistenceDiagram:
    points: list

    def __post_init__(self):
        self.points = list(self.points)
        for p in self.points:
            if not isinstance(p, Interval):
                raise ValueError(f"diagram point {p!r} is not an interval")

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        key = lambda p: (p.birth, p.death)
        return sorted(self.points, key=key) == sorted(other.points, key=key)


def diagram_of(tree):
    """One point per persistence pair, i.e. one per extremum (root pair included)."""
    if not tree.is_paired():
        raise ValueError("diagram requires a paired tree")
    ext = tree.extrema()
    if not ext:    # single-node tree: the root is its own extremum
        return PersistenceDiagram([tree.nodes[tree.root].interval])
    return PersistenceDiagram([tree.nodes[e].interval for e in sorted(ext)])


def _linf(p, q):
    return max(abs(q.birth - p.birth), abs(q.death - p.death))


def _augmented_cost_matrix(a, b):
    """(|a|+|b|) square matrix: direct L-inf block, one diagonal slot per point
    (inf off-slot), zero diagonal-to-diagonal block."""
    na, nb = len(a), len(b)
    m = np.full((na + nb, na + nb), np.inf)
    for i, p in enumerate(a.points):
        for j, q in enumerate(b.points):
            m[i, j] = _linf(p, q)
    for i, p in enumerate(a.points):
        m[i, nb + i] = p.persistence / 2.0
    for j, q in enumerate(b.points):
        m[na + j, j] = q.persistence / 2.0
    m[na:, nb:] = 0.0
    return m


def wasserstein1(a, b):
    if len(a) == 0 and len(b) == 0:
        return 0.0
    _, total = min_cost_assignment(CostMatrix(_augmented_cost_matrix(a, b)))
    return total


def bottleneck(a, b):
    if len(a) == 0 and len(b) == 0:
        return 0.0
    m = _augmented_cost_matrix(a, b)
    n = m.shape[0]
    finite = m[np.isfinite(m)]
    candidates = np.unique(finite)

    def feasible(c):
        allowed = csr_matrix((m <= c).astype(np.int8))
        match = maximum_bipartite_matching(allowed, perm_type="column")
        return bool(np.all(match >= 0))

    lo, hi = 0, len(candidates) - 1
    if not feasible(candidates[hi]):
        raise ValueError("no feasible matching")    # cannot happen: diagonal always open
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def save_diagram_csv(diagram, path):
    with open(path, "w") as fh:
        fh.write("birth,death\n")
        for p in diagram.points:
            fh.write(f"{repr(p.birth)},{repr(p.death)}\n")


def load_diagram_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "birth,death":
            raise ValueError(f"{path}: malformed diagram header {header!r}")
        pts = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                b, d = line.split(",")
                pts.append(Interval(float(b), float(d)))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return PersistenceDiagram(pts)
