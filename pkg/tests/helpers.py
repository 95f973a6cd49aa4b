"""Shared test utilities: random valid merge trees and tiny fixed trees."""

from __future__ import annotations

import numpy as np

from merge_ted.mergetree import (JOIN, Interval, MergeTree, MergeTreeNode,
                                 persistence_pair)


def random_join_tree(rng, n_leaves, multi_prob=0.2, lo=0.0, hi=1.0,
                     force_range=False):
    """Random structurally valid, paired join tree.

    Leaf births land in the lower half of [lo, hi] and saddles in the upper
    half, merging 2 (occasionally 3) components at strictly increasing values;
    the root sits at the top of the range. With force_range the root interval
    is exactly (lo, hi).
    """
    n_leaves = int(n_leaves)
    assert n_leaves >= 1
    births = rng.uniform(0.0, 0.45, n_leaves)
    if force_range:
        births[0] = 0.0
    nodes = {}
    comps = []
    for k in range(n_leaves):
        nodes[k] = MergeTreeNode(k, float(births[k]), "extremum", [])
        comps.append(k)
    next_id = n_leaves
    if n_leaves > 1:
        steps = rng.uniform(0.01, 1.0, n_leaves - 1)
        levels = 0.5 + 0.45 * np.cumsum(steps) / steps.sum()
    li = 0
    while len(comps) > 1:
        k = 2
        if len(comps) > 2 and rng.random() < multi_prob:
            k = 3
        picks = sorted(rng.choice(len(comps), size=k, replace=False), reverse=True)
        children = [comps.pop(int(p)) for p in picks]
        nodes[next_id] = MergeTreeNode(next_id, float(levels[li]), "saddle",
                                       children)
        li += 1
        comps.append(next_id)
        next_id += 1
    nodes[next_id] = MergeTreeNode(next_id, 1.0, "root", [comps[0]])
    tree = MergeTree(JOIN, nodes, next_id)
    if not force_range:
        lo = lo + rng.uniform(0.0, 0.1)
        hi = hi - rng.uniform(0.0, 0.1)
    span = hi - lo
    gmin = min(n.scalar for n in tree.nodes.values())
    gmax = max(n.scalar for n in tree.nodes.values())
    for n in tree.nodes.values():
        n.scalar = lo + (n.scalar - gmin) / (gmax - gmin) * span
    return persistence_pair(tree)


def chain_tree(scalars_leaves, scalars_saddles, root_scalar, orientation=JOIN):
    """Caterpillar join tree: leaf k dies at saddle k (k >= 1), leaf 0 survives."""
    nodes = {}
    for k, s in enumerate(scalars_leaves):
        nodes[k] = MergeTreeNode(k, float(s), "extremum", [])
    n = len(scalars_leaves)
    prev = 0
    for k, s in enumerate(scalars_saddles):
        sid = n + k
        nodes[sid] = MergeTreeNode(sid, float(s), "saddle", [prev, k + 1])
        prev = sid
    rid = n + len(scalars_saddles)
    nodes[rid] = MergeTreeNode(rid, float(root_scalar), "root", [prev])
    return persistence_pair(MergeTree(orientation, nodes, rid))


def bush_tree(leaf_scalars, root_scalar, orientation=JOIN):
    """All leaves directly under the root."""
    nodes = {}
    for k, s in enumerate(leaf_scalars):
        nodes[k] = MergeTreeNode(k, float(s), "extremum", [])
    rid = len(leaf_scalars)
    nodes[rid] = MergeTreeNode(rid, float(root_scalar), "root",
                               list(range(len(leaf_scalars))))
    return persistence_pair(MergeTree(orientation, nodes, rid))


def random_diagram(rng, n_points, scale=1.0):
    from merge_ted.diagram import PersistenceDiagram
    pts = []
    for _ in range(n_points):
        b = rng.uniform(0.0, 0.8) * scale
        pts.append(Interval(b, b + rng.uniform(0.0, 0.7) * scale))
    return PersistenceDiagram(pts)
