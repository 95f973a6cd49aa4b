"""Constrained tree edit distance between merge trees, with the optimal
node mapping.

The distance is computed bottom-up over subtree pairs. For a pair of subtrees
the minimum is taken over three routes: map the whole first subtree into one
child subtree of the second (inserting everything else), the symmetric route,
or relabel the two roots and resolve their child forests. Forest resolution
again has three routes, the third being a minimum-cost assignment between
child subtrees with per-tree deletion and insertion slots (see matching).
The tables are kept so the optimal mapping can be read back by following the
recorded argmin choices from the root pair.

Ties prefer the relabel/matching route, then the lowest child index, so the
returned mapping is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .cost import CostModel, delete_cost, edit_cost, insert_cost, relabel_cost
from .matching import build_forest_matrix, min_cost_assignment
from .mergetree import MergeTree, StabilizationConfig, stabilize

_INF = float("inf")

# tree-table choice codes
_T_RELABEL, _T_INTO2, _T_INTO1 = 0, 1, 2
# forest-table choice codes
_F_EMPTY, _F_INS_ALL, _F_DEL_ALL, _F_MATCH, _F_INTO2, _F_INTO1 = 0, 1, 2, 3, 4, 5


@dataclass
class EditMapping:
    """Node correspondence realizing a distance: matched id pairs plus the
    ids deleted from the first tree and inserted from the second."""

    pairs: list
    deleted: list
    inserted: list


@dataclass
class TedResult:
    distance: float
    mapping: EditMapping
    cost_model: CostModel
    epsilon_used: float
    stabilization_surcharge: float
    stabilized_t1: MergeTree | None
    stabilized_t2: MergeTree | None


class _Indexed:
    """Postorder view of a tree: positions, children, intervals, theta costs."""

    def __init__(self, tree, model):
        self.tree = tree
        self.ids = tree.postorder()
        self.pos = {nid: k for k, nid in enumerate(self.ids)}
        self.n = len(self.ids)
        self.children = [
            np.array([self.pos[c] for c in tree.nodes[nid].children], dtype=int)
            for nid in self.ids
        ]
        self.births = np.array(
            [tree.nodes[nid].interval.birth for nid in self.ids])
        self.deaths = np.array(
            [tree.nodes[nid].interval.death for nid in self.ids])
        pers = self.deaths - self.births
        self.gap = pers / 2.0 if model is CostModel.WINF else pers.copy()
        # theta_tree[k] = cost of erasing the whole subtree at k;
        # theta_forest[k] = same for its children forest
        self.theta_forest = np.zeros(self.n)
        self.theta_tree = np.zeros(self.n)
        for k in range(self.n):
            if len(self.children[k]):
                self.theta_forest[k] = self.theta_tree[self.children[k]].sum()
            self.theta_tree[k] = self.theta_forest[k] + self.gap[k]


def _relabel_matrix(a, b, model):
    db = np.abs(b.births[None, :] - a.births[:, None])
    dd = np.abs(b.deaths[None, :] - a.deaths[:, None])
    if model is CostModel.WINF:
        return np.minimum(np.maximum(db, dd), a.gap[:, None] + b.gap[None, :])
    return np.minimum(db + dd, a.gap[:, None] + b.gap[None, :])


def ted(t1, t2, model, stab=None):
    """Distance between two merge trees (either may be None for the empty tree)."""
    stab = stab or StabilizationConfig()
    if t1 is not None and t2 is not None and t1.orientation != t2.orientation:
        raise ValueError(
            f"orientation mismatch: {t1.orientation} vs {t2.orientation}")
    for t in (t1, t2):
        if t is not None and not t.is_paired():
            raise ValueError("ted requires paired trees")

    merged = False
    if stab.epsilon_fraction > 0.0:
        if t1 is not None:
            s1 = stabilize(t1, stab)
            merged |= len(s1) < len(t1)
            t1 = s1
        if t2 is not None:
            s2 = stabilize(t2, stab)
            merged |= len(s2) < len(t2)
            t2 = s2
    surcharge = stab.fixed_cost if (stab.add_fixed_cost and merged) else 0.0

    if t1 is None and t2 is None:
        return TedResult(surcharge, EditMapping([], [], []), model,
                         stab.epsilon_fraction, surcharge, None, None)
    if t2 is None:
        a = _Indexed(t1, model)
        dist = float(a.theta_tree[a.pos[t1.root]])
        mapping = EditMapping([], sorted(t1.nodes), [])
        return TedResult(dist + surcharge, mapping, model,
                         stab.epsilon_fraction, surcharge, t1, None)
    if t1 is None:
        b = _Indexed(t2, model)
        dist = float(b.theta_tree[b.pos[t2.root]])
        mapping = EditMapping([], [], sorted(t2.nodes))
        return TedResult(dist + surcharge, mapping, model,
                         stab.epsilon_fraction, surcharge, None, t2)

    a = _Indexed(t1, model)
    b = _Indexed(t2, model)
    R = _relabel_matrix(a, b, model)

    n1, n2 = a.n, b.n
    Dt = np.zeros((n1, n2))
    Df = np.zeros((n1, n2))
    tcode = np.zeros((n1, n2), dtype=np.int8)
    tparam = np.zeros((n1, n2), dtype=np.int32)
    fcode = np.zeros((n1, n2), dtype=np.int8)
    fparam = np.zeros((n1, n2), dtype=np.int32)
    fperm = {}

    for i in range(n1):
        c1 = a.children[i]
        m1 = len(c1)
        for j in range(n2):
            c2 = b.children[j]
            m2 = len(c2)

            # ---- forest table ----
            if m1 == 0 and m2 == 0:
                Df[i, j] = 0.0
                fcode[i, j] = _F_EMPTY
            elif m1 == 0:
                Df[i, j] = b.theta_forest[j]
                fcode[i, j] = _F_INS_ALL
            elif m2 == 0:
                Df[i, j] = a.theta_forest[i]
                fcode[i, j] = _F_DEL_ALL
            else:
                if m1 == 1 and m2 == 1:
                    s, t = c1[0], c2[0]
                    direct = Dt[s, t]
                    split_cost = a.theta_tree[s] + b.theta_tree[t]
                    if direct <= split_cost:
                        match_cost = direct
                        perm = np.array([0, 1])
                    else:
                        match_cost = split_cost
                        perm = np.array([1, 0])
                else:
                    mat = build_forest_matrix(
                        Dt[np.ix_(c1, c2)], a.theta_tree[c1], b.theta_tree[c2])
                    perm, match_cost = min_cost_assignment(mat)
                iv2 = Df[i, c2] - b.theta_forest[c2]
                ta = int(np.argmin(iv2))
                into2 = b.theta_forest[j] + iv2[ta]
                iv1 = Df[c1, j] - a.theta_forest[c1]
                tb = int(np.argmin(iv1))
                into1 = a.theta_forest[i] + iv1[tb]
                if match_cost <= into2 and match_cost <= into1:
                    Df[i, j] = match_cost
                    fcode[i, j] = _F_MATCH
                    fperm[(i, j)] = perm
                elif into2 <= into1:
                    Df[i, j] = into2
                    fcode[i, j] = _F_INTO2
                    fparam[i, j] = c2[ta]
                else:
                    Df[i, j] = into1
                    fcode[i, j] = _F_INTO1
                    fparam[i, j] = c1[tb]

            # ---- tree table ----
            rel = Df[i, j] + R[i, j]
            if m2:
                iv2 = Dt[i, c2] - b.theta_tree[c2]
                ta = int(np.argmin(iv2))
                into2 = b.theta_tree[j] + iv2[ta]
            else:
                into2 = _INF
            if m1:
                iv1 = Dt[c1, j] - a.theta_tree[c1]
                tb = int(np.argmin(iv1))
                into1 = a.theta_tree[i] + iv1[tb]
            else:
                into1 = _INF
            if rel <= into2 and rel <= into1:
                Dt[i, j] = rel
                tcode[i, j] = _T_RELABEL
            elif into2 <= into1:
                Dt[i, j] = into2
                tcode[i, j] = _T_INTO2
                tparam[i, j] = c2[ta]
            else:
                Dt[i, j] = into1
                tcode[i, j] = _T_INTO1
                tparam[i, j] = c1[tb]

    r1, r2 = a.pos[t1.root], b.pos[t2.root]
    distance = float(Dt[r1, r2])

    # ---- backtrack ----
    pairs = []
    stack = [(True, r1, r2)]
    while stack:
        is_tree, i, j = stack.pop()
        if is_tree:
            code = tcode[i, j]
            if code == _T_RELABEL:
                pairs.append((a.ids[i], b.ids[j]))
                stack.append((False, i, j))
            elif code == _T_INTO2:
                stack.append((True, i, tparam[i, j]))
            else:
                stack.append((True, tparam[i, j], j))
        else:
            code = fcode[i, j]
            if code == _F_MATCH:
                c1, c2 = a.children[i], b.children[j]
                perm = fperm[(i, j)]
                for s in range(len(c1)):
                    col = perm[s]
                    if col < len(c2):
                        stack.append((True, c1[s], c2[col]))
            elif code == _F_INTO2:
                stack.append((False, i, fparam[i, j]))
            elif code == _F_INTO1:
                stack.append((False, fparam[i, j], j))
            # EMPTY / INS_ALL / DEL_ALL leave nothing matched

    matched1 = {p for p, _ in pairs}
    matched2 = {q for _, q in pairs}
    mapping = EditMapping(
        sorted(pairs),
        sorted(set(t1.nodes) - matched1),
        sorted(set(t2.nodes) - matched2))
    return TedResult(distance + surcharge, mapping, model,
                     stab.epsilon_fraction, surcharge, t1, t2)


# ---------------------------------------------------------------------------
# Mapping cost and validity

def _node_ids(tree):
    return set() if tree is None else set(tree.nodes)


def mapping_cost(mapping, t1, t2, model):
    """Total edit cost of the mapping; requires full coverage of both trees."""
    ids1, ids2 = _node_ids(t1), _node_ids(t2)
    used1 = [p for p, _ in mapping.pairs] + list(mapping.deleted)
    used2 = [q for _, q in mapping.pairs] + list(mapping.inserted)
    if sorted(used1) != sorted(ids1) or sorted(used2) != sorted(ids2):
        raise ValueError("mapping does not cover both trees exactly once")
    total = 0.0
    for p, q in mapping.pairs:
        total += relabel_cost(model, t1.nodes[p].interval, t2.nodes[q].interval)
    for p in mapping.deleted:
        total += delete_cost(model, t1.nodes[p].interval)
    for q in mapping.inserted:
        total += insert_cost(model, t2.nodes[q].interval)
    return total


def _ancestor_sets(tree):
    anc = {tree.root: set()}
    for nid in reversed(tree.postorder()):
        node = tree.nodes[nid]
        for c in node.children:
            anc[c] = anc[nid] | {nid}
    return anc


def _depths_parents(tree):
    par = tree.parent_map()
    depth = {tree.root: 0}
    for nid in reversed(tree.postorder()):
        for c in tree.nodes[nid].children:
            depth[c] = depth[nid] + 1
    return par, depth


def _lca(par, depth, u, v):
    while depth[u] > depth[v]:
        u = par[u]
    while depth[v] > depth[u]:
        v = par[v]
    while u != v:
        u, v = par[u], par[v]
    return u


def validate_mapping(mapping, t1, t2):
    """Violations of the mapping conditions; empty when the mapping is valid.

    Checks coverage of both node sets, one-to-one-ness, ancestor ordering for
    every pair of matched pairs, and the least-common-ancestor condition for
    every triple.
    """
    out = []
    ids1, ids2 = _node_ids(t1), _node_ids(t2)
    used1 = [p for p, _ in mapping.pairs] + list(mapping.deleted)
    used2 = [q for _, q in mapping.pairs] + list(mapping.inserted)
    if len(set(used1)) != len(used1) or len(set(used2)) != len(used2):
        out.append("one-to-one: some node id appears twice")
    if set(used1) != ids1:
        out.append(f"coverage: first tree ids {sorted(ids1 ^ set(used1))}")
    if set(used2) != ids2:
        out.append(f"coverage: second tree ids {sorted(ids2 ^ set(used2))}")
    if out or not mapping.pairs:
        return out

    anc1, anc2 = _ancestor_sets(t1), _ancestor_sets(t2)
    pairs = mapping.pairs
    for x in range(len(pairs)):
        i1, j1 = pairs[x]
        for y in range(x + 1, len(pairs)):
            i2, j2 = pairs[y]
            if (i1 in anc1[i2]) != (j1 in anc2[j2]) or \
               (i2 in anc1[i1]) != (j2 in anc2[j1]):
                out.append(f"ancestor-ordering: pairs ({i1},{j1}) and ({i2},{j2})")

    par1, dep1 = _depths_parents(t1)
    par2, dep2 = _depths_parents(t2)
    for x in range(len(pairs)):
        for y in range(x + 1, len(pairs)):
            lca1 = _lca(par1, dep1, pairs[x][0], pairs[y][0])
            lca2 = _lca(par2, dep2, pairs[x][1], pairs[y][1])
            for z in range(len(pairs)):
                if z == x or z == y:
                    continue
                i3, j3 = pairs[z]
                left = lca1 != i3 and lca1 in anc1[i3]
                right = lca2 != j3 and lca2 in anc2[j3]
                if left != right:
                    out.append(
                        f"constrained-lca: pairs {pairs[x]}, {pairs[y]}, {pairs[z]}")
    return out


# ---------------------------------------------------------------------------
# Mapping export

def mapping_to_json(result):
    return json.dumps({
        "pairs": [[int(p), int(q)] for p, q in result.mapping.pairs],
        "deleted": [int(p) for p in result.mapping.deleted],
        "inserted": [int(q) for q in result.mapping.inserted],
        "distance": result.distance,
        "cost_model": result.cost_model.value,
        "epsilon": result.epsilon_used,
    }, indent=2)


def mapping_from_json(text):
    doc = json.loads(text)
    return EditMapping(
        [(int(p), int(q)) for p, q in doc["pairs"]],
        [int(p) for p in doc["deleted"]],
        [int(q) for q in doc["inserted"]])
