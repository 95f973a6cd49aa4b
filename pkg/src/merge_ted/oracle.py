"""Brute-force reference for the edit distance on tiny trees.

Enumerates every one-to-one correspondence between node sets (first tree in
preorder, each node matched to a second-tree node or left unmatched), prunes
ancestor-ordering violations as soon as they appear, enforces the
least-common-ancestor condition incrementally, and returns the cheapest
complete mapping. Exponential by nature; guarded to at most 8 nodes a side.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cost import delete_cost, insert_cost, relabel_cost
from .ted import EditMapping, _ancestor_sets, _depths_parents, _lca

MAX_NODES = 8


@dataclass
class OracleResult:
    distance: float
    witness: EditMapping
    mappings_enumerated: int


class _Tables:
    def __init__(self, tree):
        self.ids = []
        stack = [tree.root]
        while stack:    # preorder
            nid = stack.pop()
            self.ids.append(nid)
            stack.extend(reversed(tree.nodes[nid].children))
        self.intervals = [tree.nodes[nid].interval for nid in self.ids]
        anc = _ancestor_sets(tree)
        pos = {nid: k for k, nid in enumerate(self.ids)}
        n = len(self.ids)
        self.anc = [[False] * n for _ in range(n)]
        for nid, ancestors in anc.items():
            for p in ancestors:
                self.anc[pos[p]][pos[nid]] = True
        par, dep = _depths_parents(tree)
        self.lca = [[0] * n for _ in range(n)]
        for x in range(n):
            for y in range(n):
                self.lca[x][y] = pos[_lca(par, dep, self.ids[x], self.ids[y])]

    def proper_anc(self, x, y):
        return x != y and self.anc[x][y]


def _enumerate_min(t1, t2, model, constrained):
    a, b = _Tables(t1), _Tables(t2)
    n1, n2 = len(a.ids), len(b.ids)
    if n1 > MAX_NODES or n2 > MAX_NODES:
        raise ValueError(
            f"oracle size guard: {n1} and {n2} nodes exceed {MAX_NODES}")

    dels = [delete_cost(model, iv) for iv in a.intervals]
    inss = [insert_cost(model, iv) for iv in b.intervals]
    reps = [[relabel_cost(model, p, q) for q in b.intervals] for p in a.intervals]
    ins_total = sum(inss)

    best = [float("inf"), None]
    count = [0]
    assign = [-1] * n1
    used = [False] * n2
    matched = []    # list of (x, y) position pairs, in assignment order

    def ok_pairwise(x, y):
        for (px, py) in matched:
            if a.anc[px][x] != b.anc[py][y] or a.anc[x][px] != b.anc[y][py]:
                return False
        return True

    def ok_lca(x, y):
        m = len(matched)
        for u in range(m):
            pu = matched[u]
            for v in range(u + 1, m):
                pv = matched[v]
                if a.proper_anc(a.lca[pu[0]][pv[0]], x) != \
                   b.proper_anc(b.lca[pu[1]][pv[1]], y):
                    return False
                if a.proper_anc(a.lca[pu[0]][x], pv[0]) != \
                   b.proper_anc(b.lca[pu[1]][y], pv[1]):
                    return False
                if a.proper_anc(a.lca[pv[0]][x], pu[0]) != \
                   b.proper_anc(b.lca[pv[1]][y], pu[1]):
                    return False
        return True

    def dfs(k, partial):
        if partial >= best[0]:
            return
        if k == n1:
            total = partial + ins_total - sum(inss[j] for j in range(n2) if used[j])
            count[0] += 1
            if total < best[0]:
                best[0] = total
                best[1] = assign.copy()
            return
        assign[k] = -1
        dfs(k + 1, partial + dels[k])
        for j in range(n2):
            if used[j] or not ok_pairwise(k, j):
                continue
            if constrained and not ok_lca(k, j):
                continue
            assign[k] = j
            used[j] = True
            matched.append((k, j))
            dfs(k + 1, partial + reps[k][j])
            matched.pop()
            used[j] = False
        assign[k] = -1

    dfs(0, 0.0)

    sol = best[1]
    pairs = [(a.ids[x], b.ids[sol[x]]) for x in range(n1) if sol[x] >= 0]
    matched2 = {b.ids[sol[x]] for x in range(n1) if sol[x] >= 0}
    witness = EditMapping(
        sorted(pairs),
        sorted(a.ids[x] for x in range(n1) if sol[x] < 0),
        sorted(set(b.ids) - matched2))
    return OracleResult(best[0], witness, count[0])


def brute_force_dc(t1, t2, model):
    """Minimum cost over all constrained edit mappings (lca condition enforced)."""
    if t1 is None and t2 is None:
        return OracleResult(0.0, EditMapping([], [], []), 1)
    if t2 is None:
        d = sum(delete_cost(model, n.interval) for n in t1.nodes.values())
        return OracleResult(d, EditMapping([], sorted(t1.nodes), []), 1)
    if t1 is None:
        d = sum(insert_cost(model, n.interval) for n in t2.nodes.values())
        return OracleResult(d, EditMapping([], [], sorted(t2.nodes)), 1)
    return _enumerate_min(t1, t2, model, constrained=True)


def brute_force_unconstrained(t1, t2, model):
    """Minimum cost over one-to-one, ancestor-ordered mappings only (no lca
    condition): the looser class, never above the constrained minimum."""
    return _enumerate_min(t1, t2, model, constrained=False)


def tree_erase_cost(tree, model):
    """Cost of deleting (or inserting) every node of the tree."""
    return sum(delete_cost(model, n.interval) for n in tree.nodes.values())


def brute_force_restricted(forest1, forest2, model):
    """Minimum restricted-mapping cost between two forests of small trees.

    Enumerates every injective partial assignment of first-forest trees onto
    second-forest trees; matched trees compare via brute_force_dc, unmatched
    trees are erased whole.
    """
    n1, n2 = len(forest1), len(forest2)
    dc = [[brute_force_dc(s, t, model).distance for t in forest2] for s in forest1]
    dels = [tree_erase_cost(s, model) for s in forest1]
    inss = [tree_erase_cost(t, model) for t in forest2]
    best = [float("inf")]
    used = [False] * n2

    def rec(s, acc):
        if acc >= best[0]:
            return
        if s == n1:
            total = acc + sum(inss[t] for t in range(n2) if not used[t])
            best[0] = min(best[0], total)
            return
        rec(s + 1, acc + dels[s])
        for t in range(n2):
            if not used[t]:
                used[t] = True
                rec(s + 1, acc + dc[s][t])
                used[t] = False

    rec(0, 0.0)
    return best[0]
