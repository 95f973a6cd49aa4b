"""Merge trees: construction by a union-find sweep, persistence pairing,
simplification, saddle stabilization, subtree extraction, serialization.

A join tree tracks connected components of sub-level sets while the isovalue
sweeps upward; a split tree does the same for super-level sets sweeping
downward. The sweep order is the strict total order (scalar, vertex index)
for join trees and (-scalar, vertex index) for split trees, so equal values
never produce ambiguous merges.

Every operation returns a new tree; inputs are never mutated.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field as dc_field

JOIN = "join"
SPLIT = "split"

_KINDS = ("extremum", "saddle", "root")


@dataclass(frozen=True)
class Interval:
    """Birth-death span of one topological feature; birth <= death."""

    birth: float
    death: float

    def __post_init__(self):
        if not (self.birth <= self.death):
            raise ValueError(f"interval birth {self.birth} exceeds death {self.death}")

    @property
    def persistence(self):
        return self.death - self.birth


def _span(a, b):
    return Interval(min(a, b), max(a, b))


@dataclass
class MergeTreeNode:
    id: int
    scalar: float
    kind: str
    children: list
    interval: Interval | None = None
    pair: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")


@dataclass
class MergeTree:
    orientation: str
    nodes: dict
    root: int

    def __post_init__(self):
        if self.orientation not in (JOIN, SPLIT):
            raise ValueError(f"unknown orientation {self.orientation!r}")

    # -- structure helpers --------------------------------------------------

    def key(self, node_id):
        """Sweep-order key of a node; parents are strictly later than children."""
        n = self.nodes[node_id]
        s = n.scalar if self.orientation == JOIN else -n.scalar
        return (s, node_id)

    def parent_map(self):
        par = {}
        for n in self.nodes.values():
            for c in n.children:
                par[c] = n.id
        return par

    def postorder(self):
        """Node ids, children strictly before parents."""
        out = []
        stack = [(self.root, False)]
        while stack:
            nid, expanded = stack.pop()
            if expanded:
                out.append(nid)
            else:
                stack.append((nid, True))
                for c in self.nodes[nid].children:
                    stack.append((c, False))
        return out

    def extrema(self):
        return [n.id for n in self.nodes.values() if n.kind == "extremum"]

    def saddles(self):
        return [n.id for n in self.nodes.values() if n.kind == "saddle"]

    def is_paired(self):
        return all(n.interval is not None and n.pair is not None
                   for n in self.nodes.values())

    def max_persistence(self):
        root = self.nodes[self.root]
        if root.interval is None:
            raise ValueError("tree is not paired")
        return root.interval.persistence

    def copy(self):
        return MergeTree(self.orientation,
                         {i: copy.deepcopy(n) for i, n in self.nodes.items()},
                         self.root)

    def __eq__(self, other):
        if not isinstance(other, MergeTree):
            return NotImplemented
        return (self.orientation == other.orientation and self.root == other.root
                and self.nodes == other.nodes)

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class StabilizationConfig:
    """Saddle-merging control: epsilon as a fraction of each tree's own max
    persistence, plus an optional flat surcharge on the final distance."""

    epsilon_fraction: float = 0.0
    add_fixed_cost: bool = False
    fixed_cost: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon_fraction <= 1.0:
            raise ValueError(
                f"epsilon_fraction must be in [0,1], got {self.epsilon_fraction}")
        if self.fixed_cost < 0:
            raise ValueError(f"fixed_cost must be >= 0, got {self.fixed_cost}")


# ---------------------------------------------------------------------------
# Construction

def build_merge_tree(graph, orientation):
    """Union-find sweep over the graph's total order.

    A vertex whose already-swept neighbors fall in k >= 2 distinct components
    becomes a saddle merging them; a vertex with no swept neighbor starts a
    component as an extremum; all other (regular) vertices never become tree
    nodes. The last swept vertex is the root.
    """
    n = graph.vertex_count
    if n == 0:
        raise ValueError("empty graph")
    scalars = graph.scalars
    if orientation == JOIN:
        order = sorted(range(n), key=lambda v: (scalars[v], v))
    elif orientation == SPLIT:
        order = sorted(range(n), key=lambda v: (-scalars[v], v))
    else:
        raise ValueError(f"unknown orientation {orientation!r}")

    adj = [[] for _ in range(n)]
    for u, v in graph.edges:
        adj[u].append(v)
        adj[v].append(u)

    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    swept = [False] * n
    head = {}    # union-find root -> id of the component's current top node
    nodes = {}

    def node_key(nid):
        s = scalars[nid] if orientation == JOIN else -scalars[nid]
        return (s, nid)

    for v in order:
        roots = {find(u) for u in adj[v] if swept[u]}
        swept[v] = True
        if not roots:
            nodes[v] = MergeTreeNode(v, float(scalars[v]), "extremum", [])
            head[v] = v
        elif len(roots) == 1:
            parent[v] = roots.pop()
        else:
            children = sorted((head[r] for r in roots), key=node_key)
            nodes[v] = MergeTreeNode(v, float(scalars[v]), "saddle", children)
            rs = list(roots)
            for r in rs:
                del head[r]
                parent[r] = v
            head[v] = v

    components = {find(v) for v in range(n)}
    if len(components) > 1:
        raise ValueError(f"disconnected graph ({len(components)} components)")

    last = order[-1]
    if last in nodes:
        nodes[last].kind = "root"
    else:
        top = head[find(last)]
        nodes[last] = MergeTreeNode(last, float(scalars[last]), "root", [top])
    return MergeTree(orientation, nodes, last)


def persistence_pair(tree):
    """Pair extrema with the saddles that kill them (elder rule).

    At each saddle the component whose extremum was born first survives;
    every other merging component's extremum dies there. A saddle merging k
    components records the interval of its highest-persistence merge event
    and points at that extremum; the k-1 dying extrema all point back at the
    saddle with their own intervals. The overall oldest extremum pairs with
    the root and both carry the full (global min, global max) span.
    """
    t = tree.copy()
    survivor = {}
    for nid in t.postorder():
        node = t.nodes[nid]
        if not node.children:
            survivor[nid] = nid
            if node.kind == "root":    # single-node tree
                node.interval = _span(node.scalar, node.scalar)
                node.pair = nid
            continue
        cands = sorted((survivor[c] for c in node.children), key=t.key)
        oldest = cands[0]
        dying = cands[1:]
        events = []
        for e in dying:
            iv = _span(t.nodes[e].scalar, node.scalar)
            t.nodes[e].pair = nid
            t.nodes[e].interval = iv
            events.append((e, iv))
        if node.kind == "root":
            iv = _span(t.nodes[oldest].scalar, node.scalar)
            t.nodes[oldest].pair = nid
            t.nodes[oldest].interval = iv
            node.interval = iv
            node.pair = oldest
        else:
            rep, rep_iv = max(events, key=lambda ei: (ei[1].persistence, -ei[0]))
            node.interval = rep_iv
            node.pair = rep
            survivor[nid] = oldest
    return t


# ---------------------------------------------------------------------------
# Simplification and stabilization

def simplify(tree, threshold):
    """Cancel low-persistence pairs below threshold * max persistence.

    Repeatedly removes the lowest-persistence leaf whose pairing saddle is its
    own parent (the global minimum pair always has this shape), splicing the
    saddle away once it drops to a single child. The (oldest extremum, root)
    pair is never cancelled. The surviving pairing is untouched: cancelling a
    minimum pair does not change any elder-rule outcome elsewhere.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    t = tree.copy()
    if not t.is_paired():
        raise ValueError("simplify requires a paired tree")
    cutoff = threshold * t.max_persistence()
    while True:
        par = t.parent_map()
        root = t.nodes[t.root]
        best = None
        for n in t.nodes.values():
            if n.children or n.id == root.pair or n.id == t.root:
                continue
            if n.pair != par[n.id]:
                continue
            p = n.interval.persistence
            if p < cutoff and (best is None or (p, t.key(n.id)) < best[0]):
                best = ((p, t.key(n.id)), n.id)
        if best is None:
            return t
        leaf = best[1]
        s = par[leaf]
        saddle = t.nodes[s]
        saddle.children.remove(leaf)
        del t.nodes[leaf]
        if saddle.kind == "saddle" and len(saddle.children) == 1:
            only = saddle.children[0]
            gp = t.nodes[par[s]]
            gp.children[gp.children.index(s)] = only
            del t.nodes[s]


def stabilize(tree, config):
    """Merge near-level saddles into their parents, bottom-up, to a fixpoint.

    A saddle whose scalar gap to its parent (saddle or root) is strictly below
    epsilon_fraction * max persistence of this tree is absorbed: its children
    move up. The merged multi-saddle takes the id, interval, and pair partner
    of its highest-persistence member but keeps the absorbing node's scalar,
    which preserves parent/child ordering and makes the operation idempotent
    at a fixed epsilon. Extrema keep their original intervals; their pair
    pointers are remapped onto the surviving node.
    """
    t = tree.copy()
    if not t.is_paired():
        raise ValueError("stabilize requires a paired tree")
    eps_abs = config.epsilon_fraction * t.max_persistence()

    # member bookkeeping: surviving node id -> [(member id, interval, pair)]
    members = {s: [(s, t.nodes[s].interval, t.nodes[s].pair)] for s in t.saddles()}
    absorbed_by_root = []

    while True:
        par = t.parent_map()
        depth = {t.root: 0}
        for nid in reversed(t.postorder()):    # parents before children
            for c in t.nodes[nid].children:
                depth[c] = depth[nid] + 1
        cand = sorted(t.saddles(), key=lambda s: (-depth[s], t.key(s)))
        merged = None
        for s in cand:
            p = par[s]
            if abs(t.nodes[p].scalar - t.nodes[s].scalar) < eps_abs:
                merged = (s, p)
                break
        if merged is None:
            break
        s, p = merged
        pnode = t.nodes[p]
        pnode.children.remove(s)
        pnode.children.extend(t.nodes[s].children)
        if pnode.kind == "saddle":
            members[p].extend(members.pop(s))
        else:
            absorbed_by_root.extend(members.pop(s))
        del t.nodes[s]

    pair_alias = {}
    struct_alias = {}
    for sid, mems in members.items():
        if len(mems) == 1:
            continue
        rep_id, rep_iv, rep_pair = max(
            mems, key=lambda m: (m[1].persistence, -m[0]))
        for mid, _, _ in mems:
            pair_alias[mid] = rep_id
        node = t.nodes[sid]
        node.interval = rep_iv
        node.pair = rep_pair
        if rep_id != sid:
            struct_alias[sid] = rep_id
    for mid, _, _ in absorbed_by_root:
        pair_alias[mid] = t.root

    if not pair_alias and not struct_alias:
        return t

    new_nodes = {}
    for nid, node in t.nodes.items():
        node.id = struct_alias.get(nid, nid)
        node.children = [struct_alias.get(c, c) for c in node.children]
        if node.pair in pair_alias:
            node.pair = pair_alias[node.pair]
        new_nodes[node.id] = node
    return MergeTree(t.orientation, new_nodes, struct_alias.get(t.root, t.root))


def extract_subtrees(tree, min_persistence, min_scalar):
    """Maximal subtrees strong enough and high (split) / low (join) enough.

    Walking down from the root, a node qualifies when its pair interval has
    persistence >= min_persistence and its scalar passes min_scalar (>= for
    split trees, whose subtrees live in the super-level set of their root
    scalar; <= for join trees). The first qualifying node on each path is
    emitted as a standalone re-paired tree and the walk does not descend
    further, so the results are disjoint.
    """
    if not tree.is_paired():
        raise ValueError("extract_subtrees requires a paired tree")

    def qualifies(node):
        if node.interval.persistence < min_persistence:
            return False
        if tree.orientation == SPLIT:
            return node.scalar >= min_scalar
        return node.scalar <= min_scalar

    out = []
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        node = tree.nodes[nid]
        if qualifies(node):
            sub_nodes = {}
            inner = [nid]
            while inner:
                k = inner.pop()
                sub_nodes[k] = copy.deepcopy(tree.nodes[k])
                inner.extend(tree.nodes[k].children)
            sub_nodes[nid].kind = "root"
            sub = MergeTree(tree.orientation, sub_nodes, nid)
            out.append(persistence_pair(sub))
        else:
            stack.extend(reversed(node.children))
    out.sort(key=lambda s: s.root)
    return out


# ---------------------------------------------------------------------------
# Serialization

def serialize_tree(tree):
    """One header line, then one line per node, sorted by id. Lossless."""
    if not tree.is_paired():
        raise ValueError("serialize requires a paired tree")
    lines = [f"mergetree {tree.orientation} root={tree.root}"]
    for nid in sorted(tree.nodes):
        n = tree.nodes[nid]
        ch = ",".join(str(c) for c in n.children)
        lines.append(
            f"node {n.id} {repr(n.scalar)} {n.kind} {n.pair} "
            f"{repr(n.interval.birth)} {repr(n.interval.death)} children={ch}")
    return "\n".join(lines) + "\n"


def deserialize_tree(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty tree document")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "mergetree" or not head[2].startswith("root="):
        raise ValueError(f"malformed header: {lines[0]!r}")
    orientation = head[1]
    root = int(head[2][len("root="):])
    nodes = {}
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != 8 or toks[0] != "node" or not toks[7].startswith("children="):
            raise ValueError(f"malformed record: {ln!r}")
        try:
            nid = int(toks[1])
            scalar = float(toks[2])
            kind = toks[3]
            pair = int(toks[4])
            birth = float(toks[5])
            death = float(toks[6])
        except ValueError:
            raise ValueError(f"malformed record: {ln!r}") from None
        ch_str = toks[7][len("children="):]
        children = [int(c) for c in ch_str.split(",")] if ch_str else []
        if nid in nodes:
            raise ValueError(f"duplicate node id {nid}")
        nodes[nid] = MergeTreeNode(nid, scalar, kind, children,
                                   Interval(birth, death), pair)
    if root not in nodes:
        raise ValueError(f"root {root} not among nodes")
    for n in nodes.values():
        for c in n.children:
            if c not in nodes:
                raise ValueError(f"dangling child reference {c} on node {n.id}")
        if n.pair not in nodes:
            raise ValueError(f"missing pair id {n.pair} on node {n.id}")
    # reachability + single-parent + acyclicity
    seen = set()
    stack = [root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise ValueError(f"cycle detected at node {nid}")
        seen.add(nid)
        stack.extend(nodes[nid].children)
    if seen != set(nodes):
        raise ValueError("unreachable nodes present")
    parents = {}
    for n in nodes.values():
        for c in n.children:
            if c in parents:
                raise ValueError(f"node {c} has multiple parents")
            parents[c] = n.id
    return MergeTree(orientation, nodes, root)


def save_tree(tree, path):
    with open(path, "w") as fh:
        fh.write(serialize_tree(tree))


def load_tree(path):
    with open(path) as fh:
        return deserialize_tree(fh.read())
