"""Single-linkage agglomeration over the edge list.

Edges are scanned in nondecreasing weight order, ties broken by edge
index.  Only weights are used, never coordinates, so any metric or
non-metric instance works.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instances import Instance


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> int | None:
        """Merge the sets of ``a`` and ``b``; returns the new root or None."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if self.size[ra] < self.size[rb] or (self.size[ra] == self.size[rb] and rb < ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return ra

    def groups(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for v in range(len(self.parent)):
            out.setdefault(self.find(v), []).append(v)
        return sorted(tuple(g) for g in out.values())


@dataclass(frozen=True)
class Clustering:
    partition: tuple[tuple[int, ...], ...]

    @property
    def c_actual(self) -> int:
        return len(self.partition)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.partition]


def sorted_edges(inst: Instance) -> np.ndarray:
    """Edge indices by (weight, index)."""
    return np.argsort(inst.weights, kind="stable")


def _scan(inst: Instance, c: int) -> tuple[UnionFind, int, np.ndarray]:
    if not 1 <= c <= inst.n:
        raise ValueError(f"cluster count must lie in [1, {inst.n}], got {c}")
    uf = UnionFind(inst.n)
    order = sorted_edges(inst)
    i = 0
    while uf.count > c:
        u, v = inst.endpoints(int(order[i]))
        uf.union(u, v)
        i += 1
    return uf, i, order


def cluster(inst: Instance, c: int) -> Clustering:
    uf, _, _ = _scan(inst, c)
    return Clustering(tuple(uf.groups()))


def restricted_cluster(inst: Instance, c: int, min_size: int = 3) -> Clustering:
    """``cluster`` followed by absorbing every part smaller than ``min_size``.

    The edge scan continues where the plain clustering stopped and only
    admits edges with an endpoint in a component below ``min_size``.
    """
    uf, i, order = _scan(inst, c)
    small = sum(1 for g in uf.groups() if len(g) < min_size)
    while small and i < len(order) and uf.count > 1:
        u, v = inst.endpoints(int(order[i]))
        i += 1
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        su, sv = uf.size[ru], uf.size[rv]
        if su >= min_size and sv >= min_size:
            continue
        uf.union(ru, rv)
        merged = su + sv
        small -= (su < min_size) + (sv < min_size) - (merged < min_size)
    return Clustering(tuple(uf.groups()))


@dataclass(frozen=True)
class ClusterNode:
    id: int
    members: tuple[int, ...]
    children: tuple[int, ...] = ()
    merge_rank: int = -1  # -1 for leaves
    edge: int = -1  # edge index that triggered the merge

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class ClusterTree:
    """Leaves ``0..n-1``; internal node ``n + r`` is the ``r``-th merge."""

    nodes: tuple[ClusterNode, ...]
    root: int
    n: int

    def __getitem__(self, i: int) -> ClusterNode:
        return self.nodes[i]

    def internal(self) -> list[ClusterNode]:
        return list(self.nodes[self.n:])

    def postorder(self, start: int | None = None) -> list[ClusterNode]:
        out = []
        stack = [(self.root if start is None else start, False)]
        while stack:
            node_id, done = stack.pop()
            node = self.nodes[node_id]
            if done or node.is_leaf:
                out.append(node)
                continue
            stack.append((node_id, True))
            for ch in reversed(node.children):
                stack.append((ch, False))
        return out


def build_cluster_tree(inst: Instance) -> ClusterTree:
    n = inst.n
    uf = UnionFind(n)
    nodes = [ClusterNode(v, (v,)) for v in range(n)]
    top = list(range(n))  # union-find root -> tree node id
    rank = 0
    for e in sorted_edges(inst):
        if uf.count == 1:
            break
        u, v = inst.endpoints(int(e))
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        a, b = sorted((top[ru], top[rv]), key=lambda t: nodes[t].members[0])
        root = uf.union(ru, rv)
        node = ClusterNode(n + rank, tuple(sorted(nodes[a].members + nodes[b].members)),
                           (a, b), rank, int(e))
        nodes.append(node)
        top[root] = node.id
        rank += 1
    return ClusterTree(tuple(nodes), len(nodes) - 1, n)


def cut_tree_at(tree: ClusterTree, u: int) -> list[ClusterNode]:
    """Maximal tree nodes whose cluster has at most ``u`` vertices."""
    if u < 3:
        raise ValueError(f"size bound must be at least 3, got {u}")
    out = []
    stack = [tree.root]
    while stack:
        node = tree[stack.pop()]
        if node.size <= u:
            out.append(node)
        else:
            stack.extend(reversed(node.children))
    return sorted(out, key=lambda nd: nd.members[0])
