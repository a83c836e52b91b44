"""Deterministic network simulator with exact real-value accounting.

Costs are counted by replaying the relay messages of each primitive, one
unit per real value per edge traversal:

=============  ==========================================
topology       cost of broadcasting one real from ``o``
=============  ==========================================
star           ``N - 1``, plus 1 when ``o`` is a leaf
tree           ``depth(o) + N - 1``
full           ``N - 1``
general        ``M`` (each edge carries the flood once)
=============  ==========================================

A tree reduction (max or sum) costs ``N - 1`` reals up and ``N - 1`` down.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np


class TopologyKind(str, Enum):
    STAR = "star"
    TREE = "tree"
    GENERAL = "general"
    FULL = "full"


class Strategy(str, Enum):
    """How the per-node election scalars reach everyone."""

    NAIVE_FLOOD = "flood"
    TREE_REDUCE = "tree"
    STAR_COORDINATOR = "star"


class MessageKind(str, Enum):
    GRAD_SCALAR = "grad_scalar"
    PARTIAL_SUM = "partial_sum"
    ATOM_PAYLOAD = "atom_payload"
    INDEX_SCALAR = "index_scalar"
    REDUCE_SCALAR = "reduce_scalar"
    STEP_SCALAR = "step_scalar"


@dataclass
class Topology:
    kind: TopologyKind
    n_nodes: int
    edges: list
    root: int = 0
    branching: Optional[int] = None

    def __post_init__(self):
        self.adjacency = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            self.adjacency[u].append(v)
            self.adjacency[v].append(u)
        for nbrs in self.adjacency:
            nbrs.sort()
        self.parent, self.depth, self.order = _bfs_tree(self.adjacency, self.root)
        if len(self.order) != self.n_nodes:
            raise ValueError("topology is not connected")

    @property
    def M(self) -> int:
        return len(self.edges)

    @property
    def N(self) -> int:
        return self.n_nodes

    def children(self, i: int) -> list:
        return [c for c in self.adjacency[i] if self.parent[c] == i]

    def hops_to_root(self, i: int) -> int:
        return self.depth[i]

    def broadcast_cost(self, origin: int) -> int:
        """Closed-form per-real broadcast cost (see module docstring)."""
        n = self.n_nodes
        if self.kind is TopologyKind.STAR:
            return (n - 1) + (1 if origin != self.root and n > 1 else 0)
        if self.kind is TopologyKind.TREE:
            return self.depth[origin] + n - 1
        if self.kind is TopologyKind.FULL:
            return n - 1
        return self.M

    def describe(self) -> str:
        if self.kind is TopologyKind.TREE:
            return f"tree:{self.branching}:{self.n_nodes}"
        return f"{self.kind.value}:{self.n_nodes}"


def _bfs_tree(adjacency, root):
    n = len(adjacency)
    parent = [-1] * n
    depth = [0] * n
    if n == 0:
        return parent, depth, []
    seen = {root}
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                depth[v] = depth[u] + 1
                order.append(v)
                queue.append(v)
    return parent, depth, order


def build_topology(kind, n_nodes: int, seed: int = 0, branching: int = 2,
                   edge_prob: Optional[float] = None) -> Topology:
    """Star (hub 0), complete ``branching``-ary tree, connected random graph, or clique."""
    kind = TopologyKind(kind)
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if kind is TopologyKind.STAR:
        edges = [(0, i) for i in range(1, n_nodes)]
    elif kind is TopologyKind.TREE:
        if branching < 1:
            raise ValueError("branching must be positive")
        edges = [((i - 1) // branching, i) for i in range(1, n_nodes)]
    elif kind is TopologyKind.FULL:
        edges = [(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes)]
    else:
        edges = _connected_gnp(n_nodes, seed, edge_prob)
    return Topology(kind, n_nodes, edges, 0, branching if kind is TopologyKind.TREE else None)


def _connected_gnp(n, seed, p):
    if n == 1:
        return []
    if p is None:
        p = min(1.0, 2.0 * math.log(n) / n)
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    while True:
        keep = rng.random(len(pairs)) < p
        edges = [e for e, k in zip(pairs, keep) if k]
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        if len(_bfs_tree(adj, 0)[2]) == n:
            return edges


def parse_topology(spec: str) -> Topology:
    """``star:N``, ``tree:branching:N``, ``general:N:seed`` or ``full:N``."""
    parts = spec.strip().split(":")
    try:
        kind = TopologyKind(parts[0])
        if kind is TopologyKind.TREE:
            if len(parts) != 3:
                raise ValueError
            return build_topology(kind, int(parts[2]), branching=int(parts[1]))
        if kind is TopologyKind.GENERAL:
            if len(parts) != 3:
                raise ValueError
            return build_topology(kind, int(parts[1]), seed=int(parts[2]))
        if len(parts) != 2:
            raise ValueError
        return build_topology(kind, int(parts[1]))
    except ValueError:
        raise ValueError(f"bad topology spec {spec!r}") from None


# ---------------------------------------------------------------- accounting


@dataclass(frozen=True)
class LedgerEntry:
    iteration: int
    kind: MessageKind
    reals: int


@dataclass
class MessageLedger:
    """Append-only count of real values sent."""

    entries: list = field(default_factory=list)
    total: int = 0

    def charge(self, iteration: int, kind, reals: int) -> None:
        if int(reals) != reals or reals < 0:
            raise ValueError(f"real count must be a nonnegative integer, got {reals}")
        self.entries.append(LedgerEntry(iteration, MessageKind(kind), int(reals)))
        self.total += int(reals)

    def iteration_total(self, iteration: int) -> int:
        return sum(e.reals for e in self.entries if e.iteration == iteration)

    def per_iteration(self) -> dict:
        out: dict = {}
        for e in self.entries:
            out[e.iteration] = out.get(e.iteration, 0) + e.reals
        return out

    def by_kind(self) -> dict:
        out: dict = {}
        for e in self.entries:
            out[e.kind] = out.get(e.kind, 0) + e.reals
        return out


# ---------------------------------------------------------------- primitives


def broadcast_messages(topo: Topology, origin: int) -> list:
    """Edge traversals ``(src, dst)`` that deliver one value from ``origin`` to all."""
    _check_node(topo, origin)
    n = topo.n_nodes
    if n == 1:
        return []
    if topo.kind is TopologyKind.FULL:
        return [(origin, v) for v in range(n) if v != origin]
    if topo.kind in (TopologyKind.STAR, TopologyKind.TREE):
        msgs = []
        u = origin
        while u != topo.root:
            msgs.append((u, topo.parent[u]))
            u = topo.parent[u]
        # the root floods the whole tree, including back toward the origin
        for v in topo.order[1:]:
            msgs.append((topo.parent[v], v))
        return msgs
    # fully distributed flood: every edge is used exactly once
    used = set()
    msgs = []
    informed = {origin}
    queue = deque([origin])
    while queue:
        u = queue.popleft()
        for v in topo.adjacency[u]:
            e = (min(u, v), max(u, v))
            if e in used:
                continue
            used.add(e)
            msgs.append((u, v))
            if v not in informed:
                informed.add(v)
                queue.append(v)
    return msgs


def _reduce_tree(topo: Topology, strategy: Strategy):
    if strategy is Strategy.STAR_COORDINATOR and topo.kind is not TopologyKind.STAR:
        raise ValueError("the star-coordinator strategy needs a star topology")
    return topo.parent, topo.order


def broadcast(ledger: MessageLedger, topo: Topology, origin: int, real_count: int,
              iteration: int, kind=MessageKind.ATOM_PAYLOAD) -> int:
    """Deliver ``real_count`` reals from ``origin`` to every node; returns the cost."""
    if real_count < 0:
        raise ValueError("real_count must be nonnegative")
    msgs = broadcast_messages(topo, origin)
    reached = {origin} | {v for _, v in msgs}
    if len(reached) != topo.n_nodes:
        raise RuntimeError("broadcast did not reach every node")
    cost = len(msgs) * real_count
    ledger.charge(iteration, kind, cost)
    return cost


def _flood_all(ledger, topo, iteration, kind):
    cost = sum(len(broadcast_messages(topo, i)) for i in range(topo.n_nodes))
    ledger.charge(iteration, kind, cost)


def _tree_messages(topo: Topology, strategy: Strategy) -> int:
    parent, order = _reduce_tree(topo, strategy)
    up = sum(1 for v in order if parent[v] >= 0)
    down = up
    return up + down


def reduce_max(ledger: MessageLedger, topo: Topology, strategy, values: Sequence,
               iteration: int, key: Callable[[float], float] = abs,
               kind=MessageKind.GRAD_SCALAR):
    """Winner ``argmax key(value)`` known at all nodes; smallest node id wins ties.

    ``None`` entries are sentinels that cannot win.  Returns ``(node, value)``.
    """
    strategy = Strategy(strategy)
    if len(values) != topo.n_nodes:
        raise ValueError("need one value per node")
    if strategy is Strategy.NAIVE_FLOOD:
        _flood_all(ledger, topo, iteration, kind)
        best = None
        for i, v in enumerate(values):
            if v is not None and (best is None or key(v) > key(values[best])):
                best = i
    else:
        parent, order = _reduce_tree(topo, strategy)
        # each subtree forwards its best (key, -id) pair to its parent
        best_in = {i: (None if v is None else (key(v), -i)) for i, v in enumerate(values)}
        for v in reversed(order[1:]):
            p = parent[v]
            cand = best_in[v]
            if cand is not None and (best_in[p] is None or cand > best_in[p]):
                best_in[p] = cand
        ledger.charge(iteration, MessageKind.REDUCE_SCALAR, _tree_messages(topo, strategy))
        top = best_in[order[0]]
        best = None if top is None else -top[1]
    if best is None:
        return None, None
    return best, values[best]


def reduce_sum(ledger: MessageLedger, topo: Topology, strategy, values: Sequence,
               iteration: int, kind=MessageKind.PARTIAL_SUM) -> float:
    """Total known at all nodes, summed left to right in node-id order."""
    strategy = Strategy(strategy)
    if len(values) != topo.n_nodes:
        raise ValueError("need one value per node")
    if strategy is Strategy.NAIVE_FLOOD:
        _flood_all(ledger, topo, iteration, kind)
    else:
        ledger.charge(iteration, MessageKind.REDUCE_SCALAR, _tree_messages(topo, strategy))
    total = 0.0
    for v in values:
        total += v
    return total


def election_cost(topo: Topology, strategy) -> int:
    """Reals spent electing the winner and summing the partial sums."""
    strategy = Strategy(strategy)
    if strategy is Strategy.NAIVE_FLOOD:
        return 2 * sum(topo.broadcast_cost(i) for i in range(topo.n_nodes))
    return 4 * (topo.n_nodes - 1)


def round_cost(topo: Topology, strategy, winner: int, payload: int,
               step_scalar: bool = False) -> int:
    """Closed-form cost of one full dFW round won by ``winner``."""
    reals = 1 + payload + (1 if step_scalar else 0)
    return election_cost(topo, strategy) + reals * topo.broadcast_cost(winner)


def _check_node(topo, i):
    if not 0 <= i < topo.n_nodes:
        raise ValueError(f"node {i} out of range [0, {topo.n_nodes})")


class DropFilter:
    """Seeded Bernoulli stream: each message is kept with probability ``1 - p``."""

    def __init__(self, p: float, seed: int = 0):
        if not 0.0 <= p < 1.0:
            raise ValueError(f"drop probability must be in [0, 1), got {p}")
        self.p = float(p)
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def keep(self) -> bool:
        if self.p == 0.0:
            return True
        return bool(self._rng.random() >= self.p)

    def draws(self, count: int) -> np.ndarray:
        if self.p == 0.0:
            return np.ones(count, dtype=bool)
        return self._rng.random(count) >= self.p
