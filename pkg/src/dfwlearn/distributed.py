"""Distributed Frank-Wolfe over a simulated network.

Each node owns a disjoint set of atoms and a replica of the iterate.  A
round is: local selection, election of the node with the best local
gradient entry, broadcast of the winning atom, identical update everywhere.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import NumericalError, ProtocolError
from .fw import (RunTrace, SolverConfig, StepRule, TraceRecord, replica_line_search,
                 step_size, vertex_for)
from .netsim import (DropFilter, MessageKind, MessageLedger, Strategy, Topology, TopologyKind,
                     broadcast, reduce_max, reduce_sum)
from .objectives import Domain, Iterate, L1Ball, Objective, ObjectiveState, check_partition


def partition_atoms(n: int, n_nodes: int, scheme: str = "uniform", seed: int = 0,
                    fraction: float = 0.5, exclude: Sequence[int] = (),
                    allow_empty: bool = False) -> list:
    """Split ``range(n)`` across nodes.

    ``scheme`` is ``"uniform"`` (random balanced assignment), ``"contiguous"``
    or ``"unbalanced"`` (the first holder gets ``floor(fraction * n)`` atoms,
    the rest are spread uniformly).  Nodes in ``exclude`` get nothing.
    """
    holders = [i for i in range(n_nodes) if i not in set(exclude)]
    if not holders:
        raise ValueError("no node can hold atoms")
    if len(holders) > n and not allow_empty:
        raise ValueError(f"{len(holders)} holder nodes but only {n} atoms")
    rng = np.random.default_rng(seed)
    if scheme == "contiguous":
        chunks = np.array_split(np.arange(n), len(holders))
    elif scheme == "uniform":
        chunks = np.array_split(rng.permutation(n), len(holders))
    elif scheme == "unbalanced":
        if not 0.0 < fraction < 1.0:
            raise ValueError("fraction must be in (0, 1)")
        perm = rng.permutation(n)
        big = int(math.floor(fraction * n))
        rest = np.array_split(perm[big:], len(holders) - 1) if len(holders) > 1 else []
        if len(holders) == 1:
            chunks = [perm]
        else:
            chunks = [perm[:big]] + list(rest)
    else:
        raise ValueError(f"unknown partition scheme {scheme!r}")
    parts = [np.zeros(0, dtype=int) for _ in range(n_nodes)]
    for node, chunk in zip(holders, chunks):
        parts[node] = np.sort(np.asarray(chunk, dtype=int))
    if not allow_empty and any(parts[i].size == 0 for i in holders):
        raise ValueError("partition leaves a holder node empty")
    return parts


def hub_exclusion(topo: Topology, hub_holds_atoms: bool = False) -> tuple:
    """Nodes that get no atoms: the star coordinator unless told otherwise."""
    if topo.kind is TopologyKind.STAR and topo.n_nodes > 1 and not hub_holds_atoms:
        return (topo.root,)
    return ()


def parse_partition(spec: str):
    """``uniform``, ``contiguous`` or ``unbalanced:fraction``."""
    name, _, arg = spec.partition(":")
    if name == "unbalanced":
        return name, float(arg) if arg else 0.5
    if name in ("uniform", "contiguous") and not arg:
        return name, 0.5
    raise ValueError(f"bad partition spec {spec!r}")


def owner_map(parts, n: int) -> np.ndarray:
    owner = np.full(n, -1, dtype=int)
    for i, p in enumerate(parts):
        owner[np.asarray(p, dtype=int)] = i
    return owner


@dataclass
class NodeState:
    """One simulated node: its atom set and its objective replica."""

    node_id: int
    atoms: np.ndarray
    state: ObjectiveState

    @property
    def alpha(self) -> Iterate:
        return self.state.alpha


@dataclass(frozen=True)
class LocalReport:
    atom: int
    grad: float
    partial_sum: float


def local_select(node: NodeState, domain: Domain,
                 candidates: Optional[np.ndarray] = None) -> Optional[LocalReport]:
    """Best local gradient entry and this node's share of ``<alpha, grad>``.

    Returns ``None`` for a node without atoms.  ``candidates`` restricts the
    scan (sorted global indices, subset of the node's atoms).
    """
    if node.atoms.size == 0:
        return None
    grad = node.state.grad()
    S = node.state.partial_sum(grad)
    if candidates is None:
        pos = np.arange(node.atoms.size)
    else:
        pos = np.searchsorted(node.atoms, candidates)
    vals = grad[pos]
    p = int(np.argmax(np.abs(vals))) if isinstance(domain, L1Ball) else int(np.argmin(vals))
    return LocalReport(int(node.atoms[pos[p]]), float(vals[p]), float(S))


def election_key(domain: Domain):
    return abs if isinstance(domain, L1Ball) else (lambda g: -g)


def stopping_quantity(domain: Domain, total_S: float, g: float) -> float:
    """``sum_i S_i + beta |g|`` (l1) or ``sum_i S_i - g`` (simplex)."""
    if isinstance(domain, L1Ball):
        return total_S + domain.beta * abs(g)
    return total_S - g


def global_select(reports: Sequence, topo: Topology, strategy, ledger: MessageLedger,
                  domain: Domain, iteration: int):
    """Elect the winning node and the stopping quantity, charging the ledger.

    Returns ``(winner, g_winner, gap)``.
    """
    gs = [None if r is None else r.grad for r in reports]
    winner, g = reduce_max(ledger, topo, strategy, gs, iteration, key=election_key(domain))
    if winner is None:
        raise ProtocolError("no node reported a candidate atom")
    total = reduce_sum(ledger, topo, strategy,
                       [0.0 if r is None else r.partial_sum for r in reports], iteration)
    return winner, g, stopping_quantity(domain, total, g)


def make_nodes(objective: Objective, domain: Domain, parts) -> list:
    check_partition(parts, objective.n)
    alpha0 = Iterate.start(objective.n, domain)
    return [NodeState(i, np.asarray(p, dtype=int), objective.make_state(p, alpha0))
            for i, p in enumerate(parts)]


def default_strategy(topo: Topology) -> Strategy:
    return Strategy.STAR_COORDINATOR if topo.kind is TopologyKind.STAR else Strategy.TREE_REDUCE


def dfw_round(nodes, topo: Topology, strategy, ledger: MessageLedger, k: int,
              domain: Domain, config: SolverConfig, candidates=None, check: bool = True):
    """One synchronous round.

    Returns ``(record, stop)``; on ``stop`` no atom was sent.
    """
    reports = [local_select(nd, domain, None if candidates is None else candidates[nd.node_id])
               for nd in nodes]
    winner, g, gap = global_select(reports, topo, strategy, ledger, domain, k)
    f = nodes[0].state.value
    if not (math.isfinite(f) and math.isfinite(gap)):
        raise NumericalError(f"non-finite objective ({f}) or gap ({gap}) in round {k}")
    j = reports[winner].atom
    record = TraceRecord(k=k, atom=j, owner=winner, gamma=0.0, objective=f, gap=gap,
                         support_size=len(nodes[0].alpha.support))
    if gap <= config.epsilon or k == config.max_iter:
        record.cum_reals = ledger.total
        return record, True
    s = vertex_for(domain, j, g)
    wstate = nodes[winner].state
    payload = wstate.payload(j)
    broadcast(ledger, topo, winner, 1, k, MessageKind.INDEX_SCALAR)
    broadcast(ledger, topo, winner, payload.size, k, MessageKind.ATOM_PAYLOAD)
    gamma = step_size(k, config.step, wstate, s, gap)
    if config.step is StepRule.LINESEARCH:
        broadcast(ledger, topo, winner, 1, k, MessageKind.STEP_SCALAR)
    for nd in nodes:
        nd.state.receive(j, payload)
        nd.state.step(gamma, j, s.coef)
    if check:
        ref = nodes[0].alpha
        for nd in nodes[1:]:
            if not nd.alpha.allclose(ref, 1e-9):
                raise ProtocolError(f"replica of node {nd.node_id} diverged in round {k}")
    record.gamma = gamma
    record.cum_reals = ledger.total
    return record, False


def _drop_round(nodes, topo, ledger, k, domain, config, drops: DropFilter, latest,
                candidates=None):
    """One round with lossy point-to-point links and a coordinator at the root."""
    coord = topo.root
    for nd in nodes:
        r = local_select(nd, domain, None if candidates is None else candidates[nd.node_id])
        if r is None:
            continue
        if nd.node_id == coord:
            latest[nd.node_id] = r
        elif drops.keep():
            ledger.charge(k, MessageKind.GRAD_SCALAR, 1)
            ledger.charge(k, MessageKind.PARTIAL_SUM, 1)
            latest[nd.node_id] = r
    key = election_key(domain)
    winner = None
    for i in sorted(latest):
        if winner is None or key(latest[i].grad) > key(latest[winner].grad):
            winner = i
    node_f = [nd.state.value for nd in nodes]
    est_gap = math.nan
    atom = -1
    gamma = 0.0
    if winner is not None:
        est_gap = stopping_quantity(domain, sum(latest[i].partial_sum for i in sorted(latest)),
                                    latest[winner].grad)
        notified = winner == coord or drops.keep()
        if winner != coord and notified:
            ledger.charge(k, MessageKind.REDUCE_SCALAR, 1)
        if notified:
            wnode = nodes[winner]
            cur = local_select(wnode, domain,
                               None if candidates is None else candidates[winner])
            atom = cur.atom
            s = vertex_for(domain, cur.atom, cur.grad)
            payload = wnode.state.payload(cur.atom)
            harmonic = config.step is StepRule.HARMONIC
            for nd in nodes:
                if nd.node_id != winner:
                    if not drops.keep():
                        continue
                    ledger.charge(k, MessageKind.ATOM_PAYLOAD, 1 + payload.size)
                    nd.state.receive(cur.atom, payload)
                # each replica line-searches along the atom it actually holds
                step = (step_size(k, config.step) if harmonic
                        else replica_line_search(nd.state, cur.atom, s.coef))
                nd.state.step(step, cur.atom, s.coef)
                if nd.node_id == winner:
                    gamma = step
    return TraceRecord(k=k, atom=atom, owner=-1 if winner is None else winner, gamma=gamma,
                       objective=float(np.mean(node_f)), gap=est_gap, cum_reals=ledger.total,
                       node_objectives=node_f,
                       support_size=max(len(nd.alpha.support) for nd in nodes))


def run_protocol(objective: Objective, domain: Domain, parts, topo: Topology,
                 config: SolverConfig, strategy=None, drop: Optional[DropFilter] = None,
                 candidates_fn: Optional[Callable] = None,
                 on_round: Optional[Callable] = None):
    """Shared round loop for exact and approximate dFW.

    ``candidates_fn(k)`` returns per-node candidate atoms (``None`` = all);
    ``on_round(k, nodes, record)`` runs after every round.
    """
    if len(parts) != topo.n_nodes:
        raise ValueError(f"{len(parts)} atom sets for {topo.n_nodes} nodes")
    strategy = default_strategy(topo) if strategy is None else Strategy(strategy)
    nodes = make_nodes(objective, domain, parts)
    ledger = MessageLedger()
    trace = RunTrace()
    latest: dict = {}
    t0 = time.perf_counter_ns()
    for k in range(config.max_iter + 1):
        cands = None if candidates_fn is None else candidates_fn(k)
        if drop is None:
            record, stop = dfw_round(nodes, topo, strategy, ledger, k, domain, config, cands)
        else:
            record = _drop_round(nodes, topo, ledger, k, domain, config, drop, latest, cands)
            stop = k == config.max_iter
        record.wallclock_ns = time.perf_counter_ns() - t0
        trace.records.append(record)
        if on_round is not None:
            on_round(k, nodes, record)
        if stop:
            trace.converged = bool(drop is None and record.gap <= config.epsilon)
            break
    trace.alpha = nodes[0].alpha
    trace.replicas = [nd.alpha for nd in nodes]
    return trace, ledger


def solve_dfw(objective: Objective, domain: Domain, parts, topo: Topology,
              config: SolverConfig, strategy=None, drop: Optional[DropFilter] = None):
    """Exact dFW; returns ``(trace, ledger)``.

    With ``drop`` set, messages are lost at random and replicas may drift
    apart; the trace then reports the mean objective over nodes.
    """
    return run_protocol(objective, domain, parts, topo, config, strategy, drop)
