"""Local atom-selection baselines and matched-communication comparison.

Both baselines pick ``m`` atoms on every node, ship them point to point to
a designated solver node (the topology root, i.e. node 0 or the star hub)
and solve the problem restricted to the union with centralized FW.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fw import RunTrace, SolverConfig, solve_fw
from ..netsim import Topology
from ..objectives import Domain, Iterate, Objective, Simplex


@dataclass
class BaselinePoint:
    m: int
    cost: int
    objective: float
    atoms: np.ndarray


def transfer_cost(topo: Topology, selected, payload: int) -> int:
    """Reals sent when node ``i`` ships ``selected[i]`` atoms to the root."""
    return int(sum(len(s) * payload * topo.hops_to_root(i) for i, s in enumerate(selected)))


def _check_m(parts, m: int):
    holders = [len(p) for p in parts if len(p)]
    if m < 1:
        raise ValueError("m must be positive")
    if m > min(holders):
        raise ValueError(f"m={m} exceeds the smallest atom set ({min(holders)})")


def solve_on_union(objective: Objective, domain: Domain, atoms, config: SolverConfig):
    """Objective value of the centralized solve restricted to ``atoms``."""
    atoms = np.unique(np.asarray(atoms, dtype=int))
    if isinstance(domain, Simplex) or atoms.size:
        trace = solve_fw(objective.restrict(atoms), domain, config)
        return trace.final_objective, trace
    zero = Iterate.start(objective.n, domain)
    return objective.value(zero), None


def random_selection(parts, m: int, seed: int = 0) -> list:
    """``m`` atoms per node, uniformly without replacement.

    Node ``i`` draws a permutation from its own stream, so selections for
    growing ``m`` are nested.
    """
    out = []
    for i, p in enumerate(parts):
        rng = np.random.default_rng([seed, i])
        p = np.asarray(p, dtype=int)
        out.append(np.sort(p[rng.permutation(p.size)[:m]]))
    return out


def local_fw_selection(objective: Objective, domain: Domain, parts, m: int,
                       step="linesearch") -> list:
    """Distinct atoms picked by ``m`` FW iterations run on each node's block."""
    out = []
    for p in parts:
        p = np.asarray(p, dtype=int)
        if p.size == 0:
            out.append(p)
            continue
        cfg = SolverConfig(epsilon=1e-300, max_iter=m, step=step)
        trace = solve_fw(objective.restrict(p), domain, cfg)
        picked = list(dict.fromkeys(trace.steps))
        if isinstance(domain, Simplex):
            picked = list(dict.fromkeys([0] + picked))
        out.append(np.sort(p[np.asarray(picked[:m], dtype=int)]))
    return out


def baseline_random(objective: Objective, domain: Domain, parts, topo: Topology, m: int,
                    seed: int = 0, config: SolverConfig | None = None) -> BaselinePoint:
    _check_m(parts, m)
    config = config or SolverConfig(epsilon=1e-8, max_iter=2000, step="linesearch")
    sel = random_selection(parts, m, seed)
    f, _ = solve_on_union(objective, domain, np.concatenate(sel), config)
    return BaselinePoint(m, transfer_cost(topo, sel, objective.payload_size), f,
                         np.concatenate(sel))


def baseline_local_fw(objective: Objective, domain: Domain, parts, topo: Topology, m: int,
                      config: SolverConfig | None = None) -> BaselinePoint:
    _check_m(parts, m)
    config = config or SolverConfig(epsilon=1e-8, max_iter=2000, step="linesearch")
    sel = local_fw_selection(objective, domain, parts, m, config.step)
    f, _ = solve_on_union(objective, domain, np.concatenate(sel), config)
    return BaselinePoint(m, transfer_cost(topo, sel, objective.payload_size), f,
                         np.concatenate(sel))


def baseline_curve(kind: str, objective, domain, parts, topo, ms, seed: int = 0,
                   config: SolverConfig | None = None) -> list:
    """One :class:`BaselinePoint` per ``m`` in ``ms``."""
    if kind == "random":
        return [baseline_random(objective, domain, parts, topo, m, seed, config) for m in ms]
    if kind == "localfw":
        return [baseline_local_fw(objective, domain, parts, topo, m, config) for m in ms]
    raise ValueError(f"unknown baseline {kind!r}")


def objective_at_cost(trace: RunTrace, cost: float) -> float:
    """dFW objective of the last iterate paid for within ``cost`` reals.

    Record ``k`` holds the iterate reached after ``k`` steps; it is paid for
    once the previous round's traffic has been sent.
    """
    best = trace.records[0].objective
    for prev, rec in zip(trace.records, trace.records[1:]):
        if prev.cum_reals > cost:
            break
        best = rec.objective
    return best


def compare_at_matched_cost(trace: RunTrace, points) -> list:
    """``(cost, f_dfw, f_baseline)`` at every baseline grid point."""
    return [(p.cost, objective_at_cost(trace, p.cost), p.objective) for p in points]
