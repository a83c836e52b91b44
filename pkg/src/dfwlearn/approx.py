"""Greedy m-center clustering and the approximate dFW variant.

Each node clusters its atoms with the farthest-first rule and only offers
cluster centers during local selection.  Centers can grow over rounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .distributed import default_strategy, run_protocol
from .fw import SolverConfig
from .netsim import DropFilter, Topology
from .objectives import (Adaboost, Domain, Iterate, L1Ball, Lasso, Objective, SvmDual,
                         augmented_kernel)


class L1Metric:
    """``||a_i - a_j||_1`` between the columns of a local atom block."""

    def __init__(self, points: np.ndarray):
        self.points = np.asarray(points, dtype=float)

    def __len__(self):
        return self.points.shape[1]

    def from_point(self, p: int) -> np.ndarray:
        return np.abs(self.points - self.points[:, [p]]).sum(axis=0)


class KernelMetric:
    """Distance between augmented-kernel feature maps of training points."""

    def __init__(self, objective: SvmDual, indices):
        idx = np.asarray(indices, dtype=int)
        self._args = (objective.kernel, objective.C, objective.X[:, idx],
                      objective.labels[idx], idx)
        K = objective.kernel.diag(objective.X[:, idx])
        self._diag = K + 1.0 + 1.0 / objective.C

    def __len__(self):
        return self._diag.size

    def from_point(self, p: int) -> np.ndarray:
        kern, C, X, y, idx = self._args
        row = augmented_kernel(kern, C, X, y, idx, X[:, [p]], y[[p]], idx[[p]])[:, 0]
        sq = self._diag + self._diag[p] - 2.0 * row
        return np.sqrt(np.maximum(sq, 0.0))


def local_metric(objective: Objective, indices):
    if isinstance(objective, SvmDual):
        return KernelMetric(objective, indices)
    return L1Metric(objective.atoms.subset(indices).toarray() if len(indices) else
                    np.zeros((objective.d, 0)))


@dataclass
class CenterSet:
    """Centers chosen on one node, as positions into its atom list."""

    node_id: int
    atoms: np.ndarray
    centers: list = field(default_factory=list)
    dist: Optional[np.ndarray] = None

    @property
    def radius(self) -> float:
        if self.dist is None or self.dist.size == 0:
            return 0.0
        return float(self.dist.max())

    @property
    def center_atoms(self) -> np.ndarray:
        """Global indices of the centers, sorted."""
        return np.sort(self.atoms[self.centers]) if self.centers else np.zeros(0, dtype=int)


def greedy_selection(metric, centers: Optional[CenterSet], delta_k: int,
                     node_id: int = 0, atoms=None) -> CenterSet:
    """Add ``delta_k`` farthest-first centers.

    An empty center set is seeded with the first (smallest-index) atom,
    which counts as one of the ``delta_k``.  Distance updates are
    incremental, one pass over the local atoms per new center.
    """
    if delta_k < 0:
        raise ValueError("delta_k must be nonnegative")
    m = len(metric)
    if centers is None:
        atoms = np.arange(m) if atoms is None else np.asarray(atoms)
        centers = CenterSet(node_id, atoms)
    out = CenterSet(centers.node_id, centers.atoms, list(centers.centers),
                    None if centers.dist is None else centers.dist.copy())
    is_center = np.zeros(m, dtype=bool)
    is_center[out.centers] = True
    for _ in range(delta_k):
        if is_center.all():
            break
        if not out.centers:
            p = 0
        else:
            masked = np.where(is_center, -np.inf, out.dist)
            p = int(np.argmax(masked))
        out.centers.append(p)
        is_center[p] = True
        d = metric.from_point(p)
        out.dist = d if out.dist is None else np.minimum(out.dist, d)
        out.dist[p] = 0.0
    return out


def brute_force_optimal_radius(points: np.ndarray, m: int) -> float:
    """Exact l1 m-center radius with centers drawn from the points (n <= 12)."""
    points = np.asarray(points, dtype=float)
    n = points.shape[1]
    if n > 12:
        raise ValueError("brute force is limited to 12 points")
    if m < 1:
        raise ValueError("need at least one center")
    if m >= n:
        return 0.0
    D = cdist(points.T, points.T, "cityblock")
    best = math.inf
    for combo in itertools.combinations(range(n), m):
        best = min(best, float(D[:, combo].min(axis=1).max()))
    return best


@dataclass
class CenterSchedule:
    """``fixed`` keeps ``m_i`` constant; ``linear`` adds ``ceil(rate)`` per round."""

    kind: str = "fixed"
    m0: Optional[int] = 1
    rate: float = 0.0
    auto_balance: bool = False

    @classmethod
    def parse(cls, spec: str) -> "CenterSchedule":
        """``fixed:m``, ``fixed:auto-balance`` or ``linear:rate[:m0]``."""
        parts = spec.split(":")
        try:
            if parts[0] == "fixed" and len(parts) == 2:
                if parts[1] == "auto-balance":
                    return cls("fixed", None, 0.0, True)
                return cls("fixed", int(parts[1]))
            if parts[0] == "linear" and len(parts) in (2, 3):
                return cls("linear", int(parts[2]) if len(parts) == 3 else 1, float(parts[1]))
        except ValueError:
            pass
        raise ValueError(f"bad center schedule {spec!r}")

    def initial(self, sizes) -> list:
        sizes = list(sizes)
        if self.auto_balance:
            out = []
            for i, s in enumerate(sizes):
                others = [t for j, t in enumerate(sizes) if j != i and t > 0]
                target = math.ceil(sum(others) / len(others)) if others else s
                out.append(min(s, max(1, target)) if s else 0)
            return out
        if self.m0 is None or self.m0 < 1:
            raise ValueError("initial center count must be positive")
        return [min(s, self.m0) for s in sizes]

    def at(self, k: int, sizes) -> list:
        base = self.initial(sizes)
        if self.kind == "fixed":
            return base
        inc = math.ceil(self.rate) * k
        return [min(s, b + inc) for s, b in zip(sizes, base)]


def grad_bound(objective: Objective, domain: Domain) -> float:
    """Upper bound ``G`` with ``|grad_j - grad_j'| <= dist(a_j, a_j') * G``.

    For Lasso and Adaboost this is ``max_alpha ||grad g(A alpha)||_inf``
    paired with the l1 metric; for the SVM dual it pairs with the
    augmented-kernel feature distance.
    """
    scale = domain.beta if isinstance(domain, L1Ball) else 1.0
    if isinstance(objective, Lasso):
        max_col = float(objective.atoms.col_inf_norms().max())
        return 2.0 * (scale * max_col + float(np.max(np.abs(objective.y))))
    if isinstance(objective, Adaboost):
        return 1.0 / objective.temperature
    if isinstance(objective, SvmDual):
        diag = objective.kernel.diag(objective.X) + 1.0 + 1.0 / objective.C
        return 2.0 * scale * float(np.sqrt(diag.max()))
    raise TypeError(f"no gradient bound for {type(objective).__name__}")


@dataclass(frozen=True)
class Certificate:
    k: int
    error: float
    radius: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.error <= self.bound + 1e-12


def selection_error(objective: Objective, domain: Domain, alpha, atom: int) -> float:
    """How far the chosen atom falls short of the best one (global oracle)."""
    grad = objective.gradient(alpha)
    if isinstance(domain, L1Ball):
        return float(np.max(np.abs(grad)) - abs(grad[atom]))
    return float(grad[atom] - np.min(grad))


def solve_approx_dfw(objective: Objective, domain: Domain, parts, topo: Topology,
                     config: SolverConfig, schedule: CenterSchedule | str = "fixed:1",
                     strategy=None, drop: Optional[DropFilter] = None,
                     certify: bool = False):
    """Approximate dFW; returns ``(trace, ledger, certificates)``.

    Clustering reads only each node's own atoms.  With ``certify`` the
    selection error of every round is measured against the full gradient
    and compared with ``2 * r_max * G``; this is a test-only global view.
    """
    if isinstance(schedule, str):
        schedule = CenterSchedule.parse(schedule)
    strategy = default_strategy(topo) if strategy is None else strategy
    sizes = [len(p) for p in parts]
    metrics = [local_metric(objective, p) for p in parts]
    targets = schedule.initial(sizes)
    sets = [greedy_selection(metrics[i], None, targets[i], i, parts[i])
            for i in range(len(parts))]
    G = grad_bound(objective, domain) if certify else None
    certs: list = []
    before = [Iterate.start(objective.n, domain)]

    def candidates(k):
        return [s.center_atoms for s in sets]

    def on_round(k, nodes, record):
        if certify:
            r_max = max(s.radius for s in sets)
            err = selection_error(objective, domain, before[0], record.atom)
            certs.append(Certificate(k, err, r_max, 2.0 * r_max * G))
            before[0] = nodes[0].alpha.copy()
        grow_to = schedule.at(k + 1, sizes)
        for i, s in enumerate(sets):
            if grow_to[i] > len(s.centers):
                sets[i] = greedy_selection(metrics[i], s, grow_to[i] - len(s.centers))

    trace, ledger = run_protocol(objective, domain, parts, topo, config, strategy, drop,
                                 candidates_fn=candidates, on_round=on_round)
    return trace, ledger, certs
