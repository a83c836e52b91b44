"""Centralized Frank-Wolfe over the l1 ball and the unit simplex."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .exceptions import NumericalError
from .objectives import Domain, Iterate, L1Ball, Objective, ObjectiveState, Simplex


class StepRule(str, Enum):
    HARMONIC = "harmonic"
    LINESEARCH = "linesearch"


@dataclass(frozen=True)
class LmoResult:
    """Vertex ``sign * magnitude * e_index`` of the feasible domain."""

    index: int
    sign: int
    magnitude: float

    @property
    def coef(self) -> float:
        return self.sign * self.magnitude


@dataclass
class SolverConfig:
    epsilon: float = 1e-6
    max_iter: int = 1000
    step: StepRule = StepRule.HARMONIC
    curvature_bound: Optional[float] = None

    def __post_init__(self):
        self.step = StepRule(self.step)
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")

    def iteration_bound(self) -> Optional[int]:
        """``ceil(6.75 C_f / epsilon)`` when a curvature bound is known."""
        if self.curvature_bound is None:
            return None
        return math.ceil(6.75 * self.curvature_bound / self.epsilon)


@dataclass
class TraceRecord:
    k: int
    atom: int
    owner: int
    gamma: float
    objective: float
    gap: float
    cum_reals: int = 0
    wallclock_ns: int = 0
    support_size: int = 0
    node_objectives: Optional[list] = None


@dataclass
class RunTrace:
    """One record per evaluated iterate; the last record took no step."""

    records: list = field(default_factory=list)
    alpha: Optional[Iterate] = None
    converged: bool = False
    replicas: Optional[list] = None

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    @property
    def gaps(self) -> np.ndarray:
        return np.array([r.gap for r in self.records])

    @property
    def atoms(self) -> list:
        return [r.atom for r in self.records]

    @property
    def gammas(self) -> np.ndarray:
        return np.array([r.gamma for r in self.records])

    @property
    def steps(self) -> list:
        """Selected atoms of the rounds that moved the iterate."""
        return [r.atom for r in self.records[:-1]]

    @property
    def final_objective(self) -> float:
        return self.records[-1].objective

    @property
    def final_gap(self) -> float:
        return self.records[-1].gap

    def __len__(self):
        return len(self.records)


def lmo_l1(grad, beta: float) -> LmoResult:
    grad = np.asarray(grad, dtype=float)
    if grad.size == 0:
        raise ValueError("empty gradient")
    j = int(np.argmax(np.abs(grad)))
    return LmoResult(j, 1 if grad[j] <= 0 else -1, float(beta))


def lmo_simplex(grad) -> LmoResult:
    grad = np.asarray(grad, dtype=float)
    if grad.size == 0:
        raise ValueError("empty gradient")
    return LmoResult(int(np.argmin(grad)), 1, 1.0)


def lmo(grad, domain: Domain) -> LmoResult:
    if isinstance(domain, L1Ball):
        return lmo_l1(grad, domain.beta)
    return lmo_simplex(grad)


def vertex_for(domain: Domain, j: int, g: float) -> LmoResult:
    """LMO vertex for atom ``j`` with gradient entry ``g``."""
    if isinstance(domain, L1Ball):
        return LmoResult(j, 1 if g <= 0 else -1, domain.beta)
    return LmoResult(j, 1, 1.0)


def duality_gap(alpha: Iterate, s: LmoResult, grad) -> float:
    """``<alpha - s, grad f(alpha)>``; ``grad`` is indexable by atom."""
    inner = 0.0
    for j, v in alpha.items():
        inner += v * grad[j]
    return inner - s.coef * grad[s.index]


def golden_section(fun: Callable[[float], float], lo: float = 0.0, hi: float = 1.0,
                   tol: float = 1e-10) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = (a + b) / 2
    # endpoints are common minimizers for FW directions
    return min((lo, hi, x), key=lambda t: (fun(t), t))


def step_size(k: int, rule, state: ObjectiveState | None = None,
              s: LmoResult | None = None, gap: float | None = None) -> float:
    """``2 / (k + 2)`` or an exact line search along ``s - alpha``.

    Quadratics use the closed form ``gap / (2 * curvature)`` clipped to
    ``[0, 1]``; other objectives use golden-section search.
    """
    rule = StepRule(rule)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if rule is StepRule.HARMONIC:
        return 2.0 / (k + 2)
    if state.quadratic:
        curv = state.curvature(s.index, s.coef)
        if curv <= 0.0:
            return 1.0
        return float(min(1.0, max(0.0, gap / (2.0 * curv))))
    return golden_section(lambda t: state.value_along(t, s.index, s.coef))


def replica_line_search(state: ObjectiveState, j: int, coef: float) -> float:
    """Exact line search along ``coef * e_j - alpha`` using the replica alone.

    Quadratics are fitted from three evaluations; others use golden section.
    """
    if not state.quadratic:
        return golden_section(lambda t: state.value_along(t, j, coef))
    f0, fh, f1 = (state.value_along(t, j, coef) for t in (0.0, 0.5, 1.0))
    curv = 2.0 * (f1 + f0 - 2.0 * fh)
    slope = f1 - f0 - curv
    if curv <= 0.0:
        return 1.0 if f1 < f0 else 0.0
    return float(min(1.0, max(0.0, -slope / (2.0 * curv))))


def solve_fw(objective: Objective, domain: Domain, config: SolverConfig,
             owner: Optional[np.ndarray] = None) -> RunTrace:
    """Run Frank-Wolfe from the canonical start until ``gap <= epsilon``.

    ``owner`` optionally maps atoms to node ids for the trace.
    """
    state = objective.make_state(np.arange(objective.n), Iterate.start(objective.n, domain))
    trace = RunTrace()
    t0 = time.perf_counter_ns()
    for k in range(config.max_iter + 1):
        grad = state.grad()
        f = state.value
        s = lmo(grad, domain)
        gap = duality_gap(state.alpha, s, grad)
        if not (math.isfinite(f) and math.isfinite(gap)):
            raise NumericalError(f"non-finite objective ({f}) or gap ({gap}) at iteration {k}")
        done = gap <= config.epsilon
        gamma = 0.0 if done or k == config.max_iter else step_size(
            k, config.step, state, s, gap)
        trace.records.append(TraceRecord(
            k=k, atom=s.index, owner=-1 if owner is None else int(owner[s.index]),
            gamma=gamma, objective=f, gap=gap, wallclock_ns=time.perf_counter_ns() - t0,
            support_size=len(state.alpha.support)))
        if done or k == config.max_iter:
            trace.converged = bool(done)
            break
        state.step(gamma, s.index, s.coef)
    trace.alpha = state.alpha
    return trace
