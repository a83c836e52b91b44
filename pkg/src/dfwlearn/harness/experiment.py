"""Experiment configuration, orchestration and report files."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..approx import CenterSchedule, solve_approx_dfw
from ..distributed import (hub_exclusion, owner_map, parse_partition, partition_atoms,
                           solve_dfw)
from ..fw import RunTrace, SolverConfig, StepRule, solve_fw
from ..netsim import DropFilter, TopologyKind, parse_topology
from ..objectives import (Adaboost, AtomMatrix, KernelSpec, L1Ball, Lasso, Simplex, SvmDual,
                          simplex_quadratic)
from .baselines import baseline_curve
from .data import SynthLassoParams, load_libsvm, synth_lasso

MODES = ("centralized", "dfw", "approx", "baseline-random", "baseline-localfw")
OBJECTIVES = ("lasso", "svm", "adaboost", "quadratic")
TRACE_COLUMNS = ["iter", "selected_atom", "owner_node", "objective", "gap", "cum_reals",
                 "wallclock_ns"]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one run; no hidden randomness."""

    mode: str = "dfw"
    objective: str = "lasso"
    data: Optional[str] = None
    transpose: bool = False
    d: int = 100
    n: int = 400
    density_atoms: float = 0.1
    density_alpha: float = 0.01
    noise_var: float = 1e-3
    lambda_convention: str = "AT_y"
    topology: str = "star:4"
    partition: str = "uniform"
    hub_holds_atoms: bool = False
    epsilon: float = 1e-4
    max_iter: int = 1000
    step: str = "linesearch"
    beta: Optional[float] = None
    simplex: bool = False
    drop: float = 0.0
    seed: int = 0
    centers: str = "fixed:1"
    m: str = "1"
    C: float = 1.0
    bandwidth: Optional[float] = None
    temperature: float = 1.0
    out: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.mode in MODES, f"mode must be one of {MODES}")
        need(self.objective in OBJECTIVES, f"objective must be one of {OBJECTIVES}")
        need(isinstance(self.seed, int) and not isinstance(self.seed, bool),
             "seed must be an integer")
        need(isinstance(self.epsilon, (int, float)) and self.epsilon > 0,
             "epsilon must be positive")
        need(isinstance(self.max_iter, int) and self.max_iter >= 0,
             "max_iter must be a nonnegative integer")
        need(self.step in tuple(s.value for s in StepRule), "step must be harmonic|linesearch")
        need(0.0 <= self.drop < 1.0, "drop must be in [0, 1)")
        need(self.beta is None or self.beta > 0, "beta must be positive")
        need(self.C > 0, "C must be positive")
        need(self.temperature > 0, "temperature must be positive")
        need(self.d >= 1 and self.n >= 1, "d and n must be positive")
        need(0 < self.density_atoms <= 1 and 0 < self.density_alpha <= 1,
             "densities must be in (0, 1]")
        if self.drop and self.mode not in ("dfw", "approx"):
            raise ConfigError("drop applies to dfw and approx modes only")
        try:
            parse_topology(self.topology)
            parse_partition(self.partition)
            self.m_values()
            CenterSchedule.parse(self.centers)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def m_values(self) -> list:
        vals = [int(v) for v in str(self.m).split(",")]
        if any(v < 1 for v in vals):
            raise ValueError("m values must be positive")
        return vals

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        clean = {}
        for key, value in mapping.items():
            k = key.replace("-", "_")
            if k not in names:
                raise ConfigError(f"unknown config key {key!r}")
            clean[k] = value
        try:
            return cls(**clean)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict) or any(isinstance(v, (dict, list)) for v in doc.values()):
            raise ConfigError("config must be a flat key/value object")
        return cls.from_mapping(doc)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Problem:
    objective: object
    domain: object
    info: dict = field(default_factory=dict)


def build_problem(cfg: ExperimentConfig) -> Problem:
    info = {}
    if cfg.objective == "quadratic":
        obj = simplex_quadratic(cfg.d)
        return Problem(obj, Simplex(), info)
    if cfg.objective == "lasso":
        if cfg.data:
            atoms, y = load_libsvm(cfg.data, transpose=cfg.transpose)
            beta = cfg.beta
        else:
            inst = synth_lasso(SynthLassoParams(cfg.d, cfg.n, cfg.density_atoms,
                                                cfg.density_alpha, cfg.noise_var, cfg.seed,
                                                cfg.lambda_convention))
            atoms, y = inst.atoms, inst.y
            beta = cfg.beta if cfg.beta is not None else inst.beta
            info.update(lambda_max=inst.lambda_max, suggested_beta=inst.beta)
        obj = Lasso(atoms, y)
    elif cfg.objective == "adaboost":
        if not cfg.data:
            raise ConfigError("adaboost needs a data file of weak-learner outputs")
        H, labels = load_libsvm(cfg.data, transpose=True)
        obj = Adaboost(AtomMatrix(H.toarray() * labels[:, None]), cfg.temperature)
        beta = cfg.beta
    else:
        if cfg.data:
            atoms, labels = load_libsvm(cfg.data, transpose=cfg.transpose)
            X = atoms.toarray()
        else:
            from sklearn.datasets import make_blobs
            pts, lab = make_blobs(n_samples=cfg.n, n_features=cfg.d, centers=2,
                                  random_state=cfg.seed)
            X, labels = pts.T, np.where(lab == 0, -1.0, 1.0)
        kern = KernelSpec("rbf", cfg.bandwidth) if cfg.bandwidth else None
        obj = SvmDual(X, labels, kern, cfg.C)
        beta = cfg.beta
    if cfg.simplex or cfg.objective == "svm":
        return Problem(obj, Simplex(), info)
    if beta is None:
        raise ConfigError("beta is required (or use --simplex)")
    return Problem(obj, L1Ball(float(beta)), info)


def build_network(cfg: ExperimentConfig, n_atoms: int):
    topo = parse_topology(cfg.topology)
    scheme, fraction = parse_partition(cfg.partition)
    exclude = hub_exclusion(topo, cfg.hub_holds_atoms)
    parts = partition_atoms(n_atoms, topo.n_nodes, scheme, cfg.seed, fraction, exclude)
    return topo, parts


def solver_config(cfg: ExperimentConfig) -> SolverConfig:
    return SolverConfig(epsilon=cfg.epsilon, max_iter=cfg.max_iter, step=cfg.step)


@dataclass
class ExperimentResult:
    trace: RunTrace
    summary: dict
    curve: Optional[list] = None

    @property
    def converged(self) -> bool:
        return bool(self.summary["converged"])


def run(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute ``cfg`` in memory."""
    prob = build_problem(cfg)
    obj, dom = prob.objective, prob.domain
    topo, parts = build_network(cfg, obj.n)
    scfg = solver_config(cfg)
    drop = DropFilter(cfg.drop, cfg.seed) if cfg.drop else None
    summary = {"mode": cfg.mode, "objective": cfg.objective, "topology": topo.describe(),
               "n_atoms": obj.n, "dim": obj.d, "epsilon": cfg.epsilon, **prob.info}
    if isinstance(dom, L1Ball):
        summary["beta"] = dom.beta
    curve = None
    if cfg.mode == "centralized":
        trace = solve_fw(obj, dom, scfg, owner=owner_map(parts, obj.n))
        total = 0
    elif cfg.mode == "dfw":
        trace, ledger = solve_dfw(obj, dom, parts, topo, scfg, drop=drop)
        total = ledger.total
    elif cfg.mode == "approx":
        trace, ledger, _ = solve_approx_dfw(obj, dom, parts, topo, scfg, cfg.centers,
                                            drop=drop)
        total = ledger.total
        summary["centers"] = cfg.centers
    else:
        kind = cfg.mode.split("-", 1)[1]
        points = baseline_curve(kind, obj, dom, parts, topo, cfg.m_values(), cfg.seed)
        curve = [(p.m, p.cost, p.objective) for p in points]
        last = points[-1]
        union = np.unique(last.atoms)
        trace = solve_fw(obj.restrict(union), dom, SolverConfig(
            epsilon=cfg.epsilon, max_iter=cfg.max_iter, step=cfg.step))
        owner = owner_map(parts, obj.n)
        for rec in trace.records:
            rec.atom = int(union[rec.atom])
            rec.owner = int(owner[rec.atom])
            rec.cum_reals = last.cost
        total = last.cost
        summary["curve"] = [{"m": m, "cum_reals": c, "objective": f} for m, c, f in curve]
    final = trace.records[-1]
    summary.update(final_objective=final.objective, final_gap=final.gap,
                   total_communication=int(total), rounds=len(trace.records) - 1,
                   converged=bool(math.isfinite(final.gap) and final.gap <= cfg.epsilon))
    return ExperimentResult(trace, summary, curve)


def write_trace_csv(path, trace: RunTrace) -> None:
    n_nodes = max((len(r.node_objectives) for r in trace.records if r.node_objectives),
                  default=0)
    cols = TRACE_COLUMNS + [f"node{i}_objective" for i in range(n_nodes)]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in trace.records:
            row = [r.k, r.atom, r.owner, repr(float(r.objective)), repr(float(r.gap)),
                   r.cum_reals, r.wallclock_ns]
            if n_nodes:
                row += [repr(float(v)) for v in r.node_objectives]
            w.writerow(row)


def write_curve_csv(path, curve) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "cum_reals", "objective"])
        for m, c, f in curve:
            w.writerow([m, c, repr(float(f))])


def run_experiment(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    """Run and write ``trace.csv``, ``summary.json`` (and ``curve.csv``) to ``out``."""
    res = run(cfg)
    out = out or cfg.out
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        write_trace_csv(out / "trace.csv", res.trace)
        if res.curve is not None:
            write_curve_csv(out / "curve.csv", res.curve)
        summary = dict(res.summary, config=cfg.to_dict())
        (out / "summary.json").write_text(json.dumps(summary, indent=2, default=_json_default))
    return res


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (TopologyKind, StepRule)):
        return o.value
    raise TypeError(type(o).__name__)
