"""Frank-Wolfe for sparse learning, centralized and over a simulated network."""

from .approx import CenterSchedule, greedy_selection, solve_approx_dfw
from .distributed import partition_atoms, solve_dfw
from .estimators import FrankWolfeAdaBoost, FrankWolfeLasso, FrankWolfeSVC, GreedyKCenter
from .exceptions import DimensionError, NumericalError, ProtocolError
from .fw import SolverConfig, StepRule, solve_fw
from .netsim import MessageLedger, Strategy, Topology, build_topology, parse_topology
from .objectives import (Adaboost, AtomMatrix, Iterate, KernelSpec, L1Ball, Lasso, Simplex,
                         SvmDual)

__version__ = "0.1.0"

__all__ = [
    "Adaboost", "AtomMatrix", "CenterSchedule", "DimensionError", "FrankWolfeAdaBoost",
    "FrankWolfeLasso", "FrankWolfeSVC", "GreedyKCenter", "Iterate", "KernelSpec", "L1Ball",
    "Lasso", "MessageLedger", "NumericalError", "ProtocolError", "Simplex", "SolverConfig",
    "StepRule", "Strategy", "SvmDual", "Topology", "build_topology", "greedy_selection",
    "parse_topology", "partition_atoms", "solve_approx_dfw", "solve_dfw", "solve_fw",
]
