"""Steady-state availability of Byzantine fault-tolerant clusters."""

from ._core import (
    DomainError,
    FaultDistribution,
    GeneratorMatrix,
    Scenario,
    SolverError,
    StationaryDistribution,
    SystemConfig,
    availability,
    build_generator,
    build_scenario,
    max_tolerated_faults,
    mean_availability,
    preset,
    preset_names,
    quorum_threshold,
    scenario_availability,
    simulate,
    solve,
    solve_replaced_equation,
    solve_svd,
    sweep_n,
    sweep_ratio,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
