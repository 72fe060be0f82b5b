"""Decentralized anti-windup PI control of saturated M-matrix networks."""

from ._core import (
    ControllerSpec,
    PlantModel,
    RsnetError,
    SectorPair,
    admissible_gamma,
    benchmark_costs,
    certify_optimality,
    check_tuning,
    contraction_bound,
    is_m_matrix,
    run_cli,
    simulate,
    solve_equilibrium,
)

__all__ = [
    "ControllerSpec",
    "PlantModel",
    "RsnetError",
    "SectorPair",
    "admissible_gamma",
    "benchmark_costs",
    "certify_optimality",
    "check_tuning",
    "contraction_bound",
    "is_m_matrix",
    "run_cli",
    "simulate",
    "solve_equilibrium",
]
