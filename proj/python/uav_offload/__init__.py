"""Optimal spectrum-trading contracts for UAV-assisted offloading."""

from ._offload import (
    DENSE_URBAN,
    SUBURBAN,
    URBAN,
    Contract,
    DistanceLog,
    DomainError,
    RadioParams,
    SearchSpaceError,
    SolverResult,
    TerrainParams,
    TraceRow,
    TypeLadder,
    brute_force_solve,
    gain,
    is_feasible,
    mbs_cost,
    optimal_prices,
    p_los,
    pathloss_mbs,
    pathloss_uav,
    poisson_tail,
    region_areas,
    revenue,
    ring_positions,
    social_welfare,
    solve,
    uav_utility,
    violations,
)

__version__ = "0.1.0"
