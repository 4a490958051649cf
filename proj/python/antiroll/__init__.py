"""Rollover-preventive active-suspension force computation."""

from antiroll._core import (
    AlphaParams,
    AntirollError,
    ControlInput,
    FishhookParams,
    SteeringProfile,
    TireConstants,
    VehicleConfig,
    VehicleState,
    alpha_integrate,
    alpha_params,
    dynamics_rhs,
    exclusive_residuals,
    feasible_weight,
    grid_times,
    hull_residual,
    initial_state,
    rollover_index,
    simulate,
    slip_angle_deg,
    tire_lateral_force,
    tire_lateral_force_smoothed,
    wheel_reactions,
)

__all__ = [
    "AlphaParams",
    "AntirollError",
    "ControlInput",
    "FishhookParams",
    "SteeringProfile",
    "TireConstants",
    "VehicleConfig",
    "VehicleState",
    "alpha_integrate",
    "alpha_params",
    "dynamics_rhs",
    "exclusive_residuals",
    "feasible_weight",
    "grid_times",
    "hull_residual",
    "initial_state",
    "rollover_index",
    "simulate",
    "slip_angle_deg",
    "tire_lateral_force",
    "tire_lateral_force_smoothed",
    "wheel_reactions",
]
