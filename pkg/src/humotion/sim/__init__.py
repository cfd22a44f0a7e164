"""Reduced-order simulation and closed-loop scenario running."""

from .scenario import (
    LOG_COLUMNS,
    SCENARIO_SCHEMA_VERSION,
    ScenarioError,
    ScenarioMetrics,
    load_scenario,
    run_scenario,
)
from .world import (
    CONTACT_DAMPING,
    CONTACT_STIFFNESS,
    DEFAULT_BACKLASH,
    FRICTION_COEFF,
    MAX_TIMESTEP,
    SERVO_DAMPING,
    JointState,
    SimulationFault,
    SimWorld,
)

__all__ = [
    "CONTACT_DAMPING",
    "CONTACT_STIFFNESS",
    "DEFAULT_BACKLASH",
    "FRICTION_COEFF",
    "LOG_COLUMNS",
    "MAX_TIMESTEP",
    "SCENARIO_SCHEMA_VERSION",
    "SERVO_DAMPING",
    "JointState",
    "ScenarioError",
    "ScenarioMetrics",
    "SimWorld",
    "SimulationFault",
    "load_scenario",
    "run_scenario",
]
