"""Structure-preserving simulation of a rigid body hanging from an elastic string.

A Lie group variational integrator advances node positions and the body
attitude on (R^3)^(N+1) x SO(3) by group operations, preserving the momentum
map about gravity, long-time energy behavior, and the orthogonality of the
rotation matrix without projection. A conventional RK4 integrator on the same
finite-element model serves as a cross-validation reference.
"""

__version__ = "0.1.0"

from .diagnostics import (
    EnergyBreakdown,
    angular_momentum_e3,
    discrete_angular_momentum_e3,
    discrete_energy,
    energy,
    strain_energy_per_element,
    stretched_length,
)
from .lgvi import (
    ConvergenceError,
    LgviStepper,
    SolverOptions,
    assemble_and_factor_mass,
    discrete_lagrangian,
    initialize_first_update,
    node_residuals,
    rotation_residual,
    solve_node_updates,
    solve_rotation_update,
)
from .model import (
    CollapsedElementError,
    Configuration,
    ContinuousState,
    Discretization,
    InitialConditions,
    PhysicalParams,
    Update,
    apply_update,
    build_initial_state,
    elastic_force_gradient,
    element_elastic_gradients,
)
from .refint import SemiDiscreteSystem, generalized_accelerations, rk4_step
from .so3 import (
    cayley,
    cayley_inv,
    exp_so3,
    hat,
    log_so3,
    orthogonality_error,
    vee,
)

__all__ = [
    "CollapsedElementError",
    "Configuration",
    "ContinuousState",
    "ConvergenceError",
    "Discretization",
    "EnergyBreakdown",
    "InitialConditions",
    "LgviStepper",
    "PhysicalParams",
    "SemiDiscreteSystem",
    "SolverOptions",
    "Update",
    "angular_momentum_e3",
    "apply_update",
    "assemble_and_factor_mass",
    "build_initial_state",
    "cayley",
    "cayley_inv",
    "discrete_angular_momentum_e3",
    "discrete_energy",
    "discrete_lagrangian",
    "elastic_force_gradient",
    "element_elastic_gradients",
    "energy",
    "exp_so3",
    "generalized_accelerations",
    "hat",
    "initialize_first_update",
    "log_so3",
    "node_residuals",
    "orthogonality_error",
    "rk4_step",
    "rotation_residual",
    "solve_node_updates",
    "solve_rotation_update",
    "strain_energy_per_element",
    "stretched_length",
    "vee",
    "__version__",
]
