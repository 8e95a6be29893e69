"""Physical parameters, discretization constants, and state containers.

Sign convention for gravity: e3 is the gravity direction, so potentials carry
-(mass) g r.e3 and the gravitational force is +g e3. "Down" is +e3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .so3 import require_rotation

#: Gravity direction (unit vector); gravitational force on mass m is +m g E3.
E3 = np.array([0.0, 0.0, 1.0])

#: Elements shorter than this are treated as collapsed; the elastic model is
#: singular there and the error is never regularized away.
COLLAPSE_LENGTH = 1e-12


class CollapsedElementError(ValueError):
    """An element has (numerically) zero length; the elastic force is undefined."""


def _as_vec3(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def _as_nodes(arr, name: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 2:
        raise ValueError(f"{name} must have shape (N+1, 3) with N >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


@dataclass
class PhysicalParams:
    """Material and body constants.

    mu_bar: string mass density per unit unstretched length (kg/m)
    l:      unstretched string length (m)
    EA:     axial stiffness, Young's modulus times cross-section (N)
    M:      rigid body mass (kg)
    rho_c:  body-frame vector from the attachment point to the center of mass (m)
    J:      body inertia matrix about the attachment point, body frame (kg m^2)
    g:      gravitational acceleration magnitude (m/s^2)
    """

    mu_bar: float
    l: float
    EA: float
    M: float
    rho_c: np.ndarray
    J: np.ndarray
    g: float = 9.81

    def __post_init__(self):
        for name in ("mu_bar", "l", "EA", "M"):
            val = float(getattr(self, name))
            setattr(self, name, val)
            if not val > 0.0:
                raise ValueError(f"{name} must be positive, got {val}")
        self.g = float(self.g)
        if self.g < 0.0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        self.rho_c = _as_vec3(self.rho_c, "rho_c")
        J = np.asarray(self.J, dtype=float)
        if J.shape != (3, 3):
            raise ValueError(f"J must be 3x3, got shape {J.shape}")
        if np.linalg.norm(J - J.T) > 1e-12:
            raise ValueError("J must be symmetric to 1e-12")
        if np.linalg.eigvalsh(J).min() <= 0.0:
            raise ValueError("J must be positive definite")
        self.J = J


class Discretization:
    """Element count, time step, and the per-element constants they imply.

    u = l/N (element rest length), m = mu_bar*u (element mass),
    kappa = EA/u (element stiffness), J_d = tr(J)/2 I - J (the nonstandard
    inertia appearing in the discrete rotational kinetic term tr[(I-F) J_d]).
    """

    def __init__(self, params: PhysicalParams, N: int, h: float):
        if int(N) != N or N < 2:
            raise ValueError(f"N must be an integer >= 2, got {N}")
        if not h > 0.0:
            raise ValueError(f"h must be positive, got {h}")
        self.N = int(N)
        self.h = float(h)
        self.u = params.l / self.N
        self.m = params.mu_bar * self.u
        self.kappa = params.EA / self.u
        J = params.J
        self.J_d = 0.5 * np.trace(J) * np.eye(3) - J
        if np.linalg.eigvalsh(self.J_d).min() <= 0.0:
            raise ValueError(
                "J_d = tr(J)/2 I - J is not positive definite; the eigenvalues of J "
                "must satisfy the triangle inequalities"
            )


@dataclass
class Configuration:
    """Discrete configuration: N+1 node positions plus the body attitude.

    Node 0 is the pivot and is pinned at the origin exactly.
    """

    nodes: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.nodes = _as_nodes(self.nodes, "nodes")
        if np.any(self.nodes[0] != 0.0):
            raise ValueError("nodes[0] must be exactly (0, 0, 0): the pivot is fixed")
        self.R = require_rotation(self.R, name="R")


@dataclass
class Update:
    """Group element advancing a Configuration: per-node displacement
    increments plus a relative rotation F (applied on the right)."""

    deltas: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        self.deltas = _as_nodes(self.deltas, "deltas")
        if np.any(self.deltas[0] != 0.0):
            raise ValueError("deltas[0] must be exactly (0, 0, 0): the pivot is fixed")
        self.F = require_rotation(self.F, name="F")


def apply_update(g: Configuration, f: Update) -> Configuration:
    """Group action g*f: translate the nodes, right-multiply the attitude."""
    if f.deltas.shape != g.nodes.shape:
        raise ValueError(
            f"update has {f.deltas.shape[0]} nodes, configuration has {g.nodes.shape[0]}"
        )
    return Configuration(nodes=g.nodes + f.deltas, R=g.R @ f.F)


@dataclass
class ContinuousState:
    """State of the semi-discrete (continuous-time) system: node positions and
    velocities, body attitude R, body-frame angular velocity Omega."""

    nodes: np.ndarray
    node_velocities: np.ndarray
    R: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        self.nodes = _as_nodes(self.nodes, "nodes")
        self.node_velocities = _as_nodes(self.node_velocities, "node_velocities")
        if self.node_velocities.shape != self.nodes.shape:
            raise ValueError("node_velocities must match nodes in shape")
        if np.any(self.nodes[0] != 0.0):
            raise ValueError("nodes[0] must be exactly (0, 0, 0): the pivot is fixed")
        if np.any(self.node_velocities[0] != 0.0):
            raise ValueError("node_velocities[0] must be exactly (0, 0, 0)")
        self.R = require_rotation(self.R, name="R")
        self.Omega = _as_vec3(self.Omega, "Omega")


def elastic_force_gradient(x, disc: Discretization) -> np.ndarray:
    """Gradient of the element elastic energy (1/2) kappa (|x| - u)^2 w.r.t. x.

    Returns kappa (|x| - u)/|x| x for the element vector x between adjacent
    nodes. Singular at |x| = 0 (collapsed element).
    """
    x = _as_vec3(x, "x")
    n = float(np.linalg.norm(x))
    if n <= COLLAPSE_LENGTH:
        raise CollapsedElementError(f"element length {n:.3e} m is collapsed")
    return (disc.kappa * (n - disc.u) / n) * x


def element_elastic_gradients(nodes: np.ndarray, disc: Discretization) -> np.ndarray:
    """Elastic-energy gradients of all N elements of a node array, shape (N, 3)."""
    x = np.diff(nodes, axis=0)
    lens = np.linalg.norm(x, axis=1)
    if lens.min() <= COLLAPSE_LENGTH:
        a = int(np.argmin(lens))
        raise CollapsedElementError(f"element {a} has collapsed (length {lens[a]:.3e} m)")
    return (disc.kappa * (lens - disc.u) / lens)[:, None] * x


def element_lengths(nodes: np.ndarray, check: bool = True) -> np.ndarray:
    """Lengths of all N elements; optionally reject collapsed ones."""
    lens = np.linalg.norm(np.diff(nodes, axis=0), axis=1)
    if check and lens.min() <= COLLAPSE_LENGTH:
        a = int(np.argmin(lens))
        raise CollapsedElementError(f"element {a} has collapsed (length {lens[a]:.3e} m)")
    return lens


@dataclass
class InitialConditions:
    """Initial-condition recipe for build_initial_state.

    layout: "straight_e1" lays the nodes along +e1 at rest length; or pass
    explicit positions via custom_nodes (pivot row must be zero).
    velocity_profile: "body_only" puts body_velocity on the last node alone;
    "linear_ramp" ramps it linearly from the pivot.
    attitude: "identity" or an explicit rotation matrix.
    """

    layout: str = "straight_e1"
    body_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    body_omega: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: object = "identity"
    velocity_profile: str = "body_only"
    custom_nodes: np.ndarray | None = None

    def __post_init__(self):
        self.body_velocity = _as_vec3(self.body_velocity, "body_velocity")
        self.body_omega = _as_vec3(self.body_omega, "body_omega")
        if self.layout not in ("straight_e1", "custom"):
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.velocity_profile not in ("body_only", "linear_ramp"):
            raise ValueError(f"unknown velocity_profile {self.velocity_profile!r}")
        if self.layout == "custom" and self.custom_nodes is None:
            raise ValueError("layout 'custom' requires custom_nodes")


def build_initial_state(
    params: PhysicalParams, disc: Discretization, ic: InitialConditions
) -> ContinuousState:
    """Construct the initial ContinuousState from an InitialConditions recipe.

    Default recipe: nodes along +e1 at rest spacing, everything at rest except
    the last node, which carries the body velocity; R = I; Omega = body_omega.
    """
    n = disc.N + 1
    if ic.layout == "straight_e1":
        nodes = np.zeros((n, 3))
        nodes[:, 0] = disc.u * np.arange(n)
    else:
        nodes = _as_nodes(ic.custom_nodes, "custom_nodes")
        if nodes.shape[0] != n:
            raise ValueError(f"custom_nodes must have {n} rows, got {nodes.shape[0]}")
        if np.any(nodes[0] != 0.0):
            raise ValueError("custom_nodes[0] must be exactly (0, 0, 0): the pivot is fixed")

    vel = np.zeros((n, 3))
    if ic.velocity_profile == "body_only":
        vel[-1] = ic.body_velocity
    else:
        vel[:] = (np.arange(n) / disc.N)[:, None] * ic.body_velocity

    if isinstance(ic.attitude, str):
        if ic.attitude != "identity":
            raise ValueError(f"unknown attitude {ic.attitude!r}")
        R = np.eye(3)
    else:
        R = require_rotation(ic.attitude, name="attitude")

    return ContinuousState(nodes=nodes, node_velocities=vel, R=R, Omega=ic.body_omega)
