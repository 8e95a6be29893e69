"""Lie group variational integrator for the elastic-string-and-rigid-body chain.

The discrete trajectory lives on G = (R^3)^(N+1) x SO(3): a configuration
g_k = (r_1..r_{N+1}, R) is advanced by an update f_k = (dr_1..dr_{N+1}, F)
through the group action r -> r + dr, R -> R F. The update is the solution of
the discrete Euler-Lagrange equations of a trapezoidal discrete Lagrangian:

* the node displacement increments solve a constant symmetric-positive-definite
  tridiagonal system (factored once per run, applied to three coordinate
  columns per solve);
* the relative rotation F solves a 3-dimensional implicit equation, handled by
  Newton iteration on its Cayley parameter with a finite-difference Jacobian;
* the two solves alternate in a fixed-point loop until the Cayley parameter of
  F settles.

Because the attitude is only ever updated by multiplying rotation matrices,
orthogonality is preserved to accumulated round-off; no projection is applied
anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .model import (
    E3,
    CollapsedElementError,
    Configuration,
    ContinuousState,
    Discretization,
    PhysicalParams,
    Update,
    apply_update,
    element_elastic_gradients,
    element_lengths,
)
from .so3 import cayley, cayley_inv, exp_so3, vee

_EYE3 = np.eye(3)

#: Forward-difference step for the Newton Jacobian on the Cayley parameter.
JACOBIAN_FD_STEP = 1e-7


class ConvergenceError(RuntimeError):
    """An implicit solve failed to reach its tolerance within its iteration cap."""

    def __init__(self, message, step_index=None, iterations=None, residual_norm=None):
        super().__init__(message)
        self.step_index = step_index
        self.iterations = iterations
        self.residual_norm = residual_norm


@dataclass
class SolverOptions:
    """Tolerances and iteration caps for the implicit step.

    fixed_point_tol bounds the max-norm change of the Cayley parameter of F
    between fixed-point sweeps; newton_tol bounds the rotation residual norm.
    """

    fixed_point_tol: float = 1e-12
    newton_tol: float = 1e-12
    max_fixed_point_iters: int = 50
    max_newton_iters: int = 50

    def __post_init__(self):
        if not (self.fixed_point_tol > 0.0 and self.newton_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_fixed_point_iters < 1 or self.max_newton_iters < 1:
            raise ValueError("iteration caps must be >= 1")


def _string_ld(nodes, deltas, params: PhysicalParams, disc: Discretization) -> float:
    """String contribution to the discrete Lagrangian (any chain of >= 2 nodes)."""
    h, m, u, kappa = disc.h, disc.m, disc.u, disc.kappa
    d0, d1 = deltas[:-1], deltas[1:]
    len_start = element_lengths(nodes)
    len_end = element_lengths(nodes + deltas)
    kinetic = (m / (6.0 * h)) * float(
        np.einsum("ij,ij->", d0, d0)
        + np.einsum("ij,ij->", d0, d1)
        + np.einsum("ij,ij->", d1, d1)
    )
    gravity = (h / 4.0) * m * params.g * float(
        np.sum((2.0 * nodes[:-1] + 2.0 * nodes[1:] + d0 + d1) @ E3)
    )
    elastic = -(h / 4.0) * kappa * float(
        np.sum((len_start - u) ** 2) + np.sum((len_end - u) ** 2)
    )
    return kinetic + gravity + elastic


def _body_ld(r_end, d_end, R, F, params: PhysicalParams, disc: Discretization) -> float:
    """Rigid-body contribution to the discrete Lagrangian."""
    h, J_d = disc.h, disc.J_d
    M, rc, g = params.M, params.rho_c, params.g
    # tr[(I - F) J_d] with J_d symmetric.
    rot_kinetic = -float(np.sum((F - _EYE3) * J_d)) / h
    return (
        (M / (2.0 * h)) * float(d_end @ d_end)
        + rot_kinetic
        + (M / h) * float(d_end @ (R @ ((F - _EYE3) @ rc)))
        + (h / 2.0) * M * g * float((r_end + R @ rc) @ E3)
        + (h / 2.0) * M * g * float((r_end + d_end + R @ (F @ rc)) @ E3)
    )


def discrete_lagrangian(
    g: Configuration, f: Update, params: PhysicalParams, disc: Discretization
) -> float:
    """Discrete Lagrangian L_d(g, f): trapezoidal one-step action approximation.

    Per element: consistent-mass kinetic term (m/6h)(|dr_a|^2 + dr_a.dr_{a+1}
    + |dr_{a+1}|^2), trapezoidal gravity and elastic terms at both step
    endpoints. The body adds its translational and rotational kinetic terms
    (the latter as tr[(I-F) J_d]/h), the coupling through rho_c, and its
    trapezoidal gravity term.
    """
    return _string_ld(g.nodes, f.deltas, params, disc) + _body_ld(
        g.nodes[-1], f.deltas[-1], g.R, f.F, params, disc
    )


def node_residuals(
    g_prev: Configuration,
    g: Configuration,
    g_next_candidate: Configuration,
    F,
    params: PhysicalParams,
    disc: Discretization,
) -> np.ndarray:
    """Discrete Euler-Lagrange residuals of the node equations, rows a = 2..N+1.

    With dd_a = r_next,a - 2 r_a + r_prev,a and elastic gradients taken on the
    middle configuration g:

        interior a:  (m/6h)(dd_{a-1} + 4 dd_a + dd_{a+1}) - h m g e3
                     + h grad_{a-1} - h grad_a
        last node:   ((M + m/3)/h) dd_{N+1} + (m/6h) dd_N + h grad_N
                     + (M/h)(R F - 2R + R_prev) rho_c - h (M + m/2) g e3

    R_prev comes from stored history (g_prev.R), never from reconstruction.
    """
    h, m, N = disc.h, disc.m, disc.N
    M, rc, grav = params.M, params.rho_c, params.g
    dd = g_next_candidate.nodes - 2.0 * g.nodes + g_prev.nodes
    grads = element_elastic_gradients(g.nodes, disc)

    res = np.empty((N, 3))
    c = m / (6.0 * h)
    res[:-1] = (
        c * (dd[:-2] + 4.0 * dd[1:-1] + dd[2:])
        - h * m * grav * E3
        + h * (grads[:-1] - grads[1:])
    )
    res[-1] = (
        ((M + m / 3.0) / h) * dd[-1]
        + c * dd[-2]
        + h * grads[-1]
        + (M / h) * (g.R @ ((np.asarray(F) - _EYE3) @ rc) - (g.R - g_prev.R) @ rc)
        - h * (M + m / 2.0) * grav * E3
    )
    return res


def rotation_residual(
    F, F_prev, R, dd_r_last, params: PhysicalParams, disc: Discretization
) -> np.ndarray:
    """Left-hand side of the implicit attitude-update equation as a 3-vector:

        (1/h)(F J_d - J_d F^T - J_d F_prev + F_prev^T J_d)^vee
        + (M/h) rho_c x (R^T dd_r) - h M g rho_c x (R^T e3)

    The skew bracket is assembled from (F - I) J_d and J_d (F_prev - I), which
    is algebraically identical but avoids the cancellation of O(1) entries that
    would otherwise cap the attainable residual near 1e-16/h.
    """
    h, J_d = disc.h, disc.J_d
    M, rc, g = params.M, params.rho_c, params.g
    B = (np.asarray(F) - _EYE3) @ J_d  # F J_d - J_d F^T   == B - B^T
    C = J_d @ (np.asarray(F_prev) - _EYE3)  # J_d F_prev - F_prev^T J_d == C - C^T
    D = B - C
    w = np.asarray(R).T @ ((M / h) * np.asarray(dd_r_last) - h * M * g * E3)
    return vee(D - D.T) / h + np.cross(rc, w)


class NodeMassFactor:
    """Cholesky factorization of the constant node-update coefficient matrix.

    The unknown increments (dr_2 .. dr_{N+1}) are acted on by T (x) I_3 with T
    the N x N symmetric tridiagonal whose interior rows are
    (m/6h, 4m/6h, m/6h) and whose last diagonal entry is (M + m/3)/h. T is
    positive definite for any positive masses, so it is factored once and the
    three coordinate columns are back-substituted per solve.
    """

    def __init__(self, params: PhysicalParams, disc: Discretization):
        N, h, m = disc.N, disc.h, disc.m
        diagonal = np.full(N, 4.0 * m / (6.0 * h))
        diagonal[-1] = (params.M + m / 3.0) / h
        off_diagonal = np.full(N - 1, m / (6.0 * h))
        ab = np.zeros((2, N))
        ab[0, 1:] = off_diagonal
        ab[1] = diagonal
        self.diagonal = diagonal
        self.off_diagonal = off_diagonal
        self._cb = cholesky_banded(ab)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self._cb, False), rhs)

    def dense(self) -> np.ndarray:
        """Dense T, for inspection and tests."""
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )


def assemble_and_factor_mass(params: PhysicalParams, disc: Discretization) -> NodeMassFactor:
    """Build and factor the constant node-update matrix (reused every step)."""
    return NodeMassFactor(params, disc)


def solve_node_updates(stepper, F_candidate, params: PhysicalParams, disc: Discretization) -> np.ndarray:
    """Solve the node equations for the displacement increments, given F.

    All F-dependence and known history sit on the right-hand side; the solve
    itself reuses the prefactored constant matrix. Returns an (N+1, 3) array
    whose pivot row is zero.
    """
    h, m, N = disc.h, disc.m, disc.N
    M, rc, grav = params.M, params.rho_c, params.g
    cur, prev = stepper.current, stepper.previous
    dp = stepper.previous_update.deltas
    grads = element_elastic_gradients(cur.nodes, disc)

    rhs = np.empty((N, 3))
    c = m / (6.0 * h)
    rhs[:-1] = (
        c * (dp[:-2] + 4.0 * dp[1:-1] + dp[2:])
        + h * m * grav * E3
        + h * (grads[1:] - grads[:-1])
    )
    rhs[-1] = (
        ((M + m / 3.0) / h) * dp[-1]
        + c * dp[-2]
        - h * grads[-1]
        + h * (M + m / 2.0) * grav * E3
        - (M / h) * (cur.R @ ((np.asarray(F_candidate) - _EYE3) @ rc) - (cur.R - prev.R) @ rc)
    )
    sol = stepper.factored_mass.solve(rhs)
    return np.vstack([np.zeros(3), sol])


def solve_rotation_update(
    F_prev,
    R,
    dd_r_last,
    params: PhysicalParams,
    disc: Discretization,
    opts: SolverOptions,
    F_guess=None,
) -> np.ndarray:
    """Newton-solve the implicit attitude update on the Cayley parameter of F.

    Starts from F_guess (default: F_prev). The 3x3 Jacobian is built by forward
    finite differences on the Cayley parameter and refactored each iteration.
    Raises ConvergenceError if the residual norm does not fall below
    opts.newton_tol within opts.max_newton_iters updates.
    """
    x = cayley_inv(F_prev if F_guess is None else F_guess)
    res = rotation_residual(cayley(x), F_prev, R, dd_r_last, params, disc)
    for _ in range(opts.max_newton_iters):
        if np.linalg.norm(res) <= opts.newton_tol:
            return cayley(x)
        jac = np.empty((3, 3))
        for i in range(3):
            xp = x.copy()
            xp[i] += JACOBIAN_FD_STEP
            res_p = rotation_residual(cayley(xp), F_prev, R, dd_r_last, params, disc)
            jac[:, i] = (res_p - res) / JACOBIAN_FD_STEP
        x = x - np.linalg.solve(jac, res)
        res = rotation_residual(cayley(x), F_prev, R, dd_r_last, params, disc)
    nrm = float(np.linalg.norm(res))
    if nrm <= opts.newton_tol:
        return cayley(x)
    raise ConvergenceError(
        f"rotation Newton solve stalled at residual norm {nrm:.3e} "
        f"(tol {opts.newton_tol:.1e}) after {opts.max_newton_iters} iterations",
        iterations=opts.max_newton_iters,
        residual_norm=nrm,
    )


def initialize_first_update(
    state0: ContinuousState, params: PhysicalParams, disc: Discretization
) -> Update:
    """First update f_0 from a continuous initial state: dr = h v, F = exp(h Omega).

    First-order consistent with the continuous initial condition; the
    discrete Euler-Lagrange recursion takes over from there.
    """
    return Update(
        deltas=disc.h * state0.node_velocities, F=exp_so3(disc.h * state0.Omega)
    )


class LgviStepper:
    """Driver for the discrete trajectory.

    Holds (g_{k-1}, g_k, f_{k-1}) explicitly plus the prefactored node-update
    matrix. step() computes f_k by the fixed-point/Newton scheme, advances
    g_{k+1} = g_k * f_k by the group action, and returns f_k. A stepper
    instance is single-writer: do not call step() concurrently on one
    instance; distinct instances are independent.
    """

    def __init__(
        self,
        params: PhysicalParams,
        disc: Discretization,
        state0: ContinuousState,
        opts: SolverOptions | None = None,
    ):
        self.params = params
        self.disc = disc
        self.opts = opts if opts is not None else SolverOptions()
        f0 = initialize_first_update(state0, params, disc)
        g0 = Configuration(nodes=state0.nodes.copy(), R=state0.R.copy())
        self.previous = g0
        self.current = apply_update(g0, f0)
        self.previous_update = f0
        self.factored_mass = assemble_and_factor_mass(params, disc)
        self.step_index = 1
        self.last_fp_iters = 0

    def step(self) -> Update:
        """Advance one step; returns the converged update f_k for g_k = current."""
        p, d, o = self.params, self.disc, self.opts
        R = self.current.R
        F_prev = self.previous_update.F
        dp_last = self.previous_update.deltas[-1]

        x = cayley_inv(F_prev)  # warm start from the previous relative rotation
        F = cayley(x)
        try:
            for it in range(1, o.max_fixed_point_iters + 1):
                deltas = solve_node_updates(self, F, p, d)
                dd_last = deltas[-1] - dp_last
                F_new = solve_rotation_update(F_prev, R, dd_last, p, d, o, F_guess=F)
                x_new = cayley_inv(F_new)
                dx = float(np.max(np.abs(x_new - x)))
                x, F = x_new, F_new
                if dx <= o.fixed_point_tol:
                    break
            else:
                raise ConvergenceError(
                    f"fixed-point iteration on F did not converge within "
                    f"{o.max_fixed_point_iters} sweeps (last change {dx:.3e})",
                    iterations=o.max_fixed_point_iters,
                )
        except ConvergenceError as e:
            raise ConvergenceError(
                f"step {self.step_index}: {e}",
                step_index=self.step_index,
                iterations=e.iterations,
                residual_norm=e.residual_norm,
            ) from e
        except CollapsedElementError as e:
            raise CollapsedElementError(f"step {self.step_index}: {e}") from e

        self.last_fp_iters = it
        # Re-solve the nodes once with the converged F so the returned update
        # satisfies the node equations exactly (direct solve).
        deltas = solve_node_updates(self, F, p, d)
        f = Update(deltas=deltas, F=F)
        g_next = apply_update(self.current, f)
        self.previous = self.current
        self.current = g_next
        self.previous_update = f
        self.step_index += 1
        return f
