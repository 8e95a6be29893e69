"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Time-limited criteria run their sanctioned CI variants (T = 0.5 s instead of
the full T = 5 s); set STRINGPEND_ACCEPTANCE_FULL=1 to run the full-length
orthogonality criterion as well (about a minute of extra wall time).
Run with `pytest tests/test_acceptance.py -v -s` to see the summary lines.
"""

import os

import numpy as np
import pytest

from stringpend.diagnostics import discrete_angular_momentum_e3, discrete_energy
from stringpend.lgvi import (
    LgviStepper,
    SolverOptions,
    discrete_lagrangian,
    node_residuals,
    rotation_residual,
    solve_rotation_update,
)
from stringpend.model import (
    Configuration,
    Discretization,
    InitialConditions,
    PhysicalParams,
    Update,
    build_initial_state,
)
from stringpend.refint import SemiDiscreteSystem, rk4_step
from stringpend.so3 import (
    cayley,
    cayley_inv,
    exp_so3,
    hat,
    log_so3,
    orthogonality_error,
    vee,
)

from conftest import BODY_V0, RUBBER

RUN_FULL = os.environ.get("STRINGPEND_ACCEPTANCE_FULL", "") == "1"


def reference_setup(h=1e-4, N=20):
    params = PhysicalParams(**RUBBER)
    disc = Discretization(params, N=N, h=h)
    state0 = build_initial_state(params, disc, InitialConditions(body_velocity=BODY_V0))
    return params, disc, state0


def lgvi_series(T, h, opts=None):
    """Per-step (energy, momentum, orthogonality, fp_iters) on the scenario."""
    params, disc, state0 = reference_setup(h=h)
    st = LgviStepper(params, disc, state0, opts)
    K = int(round(T / h))
    E = np.empty(K)
    W = np.empty(K)
    orth = orthogonality_error(st.previous.R)
    fp_max = 0
    E[0] = discrete_energy(st.previous, st.previous_update, params, disc).total
    W[0] = discrete_angular_momentum_e3(st.previous, st.previous_update, params, disc)
    for k in range(1, K):
        f = st.step()
        E[k] = discrete_energy(st.previous, f, params, disc).total
        W[k] = discrete_angular_momentum_e3(st.previous, f, params, disc)
        orth = max(orth, orthogonality_error(st.previous.R))
        fp_max = max(fp_max, st.last_fp_iters)
    orth = max(orth, orthogonality_error(st.current.R))
    return E, W, orth, fp_max


def report(num, name, ok, detail):
    print(f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} — {detail}")
    return ok


def test_criterion_1_orthogonality_ci():
    T = 0.5
    _, _, orth, fp_max = lgvi_series(T, 1e-4)
    ok = orth < 2e-13
    report(1, f"orthogonality, T={T}s CI variant", ok, f"max ||I - R^T R|| = {orth:.3e} < 2e-13")
    assert ok
    assert fp_max <= 10


@pytest.mark.skipif(not RUN_FULL, reason="set STRINGPEND_ACCEPTANCE_FULL=1 for the T=5 s run")
def test_criterion_1_orthogonality_full():
    _, _, orth, _ = lgvi_series(5.0, 1e-4)
    ok = orth < 2e-13
    report(1, "orthogonality, full T=5s", ok, f"max ||I - R^T R|| = {orth:.3e} < 2e-13")
    assert ok


def test_criterion_2_energy_bounded_oscillation():
    T = 0.5
    E_h, _, _, _ = lgvi_series(T, 1e-4)
    E_h2, _, _, _ = lgvi_series(T, 5e-5)

    def slope_amp(E, h):
        t = np.arange(E.size) * h
        slope = np.polyfit(t, E, 1)[0]
        amp = 0.5 * (E.max() - E.min())
        return abs(slope), amp

    slope, amp = slope_amp(E_h, 1e-4)
    _, amp2 = slope_amp(E_h2, 5e-5)
    ratio = amp / amp2
    ok = slope * T <= amp and 3.0 <= ratio <= 5.0
    report(
        2, "energy: bounded oscillation, 2nd-order envelope", ok,
        f"|slope|*T = {slope * T:.3e} <= amp = {amp:.3e}; amp(h)/amp(h/2) = {ratio:.2f} in [3, 5]",
    )
    assert slope * T <= amp
    assert 3.0 <= ratio <= 5.0


def test_criterion_3_momentum_solver_tolerance_limited():
    T = 0.5
    devs = []
    for tol in (1e-8, 1e-10, 1e-12):
        opts = SolverOptions(fixed_point_tol=tol, newton_tol=tol)
        _, W, _, _ = lgvi_series(T, 1e-4, opts)
        devs.append(float(np.max(np.abs(W - W[0]))))
    r1 = devs[0] / devs[1]
    r2 = devs[1] / devs[2]
    ok = r1 >= 5.0 and r2 >= 5.0
    report(
        3, "momentum deviation scales with solver tolerance", ok,
        f"dev(1e-8)={devs[0]:.2e}, dev(1e-10)={devs[1]:.2e}, dev(1e-12)={devs[2]:.2e}; "
        f"ratios {r1:.1f}x, {r2:.1f}x >= 5x",
    )
    assert ok


def test_criterion_4_derivative_oracle_suite():
    rng = np.random.default_rng(101)
    params = PhysicalParams(**RUBBER)
    N = 4
    disc = Discretization(params, N=N, h=0.01)
    eps = 1e-6

    def random_nodes():
        nodes = np.zeros((N + 1, 3))
        nodes[1:, 0] = disc.u * np.arange(1, N + 1)
        nodes[1:] += 0.3 * disc.u * rng.standard_normal((N, 3))
        return nodes

    def action(r_prev, r, r_next, F_prev, F, R_prev):
        R = R_prev @ F_prev
        g_prev = Configuration(nodes=r_prev, R=R_prev)
        g = Configuration(nodes=r, R=R)
        f_prev = Update(deltas=r - r_prev, F=F_prev)
        f_cur = Update(deltas=r_next - r, F=F)
        return discrete_lagrangian(g_prev, f_prev, params, disc) + discrete_lagrangian(
            g, f_cur, params, disc
        )

    worst_node = worst_rot = 0.0
    for _ in range(100):
        r_prev, r, r_next = random_nodes(), random_nodes(), random_nodes()
        R_prev = exp_so3(rng.standard_normal(3))
        F_prev = exp_so3(0.1 * rng.standard_normal(3))
        F = exp_so3(0.1 * rng.standard_normal(3))
        R = R_prev @ F_prev
        g_prev = Configuration(nodes=r_prev, R=R_prev)
        g = Configuration(nodes=r, R=R)
        g_next = Configuration(nodes=r_next, R=R @ F)

        res = node_residuals(g_prev, g, g_next, F, params, disc)
        fd = np.zeros_like(res)
        for a in range(1, N + 1):
            for i in range(3):
                rp, rm = r.copy(), r.copy()
                rp[a, i] += eps
                rm[a, i] -= eps
                sp = action(r_prev, rp, r_next, F_prev, F, R_prev)
                sm = action(r_prev, rm, r_next, F_prev, F, R_prev)
                fd[a - 1, i] = -(sp - sm) / (2.0 * eps)
        worst_node = max(
            worst_node, float(np.max(np.abs(fd - res))) / max(1.0, float(np.max(np.abs(res))))
        )

        dd_last = (r_next[-1] - r[-1]) - (r[-1] - r_prev[-1])
        rres = rotation_residual(F, F_prev, R, dd_last, params, disc)
        fdr = np.zeros(3)
        for i in range(3):
            eta = np.zeros(3)
            eta[i] = eps
            ep, em = exp_so3(eta), exp_so3(-eta)
            sp = action(r_prev, r, r_next, F_prev @ ep, ep.T @ F, R_prev)
            sm = action(r_prev, r, r_next, F_prev @ em, em.T @ F, R_prev)
            fdr[i] = -(sp - sm) / (2.0 * eps)
        worst_rot = max(
            worst_rot, float(np.max(np.abs(fdr - rres))) / max(1.0, float(np.max(np.abs(rres))))
        )

    ok = worst_node < 1e-6 and worst_rot < 1e-6
    report(
        4, "derivative oracle, 100 random pairs", ok,
        f"node rel err {worst_node:.2e}, rotation rel err {worst_rot:.2e} < 1e-6",
    )
    assert ok


def test_criterion_5_cross_integrator_agreement():
    h = 1e-5
    T = 0.1
    params, disc, state0 = reference_setup(h=h)
    sys_ = SemiDiscreteSystem(params, disc)
    stepper = LgviStepper(params, disc, state0)
    state = state0
    K = int(round(T / h))
    max_node = max_att = 0.0
    for k in range(1, K + 1):
        state = rk4_step(state, h, sys_)
        if k >= 2:
            stepper.step()
        g = stepper.current  # g_k after k-1 steps
        max_node = max(max_node, float(np.max(np.linalg.norm(g.nodes - state.nodes, axis=1))))
        max_att = max(max_att, float(np.linalg.norm(log_so3(g.R.T @ state.R))))
    ok = max_node <= 1e-5 and max_att <= 1e-5
    report(
        5, "LGVI vs RK4 over 0.1 s at h=dt=1e-5", ok,
        f"max node diff {max_node:.3e} m <= 1e-5; attitude diff {max_att:.3e} rad <= 1e-5",
    )
    assert ok


def test_criterion_6_equilibrium_and_decoupling():
    # (a) zero gravity, natural length, centered attachment, at rest:
    #     step returns the identity update exactly
    p = PhysicalParams(**{**RUBBER, "g": 0.0, "rho_c": np.zeros(3)})
    d = Discretization(p, N=8, h=1e-3)
    s0 = build_initial_state(p, d, InitialConditions())
    st = LgviStepper(p, d, s0)
    f = st.step()
    eq_ok = bool(np.all(f.deltas == 0.0) and np.array_equal(f.F, np.eye(3)))

    # (b) centered attachment decouples the rotation update into free
    #     rigid-body motion: inertial body momentum constant per step
    h = 1e-3
    d2 = Discretization(p, N=2, h=h)
    opts = SolverOptions(newton_tol=1e-13, fixed_point_tol=1e-13)

    def momentum(F):
        B = (F - np.eye(3)) @ d2.J_d
        return vee(B - B.T) / h

    F = exp_so3(h * np.array([2.0, -1.0, 1.5]))
    R = np.eye(3)
    mu_prev = R @ momentum(F)
    worst = 0.0
    for _ in range(200):
        F_new = solve_rotation_update(F, R @ F, np.zeros(3), p, d2, opts)
        R = R @ F
        mu = R @ momentum(F_new)
        worst = max(worst, float(np.max(np.abs(mu - mu_prev))))
        mu_prev = mu
        F = F_new
    mom_ok = worst < 1e-12

    ok = eq_ok and mom_ok
    report(
        6, "equilibrium fixed point and free-body decoupling", ok,
        f"identity update exact: {eq_ok}; per-step momentum change {worst:.2e} < 1e-12",
    )
    assert eq_ok
    assert mom_ok


def test_criterion_7_so3_kernel_suite():
    rng = np.random.default_rng(202)
    n = 10_000
    worst_hatvee = worst_orth = worst_det = worst_roundtrip = worst_cross = 0.0
    for _ in range(n):
        v = rng.standard_normal(3)
        v *= rng.uniform(0.0, 3.0) / max(np.linalg.norm(v), 1e-300)  # |v| <= 3
        w = rng.standard_normal(3)
        S = hat(v)
        worst_hatvee = max(worst_hatvee, float(np.max(np.abs(vee(S) - v))))
        worst_cross = max(worst_cross, float(np.max(np.abs(S @ w - np.cross(v, w)))))
        R_c = cayley(v)
        R_e = exp_so3(v)
        worst_orth = max(worst_orth, orthogonality_error(R_c), orthogonality_error(R_e))
        worst_det = max(
            worst_det,
            abs(np.linalg.det(R_c) - 1.0),
            abs(np.linalg.det(R_e) - 1.0),
        )
        worst_roundtrip = max(
            worst_roundtrip,
            float(np.max(np.abs(cayley_inv(R_c) - v))),
            float(np.max(np.abs(log_so3(R_e) - v))),
        )
    ok = (
        worst_hatvee == 0.0
        and worst_cross < 1e-13
        and worst_orth <= 1e-13
        and worst_det <= 1e-13
        and worst_roundtrip < 1e-12
    )
    report(
        7, "SO(3) kernels on 1e4 random inputs", ok,
        f"hat/vee exact; cross {worst_cross:.1e}; orth {worst_orth:.1e} <= 1e-13; "
        f"det {worst_det:.1e}; round trips {worst_roundtrip:.1e}",
    )
    assert ok
