"""Acceptance gate: one test per shipped claim, at the stated tolerances.

Each ``test_criterion_XX_*`` function is a single pass/fail line under
``pytest -v``.  Long brute-force runs are shared through module-scoped
fixtures; every analytic claim is exercised against the full density-matrix
simulation, never against itself.
"""

import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from tinyheat.dynamics import (
    IntegratorConfig,
    default_dt,
    fit_coherence_decay_rate,
    fit_drift_diffusion,
    integrate,
)
from tinyheat.operators import build_qutrit, build_two_qubit, thermal_product_state
from tinyheat.params import (
    LadderWindow,
    QutritEngineParams,
    TwoQubitEngineParams,
    thermal_population,
)
from tinyheat.reduced import (
    ReducedStateQutrit,
    ReducedStateTwoQubit,
    characteristic_roots,
    delta_infinity,
    gamma_infinity,
    lifting_condition_qutrit,
    qutrit_stationary,
    reduced_rhs_qutrit,
    reduced_rhs_two_qubit,
    work_rate_qutrit,
    work_rate_two_qubit,
)
from tinyheat.thermo import carnot_sweep, heat_current_asymptote

REFERENCE_PARAMS = TwoQubitEngineParams(
    E1=1.0, E2=2.0, g=0.1, p1=0.1, p2=0.1, Tc=1.0, Th=4.0
)
QUTRIT_PARAMS = QutritEngineParams(
    E1=1.0, E2=1.0, g=0.05, pc=0.1, pr=0.1, ph=0.1, Tc=1.0, Tr=20.0, Th=10.0
)


def _run(model, icfg):
    traj = integrate(model, thermal_product_state(model), icfg)
    return traj


def _fit_mask(traj, fraction=0.5):
    t = traj.t
    return t >= t[-1] - fraction * (t[-1] - t[0])


@pytest.fixture(scope="module")
def reference():
    """The acceptance run: E1=1, E2=2, g=p1=p2=0.1, Tc=1, Th=4, n in [-20, 60]."""
    params = REFERENCE_PARAMS
    window = LadderWindow(n_min=-20, n_max=60, spacing=params.ladder_spacing)
    model = build_two_qubit(params, window)
    icfg = IntegratorConfig(dt=default_dt(params), t_max=500.0)
    start = time.perf_counter()
    traj = _run(model, icfg)
    runtime = time.perf_counter() - start
    fit = fit_drift_diffusion(traj, window_fraction=0.5)
    return SimpleNamespace(
        params=params, model=model, traj=traj, fit=fit, runtime=runtime
    )


@pytest.fixture(scope="module")
def transient_run():
    """Unequal reset rates so every characteristic root moves the coherence."""
    params = TwoQubitEngineParams(
        E1=1.0, E2=2.0, g=0.05, p1=0.1, p2=0.05, Tc=1.0, Th=4.0
    )
    window = LadderWindow(n_min=-15, n_max=40, spacing=params.ladder_spacing)
    model = build_two_qubit(params, window)
    icfg = IntegratorConfig(dt=default_dt(params), t_max=150.0)
    traj = _run(model, icfg)
    return SimpleNamespace(params=params, traj=traj)


@pytest.fixture(scope="module")
def qutrit_reference():
    """The qutrit acceptance run: E1=E2=1, Tc=1, Tr=20, Th=10, p=0.1, g=0.05."""
    params = QUTRIT_PARAMS
    window = LadderWindow(n_min=-15, n_max=20, spacing=params.ladder_spacing)
    model = build_qutrit(params, window)
    icfg = IntegratorConfig(dt=0.01, t_max=500.0)
    traj = _run(model, icfg)
    fit = fit_drift_diffusion(traj, window_fraction=0.5)
    return SimpleNamespace(params=params, model=model, traj=traj, fit=fit)


@pytest.fixture(scope="module")
def fine_runs():
    """Short, densely recorded runs of both models for derivative checks."""
    two_params = REFERENCE_PARAMS
    two_model = build_two_qubit(
        two_params, LadderWindow(n_min=-10, n_max=14, spacing=two_params.ladder_spacing)
    )
    two_traj = _run(
        two_model, IntegratorConfig(dt=default_dt(two_params), t_max=30.0, record_every=20)
    )
    qu_params = QUTRIT_PARAMS
    qu_model = build_qutrit(
        qu_params, LadderWindow(n_min=-15, n_max=20, spacing=qu_params.ladder_spacing)
    )
    qu_traj = _run(qu_model, IntegratorConfig(dt=0.01, t_max=30.0, record_every=10))
    return SimpleNamespace(
        two=SimpleNamespace(params=two_params, traj=two_traj),
        qutrit=SimpleNamespace(params=qu_params, traj=qu_traj),
    )


def test_criterion_01_two_qubit_work_rate(reference):
    expected = work_rate_two_qubit(reference.params)
    assert expected == pytest.approx(3.62e-3, rel=1e-3)
    drift = reference.fit.drift
    assert drift == pytest.approx(expected, rel=1e-2), (
        f"fitted drift {drift:.6e} vs closed form {expected:.6e}"
    )
    assert reference.runtime < 300.0, (
        f"reference run took {reference.runtime:.1f} s (target: under 5 minutes)"
    )


def test_criterion_02_population_asymptotes(reference):
    g1, g2 = gamma_infinity(reference.params)
    assert abs(reference.traj.gamma1[-1] - g1) < 1e-3
    assert abs(reference.traj.gamma2[-1] - g2) < 1e-3


def test_criterion_03_first_law(reference):
    params = reference.params
    w_cf = work_rate_two_qubit(params)
    q_c_cf = heat_current_asymptote(params, 1)
    q_h_cf = heat_current_asymptote(params, 2)
    assert abs(q_c_cf + q_h_cf - w_cf) < 1e-12
    mask = _fit_mask(reference.traj)
    q_sum = float(np.mean(reference.traj.q_c[mask] + reference.traj.q_h[mask]))
    assert abs(q_sum - reference.fit.drift) < 0.01 * abs(w_cf)


def test_criterion_04_efficiency_and_carnot_approach(reference):
    mask = _fit_mask(reference.traj)
    q_h = float(np.mean(reference.traj.q_h[mask]))
    eta_sim = reference.fit.drift / q_h
    assert eta_sim == pytest.approx(0.5, rel=1e-2)
    assert eta_sim < 0.75
    # Th sweep down to the zero-bias point: work rate and the distance to
    # Carnot both shrink monotonically, hitting zero exactly at Th = 2.
    result = carnot_sweep(reference.params, np.linspace(4.0, 2.0, 20))
    work = [row.work_rate for row in result.rows]
    gaps = [row.eta_carnot - row.eta_ideal for row in result.rows]
    assert all(row.eta_ideal == pytest.approx(0.5, abs=1e-15) for row in result.rows)
    assert all(a > b for a, b in zip(work, work[1:]))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert work[-1] == pytest.approx(0.0, abs=1e-15)
    assert gaps[-1] == pytest.approx(0.0, abs=1e-15)


def test_criterion_05_random_walk_spreading(reference):
    assert reference.fit.diffusion_slope > 0.0
    assert reference.fit.r_squared_diffusion > 0.99


def test_criterion_06_transient_decay_rate(transient_run):
    params = transient_run.params
    roots = characteristic_roots(params.p1, params.p2, params.g).lambdas
    expected_rate = -max(lam.real for lam in roots)
    fitted = fit_coherence_decay_rate(transient_run.traj, delta_infinity(params))
    assert fitted == pytest.approx(expected_rate, rel=0.05), (
        f"fitted {fitted:.6f} vs slowest root {expected_rate:.6f}"
    )
    # stability across parameter space: every root decays
    rng = np.random.default_rng(20260823)
    for _ in range(1000):
        p1, p2, g = 10.0 ** rng.uniform(-3, 0, size=3)
        roots = characteristic_roots(p1, p2, g).lambdas
        assert all(lam.real < 0 for lam in roots)


def test_criterion_07_qutrit_work_rate_and_lifting_sign(qutrit_reference):
    params = qutrit_reference.params
    expected = work_rate_qutrit(params)
    assert qutrit_reference.fit.drift == pytest.approx(expected, rel=2e-2), (
        f"fitted drift {qutrit_reference.fit.drift:.6e} vs general formula {expected:.6e}"
    )
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(200):
        tc, tr, th = rng.uniform(0.5, 30.0, size=3)
        p = QutritEngineParams(
            E1=1.0, E2=1.0, g=0.05, pc=0.1, pr=0.1, ph=0.1, Tc=tc, Tr=tr, Th=th
        )
        w = work_rate_qutrit(p)
        if w == 0.0:
            continue
        assert (w > 0) == lifting_condition_qutrit(p).general
        checked += 1
    assert checked >= 199


def test_criterion_08_equal_rates_identity():
    rng = np.random.default_rng(8)
    e1 = e2 = 1.0
    for _ in range(1000):
        tc, tr, th = rng.uniform(0.3, 40.0, size=3)
        p = QutritEngineParams(
            E1=e1, E2=e2, g=0.05, pc=0.1, pr=0.1, ph=0.1, Tc=tc, Tr=tr, Th=th
        )
        rbc = thermal_population(e1, tc).rbar
        room = thermal_population(e1 + e2, tr)
        hot = thermal_population(e2, th)
        report = lifting_condition_qutrit(p)
        simple = room.rbar * hot.rbar > rbc * hot.r
        assert report.general == simple
        assert report.equal_rates_form == simple
        lhs = (room.rbar - rbc) - (hot.r - hot.rbar) * (rbc + room.rbar)
        rhs = 2.0 * (room.rbar * hot.rbar - rbc * hot.r)
        assert abs(lhs - rhs) <= 1e-12


def test_criterion_09_structural_invariants(reference, qutrit_reference):
    for run in (reference, qutrit_reference):
        traj, model = run.traj, run.model
        assert float(np.max(np.abs(traj.trace_residual))) < 1e-6
        assert traj.min_eigenvalue > -1e-6
        rho = traj.final_rho
        assert float(np.max(np.abs(rho - rho.conj().T))) < 1e-8
        comm = model.H0 @ model.Hint - model.Hint @ model.H0
        assert float(np.max(np.abs(comm))) < 1e-12


def _fd_residual(traj, rhs_of, make_state):
    t = traj.t
    h = t[1] - t[0]
    assert np.allclose(np.diff(t), h)
    states = [make_state(i) for i in range(len(t))]
    vecs = np.array([s.as_vector() for s in states])
    fd = (vecs[2:] - vecs[:-2]) / (2.0 * h)
    rhs = np.array([rhs_of(s).as_vector() for s in states[1:-1]])
    return float(np.max(np.abs(fd - rhs))) / float(np.max(np.abs(rhs)))


def test_criterion_10_reduced_ode_residuals(fine_runs):
    two = fine_runs.two
    res2 = _fd_residual(
        two.traj,
        lambda s: reduced_rhs_two_qubit(s, two.params),
        lambda i: ReducedStateTwoQubit(
            two.traj.delta[i], two.traj.gamma1[i], two.traj.gamma2[i]
        ),
    )
    assert res2 < 1e-3, f"two-qubit reduced residual {res2:.2e}"
    qu = fine_runs.qutrit
    res3 = _fd_residual(
        qu.traj,
        lambda s: reduced_rhs_qutrit(s, qu.params),
        lambda i: ReducedStateQutrit(
            qu.traj.delta[i], qu.traj.gamma1[i], qu.traj.gamma2[i]
        ),
    )
    assert res3 < 1e-3, f"qutrit reduced residual {res3:.2e}"
