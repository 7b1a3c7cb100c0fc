"""Hamiltonians, reset channels, and machine steady states, cross-checked
against independently assembled dense-matrix oracles."""

import numpy as np
import pytest

from tinyheat.operators import (
    ModelOperators,
    build_qutrit,
    build_two_qubit,
    stationary_machine_populations,
    thermal_product_state,
)
from tinyheat.params import (
    LadderWindow,
    ParameterError,
    QutritEngineParams,
    TwoQubitEngineParams,
)


def two_qubit_model(window=None, **overrides):
    base = dict(E1=1.0, E2=2.0, g=0.1, p1=0.1, p2=0.1, Tc=1.0, Th=4.0)
    base.update(overrides)
    params = TwoQubitEngineParams(**base)
    if window is None:
        window = LadderWindow(-3, 4, 0, spacing=params.ladder_spacing)
    return build_two_qubit(params, window)


def qutrit_model(window=None, **overrides):
    base = dict(E1=1.0, E2=1.0, g=0.05, pc=0.1, pr=0.1, ph=0.1, Tc=1.0, Tr=20.0, Th=10.0)
    base.update(overrides)
    params = QutritEngineParams(**base)
    if window is None:
        window = LadderWindow(-3, 4, 0, spacing=params.ladder_spacing)
    return build_qutrit(params, window)


def random_density_matrix(rng, n):
    a = rng.randn(n, n) + 1j * rng.randn(n, n)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


# --- Hamiltonian structure --------------------------------------------------


def test_two_qubit_machine_energies():
    m = two_qubit_model()
    # basis order |00>, |01>, |10>, |11> with qubit 1 the E1 system
    assert np.allclose(m.machine_energies, [0.0, 2.0, 1.0, 3.0])
    assert m.pair == (1, 2)  # |01,n> <-> |10,n+1>


def test_qutrit_machine_energies():
    m = qutrit_model(E1=1.0, E2=2.0, Tr=20.0)
    assert np.allclose(m.machine_energies, [0.0, 1.0, 3.0])
    assert m.pair == (2, 1)  # |2,n> <-> |1,n+1>


def test_h0_is_machine_plus_ladder_energy():
    m = two_qubit_model()
    L = m.ladder_size
    eml = m.site_energies()
    assert np.allclose(np.diag(m.H0), eml.reshape(-1))
    # spot value: |10, n=2> has E1 + 2*spacing = 1 + 2 = 3
    idx = 2 * L + (2 - m.window.n_min)
    assert m.H0[idx, idx] == pytest.approx(3.0)


def test_hint_couples_the_degenerate_pair_only():
    m = two_qubit_model(window=LadderWindow(-2, 2, 0, spacing=1.0))
    L = m.ladder_size
    assert L == 5
    nz = np.argwhere(m.Hint != 0)
    assert len(nz) == 8  # 2*(L-1) entries, Hermitian pair included
    mA, mB = m.pair
    for i, j in nz:
        a, la = divmod(i, L)
        b, lb = divmod(j, L)
        assert {(a, b), (b, a)} & {(mA, mB)}
        assert abs(la - lb) == 1
    assert np.allclose(m.Hint, m.Hint.conj().T)
    assert np.abs(m.Hint).max() == pytest.approx(m.g)


def test_pair_states_are_degenerate():
    for m in (two_qubit_model(), qutrit_model(), qutrit_model(E2=2.0, Tr=30.0)):
        eml = m.site_energies()
        mA, mB = m.pair
        assert np.allclose(eml[mA, :-1], eml[mB, 1:], atol=1e-12)


def test_h0_hint_commute_exactly():
    # the interaction only connects degenerate levels, so [H0, Hint] vanishes
    for m in (two_qubit_model(), qutrit_model()):
        comm = m.H0 @ m.Hint - m.Hint @ m.H0
        assert np.abs(comm).max() < 1e-12


def test_window_spacing_mismatch_rejected():
    params = TwoQubitEngineParams(E1=1.0, E2=2.0, g=0.1, p1=0.1, p2=0.1, Tc=1.0, Th=4.0)
    with pytest.raises(ParameterError):
        build_two_qubit(params, LadderWindow(-3, 4, 0, spacing=0.9))


# --- reset channels vs dense oracles ---------------------------------------


def _ptrace_first(rho):
    return rho[:2, :2] + rho[2:, 2:]


def _ptrace_second(rho):
    out = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for ap in range(2):
            out[a, ap] = rho[2 * a, 2 * ap] + rho[2 * a + 1, 2 * ap + 1]
    return out


def test_two_qubit_reset_channels_match_kron_oracle():
    m = two_qubit_model()
    p = m.params
    ch1, ch2 = m.resets
    rng = np.random.RandomState(0)
    for _ in range(50):
        rho = random_density_matrix(rng, 4)
        # full reset of qubit 1: tau_1 (x) Tr_1 rho
        want1 = np.kron(np.diag([p.r1().r, p.r1().rbar]).astype(complex), _ptrace_first(rho))
        got1 = ch1.apply_machine(rho)
        assert np.abs(got1 - want1).max() < 1e-13
        want2 = np.kron(_ptrace_second(rho), np.diag([p.r2().r, p.r2().rbar]).astype(complex))
        got2 = ch2.apply_machine(rho)
        assert np.abs(got2 - want2).max() < 1e-13


def test_qutrit_reset_channels_match_hand_oracle():
    m = qutrit_model()
    q = m.params
    taus = {"cold": q.rc(), "room": q.rr(), "hot": q.rh()}
    levels = {"cold": (0, 1, 2), "room": (0, 2, 1), "hot": (1, 2, 0)}
    rng = np.random.RandomState(1)
    for ch in m.resets:
        key = next(k for k in taus if k in ch.label)
        lo, hi, spec = levels[key]
        tau = taus[key]
        for _ in range(20):
            rho = random_density_matrix(rng, 3)
            # two-level partial reset: pair populations -> thermal mix,
            # spectator population preserved, all other coherences killed
            want = np.zeros((3, 3), dtype=complex)
            pair_pop = rho[lo, lo] + rho[hi, hi]
            want[lo, lo] = tau.r * pair_pop
            want[hi, hi] = tau.rbar * pair_pop
            want[spec, spec] = rho[spec, spec]
            got = ch.apply_machine(rho)
            assert np.abs(got - want).max() < 1e-13


def test_reset_channels_are_cptp():
    rng = np.random.RandomState(2)
    for m in (two_qubit_model(), qutrit_model()):
        M = m.machine_dim
        for ch in m.resets:
            K = ch.machine_tensor(M)
            # trace preservation: sum_c K[c,c,a,b] = delta_ab
            tp = np.einsum("ccab->ab", K)
            assert np.abs(tp - np.eye(M)).max() < 1e-14
            # complete positivity: the Choi matrix is PSD
            choi = K.transpose(0, 2, 1, 3).reshape(M * M, M * M)
            lam = np.linalg.eigvalsh(choi)
            assert lam[0] > -1e-12
        # and the channel preserves positivity on random states
        for ch in m.resets:
            for _ in range(100 // len(m.resets)):
                rho = random_density_matrix(rng, M)
                out = ch.apply_machine(rho)
                assert abs(np.trace(out) - 1.0) < 1e-12
                assert np.linalg.eigvalsh(out)[0] > -1e-12


def test_apply_full_acts_per_ladder_block():
    # the machine channel must touch machine indices only, ladder untouched
    m = two_qubit_model(window=LadderWindow(-2, 2, 0, spacing=1.0))
    M, L = m.machine_dim, m.ladder_size
    rng = np.random.RandomState(3)
    rho = random_density_matrix(rng, M * L)
    ch = m.resets[0]
    got = ch.apply_full(rho, L)
    want = np.zeros_like(rho)
    r4 = rho.reshape(M, L, M, L)
    for l in range(L):
        for lp in range(L):
            want.reshape(M, L, M, L)[:, l, :, lp] = ch.apply_machine(r4[:, l, :, lp])
    assert np.abs(got - want).max() < 1e-13


# --- stationary machine populations ----------------------------------------


def test_two_qubit_stationary_is_thermal_product():
    m = two_qubit_model()
    p = m.params
    pops = stationary_machine_populations(m)
    r1, rb1 = p.r1().r, p.r1().rbar
    r2, rb2 = p.r2().r, p.r2().rbar
    want = np.array([r1 * r2, r1 * rb2, rb1 * r2, rb1 * rb2])
    assert np.abs(pops - want).max() < 1e-12


def test_qutrit_stationary_balances_all_channels():
    m = qutrit_model()
    pops = stationary_machine_populations(m)
    assert pops.sum() == pytest.approx(1.0, abs=1e-12)
    assert pops.min() > 0
    # rate balance: total reset action vanishes on the stationary populations
    rho = np.diag(pops).astype(complex)
    total = sum(ch.rate * (ch.apply_machine(rho) - rho) for ch in m.resets)
    assert np.abs(total).max() < 1e-12


def test_thermal_product_state_structure():
    for m in (two_qubit_model(), qutrit_model()):
        M, L = m.machine_dim, m.ladder_size
        rho = thermal_product_state(m)
        assert rho.shape == (M * L, M * L)
        assert abs(np.trace(rho) - 1.0) < 1e-12
        assert np.abs(rho - rho.conj().T).max() < 1e-14
        assert np.linalg.eigvalsh(rho)[0] > -1e-14
        # all weight on the n0 ladder site
        l0 = m.window.n0 - m.window.n_min
        diag = np.real(np.diag(rho)).reshape(M, L)
        assert diag[:, l0].sum() == pytest.approx(1.0, abs=1e-12)
        assert np.delete(diag, l0, axis=1).sum() == pytest.approx(0.0, abs=1e-15)
        # machine marginal equals the stationary populations
        assert np.abs(diag.sum(axis=1) - stationary_machine_populations(m)).max() < 1e-12


def test_basis_labels_cover_dimension():
    m = two_qubit_model(window=LadderWindow(-2, 2, 0, spacing=1.0))
    labels = m.basis_labels()
    assert len(labels) == m.dim
    assert labels[0] == "|00,n=-2>"
    q = qutrit_model(window=LadderWindow(-2, 2, 0, spacing=1.0))
    assert q.basis_labels()[0] == "|0,n=-2>"
