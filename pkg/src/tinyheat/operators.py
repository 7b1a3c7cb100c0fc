"""Hamiltonians and reset channels on the truncated machine (x) ladder space.

Basis ordering is machine-major: composite index = m * L + l, where m is the
machine level (two-qubit: m = 2*q1 + q2 over |00>, |01>, |10>, |11>; qutrit:
m in {0, 1, 2}) and l = n - n_min indexes the ladder sites of the window.

The interaction couples the degenerate pairs |mA, l> <-> |mB, l+1>:
|01,n> <-> |10,n+1> for the two-qubit engine, |2,n> <-> |1,n+1> for the
qutrit.  Couplings that would step outside the window are dropped (hard-cut
truncation); the dynamics module monitors boundary population instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import (
    LadderWindow,
    ParameterError,
    QutritEngineParams,
    ThermalPopulation,
    TwoQubitEngineParams,
)

TWO_QUBIT_MACHINE_LABELS = ("00", "01", "10", "11")
QUTRIT_MACHINE_LABELS = ("0", "1", "2")


@dataclass(frozen=True)
class ResetChannel:
    """Structural description of one bath's reset channel.

    The machine levels are organized into equal-length tuples ``lower`` and
    ``upper``: pair j = (lower[j], upper[j]) is a two-level system that the
    bath resets to the thermal state ``tau`` = diag(r, rbar).  Multiple pairs
    mean the pair index is a tensor factor left untouched (the two-qubit
    resets: replacing qubit i's marginal keeps the other qubit's coherences).
    ``spectators`` are machine levels the bath does not touch: their
    populations survive, but their coherences to the reset pair are destroyed
    at the bath's rate (the qutrit partial resets).
    """

    rate: float
    tau: ThermalPopulation
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    spectators: tuple[int, ...] = ()
    label: str = ""

    def __post_init__(self):
        if not self.rate > 0:
            raise ParameterError(f"reset rate must be positive, got {self.rate}")
        if len(self.lower) != len(self.upper):
            raise ParameterError("lower/upper level lists must pair up")
        touched = set(self.lower) | set(self.upper) | set(self.spectators)
        if len(touched) != len(self.lower) + len(self.upper) + len(self.spectators):
            raise ParameterError("reset channel levels must be distinct")

    def machine_tensor(self, machine_dim: int) -> np.ndarray:
        """Channel action on machine-space matrices as a tensor K[c,d,a,b].

        R(sigma)[c,d] = sum_{a,b} K[c,d,a,b] sigma[a,b].  Trace-preserving and
        completely positive by construction (a reset-to-tau on the pair factor
        plus a pinching of the spectator populations).
        """
        K = np.zeros((machine_dim,) * 4)
        lev = (self.lower, self.upper)
        tau = (self.tau.r, self.tau.rbar)
        npair = len(self.lower)
        for s in range(2):
            for j in range(npair):
                for jp in range(npair):
                    for a in range(2):
                        K[lev[s][j], lev[s][jp], lev[a][j], lev[a][jp]] += tau[s]
        for spec in self.spectators:
            K[spec, spec, spec, spec] += 1.0
        return K

    def apply_machine(self, sigma: np.ndarray) -> np.ndarray:
        """Apply the channel to a machine-space matrix."""
        K = self.machine_tensor(sigma.shape[0])
        return np.einsum("cdab,ab->cd", K, sigma)

    def apply_full(self, rho: np.ndarray, ladder_size: int) -> np.ndarray:
        """Apply (channel (x) identity-on-ladder) to a composite-space matrix."""
        M = rho.shape[0] // ladder_size
        K = self.machine_tensor(M)
        r4 = rho.reshape(M, ladder_size, M, ladder_size)
        out = np.einsum("cdab,albm->cldm", K, r4)
        return out.reshape(rho.shape)


@dataclass(frozen=True)
class ModelOperators:
    """Hamiltonians and reset channels of one engine on the truncated space.

    Arrays are read-only; instances are safe to share across workers.
    """

    kind: str
    params: object
    window: LadderWindow
    machine_dim: int
    ladder_size: int
    H0: np.ndarray
    Hint: np.ndarray
    resets: tuple[ResetChannel, ...]
    machine_energies: np.ndarray
    pair: tuple[int, int]  # (machine at ladder l, machine at ladder l+1)

    @property
    def dim(self) -> int:
        return self.machine_dim * self.ladder_size

    @property
    def g(self) -> float:
        return self.params.g

    def site_energies(self) -> np.ndarray:
        """Energy e[m, l] of basis state |m, l>, shape (machine_dim, ladder_size)."""
        ns = np.arange(self.window.n_min, self.window.n_max + 1, dtype=float)
        return self.machine_energies[:, None] + self.window.spacing * ns[None, :]

    def basis_labels(self) -> list[str]:
        machine = TWO_QUBIT_MACHINE_LABELS if self.kind == "two_qubit" else QUTRIT_MACHINE_LABELS
        return [
            f"|{machine[m]},n={n}>"
            for m in range(self.machine_dim)
            for n in self.window.indices()
        ]


def _check_spacing(window: LadderWindow, expected: float, what: str):
    if abs(window.spacing - expected) > 1e-12 * max(1.0, abs(expected)):
        raise ParameterError(
            f"window spacing {window.spacing} does not match the {what} ladder "
            f"quantum {expected}"
        )


def _assemble(kind, params, window, machine_energies, pair, resets):
    M = len(machine_energies)
    L = window.size
    dim = M * L
    ns = np.arange(window.n_min, window.n_max + 1, dtype=float)
    e = (np.asarray(machine_energies)[:, None] + window.spacing * ns[None, :]).reshape(dim)
    H0 = np.diag(e)
    Hint = np.zeros((dim, dim))
    mA, mB = pair
    for l in range(L - 1):
        i = mA * L + l
        j = mB * L + (l + 1)
        Hint[i, j] = params.g
        Hint[j, i] = params.g
    for arr in (H0, Hint):
        arr.setflags(write=False)
    me = np.asarray(machine_energies, dtype=float)
    me.setflags(write=False)
    return ModelOperators(
        kind=kind,
        params=params,
        window=window,
        machine_dim=M,
        ladder_size=L,
        H0=H0,
        Hint=Hint,
        resets=tuple(resets),
        machine_energies=me,
        pair=pair,
    )


def build_two_qubit(params: TwoQubitEngineParams, window: LadderWindow) -> ModelOperators:
    """Operators for the two-qubit engine: H0, the degenerate-pair coupling, two resets.

    H0 = E1 (excited projector of qubit 1) + E2 (excited projector of qubit 2)
    + sum_n n*(E2-E1) |n><n|.  Hint couples |01,n> <-> |10,n+1> with amplitude
    g.  Bath channels: qubit 1 fully reset to tau_1 (cold, rate p1), qubit 2
    to tau_2 (hot, rate p2).
    """
    _check_spacing(window, params.ladder_spacing, "two-qubit")
    machine_energies = [0.0, params.E2, params.E1, params.E1 + params.E2]
    resets = (
        ResetChannel(
            rate=params.p1,
            tau=params.r1(),
            lower=(0, 1),
            upper=(2, 3),
            label="cold bath / qubit 1",
        ),
        ResetChannel(
            rate=params.p2,
            tau=params.r2(),
            lower=(0, 2),
            upper=(1, 3),
            label="hot bath / qubit 2",
        ),
    )
    return _assemble("two_qubit", params, window, machine_energies, (1, 2), resets)


def build_qutrit(params: QutritEngineParams, window: LadderWindow) -> ModelOperators:
    """Operators for the qutrit engine: H0, the |2,n> <-> |1,n+1> coupling, three partial resets.

    Qutrit levels at 0, E1, E1+E2; ladder spacing E2.  Each bath resets one
    two-level transition to its thermal state, leaving the remaining level as
    a spectator whose population is untouched (coherences to it decay at the
    bath's rate): cold on {0,1}, room on {0,2}, hot on {1,2}.
    """
    _check_spacing(window, params.ladder_spacing, "qutrit")
    machine_energies = [0.0, params.E1, params.E1 + params.E2]
    resets = (
        ResetChannel(
            rate=params.pc,
            tau=params.rc(),
            lower=(0,),
            upper=(1,),
            spectators=(2,),
            label="cold bath / 0<->1",
        ),
        ResetChannel(
            rate=params.pr,
            tau=params.rr(),
            lower=(0,),
            upper=(2,),
            spectators=(1,),
            label="room bath / 0<->2",
        ),
        ResetChannel(
            rate=params.ph,
            tau=params.rh(),
            lower=(1,),
            upper=(2,),
            spectators=(0,),
            label="hot bath / 1<->2",
        ),
    )
    return _assemble("qutrit", params, window, machine_energies, (2, 1), resets)


def stationary_machine_populations(model: ModelOperators) -> np.ndarray:
    """g = 0 fixed point of the combined reset channels, on machine populations.

    Solves the rate-balance linear system sum_i p_i (A_i - 1) pi = 0 with
    sum(pi) = 1, where A_i[c, a] = K_i[c, c, a, a] is channel i's action on
    populations.  For the two-qubit model this reproduces the thermal product
    populations; for the qutrit it is the three-bath compromise state.
    """
    M = model.machine_dim
    W = np.zeros((M, M))
    for ch in model.resets:
        K = ch.machine_tensor(M)
        A = np.einsum("ccaa->ca", K)
        W += ch.rate * (A - np.eye(M))
    sys = W.copy()
    sys[-1, :] = 1.0
    rhs = np.zeros(M)
    rhs[-1] = 1.0
    pi = np.linalg.solve(sys, rhs)
    residual = np.abs(W @ pi).max()
    if residual > 1e-10:
        raise RuntimeError(f"rate-balance solve left residual {residual:.3e}")
    return pi


def thermal_product_state(model: ModelOperators) -> np.ndarray:
    """Initial state: stationary machine populations (x) weight at n0.

    Two-qubit: tau_1 (x) tau_2 (x) |n0><n0| (the no-interaction thermal
    product).  Qutrit: the g = 0 fixed point of the three resets (x)
    |n0><n0|, found by the rate-balance solve -- the paper fixes neither, and
    these choices start the reduced coherences at exactly zero.
    """
    M, L = model.machine_dim, model.ladder_size
    if model.kind == "two_qubit":
        p = model.params
        t1, t2 = p.r1(), p.r2()
        pops = np.array([t1.r * t2.r, t1.r * t2.rbar, t1.rbar * t2.r, t1.rbar * t2.rbar])
    else:
        pops = stationary_machine_populations(model)
    rho = np.zeros((model.dim, model.dim), dtype=complex)
    l0 = model.window.n0 - model.window.n_min
    for m in range(M):
        rho[m * L + l0, m * L + l0] = pops[m]
    return rho
