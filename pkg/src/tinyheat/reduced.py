"""Closed three-variable reduced dynamics and every closed-form asymptote.

For the two-qubit engine the reduced state is s = (Delta, Gamma1, Gamma2)
with ds/dt = A s + b; for the qutrit it is (Omega, B1, B2).  These linear
systems are the analytic counterpart of the full density-matrix simulation:
every function here is cross-validated against the integrator by the test
suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .params import ParameterError, QutritEngineParams, TwoQubitEngineParams


@dataclass(frozen=True)
class ReducedStateTwoQubit:
    """(Delta, Gamma1, Gamma2): coherence imbalance and ground-state probabilities."""

    Delta: complex
    Gamma1: float
    Gamma2: float

    def as_vector(self):
        return np.array([self.Delta, self.Gamma1, self.Gamma2], dtype=complex)


@dataclass(frozen=True)
class ReducedStateQutrit:
    """(Omega, B1, B2): coherence imbalance and excited-state probabilities."""

    Omega: complex
    B1: float
    B2: float

    def as_vector(self):
        return np.array([self.Omega, self.B1, self.B2], dtype=complex)


@dataclass(frozen=True)
class CharacteristicRoots:
    """The three transient decay rates of the reduced two-qubit system."""

    lambdas: tuple

    def __post_init__(self):
        if len(self.lambdas) != 3:
            raise ParameterError("characteristic cubic has exactly three roots")

    def max_real_part(self) -> float:
        return max(l.real for l in self.lambdas)

    def slowest_decaying(self) -> complex:
        return max(self.lambdas, key=lambda l: l.real)


def system_matrix_two_qubit(params: TwoQubitEngineParams):
    """(A, b) of the reduced linear system d(Delta, Gamma1, Gamma2)/dt = A s + b."""
    g = params.g
    p1, p2 = params.p1, params.p2
    r1, r2 = params.r1().r, params.r2().r
    A = np.array(
        [
            [-(p1 + p2), 2j * g, -2j * g],
            [1j * g, -p1, 0.0],
            [-1j * g, 0.0, -p2],
        ],
        dtype=complex,
    )
    b = np.array([0.0, p1 * r1, p2 * r2], dtype=complex)
    return A, b


def reduced_rhs_two_qubit(s: ReducedStateTwoQubit, params: TwoQubitEngineParams) -> ReducedStateTwoQubit:
    """Time derivative of the reduced two-qubit state.

    dDelta/dt  = 2ig(Gamma1 - Gamma2) - (p1 + p2) Delta
    dGamma1/dt = +ig Delta + p1 (r1 - Gamma1)
    dGamma2/dt = -ig Delta + p2 (r2 - Gamma2)
    """
    A, b = system_matrix_two_qubit(params)
    d = A @ s.as_vector() + b
    return ReducedStateTwoQubit(Delta=complex(d[0]), Gamma1=float(d[1].real), Gamma2=float(d[2].real))


def characteristic_roots(p1: float, p2: float, g: float) -> CharacteristicRoots:
    """Roots of (lambda+p1)(lambda+p2)(lambda+p1+p2) + 2g^2(2 lambda + p1 + p2) = 0.

    Solved as eigenvalues of the companion matrix of the expanded cubic
    (numpy.roots), which stays well-behaved near repeated roots; the residual
    in the original product form is checked.  Roots are sorted by real part,
    then imaginary part.
    """
    if not (p1 > 0 and p2 > 0 and g > 0):
        raise ParameterError("characteristic_roots needs p1, p2, g all positive")
    P = p1 + p2
    coeffs = [1.0, 2.0 * P, P * P + p1 * p2 + 4.0 * g * g, P * (p1 * p2 + 2.0 * g * g)]
    roots = np.roots(coeffs)
    scale = max(p1, p2, g) ** 3
    for lam in roots:
        resid = abs((lam + p1) * (lam + p2) * (lam + P) + 2 * g * g * (2 * lam + P))
        if resid > 1e-10 * max(scale, 1e-300):
            raise RuntimeError(f"cubic root residual {resid:.3e} too large at {lam}")
    ordered = sorted((complex(l) for l in roots), key=lambda l: (l.real, l.imag))
    return CharacteristicRoots(lambdas=tuple(ordered))


def delta_infinity(params: TwoQubitEngineParams) -> complex:
    """Asymptotic coherence imbalance: 2ig p1 p2 (r1 - r2) / ((p1+p2)(2g^2 + p1 p2))."""
    g, p1, p2 = params.g, params.p1, params.p2
    r1, r2 = params.r1().r, params.r2().r
    return 2j * g * p1 * p2 * (r1 - r2) / ((p1 + p2) * (2 * g * g + p1 * p2))


def work_rate_two_qubit(params: TwoQubitEngineParams) -> float:
    """Asymptotic lifting rate: 2 E_w g^2 p1 p2 (r1 - r2) / ((p1+p2)(2g^2 + p1 p2)).

    Equals -i g E_w delta_infinity; positive exactly when r1 > r2, i.e. when
    the bias condition E1/Tc > E2/Th holds.
    """
    g, p1, p2 = params.g, params.p1, params.p2
    r1, r2 = params.r1().r, params.r2().r
    ew = params.ladder_spacing
    return 2.0 * ew * g * g * p1 * p2 * (r1 - r2) / ((p1 + p2) * (2 * g * g + p1 * p2))


def gamma_infinity(params: TwoQubitEngineParams):
    """Asymptotic ground-state probabilities (Gamma1_inf, Gamma2_inf)."""
    g, p1, p2 = params.g, params.p1, params.p2
    r1, r2 = params.r1().r, params.r2().r
    den = (p1 + p2) * (2 * g * g + p1 * p2)
    mix = 2 * g * g * (p1 * r1 + p2 * r2)
    g1 = (p1 * p2 * (p1 + p2) * r1 + mix) / den
    g2 = (p1 * p2 * (p1 + p2) * r2 + mix) / den
    return float(g1), float(g2)


def fixed_point_two_qubit(params: TwoQubitEngineParams) -> ReducedStateTwoQubit:
    """Stationary reduced state assembled from the closed-form asymptotes."""
    g1, g2 = gamma_infinity(params)
    return ReducedStateTwoQubit(Delta=delta_infinity(params), Gamma1=g1, Gamma2=g2)


@dataclass(frozen=True)
class ClosedFormSolution:
    """Delta(t) = delta_infinity + sum_i deltas[i] exp(lambdas[i] t).

    When the characteristic roots nearly coincide the modal decomposition is
    ill-conditioned; ``degenerate`` is then set and evaluation falls back to
    numerically integrating the reduced linear system.
    """

    deltas: tuple
    lambdas: CharacteristicRoots
    delta_infinity: complex
    degenerate: bool
    initial: ReducedStateTwoQubit
    params: TwoQubitEngineParams

    def evaluate(self, t):
        """Delta at one time or an array of times."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.degenerate:
            lam = np.array(self.lambdas.lambdas)
            dl = np.array(self.deltas)
            vals = self.delta_infinity + np.exp(np.outer(ts, lam)) @ dl
        else:
            vals = np.array([_integrate_reduced(self.initial, self.params, tk)[0] for tk in ts])
        return vals if np.ndim(t) else complex(vals[0])


def _integrate_reduced(initial, params, t_end, dt=None):
    """RK4 on the 3-variable system; the degenerate-root fallback path."""
    A, b = system_matrix_two_qubit(params)
    if dt is None:
        fast = max(params.g, params.p1, params.p2)
        dt = 0.01 / fast
    n = max(1, int(round(t_end / dt)))
    h = t_end / n
    s = initial.as_vector()
    for _ in range(n):
        k1 = A @ s + b
        k2 = A @ (s + 0.5 * h * k1) + b
        k3 = A @ (s + 0.5 * h * k2) + b
        k4 = A @ (s + h * k3) + b
        s = s + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return s


def closed_form_delta(initial: ReducedStateTwoQubit, params: TwoQubitEngineParams) -> ClosedFormSolution:
    """Modal solution of the reduced system from a given initial condition.

    The deltas come from eigendecomposing the system matrix: with
    s(t) = s_inf + V exp(Lambda t) V^{-1} (s0 - s_inf), delta_i is the
    Delta-component of mode i at t = 0.  Reconstruction of Delta(0) is
    checked to 1e-10.
    """
    if params.g == 0:
        raise ParameterError("closed_form_delta needs g > 0 (with g = 0, Delta decouples)")
    A, b = system_matrix_two_qubit(params)
    roots = characteristic_roots(params.p1, params.p2, params.g)
    lam_list = list(roots.lambdas)
    scale = max(abs(l) for l in lam_list)
    # a genuine double root splits by ~sqrt(eps) under the companion-matrix
    # solve, so the degeneracy cut must sit well above that
    degenerate = any(
        abs(lam_list[i] - lam_list[j]) < 1e-6 * max(scale, 1e-300)
        for i in range(3)
        for j in range(i + 1, 3)
    )
    s_inf = np.linalg.solve(A, -b)
    if degenerate:
        deltas = (0j, 0j, 0j)
    else:
        evals, V = np.linalg.eig(A)
        # align the eigendecomposition with the sorted cubic roots
        order = []
        used = set()
        for lam in lam_list:
            k = min(
                (i for i in range(3) if i not in used),
                key=lambda i: abs(evals[i] - lam),
            )
            used.add(k)
            order.append(k)
        V = V[:, order]
        coeff = np.linalg.solve(V, initial.as_vector() - s_inf)
        deltas = tuple(complex(V[0, i] * coeff[i]) for i in range(3))
        recon = sum(deltas) + s_inf[0]
        if abs(recon - initial.Delta) > 1e-10 * max(1.0, abs(initial.Delta)):
            raise RuntimeError(
                f"modal reconstruction of Delta(0) off by {abs(recon - initial.Delta):.3e}"
            )
    return ClosedFormSolution(
        deltas=deltas,
        lambdas=roots,
        delta_infinity=complex(s_inf[0]),
        degenerate=degenerate,
        initial=initial,
        params=params,
    )


# --- qutrit ----------------------------------------------------------------


def system_matrix_qutrit(params: QutritEngineParams):
    """(A, b) of the reduced qutrit system d(Omega, B1, B2)/dt = A s + b."""
    g = params.g
    pc, pr, ph = params.pc, params.pr, params.ph
    rbc = params.rc().rbar
    rbr = params.rr().rbar
    th = params.rh()
    rh, rbh = th.r, th.rbar
    P = pc + pr + ph
    A = np.array(
        [
            [-P, -2j * g, 2j * g],
            [-1j * g, -(pc + ph * rbh), ph * rh - pc * rbc],
            [1j * g, ph * rbh - pr * rbr, -(pr + ph * rh)],
        ],
        dtype=complex,
    )
    b = np.array([0.0, pc * rbc, pr * rbr], dtype=complex)
    return A, b


def reduced_rhs_qutrit(s: ReducedStateQutrit, params: QutritEngineParams) -> ReducedStateQutrit:
    """Time derivative of the reduced qutrit state.

    dOmega/dt = 2ig(B2 - B1) - (pc + pr + ph) Omega
    dB1/dt    = -ig Omega + pc(rbar_c (1 - B2) - B1) - ph(rbar_h B1 - r_h B2)
    dB2/dt    = +ig Omega + pr(rbar_r (1 - B1) - B2) + ph(rbar_h B1 - r_h B2)
    """
    A, b = system_matrix_qutrit(params)
    d = A @ s.as_vector() + b
    return ReducedStateQutrit(Omega=complex(d[0]), B1=float(d[1].real), B2=float(d[2].real))


def qutrit_stationary(params: QutritEngineParams) -> ReducedStateQutrit:
    """Stationary (Omega_inf, B1_inf, B2_inf) by solving A s = -b.

    The paper prints no closed form for the individual stationary variables;
    the linear solve avoids inventing one, and the work-rate formula is
    checked against -i g E2 Omega_inf.
    """
    A, b = system_matrix_qutrit(params)
    s = np.linalg.solve(A, -b)
    return ReducedStateQutrit(Omega=complex(s[0]), B1=float(s[1].real), B2=float(s[2].real))


def work_rate_qutrit(params: QutritEngineParams, mode: str = "general") -> float:
    """Asymptotic qutrit lifting rate from the general closed-form expression.

    mode="general" evaluates the full three-rate formula; mode="equal_rates"
    requires pc = pr = ph and evaluates the same expression (the separate
    main-text equal-rates printing is dimensionally inconsistent with it and
    is exposed via main_text_equal_rates_work_rate for comparison only).
    """
    if mode not in ("general", "equal_rates"):
        raise ParameterError(f"unknown mode {mode!r}")
    pc, pr, ph = params.pc, params.pr, params.ph
    if mode == "equal_rates" and not (pc == pr == ph):
        raise ParameterError("equal_rates mode requires pc = pr = ph")
    g, E2 = params.g, params.E2
    tc, trr, th = params.rc(), params.rr(), params.rh()
    rc, rbc = tc.r, tc.rbar
    rr, rbr = trr.r, trr.rbar
    rh, rbh = th.r, th.rbar
    num = 2 * g * g * E2 * (pc * pr * (rbr - rbc) - ph * (rh - rbh) * (pc * rbc + pr * rbr))
    den = 2 * g * g * (pc * (1 + rbc) + pr * (1 + rbr)) + (pc + pr + ph) * (
        pc * pr * (1 - rbc * rbr) + pc * ph * (1 - rc * rbh) + pr * ph * (1 - rr * rh)
    )
    return num / den


def main_text_equal_rates_work_rate(params: QutritEngineParams) -> float:
    """The main text's equal-rates expression, transcribed as printed.

    4 g^2 E2 p (rbar_r rbar_h - rbar_c r_h) /
    (2 g^2 (2 + rbar_c + rbar_r) + 3 p (3 - rbar_c rbar_r - r_c rbar_h - r_r r_h))

    This is dimensionally inconsistent with the general formula's equal-rate
    reduction (3p vs 3p^2 in the denominator's second group) and disagrees
    with both the general formula and the simulation; it is kept only so
    reports can surface the discrepancy rather than silently correct it.
    """
    if not (params.pc == params.pr == params.ph):
        raise ParameterError("the main-text expression is defined for equal rates only")
    p = params.pc
    g, E2 = params.g, params.E2
    tc, trr, th = params.rc(), params.rr(), params.rh()
    num = 4 * g * g * E2 * p * (trr.rbar * th.rbar - tc.rbar * th.r)
    den = 2 * g * g * (2 + tc.rbar + trr.rbar) + 3 * p * (
        3 - tc.rbar * trr.rbar - tc.r * th.rbar - trr.r * th.r
    )
    return num / den


@dataclass(frozen=True)
class LiftingConditionReport:
    """Truth values of the qutrit lifting conditions."""

    general: bool
    equal_rates_form: Optional[bool]  # None when the rates are unequal


def lifting_condition_qutrit(params: QutritEngineParams) -> LiftingConditionReport:
    """Whether the weight is lifted: the general inequality, plus the
    equal-rates product form rbar_r rbar_h > rbar_c r_h when applicable."""
    pc, pr, ph = params.pc, params.pr, params.ph
    rbc = params.rc().rbar
    rbr = params.rr().rbar
    th = params.rh()
    general = pc * pr * (rbr - rbc) > ph * (th.r - th.rbar) * (pc * rbc + pr * rbr)
    equal = None
    if pc == pr == ph:
        equal = rbr * th.rbar > rbc * th.r
    return LiftingConditionReport(general=general, equal_rates_form=equal)


# --- consolidated report ---------------------------------------------------


@dataclass(frozen=True)
class AsymptoteReport:
    """Every closed-form steady-state quantity for one parameter set."""

    kind: str
    inputs: dict
    r_values: dict
    work_rate: float
    coherence_infinity: complex
    populations_infinity: dict
    roots: Optional[CharacteristicRoots]
    heat_currents: Optional[dict]
    efficiency: Optional[dict]
    lifting: dict
    notes: tuple = ()

    def to_dict(self):
        d = {
            "kind": self.kind,
            "inputs": self.inputs,
            "r_values": self.r_values,
            "work_rate": self.work_rate,
            "coherence_infinity": {
                "re": self.coherence_infinity.real,
                "im": self.coherence_infinity.imag,
            },
            "populations_infinity": self.populations_infinity,
            "lifting": self.lifting,
            "notes": list(self.notes),
        }
        if self.roots is not None:
            d["characteristic_roots"] = [
                {"re": l.real, "im": l.imag} for l in self.roots.lambdas
            ]
        if self.heat_currents is not None:
            d["heat_currents"] = self.heat_currents
        if self.efficiency is not None:
            d["efficiency"] = self.efficiency
        return d

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def asymptote_report(params) -> AsymptoteReport:
    """Assemble the full closed-form picture for a parameter set."""
    from . import thermo  # local import: thermo depends on this module

    if isinstance(params, TwoQubitEngineParams):
        t1, t2 = params.r1(), params.r2()
        w = work_rate_two_qubit(params)
        g1, g2 = gamma_infinity(params)
        qc = thermo.heat_current_asymptote(params, 1)
        qh = thermo.heat_current_asymptote(params, 2)
        bias = None
        from .params import joint_bias

        bias = joint_bias(params)
        eff = {
            "eta_ideal": 1.0 - params.E1 / params.E2,
            "eta_carnot": 1.0 - params.Tc / params.Th,
        }
        roots = characteristic_roots(params.p1, params.p2, params.g) if params.g > 0 else None
        return AsymptoteReport(
            kind="two_qubit",
            inputs={
                "E1": params.E1, "E2": params.E2, "g": params.g,
                "p1": params.p1, "p2": params.p2, "Tc": params.Tc, "Th": params.Th,
            },
            r_values={"r1": t1.r, "rbar1": t1.rbar, "r2": t2.r, "rbar2": t2.rbar},
            work_rate=w,
            coherence_infinity=delta_infinity(params),
            populations_infinity={"Gamma1": g1, "Gamma2": g2},
            roots=roots,
            heat_currents={"q_c": qc, "q_h": qh},
            efficiency=eff,
            lifting={"biased": bias.biased, "q01": bias.q01, "q10": bias.q10,
                     "bias_gap": bias.bias_gap},
        )

    if isinstance(params, QutritEngineParams):
        tc, trr, th = params.rc(), params.rr(), params.rh()
        stat = qutrit_stationary(params)
        lift = lifting_condition_qutrit(params)
        notes = []
        extras = {}
        if params.pc == params.pr == params.ph:
            mt = main_text_equal_rates_work_rate(params)
            gen = work_rate_qutrit(params, mode="equal_rates")
            extras["main_text_equal_rates_value"] = mt
            notes.append(
                "equal-rates comparison: the separately printed equal-rates "
                f"expression gives {mt:.6g} vs the general formula's {gen:.6g}; "
                "the general formula is authoritative (it matches the "
                "simulation and the stationary solve)"
            )
        lifting = {"general": lift.general}
        if lift.equal_rates_form is not None:
            lifting["equal_rates_form"] = lift.equal_rates_form
        lifting.update(extras)
        return AsymptoteReport(
            kind="qutrit",
            inputs={
                "E1": params.E1, "E2": params.E2, "g": params.g,
                "pc": params.pc, "pr": params.pr, "ph": params.ph,
                "Tc": params.Tc, "Tr": params.Tr, "Th": params.Th,
            },
            r_values={
                "rc": tc.r, "rbar_c": tc.rbar,
                "rr": trr.r, "rbar_r": trr.rbar,
                "rh": th.r, "rbar_h": th.rbar,
            },
            work_rate=work_rate_qutrit(params),
            coherence_infinity=stat.Omega,
            populations_infinity={"B1": stat.B1, "B2": stat.B2},
            roots=None,
            heat_currents=None,
            efficiency=None,
            lifting=lifting,
            notes=tuple(notes),
        )

    raise ParameterError(f"unsupported parameter type {type(params)!r}")
