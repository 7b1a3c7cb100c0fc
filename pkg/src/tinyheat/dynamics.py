"""Time integration of the master equations and observables on the full state.

The integrator is classic fixed-step 4th-order Runge-Kutta on the density
matrix (see _kernel for the linear-generator evaluation form), with trace
renormalization above a logged threshold, boundary-population monitoring on
the truncated ladder, and positivity spot checks.

Trajectory CSV columns are fixed:
    t, Ew_mean, Ew_var, delta_re, delta_im, gamma1, gamma2, q_c, q_h,
    boundary_pop, trace_residual
For qutrit runs the delta columns carry Omega, gamma1/gamma2 carry B1/B2,
and the per-bath heat-current columns q_c/q_h are NaN (the paper defines
heat currents only for the two-qubit engine).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernel
from .operators import ModelOperators
from .params import ParameterError

logger = logging.getLogger("tinyheat.dynamics")

CSV_HEADER = (
    "t,Ew_mean,Ew_var,delta_re,delta_im,gamma1,gamma2,q_c,q_h,"
    "boundary_pop,trace_residual"
)


class BoundaryOverflowError(RuntimeError):
    """Ladder population reached the truncation boundary: window too small."""


class StepInstabilityError(RuntimeError):
    """An observable became non-finite during integration."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings.

    dt must resolve the fastest rate and the energy scale; ``validate_for``
    enforces dt <= 0.05/max(g, rates) and the spectral-span stability guard
    dt <= 2.5/span (RK4's imaginary-axis stability boundary is |dt*span| <
    2*sqrt(2); 2.5 leaves margin).  ``positivity_check_every`` is a stride in
    steps (positivity is spot-checked, not enforced); ``boundary_tolerance``
    aborts the run when the outermost ladder sites accumulate population.
    """

    dt: float
    t_max: float
    record_every: int = 100
    positivity_check_every: int = 10000
    boundary_tolerance: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not self.t_max > 0:
            raise ParameterError(f"t_max must be positive, got {self.t_max}")
        if self.record_every < 1:
            raise ParameterError(f"record_every must be >= 1, got {self.record_every}")
        if self.positivity_check_every < 0:
            raise ParameterError("positivity_check_every must be >= 0 (0 disables)")
        if not self.boundary_tolerance > 0:
            raise ParameterError("boundary_tolerance must be positive")

    def validate_for(self, model: ModelOperators):
        rates = [ch.rate for ch in model.resets]
        fast = max([model.g] + rates)
        cap = 0.05 / fast
        e = model.site_energies()
        span = float(e.max() - e.min())
        if span > 0:
            cap = min(cap, 2.5 / span)
        if self.dt > cap:
            raise ParameterError(
                f"dt={self.dt} exceeds the stability bound {cap:.6g} "
                f"(0.05/max(g, p) and 2.5/spectral-span guard)"
            )


def default_dt(params) -> float:
    """Default step: 0.01 / max(g, reset rates), clamped by 0.01 / E_scale."""
    if hasattr(params, "p1"):
        rates = [params.p1, params.p2]
    else:
        rates = [params.pc, params.pr, params.ph]
    fast = max([params.g] + rates)
    e_scale = max(params.E1, params.E2, params.ladder_spacing)
    return min(0.01 / fast, 0.01 / e_scale)


def default_integrator_config(params, t_max: float, **overrides) -> IntegratorConfig:
    """IntegratorConfig with the default dt for ``params``."""
    return IntegratorConfig(dt=default_dt(params), t_max=t_max, **overrides)


@dataclass(frozen=True)
class TwoQubitObservables:
    delta: complex
    gamma1: float
    gamma2: float
    ew_mean: float
    ew_second: float
    ew_var: float


@dataclass(frozen=True)
class QutritObservables:
    omega: complex
    b1: float
    b2: float
    ew_mean: float
    ew_second: float
    ew_var: float


def _slab_observables(slabs, model: ModelOperators):
    """(coherence, pop_a, pop_b, moments) straight from slab storage."""
    M, L = model.machine_dim, model.ladder_size
    diag_slabs = slabs[:: M + 1]  # (M, L, L): machine-diagonal blocks
    w = np.einsum("mll->l", diag_slabs).real
    e_n = model.window.spacing * np.arange(model.window.n_min, model.window.n_max + 1, dtype=float)
    mean = float(w @ e_n)
    second = float(w @ e_n**2)
    var = second - mean * mean
    pops = np.einsum("mll->m", diag_slabs).real
    mA, mB = model.pair
    up = slabs[mA * M + mB]  # <mA, l| rho |mB, m>
    dn = slabs[mB * M + mA]
    coh = complex(np.einsum("ll->", up[: L - 1, 1:]) - np.einsum("ll->", dn[1:, : L - 1]))
    return coh, pops, mean, second, var, w


def observables_two_qubit(rho: np.ndarray, model: ModelOperators) -> TwoQubitObservables:
    """Delta, ground-state probabilities Gamma_1/Gamma_2, and weight moments.

    Delta = sum_n(<01,n|rho|10,n+1> - <10,n+1|rho|01,n>), the coherence
    imbalance that sets the instantaneous work rate; Gamma_i sums qubit i's
    ground-state populations over the ladder.  The sum over n runs over
    window-interior pairs, matching the truncated interaction.
    """
    if model.kind != "two_qubit":
        raise ParameterError("observables_two_qubit needs a two-qubit model")
    slabs = _require_slabs(rho, model)
    coh, pops, mean, second, var, _ = _slab_observables(slabs, model)
    return TwoQubitObservables(
        delta=coh,
        gamma1=float(pops[0] + pops[1]),
        gamma2=float(pops[0] + pops[2]),
        ew_mean=mean,
        ew_second=second,
        ew_var=var,
    )


def observables_qutrit(rho: np.ndarray, model: ModelOperators) -> QutritObservables:
    """Omega, excited-state probabilities B_1/B_2, and weight moments.

    Omega = sum_n(<2,n|rho|1,n+1> - <1,n+1|rho|2,n>); B_i sums level i's
    population over the ladder.
    """
    if model.kind != "qutrit":
        raise ParameterError("observables_qutrit needs a qutrit model")
    slabs = _require_slabs(rho, model)
    coh, pops, mean, second, var, _ = _slab_observables(slabs, model)
    return QutritObservables(
        omega=coh,
        b1=float(pops[1]),
        b2=float(pops[2]),
        ew_mean=mean,
        ew_second=second,
        ew_var=var,
    )


def _require_slabs(rho, model):
    rho = np.asarray(rho)
    if rho.shape != (model.dim, model.dim):
        raise ParameterError(
            f"density matrix shape {rho.shape} does not match model dimension {model.dim}"
        )
    return _kernel.to_slabs(rho, model.machine_dim, model.ladder_size)


def master_rhs(rho: np.ndarray, model: ModelOperators) -> np.ndarray:
    """Right-hand side of the master equation on a square density matrix.

    Returns -i[H0 + Hint, rho] + sum_i p_i (R_i(rho) - rho) with the reset
    structure of the model.  The returned derivative is traceless.
    """
    slabs = _require_slabs(rho, model)
    tables = _kernel.KernelTables(model)
    out = _kernel.rhs_slabs(slabs, tables)
    return _kernel.from_slabs(out, model.machine_dim, model.ladder_size)


def work_rate_instant(rho: np.ndarray, model: ModelOperators) -> float:
    """Instantaneous lifting rate: -i g E_w Delta (two-qubit) or -i g E2 Omega (qutrit).

    The result must be real for a Hermitian state; an imaginary residual
    above 1e-10 signals a basis or indexing bug and raises.
    """
    if model.kind == "two_qubit":
        coh = observables_two_qubit(rho, model).delta
    else:
        coh = observables_qutrit(rho, model).omega
    val = -1j * model.g * model.window.spacing * coh
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise RuntimeError(
            f"work rate came out non-real ({val}); density matrix is not Hermitian "
            "or the basis ordering is corrupted"
        )
    return float(val.real)


def boundary_population(rho: np.ndarray, window) -> float:
    """Total population on the outermost two ladder sites at each end."""
    rho = np.asarray(rho)
    L = window.size
    M = rho.shape[0] // L
    r4 = rho.reshape(M, L, M, L)
    w = np.einsum("mlml->l", r4).real
    return float(w[0] + w[1] + w[L - 2] + w[L - 1])


@dataclass
class Trajectory:
    """Recorded time series of one integration run.

    For qutrit runs ``delta`` holds Omega and ``gamma1``/``gamma2`` hold
    B1/B2; ``q_c``/``q_h`` are NaN.  ``meta`` echoes the model and
    integration configuration for the JSON serialization.
    """

    kind: str
    t: np.ndarray
    ew_mean: np.ndarray
    ew_var: np.ndarray
    delta: np.ndarray  # complex; Omega for qutrit runs
    gamma1: np.ndarray
    gamma2: np.ndarray
    q_c: np.ndarray
    q_h: np.ndarray
    boundary_pop: np.ndarray
    trace_residual: np.ndarray
    renorm_count: int = 0
    min_eigenvalue: Optional[float] = None
    final_rho: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for i in range(len(self.t)):
                row = (
                    self.t[i], self.ew_mean[i], self.ew_var[i],
                    self.delta[i].real, self.delta[i].imag,
                    self.gamma1[i], self.gamma2[i],
                    self.q_c[i], self.q_h[i],
                    self.boundary_pop[i], self.trace_residual[i],
                )
                fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")

    def to_dict(self):
        return {
            "kind": self.kind,
            "columns": {
                "t": self.t.tolist(),
                "Ew_mean": self.ew_mean.tolist(),
                "Ew_var": self.ew_var.tolist(),
                "delta_re": self.delta.real.tolist(),
                "delta_im": self.delta.imag.tolist(),
                "gamma1": self.gamma1.tolist(),
                "gamma2": self.gamma2.tolist(),
                "q_c": self.q_c.tolist(),
                "q_h": self.q_h.tolist(),
                "boundary_pop": self.boundary_pop.tolist(),
                "trace_residual": self.trace_residual.tolist(),
            },
            "renorm_count": self.renorm_count,
            "min_eigenvalue": self.min_eigenvalue,
            "config_echo": self.meta,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass(frozen=True)
class DriftDiffusionFit:
    """Linear fits of mean and variance of the weight energy vs time."""

    drift: float
    diffusion_slope: float
    fit_window: tuple
    r_squared_drift: float
    r_squared_diffusion: float


def _linfit(t, y):
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) @ (y - y.mean())))
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), r2


def fit_drift_diffusion(traj: Trajectory, window_fraction: float = 0.5) -> DriftDiffusionFit:
    """Least-squares drift/diffusion slopes over the final ``window_fraction``.

    The mean of E_w grows linearly after transients (biased random walk) and
    its variance grows linearly too (sqrt(t) standard deviation); both are
    fitted with straight lines and reported with their r^2.
    """
    if not 0 < window_fraction <= 1:
        raise ParameterError(f"window_fraction must lie in (0, 1], got {window_fraction}")
    t = traj.t
    if len(t) < 3:
        raise ParameterError("trajectory too short to fit")
    t_start = t[-1] - window_fraction * (t[-1] - t[0])
    mask = t >= t_start
    if mask.sum() < 3:
        raise ParameterError("fit window contains fewer than 3 samples")
    tw = t[mask]
    drift, r2d = _linfit(tw, traj.ew_mean[mask])
    diff, r2v = _linfit(tw, traj.ew_var[mask])
    return DriftDiffusionFit(
        drift=drift,
        diffusion_slope=diff,
        fit_window=(float(tw[0]), float(tw[-1])),
        r_squared_drift=r2d,
        r_squared_diffusion=r2v,
    )


def fit_coherence_decay_rate(traj: Trajectory, asymptote: complex, max_modes: int = 3) -> float:
    """Slowest exponential decay rate of |delta(t) - asymptote|, by linear prediction.

    The coherence relaxes as a sum of (possibly complex) exponential modes, so
    a plain log-linear fit fails whenever the dominant pair oscillates through
    zero.  Instead the sampled signal z_k = delta(t_k) - asymptote is fitted
    with an order-``max_modes`` linear recurrence (least squares); the
    recurrence roots mu give per-mode decay rates -ln|mu|/dt, per-mode
    amplitudes come from a Vandermonde solve, and the slowest rate among modes
    carrying non-negligible amplitude is returned.  Exact for noise-free
    multi-exponential data.
    """
    t = traj.t
    steps = np.diff(t)
    if len(steps) < 1:
        raise ParameterError("trajectory too short to fit a decay rate")
    dt_s = float(steps[0])
    uniform = np.nonzero(np.abs(steps - dt_s) > 1e-9 * dt_s)[0]
    end = int(uniform[0]) + 1 if len(uniform) else len(t)
    z = np.asarray(traj.delta[:end], dtype=complex) - complex(asymptote)
    mag = np.abs(z)
    zmax = float(mag.max(initial=0.0))
    if zmax < 1e-300:
        raise ParameterError("coherence shows no transient to fit")
    above = np.nonzero(mag > max(1e-9 * zmax, 1e-14))[0]
    z = z[: int(above[-1]) + 1]
    m = max_modes
    if len(z) < m + 5:
        raise ParameterError(
            f"only {len(z)} usable samples above the noise floor; need {m + 5}"
        )
    cols = np.column_stack([z[m - 1 - j : len(z) - 1 - j] for j in range(m)])
    coeff, *_ = np.linalg.lstsq(cols, z[m:], rcond=None)
    mu = np.roots(np.concatenate(([1.0], -coeff)))
    powers = np.power.outer(mu, np.arange(len(z))).T  # powers[k, i] = mu_i^k
    amps, *_ = np.linalg.lstsq(powers, z, rcond=None)
    keep = (np.abs(mu) < 1.0 + 1e-9) & (np.abs(mu) > 1e-12)
    keep &= np.abs(amps) > 1e-6 * np.abs(amps).max()
    if not keep.any():
        raise ParameterError("no decaying mode with significant amplitude found")
    rates = -np.log(np.abs(mu[keep])) / dt_s
    return float(rates.min())


def _validate_rho0(rho0, model):
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (model.dim, model.dim):
        raise ParameterError(
            f"initial state shape {rho0.shape} does not match model dimension {model.dim}"
        )
    herm = np.abs(rho0 - rho0.conj().T).max()
    if not herm < 1e-10:
        raise ParameterError(f"initial state is not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho0).real
    if abs(tr - 1.0) > 1e-9:
        raise ParameterError(f"initial state trace {tr} deviates from 1 beyond 1e-9")
    return rho0


def integrate(
    model: ModelOperators,
    rho0: np.ndarray,
    cfg: IntegratorConfig,
    force_numpy: bool = False,
) -> Trajectory:
    """Integrate the master equation and record observables.

    Classic 4th-order fixed-step scheme; records every ``cfg.record_every``
    steps (plus t = 0 and the final step), renormalizes and logs trace drift
    beyond 1e-9, spot-checks positivity, and aborts with
    BoundaryOverflowError / StepInstabilityError on ladder overflow or
    non-finite observables.  ``force_numpy`` routes the stepping through the
    pure-numpy kernel (the jitted and numpy kernels agree to rounding; this
    flag exists for tests and environments without numba).
    """
    cfg.validate_for(model)
    rho0 = _validate_rho0(rho0, model)
    M, L = model.machine_dim, model.ladder_size
    tables = _kernel.KernelTables(model)
    slabs = _kernel.to_slabs(rho0, M, L)
    nonzero = [ab for ab in range(tables.MM) if np.any(slabs[ab])]
    active = tables.closure(nonzero)
    wA = np.zeros_like(slabs)
    wB = np.zeros_like(slabs)

    n_total = max(1, int(round(cfg.t_max / cfg.dt)))
    e1 = e2 = r1 = r2 = p1 = p2 = None
    if model.kind == "two_qubit":
        p = model.params
        e1, e2 = p.E1, p.E2
        r1, r2 = p.r1().r, p.r2().r
        p1, p2 = p.p1, p.p2

    rows = []
    renorms = 0
    min_eig = None
    next_pos_check = 0

    def record(step):
        nonlocal renorms, min_eig, next_pos_check, slabs
        tr = float(np.einsum("mll->", slabs[:: M + 1]).real)
        residual = tr - 1.0
        if abs(residual) > 1e-9:
            slabs *= 1.0 / tr
            renorms += 1
            logger.warning(
                "trace drifted to %.12g at t=%.6g; renormalized", tr, step * cfg.dt
            )
        coh, pops, mean, second, var, w = _slab_observables(slabs, model)
        bpop = float(w[0] + w[1] + w[L - 2] + w[L - 1])
        if model.kind == "two_qubit":
            g1 = float(pops[0] + pops[1])
            g2 = float(pops[0] + pops[2])
            qc = p1 * e1 * (g1 - r1)
            qh = p2 * e2 * (g2 - r2)
        else:
            g1 = float(pops[1])  # B1
            g2 = float(pops[2])  # B2
            qc = qh = math.nan
        vals = (mean, var, coh.real, coh.imag, g1, g2, bpop)
        if not all(math.isfinite(v) for v in vals):
            raise StepInstabilityError(
                f"non-finite observable at t={step * cfg.dt:.6g}; integration diverged"
            )
        if bpop > cfg.boundary_tolerance:
            raise BoundaryOverflowError(
                f"boundary population {bpop:.3e} exceeded tolerance "
                f"{cfg.boundary_tolerance:.3e} at t={step * cfg.dt:.6g}; "
                "enlarge the ladder window"
            )
        if cfg.positivity_check_every and step >= next_pos_check:
            sq = _kernel.from_slabs(slabs, M, L)
            lam = float(np.linalg.eigvalsh(sq)[0])
            min_eig = lam if min_eig is None else min(min_eig, lam)
            next_pos_check = step + cfg.positivity_check_every
        rows.append((step * cfg.dt, mean, var, coh, g1, g2, qc, qh, bpop, residual))

    record(0)
    done = 0
    while done < n_total:
        chunk = min(cfg.record_every, n_total - done)
        slabs, wA, wB = _kernel.run_steps(
            slabs, wA, wB, tables, cfg.dt, chunk, active, force_numpy=force_numpy
        )
        done += chunk
        record(done)

    t, mean, var, coh, g1, g2, qc, qh, bpop, resid = map(np.array, zip(*rows))
    return Trajectory(
        kind=model.kind,
        t=t.astype(float),
        ew_mean=mean.astype(float),
        ew_var=var.astype(float),
        delta=coh.astype(complex),
        gamma1=g1.astype(float),
        gamma2=g2.astype(float),
        q_c=qc.astype(float),
        q_h=qh.astype(float),
        boundary_pop=bpop.astype(float),
        trace_residual=resid.astype(float),
        renorm_count=renorms,
        min_eigenvalue=min_eig,
        final_rho=_kernel.from_slabs(slabs, M, L),
        meta={
            "model": model.kind,
            "window": {
                "n_min": model.window.n_min,
                "n_max": model.window.n_max,
                "n0": model.window.n0,
                "spacing": model.window.spacing,
            },
            "integrator": {
                "dt": cfg.dt,
                "t_max": cfg.t_max,
                "record_every": cfg.record_every,
                "positivity_check_every": cfg.positivity_check_every,
                "boundary_tolerance": cfg.boundary_tolerance,
            },
        },
    )
