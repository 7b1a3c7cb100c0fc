"""Command-line front end: ``tinyheat simulate | verify | sweep``.

Exit codes: 0 success, 1 verification failure, 2 invalid config/arguments,
3 ladder-boundary overflow, 4 integration instability.  All output files are
byte-identical across runs of the same config.
"""

from __future__ import annotations

import argparse
import csv
import functools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import config as config_mod
from .config import ConfigError, ScenarioConfig
from .dynamics import (
    BoundaryOverflowError,
    StepInstabilityError,
    fit_coherence_decay_rate,
    fit_drift_diffusion,
    integrate,
)
from .operators import build_qutrit, build_two_qubit, thermal_product_state
from .params import ParameterError, joint_bias
from .reduced import (
    ReducedStateTwoQubit,
    asymptote_report,
    closed_form_delta,
    gamma_infinity,
    lifting_condition_qutrit,
    main_text_equal_rates_work_rate,
    qutrit_stationary,
    work_rate_qutrit,
    work_rate_two_qubit,
)
from .thermo import heat_current_asymptote

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_BOUNDARY = 3
EXIT_UNSTABLE = 4


def _build_model(cfg: ScenarioConfig):
    window = cfg.require_window()
    if cfg.model == "two_qubit":
        return build_two_qubit(cfg.params, window)
    return build_qutrit(cfg.params, window)


def _simulate_run(cfg: ScenarioConfig):
    model = _build_model(cfg)
    traj = integrate(model, thermal_product_state(model), cfg.require_integrator())
    fit = fit_drift_diffusion(traj, cfg.fit_window_fraction)
    return model, traj, fit


def _fit_mask(traj, fraction):
    t = traj.t
    return t >= t[-1] - fraction * (t[-1] - t[0])


# --- simulate ---------------------------------------------------------------


def _cmd_simulate(cfg: ScenarioConfig, out_dir: str, quiet: bool) -> int:
    model, traj, fit = _simulate_run(cfg)
    csv_path = os.path.join(out_dir, "trajectory.csv")
    traj.to_csv(csv_path)

    steady = {
        "boundary_pop": float(traj.boundary_pop[-1]),
        "trace_residual": float(traj.trace_residual[-1]),
    }
    if cfg.model == "two_qubit":
        steady.update(
            delta_re=float(traj.delta[-1].real),
            delta_im=float(traj.delta[-1].imag),
            gamma1=float(traj.gamma1[-1]),
            gamma2=float(traj.gamma2[-1]),
            q_c=float(traj.q_c[-1]),
            q_h=float(traj.q_h[-1]),
        )
    else:
        steady.update(
            omega_re=float(traj.delta[-1].real),
            omega_im=float(traj.delta[-1].imag),
            b1=float(traj.gamma1[-1]),
            b2=float(traj.gamma2[-1]),
        )
    summary = {
        "config": cfg.to_dict(),
        "final_moments": {
            "t": float(traj.t[-1]),
            "Ew_mean": float(traj.ew_mean[-1]),
            "Ew_var": float(traj.ew_var[-1]),
        },
        "fit": {
            "drift": fit.drift,
            "diffusion_slope": fit.diffusion_slope,
            "fit_window": list(fit.fit_window),
            "r_squared_drift": fit.r_squared_drift,
            "r_squared_diffusion": fit.r_squared_diffusion,
        },
        "steady_state": steady,
        "diagnostics": {
            "n_samples": len(traj),
            "renorm_count": traj.renorm_count,
            "min_eigenvalue": traj.min_eigenvalue,
        },
        "closed_form": asymptote_report(cfg.params).to_dict(),
    }
    json_path = os.path.join(out_dir, "summary.json")
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if not quiet:
        print(f"wrote {csv_path}")
        print(f"wrote {json_path}")
        print(f"fitted drift {fit.drift:.6g} (r^2 {fit.r_squared_drift:.6f})")
    return EXIT_OK


# --- verify -----------------------------------------------------------------


@dataclass(frozen=True)
class VerifyRow:
    """One simulated-vs-closed-form comparison."""

    name: str
    simulated: float
    closed_form: float
    error: float
    tolerance: float
    kind: str  # relative | absolute | upper_bound | informational
    passed: bool
    note: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "simulated": self.simulated,
            "closed_form": self.closed_form,
            "error": self.error,
            "tolerance": self.tolerance,
            "kind": self.kind,
            "passed": self.passed,
            "note": self.note,
        }


def _relative_row(name, sim, closed, rel_tol, note="", zero_abs_tol=1e-6):
    """Relative comparison, falling back to absolute when the target is ~0."""
    if abs(closed) <= 1e-12:
        err = abs(sim - closed)
        return VerifyRow(name, sim, closed, err, zero_abs_tol, "absolute", err <= zero_abs_tol, note)
    err = abs(sim - closed) / abs(closed)
    return VerifyRow(name, sim, closed, err, rel_tol, "relative", err <= rel_tol, note)


def _absolute_row(name, sim, closed, abs_tol, note=""):
    err = abs(sim - closed)
    return VerifyRow(name, sim, closed, err, abs_tol, "absolute", err <= abs_tol, note)


def _info_row(name, sim, closed, note):
    return VerifyRow(name, sim, closed, abs(sim - closed), math.inf, "informational", True, note)


def _decay_rate_row(cfg, traj) -> VerifyRow:
    """Transient-structure check, aware of which modes actually carry Delta.

    The expected rate is not blindly the slowest characteristic root: a root
    whose mode has (numerically) zero Delta-amplitude for this initial state
    cannot show up in the coherence transient, so it is excluded before
    taking the slowest remaining rate.
    """
    params = cfg.params
    initial = ReducedStateTwoQubit(
        Delta=complex(traj.delta[0]),
        Gamma1=float(traj.gamma1[0]),
        Gamma2=float(traj.gamma2[0]),
    )
    sol = closed_form_delta(initial, params)
    if sol.degenerate:
        return _info_row("delta_decay_rate", math.nan, math.nan,
                         "characteristic roots nearly degenerate; rate check skipped")
    amps = np.abs(np.array(sol.deltas))
    if amps.max() < 1e-15:
        return _info_row("delta_decay_rate", math.nan, math.nan,
                         "no coherence transient for this initial state; rate check skipped")
    kept = [lam for lam, a in zip(sol.lambdas.lambdas, amps) if a > 1e-9 * amps.max()]
    expected = -max(lam.real for lam in kept)
    fitted = fit_coherence_decay_rate(traj, sol.delta_infinity)
    return _relative_row(
        "delta_decay_rate", fitted, expected, 0.05,
        note="slowest characteristic-root rate among modes with nonzero Delta amplitude",
    )


def _verify_rows_two_qubit(cfg: ScenarioConfig, traj, fit) -> list:
    params = cfg.params
    rows = []
    w_cf = work_rate_two_qubit(params)
    rows.append(_relative_row("work_rate", fit.drift, w_cf, 0.01))

    g1_cf, g2_cf = gamma_infinity(params)
    rows.append(_absolute_row("Gamma1_infinity", float(traj.gamma1[-1]), g1_cf, 1e-3))
    rows.append(_absolute_row("Gamma2_infinity", float(traj.gamma2[-1]), g2_cf, 1e-3))

    mask = _fit_mask(traj, cfg.fit_window_fraction)
    qc_avg = float(traj.q_c[mask].mean())
    qh_avg = float(traj.q_h[mask].mean())
    rows.append(_relative_row("q_c_rate", qc_avg, heat_current_asymptote(params, 1), 0.01))
    rows.append(_relative_row("q_h_rate", qh_avg, heat_current_asymptote(params, 2), 0.01))

    residual = abs(qc_avg + qh_avg - fit.drift)
    tol = max(0.01 * abs(w_cf), 1e-6)
    rows.append(_absolute_row("first_law_residual", residual, 0.0, tol,
                              note="|q_c + q_h - work_rate| from time-averaged rates"))

    eta_ideal = 1.0 - params.E1 / params.E2
    eta_carnot = 1.0 - params.Tc / params.Th
    if qh_avg > 0:
        eta = fit.drift / qh_avg
        rows.append(_relative_row("efficiency", eta, eta_ideal, 0.01))
        err = max(0.0, eta - eta_carnot)
        rows.append(VerifyRow("efficiency_below_carnot", eta, eta_carnot, err, 1e-9,
                              "upper_bound", err <= 1e-9))
    else:
        rows.append(_info_row("efficiency", math.nan, eta_ideal,
                              "non-engine regime (q_h <= 0); efficiency undefined"))

    if params.g > 0:
        try:
            rows.append(_decay_rate_row(cfg, traj))
        except ParameterError as exc:
            rows.append(_info_row("delta_decay_rate", math.nan, math.nan,
                                  f"rate fit not applicable: {exc}"))
    return rows


def _verify_rows_qutrit(cfg: ScenarioConfig, traj, fit) -> list:
    params = cfg.params
    rows = []
    w_cf = work_rate_qutrit(params)
    rows.append(_relative_row("work_rate", fit.drift, w_cf, 0.02))

    stat = qutrit_stationary(params)
    rows.append(_absolute_row("B1_infinity", float(traj.gamma1[-1]), stat.B1, 1e-3))
    rows.append(_absolute_row("B2_infinity", float(traj.gamma2[-1]), stat.B2, 1e-3))

    lift = lifting_condition_qutrit(params)
    if lift.equal_rates_form is not None:
        mt = main_text_equal_rates_work_rate(params)
        rows.append(_info_row(
            "main_text_equal_rates_formula", mt, w_cf,
            "the separately printed equal-rates expression disagrees with the "
            "general formula (which matches the simulation); shown for the record",
        ))
    return rows


def _cmd_verify(cfg: ScenarioConfig, out_dir: str, quiet: bool) -> int:
    model, traj, fit = _simulate_run(cfg)
    if cfg.model == "two_qubit":
        rows = _verify_rows_two_qubit(cfg, traj, fit)
    else:
        rows = _verify_rows_qutrit(cfg, traj, fit)
    overall = all(r.passed for r in rows)

    report = {
        "rows": [r.to_dict() for r in rows],
        "overall_pass": overall,
        "config": cfg.to_dict(),
    }
    json_path = os.path.join(out_dir, "verify_report.json")
    with open(json_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if not quiet:
        header = f"{'quantity':<28} {'simulated':>14} {'closed-form':>14} {'error':>10} {'tol':>9}  result"
        print(header)
        print("-" * len(header))
        for r in rows:
            verdict = "INFO" if r.kind == "informational" else ("PASS" if r.passed else "FAIL")
            tol = "-" if math.isinf(r.tolerance) else f"{r.tolerance:.1e}"
            print(
                f"{r.name:<28} {r.simulated:>14.6g} {r.closed_form:>14.6g} "
                f"{r.error:>10.2e} {tol:>9}  {verdict}"
            )
            if r.note:
                print(f"{'':<28}   {r.note}")
        print(f"overall: {'PASS' if overall else 'FAIL'} ({len(rows)} rows)")
        print(f"wrote {json_path}")
    return EXIT_OK if overall else EXIT_VERIFY_FAILED


# --- sweep ------------------------------------------------------------------


def _sweep_point(base: dict, parameter: str, simulate: bool, value: float) -> dict:
    """Evaluate one grid point; returns a row dict and never raises."""
    row = {"value": value, "status": "ok"}
    nan = math.nan
    try:
        d = json.loads(json.dumps(base))
        d["params"][parameter] = value
        d.pop("sweep", None)
        cfg = config_mod.from_dict(d)
        if cfg.model == "two_qubit":
            bias = joint_bias(cfg.params)
            row.update(
                bias_gap=bias.bias_gap,
                work_rate=work_rate_two_qubit(cfg.params),
                eta_ideal=1.0 - cfg.params.E1 / cfg.params.E2,
                eta_carnot=1.0 - cfg.params.Tc / cfg.params.Th,
            )
        else:
            row.update(
                work_rate=work_rate_qutrit(cfg.params),
                lifting_general=lifting_condition_qutrit(cfg.params).general,
            )
        if simulate:
            _, _, fit = _simulate_run(cfg)
            row["sim_drift"] = fit.drift
    except (ConfigError, ParameterError, BoundaryOverflowError, StepInstabilityError) as exc:
        row["status"] = f"error: {exc}"
        keys = (
            ("bias_gap", "work_rate", "eta_ideal", "eta_carnot")
            if base.get("model") == "two_qubit"
            else ("work_rate", "lifting_general")
        )
        for k in keys:
            row.setdefault(k, nan)
        if simulate:
            row.setdefault("sim_drift", nan)
    return row


def _worker_cap(n_points: int) -> int:
    env = os.environ.get("TINYHEAT_MAX_WORKERS")
    if env is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(
                f"TINYHEAT_MAX_WORKERS must be an integer, got {env!r}"
            ) from None
        if cap < 1:
            raise ConfigError(f"TINYHEAT_MAX_WORKERS must be >= 1, got {cap}")
    return max(1, min(n_points, cap))


def _cmd_sweep(cfg: ScenarioConfig, out_dir: str, quiet: bool, simulate: bool) -> int:
    spec = cfg.require_sweep()
    if simulate:
        cfg.require_window()
        cfg.require_integrator()
    base = cfg.to_dict()

    point = functools.partial(_sweep_point, base, spec.parameter, simulate)
    workers = _worker_cap(len(spec.grid))
    if simulate and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, spec.grid))
    else:
        rows = [point(v) for v in spec.grid]

    if cfg.model == "two_qubit":
        columns = [spec.parameter, "bias_gap", "work_rate", "eta_ideal", "eta_carnot"]
        keys = ["value", "bias_gap", "work_rate", "eta_ideal", "eta_carnot"]
    else:
        columns = [spec.parameter, "work_rate", "lifting_general"]
        keys = ["value", "work_rate", "lifting_general"]
    if simulate:
        columns.append("sim_drift")
        keys.append("sim_drift")
    columns.append("status")
    keys.append("status")

    csv_path = os.path.join(out_dir, "sweep.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            out = []
            for k in keys:
                v = row[k]
                if isinstance(v, bool):
                    out.append("true" if v else "false")
                elif isinstance(v, float):
                    out.append(format(v, ".17g"))
                else:
                    out.append(v)
            writer.writerow(out)

    flagged = sum(1 for r in rows if r["status"] != "ok")
    if not quiet:
        print(f"wrote {csv_path} ({len(rows)} points, {flagged} flagged)")
        if flagged:
            for r in rows:
                if r["status"] != "ok":
                    print(f"  {spec.parameter}={r['value']:g}: {r['status']}", file=sys.stderr)
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tinyheat",
        description="Simulate and verify the two smallest self-contained quantum heat engines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("simulate", "integrate one scenario and write trajectory.csv + summary.json"),
        ("verify", "run the simulation and compare it to every closed form"),
        ("sweep", "evaluate closed forms (optionally simulations) over a parameter grid"),
    )
    for name, help_text in specs:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to a JSON scenario file")
        sp.add_argument("--out", default=None, help="output directory (default: config out_dir or '.')")
        sp.add_argument("--quiet", action="store_true", help="suppress progress output")
        if name == "sweep":
            sp.add_argument(
                "--simulate",
                action="store_true",
                help="run a full simulation at every grid point (slow)",
            )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = config_mod.load_config(args.config)
        out_dir = args.out or cfg.out_dir or "."
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "simulate":
            return _cmd_simulate(cfg, out_dir, args.quiet)
        if args.command == "verify":
            return _cmd_verify(cfg, out_dir, args.quiet)
        return _cmd_sweep(cfg, out_dir, args.quiet, args.simulate)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BoundaryOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except StepInstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE


if __name__ == "__main__":
    sys.exit(main())
