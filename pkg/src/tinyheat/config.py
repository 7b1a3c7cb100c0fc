"""JSON scenario configs: strict parsing, validation, and lossless round-trips.

The on-disk dialect is plain JSON.  Every section rejects unknown keys by
name, so a typo fails loudly instead of silently using a default.  Numbers
round-trip exactly because the CLI serializes them with repr-level precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .dynamics import IntegratorConfig, default_dt
from .params import (
    LadderWindow,
    ParameterError,
    PhysicalConstants,
    QutritEngineParams,
    TwoQubitEngineParams,
)


class ConfigError(ValueError):
    """Malformed or invalid scenario configuration."""


_TWO_QUBIT_PARAM_KEYS = ("E1", "E2", "g", "p1", "p2", "Tc", "Th")
_QUTRIT_PARAM_KEYS = ("E1", "E2", "g", "pc", "pr", "ph", "Tc", "Tr", "Th")
_WINDOW_KEYS = ("n_min", "n_max", "n0")
_INTEGRATOR_KEYS = (
    "dt",
    "t_max",
    "record_every",
    "positivity_check_every",
    "boundary_tolerance",
)
_SWEEP_KEYS = ("parameter", "grid")
_TOP_KEYS = (
    "model",
    "params",
    "k",
    "window",
    "integrator",
    "fit_window_fraction",
    "out_dir",
    "seed",
    "sweep",
)


def _check_keys(section: dict, allowed, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"section {where!r} must be an object, got {type(section).__name__}")
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section {where!r}")


def _number(section: dict, key: str, where: str, required: bool = True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r} in section {where!r}")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"key {key!r} in section {where!r} must be a number, got {v!r}")
    return float(v)


def _integer(section: dict, key: str, where: str, required: bool = True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r} in section {where!r}")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"key {key!r} in section {where!r} must be an integer, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter grid sweep over closed forms (optionally full simulations)."""

    parameter: str
    grid: tuple


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated scenario: model, parameters, and run controls."""

    model: str
    params: object  # TwoQubitEngineParams | QutritEngineParams
    window: Optional[LadderWindow]
    integrator: Optional[IntegratorConfig]
    fit_window_fraction: float = 0.5
    out_dir: Optional[str] = None
    seed: Optional[int] = None
    sweep: Optional[SweepSpec] = None

    def require_window(self) -> LadderWindow:
        if self.window is None:
            raise ConfigError("this command needs a 'window' section in the config")
        return self.window

    def require_integrator(self) -> IntegratorConfig:
        if self.integrator is None:
            raise ConfigError("this command needs an 'integrator' section in the config")
        return self.integrator

    def require_sweep(self) -> SweepSpec:
        if self.sweep is None:
            raise ConfigError("the sweep command needs a 'sweep' section in the config")
        return self.sweep

    def to_dict(self) -> dict:
        """Canonical dict form; parses back to an equal ScenarioConfig."""
        p = self.params
        if self.model == "two_qubit":
            params = {k: getattr(p, k) for k in _TWO_QUBIT_PARAM_KEYS}
        else:
            params = {k: getattr(p, k) for k in _QUTRIT_PARAM_KEYS}
        d: dict = {"model": self.model, "params": params, "k": p.consts.k}
        if self.window is not None:
            d["window"] = {
                "n_min": self.window.n_min,
                "n_max": self.window.n_max,
                "n0": self.window.n0,
            }
        if self.integrator is not None:
            c = self.integrator
            d["integrator"] = {
                "dt": c.dt,
                "t_max": c.t_max,
                "record_every": c.record_every,
                "positivity_check_every": c.positivity_check_every,
                "boundary_tolerance": c.boundary_tolerance,
            }
        d["fit_window_fraction"] = self.fit_window_fraction
        if self.out_dir is not None:
            d["out_dir"] = self.out_dir
        if self.seed is not None:
            d["seed"] = self.seed
        if self.sweep is not None:
            d["sweep"] = {"parameter": self.sweep.parameter, "grid": list(self.sweep.grid)}
        return d


def from_dict(data: dict) -> ScenarioConfig:
    """Parse and validate a config dict; raises ConfigError naming the problem."""
    _check_keys(data, _TOP_KEYS, "top-level")

    model = data.get("model")
    if model not in ("two_qubit", "qutrit"):
        raise ConfigError(f"key 'model' must be 'two_qubit' or 'qutrit', got {model!r}")

    k = _number(data, "k", "top-level", required=False, default=1.0)
    consts = PhysicalConstants(k=k)

    if "params" not in data:
        raise ConfigError("missing required key 'params' in section 'top-level'")
    praw = data["params"]
    keys = _TWO_QUBIT_PARAM_KEYS if model == "two_qubit" else _QUTRIT_PARAM_KEYS
    _check_keys(praw, keys, "params")
    values = {key: _number(praw, key, "params") for key in keys}
    try:
        if model == "two_qubit":
            params = TwoQubitEngineParams(consts=consts, **values)
        else:
            params = QutritEngineParams(consts=consts, **values)
    except ParameterError as exc:
        raise ConfigError(f"invalid 'params': {exc}") from exc

    window = None
    if "window" in data:
        wraw = data["window"]
        _check_keys(wraw, _WINDOW_KEYS, "window")
        try:
            window = LadderWindow(
                n_min=_integer(wraw, "n_min", "window"),
                n_max=_integer(wraw, "n_max", "window"),
                n0=_integer(wraw, "n0", "window", required=False, default=0),
                spacing=params.ladder_spacing,
            )
        except ParameterError as exc:
            raise ConfigError(f"invalid 'window': {exc}") from exc

    integrator = None
    if "integrator" in data:
        iraw = data["integrator"]
        _check_keys(iraw, _INTEGRATOR_KEYS, "integrator")
        dt = _number(iraw, "dt", "integrator", required=False)
        if dt is None:
            dt = default_dt(params)
        try:
            integrator = IntegratorConfig(
                dt=dt,
                t_max=_number(iraw, "t_max", "integrator"),
                record_every=_integer(
                    iraw, "record_every", "integrator", required=False, default=100
                ),
                positivity_check_every=_integer(
                    iraw, "positivity_check_every", "integrator", required=False, default=10000
                ),
                boundary_tolerance=_number(
                    iraw, "boundary_tolerance", "integrator", required=False, default=1e-6
                ),
            )
        except ParameterError as exc:
            raise ConfigError(f"invalid 'integrator': {exc}") from exc

    fraction = _number(data, "fit_window_fraction", "top-level", required=False, default=0.5)
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(
            f"key 'fit_window_fraction' must lie in (0, 1], got {fraction}"
        )

    out_dir = data.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError(f"key 'out_dir' must be a string, got {out_dir!r}")

    seed = _integer(data, "seed", "top-level", required=False)

    sweep = None
    if "sweep" in data:
        sraw = data["sweep"]
        _check_keys(sraw, _SWEEP_KEYS, "sweep")
        pname = sraw.get("parameter")
        if pname not in keys:
            raise ConfigError(
                f"sweep parameter {pname!r} is not a scalar field of the "
                f"{model} model; choose one of {', '.join(keys)}"
            )
        graw = sraw.get("grid")
        if not isinstance(graw, list) or not graw:
            raise ConfigError("sweep 'grid' must be a nonempty list of numbers")
        grid = []
        for i, v in enumerate(graw):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"sweep grid entry {i} must be a number, got {v!r}")
            grid.append(float(v))
        sweep = SweepSpec(parameter=pname, grid=tuple(grid))

    return ScenarioConfig(
        model=model,
        params=params,
        window=window,
        integrator=integrator,
        fit_window_fraction=fraction,
        out_dir=out_dir,
        seed=seed,
        sweep=sweep,
    )


def load_config(path) -> ScenarioConfig:
    """Read a JSON scenario file from disk."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("top-level config must be a JSON object")
    return from_dict(data)
