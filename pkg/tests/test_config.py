"""Scenario config parsing: strict keys, defaults, and lossless round-trips."""

import json

import pytest

from tinyheat.config import ConfigError, from_dict, load_config
from tinyheat.dynamics import default_dt
from tinyheat.params import QutritEngineParams, TwoQubitEngineParams


def base_dict(**overrides):
    d = {
        "model": "two_qubit",
        "params": {"E1": 1.0, "E2": 2.0, "g": 0.1, "p1": 0.1, "p2": 0.1, "Tc": 1.0, "Th": 4.0},
        "window": {"n_min": -20, "n_max": 60},
        "integrator": {"t_max": 100.0},
    }
    d.update(overrides)
    return d


def qutrit_dict(**overrides):
    d = {
        "model": "qutrit",
        "params": {"E1": 1.0, "E2": 1.0, "g": 0.05, "pc": 0.1, "pr": 0.1, "ph": 0.1,
                   "Tc": 1.0, "Tr": 20.0, "Th": 10.0},
        "window": {"n_min": -15, "n_max": 20},
        "integrator": {"t_max": 100.0},
    }
    d.update(overrides)
    return d


def test_minimal_config_parses():
    cfg = from_dict(base_dict())
    assert cfg.model == "two_qubit"
    assert isinstance(cfg.params, TwoQubitEngineParams)
    assert cfg.window.n_min == -20 and cfg.window.n0 == 0
    assert cfg.window.spacing == pytest.approx(1.0)  # derived from the params
    assert cfg.integrator.t_max == 100.0
    assert cfg.fit_window_fraction == 0.5
    assert cfg.seed is None and cfg.sweep is None


def test_default_dt_filled_from_params():
    cfg = from_dict(base_dict())
    assert cfg.integrator.dt == pytest.approx(default_dt(cfg.params)) == pytest.approx(0.005)
    explicit = base_dict()
    explicit["integrator"] = {"t_max": 100.0, "dt": 0.002}
    assert from_dict(explicit).integrator.dt == 0.002


def test_qutrit_config_parses():
    cfg = from_dict(qutrit_dict())
    assert isinstance(cfg.params, QutritEngineParams)
    assert cfg.window.spacing == pytest.approx(1.0)  # = E2


def test_round_trip_is_lossless():
    for d in (
        base_dict(seed=42, fit_window_fraction=0.4, out_dir="runs",
                  sweep={"parameter": "Th", "grid": [2.5, 3.0, 4.0]}),
        qutrit_dict(),
        {"model": "two_qubit", "params": base_dict()["params"]},  # sections optional
    ):
        cfg = from_dict(d)
        again = from_dict(cfg.to_dict())
        assert again == cfg
        # and the canonical dict is JSON-stable
        assert json.loads(json.dumps(cfg.to_dict())) == cfg.to_dict()


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(extra=1), "'extra'"),
        (lambda d: d["params"].update(E3=1.0), "'E3'"),
        (lambda d: d["window"].update(spacing=1.0), "'spacing'"),
        (lambda d: d["integrator"].update(dt_max=1.0), "'dt_max'"),
        (lambda d: d.update(sweep={"parameter": "Th", "grid": [3.0], "mode": "x"}), "'mode'"),
    ],
)
def test_unknown_keys_rejected_by_name(mutate, fragment):
    d = base_dict()
    mutate(d)
    with pytest.raises(ConfigError, match=fragment):
        from_dict(d)


def test_missing_required_keys():
    with pytest.raises(ConfigError, match="'model'"):
        from_dict({"params": base_dict()["params"]})
    d = base_dict()
    del d["params"]
    with pytest.raises(ConfigError, match="'params'"):
        from_dict(d)
    d = base_dict()
    del d["params"]["Th"]
    with pytest.raises(ConfigError, match="'Th'"):
        from_dict(d)
    d = base_dict()
    d["integrator"] = {}
    with pytest.raises(ConfigError, match="'t_max'"):
        from_dict(d)


def test_bad_model_name():
    with pytest.raises(ConfigError, match="model"):
        from_dict(base_dict(model="three_qubit"))


def test_invalid_physics_reported_as_config_error():
    d = base_dict()
    d["params"]["E2"] = 0.5  # violates E2 > E1
    with pytest.raises(ConfigError, match="E2"):
        from_dict(d)


def test_type_errors_rejected():
    d = base_dict()
    d["params"]["g"] = "strong"
    with pytest.raises(ConfigError, match="'g'"):
        from_dict(d)
    d = base_dict()
    d["params"]["g"] = True  # bool is not a number here
    with pytest.raises(ConfigError, match="'g'"):
        from_dict(d)
    d = base_dict()
    d["window"]["n_min"] = -20.5
    with pytest.raises(ConfigError, match="'n_min'"):
        from_dict(d)
    d = base_dict(out_dir=7)
    with pytest.raises(ConfigError, match="out_dir"):
        from_dict(d)


def test_fit_window_fraction_bounds():
    with pytest.raises(ConfigError, match="fit_window_fraction"):
        from_dict(base_dict(fit_window_fraction=0.0))
    with pytest.raises(ConfigError, match="fit_window_fraction"):
        from_dict(base_dict(fit_window_fraction=1.5))
    assert from_dict(base_dict(fit_window_fraction=1.0)).fit_window_fraction == 1.0


def test_sweep_validation():
    cfg = from_dict(base_dict(sweep={"parameter": "g", "grid": [0.05, 0.1]}))
    assert cfg.sweep.parameter == "g"
    assert cfg.sweep.grid == (0.05, 0.1)
    with pytest.raises(ConfigError, match="'pc'"):  # qutrit field on two-qubit model
        from_dict(base_dict(sweep={"parameter": "pc", "grid": [0.1]}))
    with pytest.raises(ConfigError, match="grid"):
        from_dict(base_dict(sweep={"parameter": "Th", "grid": []}))
    with pytest.raises(ConfigError, match="grid"):
        from_dict(base_dict(sweep={"parameter": "Th", "grid": [3.0, "hot"]}))


def test_require_helpers():
    cfg = from_dict({"model": "two_qubit", "params": base_dict()["params"]})
    with pytest.raises(ConfigError, match="window"):
        cfg.require_window()
    with pytest.raises(ConfigError, match="integrator"):
        cfg.require_integrator()
    with pytest.raises(ConfigError, match="sweep"):
        cfg.require_sweep()


def test_boltzmann_constant_round_trip():
    cfg = from_dict(base_dict(k=2.0))
    assert cfg.params.consts.k == 2.0
    assert from_dict(cfg.to_dict()) == cfg


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="JSON object"):
        load_config(arr)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(base_dict()))
    assert load_config(good) == from_dict(base_dict())
