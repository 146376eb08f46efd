import numpy as np
import pytest

from playhyst import scenarios as sc
from playhyst.calibration import calibrate_preisach
from playhyst.errors import ConfigError
from playhyst.modelio import (dumps_model, fmt, load_config, load_model, loads_model,
                              read_column, save_model, write_csv)


def all_models():
    gl, gr = sc.convex_concave_curves()
    out = dict(sc.convex_concave_models())
    out["ch4_gamma"] = sc.ch4_models()["gamma"]
    out["intro"] = sc.intro_model()
    out["relay"] = calibrate_preisach(gl, gr, 10)
    out["smooth"] = calibrate_preisach(gl, gr, 10, smooth=True)
    return out


@pytest.mark.parametrize("name,model", sorted(all_models().items()))
def test_round_trip_is_fixed_point(name, model):
    text = dumps_model(model)
    again = loads_model(text)
    assert again == model
    assert dumps_model(again) == text


def test_file_round_trip(tmp_path):
    m = sc.ch4_models()["nonlinear_uniform"]
    p = tmp_path / "m.jsonl"
    save_model(m, p)
    assert load_model(p) == m


@pytest.mark.parametrize("text", [
    "",
    "not json\n",
    '{"format": "other", "version": 1, "kind": "linear", "K": 0}\n',
    '{"format": "playhyst-model", "version": 9, "kind": "linear", "K": 0}\n',
    '{"format": "playhyst-model", "version": 1, "kind": "linear", "K": 2}\n'
    '{"mu": 1, "constraint": {"type": "play", "alpha": 0, "beta": 1}, '
    '"trunc": {"kind": "identity"}}\n',
    '{"format": "playhyst-model", "version": 1, "kind": "linear", "K": 1}\n'
    '{"mu": 1, "constraint": {"type": "ring"}, "trunc": {"kind": "identity"}}\n',
    '{"format": "playhyst-model", "version": 1, "kind": "linear", "K": 1}\n'
    '{"constraint": {"type": "play", "alpha": 0, "beta": 1}, "trunc": {"kind": "identity"}}\n',
])
def test_malformed_files(text):
    with pytest.raises(ConfigError):
        loads_model(text)


def test_csv_round_trip(tmp_path):
    p = tmp_path / "sub" / "x.csv"
    vals = [0.1, 1 / 3, np.pi * 1e-17]
    write_csv(p, ["k", "x"], enumerate(vals))
    assert read_column(p, "x") == vals
    assert read_column(p, "k") == [0, 1, 2]
    with pytest.raises(ConfigError):
        read_column(p, "y")
    assert fmt(3) == "3" and fmt("a") == "a" and float(fmt(0.1)) == 0.1


def test_config_sections(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[ode]\ntau = 0.01\nrel-tol = 1e-8\n[pde]\nlambda = 1\n")
    assert load_config(p, "ode", {"tau", "rel_tol"}) == {"tau": "0.01", "rel_tol": "1e-8"}
    assert load_config(p, "scan", {"x"}) == {}
    with pytest.raises(ConfigError, match="lambda"):
        load_config(p, "pde", {"h"})
    bad = tmp_path / "bad.ini"
    bad.write_text("tau = 1\n")
    with pytest.raises(ConfigError):
        load_config(bad, "ode", {"tau"})
