import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from teamai.config import Config, dump_config, load_config, parse_config
from teamai.exceptions import ConfigError

ORING = {"model": "chain", "n": 3, "c": 1.0, "production": {"oring_alpha": 0.5}}


def test_defaults():
    cfg = parse_config({"production": {"oring_alpha": 0.5}})
    assert cfg.model == "chain" and cfg.n == 3 and cfg.capacity == 1.0
    assert cfg.instance().p == pytest.approx([0.125, 0.25, 0.5, 1.0])


@given(
    st.sampled_from(["chain", "task", "star", "strategic"]),
    st.integers(3, 6),
    st.floats(0.1, 10.0),
    st.floats(0.05, 0.95),
    st.one_of(st.none(), st.floats(0.001, 0.5)),
)
def test_round_trip(model, n, c, alpha, step):
    doc = {
        "model": model, "n": n, "c": c, "production": {"oring_alpha": alpha},
        "capacity": 1.0, "solver": {"grid_step": step, "tol": 1e-9}, "output": {"report": "r.json"},
    }
    cfg = parse_config(doc)
    again = parse_config(json.loads(dump_config(cfg)))
    assert again == cfg
    assert dump_config(again) == dump_config(cfg)


def test_round_trip_explicit_p_and_simulation_fields():
    doc = {"production": {"p": [0.05, 0.15, 0.3, 0.6]}, "strategy": [0, 0, 0.5], "deviant": 2}
    cfg = parse_config(doc)
    assert parse_config(cfg.to_dict()) == cfg


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"production": {}}, "production"),
        ({"production": {"p": [0.1, 0.2, 0.4, 0.8], "oring_alpha": 0.5}}, "production"),
        ({"production": {"oring_alpha": 1.2}}, "production.oring_alpha"),
        ({"production": {"oring_alpha": "half"}}, "production.oring_alpha"),
        ({"production": {"p": [0.1, 0.2, 0.3, 0.4]}}, "production"),
        ({"production": {"p": [0.1, 0.2, 0.4]}}, "production"),
        ({"n": 2, "production": {"oring_alpha": 0.5}}, "n"),
        ({"n": 3.5, "production": {"oring_alpha": 0.5}}, "n"),
        ({"c": 0, "production": {"oring_alpha": 0.5}}, "c"),
        ({"model": "mesh", "production": {"oring_alpha": 0.5}}, "model"),
        ({"capacity": 2, "production": {"oring_alpha": 0.5}}, "capacity"),
        ({"model": "task", "capacity": 4, "production": {"oring_alpha": 0.5}}, "capacity"),
        ({"solver": {"grid_step": 0}, "production": {"oring_alpha": 0.5}}, "solver.grid_step"),
        ({"solver": {"tol": -1}, "production": {"oring_alpha": 0.5}}, "solver.tol"),
        ({"solver": {"mesh": 1}, "production": {"oring_alpha": 0.5}}, "solver"),
        ({"strategy": [0.5, 0.5], "production": {"oring_alpha": 0.5}}, "strategy"),
        ({"deviant": 4, "production": {"oring_alpha": 0.5}}, "deviant"),
        ({"colour": "red", "production": {"oring_alpha": 0.5}}, "colour"),
    ],
)
def test_field_level_errors(doc, field):
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert info.value.field == field
    assert str(info.value).startswith(field + ":")


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError) as info:
        load_config(bad)
    assert info.value.field == "config"


def test_with_model():
    cfg = parse_config(ORING).with_model("star")
    assert isinstance(cfg, Config) and cfg.model == "star"
