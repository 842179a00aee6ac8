import json

import numpy as np
import pytest

from conftest import random_density_matrix
from wigner_lab import io
from wigner_lab.config import SCHEMA, defaults, load_config, parse_config
from wigner_lab.errors import ConfigError
from wigner_lab.fockspace import dm, superposition, wigner_exact
from wigner_lab.wigner import GridSpec


def test_fmt():
    assert io.fmt(1.0 / 3.0) == "0.333333333"
    assert io.fmt(123456789012.0) == "1.23456789e+11"
    assert io.fmt(np.float64(2.5)) == "2.5"
    assert io.fmt(7) == "7"
    assert io.fmt(True) == "true"
    assert io.fmt("WT") == "WT"


def test_csv_round_trip(tmp_path):
    p = io.write_csv(tmp_path / "a" / "t.csv", ["x", "y"], [(0.1, 2), (1 / 7, -3)], "abc")
    raw = p.read_bytes()
    assert b"\r" not in raw
    assert raw.startswith(b"# config_hash: abc\nx,y\n0.1,2\n")
    h, cols, rows = io.read_csv(p)
    assert (h, cols) == ("abc", ["x", "y"])
    assert float(rows[1][0]) == pytest.approx(1 / 7, rel=1e-9)
    (tmp_path / "bad.csv").write_text("x,y\n")
    with pytest.raises(ValueError):
        io.read_csv(tmp_path / "bad.csv")


def test_json_is_canonical(tmp_path):
    a = io.write_json(tmp_path / "a.json", {"b": 1, "a": [1.5]}).read_text()
    assert a == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'


def test_matrix_and_grid_round_trip(rng):
    rho = random_density_matrix(rng, 4)
    obj = json.loads(json.dumps(io.matrix_to_json(rho)))
    assert np.array_equal(io.matrix_from_json(obj), rho)
    with pytest.raises(ValueError):
        io.matrix_from_json({"dim": 3, "data": obj["data"]})
    g = wigner_exact(dm(superposition(3, [0, 2])), GridSpec(-1.0, 1.0, -0.5, 0.5, 5, 3))
    back = io.grid_from_json(json.loads(json.dumps(io.grid_to_json(g))))
    assert back.spec == g.spec
    assert np.array_equal(back.values, g.values)
    rows = io.grid_rows(g)
    assert len(rows) == 15 and rows[1][:2] == (-1.0, 0.0)


def test_config_hash_stable():
    assert io.config_hash("a") == io.config_hash("a")
    assert io.config_hash("a") != io.config_hash("b")
    assert len(io.config_hash("")) == 16


def test_defaults_applied():
    cfg = parse_config("[system]\nbeta_mhz = 30\n")
    assert cfg["system"]["beta_mhz"] == 30.0
    assert cfg["system"]["dim"] == SCHEMA["system"]["dim"][1]
    assert cfg["tomography"] == defaults()["tomography"]
    assert cfg.seed == 0 and cfg.out == "out"


def test_value_parsing():
    cfg = parse_config(
        "[compare]\nwt_pulses = 10, 20 40\n[optimizer]\nremeasure = no\nmax_amp = none\n[tomography]\ngenome = g.json\n"
    )
    assert cfg["compare"]["wt_pulses"] == (10, 20, 40)
    assert cfg["optimizer"]["remeasure"] is False
    assert cfg["optimizer"]["max_amp"] is None
    assert cfg["tomography"]["genome"] == "g.json"


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("[system]\nbeta_mhz = 20\nfoo = 1\n", 3, "unknown key 'foo'"),
        ("[systm]\ndim = 3\n", 1, "unknown section"),
        ("[system]\ndim = three\n", 2, "bad value for system.dim"),
        ("[system]\ndim = 1\n", 2, "system.dim"),
        ("dim = 4\n", 1, "outside"),
        ("[system]\ndim = 4\ndim = 5\n", 3, "duplicate key"),
        ("[tomography]\nmode = fancy\n", 2, "tomography.mode"),
        ("[tomography]\nd = 4\nlevel = 4\n", 3, "level"),
        ("[optimizer]\nn_genomes = 10\nn_elite = 5\n", 3, "n_elite"),
    ],
)
def test_config_errors_carry_line_numbers(tmp_path, text, line, fragment):
    p = tmp_path / "c.ini"
    p.write_text(text)
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    assert exc.value.line == line
    assert f"c.ini:{line}:" in str(exc.value)
    assert fragment in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")
