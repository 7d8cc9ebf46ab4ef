import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iplab.cli import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from iplab.config import (DEFAULTS, RunConfig, UsageError, dump_config_text,
                          parse_config, parse_config_text, to_argv)
from iplab.results import Dataset, csv_text, fmt, read_csv, write_results


def test_fmt_roundtrips_floats():
    for v in (0.1, 1 / 3, -2.5e-300, 6.02214076e23):
        assert float(fmt(v)) == v
    assert fmt(None) == "" and fmt(True) == "1" and fmt(float("nan")) == "nan"
    assert csv_text(("a", "b"), [(1, 0.5)]) == "a,b\n1,0.5\n"


def test_write_results(tmp_path):
    ds = Dataset()
    ds.add("t.csv", ("x", "y"), [(1, 2.0), (2, float("inf"))])
    ds.texts["note.txt"] = "hi\n"
    ds.metadata["gap"] = float("nan")
    paths = write_results(ds, tmp_path / "out", {"command": "x"})
    assert [p.name for p in paths] == ["t.csv", "note.txt", "manifest.json"]
    header, rows = read_csv(tmp_path / "out" / "t.csv")
    assert header == ("x", "y") and rows == [["1", "2"], ["2", "inf"]]
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["files"] == ["note.txt", "t.csv"]
    assert manifest["metadata"]["gap"] == "nan"
    assert not list((tmp_path / "out").glob(".*"))


configs = st.fixed_dictionaries({
    "n_cells": st.integers(2, 5000),
    "lf": st.floats(0.01, 1000, allow_nan=False),
    "eps": st.floats(0, 2, allow_nan=False),
    "seed": st.integers(0, 2**63),
    "points": st.lists(st.floats(0.1, 100, allow_nan=False), min_size=1, max_size=5,
                       unique=True).map(lambda v: tuple(sorted(v))),
    "strength": st.lists(st.floats(0, 0.2), min_size=1, max_size=4).map(tuple),
})


@settings(max_examples=80, deadline=None)
@given(configs, st.sampled_from(["spectrum", "sweep", "disorder", "ipr"]))
def test_config_roundtrip(overrides, command):
    params = {**DEFAULTS, **overrides}
    cfg = RunConfig(command, params)
    assert parse_config(to_argv(cfg)) == cfg


def test_config_file_layering(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# comment\nn-cells = 40\neps = 0.2  # trailing\nsizes = 10, 20, 30\n")
    cfg = parse_config(["scaling", "--config", str(f), "--eps", "0.25"])
    assert cfg["n_cells"] == 40 and cfg["eps"] == 0.25 and cfg["sizes"] == (10, 20, 30)
    assert parse_config_text(dump_config_text(cfg)) == cfg.params
    assert parse_config(["spectrum"])["n_cells"] == 2001
    assert parse_config(["disorder"])["replicas"] == 16


@pytest.mark.parametrize("argv", [
    ["nope"], ["spectrum", "--n-cells", "1"], ["spectrum", "--lf", "0"],
    ["spectrum", "--eps", "-1"], ["spectrum", "--d1", "2", "--d2", "1"],
    ["spectrum", "--n-cells", "x"], ["sweep", "--points", "3,1"],
    ["scaling", "--sizes", "10,20"], ["scaling", "--sizes", "10,21,30"],
    ["disorder", "--strength", "0.5"], ["sweep", "--axis", "mass"],
    ["spectrum", "--lf", "nan"], ["spectrum", "--config", "/no/such/file"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_unknown_config_key():
    with pytest.raises(UsageError):
        parse_config_text("colour = red\n")
    with pytest.raises(UsageError):
        parse_config_text("just words\n")


@pytest.mark.parametrize("command,files", [
    ("spectrum", {"eigenvalues.csv", "spacing.csv", "dos.csv"}),
    ("states", {"states.csv", "eigenvalues.csv", "map.csv"}),
    ("ipr", {"states.csv"}),
    ("variational", {"variational.csv"}),
    ("sweep", {"sweep.csv"}),
])
def test_commands_write_outputs(command, files, tmp_path, capsys):
    out = tmp_path / command
    assert main([command, "--n-cells", "40", "--out-dir", str(out)]) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert files <= set(manifest["files"])
    assert manifest["config"]["command"] == command
    assert capsys.readouterr().out


def test_scaling_and_disorder_commands(tmp_path):
    out = tmp_path / "s"
    assert main(["scaling", "--sizes", "40,80,160", "--target", "mean_B",
                 "--out-dir", str(out)]) == EXIT_OK
    fit = dict(line.split(" = ") for line in (out / "scaling_fit.txt").read_text().splitlines())
    assert math.isfinite(float(fit["exponent"]))
    out = tmp_path / "d"
    assert main(["disorder", "--n-cells", "30", "--replicas", "2", "--strength", "0,0.05",
                 "--out-dir", str(out)]) == EXIT_OK
    _, rows = read_csv(out / "disorder.csv")
    assert len(rows) == 2 and rows[0][1:] != rows[1][1:]


def test_numerical_failure_exit(tmp_path, capsys):
    assert main(["variational", "--eps", "0", "--n-cells", "40",
                 "--out-dir", str(tmp_path)]) == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_io_failure_exit(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["ipr", "--n-cells", "20", "--out-dir", str(blocker / "sub")]) == EXIT_IO
    assert "I/O failure" in capsys.readouterr().err


def test_outputs_byte_identical(tmp_path):
    argv = ["disorder", "--n-cells", "25", "--replicas", "3", "--strength", "0,0.1",
            "--seed", "9"]
    main(argv + ["--out-dir", str(tmp_path / "a")])
    main(argv + ["--out-dir", str(tmp_path / "b")])
    for name in ("sweep.csv", "disorder.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    ma, mb = (json.loads((tmp_path / d / "manifest.json").read_text()) for d in "ab")
    del ma["config"]["params"]["out_dir"], mb["config"]["params"]["out_dir"]
    assert ma == mb
