"""Tests for the command line front end."""
import csv
import json
import math
import os
import subprocess
import sys

import pytest

from szego_borel import __version__
from szego_borel.cli import (
    EXIT_DOMAIN,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_USAGE,
    main,
)
from szego_borel.config import TABLE_DIR_ENV
from szego_borel.serializers.json import JSONSerializer, SerializationError

SRC = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "src")


@pytest.fixture(scope="module")
def table_dir(tmp_path_factory):
    """One table directory per module so the m = 2 zeros are built once."""
    return str(tmp_path_factory.mktemp("tables"))


@pytest.fixture(autouse=True)
def isolated_tables(monkeypatch, table_dir):
    monkeypatch.setenv(TABLE_DIR_ENV, table_dir)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse(text):
    """(header, rows, meta) of CSV output with its trailing metadata comment."""
    lines = text.splitlines()
    assert lines[-1].startswith("# ")
    meta = dict(item.split("=", 1) for item in lines[-1][2:].split())
    rows = list(csv.reader(line for line in lines if not line.startswith("#")))
    return rows[0], rows[1:], meta


def test_version_from_module():
    env = dict(os.environ, PYTHONPATH=SRC)
    proc = subprocess.run([sys.executable, "-m", "szego_borel", "--version"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert __version__ in proc.stdout


def test_help(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "kernel" in capsys.readouterr().out


def test_phi_at_origin(capsys):
    code, out, _ = run(capsys, "phi", "--m", "1", "--x", "0")
    assert code == EXIT_OK
    header, rows, meta = parse(out)
    assert header == ["x_re", "x_im", "phi_re", "phi_im", "method", "err_est"]
    assert float(rows[0][2]) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
    assert meta["m"] == "1"
    assert meta["schema_version"] == "1"

    code, out, _ = run(capsys, "phi", "--m", "2", "--x", "0")
    origin = 0.5 * 2 ** -0.25 * math.gamma(0.25)
    assert float(parse(out)[1][0][2]) == pytest.approx(origin, rel=1e-12)


def test_phi_grid_with_asymptotic_comparison(capsys):
    code, out, _ = run(capsys, "phi", "--m", "2", "--grid", "0:6:13", "--compare-asymptotic")
    assert code == EXIT_OK
    header, rows, _ = parse(out)
    assert header[-1] == "deviation"
    assert len(rows) == 13
    assert rows[0][-1] == "nan"
    assert float(rows[-1][-1]) < 0.1


def test_phi_complex_points(capsys):
    code, out, _ = run(capsys, "phi", "--m", "2", "--x", "1+2j", "--x=-0.5j")
    assert code == EXIT_OK
    _, rows, _ = parse(out)
    assert [(float(r[0]), float(r[1])) for r in rows] == [(1.0, 2.0), (0.0, -0.5)]


def test_output_is_deterministic(capsys):
    argv = ("phi", "--m", "3", "--grid=-2:2:9")
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
    assert run(capsys, *argv, "--jobs", "3")[1] == first


def test_json_output(capsys):
    code, out, _ = run(capsys, "phi", "--m", "1", "--x", "0.5", "--output", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["columns"][:3] == ["x_re", "x_im", "phi_re"]
    assert len(doc["rows"]) == 1
    assert doc["meta"]["schema_version"] == "1"


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "phi", "--m", "2")[0] == EXIT_USAGE
    assert run(capsys, "phi", "--m", "0", "--x", "1")[0] == EXIT_USAGE
    assert run(capsys, "phi", "--x", "1", "--emit-plot")[0] == EXIT_USAGE
    config = tmp_path / "lab.json"
    config.write_text('{"ttl": 3}', encoding="utf-8")
    code, _, err = run(capsys, "phi", "--x", "1", "--config", str(config))
    assert code == EXIT_USAGE
    assert "Unknown config keys" in err


@pytest.mark.parametrize("argv", [
    ["phi", "--grid", "0:1"],
    ["phi", "--x", "one"],
    ["kernel", "--point", "1"],
    ["kernel", "--route", "laplace"],
    ["probe", "nothing"],
])
def test_malformed_arguments(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_zeros_refused_for_gaussian(capsys):
    code, _, err = run(capsys, "zeros", "--m", "1")
    assert code == EXIT_DOMAIN
    assert "no zeros" in err


def test_zeros_are_reproducible(capsys, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    code, out, _ = run(capsys, "zeros", "--m", "2", "--count", "20", "--out", str(first))
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["count"] == 20
    assert summary["max_residual"] < 0.1
    run(capsys, "zeros", "--m", "2", "--count", "20", "--out", str(second))
    assert first.read_bytes() == second.read_bytes()

    # the written file can stand in for the cache
    code, out, _ = run(capsys, "probe", "divergence", "--m", "2", "--table", str(first))
    assert code == EXIT_OK
    _, rows, meta = parse(out)
    assert len(rows) == 20
    assert meta["increasing_from"] != "None"


def test_zeros_out_is_not_truncated_by_failed_write(capsys, tmp_path, monkeypatch):
    path = tmp_path / "zeros.json"
    run(capsys, "zeros", "--m", "2", "--count", "6", "--out", str(path))
    before = path.read_bytes()

    def fail(fd):
        raise OSError("device lost")

    with monkeypatch.context() as mp, pytest.raises(OSError, match="device lost"):
        mp.setattr(os, "fsync", fail)
        main(["zeros", "--m", "2", "--count", "6", "--out", str(path)])

    assert path.read_bytes() == before
    assert [p.name for p in tmp_path.iterdir()] == ["zeros.json"]

    def broken(self, table):
        raise SerializationError("Failed to serialize table: boom")

    monkeypatch.setattr(JSONSerializer, "serialize", broken)
    code, _, err = run(capsys, "zeros", "--m", "2", "--count", "6", "--out", str(path))
    assert code == EXIT_ERROR
    assert "boom" in err
    assert path.read_bytes() == before


def test_table_for_another_order(capsys, tmp_path):
    path = tmp_path / "zeros.json"
    run(capsys, "zeros", "--m", "3", "--count", "4", "--out", str(path))
    code, _, err = run(capsys, "kernel", "--m", "2", "--route", "borel", "--table", str(path))
    assert code == EXIT_DOMAIN
    assert "m=3" in err


def test_kernel_marks_failing_points(capsys):
    code, out, _ = run(capsys, "kernel", "--m", "2", "--route", "borel",
                       "--point", "0,1", "--point", "0.5,0")
    assert code == EXIT_OK
    header, rows, meta = parse(out)
    assert header[-1] == "error"
    assert rows[0][-1] == ""
    assert "singular support" in rows[1][-1]
    assert rows[1][4] == "nan"
    assert meta["which"] == "szego"


def test_kernel_refuses_when_every_point_fails(capsys):
    code, _, err = run(capsys, "kernel", "--m", "2", "--route", "borel", "--point", "0.5,0")
    assert code == EXIT_DOMAIN
    assert "singular support" in err


@pytest.mark.parametrize("which", ["szego", "bergman"])
def test_kernel_ratio(capsys, which):
    code, out, _ = run(capsys, "kernel", "--m", "2", "--ratio", "--which", which, "--jobs", "2")
    assert code == EXIT_OK
    header, rows, meta = parse(out)
    assert header == ["x", "y", "t", "ratio_re", "ratio_im", "error"]
    assert len(rows) == 6
    assert float(meta["spread"]) < 1e-3
    for row in rows:
        assert float(row[4]) == pytest.approx(2 * math.pi, rel=1e-3)


def test_emit_plot(capsys, tmp_path):
    out = tmp_path / "profile.csv"
    code, _, _ = run(capsys, "probe", "profile", "--m", "2", "--samples", "6",
                     "--out", str(out), "--emit-plot")
    assert code == EXIT_OK
    _, rows, meta = parse(out.read_text(encoding="utf-8"))
    assert len(rows) == 6
    assert float(meta["band"]) < 10
    script = (tmp_path / "profile.csv.gp").read_text(encoding="utf-8")
    assert "plot 'profile.csv' using 1:4" in script


def test_haslinger_probe(capsys):
    code, out, _ = run(capsys, "probe", "haslinger", "--m", "2", "--samples", "7")
    assert code == EXIT_OK
    _, rows, meta = parse(out)
    assert len(rows) == 7
    assert float(meta["band"]) < 20


def test_boundedness_probe(capsys):
    code, out, _ = run(capsys, "probe", "boundedness", "--m", "2", "--samples", "9")
    assert code == EXIT_OK
    header, rows, meta = parse(out)
    assert header == ["u", "log_abs_g", "branch"]
    assert len(rows) == 9
    assert meta["bounded"] == "true"
