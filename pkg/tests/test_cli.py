import json
import math
import subprocess
import sys

import pytest

from partheta.cli import main, parse_complex
from partheta.zeros import refine_zero


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_complex():
    assert parse_complex("0.435+0.123i") == 0.435 + 0.123j
    assert parse_complex("-4") == -4
    assert parse_complex("2i") == 2j
    assert parse_complex("1-2j") == 1 - 2j


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--q", "0.5", "--z", "-4")
    data = json.loads(out)
    assert code == 0
    assert 0 < data["value_re"] < 0.25 and data["value_im"] == 0
    assert data["tail_bound"] < 1e-13


def test_separation(capsys):
    code, out, _ = run(capsys, "separation", "--q", "0.5", "--n", "8", "--kmax", "14")
    assert code == 0 and json.loads(out)["strong"] is True


def test_zeros_count(capsys):
    code, out, _ = run(capsys, "zeros", "--q", "0.3", "--kmax", "5", "--count-only")
    assert code == 0 and json.loads(out)["count"] == 5


def test_density_csv(capsys, tmp_path):
    target = tmp_path / "d.csv"
    code, _, _ = run(capsys, "density", "--branch", "positive", "--a", "100",
                     "--q-grid", "0.9,0.95", "--format", "csv", "--output", str(target))
    lines = target.read_text().splitlines()
    assert code == 0
    assert lines[0] == "q,a,count,normalized,predicted,deviation,quantity"
    assert [ln.split(",")[2] for ln in lines[1:]] == ["14", "28"]


def test_monodromy(capsys):
    code, out, _ = run(capsys, "monodromy", "--loop", "gamma(1)", "--labels", "1-3")
    assert code == 0 and json.loads(out)["cycles"] == [[1, 2]]


def test_byte_identical_reruns(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["spectrum", "--branch", "positive", "--kmax", "2", "-o", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "eval", "--q", "1.5", "--z", "1")
    assert code == 2
    assert json.loads(err)["error"] == "DomainError"


def test_argument_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "--q", "abc", "--z", "1"])
    assert info.value.code == 2


def test_numerical_failure_exit_code(capsys):
    # a contour passing through a zero cannot be certified
    r = abs(refine_zero(0.1, -9.5).z)
    code, _, err = run(capsys, "zeros", "--q", "0.1", "--radius", repr(r), "--count-only")
    assert code == 3 and json.loads(err)["kind"] == "numerical"


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("PARTHETA_EPS", "1e-30")
    code, out, _ = run(capsys, "eval", "--q", "0.5", "--z", "-4")
    assert code == 0 and json.loads(out)["bits"] > 53
    monkeypatch.setenv("PARTHETA_BITS", "20")
    code, _, _ = run(capsys, "eval", "--q", "0.5", "--z", "-4")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "partheta", "eval", "--q", "0.3", "--z", "0",
                           "--format", "csv"], capture_output=True, text=True, check=True)
    header, row = proc.stdout.splitlines()
    values = dict(zip(header.split(","), row.split(",")))
    assert math.isclose(float(values["value_re"]), 1.0)
