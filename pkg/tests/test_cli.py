import csv
from pathlib import Path

import numpy as np
import pytest

from dressed_doublets.cli import main
from dressed_doublets.config import ExperimentConfig, parse_config
from dressed_doublets.errors import ConfigError
from dressed_doublets.experiment import MAX_ROWS, decimate

SMALL = "D=4\nbasis_size=40\nn_levels=12\nbasis_frequency=1.0\nperiods=0.5\nsteps_per_period=512\n"


def run_cli(tmp_path, text, *extra, name="cfg.txt"):
    cfg = tmp_path / name
    cfg.write_text(text)
    out = tmp_path / "out"
    return main(["--config", str(cfg), "--out", str(out), *extra]), out


def read_rows(path):
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


# -- config parsing -----------------------------------------------------------


def test_parse_defaults():
    cfg = parse_config("D=4\nratio=1.0")
    assert cfg.D == 4.0 and cfg.ratio == 1.0
    assert cfg.basis_size == 80 and cfg.n_levels == 20
    assert cfg.periods == 3.0 and cfg.steps_per_period == 2048
    assert cfg.basis_frequency is None
    assert cfg.initial == "ground" and cfg.outputs == Path("out")


def test_parse_negative_ratio_names_key():
    with pytest.raises(ConfigError, match="ratio"):
        parse_config("D=4\nratio=-1")


def test_parse_unknown_key_names_key_and_line():
    with pytest.raises(ConfigError, match=r"line 3.*unknown_key"):
        parse_config("D=4\nratio=1\nunknown_key=3")


@pytest.mark.parametrize(
    "text,pattern",
    [
        ("D=4\nratio", r"line 2: expected key=value"),
        ("D=4\nD=5\nratio=1", r"line 2: duplicate key 'D'"),
        ("D=4\nratio=", r"line 2: empty value"),
        ("D=four\nratio=1", r"line 1: invalid value"),
        ("D=4", r"missing required key\(s\): ratio"),
        ("D=4\nratio=1\nbasis_size=20", r"basis_size"),
        ("D=4\nratio=1\nsteps_per_period=10", r"steps_per_period"),
        ("D=4\nratio=1\ninitial=30", r"initial"),
        ("D=4\nratio=1\ninitial=1,2,3", r"initial"),
    ],
)
def test_parse_errors(text, pattern):
    with pytest.raises(ConfigError, match=pattern):
        parse_config(text)


def test_parse_comments_blank_lines_and_overrides():
    text = "# experiment\n\nD = 4   # depth\nratio = 0.5\nbasis_frequency = auto\n"
    cfg = parse_config(text, ratio=0.75, n_levels=None)
    assert cfg.ratio == 0.75
    assert cfg.n_levels == 20


def test_initial_amplitudes_forms():
    base = ExperimentConfig(D=4.0, ratio=1.0, n_levels=8, basis_size=30)
    assert base.initial_amplitudes()[0] == 1
    lvl = base.replace(initial="5").initial_amplitudes()
    assert lvl[4] == 1 and abs(lvl).sum() == 1
    four = base.replace(initial="1, 0, 1j, 0").initial_amplitudes()
    assert four[[0, 4]] == pytest.approx([2**-0.5, 1j * 2**-0.5])
    assert np.vdot(four, four).real == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        base.replace(initial="0,0,0,0")


def test_decimation_bound():
    assert decimate(10).tolist() == list(range(10))
    for n in (4000, 4001, 123457):
        idx = decimate(n)
        assert idx.size <= MAX_ROWS and idx[0] == 0
        assert np.all(np.diff(idx) == idx[1] - idx[0])


# -- end to end ---------------------------------------------------------------


def test_cli_success_writes_artifacts(tmp_path, capsys):
    code, out = run_cli(tmp_path, SMALL + "ratio=1.0\n")
    assert code == 0
    assert "wrote 9 files" in capsys.readouterr().out
    for name in ("bare_numeric", "bare_analytic", "renorm_numeric", "renorm_analytic"):
        header, data = read_rows(out / f"{name}.csv")
        assert len(data) <= MAX_ROWS
        if name.startswith("bare"):
            assert header == ["t", "P1", "P2", "P3", "P4", "norm"]
        else:
            assert header == ["t", "P1p", "P2p", "P3p", "P4p", "leakage"]
        assert np.all(data[:, 1:5].sum(axis=1) <= 1 + 1e-8)
        assert np.all(np.diff(data[:, 0]) > 0)
    report = (out / "report.txt").read_text()
    for section in ("[regime]", "within_validity", "[renormalized parameters]", "[deviations]", "[rabi period"):
        assert section in report
    assert (out / "spectrum_energies.csv").exists() and (out / "spectrum_dipole.csv").exists()


def test_cli_deterministic(tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    first.mkdir()
    second.mkdir()
    code_a, out_a = run_cli(first, SMALL + "ratio=0.75\n")
    code_b, out_b = run_cli(second, SMALL + "ratio=0.75\n")
    assert code_a == code_b == 0
    for f in sorted(out_a.glob("*.csv")):
        assert f.read_bytes() == (out_b / f.name).read_bytes()


def test_cli_zero_field_run(tmp_path):
    code, out = run_cli(tmp_path, SMALL + "ratio=0\n")
    assert code == 0
    _, data = read_rows(out / "bare_numeric.csv")
    assert np.abs(data[:, 1] - 1).max() <= 1e-8
    assert "zero field" in (out / "report.txt").read_text()


def test_cli_warns_outside_validity(tmp_path, capsys):
    code, out = run_cli(tmp_path, SMALL + "ratio=1.0\nthreshold=0.01\n")
    assert code == 0
    assert "outside the validity regime" in capsys.readouterr().err
    assert "WARNING" in (out / "report.txt").read_text()


def test_cli_ratio_override(tmp_path):
    code, out = run_cli(tmp_path, SMALL + "ratio=1.0\n", "--ratio", "0.5")
    assert code == 0
    assert "ratio = 0.5" in (out / "report.txt").read_text()


def test_cli_config_error_exit_code(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "D=4\nratio=-1\n")
    assert code == 2
    assert "ratio" in capsys.readouterr().err


def test_cli_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "nope.txt")]) == 2


def test_cli_numerical_failure_exit_code(tmp_path, capsys):
    code, _ = run_cli(tmp_path, SMALL.replace("steps_per_period=512", "steps_per_period=64") + "ratio=1.0\n")
    assert code == 3
    assert "norm drift" in capsys.readouterr().err


def test_cli_step_budget_is_config_error(tmp_path):
    code, _ = run_cli(tmp_path, SMALL + "ratio=1.0\nmax_steps=1000\n")
    assert code == 2
