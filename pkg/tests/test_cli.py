import json
import math

import numpy as np
import pytest

from fsic import cli
from fsic.experiments import REGISTRY


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_asymptotics_example(tmp_path, capsys):
    code, out = run(["--out", str(tmp_path), "asymptotics", "--alpha", "0.5", "--q", "0",
                     "--s", "2", "--h", "log:1e-6:1e-2:25"], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "asymptotics.json").read_text())
    assert rep["schema"] == 1 and rep["tag"] == "PowerLaw"
    assert rep["exponent"] == pytest.approx(-4 / 3)
    assert rep["fitted_exponent"] == pytest.approx(-4 / 3, abs=1e-3)
    lines = (tmp_path / "asymptotics_samples.csv").read_text().splitlines()
    assert lines[0].startswith("# generated") and lines[1] == "h,integral"
    assert len(lines) == 2 + 25


def test_euler_energy_example(capsys):
    code, out = run(["euler", "energy", "--sigma", "0.999"], capsys)
    assert code == 0
    value = float(out.out.split()[-1].rstrip("}"))
    assert abs(value - (math.pi ** 3 / 3 - math.pi)) < 0.01


def test_alpha_bound_example(tmp_path, capsys):
    code, out = run(["--out", str(tmp_path), "criteria", "alpha-bound", "--gamma", "6",
                     "--p", "2", "--d", "3", "--convection"], capsys)
    assert code == 0
    assert "0.3333" in out.out
    assert list(tmp_path.glob("*.csv"))


def test_alpha_bound_infeasible(capsys):
    code, out = run(["criteria", "alpha-bound", "--gamma", "1.2", "--p", "1.1", "--d", "3",
                     "--convection"], capsys)
    assert code in (0, 1)
    assert "Infeasible" in out.out


@pytest.mark.parametrize("text,expected", [
    ("lin:0:1:5", np.linspace(0, 1, 5)),
    ("log:1e-6:1e-2:5", np.logspace(-6, -2, 5)),
    ("0.1,0.2,0.5", np.array([0.1, 0.2, 0.5])),
    ("3", np.array([3.0])),
])
def test_parse_grid(text, expected):
    assert np.allclose(cli.parse_grid(text), expected, rtol=1e-14)


@pytest.mark.parametrize("text", ["log:1:2", "lin:a:1:3", "geo:1:2:3", "", "1,,2"])
def test_parse_grid_rejects(text):
    with pytest.raises(cli.UsageError):
        cli.parse_grid(text)


def test_malformed_grid_exit_code(capsys):
    code, out = run(["asymptotics", "--alpha", "0.5", "--q", "0", "--s", "2",
                     "--h", "log:1e-6"], capsys)
    assert code == 2


def test_config_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[asymptotics]\nalpha = 0.5\nq = 0\ns = 2\nh = log:1e-6:1e-2:25\n")
    code, _ = run(["--out", str(tmp_path), "--config", str(cfg), "asymptotics"], capsys)
    assert code == 0
    assert json.loads((tmp_path / "asymptotics.json").read_text())["tag"] == "PowerLaw"


def test_command_line_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[asymptotics]\nalpha = 0.5\nq = 0\ns = 2\nh = log:1e-6:1e-2:25\n")
    code, _ = run(["--out", str(tmp_path), "--config", str(cfg), "asymptotics", "--s", "0.5"],
                  capsys)
    assert code == 0
    assert json.loads((tmp_path / "asymptotics.json").read_text())["tag"] == "Bounded"


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[asymptotics]\nalpha = 0.5\nbogus = 1\n")
    code, out = run(["--config", str(cfg), "asymptotics"], capsys)
    assert code == 2
    assert "bogus" in out.err


def test_csv_is_deterministic(tmp_path, capsys):
    argv = ["asymptotics", "--alpha", "0.25", "--q", "1", "--s", "2", "--h", "log:1e-5:1e-2:9"]
    run(["--out", str(tmp_path / "a")] + argv, capsys)
    run(["--out", str(tmp_path / "b")] + argv, capsys)
    a = (tmp_path / "a" / "asymptotics_samples.csv").read_bytes().split(b"\n", 1)[1]
    b = (tmp_path / "b" / "asymptotics_samples.csv").read_bytes().split(b"\n", 1)[1]
    assert a == b and b"\r" not in a


def test_fsic_out_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FSIC_OUT", str(tmp_path / "env"))
    run(["euler", "energy", "--sigma", "0.5"], capsys)
    assert (tmp_path / "env").is_dir() and list((tmp_path / "env").iterdir())


def test_list_registry(capsys):
    code, out = run(["list"], capsys)
    assert code == 0
    assert len(REGISTRY) >= 12
    for key, exp in REGISTRY.items():
        assert key in out.out
        assert exp.anchor.strip()


def test_run_with_override(tmp_path, capsys):
    code, out = run(["--out", str(tmp_path), "run", "tresca-schedule", "--set", "n_max=20"],
                    capsys)
    assert code == 0
    rep = json.loads((tmp_path / "tresca-schedule.json").read_text())
    assert rep["schema"] == 1 and rep["passed"]


def test_run_unknown_override_is_usage_error(capsys):
    code, _ = run(["run", "tresca-schedule", "--set", "nonsense=1"], capsys)
    assert code == 2


def test_run_unknown_experiment(capsys):
    code, _ = run(["run", "no-such-experiment"], capsys)
    assert code == 2


def test_numerical_failure_exit_code(monkeypatch, capsys):
    def boom(args):
        raise FloatingPointError("overflow")
    monkeypatch.setattr(cli, "build_parser", _patched_parser(cli.build_parser, boom))
    code, out = run(["euler", "energy", "--sigma", "0.5"], capsys)
    assert code == 3 and "numerical failure" in out.err


def test_missing_required_option(capsys):
    code, out = run(["asymptotics", "--alpha", "0.5"], capsys)
    assert code == 2 and "--q" in out.err


def _patched_parser(build, func):
    def wrapped():
        ap = build()
        cli._subparser(ap, "euler").set_defaults(func=func)
        return ap
    return wrapped
