"""Command-line entry points: exit codes, file outputs, determinism."""

from pathlib import Path

from click.testing import CliRunner

from kvnlab import __version__
from kvnlab.cli import main


def test_bare_invocation_asks_for_a_subcommand():
    result = CliRunner().invoke(main, [])
    assert result.exit_code == 2


def test_missing_config_is_a_clean_error(tmp_path):
    result = CliRunner().invoke(
        main, ["brackets-check", "--config", str(tmp_path / "nope.ini"),
               "--out", str(tmp_path / "o")]
    )
    assert result.exit_code != 0
    assert "config" in result.output.lower()


def _run(args):
    result = CliRunner().invoke(main, args)
    assert result.exit_code == 0, result.output
    return result


def test_brackets_check_outputs(tmp_path):
    out = tmp_path / "out"
    result = _run(["brackets-check", "--out", str(out)])
    csv = out / "brackets_check.csv"
    assert csv.exists()
    lines = csv.read_text().splitlines()
    assert lines[0] == f"# kvnlab {__version__}"
    assert lines[1].startswith("identity,")
    # a figure is rendered next to every table
    assert (out / "brackets_check.png").exists()
    summary = (out / "summary.txt").read_text()
    assert "PASS" in summary
    assert "FAIL" not in summary
    assert "PASS" in result.output


def test_landau_outputs_are_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        _run(["landau", "--out", str(out)])
        outs.append((out / "landau.csv").read_bytes())
        assert (out / "landau.png").exists()
    assert outs[0] == outs[1]


def test_ab_outputs(tmp_path):
    out = tmp_path / "out"
    _run(["ab", "--out", str(out)])
    summary = (out / "summary.txt").read_text()
    assert "FAIL" not in summary
    assert (out / "ab.csv").exists()
    assert (out / "ab.png").exists()


def test_config_overrides_are_honored(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[landau]\nb_field = 3.0\nn_tr = 4\nfd_check = 0\n")
    out = tmp_path / "out"
    _run(["landau", "--config", str(cfg), "--out", str(out)])
    body = (out / "landau.csv").read_text().splitlines()
    # eigenvalues are multiples of omega = 3: N runs over -3..3
    values = sorted(float(r.split(",")[1]) for r in body[2:])
    assert values[0] == -9.0 and values[-1] == 9.0
