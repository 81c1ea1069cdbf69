import argparse
import json
import subprocess
import sys
from pathlib import Path

import pytest

from approxradar import cli
from approxradar.config import RunConfig, parse_config, parse_config_text
from approxradar.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]
COSTS = str(ROOT / "fixtures" / "reference_costs.csv")


# -- config ------------------------------------------------------------------------------------

def test_empty_config_gives_defaults():
    cfg = parse_config_text("")
    assert cfg == RunConfig(output_dir=cfg.output_dir)
    assert (cfg.radar.n_subcarriers, cfg.radar.n_symbols) == (32, 16)
    assert cfg.radar.subcarrier_spacing_hz == 960e3
    assert (cfg.target.range_m, cfg.target.velocity_mps) == (50.0, 20.0)
    assert cfg.runs == 100 and len(cfg.snr_grid) == 16


def test_full_config(tmp_path):
    text = """
    # scene
    range_m = 30          # metres
    velocity_mps = 0
    estimator_mode = flattened
    twiddle_sign = -1
    pairs = [acc+acc, loa4+tmul6, "fixture:add16se_3BD+acc"]
    snr_grid = {−5, 10, 1}
    runs = 7
    seed = 3
    cost_table = costs.csv
    """
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    cfg = parse_config(path)
    assert cfg.target.range_m == 30.0 and cfg.estimator_mode == "flattened"
    assert cfg.twiddle_sign == -1
    assert cfg.pairs == ("acc+acc", "loa4+tmul6", "fixture:add16se_3BD+acc")
    assert cfg.snr_grid == [float(s) for s in range(-5, 11)]
    assert (cfg.runs, cfg.seed, cfg.cost_table_path) == (7, 3, "costs.csv")


@pytest.mark.parametrize("text, line, key", [
    ("runs = 5\nfoo = 1\n", 2, "foo"),
    ("\n\nseed = x1\n", 3, "seed"),
    ("runs = 1\nruns = 2\n", 2, "runs"),
    ("pairs = [loa4+loa4]\n", 1, "pairs"),
    ("snr_grid = {0, 10, 0}\n", 1, "snr_grid"),
    ("range_m = inf\n", 1, "range_m"),
    ("seed =\n", 1, "seed"),
])
def test_config_errors_carry_line_and_key(text, line, key):
    with pytest.raises(ConfigError) as exc:
        parse_config_text(text)
    assert exc.value.line == line and exc.value.key == key
    assert f"line {line}" in str(exc.value) and key in str(exc.value)


def test_config_missing_equals():
    with pytest.raises(ConfigError) as exc:
        parse_config_text("seed 3")
    assert exc.value.line == 1


def test_config_semantic_error():
    with pytest.raises(ConfigError):
        parse_config_text("n_symbols = 8")


def test_output_dir_from_environment(monkeypatch):
    monkeypatch.setenv("APPROXRADAR_OUTPUT_DIR", "/tmp/somewhere")
    assert RunConfig().output_dir == "/tmp/somewhere"


# -- cli -----------------------------------------------------------------------------------------

def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_json(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--pair", "acc+acc", "--snr", "inf")
    doc = json.loads(out)
    assert code == 0
    assert doc["range_m"] == pytest.approx(50.01, abs=0.01) and doc["peak_bin"] == 164
    assert doc["snr_db"] == "inf"


def test_pareto_example(capsys):
    code, out, _ = run_cli(capsys, "pareto", "--cost", COSTS, "--max-power", "300",
                           "--max-dev", "2.3", "--only-passing")
    assert code == 0
    assert [p["pair"] for p in json.loads(out)] == ["add16se_3BD+mul16s_HFB"]


def test_pareto_flags_without_only_passing(capsys):
    _, out, _ = run_cli(capsys, "pareto", "--cost", COSTS, "--max-power", "300", "--max-dev", "2.3")
    doc = json.loads(out)
    assert len(doc) == 6
    assert [p["pair"] for p in doc if p["passes_constraints"]] == ["add16se_3BD+mul16s_HFB"]


def test_pareto_without_cost_table_fails(capsys):
    code, _, err = run_cli(capsys, "pareto", "--max-power", "300")
    assert code != 0
    assert json.loads(err)["error"] == "ParameterError"


def test_metrics_example(capsys):
    code, out, _ = run_cli(capsys, "metrics", "--model", "tra1", "--width", "4", "--mode", "exhaustive")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "name,width,mode,ep_pct,mae_pct,wce_pct,mre_pct,pairs"
    assert lines[1].split(",")[3] == "75.0"


def test_metrics_fixture_row(capsys):
    _, out, _ = run_cli(capsys, "metrics", "--model", "fixture:mul16s_HFB")
    assert out.splitlines()[1] == "mul16s_HFB,16,fixture,98.43,0.002,,0.22,0"


def test_profile_csv(capsys):
    code, out, _ = run_cli(capsys, "profile", "--snr", "inf")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "bin,range_m,power_norm,power_db" and len(lines) == 513
    assert lines[165].split(",")[2] == "1.0"


def test_sweep_and_probe_csv(capsys):
    _, out, _ = run_cli(capsys, "sweep", "--pair", "acc+acc", "--snr-start", "0", "--snr-stop", "1",
                        "--runs", "2")
    assert len(out.splitlines()) == 3
    _, out, _ = run_cli(capsys, "probe", "--block", "estimator_input", "--sigma", "0", "--runs", "2")
    assert out.splitlines()[0] == "block,sigma,runs,mean_abs_dev_m"
    assert out.splitlines()[1].startswith("estimator_input,0.0,2,")


def test_unknown_subcommand_is_machine_readable(capsys):
    code, _, err = run_cli(capsys, "frobnicate")
    assert code != 0 and json.loads(err)["error"] == "UsageError"


def test_fixture_pair_simulate_fails(capsys):
    code, _, err = run_cli(capsys, "simulate", "--pair", "fixture:add16se_3BD+acc")
    assert code != 0 and json.loads(err)["error"] == "UnsupportedModelError"


def test_config_error_reported(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("bogus = 1\n")
    code, _, err = run_cli(capsys, "simulate", "--config", str(path))
    doc = json.loads(err)
    assert code != 0 and doc["error"] == "ConfigError" and "line 1" in doc["message"]


def test_output_dir_and_byte_identical_reruns(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("APPROXRADAR_OUTPUT_DIR", str(tmp_path / "a"))
    argv_sets = [("simulate", "--snr", "3"), ("profile", "--snr", "3"),
                 ("sweep", "--snr-start", "0", "--snr-stop", "0", "--runs", "2"),
                 ("metrics", "--model", "loa4", "--width", "8"),
                 ("pareto", "--cost", COSTS, "--max-power", "300"),
                 ("probe", "--sigma", "0.5", "--runs", "2")]
    for argv in argv_sets:
        assert cli.main(list(argv)) == 0
    first = {p.name: p.read_bytes() for p in (tmp_path / "a").iterdir()}
    assert set(first) == {"simulate.json", "profile.csv", "sweep.csv", "metrics.csv",
                          "pareto.json", "probe.csv"}
    for argv in argv_sets:
        assert cli.main(list(argv) + ["--output-dir", str(tmp_path / "b")]) == 0
    second = {p.name: p.read_bytes() for p in (tmp_path / "b").iterdir()}
    assert first == second
    assert capsys.readouterr().out == ""


def test_output_flag(tmp_path, capsys):
    path = tmp_path / "x.json"
    assert cli.main(["simulate", "-o", str(path)]) == 0
    assert json.loads(path.read_text())["peak_bin"] == 164


def _subparsers():
    parser = cli.build_parser()
    action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return parser, action.choices


def test_dispatcher_table_matches_subcommands():
    _, subs = _subparsers()
    assert set(subs) == set(cli.COMMANDS) == {"simulate", "profile", "sweep", "metrics", "pareto",
                                              "probe"}


@pytest.mark.parametrize("name", sorted(cli.COMMANDS))
def test_help_lists_every_flag(name):
    _, subs = _subparsers()
    sub = subs[name]
    text = sub.format_help()
    for action in sub._actions:
        if not action.option_strings:
            continue
        assert action.help, f"{name}: {action.option_strings} has no help"
        for flag in action.option_strings:
            assert flag in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "approxradar", "simulate", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "--twiddle-sign" in proc.stdout
