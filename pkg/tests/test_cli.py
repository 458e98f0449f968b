"""Command-line interface: envelopes, exit codes, configs, reproducibility."""

import csv
import io
import json

import pytest

from pspinlab import __version__
from pspinlab.cli import main


def run_cli(capsys, *argv):
    """Invoke main in-process; returns (exit_code, stdout, stderr)."""
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code if isinstance(exc.code, int) else 1
    out, err = capsys.readouterr()
    return code, out, err


def test_thresholds_json_envelope(capsys):
    code, out, err = run_cli(capsys, "thresholds", "--mixture", "pure:3",
                             "--which", "e_alg")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"version", "config", "seed", "report"}
    assert doc["version"] == __version__
    assert doc["seed"] is None
    assert doc["config"]["mixture"] == "pure:3"
    assert doc["report"]["e_alg"] == pytest.approx(
        2.0 * (2.0 / 3.0) ** 0.5, abs=1e-9
    )
    assert "wall_time_s=" in err


def test_usage_error_exits_one(capsys):
    code, _, err = run_cli(capsys, "thresholds")
    assert code == 1
    assert "mixture" in err
    code, _, _ = run_cli(capsys, "nonsense")
    assert code == 1


def test_domain_error_exits_two(capsys):
    # bad mixture text is caught at parse time: usage error
    code, _, _ = run_cli(capsys, "thresholds", "--mixture", "pure:1")
    assert code == 1
    # a post-parse domain violation maps to exit 2
    code, _, err = run_cli(capsys, "chi", "--algorithm", "diagonal",
                           "--scale", "-1", "--mixture", "pure:3", "--n", "8",
                           "--seed", "1", "--replicas", "4",
                           "--tau-grid", "0,0.5,1")
    assert code == 2
    assert "invalid input" in err


def test_missing_seed_exits_two(capsys):
    code, _, err = run_cli(capsys, "disorder", "--mixture", "pure:3",
                           "--n", "8")
    assert code == 2
    assert "seed" in err


def test_resource_cap_exits_three(capsys):
    code, _, err = run_cli(capsys, "enumerate", "--mixture", "pure:3",
                           "--n", "40", "--seed", "1")
    assert code == 3
    assert "resource cap" in err


def test_enumerate_deterministic_output(capsys):
    argv = ("enumerate", "--mixture", "pure:3", "--n", "8", "--seed", "7",
            "--beta", "0.5")
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_workers_do_not_change_output(capsys):
    base = ("enumerate", "--mixture", "pure:3", "--n", "10", "--seed", "3")
    _, out1, _ = run_cli(capsys, *base, "--workers", "1")
    _, out4, _ = run_cli(capsys, *base, "--workers", "4")
    assert out1 == out4


def test_csv_dialect(capsys):
    code, out, _ = run_cli(capsys, "disorder", "--mixture", "pure:3",
                           "--n", "8", "--seed", "5", "--format", "csv")
    assert code == 0
    assert "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    header = rows[0]
    assert header[0] == "version" and header[1] == "seed"
    for row in rows[1:]:
        assert row[0] == __version__
        assert row[1] == "5"


def test_shatter_auto_band_infeasible_small_p(capsys):
    code, out, _ = run_cli(capsys, "shatter", "--mixture", "pure:3",
                           "--n", "10", "--beta", "1.0", "--seed", "2",
                           "--auto-band", "3,0.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["report"]["feasible"] is False
    assert doc["report"]["reasons"]


def test_shatter_run_twice_byte_identical(capsys):
    argv = ("shatter", "--mixture", "pure:3", "--n", "10", "--beta", "0.9",
            "--seed", "11", "--band", "0.5,0.8", "--eps", "0.4")
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_config_file_supplies_and_flags_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# sample configuration\n"
        "mixture = pure:3\n"
        "n = 8\n"
        "seed = 4\n"
    )
    code, out, _ = run_cli(capsys, "enumerate", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["config"]["n"] == 8
    code, out, _ = run_cli(capsys, "enumerate", "--config", str(cfg),
                           "--n", "9")
    assert code == 0
    assert json.loads(out)["config"]["n"] == 9


def test_bad_config_line_exits_two(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mixture pure:3\n")
    code, _, err = run_cli(capsys, "enumerate", "--config", str(cfg),
                           "--n", "8", "--seed", "1")
    assert code == 2
    assert "key=value" in err


def test_beta_above_static_threshold_warns(capsys):
    code, _, err = run_cli(capsys, "shatter", "--mixture", "pure:3",
                           "--n", "8", "--beta", "5.0", "--seed", "1",
                           "--band", "0.5,0.8", "--eps", "0.4")
    assert code == 0
    assert "beta" in err.lower() and "exceeds" in err.lower()


def test_ogp_membership_subcommand(capsys):
    code, out, _ = run_cli(capsys, "ogp", "--mode", "membership",
                           "--mixture", "pure:3", "--n", "8", "--seed", "6",
                           "--sigma", "0", "--beta", "0.5",
                           "--beta-prime", "0.25", "--band", "0.2,0.8",
                           "--tau", "0.5", "--c", "2.0", "--replicas", "8")
    assert code == 0
    rep = json.loads(out)["report"]
    assert set(rep) >= {"in_domain", "member", "conditional_prob",
                        "threshold"}


def test_chi_subcommand_curve(capsys):
    code, out, _ = run_cli(capsys, "chi", "--algorithm", "diagonal",
                           "--scale", "0.05", "--mixture", "pure:3",
                           "--n", "10", "--seed", "8", "--replicas", "20",
                           "--tau-grid", "0,0.5,1")
    assert code == 0
    rep = json.loads(out)["report"]
    assert len(rep["taus"]) == 3
    assert rep["algorithm"].startswith("diagonal")


def test_rarity_subcommand(capsys):
    code, out, _ = run_cli(capsys, "rarity", "--algorithm", "greedy",
                           "--mixture", "pure:3", "--n", "8", "--seed", "12",
                           "--beta", "0.5", "--beta-prime", "0.25",
                           "--band", "0.2,0.8", "--replicas", "4",
                           "--inner", "4", "--grid-k", "2",
                           "--c", "2.0", "--mass-samples", "4")
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["combined_lhs"] == pytest.approx(
        rep["p_in_exceptional"] + 4.0 * rep["p_not_in_s_beta_prime"]
    )
