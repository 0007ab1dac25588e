import numpy as np
import pytest

from covarloop.cli import UsageError, build_config, main, parse_config


def test_parse_config_basic():
    cfg = parse_config("kappa = 0.1\nG = 1e-3  # inline comment\n\n# full-line comment\n")
    assert cfg == {"kappa": "0.1", "G": "1e-3"}


def test_parse_config_duplicate_key():
    with pytest.raises(UsageError, match="duplicate key 'kappa'"):
        parse_config("kappa = 0.1\nkappa = 0.2\n")


def test_parse_config_malformed_line():
    with pytest.raises(UsageError, match="line 1"):
        parse_config("kappa 0.1\n")


def test_build_config_rejects_unknown_key():
    with pytest.raises(UsageError, match="unknown key 'bogus'"):
        build_config("steady", {"bogus": "1"}, {})


def test_build_config_flag_overrides_file():
    cfg = build_config("steady", {"kappa": "0.1", "G": "1e-3"}, {"kappa": "0.2"})
    assert cfg["kappa"] == 0.2
    assert cfg["G"] == 1e-3
    assert cfg["omega_m"] == 1.0  # default


def test_build_config_rejects_nonpositive_rate():
    with pytest.raises(UsageError, match="must be positive"):
        build_config("steady", {}, {"kappa": "-0.1"})


WEAK = ["--kappa", "0.1", "--G", "1e-3", "--Gamma_m", "1e-5", "--N_m", "200"]


def test_cooling_weak_csv(tmp_path):
    out = tmp_path / "cool.csv"
    assert main(["cooling-weak", *WEAK, "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    assert header[0] == "stable"
    assert header[1:7] == ["occupancy", "log_neg", "min_opt_eig",
                           "min_mech_eig", "v_min", "abscissa"]
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["occupancy"]) == pytest.approx(0.988, abs=0.002)
    assert row["stable"] == "1"


def test_steady_runs_from_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kappa = 0.1\nG = 1e-3\nGamma_m = 1e-5\nN_m = 200\n"
                   "loop = passive\na = 0.99\n", encoding="utf-8")
    out = tmp_path / "steady.csv"
    assert main(["steady", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.exists()


def test_unstable_steady_exits_2(tmp_path):
    args = ["steady", "--kappa", "0.01", "--G", "4.5e-3", "--Gamma_m", "1e-3",
            "--regime", "blue-rwa", "--N_m", "100", "--out", str(tmp_path / "u.csv")]
    assert main(args) == 2


def test_unknown_command_exits_1():
    assert main(["frobnicate"]) == 1


def test_unknown_flag_exits_1(tmp_path):
    assert main(["steady", *WEAK, "--bogus", "1"]) == 1


def test_csv_deterministic_across_jobs(tmp_path):
    base = ["squeeze", "--kappa", "0.1", "--G", "1e-3", "--Gamma_m", "1e-5",
            "--N_m", "201", "--z", "1.3", "--eta_min", "0.1", "--eta_max", "0.6",
            "--eta_points", "3"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*base, "--jobs", "1", "--out", str(out1)]) == 0
    assert main([*base, "--jobs", "2", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_float_format_is_full_precision(tmp_path):
    out = tmp_path / "cool.csv"
    main(["cooling-weak", *WEAK, "--out", str(out)])
    body = out.read_text(encoding="utf-8")
    assert "e-" in body or "e+" in body  # %.12e scientific notation
    assert body.endswith("\n")
