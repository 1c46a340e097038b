"""Command-line front end: configuration handling, the four subcommands,
exit codes, and byte-level output determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from ptcasimir.cli import RunConfig, canonical_text, main, parse_config_text
from ptcasimir.errors import ConfigError

# flags for an unbroken point Delta = 1, g = 0.25 with a weak drive
UNBROKEN_FLAGS = ["--omega0", "11", "--kappa", "20", "--epsilon", "0.1",
                  "--alpha", "1", "--beta", "1"]
# same drive detuned onto the exceptional point Delta = 0.5 = 2 g
EP_FLAGS = ["--omega0", "10.5", "--kappa", "20", "--epsilon", "0.1",
            "--alpha", "1", "--beta", "1"]


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "ptcasimir.cli", *args],
        capture_output=True, text=True,
    )


def csv_body(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


def csv_meta(text):
    meta = {}
    for ln in text.splitlines():
        if not ln.startswith("# "):
            break
        key, _, val = ln[2:].partition(" = ")
        meta[key] = val
    return meta


# ---------------------------------------------------------------- config

def test_config_round_trip():
    cfg = RunConfig(dim=32, epsilon=0.07, sweep_steps=11, allow_ep=True,
                    out="runs/a.csv", format="json")
    data = parse_config_text(canonical_text(cfg))
    assert RunConfig(**data) == cfg


def test_config_comments_and_blanks():
    data = parse_config_text("# full line comment\n\n dim = 16  # trailing\n")
    assert data == {"dim": 16}


def test_config_rejects_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("dim = 16\ndim = 32\n")


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text("frobnicate = 3\n")


def test_config_rejects_malformed_line():
    with pytest.raises(ConfigError, match="key=value"):
        parse_config_text("dim sixteen\n")


def test_config_rejects_bad_value():
    with pytest.raises(ConfigError, match="bad value"):
        parse_config_text("dim = sixteen\n")


def test_config_validation():
    for kw in ({"dim": 1}, {"format": "xml"}, {"threads": 0}, {"dt": -0.1},
               {"sweep_param": "kappa"}, {"n_modes": 0}):
        with pytest.raises(ConfigError):
            RunConfig(**kw)


def test_flag_overrides_file(tmp_path):
    cfg_file = tmp_path / "base.cfg"
    cfg_file.write_text("dim = 8\nomega0 = 11.0\n")
    res = run_cli("spectrum", "--config", str(cfg_file), "--dim", "6")
    assert res.returncode == 0
    meta = csv_meta(res.stdout)
    assert meta["dim"] == "6"
    assert meta["omega0"] == "11.0"
    _, rows = csv_body(res.stdout)
    assert len(rows) == 6


def test_missing_config_file_exits_2():
    res = run_cli("spectrum", "--config", "/nonexistent/path.cfg")
    assert res.returncode == 2
    assert "config error" in res.stderr


def test_bad_config_content_exits_2(tmp_path):
    cfg_file = tmp_path / "dup.cfg"
    cfg_file.write_text("dim = 16\ndim = 32\n")
    res = run_cli("spectrum", "--config", str(cfg_file))
    assert res.returncode == 2
    assert "duplicate" in res.stderr


def test_config_error_from_flags_exits_2():
    assert run_cli("spectrum", "--dim", "1").returncode == 2
    assert run_cli("spectrum", "--epsilon", "1.5").returncode == 2


# ---------------------------------------------------------------- spectrum

def test_spectrum_rows_match_closed_form():
    res = run_cli("spectrum", "--dim", "4", *UNBROKEN_FLAGS)
    assert res.returncode == 0
    header, rows = csv_body(res.stdout)
    assert header == ["n", "eps_re", "eps_im", "regime"]
    assert len(rows) == 4
    scale = np.sqrt(1.0 - 4 * 0.25**2)  # Delta = 1, g = 1/4
    for n, row in enumerate(rows):
        assert int(row[0]) == n
        assert float(row[1]) == pytest.approx(scale * (n + 0.5), abs=1e-12)
        assert float(row[2]) == 0.0
        assert row[3] == "unbroken"
    meta = csv_meta(res.stdout)
    assert meta["Delta"] == "1"
    assert meta["g"] == "0.25"


def test_spectrum_at_ep_exits_3():
    res = run_cli("spectrum", "--dim", "4", *EP_FLAGS)
    assert res.returncode == 3
    assert "exceptional point" in res.stderr


def test_spectrum_allow_ep_reports_zeros():
    res = run_cli("spectrum", "--dim", "4", *EP_FLAGS, "--allow-ep")
    assert res.returncode == 0
    _, rows = csv_body(res.stdout)
    assert all(row[3] == "exceptional_point" for row in rows)
    assert all(float(row[1]) == 0.0 and float(row[2]) == 0.0 for row in rows)
    assert "defective" in csv_meta(res.stdout)["note"]


def test_spectrum_json_document():
    res = run_cli("spectrum", "--dim", "4", *UNBROKEN_FLAGS,
                  "--format", "json")
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["columns"] == ["n", "eps_re", "eps_im", "regime"]
    assert doc["rows"][0] == [0, pytest.approx(np.sqrt(0.75) / 2), 0.0, "unbroken"]
    assert doc["metadata"]["command"] == "spectrum"


# ---------------------------------------------------------------- sweep

def test_sweep_g_crosses_regimes():
    res = run_cli("sweep", "--param", "g", "--start", "0", "--stop", "0.6",
                  "--steps", "7", "--modes", "2", "--dim", "32",
                  "--omega0", "1.6", "--alpha", "1", "--beta", "1")
    assert res.returncode == 0
    header, rows = csv_body(res.stdout)
    assert header == ["sweep_value", "eps_0_re", "eps_0_im",
                      "eps_1_re", "eps_1_im", "regime", "N_max"]
    assert len(rows) == 7
    regimes = [row[5] for row in rows]
    assert regimes[0] == regimes[1] == "unbroken"
    assert "broken" in regimes[-1]
    meta = csv_meta(res.stdout)
    # Delta = 1 with alpha = beta = 1: coupling collapse at g = 1/2
    assert float(meta["ep_g"]) == pytest.approx(0.5, abs=1e-6)
    # balanced drive: the truncated sector block is symmetric, so the
    # branch-mode overlap sits at machine zero and is flagged as such
    assert float(meta["ep_coalescence_overlap"]) < 1e-10
    assert "balanced" in meta["ep_overlap_note"]
    assert "kappa_rescaled" in meta


def test_sweep_delta_finds_ep_and_overlap():
    res = run_cli("sweep", "--param", "Delta", "--start", "0", "--stop", "2",
                  "--steps", "5", "--modes", "2", "--dim", "32",
                  "--kappa", "20", "--epsilon", "0.1",
                  "--alpha", "1", "--beta", "4")
    assert res.returncode == 0
    meta = csv_meta(res.stdout)
    # g = 1/4, beta = 4: collapse at Delta = 2 g sqrt(alpha beta) = 1
    assert float(meta["ep_Delta"]) == pytest.approx(1.0, abs=1e-6)
    assert float(meta["ep_coalescence_overlap"]) > 0.9  # measured 0.961
    _, rows = csv_body(res.stdout)
    regimes = [row[5] for row in rows]
    assert regimes[0] == "broken"
    assert regimes[-1] == "unbroken"
    assert "exceptional_point" in regimes


def test_sweep_without_ep_reports_none():
    res = run_cli("sweep", "--param", "g", "--start", "0", "--stop", "0.1",
                  "--steps", "3", "--modes", "1", "--dim", "16",
                  "--omega0", "1.6", "--alpha", "1", "--beta", "1")
    assert res.returncode == 0
    meta = csv_meta(res.stdout)
    assert meta["ep_g"] == "none"
    assert "ep_coalescence_overlap" not in meta


def test_sweep_empty_range_exits_2():
    res = run_cli("sweep", "--param", "g", "--start", "0.5", "--stop", "0.2",
                  "--steps", "5")
    assert res.returncode == 2
    assert "empty sweep range" in res.stderr
    res = run_cli("sweep", "--param", "g", "--start", "0", "--stop", "0.5",
                  "--steps", "1")
    assert res.returncode == 2


def test_sweep_unbroken_n_max_is_closed_form_peak():
    res = run_cli("sweep", "--param", "g", "--start", "0.1", "--stop", "0.1001",
                  "--steps", "2", "--modes", "1", "--dim", "16",
                  "--omega0", "1.6", "--alpha", "1", "--beta", "1")
    assert res.returncode == 0
    _, rows = csv_body(res.stdout)
    g = 0.1
    peak = 16 * g**2 / (4 * (1.0 - 4 * g**2))
    assert float(rows[0][-1]) == pytest.approx(peak, rel=1e-12)


# ---------------------------------------------------------------- evolve

EVOLVE_COLUMNS = ["t", "N_ode", "N_closed", "norm_rho",
                  "var_Y1", "var_Y2", "phase_alpha0_re", "phase_alpha0_im"]


def test_evolve_column_set_and_row_count():
    res = run_cli("evolve", "--dim", "24", *UNBROKEN_FLAGS,
                  "--tmax", "3", "--dt", "0.05")
    assert res.returncode == 0
    header, rows = csv_body(res.stdout)
    assert header == EVOLVE_COLUMNS
    assert len(rows) == 61
    assert float(rows[0][0]) == 0.0
    assert float(rows[-1][0]) == pytest.approx(3.0)
    meta = csv_meta(res.stdout)
    assert float(meta["N_peak_closed_form"]) == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_evolve_ode_tracks_closed_form():
    res = run_cli("evolve", "--dim", "24", *UNBROKEN_FLAGS,
                  "--tmax", "3", "--dt", "0.05")
    _, rows = csv_body(res.stdout)
    for row in rows:
        assert float(row[1]) == pytest.approx(float(row[2]), abs=1e-8)
        assert float(row[3]) == pytest.approx(1.0, abs=1e-6)
        # uncertainty product never dips below the floor
        assert float(row[4]) * float(row[5]) >= 1.0 / 16.0 - 1e-10


def test_evolve_without_drive_is_static():
    res = run_cli("evolve", "--dim", "16", "--omega0", "1.0", "--kappa", "1.2",
                  "--epsilon", "0", "--alpha", "1", "--beta", "1",
                  "--tmax", "2", "--dt", "0.1")
    assert res.returncode == 0
    _, rows = csv_body(res.stdout)
    assert len(rows) == 21
    for row in rows:
        assert float(row[1]) == 0.0
        assert float(row[2]) == 0.0
        assert float(row[4]) == pytest.approx(0.25, abs=1e-12)
        assert float(row[5]) == pytest.approx(0.25, abs=1e-12)
    # ground-mode phase accumulates at Delta / 2 = 0.2 per unit time
    t = np.array([float(r[0]) for r in rows])
    ph = np.array([float(r[6]) for r in rows])
    assert np.max(np.abs(ph - 0.2 * t)) < 1e-3  # grid-gradient O(dt^2)


def test_evolve_at_ep_exits_3():
    res = run_cli("evolve", "--dim", "16", *EP_FLAGS, "--tmax", "1", "--dt", "0.1")
    assert res.returncode == 3
    assert "exceptional point" in res.stderr


# ---------------------------------------------------------------- verify

def test_verify_passes_on_defaults(tmp_path):
    out = tmp_path / "verify.json"
    res = run_cli("verify", "--dim", "48", "--out", str(out))
    assert res.returncode == 0
    doc = json.loads(out.read_text())
    assert doc["all_pass"] is True
    by_status = doc["summary"]
    assert by_status.get("fail", 0) == 0
    assert by_status["pass"] >= 20
    names = {c["name"] for c in doc["checks"]}
    assert "hamiltonian_pseudo_hermitian" in names
    assert "cpt_eigenvector_identity" in names
    assert "uncertainty_floor" in names


def test_verify_corrupt_metric_fails_metric_checks(tmp_path):
    out = tmp_path / "verify.json"
    res = run_cli("verify", "--dim", "48", "--corrupt-metric", "--out", str(out))
    assert res.returncode == 1
    doc = json.loads(out.read_text())
    assert doc["all_pass"] is False
    fails = {c["name"] for c in doc["checks"] if c["status"] == "fail"}
    assert fails == {
        "hamiltonian_pseudo_hermitian",
        "rwa_pseudo_hermitian",
        "effective_pseudo_hermitian",
        "hermitian_counterpart_hermitian",
        "propagator_pseudo_unitary",
        "squeeze_pseudo_unitary",
        "phase_time_reversal",
        "phase_reality",
    }


def test_verify_corrupt_c_sign_fails_only_pairing(tmp_path):
    out = tmp_path / "verify.json"
    res = run_cli("verify", "--dim", "48", "--corrupt-c-sign", "--out", str(out))
    assert res.returncode == 1
    doc = json.loads(out.read_text())
    fails = [c for c in doc["checks"] if c["status"] == "fail"]
    assert [c["name"] for c in fails] == ["cpt_eigenvector_identity"]
    # flipped sign sends the pairing phase to -i, distance 2 from the pin
    assert fails[0]["value"] == pytest.approx(2.0, abs=1e-6)
    # the trajectory-level residual is linear in the symmetry and stays blind
    by_name = {c["name"]: c for c in doc["checks"]}
    assert by_name["cpt_trajectory_symmetry"]["status"] == "pass"


# ---------------------------------------------------------------- output

def test_repeated_runs_are_byte_identical():
    args = ["sweep", "--param", "Delta", "--start", "0", "--stop", "2",
            "--steps", "5", "--modes", "2", "--dim", "32",
            "--kappa", "20", "--epsilon", "0.1", "--alpha", "1", "--beta", "4"]
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.stdout == second.stdout
    assert first.stdout  # not trivially empty


def test_threads_do_not_change_rows():
    args = ["sweep", "--param", "Delta", "--start", "0", "--stop", "2",
            "--steps", "5", "--modes", "2", "--dim", "32",
            "--kappa", "20", "--epsilon", "0.1", "--alpha", "1", "--beta", "4"]
    serial = run_cli(*args)
    threaded = run_cli(*args, "--threads", "4")
    assert csv_body(serial.stdout) == csv_body(threaded.stdout)


def test_float_cells_carry_17_digits():
    res = run_cli("spectrum", "--dim", "2", *UNBROKEN_FLAGS)
    _, rows = csv_body(res.stdout)
    assert rows[0][1] == "0.4330127018922193"
    assert rows[1][1] == "1.299038105676658"


def test_output_file_matches_stdout(tmp_path):
    out = tmp_path / "spec.csv"
    res_file = run_cli("spectrum", "--dim", "4", *UNBROKEN_FLAGS,
                       "--out", str(out))
    res_stdout = run_cli("spectrum", "--dim", "4", *UNBROKEN_FLAGS)
    assert res_file.returncode == 0
    written = out.read_text()
    # identical apart from the echoed destination
    strip = lambda s: [ln for ln in s.splitlines() if not ln.startswith("# out")]
    assert strip(written) == strip(res_stdout.stdout)


def test_main_returns_exit_codes_in_process(capsys):
    assert main(["spectrum", "--dim", "4", *UNBROKEN_FLAGS]) == 0
    capsys.readouterr()
    assert main(["spectrum", "--dim", "4", *EP_FLAGS]) == 3
    capsys.readouterr()
    assert main(["spectrum", "--dim", "1"]) == 2
    capsys.readouterr()
