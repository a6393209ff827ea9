import json
import subprocess
import sys

import numpy as np
import pytest

from intertrade.cli import main
from intertrade.ingest import durations_to_csv, read_durations
from intertrade.pipeline import AnalysisConfig, SUMMARY_HEADER, analyze_instrument, run_analysis
from intertrade.synth import as_duration_series, gen_fgn_durations, inverse_u_pattern


@pytest.fixture(scope="module")
def fgn_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    assert main(["synth", "fgn", "--n", "16384", "--seed", "3", "--out", str(d / "FGN.csv")]) == 0
    return d / "FGN.csv"


def test_synth_is_deterministic(tmp_path, capsys):
    main(["synth", "cascade", "--levels", "8", "--seed", "1"])
    a = capsys.readouterr().out
    main(["synth", "cascade", "--levels", "8", "--seed", "1"])
    assert capsys.readouterr().out == a
    assert a.startswith("day,bin,tau\n") and a.count("\n") == 257


def test_synth_ticks_and_pattern(tmp_path, capsys):
    f = tmp_path / "TCK.csv"
    assert main(["synth", "ticks", "--days", "3", "--out", str(f)]) == 0
    assert f.read_text().startswith("date,time\n")
    assert main(["pattern", "--ticks", str(f), "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "TCK_pattern.csv").read_text().splitlines()
    assert rows[0] == "bin,mean_tau,contributing_days" and len(rows) == 241
    assert (tmp_path / "TCK_pattern_polyfit.csv").exists()


def test_analyze_fgn(fgn_file, tmp_path):
    out = tmp_path / "res"
    assert main(["analyze", "--durations", str(fgn_file), "--adjust", "off", "--out", str(out)]) == 0
    doc = json.loads((out / "result.json").read_text())
    ds = doc["instruments"][0]["datasets"]["original"]
    assert ds["crossover"]["no_crossover"]
    assert abs(ds["full_fit"]["H"] - 0.7) < 0.05
    assert doc["config"]["adjust"] == "off" and doc["schema_version"] == "1.0"
    names = {p.name for p in out.iterdir()}
    assert {"FGN_original_curve.csv", "FGN_original_small_spectrum.csv", "FGN_pattern.csv"} <= names
    assert not any(n.endswith(".tmp") for n in names)


def test_two_regime_pipeline(tmp_path):
    f = tmp_path / "TWO.csv"
    main(["synth", "two-regime", "--n", "262144", "--seed", "2", "--out", str(f)])
    doc, _ = run_analysis(AnalysisConfig(input=str(f), adjust="off"), timestamp=False)
    ds = doc["instruments"][0]["datasets"]["original"]
    assert not ds["crossover"]["no_crossover"]
    assert ds["H2"] - ds["H1"] > 0.1
    assert ds["regimes"]["small"]["s_range"][1] <= ds["crossover"]["s_cross"]


def test_document_is_reproducible_and_config_sufficient(fgn_file):
    cfg = AnalysisConfig(input=str(fgn_file), adjust="both")
    a, _ = run_analysis(cfg, timestamp=False)
    b, _ = run_analysis(AnalysisConfig.from_dict(a["config"]), timestamp=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_adjustment_recovers_h_under_strong_pattern():
    base = as_duration_series(gen_fgn_durations(0.7, 2 ** 16, 0.25, 4), trades_per_day=2000)
    s = base.with_tau(base.tau * inverse_u_pattern(5, 8)[base.bin])
    doc, _, _ = analyze_instrument(s, AnalysisConfig(adjust="both"))
    h = {k: v["full_fit"]["H"] for k, v in doc["datasets"].items()}
    # a hump much larger than the noise inflates the raw exponent; dividing it out restores H
    assert abs(h["adjusted"] - 0.7) <= 0.03
    assert h["original"] > h["adjusted"]
    assert doc["datasets"]["adjusted"]["units"] == "dimensionless"


def test_summary(fgn_file, capsys):
    assert main(["summary", "--input", str(fgn_file.parent)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == SUMMARY_HEADER
    assert lines[1].startswith("FGN,") and len(lines[1].split(",")) == 8


def test_short_series_is_config_error(tmp_path, capsys):
    s = as_duration_series(np.ones(60), trades_per_day=60)
    f = tmp_path / "S.csv"
    f.write_text(durations_to_csv(s))
    assert main(["analyze", "--durations", str(f)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config" and "series too short" in err["message"]


def test_malformed_input_is_data_error(tmp_path, capsys):
    f = tmp_path / "B.csv"
    f.write_text("date,time\n2003-01-02,9:30\n")
    assert main(["analyze", "--ticks", str(f)]) == 3
    assert "line 2" in json.loads(capsys.readouterr().err)["message"]


def test_bad_flags_are_config_errors(fgn_file, capsys):
    assert main(["analyze", "--durations", str(fgn_file), "--smin", "3"]) == 2
    assert main(["analyze", "--durations", str(fgn_file), "--q-step", "0.3"]) == 2
    assert main(["analyze", "--durations", str(fgn_file.parent / "missing.csv")]) == 2
    capsys.readouterr()


def test_environment_override(fgn_file, monkeypatch, capsys):
    monkeypatch.setenv("INTERTRADE_SMIN", "40")
    assert main(["analyze", "--durations", str(fgn_file), "--adjust", "off"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["s_min"] == 40
    assert main(["analyze", "--durations", str(fgn_file), "--adjust", "off", "--smin", "30"]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["s_min"] == 30


def test_help_shows_defaults():
    out = subprocess.run([sys.executable, "-m", "intertrade", "analyze", "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "default: 20" in out and "default: 0.01" in out


def test_durations_file_round_trips(fgn_file):
    s = read_durations(fgn_file)
    assert durations_to_csv(s) == fgn_file.read_text()
