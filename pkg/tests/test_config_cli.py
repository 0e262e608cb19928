import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermal_oqw.cli import main
from thermal_oqw.config import ConfigParseError, ConfigValidationError, RunConfig, parse_config, serialize_config
from thermal_oqw.observables import first_moment
from thermal_oqw.runner import (
    DISTRIBUTION_HEADER,
    SUMMARY_HEADER,
    SWEEP_HEADER,
    read_csv,
    run_ode,
    run_reference,
    run_sweep,
    run_validate,
    run_walk,
)

PAPER_TEXT = """\
# benchmark parameters
g = 0.02
delta = 1
gamma = 0.2
n_th = 5
dt = 0.02
n_steps = 100
initial_site = 20
"""


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_paper_config_defaults():
    cfg = parse_config(PAPER_TEXT)
    assert cfg.k_max == 200
    assert cfg.effective_record_every == 10
    assert cfg.initial_qubit == "ground"
    assert cfg.mode == "paper"
    assert cfg.effective_renormalize is True
    assert cfg.with_changes(mode="completed").effective_renormalize is False
    assert cfg.params.epsilon == pytest.approx(0.02)


@pytest.mark.parametrize(
    "extra, error",
    [
        ("g = 0.5\n", ConfigParseError),  # duplicate key
        ("gamm = 0.2\n", ConfigParseError),
        ("k_max = twenty\n", ConfigParseError),
        ("just some words\n", ConfigParseError),
        ("renormalize = maybe\n", ConfigParseError),
        ("initial_qubit = 1, 0\n", ConfigParseError),
    ],
)
def test_parse_errors_report_line(extra, error):
    with pytest.raises(error) as info:
        parse_config(PAPER_TEXT + extra)
    assert info.value.line == PAPER_TEXT.count("\n") + 1


def test_missing_keys():
    with pytest.raises(ConfigParseError, match="initial_site"):
        parse_config(PAPER_TEXT.replace("initial_site = 20\n", ""))


def test_validation_errors():
    with pytest.raises(ConfigValidationError):
        parse_config(PAPER_TEXT.replace("g = 0.02", "g = 0.5"))
    with pytest.raises(ConfigValidationError):
        parse_config(PAPER_TEXT.replace("initial_site = 20", "initial_site = 300"))
    with pytest.raises(ConfigValidationError):
        parse_config(PAPER_TEXT + "mode = fancy\n")
    with pytest.raises(ConfigValidationError):
        parse_config(PAPER_TEXT + "initial_qubit = 0.5, 0.6, 0, 0\n")
    with pytest.raises(ConfigValidationError):
        parse_config(PAPER_TEXT + "initial_qubit = 0.5, 0.5, 0.6, 0\n")


def test_explicit_qubit_matrix():
    cfg = parse_config(PAPER_TEXT + "initial_qubit = 0.5, 0.5, 0.25, -0.25\n")
    np.testing.assert_allclose(cfg.qubit_matrix, [[0.5, 0.25 - 0.25j], [0.25 + 0.25j, 0.5]])


configs = st.builds(
    RunConfig,
    g=st.floats(0.001, 0.02),  # eps <= 0.04 keeps k_max below the ceiling
    delta=st.floats(0.5, 2.0),
    gamma=st.floats(0.0, 1.0),
    n_th=st.floats(0.0, 10.0),
    dt=st.floats(1e-4, 0.05),
    n_steps=st.integers(0, 10**6),
    initial_site=st.integers(0, 50),
    k_max=st.integers(50, 300),
    record_every=st.one_of(st.none(), st.integers(1, 1000)),
    initial_qubit=st.sampled_from(["ground", "excited", (0.25, 0.75, 0.1, -0.2)]),
    mode=st.sampled_from(["paper", "completed"]),
    renormalize=st.one_of(st.none(), st.booleans()),
    out_dir=st.sampled_from(["results", "out/run_1"]),
)


@given(configs)
@settings(max_examples=60, deadline=None)
def test_config_round_trip(cfg):
    assert parse_config(serialize_config(cfg)) == cfg


def test_walk_outputs_and_schema(tmp_path):
    cfg = parse_config(PAPER_TEXT + "k_max = 40\n")
    result = run_walk(cfg, tmp_path / "walk")
    summary = (tmp_path / "walk" / "summary.csv").read_text().splitlines()
    assert summary[0] == ",".join(SUMMARY_HEADER)
    assert len(summary) == 1 + 11
    dist = (tmp_path / "walk" / "distribution.csv").read_text().splitlines()
    assert dist[0] == ",".join(DISTRIBUTION_HEADER)
    assert len(dist) == 1 + 11 * 41
    assert (tmp_path / "walk" / "manifest.json").exists()
    # CSV values parse back bit-exactly
    rows = read_csv(tmp_path / "walk" / "summary.csv")
    for row, rec in zip(rows, result.records):
        assert row["mu"] == rec.mu and row["sigma2"] == rec.sigma2
        assert row["trace_pre_renorm"] == rec.trace_pre_renorm
    drows = [r for r in read_csv(tmp_path / "walk" / "distribution.csv") if r["step"] == 100]
    np.testing.assert_array_equal([r["p"] for r in drows], result.records[-1].p)


def test_zero_steps_single_row(tmp_path):
    cfg = parse_config(PAPER_TEXT.replace("n_steps = 100", "n_steps = 0") + "k_max = 40\n")
    run_walk(cfg, tmp_path)
    rows = read_csv(tmp_path / "summary.csv")
    assert len(rows) == 1
    assert rows[0]["mu"] == 20 and rows[0]["step"] == 0


def test_ode_and_reference_runs(tmp_path):
    cfg = parse_config(PAPER_TEXT.replace("initial_site = 20", "initial_site = 5") + "k_max = 40\nn_th = 1\n".replace("n_th = 1\n", ""))
    ode = run_ode(cfg, tmp_path / "ode", dt_ode=0.02)
    ref = run_reference(cfg, 20, tmp_path / "ref")
    assert [r.step for r in ode.records] == [r.step for r in ref.records] == list(range(0, 101, 10))
    assert abs(ode.records[-1].mu - ref.records[-1].mu) < 1e-2
    assert ode.records[-1].mu == pytest.approx(first_moment(5, cfg.params, 2.0), rel=1e-9)
    with pytest.raises(ConfigValidationError):
        run_reference(cfg.with_changes(initial_site=15), 20, tmp_path / "bad")


def test_sweep_writes_rows(tmp_path):
    cfg = parse_config(PAPER_TEXT + "k_max = 60\n")
    finals = run_sweep(cfg, [0.5, 5.0], tmp_path)
    rows = read_csv(tmp_path / "sweep.csv")
    assert (tmp_path / "sweep.csv").read_text().splitlines()[0] == ",".join(SWEEP_HEADER)
    assert [r["n_th"] for r in rows] == [0.5, 5.0]
    assert (tmp_path / "n_th_0.5" / "summary.csv").exists()
    for row, rec in zip(rows, finals):
        assert row["v_mu_step"] * row["steps"] == pytest.approx(row["mu"], rel=1e-15)
        assert row["mu"] == rec.mu


def test_validate_passes_on_paper_config():
    lines = []
    assert run_validate(parse_config(PAPER_TEXT), out=lines.append)
    assert any("ratio 0.25" in line for line in lines)


def test_cli_exit_codes(tmp_path, capsys):
    good = write(tmp_path, PAPER_TEXT + "k_max = 40\n")
    assert main(["walk", "--config", str(good), "--out", str(tmp_path / "o")]) == 0
    assert main(["walk", "--config", str(good), "--out", str(tmp_path / "c"), "--mode", "completed"]) == 0
    assert main(["validate", "--config", str(good)]) == 0
    assert main(["walk", "--config", str(write(tmp_path, PAPER_TEXT + "bogus = 1\n", "p.cfg"))]) == 2
    assert main(["walk", "--config", str(tmp_path / "missing.cfg")]) == 2
    bad = write(tmp_path, PAPER_TEXT.replace("g = 0.02", "g = 0.5"), "v.cfg")
    assert main(["walk", "--config", str(bad)]) == 3
    # a tiny lattice leaks beyond the default tolerance
    leaky = write(tmp_path, PAPER_TEXT.replace("initial_site = 20", "initial_site = 2") + "k_max = 2\n", "l.cfg")
    assert main(["walk", "--config", str(leaky), "--out", str(tmp_path / "l")]) == 4
    assert main(["sweep", "--config", str(good), "--nth", "1,2", "--out", str(tmp_path / "s")]) == 0


def test_cli_validate_failure_exit_code(tmp_path, monkeypatch):
    import thermal_oqw.cli as cli

    monkeypatch.setattr(cli, "run_validate", lambda cfg: False)
    good = write(tmp_path, PAPER_TEXT)
    assert cli.main(["validate", "--config", str(good)]) == 5


def test_centered_speeds(tmp_path):
    cfg = parse_config(PAPER_TEXT + "k_max = 40\n")
    plain = run_walk(cfg, tmp_path / "a").records[-1]
    centred = run_walk(cfg, tmp_path / "b", centered=True).records[-1]
    assert centred.v_mu_step == pytest.approx((plain.mu - 20) / 100, rel=1e-12)
    assert not math.isclose(plain.v_mu_step, centred.v_mu_step)


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, PAPER_TEXT + "k_max = 40\n")
    proc = subprocess.run(
        [sys.executable, "-m", "thermal_oqw", "walk", "--config", str(cfg), "--out", str(tmp_path / "m")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "walk: step 100" in proc.stdout
