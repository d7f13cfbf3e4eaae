import dataclasses
import json
import math

import pytest

from hamlab import (
    CapacityError,
    ExperimentConfig,
    FormatError,
    PreconditionError,
    TrialFailure,
    TrialRow,
    parse_experiment_config,
    read_results,
    run_experiment,
    summarize_rows,
    write_results,
)


def test_parse_experiment_config():
    cfg = parse_experiment_config(
        "# nightly sweep\n"
        "name=expected\n"
        "n_values=6, 8\n"
        "p_values=0.3,0.5\n"
        "trials=7\n"
        "seed=11\n"
        "workers=2\n"
        "cap_hamilton=18\n"
    )
    assert cfg.name == "expected"
    assert cfg.n_values == (6, 8)
    assert cfg.p_values == (0.3, 0.5)
    assert cfg.trials == 7
    assert cfg.seed == 11
    assert cfg.workers == 2
    assert cfg.cap("hamilton", 99) == 18
    assert cfg.cap("enumeration", 99) == 99


def test_parse_experiment_config_errors():
    with pytest.raises(FormatError):
        parse_experiment_config("name=expected\ntrials=5\n")  # no n_values
    with pytest.raises(FormatError):
        parse_experiment_config("n_values=6\ntrials=5\ngirth=3\n")
    with pytest.raises(FormatError):
        parse_experiment_config("n_values=6\ntrials=5\ntrials=6\n")
    with pytest.raises(FormatError):
        parse_experiment_config("n_values=six\ntrials=5\n")
    with pytest.raises(FormatError):
        parse_experiment_config("n_values=6 trials=5\n")
    with pytest.raises(FormatError):
        parse_experiment_config("name=guessed\nn_values=6\ntrials=1\n")
    with pytest.raises(PreconditionError):
        ExperimentConfig(name="expected", n_values=(6,), trials=0)
    with pytest.raises(PreconditionError):
        ExperimentConfig(name="expected", n_values=(6,), trials=1, p_values=(1.5,))


def test_expected_experiment_degenerate_p():
    cfg = ExperimentConfig(
        name="expected", n_values=(5,), p_values=(0.0, 1.0), trials=3, seed=1
    )
    result = run_experiment(cfg)
    assert len(result.rows) == 6
    for row in result.rows:
        if row.p == 0.0:
            assert row.h == 0 and row.normalized is None
        else:
            assert row.h == 12
    empty, full = result.summary["groups"]
    assert empty["mean"] == 0.0 and empty["expected"] == 0.0
    assert full["mean"] == 12.0 and full["se"] == 0.0 and full["z"] == 0.0
    assert full["expected"] == 12.0


def test_expected_experiment_tracks_mean():
    cfg = ExperimentConfig(
        name="expected", n_values=(6,), p_values=(0.5,), trials=60, seed=5
    )
    result = run_experiment(cfg)
    (group,) = result.summary["groups"]
    assert group["expected"] == pytest.approx(60 * 0.5**6)
    assert group["trials"] == 60
    mean = sum(r.h for r in result.rows) / 60
    assert group["mean"] == pytest.approx(mean)
    assert abs(group["z"]) < 6


def test_concentration_experiment():
    cfg = ExperimentConfig(
        name="concentration", n_values=(8,), p_values=(0.7,), trials=25, seed=2
    )
    result = run_experiment(cfg)
    (group,) = result.summary["groups"]
    assert 0.0 <= group["frac_le_1"] <= 1.0
    assert group["frac_le_1_05"] >= group["frac_le_1"]
    for row in result.rows:
        assert row.aux["h_positive"] == (row.h > 0)
        if row.h > 0:
            expect = math.exp(math.log(row.h) / 8) * math.e / (8 * 0.7)
            assert row.normalized == pytest.approx(expect)
        else:
            assert row.normalized is None


def test_hitting_time_experiment():
    cfg = ExperimentConfig(name="hitting", n_values=(8,), trials=12, seed=3)
    result = run_experiment(cfg)
    (group,) = result.summary["groups"]
    assert group["prober_agreement"] == 1.0
    assert 0.0 <= group["ci_low"] <= group["frac_positive"] <= group["ci_high"] <= 1.0
    for row in result.rows:
        tau = row.aux["tau"]
        assert 8 <= tau <= 28
        assert row.p == pytest.approx(2 * tau / (8 * 7))
        assert row.aux["prober_found"] == (row.h > 0)


def test_factor_pipeline_experiment():
    cfg = ExperimentConfig(
        name="factor-pipeline",
        n_values=(8,),
        p_values=(0.5,),
        trials=5,
        seed=4,
        booster_count=6,
    )
    result = run_experiment(cfg)
    (group,) = result.summary["groups"]
    assert group["bound_ok_fraction"] == 1.0
    assert 0.0 <= group["mean_success_rate"] <= 1.0
    for row in result.rows:
        aux = row.aux
        assert aux["sampled"] <= 50
        assert aux["converted"] <= aux["sampled"] <= aux["census_total"]
        assert aux["bound_asserted"] <= float(row.h)
        assert aux["boosters_available"] <= 6
        if aux["sampled"]:
            assert aux["success_rate"] == aux["converted"] / aux["sampled"]


def test_matchings_experiment():
    cfg = ExperimentConfig(
        name="matchings", n_values=(6, 7), p_values=(0.6,), trials=8, seed=6
    )
    result = run_experiment(cfg)
    even, odd = result.summary["groups"]
    assert even["applicable"] == 8 and even["holds_fraction"] == 1.0
    assert odd["applicable"] == 0 and odd["holds_fraction"] is None
    for row in result.rows:
        assert row.aux["applicable"] == (row.n % 2 == 0)
        if row.aux["applicable"]:
            m = row.aux["m"]
            assert row.h <= m * (m - 1) // 2


def test_unknown_experiment_and_caps():
    cfg = ExperimentConfig(name="expected", n_values=(25,), trials=1)
    with pytest.raises(CapacityError):
        run_experiment(cfg)
    nameless = ExperimentConfig(name="", n_values=(6,), trials=1)
    with pytest.raises(PreconditionError):
        run_experiment(nameless)


def test_trial_failure_carries_state():
    state = {"n": 9, "seed": 123, "h": str(10**20)}
    err = TrialFailure("bound violated", state)
    assert err.state == state
    assert str(err).startswith("bound violated; replay state: ")
    assert json.loads(str(err).split("; replay state: ", 1)[1]) == state


def test_summary_recomputable_from_files(tmp_path):
    cfg = ExperimentConfig(
        name="concentration", n_values=(7,), p_values=(0.6,), trials=10, seed=9
    )
    result = run_experiment(cfg)
    csv_path = tmp_path / "rows.csv"
    json_path = tmp_path / "rows.json"
    write_results(result.rows, result.summary, str(csv_path), "csv", cfg)
    write_results(result.rows, result.summary, str(json_path), "json", cfg)

    from_csv = read_results(str(csv_path))
    assert from_csv.config is None and from_csv.summary is None
    assert from_csv.rows == result.rows
    assert summarize_rows("concentration", from_csv.rows) == result.summary

    from_json = read_results(str(json_path))
    assert from_json.rows == result.rows
    assert from_json.summary == result.summary
    assert from_json.config is not None
    assert from_json.config["name"] == "concentration"
    assert "workers" not in from_json.config
    assert "output_path" not in from_json.config


def test_results_identical_across_worker_counts(tmp_path):
    base = ExperimentConfig(
        name="expected", n_values=(6,), p_values=(0.4,), trials=12, seed=7
    )
    wide = dataclasses.replace(base, workers=3)
    blobs = {}
    for tag, cfg in (("serial", base), ("wide", wide)):
        result = run_experiment(cfg)
        for fmt in ("csv", "json"):
            path = tmp_path / f"{tag}.{fmt}"
            write_results(result.rows, result.summary, str(path), fmt, cfg)
            blobs[(tag, fmt)] = path.read_bytes()
    assert blobs[("serial", "csv")] == blobs[("wide", "csv")]
    assert blobs[("serial", "json")] == blobs[("wide", "json")]


def test_round_trip_preserves_scalar_types(tmp_path):
    rows = [
        TrialRow(
            experiment="matchings",
            n=19,
            p=0.25,
            trial_index=0,
            seed=42,
            h=math.factorial(18) // 2,
            normalized=1.0625,
            aux={"m": 2**60 + 1, "applicable": True, "note": None},
        )
    ]
    summary = summarize_rows("matchings", rows)
    for fmt in ("csv", "json"):
        path = tmp_path / f"big.{fmt}"
        write_results(rows, summary, str(path), fmt)
        back = read_results(str(path))
        got = back.rows[0]
        assert got.h == rows[0].h and isinstance(got.h, int)
        assert got.normalized == 1.0625
        assert got.aux["m"] == 2**60 + 1 and isinstance(got.aux["m"], int)
        assert got.aux["applicable"] is True
        if fmt == "csv":
            assert "note" not in got.aux  # blank cells drop the key
        else:
            assert got.aux["note"] is None


def test_write_rejects_unsafe_text(tmp_path):
    row = TrialRow(
        experiment="expected",
        n=5,
        p=0.5,
        trial_index=0,
        seed=0,
        h=1,
        normalized=None,
        aux={"label": "a,b"},
    )
    with pytest.raises(FormatError):
        write_results([row], {}, str(tmp_path / "bad.csv"), "csv")
    with pytest.raises(PreconditionError):
        write_results([], {}, str(tmp_path / "bad.xml"), "xml")


def test_empty_rows_round_trip(tmp_path):
    path = tmp_path / "empty.csv"
    write_results([], {}, str(path), "csv")
    back = read_results(str(path))
    assert back.rows == []
