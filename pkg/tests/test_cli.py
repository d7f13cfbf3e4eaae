import json

import pytest

from hamlab import (
    Graph,
    TrialFailure,
    count_two_factors,
    degrees,
    format_edge_list,
    parse_edge_list,
    read_results,
    sample_gnp,
)
from hamlab.cli import main


def write(path, text):
    path.write_text(text, encoding="ascii")
    return str(path)


def graph_file(tmp_path, g, name="g.edges"):
    return write(tmp_path / name, format_edge_list(g))


def test_sample_gnp_round_trip(tmp_path, capsys):
    out = tmp_path / "g.edges"
    code = main([
        "sample", "--model", "gnp", "--n", "8", "--p", "0.6",
        "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    assert parse_edge_list(out.read_text()) == sample_gnp(8, 0.6, seed=3)


def test_sample_gnm_edge_count(tmp_path):
    out = tmp_path / "g.edges"
    assert main([
        "sample", "--model", "gnm", "--n", "7", "--m", "9", "--out", str(out),
    ]) == 0
    assert parse_edge_list(out.read_text()).edge_count == 9


def test_sample_model_argument_checks(tmp_path):
    out = str(tmp_path / "g.edges")
    assert main(["sample", "--model", "gnp", "--n", "5", "--out", out]) == 3
    assert main(["sample", "--model", "gnm", "--n", "5", "--out", out]) == 3
    assert main([
        "sample", "--model", "gnp", "--n", "5", "--p", "0.5", "--out", out,
        "--emit-trace", str(tmp_path / "t.json"),
    ]) == 3


def test_sample_process_with_trace(tmp_path):
    out = tmp_path / "g.edges"
    trace = tmp_path / "trace.json"
    assert main([
        "sample", "--model", "process", "--n", "9", "--seed", "11",
        "--out", str(out), "--emit-trace", str(trace),
    ]) == 0
    g = parse_edge_list(out.read_text())
    assert degrees(g).minimum == 2

    doc = json.loads(trace.read_text())
    assert doc["n"] == 9
    assert len(doc["order"]) == 9 * 8 // 2
    assert 1 <= doc["tau1"] <= doc["tau2"] == g.edge_count
    order = [tuple(e) for e in doc["order"]]
    prior = Graph.from_edges(9, order[: doc["tau2"] - 1])
    assert degrees(prior).minimum < 2
    assert Graph.from_edges(9, order[: doc["tau2"]]) == g


def test_count_hamilton(tmp_path, capsys):
    path = graph_file(tmp_path, Graph.complete(5))
    assert main(["count", "--what", "hamilton", "--in", path]) == 0
    assert capsys.readouterr().out.strip() == "12"
    assert main(["count", "--what", "hamilton", "--in", path, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"what": "hamilton", "n": 5, "count": "12"}


def test_count_two_factors_census(tmp_path, capsys):
    g = Graph.complete(5)
    path = graph_file(tmp_path, g)
    assert main([
        "count", "--what", "two-factors", "--in", path,
        "--allow-isolated", "1", "--json",
    ]) == 0
    doc = json.loads(capsys.readouterr().out)
    census = count_two_factors(g, allow_isolated=1)
    assert doc["count"] == str(census.total())
    assert doc["census"] == {
        str(s): str(c) for s, c in sorted(census.by_cycles.items())
    }


def test_count_flag_misuse_and_permanent(tmp_path, capsys):
    path = graph_file(tmp_path, Graph.complete(3))
    assert main([
        "count", "--what", "hamilton", "--in", path, "--allow-isolated", "1",
    ]) == 3
    assert main(["count", "--what", "permanent", "--in", path]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_certify_expander_json(tmp_path, capsys):
    path = graph_file(tmp_path, Graph.complete(12))
    assert main(["certify", "--in", path, "--p", "0.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {
        "is_expander": True, "d_set": [], "violations": [], "mode": "exact",
    }


def test_certify_reports_violations(tmp_path, capsys):
    edges = [(u, v) for u in range(8) for v in range(u + 1, 8)]
    g = Graph.from_edges(10, edges + [(8, 9)])
    path = graph_file(tmp_path, g)
    assert main(["certify", "--in", path, "--p", "0.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert not doc["is_expander"]
    assert doc["violations"] == [{"property": "expansion", "witness": [8, 9]}]


def test_certify_custom_constants(tmp_path, capsys):
    g = Graph.from_edges(5, [(0, v) for v in range(1, 5)])
    path = graph_file(tmp_path, g)
    consts = write(
        tmp_path / "consts.txt", "low_degree_divisor=1.0\nshort_path_factor=1.2\n"
    )
    assert main(["certify", "--in", path, "--p", "0.5", "--consts", consts]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["d_set"] == [1, 2, 3, 4]
    assert not doc["is_expander"]
    bad = write(tmp_path / "bad.txt", "girth=3\n")
    assert main(["certify", "--in", path, "--p", "0.5", "--consts", bad]) == 3


def test_convert_success(tmp_path, capsys):
    path = graph_file(tmp_path, Graph.complete(5))
    factor = write(tmp_path / "f.factor", "0 1 2\ni 3 4\n")
    assert main([
        "convert", "--graph", path, "--factor", factor,
        "--budget", "5", "--target", "5",
    ]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["hamilton"] is not None and len(doc["hamilton"]) == 5
    assert doc["hamming"] == 4
    assert doc["boosters_used"] == 0
    assert [r["components_before"] for r in doc["rounds"]] == [3, 2, 1]


def test_convert_with_boosters(tmp_path, capsys):
    g = Graph.from_edges(
        9, [(v, (v + 1) % 6) for v in range(6)] + [(6, 7), (7, 8), (6, 8)]
    )
    path = graph_file(tmp_path, g)
    factor = write(tmp_path / "f.factor", "0 1 2 3 4 5\n6 7 8\n")
    boosters = write(tmp_path / "b.txt", "# splice edges\n5 6\n0 8\n")
    assert main([
        "convert", "--graph", path, "--factor", factor,
        "--boosters", boosters, "--budget", "9", "--target", "9",
    ]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["hamilton"] is not None
    assert doc["boosters_used"] == 2
    assert doc["hamming"] == 4

    assert main([
        "convert", "--graph", path, "--factor", factor,
        "--budget", "9", "--target", "9",
    ]) == 0
    stuck = json.loads(capsys.readouterr().out)
    assert stuck["hamilton"] is None
    assert stuck["hamming"] == -1
    assert "unreached" in stuck["diagnostics"]


def test_convert_bad_factor_file(tmp_path):
    path = graph_file(tmp_path, Graph.complete(5))
    factor = write(tmp_path / "f.factor", "0 1 zebra\n")
    assert main([
        "convert", "--graph", path, "--factor", factor,
        "--budget", "5", "--target", "5",
    ]) == 3


def test_experiment_stdout_summary(tmp_path, capsys):
    config = write(
        tmp_path / "exp.cfg", "n_values=6\np_values=0.5\ntrials=4\nseed=2\n"
    )
    assert main(["experiment", "--config", config, "--name", "expected"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["experiment"] == "expected"
    assert doc["groups"][0]["trials"] == 4


def test_experiment_writes_output_file(tmp_path, capsys):
    config = write(
        tmp_path / "exp.cfg",
        "name=concentration\nn_values=6\np_values=0.7\ntrials=5\nseed=8\n",
    )
    out = tmp_path / "rows.csv"
    assert main(["experiment", "--config", config, "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == f"5 rows -> {out}"
    assert len(read_results(str(out)).rows) == 5


def test_experiment_requires_name(tmp_path):
    config = write(tmp_path / "exp.cfg", "n_values=6\ntrials=2\n")
    assert main(["experiment", "--config", config]) == 3


def test_missing_files_exit_3(tmp_path):
    assert main(["count", "--what", "hamilton", "--in", "/nope/missing"]) == 3
    assert main(["certify", "--in", "/nope/missing", "--p", "0.5"]) == 3
    assert main(["experiment", "--config", "/nope/missing"]) == 3


def test_usage_errors_exit_3(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--what", "girth", "--in", "whatever"])
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--model", "gnp", "--n", "5"])
    assert exc.value.code == 3
    capsys.readouterr()


def test_trial_failures_exit_2(tmp_path, monkeypatch, capsys):
    import hamlab.cli as cli_mod

    def boom(cfg):
        raise TrialFailure("bound violated", {"n": 6, "seed": 1})

    monkeypatch.setattr(cli_mod, "run_experiment", boom)
    config = write(tmp_path / "exp.cfg", "name=expected\nn_values=6\ntrials=1\n")
    assert main(["experiment", "--config", config]) == 2
    assert "assertion failure" in capsys.readouterr().err
