"""CLI behavior: formats, determinism, exit codes, error lines."""

import json

import pytest
from click.testing import CliRunner

from llmecon.cli import main
from llmecon.scenario import bundled_scenario_path

SCENARIO = str(bundled_scenario_path("manuals-gpt-4o"))


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args, **kwargs):
    return runner.invoke(main, args, catch_exceptions=False, **kwargs)


def write_scenario(tmp_path, overrides=None):
    document = {
        "name": "cli-test",
        "catalog": {"pit": 2.75e-6, "pot": 11e-6, "pet": 0.1e-6},
        "dataset": {"num_c": 10, "len_c": 100, "len_q": 15, "len_a": {"Base": 166, "RAG": 55}},
        "pipelines": [{"kind": "Base", "len_p": 300}],
        "workload": {"num_rl": 1000},
        "economics": {"v": 0.10, "h": 1.00, "r": 0.5, "s": 1.0},
    }
    for key, value in (overrides or {}).items():
        document[key] = value
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# cost


def test_cost_base_rows_are_constant_over_requests(runner, tmp_path):
    path = write_scenario(tmp_path)
    result = invoke(runner, ["--format", "json", "cost", path, "--requests", "1,1000"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    rows = payload["series"][0]["rows"]
    assert rows[0]["total"] == rows[1]["total"]
    assert rows[0]["num_rl"] == 1 and rows[1]["num_rl"] == 1000


def test_cost_reproduces_pricing_for_the_bundled_scenario(runner):
    result = invoke(runner, ["--format", "json", "cost", SCENARIO, "--requests", "100000"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    totals = {series["kind"]: series["rows"][0]["total"] for series in payload["series"]}
    assert totals["Base"] == pytest.approx(0.00269225, abs=1e-9)
    assert totals["RAG"] == pytest.approx(0.00455148, abs=1e-6)


def test_cost_table_and_csv_formats(runner):
    table = invoke(runner, ["cost", SCENARIO])
    assert table.exit_code == 0
    assert "pipeline" in table.stdout and "Base" in table.stdout
    csv_out = invoke(runner, ["--format", "csv", "cost", SCENARIO])
    assert csv_out.stdout.splitlines()[0].startswith("pipeline,num_rl,")


def test_malformed_catalog_exits_2_with_machine_parsable_error(runner, tmp_path):
    (tmp_path / "catalog.json").write_text('{"pit": 1e-6}', encoding="utf-8")  # pot missing
    path = write_scenario(tmp_path, {"catalog": "catalog.json"})
    result = runner.invoke(main, ["cost", path])
    assert result.exit_code == 2
    error_line = result.stderr.strip().splitlines()[-1]
    error = json.loads(error_line)["error"]
    assert error["kind"] == "config"
    assert "pot" in error["message"]


# ---------------------------------------------------------------------------
# cop / sweep / breakeven


def test_cop_requires_rerun_willingness(runner, tmp_path):
    path = write_scenario(tmp_path, {"economics": {"v": 0.10, "h": 1.00, "s": 1.0}})
    result = runner.invoke(main, ["cop", path])
    assert result.exit_code == 2
    assert "economics.r" in json.loads(result.stderr.strip().splitlines()[-1])["error"]["message"]


def test_cop_defaults_collapse_to_g_plus_v_at_certain_success(runner, tmp_path):
    path = write_scenario(tmp_path, {"economics": {"s": 1.0}})  # v, h defaulted
    result = invoke(runner, ["--format", "json", "cop", path, "--r", "0.5"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    for evaluation in payload["pipelines"]:
        assert evaluation["cop"]["cop_ex"] == evaluation["breakdown"]["total"] + 0.10
        assert evaluation["economics"]["v"] == 0.10
        assert evaluation["economics"]["h"] == 1.00


def test_cop_success_override_changes_the_result(runner, tmp_path):
    path = write_scenario(tmp_path)
    certain = json.loads(invoke(runner, ["--format", "json", "cop", path]).stdout)
    harder = json.loads(invoke(runner, ["--format", "json", "cop", path, "--s", "0.5"]).stdout)
    assert harder["pipelines"][0]["cop"]["cop_ex"] > certain["pipelines"][0]["cop"]["cop_ex"]


def test_sweep_success_axis_descends(runner, tmp_path):
    path = write_scenario(tmp_path)
    result = invoke(runner, ["--format", "json", "sweep", path, "--axis", "s",
                             "--grid", "0.25,0.5,1.0"])
    assert result.exit_code == 0
    rows = json.loads(result.stdout)["rows"]
    values = [row["cop_ex"] for row in rows]
    assert values[0] > values[1] > values[2]


def test_sweep_rejects_out_of_range_grid_value_with_exit_3(runner, tmp_path):
    path = write_scenario(tmp_path)
    result = runner.invoke(main, ["sweep", path, "--axis", "r", "--grid", "0.5,1.2"])
    assert result.exit_code == 3
    error = json.loads(result.stderr.strip().splitlines()[-1])["error"]
    assert error["kind"] == "domain"
    assert "1.2" in error["message"]


def test_breakeven_reports_threshold_or_never(runner, tmp_path):
    path = write_scenario(tmp_path)
    result = invoke(runner, ["--format", "json", "breakeven", path])
    payload = json.loads(result.stdout)
    g = payload["pipelines"][0]["breakdown"]["total"]
    assert payload["pipelines"][0]["break_even"] == (g + 0.10) / 1.00
    expensive = write_scenario(tmp_path, {"economics": {"v": 2.0, "h": 1.0, "r": 0.5, "s": 1.0}})
    table = invoke(runner, ["breakeven", expensive])
    assert "never beats human" in table.stdout


# ---------------------------------------------------------------------------
# simulate


def test_simulate_reports_are_byte_identical_for_the_same_seed(runner, tmp_path):
    path = write_scenario(tmp_path)
    args = ["--format", "json", "simulate", path, "--trials", "2000", "--seed", "7"]
    first = invoke(runner, args)
    second = invoke(runner, args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    payload = json.loads(first.stdout)
    assert payload["report"]["seed"] == 7
    assert payload["report"]["rng"] == "numpy-pcg64"


def test_simulate_uses_global_seed_when_not_overridden(runner, tmp_path):
    path = write_scenario(tmp_path)
    result = invoke(runner, ["--seed", "3", "--format", "json", "simulate", path, "--trials", "500"])
    assert json.loads(result.stdout)["report"]["seed"] == 3


# ---------------------------------------------------------------------------
# stats


def test_stats_reproduces_the_unpaired_fixture(runner, tmp_path):
    lines = ["question_id,system_id,correct"]
    lines += [f"a{i},sys-a,{1 if i < 30 else 0}" for i in range(50)]
    lines += [f"b{i},sys-b,{1 if i < 20 else 0}" for i in range(50)]
    outcomes = tmp_path / "outcomes.csv"
    outcomes.write_text("\n".join(lines), encoding="utf-8")
    result = invoke(runner, ["--format", "json", "stats", str(outcomes)])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    pair = payload["matrix"]["pairs"][0]
    assert pair["p_raw"] == pytest.approx(0.0455, abs=1e-3)
    assert pair["z"] == pytest.approx(2.0, abs=1e-9)
    assert payload["accuracies"]["sys-a"] == 0.6

    table = invoke(runner, ["stats", str(outcomes)])
    assert "0.000" not in table.stdout.splitlines()[0]
    assert "3 decimals" in table.stdout
    csv_out = invoke(runner, ["--format", "csv", "stats", str(outcomes)])
    assert csv_out.stdout.splitlines()[0] == ",sys-a,sys-b"


# ---------------------------------------------------------------------------
# corpus commands


def test_profile_qa_gen_and_judge_round_trip(runner, tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "c1.txt").write_text("The tank holds two liters. Check monthly.", encoding="utf-8")
    (corpus / "c2.txt").write_text("Error P0301 means misfire. See page 9.", encoding="utf-8")

    profile = invoke(runner, ["profile", str(corpus)])
    assert profile.exit_code == 0
    assert json.loads(profile.stdout)["num_c"] == 2

    qa_path = tmp_path / "qa.json"
    qa_gen = invoke(runner, ["--output", str(qa_path), "qa-gen", str(corpus)])
    assert qa_gen.exit_code == 0
    qa_payload = json.loads(qa_path.read_text(encoding="utf-8"))
    assert len(qa_payload["qa_pairs"]) == 2
    assert qa_payload["failures"] == {}

    candidates = {pair["question"]: pair["answer"] for pair in qa_payload["qa_pairs"]}
    candidates_path = tmp_path / "candidates.json"
    candidates_path.write_text(json.dumps(candidates), encoding="utf-8")
    judged = invoke(runner, ["judge", str(qa_path), str(candidates_path), "--system-id", "sys-a"])
    payload = json.loads(judged.stdout)
    assert payload["accuracy"] == 1.0
    assert payload["coverage"] == 1.0
    assert len(payload["records"]) == 2


def test_judge_csv_output_is_an_outcome_table(runner, tmp_path):
    qa_path = tmp_path / "qa.json"
    qa_path.write_text(json.dumps({"qa_pairs": [
        {"question": "q1", "answer": "a1", "source_chunk": "c", "quality": 4}
    ]}), encoding="utf-8")
    candidates_path = tmp_path / "candidates.json"
    candidates_path.write_text(json.dumps({"q1": "a1"}), encoding="utf-8")
    result = invoke(runner, ["--format", "csv", "judge", str(qa_path), str(candidates_path),
                             "--system-id", "sys-a"])
    assert result.stdout.splitlines()[0] == "question_id,system_id,correct"
    assert result.stdout.splitlines()[1] == "q1,sys-a,1"


# ---------------------------------------------------------------------------
# plumbing


def test_output_flag_writes_the_report_to_a_file(runner, tmp_path):
    out = tmp_path / "report.json"
    result = invoke(runner, ["--format", "json", "--output", str(out), "cost", SCENARIO])
    assert result.exit_code == 0
    assert json.loads(out.read_text(encoding="utf-8"))["scenario_name"] == "manuals-gpt-4o"


def test_version_flag(runner):
    result = invoke(runner, ["--version"])
    assert "llmecon" in result.stdout


def test_config_file_supplies_format_and_seed_defaults(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"format": "json", "seed": 9}), encoding="utf-8")
    path = write_scenario(tmp_path)
    result = invoke(runner, ["--config", str(config), "simulate", path, "--trials", "200"])
    payload = json.loads(result.stdout)  # json format came from the config
    assert payload["report"]["seed"] == 9
    # explicit flags still win
    result = invoke(runner, ["--config", str(config), "--seed", "4", "simulate", path,
                             "--trials", "200"])
    assert json.loads(result.stdout)["report"]["seed"] == 4


def test_missing_scenario_file_is_a_config_error(runner):
    result = runner.invoke(main, ["cost", "does-not-exist.json"])
    assert result.exit_code == 2
    error = json.loads(result.stderr.strip().splitlines()[-1])["error"]
    assert error["kind"] == "config"
    assert "does-not-exist.json" in error["message"]
