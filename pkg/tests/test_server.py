"""HTTP API: endpoint contracts, status mapping, CLI parity."""

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from llmecon.cli import main as cli_main
from llmecon.scenario import bundled_scenario_path
from llmecon.server import MAX_SWEEP_POINTS, MAX_TRIALS, create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def make_scenario(s=1.0, r=0.5, g_target=None):
    """Inline scenario; with g_target the Base pipeline costs exactly g_target."""
    catalog = {"pit": 2.75e-6, "pot": 11e-6, "pet": 0.1e-6}
    dataset = {"num_c": 10, "len_c": 100, "len_q": 15, "len_a": {"Base": 166, "RAG": 55}}
    pipelines = [{"kind": "Base", "len_p": 300},
                 {"kind": "RAG", "k": 10, "len_p": 300, "len_p_rag": 350}]
    if g_target is not None:
        catalog = {"pit": g_target / 300, "pot": 1e-6, "pet": 0.0}
        dataset = {"num_c": 1, "len_c": 1, "len_q": 0, "len_a": {"Base": 0}}
        pipelines = [{"kind": "Base", "len_p": 300}]
    return {
        "name": "api-test",
        "catalog": catalog,
        "dataset": dataset,
        "pipelines": pipelines,
        "workload": {"num_rl": 100000, "lifetime_hours": 168},
        "economics": {"v": 0.10, "h": 1.00, "r": r, "s": s},
    }


# ---------------------------------------------------------------------------
# evaluate


def test_evaluate_certain_success_returns_g_plus_v(client):
    response = client.post("/api/v1/evaluate", json=make_scenario(s=1.0))
    assert response.status_code == 200
    payload = response.json()
    for evaluation in payload["pipelines"]:
        assert evaluation["cop"]["cop_ex"] == evaluation["breakdown"]["total"] + 0.10
    assert payload["scenario_hash"]
    assert any("vdb=0" in a for a in payload["assumptions"])


def test_evaluate_reproduces_the_derived_economics_case(client):
    response = client.post("/api/v1/evaluate", json=make_scenario(s=0.5, r=0.5, g_target=0.003))
    assert response.status_code == 200
    evaluation = response.json()["pipelines"][0]
    assert evaluation["breakdown"]["total"] == pytest.approx(0.003, rel=1e-12)
    assert evaluation["cop"]["cop_ex"] == pytest.approx(0.470667, abs=1e-6)


def test_evaluate_rejects_out_of_range_r_with_field_path(client):
    response = client.post("/api/v1/evaluate", json=make_scenario(r=1.5))
    assert response.status_code == 400
    error = response.json()["errors"][0]
    assert error["field"] == "economics.r"


def test_evaluate_maps_domain_errors_to_422(client):
    response = client.post("/api/v1/evaluate", json=make_scenario(s=0.0, r=1.0))
    assert response.status_code == 422
    assert "non-terminating retry loop" in response.json()["errors"][0]["message"]


def test_evaluate_requires_economics(client):
    scenario = make_scenario()
    scenario["economics"] = {"v": 0.1, "h": 1.0}
    response = client.post("/api/v1/evaluate", json=scenario)
    assert response.status_code == 400
    assert response.json()["errors"][0]["field"] == "economics.r"


def test_evaluate_is_stateless_and_deterministic(client):
    body = make_scenario(s=0.7)
    first = client.post("/api/v1/evaluate", json=body)
    second = client.post("/api/v1/evaluate", json=body)
    assert first.content == second.content


# ---------------------------------------------------------------------------
# sweep


def test_sweep_matches_the_econ_module(client):
    response = client.post("/api/v1/sweep", json={
        "scenario": make_scenario(s=0.5, r=0.5, g_target=0.003),
        "axis": "s",
        "grid": [0.25, 0.5, 1.0],
    })
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert [row["value"] for row in rows] == [0.25, 0.5, 1.0]
    assert rows[0]["cop_ex"] == pytest.approx(0.478 / 0.625, rel=1e-12)
    assert rows[1]["cop_ex"] == pytest.approx(0.353 / 0.75, rel=1e-12)
    assert rows[2]["cop_ex"] == pytest.approx(0.103, rel=1e-12)
    assert rows[0]["cop_ex"] > rows[1]["cop_ex"] > rows[2]["cop_ex"]


def test_sweep_accepts_inline_economics(client):
    response = client.post("/api/v1/sweep", json={
        "economics": {"g": 0.003, "v": 0.1, "h": 1.0, "r": 0.5, "s": 0.5},
        "axis": "s",
        "grid": [1.0],
    })
    assert response.status_code == 200
    assert response.json()["rows"][0]["cop_ex"] == pytest.approx(0.103, rel=1e-12)


def test_oversized_sweep_grid_is_413(client):
    response = client.post("/api/v1/sweep", json={
        "economics": {"g": 0.003, "v": 0.1, "h": 1.0, "r": 0.5, "s": 0.5},
        "axis": "s",
        "grid": [0.5] * (MAX_SWEEP_POINTS + 1),
    })
    assert response.status_code == 413
    assert str(MAX_SWEEP_POINTS) in response.json()["errors"][0]["message"]


# ---------------------------------------------------------------------------
# cost


def test_cost_endpoint_returns_amortization_series(client):
    response = client.post("/api/v1/cost", json={
        "scenario": make_scenario(),
        "requests": [1000, 100000],
    })
    assert response.status_code == 200
    payload = response.json()
    by_kind = {series["kind"]: series["rows"] for series in payload["series"]}
    assert by_kind["Base"][0]["total"] == by_kind["Base"][1]["total"]
    assert by_kind["RAG"][0]["total"] > by_kind["RAG"][1]["total"]
    assert [row["num_rl"] for row in by_kind["RAG"]] == [1000, 100000]


def test_cost_endpoint_matches_cli_cost_output(client):
    runner = CliRunner()
    result = runner.invoke(
        cli_main,
        ["--format", "json", "cost", str(bundled_scenario_path("manuals-gpt-4o")),
         "--requests", "1000,100000"],
        catch_exceptions=False,
    )
    cli_payload = json.loads(result.stdout)
    response = client.post("/api/v1/cost", json={
        "scenario": cli_payload["scenario"],
        "requests": [1000, 100000],
    })
    assert response.status_code == 200
    assert response.json() == cli_payload


def test_cost_endpoint_validates_grid(client):
    response = client.post("/api/v1/cost", json={
        "scenario": make_scenario(), "requests": [10, "many"],
    })
    assert response.status_code == 400
    response = client.post("/api/v1/cost", json={
        "scenario": make_scenario(), "requests": list(range(1, MAX_SWEEP_POINTS + 2)),
    })
    assert response.status_code == 413


# ---------------------------------------------------------------------------
# simulate


def test_simulate_caps_trials_and_flags_truncation(client):
    response = client.post("/api/v1/simulate", json={
        "economics": {"g": 0.003, "v": 0.1, "h": 1.0, "r": 0.5, "s": 1.0},
        "trials": MAX_TRIALS + 5,
        "seed": 11,
    })
    assert response.status_code == 200
    payload = response.json()
    assert payload["report"]["trials"] == MAX_TRIALS
    assert payload["truncated"] is True
    assert payload["report"]["seed"] == 11


def test_simulate_is_deterministic_per_seed(client):
    body = {
        "economics": {"g": 0.003, "v": 0.1, "h": 1.0, "r": 0.5, "s": 0.5},
        "trials": 5000,
        "seed": 21,
    }
    first = client.post("/api/v1/simulate", json=body)
    second = client.post("/api/v1/simulate", json=body)
    assert first.content == second.content
    assert first.json()["truncated"] is False


# ---------------------------------------------------------------------------
# catalogs, datasets, version


def test_bundled_catalog_listing_carries_table_rates(client):
    payload = client.get("/api/v1/catalogs").json()
    entries = {entry["name"]: entry for entry in payload["catalogs"]}
    assert set(entries) == {"gpt-4o", "gpt-4o-mini", "llama-70b", "llama-3b"}
    assert entries["gpt-4o"]["variants"]["default"]["pit"] == 2.75e-6
    assert entries["gpt-4o"]["variants"]["default"]["pft"] == 27.5e-6
    assert entries["gpt-4o-mini"]["variants"]["default"]["pot"] == 0.66e-6
    assert entries["llama-70b"]["variants"]["high"]["pit"] == 0.38e-6
    assert entries["llama-70b"]["variants"]["low"]["pot"] == 11.97e-6
    assert entries["llama-3b"]["variants"]["high"]["pit"] == 0.1e-6
    assert entries["llama-3b"]["variants"]["high"]["pf"] == 2.96


def test_unknown_catalog_is_404(client):
    assert client.get("/api/v1/catalogs/gpt-4o").status_code == 200
    response = client.get("/api/v1/catalogs/gpt-9")
    assert response.status_code == 404
    assert "unknown catalog" in response.json()["errors"][0]["message"]


def test_dataset_listing(client):
    payload = client.get("/api/v1/datasets").json()
    names = {entry["name"] for entry in payload["datasets"]}
    assert "manuals-gpt-4o" in names and "quality-gpt-4o" in names


def test_version_endpoint(client):
    payload = client.get("/api/v1/version").json()
    assert payload == {"tool": "llmecon", "version": "0.1.0", "schema": "v1"}


# ---------------------------------------------------------------------------
# CLI / API parity


def test_api_evaluation_equals_cli_output_field_for_field(client, tmp_path):
    scenario_path = bundled_scenario_path("manuals-gpt-4o")
    runner = CliRunner()
    result = runner.invoke(
        cli_main,
        ["--format", "json", "cop", str(scenario_path), "--r", "0.5", "--s", "0.62"],
        catch_exceptions=False,
    )
    assert result.exit_code == 0
    cli_payload = json.loads(result.stdout)

    api_scenario = json.loads(json.dumps(cli_payload["scenario"]))
    response = client.post("/api/v1/evaluate", json=api_scenario)
    assert response.status_code == 200
    assert response.json() == cli_payload
