"""HTTP session service: endpoints, aliases, atomicity, persistence."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from metaforge.ecore import parse_ecore
from metaforge.gateway import BackendConfig, build_puml_prompt, prompt_hash
from metaforge.model import canonicalize, seed_metamodel
from metaforge.pipeline import TRACK_PUML_FIRST, PipelineConfig
from metaforge.puml import emit_puml
from metaforge.requirements import chunk
from metaforge.service import create_app


def fixture_config(fixture_dir) -> PipelineConfig:
    return PipelineConfig(BackendConfig(mode="fixture", fixture_dir=str(fixture_dir)),
                          track=TRACK_PUML_FIRST)


@pytest.fixture
def client(llm_fixture_dir):
    app = create_app(fixture_config(llm_fixture_dir))
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def sensor_requirements(scenario_dir):
    return (scenario_dir / "01_sensors.txt").read_text(encoding="utf-8")


def register(fixture_dir, prompt, text):
    (fixture_dir / f"{prompt_hash(prompt)}.json").write_text(
        json.dumps({"text": text, "promptTokens": 1, "completionTokens": 1}), encoding="utf-8")


class TestSessions:
    def test_create_session_seeded_with_vehicle(self, client):
        response = client.post("/sessions")
        assert response.status_code == 201
        session_id = response.json()["sessionId"]
        puml = client.get(f"/sessions/{session_id}/metamodel", params={"format": "puml"})
        assert puml.text == "@startuml\nclass Vehicle\n@enduml\n"

    def test_distinct_ids(self, client):
        first = client.post("/sessions").json()["sessionId"]
        second = client.post("/sessions").json()["sessionId"]
        assert first != second

    def test_fresh_history_has_single_creation_record(self, client):
        session_id = client.post("/sessions").json()["sessionId"]
        history = client.get(f"/sessions/{session_id}/history").json()
        assert len(history) == 1
        assert history[0]["step"] == "creation"
        assert history[0]["requirementCount"] == 0

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/metamodel").status_code == 404
        assert client.get("/sessions/nope/history").status_code == 404
        assert client.post("/sessions/nope/updateMetamodel",
                           json={"requirements": "x"}).status_code == 404


class TestUpdateFlow:
    def test_sensor_iteration(self, client, sensor_requirements):
        session_id = client.post("/sessions").json()["sessionId"]
        response = client.post(f"/sessions/{session_id}/updateMetamodel",
                               json={"requirements": sensor_requirements, "step": "update"})
        assert response.status_code == 200
        body = response.json()
        assert "Sensor" in body["ecore"]
        assert "RangeSensor" in body["ecore"]

        history = client.get(f"/sessions/{session_id}/history").json()
        assert [row["requirementCount"] for row in history] == [0, 19]
        assert history[1]["tokens"] == 647

    def test_three_step_scenario_history(self, client, scenario_dir):
        session_id = client.post("/sessions").json()["sessionId"]
        steps = [("01_sensors.txt", "update"), ("02_actuators_power.txt", "update"),
                 ("03_feedback_hardware_accelerators.txt", "feedback")]
        for filename, step in steps:
            text = (scenario_dir / filename).read_text(encoding="utf-8")
            response = client.post(f"/sessions/{session_id}/updateMetamodel",
                                   json={"requirements": text, "step": step})
            assert response.status_code == 200
        history = client.get(f"/sessions/{session_id}/history").json()
        assert [row["requirementCount"] for row in history] == [0, 19, 14, 3]
        assert [row["tokens"] for row in history] == [0, 647, 1102, 1113]
        assert [row["step"] for row in history] == ["creation", "update", "update", "feedback"]

    def test_feedback_adds_hardware_accelerator(self, client, scenario_dir):
        session_id = client.post("/sessions").json()["sessionId"]
        for filename, step in [("01_sensors.txt", "update"), ("02_actuators_power.txt", "update"),
                               ("03_feedback_hardware_accelerators.txt", "feedback")]:
            text = (scenario_dir / filename).read_text(encoding="utf-8")
            client.post(f"/sessions/{session_id}/updateMetamodel",
                        json={"requirements": text, "step": step})
        ecore = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).text
        model = parse_ecore(ecore).metamodel
        hw = model.find_class("HardwareAccelerator")
        assert {a.name for a in hw.attributes} == {"clock", "architectureType"}

    def test_document_round_trips_to_current(self, client, sensor_requirements):
        session_id = client.post("/sessions").json()["sessionId"]
        client.post(f"/sessions/{session_id}/updateMetamodel",
                    json={"requirements": sensor_requirements})
        ecore = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).text
        puml = client.get(f"/sessions/{session_id}/metamodel", params={"format": "puml"}).text
        from metaforge.puml import parse_puml

        assert canonicalize(parse_ecore(ecore).metamodel) == canonicalize(parse_puml(puml).metamodel)

    def test_empty_requirements_422(self, client):
        session_id = client.post("/sessions").json()["sessionId"]
        response = client.post(f"/sessions/{session_id}/updateMetamodel",
                               json={"requirements": "   "})
        assert response.status_code == 422

    def test_unknown_format_422(self, client):
        session_id = client.post("/sessions").json()["sessionId"]
        assert client.get(f"/sessions/{session_id}/metamodel",
                          params={"format": "png"}).status_code == 422


class TestFailureAtomicity:
    def test_fixture_miss_502_and_state_unchanged(self, tmp_path):
        app = create_app(fixture_config(tmp_path))
        with TestClient(app) as client:
            session_id = client.post("/sessions").json()["sessionId"]
            before = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).content
            response = client.post(f"/sessions/{session_id}/updateMetamodel",
                                   json={"requirements": "new sensors"})
            assert response.status_code == 502
            assert "no fixture for prompt" in response.json()["detail"]
            after = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).content
            assert before == after
            assert len(client.get(f"/sessions/{session_id}/history").json()) == 1

    def test_unusable_output_422_and_state_unchanged(self, tmp_path):
        requirements = "please add sensors"
        joined = "\n".join(c.text for c in chunk(requirements))
        prompt = build_puml_prompt(joined, emit_puml(seed_metamodel()))
        register(tmp_path, prompt, "sure, here it is:")
        app = create_app(fixture_config(tmp_path))
        with TestClient(app) as client:
            session_id = client.post("/sessions").json()["sessionId"]
            before = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).content
            response = client.post(f"/sessions/{session_id}/updateMetamodel",
                                   json={"requirements": requirements})
            assert response.status_code == 422
            after = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).content
            assert before == after

    def test_merge_conflict_409_and_state_unchanged(self, tmp_path):
        first = "cameras are a kind of sensor"
        second = "sensors are a kind of camera"
        current = seed_metamodel()
        first_prompt = build_puml_prompt("\n".join(c.text for c in chunk(first)), emit_puml(current))
        register(tmp_path, first_prompt,
                 "@startuml\nclass Vehicle\nclass Sensor\nclass Camera\nSensor <|-- Camera\n@enduml")
        app = create_app(fixture_config(tmp_path))
        with TestClient(app) as client:
            session_id = client.post("/sessions").json()["sessionId"]
            assert client.post(f"/sessions/{session_id}/updateMetamodel",
                               json={"requirements": first}).status_code == 200
            before = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).content

            current_puml = client.get(f"/sessions/{session_id}/metamodel",
                                      params={"format": "puml"}).text
            second_prompt = build_puml_prompt("\n".join(c.text for c in chunk(second)), current_puml)
            register(tmp_path, second_prompt,
                     "@startuml\nclass Sensor\nclass Camera\nCamera <|-- Sensor\n@enduml")
            response = client.post(f"/sessions/{session_id}/updateMetamodel",
                                   json={"requirements": second})
            assert response.status_code == 409
            assert any("cycle" in v for v in response.json()["detail"])
            after = client.get(f"/sessions/{session_id}/metamodel", params={"format": "ecore"}).content
            assert before == after


class TestPaperAliases:
    def test_update_and_get_on_default_session(self, llm_fixture_dir, scenario_dir):
        app = create_app(fixture_config(llm_fixture_dir))
        with TestClient(app) as client:
            diagram = client.get("/getCurrentMetamodel")
            assert diagram.status_code == 200
            assert diagram.text == "@startuml\nclass Vehicle\n@enduml\n"

            text = (scenario_dir / "01_sensors.txt").read_text(encoding="utf-8")
            response = client.post("/updateMetamodel", json={"requirements": text})
            assert response.status_code == 200
            assert "Sensor" in response.json()["ecore"]

            diagram = client.get("/getCurrentMetamodel")
            assert "Sensor <|-- Camera" in diagram.text
            assert "class Camera" in diagram.text
            ecore = client.get("/getCurrentMetamodel", params={"format": "ecore"})
            assert response.json()["ecore"] == ecore.text


class TestEvaluateEndpoint:
    def test_scorer_over_http(self, client, table3_dir):
        payload = {
            "candidateEcore": (table3_dir / "sensors_candidate.ecore").read_text(encoding="utf-8"),
            "referenceEcore": (table3_dir / "sensors_reference.ecore").read_text(encoding="utf-8"),
        }
        response = client.post("/evaluate", json=payload)
        assert response.status_code == 200
        body = response.json()
        assert (body["classes"]["matched"], body["classes"]["total"]) == (6, 6)
        assert (body["attributes"]["matched"], body["attributes"]["total"]) == (15, 21)

    def test_bad_document_422(self, client):
        response = client.post("/evaluate", json={"candidateEcore": "<broken", "referenceEcore": "<broken"})
        assert response.status_code == 422


class TestPersistence:
    def test_sessions_survive_restart(self, llm_fixture_dir, scenario_dir, tmp_path):
        config = fixture_config(llm_fixture_dir)
        data_dir = tmp_path / "data"
        text = (scenario_dir / "01_sensors.txt").read_text(encoding="utf-8")

        app = create_app(config, data_dir=data_dir)
        with TestClient(app) as client:
            session_id = client.post("/sessions").json()["sessionId"]
            client.post(f"/sessions/{session_id}/updateMetamodel", json={"requirements": text})
            ecore_before = client.get(f"/sessions/{session_id}/metamodel",
                                      params={"format": "ecore"}).text

        reloaded = create_app(config, data_dir=data_dir)
        with TestClient(reloaded) as client:
            ecore_after = client.get(f"/sessions/{session_id}/metamodel",
                                     params={"format": "ecore"}).text
            history = client.get(f"/sessions/{session_id}/history").json()
        assert ecore_after == ecore_before
        assert [row["requirementCount"] for row in history] == [0, 19]
