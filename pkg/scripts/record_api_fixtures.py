#!/usr/bin/env python3
"""Record real API responses as JSON fixtures for the console's contract
tests (frontend/tests/fixtures/)."""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from fastapi.testclient import TestClient

from oncodss.service import DecisionSupportService, ServiceConfig, create_app

PRECEDENT_TEXT = (
    "40-year-old man with gastric cancer at the postoperative stage IIIa and pyloric "
    "obstruction; high-differentiated adenocarcinoma, palpable mass, abnormal thickening "
    "of antral wall and mucosa; syndrome: acid reflux, belching, vomiting"
)

OUT = ROOT / "frontend" / "tests" / "fixtures"


def main():
    service = DecisionSupportService.from_config(
        ServiceConfig(
            ontology_path=str(ROOT / "fixtures" / "mini-do.obo"),
            case_store_path=str(ROOT / "fixtures" / "gastric-cases.jsonl"),
            rules_dir=str(ROOT / "fixtures"),
        )
    )
    client = TestClient(create_app(service))
    OUT.mkdir(parents=True, exist_ok=True)

    def record(name, response):
        path = OUT / f"{name}.json"
        path.write_text(
            json.dumps(response.json(), indent=2, ensure_ascii=False, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"{name}: HTTP {response.status_code} -> {path}")

    record("health", client.get("/api/health"))
    record(
        "consult-precedent",
        client.post(
            "/api/consult",
            json={
                "text": PRECEDENT_TEXT,
                "patient": {"age": 40, "sex": "male", "findings": [], "numeric_markers": {}},
                "stage": "IIIa",
                "k": 5,
            },
        ),
    )
    record(
        "consult-error",
        client.post("/api/consult", json={"text": "no patient record"}),
    )
    dataset = str(ROOT / "fixtures" / "synthetic-eval.jsonl")
    record(
        "evaluate-with-ontology",
        client.post(
            "/api/evaluate",
            json={"dataset": dataset, "use_ontology": True, "seed": 0, "k_neighbors": 5},
        ),
    )
    record(
        "evaluate-without-ontology",
        client.post(
            "/api/evaluate",
            json={"dataset": dataset, "use_ontology": False, "seed": 0, "k_neighbors": 5},
        ),
    )


if __name__ == "__main__":
    main()
