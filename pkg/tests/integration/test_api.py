"""
Integration tests for the FastAPI surface
"""

import pytest
from fastapi.testclient import TestClient

from src.api.app import app

PATH_3 = {"k": 3, "n": 7, "edges": [[0, 1, 2], [2, 3, 4], [4, 5, 6]]}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestSystemEndpoints:

    def test_root(self, client):
        response = client.get("/")
        assert response.status_code == 200
        assert response.json()["version"] == "1.0.0"

    def test_health(self, client):
        assert client.get("/health").json() == {"status": "healthy"}

    def test_status(self, client):
        data = client.get("/status").json()
        assert data["audit_distribution"] == "v1"
        assert data["limits"]["max_k"] >= 2


class TestStructureEndpoints:

    def test_degen(self, client):
        response = client.post("/api/degen", json={"motif": PATH_3, "roots": [0, 6]})
        assert response.status_code == 200
        data = response.json()
        assert data["degen"] == 2
        assert sorted(data["exposure"]) == [0, 1, 2]

    def test_degen_bad_hypergraph(self, client):
        bad = {"k": 3, "n": 4, "edges": [[0, 1, 9]]}
        response = client.post("/api/degen", json={"motif": bad})
        assert response.status_code == 400
        assert "out of range" in response.json()["detail"]

    def test_degen_validation(self, client):
        response = client.post("/api/degen", json={"motif": {"k": 1, "n": 3, "edges": []}})
        assert response.status_code == 422

    def test_verify(self, client):
        body = {
            "hypergraph": {"k": 3, "n": 6, "edges": [[0, 1, 2], [3, 4, 5]]},
            "certificate": {"kind": "matching", "k": 3, "n": 6, "pieces": [[0, 1, 2], [3, 4, 5]]},
        }
        assert client.post("/api/verify", json=body).json() == {"valid": True, "violations": []}

    def test_verify_invalid(self, client):
        body = {
            "hypergraph": {"k": 3, "n": 6, "edges": [[0, 1, 2], [3, 4, 5]]},
            "certificate": {"kind": "matching", "k": 3, "n": 6, "pieces": [[0, 1, 3], [2, 4, 5]]},
        }
        data = client.post("/api/verify", json=body).json()
        assert data["valid"] is False
        assert data["violations"]

    def test_absorbers(self, client):
        path = client.post("/api/absorber", json={"kind": "path", "k": 3}).json()
        assert path["n"] == 27 and path["valid"]
        factor = client.post("/api/absorber", json={"kind": "factor", "k": 3}).json()
        assert factor["n"] == 9
        assert factor["roots"] == [0, 4, 8]

    def test_absorber_needs_k_three(self, client):
        assert client.post("/api/absorber", json={"kind": "path", "k": 2}).status_code == 400

    def test_audit(self, client):
        body = {
            "hypergraph": {"k": 2, "n": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]},
            "params": {"p": 1.0, "alpha": 0.5, "eps": 0.5},
            "trials": 3,
        }
        data = client.post("/api/audit", json=body).json()
        assert data["criterion"] == "pseudo_random"
        assert data["trials"] == 3

    def test_audit_over_budget(self, client):
        edges = [[0, 1, 2], [3, 4, 5]]
        body = {
            "hypergraph": {"k": 3, "n": 10, "edges": edges},
            "params": {"p": 0.5, "alpha": 0.5, "eps": 0.5},
            "mode": "exhaustive",
        }
        assert client.post("/api/audit", json=body).status_code == 400
