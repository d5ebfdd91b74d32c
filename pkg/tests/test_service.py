"""Endpoint tests for the HTTP service."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from tailbounds.service.app import app

client = TestClient(app)


def test_index_lists_endpoints():
    resp = client.get("/")
    assert resp.status_code == 200
    body = resp.json()
    assert body["name"] == "tailbounds"
    assert "/eval/binomial" in body["endpoints"]


def test_eval_binomial_endpoint():
    resp = client.post("/eval/binomial", json={"n": 10, "p": 0.3, "k": 5})
    assert resp.status_code == 200
    body = resp.json()
    assert body["query"]["dist"] == "binomial"
    assert body["exact"]["sf"] == pytest.approx(0.1502683326, rel=1e-12)
    assert body["exact"]["tce"] == pytest.approx(5.397163141211298, rel=1e-12)
    assert body["bounds"]["factorial_upper"] == pytest.approx(0.324, rel=1e-12)
    assert body["bounds"]["pelekis_lower"] == pytest.approx(0.004374, rel=1e-12)
    assert body["bounds"]["ell_floor"] == 2
    assert body["bounds"]["ell_ceil"] == 3
    assert body["meta"]["anomalies"] == []


def test_eval_binomial_top_point_marks_out_of_domain():
    resp = client.post("/eval/binomial", json={"n": 10, "p": 0.5, "k": 10})
    assert resp.status_code == 200
    body = resp.json()
    assert body["bounds"]["ash_lower"] is None
    assert body["bounds"]["pelekis_lower"] is None
    assert set(body["meta"]["out_of_domain"]) == {
        "ash_lower",
        "pelekis_lower",
        "tail_ratio_upper",
    }
    assert body["exact"]["sf"] == pytest.approx(2.0**-10, rel=1e-12)
    assert body["bounds"]["chernoff_upper"] == pytest.approx(2.0**-10, rel=1e-12)


def test_eval_binomial_rejects_low_k():
    resp = client.post("/eval/binomial", json={"n": 10, "p": 0.3, "k": 3})
    assert resp.status_code == 422
    resp = client.post("/eval/binomial", json={"n": 10, "p": 1.2, "k": 5})
    assert resp.status_code == 422


def test_eval_poisson_endpoint():
    resp = client.post("/eval/poisson", json={"mu": 2.0, "k": 3})
    assert resp.status_code == 200
    body = resp.json()
    assert body["exact"]["sf"] == pytest.approx(0.3233235838169365, rel=1e-12)
    assert body["exact"]["tce"] == pytest.approx(3.6743014120892405, rel=1e-12)
    assert body["bounds"]["chernoff_upper"] == pytest.approx(0.805416838062, rel=1e-11)
    assert body["bounds"]["pelekis_lower"] == pytest.approx(0.08, rel=1e-12)
    assert body["bounds"]["tce_upper"] == pytest.approx(4.0, rel=1e-12)
    assert "chernoff_upper_plus_mu" not in body["bounds"]


def test_eval_poisson_plus_mu_variant():
    resp = client.post(
        "/eval/poisson", json={"mu": 2.0, "k": 3, "chernoff_plus_mu": True}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["bounds"]["chernoff_upper_plus_mu"] == pytest.approx(
        body["bounds"]["chernoff_upper"] * 54.598150033144236, rel=1e-10
    )


def test_eval_poisson_rejects_sub_mean_k():
    resp = client.post("/eval/poisson", json={"mu": 5.0, "k": 3})
    assert resp.status_code == 422


def test_sweep_endpoint():
    resp = client.post("/sweep/binomial", json={"n": 100, "k": 80, "step": 0.05})
    assert resp.status_code == 200
    body = resp.json()
    assert body["header"] == [
        "p", "exact_sf", "chernoff_upper", "factorial_upper",
        "ash_lower", "pelekis_lower", "delta",
    ]
    assert len(body["rows"]) == 15
    for row in body["rows"]:
        assert row["ash_lower"] <= row["exact_sf"] <= row["chernoff_upper"]
        assert row["delta"] == pytest.approx(
            row["pelekis_lower"] - row["ash_lower"], rel=1e-12, abs=1e-300
        )


def test_sweep_rejects_k_equal_n():
    resp = client.post("/sweep/binomial", json={"n": 10, "k": 10})
    assert resp.status_code == 422


def test_verify_endpoint_with_config():
    config = "suites = binom-median\nn-max = 10\np-grid = 0.25, 0.5\n"
    resp = client.post("/verify", json={"config": config})
    assert resp.status_code == 200
    body = resp.json()
    assert body["all_passed"] is True
    assert len(body["verdicts"]) == 1
    assert body["verdicts"][0]["inequality_id"] == "binom-median"
    assert body["verdicts"][0]["violations"] == 0


def test_verify_endpoint_rejects_bad_config():
    resp = client.post("/verify", json={"config": "suites = nope"})
    assert resp.status_code == 422


def test_report_reassertion_flags_planted_anomaly():
    from tailbounds.service.handlers import _check_sandwich
    from tailbounds.service.schemas import (
        BinomialEvalRequest,
        BoundReport,
        ExactValues,
        Query,
        ReportMeta,
    )
    from tailbounds.service import handlers

    good = handlers.evaluate_binomial(BinomialEvalRequest(n=10, p=0.3, k=5))
    assert good.meta.anomalies == []
    doctored = BoundReport(
        query=Query(dist="binomial", n=10, p=0.3, k=5),
        exact=ExactValues(sf=good.exact.sf, log_sf=good.exact.log_sf, tce=good.exact.tce),
        bounds={**good.bounds, "ash_lower": good.exact.sf * 2.0},
        meta=ReportMeta(),
    )
    _check_sandwich(doctored)
    assert any("ash_lower" in note for note in doctored.meta.anomalies)
