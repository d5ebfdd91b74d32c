"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Grids and tolerances are pinned here; the heavy lifting goes through the
public verification machinery so the acceptance run exercises the same code
paths a user invokes via ``tailbounds verify``.
"""

from __future__ import annotations

import json
import math
import time
from fractions import Fraction

from tailbounds import oracle
from tailbounds.cli import main
from tailbounds.service import handlers
from tailbounds.service.schemas import SweepRequest
from tailbounds.verification import parse_grid_config, run_grid

BINOM_GRID = "n-max = 120\np-grid = 0.05:0.95:0.05\n"
POIS_GRID = "mu-grid = 0.1, 0.5, 1, 2, 5, 10, 50, 100\n"


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {number}: {detail}"


def _run(suites: str, extra: str = "") -> list:
    return run_grid(parse_grid_config(f"suites = {suites}\n{extra}"))


def _summary(verdicts) -> str:
    return "; ".join(
        f"{v.inequality_id}: {v.grid_size} pts, {v.violations} viol, "
        f"worst {v.worst_margin:.3e}"
        for v in verdicts
    )


def test_criterion_1_binomial_sandwich():
    start = time.monotonic()
    verdicts = _run(
        "binom-chernoff-upper, binom-factorial-upper, binom-factorial-vs-chernoff, "
        "binom-ash-lower, binom-pelekis-lower",
        BINOM_GRID,
    )
    elapsed = time.monotonic() - start
    ok = all(v.passed for v in verdicts) and elapsed < 300.0
    _report(1, ok, f"{_summary(verdicts)}; elapsed {elapsed:.1f}s (< 300s)")


def test_criterion_2_binomial_tce():
    verdicts = _run("binom-tce-upper, binom-tce-oracle", BINOM_GRID)
    ok = all(v.passed for v in verdicts)
    _report(2, ok, _summary(verdicts))


def test_criterion_3_identities():
    verdicts = _run(
        "binom-tce-tail-identity, binom-tce-recursion, binom-product-identity, "
        "pois-tce-recursion",
        "n-max = 60\np-grid = 0.05:0.95:0.05\n" + POIS_GRID,
    )
    exact_identity = verdicts[0]
    ok = all(v.passed for v in verdicts) and exact_identity.worst_margin == 0.0
    _report(3, ok, _summary(verdicts))


def test_criterion_4_ratio_bounds():
    verdicts = _run(
        "binom-tail-point, binom-tail-ratio, pois-tail-ratio",
        BINOM_GRID + POIS_GRID,
    )
    ok = all(v.passed for v in verdicts)
    _report(4, ok, _summary(verdicts))


def test_criterion_5_medians():
    verdicts = _run(
        "binom-median, pois-median",
        BINOM_GRID + "mu-grid = 0.1:100:0.15\n",
    )
    ok = all(v.passed for v in verdicts)
    mu_points = verdicts[1].grid_size
    ok = ok and mu_points == 667  # 0.1, 0.25, ..., 100
    _report(5, ok, f"{_summary(verdicts)}; poisson medians at {mu_points} mu values")


def test_criterion_6_poisson_sandwich_and_tce():
    verdicts = _run(
        "pois-chernoff-upper, pois-pelekis-lower, pois-tce-upper",
        POIS_GRID,
    )
    ok = all(v.passed for v in verdicts)
    _report(6, ok, _summary(verdicts))


def test_criterion_7_regime_constants():
    verdicts = _run(
        "binom-regime-constant, pois-regime-constant",
        BINOM_GRID + "mu-grid = 0.1, 0.5, 1, 2, 2.5, 5, 7.5, 10, 50, 100\n",
    )
    ok = all(v.passed for v in verdicts) and all(v.grid_size > 0 for v in verdicts)
    # the Poisson regime bound must stay strictly above 1/5
    from tailbounds.exact import PoissonParams
    from tailbounds.poisson import pelekis_lower_pois

    for mu in (2.0, 2.5, 5.0, 7.5, 10.0, 50.0, 100.0):
        k = math.ceil(mu)
        ok = ok and pelekis_lower_pois(PoissonParams(mu), k) > 0.2
    _report(7, ok, _summary(verdicts))


def test_criterion_8_spot_values(capsys):
    # full-precision values against the oracles
    from tailbounds.service.schemas import BinomialEvalRequest, PoissonEvalRequest

    binom_report = handlers.evaluate_binomial(BinomialEvalRequest(n=10, p=0.3, k=5))
    sf_exact = oracle.binom_sf_exact(10, Fraction(3, 10), 5)
    rel_sf = abs(Fraction(binom_report.exact.sf) - sf_exact) / sf_exact
    pel_ok = abs(binom_report.bounds["pelekis_lower"] - 0.004374) <= 1e-12 * 0.004374
    fact_ok = abs(binom_report.bounds["factorial_upper"] - 0.324) <= 1e-12 * 0.324

    pois_report = handlers.evaluate_poisson(PoissonEvalRequest(mu=2.0, k=3))
    sf_pois_true = 0.32332358381693654  # 1 - 5 exp(-2), 17 digits
    rel_pois = abs(pois_report.exact.sf / sf_pois_true - 1.0)

    # the CLI must print the same values at 12 significant digits
    code = main(["eval", "binom", "--n", "10", "--p", "0.3", "--k", "5"])
    out = capsys.readouterr().out
    cli = json.loads(out)
    cli_ok = (
        code == 0
        and cli["exact"]["sf"] == 0.1502683326
        and cli["bounds"]["pelekis_lower"] == 0.004374
        and cli["bounds"]["factorial_upper"] == 0.324
    )
    code = main(["eval", "pois", "--mu", "2", "--k", "3"])
    cli_pois = json.loads(capsys.readouterr().out)
    cli_ok = cli_ok and code == 0 and cli_pois["exact"]["sf"] == 0.323323583817

    ok = rel_sf < 1e-12 and pel_ok and fact_ok and rel_pois < 1e-12 and cli_ok
    _report(
        8,
        ok,
        f"binomial sf rel err {float(rel_sf):.2e}, poisson sf rel err {rel_pois:.2e}, "
        f"pelekis_lower/factorial_upper exact at 12 digits, CLI output matches",
    )


def test_criterion_9_sweep_qualitative():
    sweep = handlers.sweep_binomial(SweepRequest(n=100, k=90))
    positive = [row.p for row in sweep.rows if row.delta > 0.0]
    close = [
        row.p
        for row in sweep.rows
        if row.delta <= 0.0 and 0.1 <= row.pelekis_lower / row.ash_lower <= 10.0
    ]
    ok = bool(positive) and bool(close) and min(positive) > max(close[:1] or [0.0])
    detail = (
        f"n=100 k=90: lower bound beats the entropy bound for p in {positive}; "
        f"within one order of magnitude at {len(close)} moderate p values "
        f"(e.g. {close[:3]})"
    )
    _report(9, ok, detail)
