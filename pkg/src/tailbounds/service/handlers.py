"""Service-layer operations shared by the HTTP endpoints and the CLI.

Each handler takes a request model and returns a response model, raising
:class:`DomainError` / :class:`ConfigError` for inputs outside the
supported regimes; the transport layers translate those into HTTP 422 or
CLI exit code 2.
"""

from __future__ import annotations

from fractions import Fraction

from .. import binomial as bb
from .. import poisson as pb
from ..errors import DomainError
from ..exact import BinomialParams, PoissonParams, binom_sf, binom_tce, pois_sf, pois_tce
from ..verification import DEFAULT_CONFIG_TEXT, parse_grid_config, run_grid
from .schemas import (
    BinomialEvalRequest,
    BoundReport,
    ExactValues,
    PoissonEvalRequest,
    Query,
    ReportMeta,
    SweepRequest,
    SweepResponse,
    SweepRow,
    VerdictModel,
    VerifyRequest,
    VerifyResponse,
)

_REL_SLACK = 1e-12

# Illustrative sweep configurations spanning moderate and extreme k/n; not
# derived from any particular data set.
ILLUSTRATIVE_SWEEPS = ((100, 60), (100, 90), (1000, 900))


def _check_sandwich(report: BoundReport) -> None:
    """Re-assert that every in-domain bound brackets the exact values and
    record any violation as an anomaly instead of shipping it silently."""
    sf = report.exact.sf
    tce = report.exact.tce
    b = report.bounds
    checks = [
        ("ash_lower", b.get("ash_lower"), "le", sf),
        ("pelekis_lower", b.get("pelekis_lower"), "le", sf),
        ("chernoff_upper", b.get("chernoff_upper"), "ge", sf),
        ("factorial_upper", b.get("factorial_upper"), "ge", sf),
        ("tail_point_upper", b.get("tail_point_upper"), "ge", sf),
        ("tce_upper", b.get("tce_upper"), "ge", tce),
    ]
    for name, value, direction, target in checks:
        if value is None:
            continue
        if direction == "le" and value > target * (1.0 + _REL_SLACK):
            report.meta.anomalies.append(f"{name}={value} exceeds exact value {target}")
        if direction == "ge" and value < target * (1.0 - _REL_SLACK):
            report.meta.anomalies.append(f"{name}={value} below exact value {target}")


def evaluate_binomial(req: BinomialEvalRequest) -> BoundReport:
    params = BinomialParams(req.n, req.p)
    k = req.k
    if k > params.n:
        raise DomainError(f"k={k} exceeds n={params.n}")
    if k <= params.n * params.p:
        raise DomainError(
            f"k={k} is not above the mean n p = {params.n * params.p}; "
            "every bound is undefined there"
        )
    bound_set = bb.binom_bound_set(params, k)
    sf = binom_sf(params, k)
    bounds: dict[str, int | float | None] = {
        "chernoff_upper": bound_set.chernoff_upper,
        "factorial_upper": bound_set.factorial_moment_upper,
        "ash_lower": bound_set.ash_lower,
        "pelekis_lower": bound_set.pelekis_lower,
        "tce_upper": bound_set.tce_upper,
        "tail_ratio_upper": bound_set.tail_ratio_upper,
        "tail_point_upper": bound_set.tail_point_upper,
        "ell_floor": bound_set.ell_floor,
        "ell_ceil": bound_set.ell_ceil,
    }
    report = BoundReport(
        query=Query(dist="binomial", n=params.n, p=params.p, k=k),
        exact=ExactValues(sf=sf.value, log_sf=sf.log_value, tce=binom_tce(params, k)),
        bounds=bounds,
        meta=ReportMeta(out_of_domain=sorted(n for n, v in bounds.items() if v is None)),
    )
    _check_sandwich(report)
    return report


def evaluate_poisson(req: PoissonEvalRequest) -> BoundReport:
    params = PoissonParams(req.mu)
    k = req.k
    if k < 1 or k < params.mu:
        raise DomainError(
            f"k={k} is below the mean mu={params.mu}; every bound is undefined there"
        )
    bound_set = pb.pois_bound_set(params, k)
    sf = pois_sf(params, k)
    bounds: dict[str, int | float | None] = {
        "chernoff_upper": bound_set.chernoff_upper,
        "pelekis_lower": bound_set.pelekis_lower,
        "tce_upper": bound_set.tce_upper,
        "tail_ratio_upper": bound_set.tail_ratio_upper,
        "ell": bound_set.ell,
    }
    if req.chernoff_plus_mu:
        bounds["chernoff_upper_plus_mu"] = (
            pb.chernoff_upper_pois_plus_mu(params, k) if k > params.mu else None
        )
    report = BoundReport(
        query=Query(dist="poisson", mu=params.mu, k=k),
        exact=ExactValues(sf=sf.value, log_sf=sf.log_value, tce=pois_tce(params, k)),
        bounds=bounds,
        meta=ReportMeta(out_of_domain=sorted(n for n, v in bounds.items() if v is None)),
    )
    _check_sandwich(report)
    return report


def _decimal_fraction(x: float) -> Fraction:
    # via the shortest decimal repr, so 0.05 becomes exactly 1/20
    return Fraction(repr(float(x)))


def sweep_binomial(req: SweepRequest) -> SweepResponse:
    """Sweep p at fixed (n, k), emitting every bound and the lower-bound gap.

    Requires 1 <= k < n: at k = n the entropy lower bound is undefined for
    every p, so the sweep refuses rather than emit an all-missing column.
    """
    n, k = req.n, req.k
    if not (1 <= k < n):
        raise DomainError(
            f"sweep requires 1 <= k < n (got n={n}, k={k}); "
            "at k = n the lower-bound columns are undefined for every p"
        )
    step = _decimal_fraction(req.step) if req.step is not None else Fraction(1, 100)
    p_min = _decimal_fraction(req.p_min) if req.p_min is not None else step
    p_max = (
        _decimal_fraction(req.p_max)
        if req.p_max is not None
        else Fraction(k, n) - Fraction(1, 100)
    )
    if p_min <= 0 or p_max >= 1:
        raise DomainError(f"p range ({p_min}, {p_max}) must stay inside (0, 1)")
    if Fraction(k, n) <= p_max:
        raise DomainError(
            f"p_max={float(p_max)} reaches k/n={k/n}: rows with n p >= k are undefined"
        )
    rows: list[SweepRow] = []
    p = p_min
    while p <= p_max:
        pf = float(p)
        params = BinomialParams(n, pf)
        pel = bb.pelekis_lower(params, k)
        if req.figure_exponent:
            pel = pel / (pf * pf)
        ash = bb.ash_lower(params, k)
        rows.append(
            SweepRow(
                p=pf,
                exact_sf=binom_sf(params, k).value,
                chernoff_upper=bb.chernoff_upper(params, k),
                factorial_upper=bb.factorial_moment_upper(params, k),
                ash_lower=ash,
                pelekis_lower=pel,
                delta=pel - ash,
            )
        )
        p += step
    if not rows:
        raise DomainError(f"empty sweep range: p_min={float(p_min)}, p_max={float(p_max)}")
    return SweepResponse(n=n, k=k, figure_exponent=req.figure_exponent, rows=rows)


def run_verification(req: VerifyRequest) -> VerifyResponse:
    config = parse_grid_config(req.config if req.config is not None else DEFAULT_CONFIG_TEXT)
    verdicts = run_grid(config)
    models = [VerdictModel(**v.to_dict()) for v in verdicts]
    return VerifyResponse(all_passed=all(v.passed for v in verdicts), verdicts=models)
