"""Grid certification: every inequality and identity, judged by the oracles.

A grid run takes a plain-text key-value configuration:

    # comments allowed
    suites = all                  # or a comma-separated list of suite ids
    n-max = 60                    # binomial trial counts 1..n-max
    p-grid = 0.1:0.9:0.1          # exact decimal ranges start:stop:step
    mu-grid = 0.5, 1, 2, 5        # and/or comma-separated values
    tol.binom-median = 1e-12      # optional per-suite tolerance override

and produces one :class:`GridVerdict` per suite: grid size, violation count,
the worst (most negative) margin and the point attaining it.  A margin is
the slack of the inequality at a point (relative slack for bound
comparisons, minus the residual for identities), so a suite passes when its
worst margin stays above minus its tolerance.

Identical configurations produce identical verdict lists; iteration order
is fixed and nothing here is randomized.  Grid points are independent, so a
caller may partition them across workers as long as the per-suite reduction
keeps this ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import mpmath

from . import binomial as bb
from . import poisson as pb
from . import oracle
from .errors import ConfigError
from .exact import BinomialParams, PoissonParams, binom_sf, binom_tce, pois_sf, pois_tce

__all__ = [
    "GridConfig",
    "GridVerdict",
    "DEFAULT_CONFIG_TEXT",
    "parse_grid_config",
    "default_config",
    "run_grid",
    "suite_ids",
]

DEFAULT_CONFIG_TEXT = """\
# shipped certification grid
suites = all
n-max = 60
p-grid = 0.1:0.9:0.1
mu-grid = 0.5, 1, 2, 5
"""

_ORACLE_DIGITS = 50


@dataclass(frozen=True)
class GridVerdict:
    """Pass/fail record for one inequality suite over a parameter grid."""

    inequality_id: str
    grid_size: int
    violations: int
    worst_margin: float
    worst_point: tuple
    tolerance: float
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "grid_size": self.grid_size,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "worst_point": list(self.worst_point),
            "tolerance": self.tolerance,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class GridConfig:
    suites: tuple[str, ...]
    n_max: int
    p_values: tuple[Fraction, ...]
    mu_values: tuple[Fraction, ...]
    tolerances: dict[str, float] = field(default_factory=dict)


def _parse_fraction_list(text: str, key: str) -> tuple[Fraction, ...]:
    values: list[Fraction] = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        try:
            if ":" in token:
                start_s, stop_s, step_s = token.split(":")
                start, stop, step = (Fraction(s.strip()) for s in (start_s, stop_s, step_s))
                if step <= 0 or stop < start:
                    raise ConfigError(f"{key}: bad range {token!r}")
                v = start
                while v <= stop:
                    values.append(v)
                    v += step
            else:
                values.append(Fraction(token))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{key}: cannot parse {token!r}") from exc
    return tuple(values)


def parse_grid_config(text: str) -> GridConfig:
    """Parse the plain-text configuration document; raises ConfigError."""
    raw: dict[str, str] = {}
    tolerances: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if key.startswith("tol."):
            sid = key[4:]
            if sid not in SUITES:
                raise ConfigError(f"line {lineno}: unknown suite in {key!r}")
            try:
                tolerances[sid] = float(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad tolerance {value!r}") from exc
        elif key in ("suites", "n-max", "p-grid", "mu-grid"):
            raw[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    suites_value = raw.get("suites", "all")
    if suites_value.strip() == "all":
        suites = tuple(SUITES)
    else:
        suites = tuple(s.strip() for s in suites_value.split(",") if s.strip())
        unknown = [s for s in suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite names: {', '.join(unknown)}")
        if not suites:
            raise ConfigError("empty suite list")

    try:
        n_max = int(raw.get("n-max", "60"))
    except ValueError as exc:
        raise ConfigError(f"bad n-max {raw['n-max']!r}") from exc
    if n_max < 1:
        raise ConfigError(f"n-max must be >= 1, got {n_max}")

    p_values = _parse_fraction_list(raw.get("p-grid", "0.1:0.9:0.1"), "p-grid")
    if not p_values:
        raise ConfigError("p-grid is empty")
    if any(not (0 < p < 1) for p in p_values):
        raise ConfigError("p-grid values must lie strictly inside (0, 1)")

    mu_values = _parse_fraction_list(raw.get("mu-grid", "0.5, 1, 2, 5"), "mu-grid")
    if not mu_values:
        raise ConfigError("mu-grid is empty")
    if any(mu <= 0 for mu in mu_values):
        raise ConfigError("mu-grid values must be positive")

    return GridConfig(suites, n_max, p_values, mu_values, tolerances)


def default_config() -> GridConfig:
    return parse_grid_config(DEFAULT_CONFIG_TEXT)


# ---------------------------------------------------------------------------
# margin helpers
# ---------------------------------------------------------------------------


def _log_or_neg_inf(x: float) -> float:
    return math.log(x) if x > 0.0 else float("-inf")


def _margin_value_below(log_value: float, upper: float) -> float:
    # relative slack of value <= upper, computed in log space so that
    # astronomically small tails keep meaningful margins
    return -math.expm1(log_value - _log_or_neg_inf(upper))


def _margin_value_above(log_value: float, lower: float) -> float:
    # relative slack of lower <= value
    return -math.expm1(_log_or_neg_inf(lower) - log_value)


def _rel_error_exact(value: float, exact: Fraction) -> float:
    return float(abs(Fraction(value) - exact) / exact)


# ---------------------------------------------------------------------------
# grid iterators
# ---------------------------------------------------------------------------


def _binom_grid(cfg: GridConfig) -> Iterator[tuple[BinomialParams, Fraction, int]]:
    for n in range(1, cfg.n_max + 1):
        for pf in cfg.p_values:
            params = BinomialParams(n, float(pf))
            k_min = math.floor(n * pf) + 1  # exact: smallest k with k > n p
            for k in range(k_min, n + 1):
                yield params, pf, k


def _pois_window(mu_f: Fraction) -> tuple[int, int]:
    mu = float(mu_f)
    return math.ceil(mu_f), math.floor(mu + 10.0 * math.sqrt(mu) + 10.0)


def _pois_grid(cfg: GridConfig) -> Iterator[tuple[PoissonParams, Fraction, int]]:
    for mu_f in cfg.mu_values:
        params = PoissonParams(float(mu_f))
        k_min, k_max = _pois_window(mu_f)
        for k in range(k_min, k_max + 1):
            yield params, mu_f, k


# ---------------------------------------------------------------------------
# suite runners: yield (margin, point); margin None means skipped
# ---------------------------------------------------------------------------

PointMargin = tuple[float | None, tuple]


def _run_binom_chernoff(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        sf = binom_sf(params, k)
        yield _margin_value_below(sf.log_value, bb.chernoff_upper(params, k)), (
            params.n, str(pf), k)


def _run_binom_factorial(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        sf = binom_sf(params, k)
        yield _margin_value_below(sf.log_value, bb.factorial_moment_upper(params, k)), (
            params.n, str(pf), k)


def _run_binom_factorial_vs_chernoff(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        fact = bb.factorial_moment_upper(params, k)
        cher = bb.chernoff_upper(params, k)
        yield (cher - fact) / cher, (params.n, str(pf), k)


def _run_binom_ash(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        point = (params.n, str(pf), k)
        if k >= params.n:
            yield None, point
            continue
        sf = binom_sf(params, k)
        yield _margin_value_above(sf.log_value, bb.ash_lower(params, k)), point


def _run_binom_pelekis(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        point = (params.n, str(pf), k)
        if k > params.n - 1:
            yield None, point
            continue
        sf = binom_sf(params, k)
        yield _margin_value_above(sf.log_value, bb.pelekis_lower(params, k)), point


def _run_binom_tce_upper(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        upper = bb.tce_upper(params, k)
        yield (upper - binom_tce(params, k)) / upper, (params.n, str(pf), k)


def _run_binom_tail_point(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        sf = binom_sf(params, k)
        yield _margin_value_below(sf.log_value, bb.tail_point_upper(params, k)), (
            params.n, str(pf), k)


def _run_binom_tail_ratio(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        point = (params.n, str(pf), k)
        if k > params.n - 1:
            yield None, point
            continue
        ratio = math.exp(
            binom_sf(params, k + 1).log_value - binom_sf(params, k).log_value
        )
        bound = bb.tail_ratio_upper(params, k)
        yield (bound - ratio) / bound, point


def _run_binom_median(cfg: GridConfig) -> Iterator[PointMargin]:
    for n in range(1, cfg.n_max + 1):
        for pf in cfg.p_values:
            params = BinomialParams(n, float(pf))
            threshold = math.floor(n * pf)
            sf = binom_sf(params, threshold)
            yield sf.value - 0.5, (n, str(pf), threshold)


def _run_binom_ell_index(cfg: GridConfig) -> Iterator[PointMargin]:
    # the index must satisfy k - l >= (n - l) p and k - (l+1) < (n - (l+1)) p,
    # checked in exact rational arithmetic against the float-path value
    for params, pf, k in _binom_grid(cfg):
        n = params.n
        ell = bb.ell_binom(params, k)
        c1 = Fraction(k - ell) - (n - ell) * pf
        c2 = (n - ell - 1) * pf - Fraction(k - ell - 1)
        margin = -1.0 if (c1 < 0 or c2 <= 0) else float(min(c1, c2))
        yield margin, (n, str(pf), k, ell)


def _run_binom_regime_constant(cfg: GridConfig) -> Iterator[PointMargin]:
    # p > 1/2 and k >= 10 with n p < k < n p + 1 - p (index l = 0): the lower
    # bound is at least (p/2)(1 - 1/k) >= 0.225
    for params, pf, k in _binom_grid(cfg):
        n = params.n
        if pf <= Fraction(1, 2) or k < 10 or k > n - 1:
            continue
        if not (Fraction(k) < n * pf + 1 - pf):
            continue
        pel = bb.pelekis_lower(params, k)
        p = params.p
        chain = (p / 2.0) * (1.0 - 1.0 / k)
        yield min((pel - chain) / chain, pel - 0.225), (n, str(pf), k)


def _run_binom_sf_oracle(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        exact = oracle.binom_sf_exact(params.n, pf, k)
        rel = _rel_error_exact(binom_sf(params, k).value, exact)
        yield -rel, (params.n, str(pf), k)


def _run_binom_tce_oracle(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, pf, k in _binom_grid(cfg):
        exact = oracle.binom_tce_exact(params.n, pf, k)
        rel = _rel_error_exact(binom_tce(params, k), exact)
        yield -rel, (params.n, str(pf), k)


def _run_binom_tce_tail_identity(cfg: GridConfig) -> Iterator[PointMargin]:
    # P[X_n >= k] E[X_n | X_n >= k] = n p P[X_{n-1} >= k-1], exact rationals
    for n in range(2, cfg.n_max + 1):
        for pf in cfg.p_values:
            for k in range(1, n):
                lhs = oracle.binom_sf_exact(n, pf, k) * oracle.binom_tce_exact(n, pf, k)
                rhs = n * pf * oracle.binom_sf_exact(n - 1, pf, k - 1)
                margin = 0.0 if lhs == rhs else -float(abs(lhs - rhs) / rhs)
                yield margin, (n, str(pf), k)


def _run_binom_tce_recursion(cfg: GridConfig) -> Iterator[PointMargin]:
    for n in range(1, cfg.n_max + 1):
        for pf in cfg.p_values:
            params = BinomialParams(n, float(pf))
            for k in range(1, n + 1):  # k = n exercises the skip path
                check = oracle.verify_tce_recursion(params, k, p_exact=pf)
                point = (n, str(pf), k)
                yield (None if check.skipped else -check.residual), point


def _run_binom_product_identity(cfg: GridConfig) -> Iterator[PointMargin]:
    for n in range(1, cfg.n_max + 1):
        for pf in cfg.p_values:
            params = BinomialParams(n, float(pf))
            ks = sorted({1, 2, n // 2, n - 1, n} & set(range(1, n + 1)))
            for k in ks:
                for ell in sorted({0, (k - 1) // 2, k - 1}):
                    check = oracle.verify_product_identity(params, k, ell, p_exact=pf)
                    yield -check.residual, (n, str(pf), k, ell)


def _run_pois_chernoff(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        point = (str(mu_f), k)
        if not (k > params.mu):
            yield None, point
            continue
        sf = pois_sf(params, k)
        yield _margin_value_below(sf.log_value, pb.chernoff_upper_pois(params, k)), point


def _run_pois_pelekis(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        sf = pois_sf(params, k)
        yield _margin_value_above(sf.log_value, pb.pelekis_lower_pois(params, k)), (
            str(mu_f), k)


def _run_pois_tce_upper(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        upper = pb.tce_upper_pois(params, k)
        yield (upper - pois_tce(params, k)) / upper, (str(mu_f), k)


def _run_pois_tail_ratio(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        ratio = math.exp(
            pois_sf(params, k).log_value - pois_sf(params, k - 1).log_value
        )
        bound = pb.tail_ratio_upper_pois(params, k)
        yield (bound - ratio) / bound, (str(mu_f), k)


def _run_pois_median(cfg: GridConfig) -> Iterator[PointMargin]:
    for mu_f in cfg.mu_values:
        params = PoissonParams(float(mu_f))
        threshold = math.ceil(params.mu - math.log(2.0))
        sf = pois_sf(params, threshold)
        yield sf.value - 0.5, (str(mu_f), threshold)


def _run_pois_regime_constant(cfg: GridConfig) -> Iterator[PointMargin]:
    # mu >= 2 with mu <= k < mu + 1: the lower bound is at least
    # mu / (2 (2 mu + 1)), itself above 1/5
    for mu_f in cfg.mu_values:
        if mu_f < 2:
            continue
        params = PoissonParams(float(mu_f))
        k = math.ceil(mu_f)
        pel = pb.pelekis_lower_pois(params, k)
        chain = params.mu / (2.0 * (2.0 * params.mu + 1.0))
        yield min((pel - chain) / chain, pel - 0.2), (str(mu_f), k)


def _run_pois_sf_oracle(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        hp = oracle.pois_sf_highprec(mu_f, k, _ORACLE_DIGITS)
        with mpmath.workdps(_ORACLE_DIGITS):
            rel = float(abs(mpmath.mpf(pois_sf(params, k).value) - hp.value) / hp.value)
        yield -rel, (str(mu_f), k)


def _run_pois_tce_oracle(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        hp = oracle.pois_tce_highprec(mu_f, k, _ORACLE_DIGITS)
        with mpmath.workdps(_ORACLE_DIGITS):
            rel = float(abs(mpmath.mpf(pois_tce(params, k)) - hp.value) / hp.value)
        yield -rel, (str(mu_f), k)


def _run_pois_tce_tail_identity(cfg: GridConfig) -> Iterator[PointMargin]:
    # P[Y >= k] = mu P[Y >= k-1] / E[Y | Y >= k], with the TCE taken from the
    # direct-summation oracle so the check is not circular
    for params, mu_f, k in _pois_grid(cfg):
        lhs = pois_sf(params, k).value
        tce = oracle.pois_tce_highprec(mu_f, k, _ORACLE_DIGITS).to_float()
        rhs = params.mu * pois_sf(params, k - 1).value / tce
        yield -abs(lhs - rhs) / lhs, (str(mu_f), k)


def _run_pois_tce_recursion(cfg: GridConfig) -> Iterator[PointMargin]:
    for params, mu_f, k in _pois_grid(cfg):
        check = oracle.verify_tce_recursion(params, k, mu_exact=mu_f)
        yield (None if check.skipped else -check.residual), (str(mu_f), k)


def _run_pois_telescope(cfg: GridConfig) -> Iterator[PointMargin]:
    # P[Y >= k] = P[Y >= k - l - 1] prod_{j=0..l} mu / E[Y | Y >= k - j]
    for params, mu_f, k in _pois_grid(cfg):
        ell = pb.ell_pois(params, k)
        log_mu = math.log(params.mu)
        rhs_log = pois_sf(params, k - ell - 1).log_value + math.fsum(
            log_mu - math.log(pois_tce(params, k - j)) for j in range(ell + 1)
        )
        residual = abs(math.expm1(rhs_log - pois_sf(params, k).log_value))
        yield -residual, (str(mu_f), k)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Suite:
    description: str
    tolerance: float
    runner: Callable[[GridConfig], Iterator[PointMargin]]


SUITES: dict[str, _Suite] = {
    "binom-chernoff-upper": _Suite(
        "exact tail below the exponential-moment upper bound", 1e-12, _run_binom_chernoff),
    "binom-factorial-upper": _Suite(
        "exact tail below the factorial-moment upper bound", 1e-12, _run_binom_factorial),
    "binom-factorial-vs-chernoff": _Suite(
        "factorial-moment bound below the exponential-moment bound", 1e-12,
        _run_binom_factorial_vs_chernoff),
    "binom-ash-lower": _Suite(
        "entropy lower bound below the exact tail", 1e-12, _run_binom_ash),
    "binom-pelekis-lower": _Suite(
        "product-form lower bound below the exact tail", 1e-12, _run_binom_pelekis),
    "binom-tce-upper": _Suite(
        "exact TCE below its closed-form upper bound", 1e-12, _run_binom_tce_upper),
    "binom-tail-point": _Suite(
        "exact tail below the single-term upper bound", 1e-12, _run_binom_tail_point),
    "binom-tail-ratio": _Suite(
        "consecutive-tail ratio below p(n-k)/(k(1-p))", 1e-12, _run_binom_tail_ratio),
    "binom-median": _Suite(
        "tail at floor(n p) is at least one half", 1e-12, _run_binom_median),
    "binom-ell-index": _Suite(
        "threshold index satisfies its defining inequalities exactly", 0.0,
        _run_binom_ell_index),
    "binom-regime-constant": _Suite(
        "lower bound at least 0.225 when p > 1/2, k >= 10, index zero", 1e-12,
        _run_binom_regime_constant),
    "binom-sf-oracle": _Suite(
        "float tail matches the exact rational oracle", 1e-12, _run_binom_sf_oracle),
    "binom-tce-oracle": _Suite(
        "identity-path TCE matches the direct-summation rational oracle", 1e-10,
        _run_binom_tce_oracle),
    "binom-tce-tail-identity": _Suite(
        "tail times TCE equals n p times the shifted tail, exactly", 0.0,
        _run_binom_tce_tail_identity),
    "binom-tce-recursion": _Suite(
        "TCE recursion across consecutive thresholds", 1e-10, _run_binom_tce_recursion),
    "binom-product-identity": _Suite(
        "telescoped tail product, including the full tail-to-p^k constant", 1e-10,
        _run_binom_product_identity),
    "pois-chernoff-upper": _Suite(
        "exact Poisson tail below the exponential-moment bound", 1e-12,
        _run_pois_chernoff),
    "pois-pelekis-lower": _Suite(
        "Poisson product-form lower bound below the exact tail", 1e-12,
        _run_pois_pelekis),
    "pois-tce-upper": _Suite(
        "exact Poisson TCE below its closed-form upper bound", 1e-12,
        _run_pois_tce_upper),
    "pois-tail-ratio": _Suite(
        "consecutive Poisson tail ratio below mu/k", 1e-12, _run_pois_tail_ratio),
    "pois-median": _Suite(
        "tail at ceil(mu - ln 2) is at least one half", 1e-12, _run_pois_median),
    "pois-regime-constant": _Suite(
        "lower bound above 1/5 when mu >= 2, index zero", 1e-12,
        _run_pois_regime_constant),
    "pois-sf-oracle": _Suite(
        "float Poisson tail matches the high-precision oracle", 1e-12,
        _run_pois_sf_oracle),
    "pois-tce-oracle": _Suite(
        "identity-path Poisson TCE matches the direct-summation oracle", 1e-10,
        _run_pois_tce_oracle),
    "pois-tce-tail-identity": _Suite(
        "tail equals mu times shifted tail over the oracle TCE", 1e-12,
        _run_pois_tce_tail_identity),
    "pois-tce-recursion": _Suite(
        "Poisson TCE recursion across consecutive thresholds", 1e-10,
        _run_pois_tce_recursion),
    "pois-telescope": _Suite(
        "telescoped Poisson tail product down to the sub-mean tail", 1e-10,
        _run_pois_telescope),
}


def suite_ids() -> tuple[str, ...]:
    return tuple(SUITES)


def _run_suite(sid: str, cfg: GridConfig) -> GridVerdict:
    suite = SUITES[sid]
    tolerance = cfg.tolerances.get(sid, suite.tolerance)
    size = violations = skipped = 0
    worst_margin = math.inf
    worst_point: tuple = ()
    for margin, point in suite.runner(cfg):
        if margin is None:
            skipped += 1
            continue
        size += 1
        if margin < worst_margin:
            worst_margin, worst_point = margin, point
        if margin < -tolerance:
            violations += 1
    if size == 0:
        worst_margin = 0.0
    return GridVerdict(sid, size, violations, worst_margin, worst_point, tolerance, skipped)


def run_grid(config: GridConfig) -> list[GridVerdict]:
    """Evaluate every configured suite; deterministic for a given config."""
    return [_run_suite(sid, config) for sid in config.suites]
