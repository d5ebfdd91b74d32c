"""Closed-form bounds on Poisson upper tails and tail conditional expectations.

For Y ~ Poi(mu) and integer k >= mu:

    chernoff_upper_pois   exp(-mu) (e mu)^k / k^k          (k > mu)
    tce_upper_pois        E[Y | Y >= k] <= k + mu/(k+1-mu)
    pelekis_lower_pois    P[Y >= k] >= (1/2) (mu/(k+mu))^(l+1),  l = floor(k - mu)
    tail_ratio_upper_pois P[Y >= k]/P[Y >= k-1] <= mu/k    (k >= 1)

The Chernoff factor is exp(-mu), the standard exponential-moment form; see
the grid suites for the certification that it dominates the exact tail.
The threshold index l = floor(k - mu) accepts l = 0 (the regime
mu <= k < mu + 1) and carries the same tie correction as the binomial one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .exact import PoissonParams, machine_tie_epsilon

__all__ = [
    "PoisBoundSet",
    "chernoff_upper_pois",
    "chernoff_upper_pois_plus_mu",
    "ell_pois",
    "tce_upper_pois",
    "pelekis_lower_pois",
    "tail_ratio_upper_pois",
    "pois_bound_set",
]


def _require_at_least_mean(params: PoissonParams, k: int) -> None:
    if k < params.mu:
        raise DomainError(f"bound requires k >= mu (k={k}, mu={params.mu})")
    if k < 1:
        raise DomainError(f"bound requires k >= 1, got k={k}")


def chernoff_upper_pois(params: PoissonParams, k: int) -> float:
    """exp(-mu + k + k log(mu/k)); requires k > mu and k >= 1."""
    if k <= params.mu or k < 1:
        raise DomainError(
            f"chernoff_upper_pois requires k > mu and k >= 1 (k={k}, mu={params.mu})"
        )
    mu = params.mu
    return math.exp(-mu + k + k * math.log(mu / k))


def chernoff_upper_pois_plus_mu(params: PoissonParams, k: int) -> float:
    """Variant with a leading exp(+mu) factor, i.e. exp(mu + k + k log(mu/k)).

    Exceeds 1 near k ~ mu and is weaker than the trivial bound; kept only so
    output can be cross-checked against sources that state this form.  Same
    domain as :func:`chernoff_upper_pois`.
    """
    return math.exp(2.0 * params.mu) * chernoff_upper_pois(params, k)


def ell_pois(params: PoissonParams, k: int) -> int:
    """max{j >= 0 : k - j >= mu} = floor(k - mu), with tie correction; k >= mu."""
    mu = params.mu
    if k < mu:
        raise DomainError(f"ell_pois requires k >= mu (k={k}, mu={mu})")
    eps = machine_tie_epsilon(max(mu, float(k)))

    def holds(j: int) -> bool:
        return (k - j) - mu >= -eps

    j = max(math.floor(k - mu), 0)
    while holds(j + 1):
        j += 1
    while j > 0 and not holds(j):
        j -= 1
    return j


def tce_upper_pois(params: PoissonParams, k: int) -> float:
    """Upper bound k + mu/(k + 1 - mu) on E[Y | Y >= k]; k >= mu, k >= 1."""
    _require_at_least_mean(params, k)
    return k + params.mu / (k + 1.0 - params.mu)


def pelekis_lower_pois(params: PoissonParams, k: int) -> float:
    """Tail lower bound (1/2) (mu/(k + mu))^(l+1), l = floor(k - mu).

    Lies in (0, 1/2]; requires k >= mu and k >= 1.
    """
    _require_at_least_mean(params, k)
    mu = params.mu
    ell = ell_pois(params, k)
    return 0.5 * (mu / (k + mu)) ** (ell + 1)


def tail_ratio_upper_pois(params: PoissonParams, k: int) -> float:
    """Upper bound mu/k on P[Y >= k]/P[Y >= k-1]; requires k >= 1."""
    if k < 1:
        raise DomainError(f"tail_ratio_upper_pois requires k >= 1, got k={k}")
    return params.mu / k


@dataclass(frozen=True)
class PoisBoundSet:
    """All Poisson bounds for one (mu, k) query; chernoff is None at k = mu."""

    chernoff_upper: float | None
    tce_upper: float
    pelekis_lower: float
    tail_ratio_upper: float
    ell: int

    def __post_init__(self) -> None:
        if not (0.0 < self.pelekis_lower <= 0.5):
            raise ValueError(f"pelekis_lower out of (0, 1/2]: {self.pelekis_lower}")
        if self.chernoff_upper is not None and self.pelekis_lower > self.chernoff_upper:
            raise ValueError(
                f"lower bound {self.pelekis_lower} exceeds upper {self.chernoff_upper}"
            )


def pois_bound_set(params: PoissonParams, k: int) -> PoisBoundSet:
    """Evaluate every bound at once; requires k >= mu and k >= 1."""
    _require_at_least_mean(params, k)
    return PoisBoundSet(
        chernoff_upper=chernoff_upper_pois(params, k) if k > params.mu else None,
        tce_upper=tce_upper_pois(params, k),
        pelekis_lower=pelekis_lower_pois(params, k),
        tail_ratio_upper=tail_ratio_upper_pois(params, k),
        ell=ell_pois(params, k),
    )
