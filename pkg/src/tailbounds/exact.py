"""Exact upper tails and tail conditional expectations for Bin(n, p) and Poi(mu).

All evaluation is scalar, pure, and log-space:

* binomial pmf terms come from log-gamma, Poisson terms from a
  cancellation-free Stirling form (plain log-gamma loses too much absolute
  accuracy in the exponent once k is in the thousands);
* tails are sums of positive pmf terms accumulated from the far tail inward
  (smallest terms first), never complements, so relative error stays near
  machine level even for astronomically small tails and the telescoping
  sf(k) = pmf(k) + sf(k+1) holds to the last rounding;
* tail conditional expectations are evaluated through the tail identities

      E[X | X >= k] * P[X >= k] = n p P[X' >= k - 1]   (X' one trial fewer)
      E[Y | Y >= k] * P[Y >= k] = mu P[Y >= k - 1]

  so a TCE costs two survival-function evaluations.

Every function here is a pure function of its arguments and safe to call
from any number of threads.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "BinomialParams",
    "PoissonParams",
    "Probability",
    "binom_pmf",
    "binom_sf",
    "binom_tce",
    "pois_pmf",
    "pois_sf",
    "pois_tce",
]

_NEG_INF = float("-inf")

# Relative size below which a certified series remainder is dropped.
_TRUNCATION_REL = 1e-18

# Above this k the Poisson log-pmf switches from raw lgamma to the Stirling
# form; the correction series below is accurate past ~1e-19 for k >= 30.
_STIRLING_MIN_K = 30


@dataclass(frozen=True)
class BinomialParams:
    """Parameters of a binomial distribution: ``n`` trials, success prob ``p``.

    ``p`` must lie strictly inside (0, 1); the degenerate endpoints would
    make every bound's hypotheses unsatisfiable, so they are rejected here.
    """

    n: int
    p: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        p = float(self.p)
        if not (0.0 < p < 1.0) or math.isnan(p):
            raise DomainError(f"p must lie strictly inside (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def mean(self) -> float:
        return self.n * self.p


@dataclass(frozen=True)
class PoissonParams:
    """Parameters of a Poisson distribution with mean ``mu`` > 0."""

    mu: float

    def __post_init__(self) -> None:
        mu = float(self.mu)
        if not (mu > 0.0) or math.isinf(mu):
            raise DomainError(f"mu must be a strictly positive real, got {self.mu!r}")
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class Probability:
    """A probability carried jointly on the linear and natural-log scales.

    ``value == exp(log_value)`` up to one rounding; ``value`` may underflow to
    0.0 for extreme tails while ``log_value`` stays finite, which is why both
    are kept.
    """

    value: float
    log_value: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"probability value out of range: {self.value!r}")
        if self.log_value > 0.0:
            raise ValueError(f"log probability above 0: {self.log_value!r}")
        expected = math.exp(self.log_value)
        if not math.isclose(expected, self.value, rel_tol=1e-12, abs_tol=5e-324):
            raise ValueError(
                f"inconsistent scales: value={self.value!r}, exp(log)={expected!r}"
            )

    @classmethod
    def from_log(cls, log_value: float) -> "Probability":
        log_value = min(log_value, 0.0)
        return cls(math.exp(log_value), log_value)

    @classmethod
    def one(cls) -> "Probability":
        return cls(1.0, 0.0)

    @classmethod
    def zero(cls) -> "Probability":
        return cls(0.0, _NEG_INF)


@lru_cache(maxsize=2048)
def _log_factorials(n: int) -> tuple[float, ...]:
    # lf[i] = log(i!)
    return tuple(math.lgamma(i + 1) for i in range(n + 1))


@lru_cache(maxsize=8192)
def _binom_log_pmf_table(n: int, p: float) -> tuple[float, ...]:
    lf = _log_factorials(n)
    lp = math.log(p)
    lq = math.log1p(-p)
    return tuple(
        lf[n] - lf[k] - lf[n - k] + k * lp + (n - k) * lq for k in range(n + 1)
    )


def _logsumexp(terms) -> float:
    terms = list(terms)
    if not terms:
        return _NEG_INF
    m = max(terms)
    if m == _NEG_INF:
        return _NEG_INF
    return m + math.log(math.fsum(math.exp(t - m) for t in terms))


@lru_cache(maxsize=8192)
def _binom_sf_table(n: int, p: float) -> tuple[float, ...]:
    # sf[k] = P[X >= k] by suffix accumulation of pmf terms, far tail first
    logs = _binom_log_pmf_table(n, p)
    sf = [0.0] * (n + 2)
    acc = 0.0
    for k in range(n, -1, -1):
        acc += math.exp(logs[k])
        sf[k] = min(acc, 1.0)
    return tuple(sf)


def binom_pmf(params: BinomialParams, k: int) -> Probability:
    """P[X = k] for X ~ Bin(n, p); exact 0 outside the support."""
    if k < 0 or k > params.n:
        return Probability.zero()
    lf = _log_factorials(params.n)
    log_p = (
        lf[params.n]
        - lf[k]
        - lf[params.n - k]
        + k * math.log(params.p)
        + (params.n - k) * math.log1p(-params.p)
    )
    return Probability.from_log(log_p)


def binom_sf(params: BinomialParams, k: int) -> Probability:
    """P[X >= k] for X ~ Bin(n, p).

    The tail is a sum of positive pmf terms taken from the far tail inward,
    so there is no cancellation anywhere: tiny tails keep full relative
    precision and the tail is nonincreasing in k by construction.
    """
    n, p = params.n, params.p
    if k <= 0:
        return Probability.one()
    if k > n:
        return Probability.zero()
    value = _binom_sf_table(n, p)[k]
    if value > 0.0:
        return Probability(value, math.log(value))
    # the linear-scale sum underflowed; recover the exponent from log space
    return Probability.from_log(_logsumexp(_binom_log_pmf_table(n, p)[k:]))


def binom_tce(params: BinomialParams, k: int) -> float:
    """E[X | X >= k] for X ~ Bin(n, p), valid for 1 <= k <= n.

    Evaluated through the identity E[X | X >= k] P[X >= k] = n p P[X' >= k-1]
    with X' ~ Bin(n-1, p); the result always lies in [k, n].
    """
    n, p = params.n, params.p
    if k < 1 or k > n:
        raise DomainError(f"binom_tce requires 1 <= k <= n, got k={k}, n={n}")
    if n == 1:
        # conditioning on the single success
        return 1.0
    log_sf_shifted = binom_sf(BinomialParams(n - 1, p), k - 1).log_value
    log_sf = binom_sf(params, k).log_value
    t = math.exp(math.log(n * p) + log_sf_shifted - log_sf)
    return min(max(t, float(k)), float(n))


def _log1pmx(d: float) -> float:
    """log(1+d) - d, stable near d = 0."""
    if abs(d) >= 0.25:
        return math.log1p(d) - d
    # alternating series -d^2/2 + d^3/3 - ...
    acc = 0.0
    term = -d * d
    m = 2
    while True:
        contrib = term / m
        acc += contrib
        if abs(contrib) < 1e-20 * max(abs(acc), 1e-300):
            return acc
        term *= -d
        m += 1


def _stirling_corr(k: int) -> float:
    # log k! - (k log k - k + 0.5 log(2 pi k)), series in 1/k, k >= 30
    ik = 1.0 / k
    ik2 = ik * ik
    return ik * (
        1.0 / 12.0
        + ik2 * (-1.0 / 360.0 + ik2 * (1.0 / 1260.0 + ik2 * (-1.0 / 1680.0 + ik2 / 1188.0)))
    )


def _pois_log_pmf(mu: float, k: int) -> float:
    if k < 0:
        return _NEG_INF
    if k < _STIRLING_MIN_K:
        return -mu + k * math.log(mu) - math.lgamma(k + 1)
    d = (mu - k) / k
    if abs(d) <= 0.5:
        # near the mode k log(mu/k) + (k - mu) cancels; regroup around
        # log1p(d) - d, whose conditioning stays harmless for |d| <= 1/2
        a = k * _log1pmx(d) + (k * d - (mu - k))
    else:
        # far from the mode there is no cancellation, and log1p would
        # amplify the rounding of d by k/mu; plain log is accurate here
        a = k * math.log(mu / k) + (k - mu)
    return a - 0.5 * math.log(2.0 * math.pi * k) - _stirling_corr(k)


@lru_cache(maxsize=64)
def _pois_pmf_window(mu: float) -> tuple[int, tuple[float, ...]]:
    """pmf values on a window around the mode, grown from one log-space
    anchor by the ratio chain t_{i+1} = t_i mu/(i+1).

    Adjacent entries then differ by a single rounded multiplication, so
    ratio identities between neighbouring pmf values hold to a few machine
    epsilons instead of drifting with the magnitude of the log.
    """
    anchor = math.floor(mu)
    span = int(30.0 * math.sqrt(mu)) + 60
    lo, hi = max(0, anchor - span), anchor + span
    vals = [0.0] * (hi - lo + 1)
    t = math.exp(_pois_log_pmf(mu, anchor))
    vals[anchor - lo] = t
    u = t
    for i in range(anchor, hi):
        u *= mu / (i + 1)
        vals[i + 1 - lo] = u
    v = t
    for i in range(anchor, lo, -1):
        v *= i / mu
        vals[i - 1 - lo] = v
    return lo, tuple(vals)


def pois_pmf(params: PoissonParams, k: int) -> Probability:
    """P[Y = k] for Y ~ Poi(mu); exact 0 for k < 0."""
    if k < 0:
        return Probability.zero()
    lo, vals = _pois_pmf_window(params.mu)
    if lo <= k < lo + len(vals):
        value = vals[k - lo]
        if value > 0.0:
            return Probability(value, min(math.log(value), 0.0))
    return Probability.from_log(_pois_log_pmf(params.mu, k))


def pois_sf(params: PoissonParams, k: int) -> Probability:
    """P[Y >= k] for Y ~ Poi(mu); equals 1 for k <= 0.

    The tail is summed outward from the mode region, scaled by the largest
    term so nothing underflows, and truncated only once the certified
    geometric remainder (term ratio mu/(i+1) < 1 past the mode) falls below
    1e-18 of the accumulated sum.
    """
    mu = params.mu
    if k <= 0:
        return Probability.one()
    anchor = max(k, math.floor(mu))
    log_anchor = _pois_log_pmf(mu, anchor)
    terms = [1.0]
    # upward walk: ratio mu/(i+1) < 1 for every i >= floor(mu)
    running = 1.0
    u = 1.0
    i = anchor
    while True:
        u *= mu / (i + 1)
        i += 1
        terms.append(u)
        running += u
        remainder = u * (mu / (i + 1)) / (1.0 - mu / (i + 2))
        if remainder < _TRUNCATION_REL * running:
            break
    # downward walk back to k (terms below the mode decay geometrically)
    v = 1.0
    j = anchor
    while j > k:
        v *= j / mu
        j -= 1
        terms.append(v)
        running += v
        if j < mu:
            q = j / mu
            if v * q / (1.0 - q) < _TRUNCATION_REL * running:
                break
    log_sf = log_anchor + math.log(math.fsum(terms))
    return Probability.from_log(log_sf)


def pois_tce(params: PoissonParams, k: int) -> float:
    """E[Y | Y >= k] for Y ~ Poi(mu), valid for k >= 1.

    Evaluated through E[Y | Y >= k] P[Y >= k] = mu P[Y >= k - 1]; the result
    is always >= k.
    """
    if k < 1:
        raise DomainError(f"pois_tce requires k >= 1, got k={k}")
    mu = params.mu
    log_num = math.log(mu) + pois_sf(params, k - 1).log_value
    t = math.exp(log_num - pois_sf(params, k).log_value)
    return max(t, float(k))


def machine_tie_epsilon(scale: float) -> float:
    """Comparison slack used to restore exact set-maximum definitions of the
    threshold indices when a tie like k - j = (n - j) p is hit in floats."""
    return 4.0 * sys.float_info.epsilon * max(scale, 1.0)
