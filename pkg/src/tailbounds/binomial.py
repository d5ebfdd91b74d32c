"""Closed-form bounds on binomial upper tails and tail conditional expectations.

Upper bounds on P[X >= k] for X ~ Bin(n, p), k > n p:

    chernoff_upper          exp(-n D(k/n || p))
    factorial_moment_upper  p^l C(n,l)/C(k,l),  l = ceil((k - np)/(1 - p))
    tail_point_upper        k(1-p)/(k - np) * P[X = k]

Lower bounds on the same tail:

    ash_lower       chernoff_upper / sqrt(8 k (1 - k/n)),  k < n
    pelekis_lower   (p^(2(l+1))/2) C(n,l+1)/C(k,l+1),  l = floor((k - np)/(1 - p)),
                    k <= n - 1; obtained by telescoping the tail through
                    conditional expectations and bounding each factor

and on the tail ratio and the TCE:

    tail_ratio_upper   P[X >= k+1]/P[X >= k] <= p(n-k)/(k(1-p))
    tce_upper          E[X | X >= k] <= k + (n-k)p/(k - np + p)

Every operation raises :class:`DomainError` outside its stated hypotheses
rather than extrapolating.  Binomial-coefficient ratios are evaluated as
log-space products of (n-j)/(k-j) factors, never as factorial quotients, so
they stay finite for n in the millions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .exact import BinomialParams, binom_pmf, machine_tie_epsilon

__all__ = [
    "BinomBoundSet",
    "kl_bernoulli",
    "chernoff_upper",
    "factorial_moment_upper",
    "ash_lower",
    "ell_binom",
    "ell_binom_pair",
    "tce_upper",
    "pelekis_lower",
    "tail_ratio_upper",
    "tail_point_upper",
    "binom_bound_set",
]

_REL_SLACK = 1e-12


def kl_bernoulli(a: float, p: float) -> float:
    """Kullback-Leibler divergence D(a || p) between Bernoulli(a) and
    Bernoulli(p), with the convention 0 log 0 = 0.

    Requires 0 <= a <= 1 and 0 < p < 1.  Nonnegative, zero iff a = p.
    """
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"kl_bernoulli requires 0 <= a <= 1, got a={a}")
    if not (0.0 < p < 1.0):
        raise DomainError(f"kl_bernoulli requires 0 < p < 1, got p={p}")
    t1 = 0.0 if a == 0.0 else a * (math.log(a) - math.log(p))
    t2 = 0.0 if a == 1.0 else (1.0 - a) * (math.log1p(-a) - math.log1p(-p))
    return max(t1 + t2, 0.0)


def _require_upper_regime(
    params: BinomialParams, k: int, *, k_max: int, allow_boundary: bool = False
) -> None:
    mean = params.n * params.p
    if (k < mean) if allow_boundary else (k <= mean):
        relation = ">=" if allow_boundary else ">"
        raise DomainError(f"bound requires k {relation} n p (k={k}, n p={mean})")
    if k > k_max:
        raise DomainError(f"bound requires k <= {k_max}, got k={k}")


def chernoff_upper(params: BinomialParams, k: int) -> float:
    """Exponential-moment upper bound exp(-n D(k/n || p)), for np < k <= n."""
    _require_upper_regime(params, k, k_max=params.n)
    return math.exp(-params.n * kl_bernoulli(k / params.n, params.p))


def ell_binom_pair(params: BinomialParams, k: int) -> tuple[int, int]:
    """Floor and ceiling variants of the threshold index (k - np)/(1 - p).

    The floor variant is max{j >= 0 : k - j >= (n - j) p}, the largest shift
    that keeps the shifted threshold above the shifted mean; the ceiling
    variant is the matching minimum.  Both are computed from the closed form
    and then corrected through the defining inequality with a slack of a few
    machine epsilons, so exact ties (where the closed form is an integer in
    real arithmetic but not in floats) land on the right value.
    """
    n, p = params.n, params.p
    if k <= n * p:
        raise DomainError(f"ell requires k > n p (k={k}, n p={n * p})")
    if k > n:
        raise DomainError(f"ell requires k <= n, got k={k}")
    eps = machine_tie_epsilon(float(n))

    def holds(j: int) -> bool:
        return (k - j) - (n - j) * p >= -eps

    j = max(math.floor((k - n * p) / (1.0 - p)), 0)
    while holds(j + 1):
        j += 1
    while j > 0 and not holds(j):
        j -= 1
    tie = abs((k - j) - (n - j) * p) <= eps
    return j, (j if tie else j + 1)


def ell_binom(params: BinomialParams, k: int) -> int:
    """max{j >= 0 : k - j >= (n - j) p} = floor((k - np)/(1 - p)) with tie
    correction.  Strictly below k whenever k <= n - 1 (equals n at k = n)."""
    return ell_binom_pair(params, k)[0]


def _log_binom_ratio(n: int, k: int, ell: int) -> float:
    # log( C(n, ell) / C(k, ell) ) as a product of (n-j)/(k-j) factors
    return math.fsum(math.log(n - j) - math.log(k - j) for j in range(ell))


def factorial_moment_upper(params: BinomialParams, k: int) -> float:
    """Factorial-moment upper bound p^l C(n,l)/C(k,l) with l the ceiling
    index; valid for np < k <= n and never larger than chernoff_upper."""
    _require_upper_regime(params, k, k_max=params.n)
    ell = ell_binom_pair(params, k)[1]
    return math.exp(ell * math.log(params.p) + _log_binom_ratio(params.n, k, ell))


def ash_lower(params: BinomialParams, k: int) -> float:
    """Entropy-based lower bound chernoff_upper / sqrt(8 k (1 - k/n)).

    Requires np < k < n: the prefactor is singular at k = n, so that endpoint
    is excluded rather than guessed at.
    """
    _require_upper_regime(params, k, k_max=params.n - 1)
    return chernoff_upper(params, k) / math.sqrt(8.0 * k * (1.0 - k / params.n))


def tce_upper(params: BinomialParams, k: int) -> float:
    """Upper bound k + (n - k) p / (k - np + p) on E[X | X >= k].

    Valid for np <= k <= n; at k = np the bound degenerates to n, which
    still dominates every conditional expectation.
    """
    _require_upper_regime(params, k, k_max=params.n, allow_boundary=True)
    n, p = params.n, params.p
    return k + (n - k) * p / (k - n * p + p)


def pelekis_lower(params: BinomialParams, k: int) -> float:
    """Tail lower bound (p^(2(l+1))/2) C(n,l+1)/C(k,l+1), l the floor index.

    Valid for np < k <= n - 1.  The value is a fixed proportion of the
    factorial-moment upper bound, so the pair brackets the exact tail.
    """
    _require_upper_regime(params, k, k_max=params.n - 1)
    ell = ell_binom_pair(params, k)[0]
    log_val = (
        2.0 * (ell + 1) * math.log(params.p)
        + _log_binom_ratio(params.n, k, ell + 1)
        - math.log(2.0)
    )
    return math.exp(log_val)


def tail_ratio_upper(params: BinomialParams, k: int) -> float:
    """Upper bound p(n - k)/(k(1 - p)) on P[X >= k+1]/P[X >= k].

    Valid for np <= k <= n - 1; at k = np the bound is exactly 1, vacuous
    but still an upper bound on a probability ratio.
    """
    _require_upper_regime(params, k, k_max=params.n - 1, allow_boundary=True)
    n, p = params.n, params.p
    return p * (n - k) / (k * (1.0 - p))


def tail_point_upper(params: BinomialParams, k: int) -> float:
    """Upper bound k(1 - p)/(k - np) * P[X = k] on the tail, np < k <= n."""
    _require_upper_regime(params, k, k_max=params.n)
    n, p = params.n, params.p
    log_prefactor = math.log(k) + math.log1p(-p) - math.log(k - n * p)
    return math.exp(log_prefactor + binom_pmf(params, k).log_value)


@dataclass(frozen=True)
class BinomBoundSet:
    """All binomial bounds for one (n, p, k) query.

    ``ash_lower``, ``pelekis_lower`` and ``tail_ratio_upper`` are None where
    their hypotheses fail (k = n).  Construction checks that every defined
    tail lower bound sits below every defined tail upper bound and that the
    two threshold indices differ by at most one.
    """

    chernoff_upper: float
    factorial_moment_upper: float
    ash_lower: float | None
    pelekis_lower: float | None
    tce_upper: float
    tail_ratio_upper: float | None
    tail_point_upper: float
    ell_floor: int
    ell_ceil: int

    def __post_init__(self) -> None:
        uppers = [self.chernoff_upper, self.factorial_moment_upper]
        lowers = [b for b in (self.ash_lower, self.pelekis_lower) if b is not None]
        for lo in lowers:
            for up in uppers:
                if lo > up * (1.0 + _REL_SLACK):
                    raise ValueError(
                        f"lower bound {lo} exceeds upper bound {up}"
                    )
        if not (0 <= self.ell_floor <= self.ell_ceil <= self.ell_floor + 1):
            raise ValueError(
                f"inconsistent indices: floor={self.ell_floor}, ceil={self.ell_ceil}"
            )


def binom_bound_set(params: BinomialParams, k: int) -> BinomBoundSet:
    """Evaluate every bound at once; requires np < k <= n."""
    _require_upper_regime(params, k, k_max=params.n)
    ell_floor, ell_ceil = ell_binom_pair(params, k)
    at_top = k >= params.n
    return BinomBoundSet(
        chernoff_upper=chernoff_upper(params, k),
        factorial_moment_upper=factorial_moment_upper(params, k),
        ash_lower=None if at_top else ash_lower(params, k),
        pelekis_lower=None if at_top else pelekis_lower(params, k),
        tce_upper=tce_upper(params, k),
        tail_ratio_upper=None if at_top else tail_ratio_upper(params, k),
        tail_point_upper=tail_point_upper(params, k),
        ell_floor=ell_floor,
        ell_ceil=ell_ceil,
    )
