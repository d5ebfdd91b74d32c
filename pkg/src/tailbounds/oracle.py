"""Independent exact-arithmetic and high-precision oracles.

Nothing in this module shares a code path with :mod:`tailbounds.exact`: the
binomial side works in arbitrary-precision rationals (integer tail weights
C(n,i) a^i (b-a)^(n-i) over b^n for p = a/b, summed exactly), and the
Poisson side works in mpmath floats at 50+ decimal digits with a certified
geometric remainder at the truncation point.  These are the referees the
fast floating-point paths and every tail identity are judged against.

Decimal probabilities must be converted to :class:`fractions.Fraction`
through exact text parsing (``Fraction("0.3") == 3/10``), never through a
binary float, so the ground truth is not contaminated by float parsing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import DomainError
from .exact import BinomialParams, PoissonParams

__all__ = [
    "HighPrecReal",
    "IdentityCheck",
    "binom_pmf_exact",
    "binom_sf_exact",
    "binom_tce_exact",
    "pois_sf_highprec",
    "pois_tce_highprec",
    "verify_tce_recursion",
    "verify_product_identity",
]

# Exact-arithmetic budget: beyond this the combinatorial blowup stops paying
# for itself; the float path is the product, the oracle certifies it at desk
# scale.
MAX_EXACT_N = 500

DEFAULT_DIGITS = 50
_IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class HighPrecReal:
    """A value computed at extended precision with a certified absolute
    error bound (truncation remainder plus rounding allowance)."""

    value: mpmath.mpf
    abs_error: mpmath.mpf

    def __post_init__(self) -> None:
        if self.abs_error < 0:
            raise ValueError("error bound must be nonnegative")

    def to_float(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class IdentityCheck:
    """One grid entry of an identity verification: the point, the relative
    residual between the two sides, and whether the point was skipped
    because the identity's preconditions fail there."""

    check_id: str
    point: tuple
    residual: float | None
    passed: bool
    skipped: bool = False


def _validate_rational_p(p: Fraction) -> Fraction:
    p = Fraction(p)
    if not (0 < p < 1):
        raise DomainError(f"p must be a rational strictly inside (0, 1), got {p}")
    return p


@lru_cache(maxsize=8192)
def _binom_suffix_sums(
    n: int, p: Fraction
) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Suffix sums of integer tail weights for Bin(n, a/b).

    Returns (S0, S1, b^n) with S0[k] = sum_{i>=k} C(n,i) a^i (b-a)^(n-i) and
    S1[k] the same sum weighted by i.
    """
    a, b = p.numerator, p.denominator
    c = b - a
    w = [math.comb(n, i) * a**i * c ** (n - i) for i in range(n + 1)]
    s0 = [0] * (n + 2)
    s1 = [0] * (n + 2)
    for i in range(n, -1, -1):
        s0[i] = s0[i + 1] + w[i]
        s1[i] = s1[i + 1] + i * w[i]
    return tuple(s0), tuple(s1), b**n


def _check_exact_budget(n: int) -> None:
    if not (1 <= n <= MAX_EXACT_N):
        raise DomainError(f"exact oracle requires 1 <= n <= {MAX_EXACT_N}, got {n}")


def binom_pmf_exact(n: int, p: Fraction, k: int) -> Fraction:
    """Exact P[Bin(n, p) = k] for rational p."""
    _check_exact_budget(n)
    p = _validate_rational_p(p)
    if k < 0 or k > n:
        return Fraction(0)
    s0, _, bn = _binom_suffix_sums(n, p)
    return Fraction(s0[k] - s0[k + 1], bn)


def binom_sf_exact(n: int, p: Fraction, k: int) -> Fraction:
    """Exact P[Bin(n, p) >= k] for rational p, 0 <= k <= n."""
    _check_exact_budget(n)
    p = _validate_rational_p(p)
    if not (0 <= k <= n):
        raise DomainError(f"binom_sf_exact requires 0 <= k <= n, got k={k}")
    s0, _, bn = _binom_suffix_sums(n, p)
    return Fraction(s0[k], bn)


def binom_tce_exact(n: int, p: Fraction, k: int) -> Fraction:
    """Exact E[X | X >= k] for X ~ Bin(n, p), by direct summation."""
    _check_exact_budget(n)
    p = _validate_rational_p(p)
    if not (1 <= k <= n):
        raise DomainError(f"binom_tce_exact requires 1 <= k <= n, got k={k}")
    s0, s1, _ = _binom_suffix_sums(n, p)
    return Fraction(s1[k], s0[k])


def _sf_exact_any(n: int, p: Fraction, k: int) -> Fraction:
    # extension used by identity verifiers: n = 0 and out-of-range k allowed
    if k <= 0:
        return Fraction(1)
    if n <= 0 or k > n:
        return Fraction(0)
    s0, _, bn = _binom_suffix_sums(n, p)
    return Fraction(s0[k], bn)


def _tce_exact_any(n: int, p: Fraction, k: int) -> Fraction:
    s0, s1, _ = _binom_suffix_sums(n, p)
    return Fraction(s1[k], s0[k])


# ---------------------------------------------------------------------------
# Poisson high-precision oracle
# ---------------------------------------------------------------------------


def _as_fraction(x) -> Fraction:
    # Fraction(float) is the exact binary value; strings parse as decimals.
    return x if isinstance(x, Fraction) else Fraction(str(x) if isinstance(x, str) else x)


@lru_cache(maxsize=128)
def _pois_terms(mu: Fraction, digits: int):
    """pmf terms t_0..t_N of Poi(mu) at digits+15 working precision, with a
    certified geometric bound on the dropped remainder past N."""
    with mpmath.workdps(digits + 15):
        mu_mp = mpmath.mpf(mu.numerator) / mu.denominator
        target = mpmath.mpf(10) ** (-(digits + 10))
        terms = [mpmath.e ** (-mu_mp)]
        total = terms[0]
        i = 0
        while True:
            t = terms[-1] * mu_mp / (i + 1)
            terms.append(t)
            total += t
            i += 1
            if i + 1 > mu_mp:
                ratio = mu_mp / (i + 1)
                remainder = t * ratio / (1 - mu_mp / (i + 2))
                if remainder < target * total:
                    break
        # suffix sums: sf[k] = sum_{i>=k} t_i, s1[k] = sum_{i>=k} i t_i
        m = len(terms)
        sf = [mpmath.mpf(0)] * (m + 1)
        s1 = [mpmath.mpf(0)] * (m + 1)
        for j in range(m - 1, -1, -1):
            sf[j] = sf[j + 1] + terms[j]
            s1[j] = s1[j + 1] + j * terms[j]
        err0 = remainder
        err1 = remainder * 2 * (m + 2)
        return tuple(terms), tuple(sf), tuple(s1), err0, err1


def pois_sf_highprec(mu, k: int, digits: int = DEFAULT_DIGITS) -> HighPrecReal:
    """P[Poi(mu) >= k] at ``digits`` decimal digits, absolute error certified
    well below 10**(5 - digits)."""
    if not (20 <= digits <= 200):
        raise DomainError(f"digits must lie in [20, 200], got {digits}")
    mu = _as_fraction(mu)
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}")
    if k < 0:
        raise DomainError(f"pois_sf_highprec requires k >= 0, got k={k}")
    with mpmath.workdps(digits + 15):
        if k == 0:
            return HighPrecReal(mpmath.mpf(1), mpmath.mpf(0))
        terms, sf, _, err0, _ = _pois_terms(mu, digits)
        if k < len(terms):
            return HighPrecReal(sf[k], err0 + len(terms) * mpmath.mpf(10) ** (-(digits + 13)))
        # past the precomputed cutoff: sum directly from k with the same bound
        mu_mp = mpmath.mpf(mu.numerator) / mu.denominator
        t = mpmath.e ** (-mu_mp) * mu_mp**k / mpmath.factorial(k)
        total = t
        i = k
        while True:
            t = t * mu_mp / (i + 1)
            total += t
            i += 1
            remainder = t * (mu_mp / (i + 1)) / (1 - mu_mp / (i + 2))
            if remainder < mpmath.mpf(10) ** (-(digits + 10)) * total:
                break
        return HighPrecReal(total, remainder + (i - k) * mpmath.mpf(10) ** (-(digits + 13)))


def pois_tce_highprec(mu, k: int, digits: int = DEFAULT_DIGITS) -> HighPrecReal:
    """E[Poi(mu) | Poi(mu) >= k] by direct high-precision summation of
    sum i P[Y = i] over the tail (independent of the tail-ratio identity)."""
    if not (20 <= digits <= 200):
        raise DomainError(f"digits must lie in [20, 200], got {digits}")
    mu = _as_fraction(mu)
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}")
    if k < 1:
        raise DomainError(f"pois_tce_highprec requires k >= 1, got k={k}")
    with mpmath.workdps(digits + 15):
        terms, sf, s1, err0, err1 = _pois_terms(mu, digits)
        if k >= len(terms):
            raise DomainError(
                f"k={k} is beyond the tabulated support for mu={float(mu)}"
            )
        value = s1[k] / sf[k]
        rel_err = err0 / sf[k] + err1 / s1[k]
        return HighPrecReal(value, value * rel_err + mpmath.mpf(10) ** (-(digits + 8)))


# ---------------------------------------------------------------------------
# Identity verifiers
# ---------------------------------------------------------------------------


def _rel_residual_fraction(lhs: Fraction, rhs: Fraction) -> float:
    if lhs == rhs:
        return 0.0
    scale = max(abs(lhs), abs(rhs))
    return float(abs(lhs - rhs) / scale)


def verify_tce_recursion(
    dist: BinomialParams | PoissonParams,
    k: int,
    *,
    p_exact: Fraction | None = None,
    mu_exact: Fraction | None = None,
    digits: int = DEFAULT_DIGITS,
    tol: float = _IDENTITY_TOL,
) -> IdentityCheck:
    """Check the tail-conditional-expectation recursion

        E[X | X >= k] = k P[X=k]/P[X>=k] + E[X | X >= k+1] (1 - P[X=k]/P[X>=k])

    at one point, in exact rationals (binomial) or high precision (Poisson).
    Points where P[X >= k] or P[X >= k+1] vanish are reported as skipped.
    """
    if isinstance(dist, BinomialParams):
        n = dist.n
        point = ("binom", n, dist.p, k)
        if k < 1 or k > n - 1:
            return IdentityCheck("tce-recursion", point, None, True, skipped=True)
        p = _validate_rational_p(p_exact if p_exact is not None else Fraction(dist.p))
        sf_k = binom_sf_exact(n, p, k)
        pmf_k = binom_pmf_exact(n, p, k)
        ratio = pmf_k / sf_k
        lhs = binom_tce_exact(n, p, k)
        rhs = k * ratio + binom_tce_exact(n, p, k + 1) * (1 - ratio)
        residual = _rel_residual_fraction(lhs, rhs)
        return IdentityCheck("tce-recursion", point, residual, residual <= tol)

    mu = _as_fraction(mu_exact if mu_exact is not None else dist.mu)
    point = ("pois", float(mu), k)
    if k < 1:
        return IdentityCheck("tce-recursion", point, None, True, skipped=True)
    with mpmath.workdps(digits + 15):
        terms, sf, s1, _, _ = _pois_terms(mu, digits)
        if k + 1 >= len(terms):
            return IdentityCheck("tce-recursion", point, None, True, skipped=True)
        ratio = terms[k] / sf[k]
        lhs = s1[k] / sf[k]
        rhs = k * ratio + (s1[k + 1] / sf[k + 1]) * (1 - ratio)
        residual = float(abs(lhs - rhs) / lhs)
    return IdentityCheck("tce-recursion", point, residual, residual <= tol)


def verify_product_identity(
    params: BinomialParams,
    k: int,
    ell: int,
    *,
    p_exact: Fraction | None = None,
    tol: float = _IDENTITY_TOL,
) -> IdentityCheck:
    """Check the telescoped tail representation

        P[X_n >= k] = P[X_{n-(l+1)} >= k-(l+1)]
                      * prod_{j=0..l} p (n-j) / E[X_{n-j} | X_{n-j} >= k-j]

    in exact rational arithmetic, for 0 <= l <= k-1 <= n-1.  At l = k-1 the
    same product certifies the tail-to-p^k constant:
    P[X_n >= k] / p^k = prod_{j=0..k-1} (n-j) / E[X_{n-j} | X_{n-j} >= k-j].
    """
    n = params.n
    if not (0 <= ell <= k - 1 <= n - 1):
        raise DomainError(
            f"verify_product_identity requires 0 <= ell <= k-1 <= n-1, "
            f"got n={n}, k={k}, ell={ell}"
        )
    p = _validate_rational_p(p_exact if p_exact is not None else Fraction(params.p))
    point = (n, float(p), k, ell)
    lhs = binom_sf_exact(n, p, k)
    product = Fraction(1)
    for j in range(ell + 1):
        product *= p * (n - j) / _tce_exact_any(n - j, p, k - j)
    rhs = _sf_exact_any(n - (ell + 1), p, k - (ell + 1)) * product
    residual = _rel_residual_fraction(lhs, rhs)
    if ell == k - 1:
        constant = Fraction(1)
        for j in range(k):
            constant *= (n - j) / _tce_exact_any(n - j, p, k - j)
        residual = max(residual, _rel_residual_fraction(lhs / p**k, constant))
    return IdentityCheck("product-identity", point, residual, residual <= tol)
