"""Exact binomial/Poisson upper tails and tail conditional expectations,
closed-form bounds on both, and exact-arithmetic certification of every
inequality and identity the bounds rest on."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError
from .exact import (
    BinomialParams,
    PoissonParams,
    Probability,
    binom_pmf,
    binom_sf,
    binom_tce,
    pois_pmf,
    pois_sf,
    pois_tce,
)
from .binomial import (
    BinomBoundSet,
    ash_lower,
    binom_bound_set,
    chernoff_upper,
    ell_binom,
    factorial_moment_upper,
    kl_bernoulli,
    pelekis_lower,
    tail_point_upper,
    tail_ratio_upper,
    tce_upper,
)
from .poisson import (
    PoisBoundSet,
    chernoff_upper_pois,
    ell_pois,
    pelekis_lower_pois,
    pois_bound_set,
    tail_ratio_upper_pois,
    tce_upper_pois,
)
from .oracle import (
    HighPrecReal,
    IdentityCheck,
    binom_pmf_exact,
    binom_sf_exact,
    binom_tce_exact,
    pois_sf_highprec,
    pois_tce_highprec,
    verify_product_identity,
    verify_tce_recursion,
)
from .verification import (
    DEFAULT_CONFIG_TEXT,
    GridConfig,
    GridVerdict,
    default_config,
    parse_grid_config,
    run_grid,
    suite_ids,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DomainError",
    "BinomialParams",
    "PoissonParams",
    "Probability",
    "binom_pmf",
    "binom_sf",
    "binom_tce",
    "pois_pmf",
    "pois_sf",
    "pois_tce",
    "BinomBoundSet",
    "kl_bernoulli",
    "chernoff_upper",
    "factorial_moment_upper",
    "ash_lower",
    "ell_binom",
    "tce_upper",
    "pelekis_lower",
    "tail_ratio_upper",
    "tail_point_upper",
    "binom_bound_set",
    "PoisBoundSet",
    "chernoff_upper_pois",
    "ell_pois",
    "tce_upper_pois",
    "pelekis_lower_pois",
    "tail_ratio_upper_pois",
    "pois_bound_set",
    "HighPrecReal",
    "IdentityCheck",
    "binom_pmf_exact",
    "binom_sf_exact",
    "binom_tce_exact",
    "pois_sf_highprec",
    "pois_tce_highprec",
    "verify_tce_recursion",
    "verify_product_identity",
    "GridConfig",
    "GridVerdict",
    "DEFAULT_CONFIG_TEXT",
    "default_config",
    "parse_grid_config",
    "run_grid",
    "suite_ids",
]
