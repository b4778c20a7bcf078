"""Horseshoe prior for the sparse normal means problem."""

from ._horseshoe import (
    AccuracyError,
    __version__,
    eb_fit,
    expected_m_tau_null,
    hb_fit,
    kappa,
    log_marginal_density,
    log_marginal_likelihood,
    m_tau,
    mmle,
    posterior_cumulant4,
    posterior_interval,
    posterior_mean,
    posterior_variance,
    prior_density,
    score,
    simple_estimator,
    tau_n,
    zeta,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
