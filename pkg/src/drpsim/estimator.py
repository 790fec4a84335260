"""Iterative linear regression of aggregate response on price.

Each slot the operator observes one pair (lambda_s, Z_s) where

    Z_s = N*gamma1*lambda_s + gamma2 + noise

so the unknown aggregates are the slope and intercept of an ordinary
linear model with regressor u_s = N*lambda_s. The state keeps the full
history for audit plus the 2x2 normal-equation sufficient statistics,
updated in O(1) per observation:

    X'X = [[sum u^2, sum u], [sum u, m]]      X'Z = [sum u*Z, sum Z]

estimate() solves (X'X + ridge*I) theta = X'Z in closed form. With
ridge = 0 this is plain least squares and needs two distinct prices;
with ridge > 0 it is well-defined from zero data and shrinks toward the
prior mean (0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "EstimatorError",
    "InsufficientDataError",
    "UnidentifiableError",
    "EstimatorState",
    "GammaEstimate",
    "init",
    "update",
    "estimate",
]

#: condition numbers beyond this are treated as rank deficiency
COND_LIMIT = 1e12


class EstimatorError(RuntimeError):
    """Base class for estimation failures the caller may recover from."""


class InsufficientDataError(EstimatorError):
    """No data and no regularization: the normal equations are empty."""


class UnidentifiableError(EstimatorError):
    """Normal matrix numerically singular (not enough price variation)."""


@dataclass
class EstimatorState:
    """History and sufficient statistics of the price-response regression.

    Attributes:
        ridge_param: l2 penalty weight, >= 0.
        n_scale: N used to form the regressor u = N*lambda.
        history: observed (lambda_s, Z_s) pairs in arrival order.
    """

    ridge_param: float
    n_scale: int = 1
    history: list[tuple[float, float]] = field(default_factory=list)
    suu: float = 0.0
    su: float = 0.0
    sz: float = 0.0
    suz: float = 0.0

    @property
    def n_samples(self) -> int:
        return len(self.history)


@dataclass(frozen=True)
class GammaEstimate:
    """Point estimate of (gamma1, gamma2) with its scaled covariance.

    covariance is (X'X + ridge*I)^{-1} * residual_var, a symmetric PSD
    2x2 array; gamma2_hat estimates the intercept -sum_i alpha_i/beta_i.
    """

    gamma1_hat: float
    gamma2_hat: float
    covariance: NDArray[np.float64]


def init(ridge_param: float, n_scale: int = 1) -> EstimatorState:
    """Fresh estimator with empty history.

    Args:
        ridge_param: regularization weight, >= 0. With a positive weight
            the zero-data estimate is the prior mean (0, 0); with 0 the
            estimator refuses to produce estimates until the data
            identify the line.
        n_scale: population size N entering the regressor N*lambda.
    """
    if not np.isfinite(ridge_param) or ridge_param < 0:
        raise ValueError(f"ridge_param must be finite and >= 0, got {ridge_param}")
    if n_scale < 1:
        raise ValueError(f"n_scale must be >= 1, got {n_scale}")
    return EstimatorState(ridge_param=float(ridge_param), n_scale=int(n_scale))


def update(state: EstimatorState, lambda_t: float, z_t: float) -> EstimatorState:
    """Absorb one observation (price, aggregate response) in O(1).

    Mutates and returns the same state object.
    """
    lambda_t = float(lambda_t)
    z_t = float(z_t)
    if not (np.isfinite(lambda_t) and np.isfinite(z_t)):
        raise ValueError(f"observation must be finite, got ({lambda_t}, {z_t})")
    u = state.n_scale * lambda_t
    state.history.append((lambda_t, z_t))
    state.suu += u * u
    state.su += u
    state.sz += z_t
    state.suz += u * z_t
    return state


def estimate(state: EstimatorState, residual_var: float = 1.0) -> GammaEstimate:
    """Ridge/OLS solve of the accumulated normal equations.

    Args:
        state: estimator state.
        residual_var: variance of the regression residual, used only to
            scale the covariance. For aggregate observations this is
            N*noise_sd^2.

    Returns:
        GammaEstimate with covariance (X'X + ridge*I)^{-1} * residual_var.

    Raises:
        InsufficientDataError: no samples and ridge_param == 0.
        UnidentifiableError: condition number of the regularized normal
            matrix exceeds COND_LIMIT (prices carry too little variation).
    """
    if residual_var < 0:
        raise ValueError(f"residual_var must be >= 0, got {residual_var}")
    r = state.ridge_param
    m = state.n_samples
    if m == 0 and r == 0.0:
        raise InsufficientDataError("insufficient data")

    a00 = state.suu + r
    a01 = state.su
    a11 = m + r

    # condition number from the closed-form symmetric 2x2 eigenvalues
    mean = 0.5 * (a00 + a11)
    disc = np.hypot(0.5 * (a00 - a11), a01)
    lo = mean - disc
    if lo <= 0.0 or (mean + disc) > COND_LIMIT * lo:
        raise UnidentifiableError("unidentifiable: insufficient price variation")

    det = a00 * a11 - a01 * a01
    g1 = (a11 * state.suz - a01 * state.sz) / det
    g2 = (a00 * state.sz - a01 * state.suz) / det
    cov = (residual_var / det) * np.array([[a11, -a01], [-a01, a00]])
    return GammaEstimate(gamma1_hat=g1, gamma2_hat=g2, covariance=cov)
