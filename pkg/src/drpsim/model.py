"""Population, demand scenario, user response, and stage cost.

The operator broadcasts a price signal lambda_t each slot. User i holds a
quadratic cost u_i(x) = 0.5*beta_i*x^2 + alpha_i*x for reducing consumption
by x and is paid N*lambda_t per unit, so its noiseless best response is

    x_i(lambda) = (N*lambda - alpha_i) / beta_i

observed by the operator only in aggregate and corrupted by i.i.d. Gaussian
noise per user. Everything the operator must learn about the population is
carried by two aggregates:

    gamma1 = sum_i 1/beta_i        gamma2 = -sum_i alpha_i/beta_i

so that E[Q_t] = N*gamma1*lambda_t + gamma2. The realized stage cost for
committed capacity Y and demand level d_t is

    C_t = (1/N) * sum_i [0.5*beta_i*x_i^2 + alpha_i*x_i]
        + (1/(2N)) * (Q_t - Y*d_t)^2

The operator's revenue term -alpha_rev*Y*T/N is constant in lambda and is
excluded here (it cancels in every cost difference); totals that include it
can be formed by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "UserParams",
    "Population",
    "DemandProfile",
    "Scenario",
    "StageOutcome",
    "user_response",
    "user_cost",
    "realize_outcome",
    "aggregate_response",
    "stage_cost",
]


@dataclass(frozen=True)
class UserParams:
    """Quadratic cost coefficients of one user.

    Attributes:
        alpha_i: linear coefficient (currency per unit response), >= 0.
        beta_i: quadratic coefficient (currency per unit squared), > 0.
    """

    alpha_i: float
    beta_i: float

    def __post_init__(self):
        if not np.isfinite(self.beta_i) or self.beta_i <= 0:
            raise ValueError(f"beta_i must be finite and > 0, got {self.beta_i}")
        if not np.isfinite(self.alpha_i) or self.alpha_i < 0:
            raise ValueError(f"alpha_i must be finite and >= 0, got {self.alpha_i}")


@dataclass(frozen=True)
class Population:
    """Ordered collection of users with cached aggregates."""

    users: tuple[UserParams, ...]

    def __post_init__(self):
        if len(self.users) < 1:
            raise ValueError("population must contain at least one user")
        object.__setattr__(self, "users", tuple(self.users))

    @property
    def n(self) -> int:
        return len(self.users)

    @cached_property
    def alphas(self) -> NDArray[np.float64]:
        return np.array([u.alpha_i for u in self.users], dtype=float)

    @cached_property
    def betas(self) -> NDArray[np.float64]:
        return np.array([u.beta_i for u in self.users], dtype=float)

    @cached_property
    def gamma1(self) -> float:
        """sum_i 1/beta_i."""
        return float(np.sum(1.0 / self.betas))

    @cached_property
    def gamma2(self) -> float:
        """-sum_i alpha_i/beta_i (the intercept of the aggregate response)."""
        return float(-np.sum(self.alphas / self.betas))

    @classmethod
    def from_arrays(cls, alphas, betas) -> "Population":
        alphas = np.asarray(alphas, dtype=float)
        betas = np.asarray(betas, dtype=float)
        if alphas.shape != betas.shape:
            raise ValueError("alpha and beta arrays must have equal length")
        return cls(tuple(UserParams(float(a), float(b)) for a, b in zip(alphas, betas)))


@dataclass(frozen=True)
class DemandProfile:
    """Normalized per-slot demand-reduction requirements d_t > 0."""

    d: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        arr = np.array(self.d, dtype=float)
        if arr.size == 0:
            raise ValueError("demand profile must have at least one slot")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError("every d_t must be finite and > 0")

    @property
    def horizon(self) -> int:
        return len(self.d)

    @cached_property
    def values(self) -> NDArray[np.float64]:
        return np.array(self.d, dtype=float)


@dataclass(frozen=True)
class Scenario:
    """One simulation instance: who responds, to what demand, at what noise.

    Attributes:
        population: the N users.
        demand: demand-reduction requirements, length T.
        alpha_rev: revenue price per standardized unit of reduction, > 0.
        noise_sd: per-user response noise standard deviation, >= 0.
        seed: master seed recorded for provenance (stream splitting is done
            by the caller; see rng.substream).
    """

    population: Population
    demand: DemandProfile
    alpha_rev: float
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.alpha_rev) or self.alpha_rev <= 0:
            raise ValueError("alpha_rev must be finite and > 0")
        if not np.isfinite(self.noise_sd) or self.noise_sd < 0:
            raise ValueError("noise_sd must be finite and >= 0")

    @property
    def n(self) -> int:
        return self.population.n

    @property
    def horizon(self) -> int:
        return self.demand.horizon


@dataclass(frozen=True)
class StageOutcome:
    """Realized responses to one broadcast price.

    aggregate is the sum of responses (numpy's deterministic reduction over
    the fixed user order), so recomputing responses.sum() reproduces it
    bit-for-bit. stage_cost is filled by stage_cost() when a capacity and
    slot are known; it is None straight out of the response step.
    """

    lambda_t: float
    responses: NDArray[np.float64]
    aggregate: float
    stage_cost: Optional[float] = None


def user_response(user: UserParams, lambda_t: float, n_users: int, eps: float) -> float:
    """Noisy best response of one user to price lambda_t.

    Returns (N*lambda_t - alpha_i)/beta_i + eps; with eps=0 this is the exact
    minimizer of u_i(x) - N*lambda_t*x.
    """
    return (n_users * lambda_t - user.alpha_i) / user.beta_i + eps


def user_cost(user: UserParams, x: float) -> float:
    """Cost 0.5*beta_i*x^2 + alpha_i*x incurred by one user for response x."""
    return 0.5 * user.beta_i * x * x + user.alpha_i * x


def realize_outcome(
    scenario: Scenario, lambda_t: float, eps: NDArray[np.float64]
) -> StageOutcome:
    """Deterministic response step given an explicit noise vector eps (length N)."""
    pop = scenario.population
    responses = (scenario.n * lambda_t - pop.alphas) / pop.betas + eps
    return StageOutcome(
        lambda_t=float(lambda_t),
        responses=responses,
        aggregate=float(responses.sum()),
    )


def aggregate_response(
    scenario: Scenario, lambda_t: float, rng: np.random.Generator
) -> StageOutcome:
    """Broadcast lambda_t and observe the noisy aggregate response.

    Draws one i.i.d. Gaussian eps per user (sd = scenario.noise_sd) so that
    E[Q_t] = N*gamma1*lambda_t + gamma2 and Var(Q_t) = N*noise_sd^2.
    """
    if not np.isfinite(lambda_t):
        raise ValueError("lambda_t must be finite")
    if scenario.noise_sd == 0.0:
        eps = np.zeros(scenario.n)
    else:
        eps = rng.normal(0.0, scenario.noise_sd, scenario.n)
    return realize_outcome(scenario, lambda_t, eps)


def stage_cost(scenario: Scenario, y: float, t: int, outcome: StageOutcome) -> float:
    """Realized operating cost of slot t (1-based) under capacity y.

    (1/N) sum_i [0.5*beta_i*x_i^2 + alpha_i*x_i] + (1/(2N)) (Q_t - y*d_t)^2.
    The constant revenue term is excluded (see module docstring).
    """
    if not 1 <= t <= scenario.horizon:
        raise ValueError(f"slot index {t} out of range 1..{scenario.horizon}")
    pop = scenario.population
    x = outcome.responses
    n = scenario.n
    user_term = float((0.5 * pop.betas * x + pop.alphas) @ x) / n
    imbalance = outcome.aggregate - y * scenario.demand.d[t - 1]
    return user_term + imbalance * imbalance / (2.0 * n)
