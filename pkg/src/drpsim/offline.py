"""Full-information optimum: capacity Y*, price path lambda*_t, allocations.

Closed forms (with gamma1 = sum 1/beta_i, S = sum_i alpha_i/beta_i = -gamma2):

    lambda*_t = (Y*d_t + S) / (N + N*gamma1)
    x*_i      = (N*lambda* - alpha_i) / beta_i
    Y*        = [T*a*(1+gamma1)^2 - S*(1+gamma1)*sum_t d_t] / [sum_t d_t^2 * (1+gamma1)]

where a is the revenue price. Two independent numerical oracles validate
them: a per-slot dense KKT solve, and a golden-section minimization of the
reduced capacity objective.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from .model import Scenario, realize_outcome, stage_cost

__all__ = [
    "OfflineSolution",
    "compute_y_star",
    "compute_lambda_star",
    "lambda_star_path",
    "compute_x_star",
    "closed_form_solve",
    "oracle_solve",
    "oracle_y_star",
    "reduced_objective",
]


@dataclass(frozen=True)
class OfflineSolution:
    """Capacity, price path, allocations, and aggregates of the optimum.

    x_star has shape (N, T); lambda_star and q_star have length T.
    """

    y_star: float
    lambda_star: NDArray[np.float64]
    x_star: NDArray[np.float64]
    q_star: NDArray[np.float64]


def compute_y_star(scenario: Scenario) -> float:
    """Optimal committed capacity for the scenario's demand profile.

    The value can be negative when the revenue price is small relative to
    the population's fixed willingness to respond; that is a legitimate
    optimum of the quadratic objective, so we warn instead of rejecting.
    """
    pop = scenario.population
    d = scenario.demand.values
    g1 = pop.gamma1
    s = -pop.gamma2  # sum alpha_i/beta_i
    t_hor = scenario.horizon
    a = scenario.alpha_rev
    num = t_hor * a * (1.0 + g1) ** 2 - s * (1.0 + g1) * float(d.sum())
    den = float((d * d).sum()) * (1.0 + g1)
    y = num / den
    if y < 0:
        warnings.warn(
            f"optimal capacity is negative (y_star={y:.6g}); the revenue price "
            "is small relative to the population's baseline response",
            RuntimeWarning,
            stacklevel=2,
        )
    return y


def compute_lambda_star(scenario: Scenario, y: float, t: int) -> float:
    """Optimal price for slot t (1-based) under capacity y."""
    if not 1 <= t <= scenario.horizon:
        raise ValueError(f"slot index {t} out of range 1..{scenario.horizon}")
    pop = scenario.population
    s = -pop.gamma2
    n = scenario.n
    return (y * scenario.demand.d[t - 1] + s) / (n + n * pop.gamma1)


def lambda_star_path(scenario: Scenario, y: float) -> NDArray[np.float64]:
    """Vectorized compute_lambda_star over all T slots."""
    pop = scenario.population
    s = -pop.gamma2
    n = scenario.n
    return (y * scenario.demand.values + s) / (n + n * pop.gamma1)


def compute_x_star(user, lambda_star: float, n_users: int) -> float:
    """Optimal allocation of one user: (N*lambda* - alpha_i)/beta_i."""
    return (n_users * lambda_star - user.alpha_i) / user.beta_i


def closed_form_solve(scenario: Scenario, y: float | None = None) -> OfflineSolution:
    """Assemble the full offline solution from the closed forms.

    If y is None the capacity is computed via compute_y_star.
    """
    if y is None:
        y = compute_y_star(scenario)
    pop = scenario.population
    lam = lambda_star_path(scenario, y)
    x = (scenario.n * lam[None, :] - pop.alphas[:, None]) / pop.betas[:, None]
    q = x.sum(axis=0)
    return OfflineSolution(y_star=float(y), lambda_star=lam, x_star=x, q_star=q)


def oracle_solve(scenario: Scenario, y: float) -> OfflineSolution:
    """Independent per-slot optimum via a dense KKT linear solve.

    For each slot the strictly convex quadratic program is solved through
    its stationarity system in the N+1 unknowns (x_1..x_N, lambda):

        beta_i * x_i - N*lambda = -alpha_i      (i = 1..N)
        sum_i x_i   + N*lambda = y*d_t

    Raises RuntimeError if the system is singular (impossible for beta > 0)
    or if the solution fails to satisfy the KKT residual bound 1e-10.
    """
    pop = scenario.population
    n = scenario.n
    t_hor = scenario.horizon
    kkt = np.zeros((n + 1, n + 1))
    kkt[np.arange(n), np.arange(n)] = pop.betas
    kkt[:n, n] = -n
    kkt[n, :n] = 1.0
    kkt[n, n] = n
    x_star = np.empty((n, t_hor))
    lam_star = np.empty(t_hor)
    rhs = np.empty(n + 1)
    rhs[:n] = -pop.alphas
    for j, d_t in enumerate(scenario.demand.d):
        rhs[n] = y * d_t
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - beta>0 forbids it
            raise RuntimeError("singular KKT system") from exc
        resid = float(np.max(np.abs(kkt @ sol - rhs)))
        scale = max(1.0, float(np.max(np.abs(rhs))))
        if resid > 1e-10 * scale:  # pragma: no cover - dense solve is exact here
            raise RuntimeError(f"KKT residual {resid:g} above bound")
        x_star[:, j] = sol[:n]
        lam_star[j] = sol[n]
    return OfflineSolution(
        y_star=float(y), lambda_star=lam_star, x_star=x_star, q_star=x_star.sum(axis=0)
    )


def reduced_objective(scenario: Scenario, y: float) -> float:
    """Total offline cost as a function of the capacity alone.

    Per-slot costs are evaluated at the optimal noiseless responses for the
    candidate y, and the revenue term -alpha_rev*y*T/N (constant in lambda
    but not in y) is included; minimizing this over y yields Y*.
    """
    sol = closed_form_solve(scenario, y)
    zero_eps = np.zeros(scenario.n)
    total = 0.0
    for t in range(1, scenario.horizon + 1):
        outcome = realize_outcome(scenario, float(sol.lambda_star[t - 1]), zero_eps)
        total += stage_cost(scenario, y, t, outcome)
    total -= scenario.alpha_rev * y * scenario.horizon / scenario.n
    return total


def oracle_y_star(scenario: Scenario, xtol: float = 1e-10) -> float:
    """Independent capacity optimum via golden-section search.

    The reduced objective is a strictly convex parabola in y, so a
    data-independent bracket around the closed-form magnitude bound
    suffices. Golden section alone stalls once the parabola is flat to
    rounding (location error ~ sqrt(eps)), so the result is refined by
    one exact parabolic-vertex step through three well-separated
    evaluations, which pins the minimizer of a true quadratic to near
    machine precision.
    """
    pop = scenario.population
    d = scenario.demand.values
    magnitude = (
        scenario.horizon * scenario.alpha_rev * (1.0 + pop.gamma1)
        + abs(pop.gamma2) * float(d.sum())
    ) / float((d * d).sum())
    bound = 2.0 * magnitude + 1.0  # keeps |y*| < bound/2 so (-b, 0, b) brackets
    res = minimize_scalar(
        lambda y: reduced_objective(scenario, y),
        bracket=(-bound, 0.0, bound),
        method="golden",
        options={"xtol": xtol},
    )
    y0 = float(res.x)
    h = 0.5 * max(1.0, abs(y0))
    f_lo = reduced_objective(scenario, y0 - h)
    f_mid = reduced_objective(scenario, y0)
    f_hi = reduced_objective(scenario, y0 + h)
    denom = f_hi - 2.0 * f_mid + f_lo  # = 2*A*h^2 > 0 for a strictly convex parabola
    if denom <= 0.0:  # pragma: no cover - curvature is strictly positive
        return y0
    return y0 - 0.5 * h * (f_hi - f_lo) / denom
