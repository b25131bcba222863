"""Threshold policy optimization.

Three routes to (near-)optimal monotone threshold policies:

* an exhaustive zoomed grid oracle over the gap parameterization,
* a bisection on the full-battery threshold whose feasibility test comes
  from the structural result that a monotone solution of the moment
  condition 2 tau_B m1 = m2 exists iff tau_B is at least the optimal
  average age (this yields a certified optimality gap of
  1 / (2^{q+1} mu_h) after q iterations),
* a joint derivative-free minimizer for arbitrary power penalties, whose
  convergence is certified by the fixed-point property
  p(tau_B) = optimal average penalty.

Thresholds are searched as (tau_B, gaps): tau_{i} = tau_{i+1} + d_i with
d_i >= 0, so monotonicity holds by construction and ties (empty
intervals) sit on the search-space boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .model import PenaltySpec, Policy, SystemParams, validate_policy
from .renewal import policy_metrics


class BudgetExceeded(RuntimeError):
    pass


class BracketInvalid(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    q: int = 10
    grid_points: int = 15
    upper_cap_factor: float = 10.0
    refine_tol: float = 1e-6
    penalty: PenaltySpec = field(default_factory=PenaltySpec.identity)
    grid_rounds: int = 6

    def __post_init__(self):
        if self.q < 1 or self.grid_points < 2 or self.upper_cap_factor <= 0 or self.refine_tol <= 0:
            raise ValueError("invalid optimizer configuration")


@dataclass(frozen=True)
class OptimizationResult:
    policy: Policy
    objective: float
    gap_bound: float | None
    trace: tuple[tuple[float, float], ...]
    certified: bool = True


def _build_thresholds(tau_b: float, gaps) -> tuple[float, ...]:
    """tau_B = tau_b; tau_i = tau_{i+1} + gaps[i-1] walking upward."""
    taus = [tau_b]
    for g in reversed(gaps):
        taus.append(taus[-1] + g)
    return tuple(reversed(taus))


def _objective(params: SystemParams, penalty: PenaltySpec, taus) -> float:
    return policy_metrics(params, Policy(taus), penalty).avg_penalty


def _zoomed_grid(params, penalty, lows, highs, bounds, points, rounds):
    """Deterministic multi-round grid refinement over (tau_b, gaps).

    Each round lays a uniform grid per dimension, keeps the best vertex
    (ties broken by lexicographically smallest threshold vector), and
    shrinks every dimension to one grid step around it, clipped to the
    outer bounds.
    """
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    blo = np.asarray([b[0] for b in bounds])
    bhi = np.asarray([b[1] for b in bounds])
    ndim = len(lows)
    if points**ndim > 10**8:
        raise BudgetExceeded(f"{points}^{ndim} grid combinations exceed the budget")
    best_val = math.inf
    best_taus = None
    best_vec = None
    for _ in range(rounds):
        axes = [np.linspace(lows[d], highs[d], points) for d in range(ndim)]
        for vec in itertools.product(*axes):
            taus = _build_thresholds(vec[0], vec[1:])
            val = _objective(params, penalty, taus)
            if val < best_val or (val == best_val and taus < best_taus):
                best_val, best_taus, best_vec = val, taus, np.asarray(vec)
        step = (highs - lows) / (points - 1)
        lows = np.maximum(best_vec - step, blo)
        highs = np.minimum(best_vec + step, bhi)
    return best_taus, best_val


def grid_search(params: SystemParams, config: OptimizerConfig) -> OptimizationResult:
    """Exhaustive zoomed grid over tau_B in [1/(2mu), 1/mu] and gaps.

    Deterministic oracle; the zoom rounds refine resolution without
    enumerating an intractably fine single-pass grid.
    """
    mu = params.mu_h
    B = params.battery
    cap = config.upper_cap_factor / mu
    lows = [0.5 / mu] + [0.0] * (B - 1)
    highs = [1.0 / mu] + [cap] * (B - 1)
    bounds = list(zip(lows, highs))
    taus, val = _zoomed_grid(
        params, config.penalty, lows, highs, bounds, config.grid_points, config.grid_rounds
    )
    return OptimizationResult(
        policy=validate_policy(params, taus), objective=val, gap_bound=None, trace=()
    )


def inner_minimize(
    params: SystemParams, config: OptimizerConfig, tau_b: float
) -> tuple[tuple[float, ...], float]:
    """Minimize the average penalty over the upper thresholds at fixed tau_B.

    Coarse deterministic grid over the gaps followed by Nelder-Mead
    refinement. Returns (tau_1..tau_{B-1}, objective).
    """
    if tau_b <= 0:
        raise ValueError("tau_b must be positive")
    B = params.battery
    if B == 1:
        return (), _objective(params, config.penalty, (tau_b,))
    cap = config.upper_cap_factor / params.mu_h
    ndim = B - 1
    axes = [np.linspace(0.0, cap, config.grid_points)] * ndim
    best_val = math.inf
    best_g = None
    for g in itertools.product(*axes):
        val = _objective(params, config.penalty, _build_thresholds(tau_b, g))
        if val < best_val:
            best_val, best_g = val, g
    res = minimize(
        lambda g: _objective(params, config.penalty, _build_thresholds(tau_b, np.maximum(g, 0.0))),
        np.asarray(best_g),
        method="Nelder-Mead",
        bounds=[(0.0, 2.0 * cap)] * ndim,
        options={"xatol": config.refine_tol, "fatol": config.refine_tol, "maxiter": 2000},
    )
    if res.fun <= best_val:
        best_val = float(res.fun)
        best_g = np.maximum(res.x, 0.0)
    taus = _build_thresholds(tau_b, best_g)
    return taus[:-1], best_val


def feasible(params: SystemParams, config: OptimizerConfig, tau_b: float) -> bool:
    """Does a monotone solution of 2 tau_B m1 = m2 exist at this tau_B?

    The moment condition rewrites as avg_age = tau_B; avg_age is
    continuous in the upper thresholds and grows without bound, so a
    root exists iff the minimum over upper thresholds is <= tau_B.
    """
    _, val = inner_minimize(params, config, tau_b)
    return val <= tau_b + 1e-9


def _require_identity(config: OptimizerConfig):
    if config.penalty.terms != ((1.0, 1.0),):
        raise ValueError("the bisection gap certificate holds for the identity penalty only")


def algorithm1(params: SystemParams, config: OptimizerConfig) -> OptimizationResult:
    """Bisection on the full-battery threshold with a certified age gap.

    Starts from the bracket [1/(2 mu), 1/mu]; each feasibility test
    halves the interval containing the optimal average age. The returned
    policy is the inner minimizer at the terminal feasible endpoint, so
    its average age is within 1/(2^{q+1} mu) of optimal.
    """
    _require_identity(config)
    mu = params.mu_h
    lo, hi = 0.5 / mu, 1.0 / mu
    if not feasible(params, config, hi):
        raise BracketInvalid(f"upper bracket endpoint {hi} is infeasible")
    trace = [(lo, hi)]
    for _ in range(config.q):
        mid = 0.5 * (lo + hi)
        if feasible(params, config, mid):
            hi = mid
        else:
            lo = mid
        trace.append((lo, hi))
    uppers, val = inner_minimize(params, config, hi)
    policy = validate_policy(params, uppers + (hi,))
    return OptimizationResult(
        policy=policy,
        objective=val,
        gap_bound=1.0 / (2.0 ** (config.q + 1) * mu),
        trace=tuple(trace),
    )


def optimize_penalty(params: SystemParams, config: OptimizerConfig) -> OptimizationResult:
    """Joint minimization over all thresholds for any supported penalty.

    Deterministic coarse grid over (tau_B, gaps), Nelder-Mead restarts
    from the five best distinct grid vertices, and a fixed-point
    certificate |p(tau_B) - objective| <= 10 * refine_tol on the result.
    """
    mu = params.mu_h
    B = params.battery
    cap = config.upper_cap_factor / mu
    ndim = B
    if config.grid_points**ndim > 10**8:
        raise BudgetExceeded(f"{config.grid_points}^{ndim} grid combinations exceed the budget")
    tau_axis = np.linspace(0.05 / mu, 2.0 / mu, config.grid_points)
    gap_axes = [np.linspace(0.0, cap, config.grid_points)] * (B - 1)
    scored = []
    for vec in itertools.product(tau_axis, *gap_axes):
        val = _objective(params, config.penalty, _build_thresholds(vec[0], vec[1:]))
        scored.append((val, vec))
    scored.sort(key=lambda t: (t[0], t[1]))
    seeds = [np.asarray(vec) for _, vec in scored[:5]]

    def fun(v):
        tau_b = max(v[0], 1e-9)
        return _objective(params, config.penalty, _build_thresholds(tau_b, np.maximum(v[1:], 0.0)))

    bounds = [(1e-9, 4.0 / mu)] + [(0.0, 2.0 * cap)] * (B - 1)
    best_val, best_v = scored[0][0], np.asarray(scored[0][1])
    for seed in seeds:
        res = minimize(
            fun,
            seed,
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": config.refine_tol, "fatol": config.refine_tol, "maxiter": 4000},
        )
        if res.fun < best_val:
            best_val, best_v = float(res.fun), np.asarray(res.x)
    taus = _build_thresholds(max(best_v[0], 1e-9), np.maximum(best_v[1:], 0.0))
    policy = validate_policy(params, taus)
    certified = abs(config.penalty(policy.tau_full) - best_val) <= 10.0 * config.refine_tol
    return OptimizationResult(
        policy=policy, objective=best_val, gap_bound=None, trace=(), certified=certified
    )
