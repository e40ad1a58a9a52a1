"""Saddle equation a(sigma) + log x = 0 and the resulting estimates.

a = H' is strictly increasing wherever b = H'' > 0, so bisection inside a
sign-changing bracket is globally safe; a short Newton polish then drives the
residual to the floor.  Failure to find a bracket IS the signal that x is
below the solvable range (x < x0): callers get NoSaddleError, not a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConvergenceError, DomainError, NoSaddleError
from .series import (
    CoefficientSeries,
    DEFAULT_EVAL_MARGIN,
    eval_derivatives,
    eval_F,
    hat_F,
    partial_sum,
)

_MAX_BISECT = 200


@dataclass(frozen=True)
class SaddleSolution:
    x: float
    sigma_x: float
    residual: float
    bracket: tuple
    iterations: int


@dataclass
class EstimateReport:
    """Main-term estimates with exact-oracle comparisons when available.

    ``observed_R`` is exact_hat / prefactor - gaussian_factor: the residual
    ratio left over after the main term, observable only when the oracle is.
    """

    x: float
    sigma_used: float
    hat_estimate: Optional[float] = None
    F_estimate: Optional[float] = None
    F_alt_estimate: Optional[float] = None
    exact_hat: Optional[float] = None
    exact_F: Optional[float] = None
    rel_err_hat: Optional[float] = None
    rel_err_F: Optional[float] = None
    gaussian_factor: Optional[float] = None
    prefactor: Optional[float] = None
    observed_R: Optional[float] = None
    residual: Optional[float] = None


def _phi_factory(series, x):
    lnx = math.log(x)

    def phi(sigma):
        a, _, _ = eval_derivatives(series, sigma)
        return a + lnx

    return phi


def _sigma_floor(series):
    if isinstance(series, CoefficientSeries):
        return series.alpha + DEFAULT_EVAL_MARGIN
    return series.alpha


def solve_saddle(series, x: float, tol: float = 1e-12) -> SaddleSolution:
    """Unique sigma_x in (alpha, beta) with a(sigma_x) + log x = 0.

    Brackets by geometric shrink toward alpha and geometric growth upward,
    bisects, then Newton-polishes.  Raises NoSaddleError when no sign change
    is reachable (x below x0 for this series) and ConvergenceError when the
    residual cannot reach ``tol`` in double precision.
    """
    if x <= 0:
        raise DomainError("x must be positive")
    alpha = series.alpha
    phi = _phi_factory(series, x)
    floor = _sigma_floor(series)

    def exact_hit(cand):
        return SaddleSolution(x=float(x), sigma_x=float(cand), residual=0.0,
                              bracket=(cand, cand), iterations=0)

    # lower end: walk alpha + 2^-k down to the evaluation floor
    lo = None
    philo = None
    k = 0
    while k <= 60:
        cand = alpha + 2.0 ** -k
        if cand <= floor:
            break
        try:
            val = phi(cand)
        except (DomainError, OverflowError):
            break
        if val == 0.0:
            return exact_hit(cand)
        if math.isfinite(val) and val < 0:
            lo, philo = cand, val
            break
        k += 1
    if lo is None:
        raise NoSaddleError(
            f"a(sigma)+log x has no negative value above sigma={floor}: "
            f"x={x} is below x0 for {getattr(series, 'label', '')!r}"
        )

    # upper end: grow alpha + 2^j until the sign flips
    hi = None
    for j in range(0, 60):
        cand = alpha + 2.0 ** j
        val = phi(cand)
        if val == 0.0:
            return exact_hit(cand)
        if math.isfinite(val) and val > 0:
            hi = cand
            break
        if math.isfinite(val) and val < 0 and cand > lo:
            lo, philo = cand, val
    if hi is None:
        raise NoSaddleError(
            f"a(sigma)+log x stays negative up to sigma={alpha + 2.0 ** 59}: "
            "no saddle in range"
        )
    bracket = (lo, hi)

    iterations = 0
    best = lo
    best_res = abs(philo)
    while iterations < _MAX_BISECT and (hi - lo) > 1e-17 * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        val = phi(mid)
        iterations += 1
        if abs(val) < best_res:
            best, best_res = mid, abs(val)
        if val == 0.0:
            break
        if val < 0:
            lo = mid
        else:
            hi = mid
        if best_res <= tol:
            break

    # Newton polish: a' = b > 0 in the bracket
    sigma = best
    for _ in range(4):
        if best_res <= tol:
            break
        a, b, _ = eval_derivatives(series, sigma)
        val = a + math.log(x)
        if abs(val) < best_res:
            best, best_res = sigma, abs(val)
        if b <= 0:
            break
        step = val / b
        cand = sigma - step
        if not bracket[0] <= cand <= bracket[1] or cand <= floor:
            break
        sigma = cand
        iterations += 1
    val = phi(sigma)
    if abs(val) < best_res:
        best, best_res = sigma, abs(val)

    if best_res > tol:
        raise ConvergenceError(
            f"saddle residual {best_res:.3e} above tol {tol:.1e}",
            x=x, sigma=best, residual=best_res, bracket=bracket,
        )
    return SaddleSolution(x=float(x), sigma_x=float(best), residual=float(best_res),
                          bracket=bracket, iterations=iterations)


def _oracle_for(series, oracle):
    if oracle is not None:
        return oracle
    if isinstance(series, CoefficientSeries):
        return series
    return None


def estimate_hat(series, x: float, sigma: Optional[float] = None,
                 oracle: Optional[CoefficientSeries] = None,
                 tol: float = 1e-12) -> EstimateReport:
    """Main-term estimate of F-hat(x).

    hat = x^{sigma+1} F(sigma) / (sigma (sigma+1) sqrt(2 pi b)) *
          exp(-(a(sigma)+log x)^2 / (2 b));
    at sigma = sigma_x the Gaussian factor collapses to 1 and this is the
    saddle-point asymptotic.  The remainder term is never modeled: when the
    exact oracle is available the report carries the observed residual ratio.
    """
    residual = None
    if sigma is None:
        sol = solve_saddle(series, x, tol=tol)
        sigma = sol.sigma_x
        residual = sol.residual
    a, b, _ = eval_derivatives(series, sigma)
    if b <= 0:
        raise DomainError(f"b(sigma)={b} must be positive for the estimate")
    F = eval_F(series, sigma).real
    if F <= 0:
        raise DomainError("F(sigma) must be positive")
    lnx = math.log(x)
    gauss_exp = -((a + lnx) ** 2) / (2.0 * b)
    log_pref = ((sigma + 1.0) * lnx + math.log(F)
                - math.log(sigma * (sigma + 1.0))
                - 0.5 * math.log(2.0 * math.pi * b))
    prefactor = math.exp(log_pref)
    gaussian_factor = math.exp(gauss_exp)
    hat_est = math.exp(log_pref + gauss_exp)

    rep = EstimateReport(x=float(x), sigma_used=float(sigma),
                         hat_estimate=hat_est, gaussian_factor=gaussian_factor,
                         prefactor=prefactor, residual=residual)
    orc = _oracle_for(series, oracle)
    if orc is not None and 1.0 <= x <= orc.N:
        rep.exact_hat = hat_F(orc, x)
        if rep.exact_hat != 0.0:
            rep.rel_err_hat = abs(hat_est - rep.exact_hat) / abs(rep.exact_hat)
        rep.observed_R = rep.exact_hat / prefactor - gaussian_factor
    return rep


def estimate_F(series, x: float, oracle: Optional[CoefficientSeries] = None,
               tol: float = 1e-12) -> EstimateReport:
    """Partial-sum estimate F(x) ~ x^{sigma_x} F(sigma_x)/(sigma_x sqrt(2 pi b)).

    Also reports the alternate route (alpha+1)/x * hat-estimate; the two
    agree to within the vanishing remainder as x grows.
    """
    sol = solve_saddle(series, x, tol=tol)
    sigma = sol.sigma_x
    _, b, _ = eval_derivatives(series, sigma)
    if b <= 0:
        raise DomainError(f"b(sigma)={b} must be positive for the estimate")
    F = eval_F(series, sigma).real
    lnx = math.log(x)
    log_est = sigma * lnx + math.log(F) - math.log(sigma) - 0.5 * math.log(2 * math.pi * b)
    rep = estimate_hat(series, x, sigma=sigma, oracle=oracle)
    rep.residual = sol.residual
    rep.F_estimate = math.exp(log_est)
    rep.F_alt_estimate = (series.alpha + 1.0) / x * rep.hat_estimate
    orc = _oracle_for(series, oracle)
    if orc is not None and 1.0 <= x <= orc.N:
        rep.exact_F = partial_sum(orc, x)
        if rep.exact_F != 0.0:
            rep.rel_err_F = abs(rep.F_estimate - rep.exact_F) / abs(rep.exact_F)
    return rep


@dataclass(frozen=True)
class RVCheck:
    """Observed vs predicted ratio F-hat(xy)/F-hat(x)."""

    observed: float
    predicted: float        # the regular-variation limit y^{alpha+1}
    predicted_finite: float  # y^{sigma_x+1} exp(-(log y)^2 / (2 b(sigma_x)))


def rv_ratio_check(series, x: float, y: float,
                   oracle: Optional[CoefficientSeries] = None) -> RVCheck:
    """Regular-variation probe: F-hat scales like x^{alpha+1} in the limit."""
    orc = _oracle_for(series, oracle)
    if orc is None:
        raise DomainError("rv_ratio_check needs a coefficient oracle")
    if not (1.0 <= x and x * y <= orc.N):
        raise DomainError(f"need 1 <= x and x*y <= N={orc.N}")
    observed = hat_F(orc, x * y) / hat_F(orc, x)
    predicted = y ** (series.alpha + 1.0)
    sol = solve_saddle(series, x)
    _, b, _ = eval_derivatives(series, sol.sigma_x)
    lny = math.log(y)
    predicted_finite = y ** (sol.sigma_x + 1.0) * math.exp(-lny * lny / (2.0 * b))
    return RVCheck(observed=float(observed), predicted=float(predicted),
                   predicted_finite=float(predicted_finite))
