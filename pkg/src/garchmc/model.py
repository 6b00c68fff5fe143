"""GARCH(1,1) / QGARCH(1,1) parameter space, likelihood and posterior.

The conditional-variance recursion is

    sigma2_t = omega + gamma * y_{t-1} + alpha * y_{t-1}^2 + beta * sigma2_{t-1}

with gamma = 0 for the plain GARCH model.  The gamma * y_{t-1} term makes
the variance response asymmetric in the sign of the previous return
(leverage effect when gamma < 0).  Innovations are standard normal, so the
log-likelihood is the usual Gaussian sum over the variance path, and the
posterior under a flat prior is the likelihood restricted to the parameter
support.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError, InsufficientDataError

if TYPE_CHECKING:
    from .data import ReturnSeries


class ModelKind(enum.Enum):
    GARCH = "garch"
    QGARCH = "qgarch"


@dataclass(frozen=True)
class ModelParams:
    """Parameter vector theta = (omega, alpha, beta, gamma).

    `in_support` encodes the flat prior's domain: positivity of omega,
    non-negativity of alpha and beta, covariance stationarity
    (alpha + beta < 1), and gamma**2 <= 4 * alpha * omega.  The last
    condition keeps the quadratic omega + gamma*y + alpha*y**2
    non-negative for every real y, so the variance recursion stays
    positive no matter what returns it sees.
    """

    omega: float
    alpha: float
    beta: float
    gamma: float = 0.0
    kind: ModelKind = ModelKind.QGARCH

    @property
    def in_support(self) -> bool:
        if self.kind is ModelKind.GARCH and self.gamma != 0.0:
            return False
        return _in_support(self.omega, self.alpha, self.beta, self.gamma)

    @property
    def param_names(self) -> tuple[str, ...]:
        if self.kind is ModelKind.GARCH:
            return ("omega", "alpha", "beta")
        return ("omega", "alpha", "beta", "gamma")

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    def as_vector(self) -> np.ndarray:
        if self.kind is ModelKind.GARCH:
            return np.array([self.omega, self.alpha, self.beta])
        return np.array([self.omega, self.alpha, self.beta, self.gamma])

    @classmethod
    def from_vector(cls, theta: Sequence[float], kind: ModelKind) -> "ModelParams":
        theta = np.asarray(theta, dtype=float)
        if kind is ModelKind.GARCH:
            if theta.shape != (3,):
                raise DomainError(f"GARCH parameter vector must have length 3, got {theta.shape}")
            return cls(float(theta[0]), float(theta[1]), float(theta[2]), 0.0, kind)
        if theta.shape != (4,):
            raise DomainError(f"QGARCH parameter vector must have length 4, got {theta.shape}")
        return cls(float(theta[0]), float(theta[1]), float(theta[2]), float(theta[3]), kind)


@dataclass(frozen=True)
class VolatilityPath:
    """Conditional variances sigma2_t, aligned with the return series."""

    sigma_sq: np.ndarray


def _in_support(omega: float, alpha: float, beta: float, gamma: float) -> bool:
    # NaNs fail every comparison, so they land outside the support.
    return (
        omega > 0.0
        and alpha >= 0.0
        and beta >= 0.0
        and alpha + beta < 1.0
        and gamma * gamma <= 4.0 * alpha * omega
    )


def _conditional_variance(
    y: np.ndarray, omega: float, alpha: float, beta: float, gamma: float, sigma1_sq: float
) -> np.ndarray:
    """Run the variance recursion; first element is the given sigma1_sq."""
    n = y.size
    out = np.empty(n)
    out[0] = sigma1_sq
    if n > 1:
        drive = omega + gamma * y[:-1] + alpha * y[:-1] ** 2
        # sigma2_t = drive_t + beta * sigma2_{t-1} is a first-order linear
        # recurrence; lfilter evaluates it in C.
        out[1:], _ = lfilter([1.0], [1.0, -beta], drive, zi=np.array([beta * sigma1_sq]))
    return out


def default_sigma1_sq(returns: "ReturnSeries") -> float:
    """Fallback initial variance: the sample variance of the returns."""
    values = np.asarray(returns.values, dtype=float)
    if values.size < 2:
        raise InsufficientDataError("need at least 2 returns to default the initial variance")
    return float(np.var(values, ddof=1))


def _resolve_sigma1_sq(returns: "ReturnSeries", sigma1_sq: float | None) -> float:
    if sigma1_sq is None:
        return default_sigma1_sq(returns)
    if not sigma1_sq > 0.0:
        raise DomainError(f"initial variance must be positive, got {sigma1_sq}")
    return float(sigma1_sq)


def volatility_path(
    params: ModelParams, returns: "ReturnSeries", sigma1_sq: float | None = None
) -> VolatilityPath:
    """Conditional-variance path of the model along the observed returns.

    Parameters
    ----------
    params : ModelParams
        Must lie in the prior support.
    returns : ReturnSeries
        Observations y_1..y_n.
    sigma1_sq : float, optional
        Initial variance; defaults to the sample variance of `returns`.

    Returns
    -------
    VolatilityPath with sigma_sq[0] = sigma1_sq and the recursion above
    for t >= 1.
    """
    if not params.in_support:
        raise DomainError(f"parameters outside the model support: {params}")
    s1 = _resolve_sigma1_sq(returns, sigma1_sq)
    y = np.asarray(returns.values, dtype=float)
    sig = _conditional_variance(y, params.omega, params.alpha, params.beta, params.gamma, s1)
    if not np.all(sig > 0.0):
        raise DomainError("conditional variance reached zero; parameters sit on the support boundary")
    return VolatilityPath(sigma_sq=sig)


def log_likelihood(
    params: ModelParams, returns: "ReturnSeries", sigma1_sq: float | None = None
) -> float:
    """Gaussian log-likelihood -0.5 * sum[ln(2 pi sigma2_t) + y_t^2 / sigma2_t]."""
    if not params.in_support:
        raise DomainError(f"parameters outside the model support: {params}")
    # Same code path as log_posterior so the two agree bit for bit on the
    # support (the flat prior adds nothing).
    return log_posterior_fn(returns, params.kind, sigma1_sq)(params.as_vector())


def log_posterior(
    params: ModelParams, returns: "ReturnSeries", sigma1_sq: float | None = None
) -> float:
    """Unnormalized flat-prior log-posterior; -inf outside the support.

    Off-support parameters are legal input and map to -inf so Metropolis
    style samplers reject them without special-casing.
    """
    # Checked here as well as inside the closure: the GARCH vector form
    # drops gamma, so a nonzero gamma would otherwise go unnoticed.
    if not params.in_support:
        return -math.inf
    return log_posterior_fn(returns, params.kind, sigma1_sq)(params.as_vector())


def log_posterior_fn(
    returns: "ReturnSeries", kind: ModelKind, sigma1_sq: float | None = None
) -> Callable[[np.ndarray], float]:
    """Bind returns and initial variance into a fast vector -> float posterior.

    The returned closure is what the samplers hammer on, so slices and
    constants are precomputed here instead of per call.
    """
    y = np.asarray(returns.values, dtype=float)
    if y.size == 0:
        raise InsufficientDataError("empty return series")
    s1 = _resolve_sigma1_sq(returns, sigma1_sq)
    y_lag = y[:-1]
    y_lag_sq = y_lag * y_lag
    y_sq = y * y
    n_log_2pi = y.size * math.log(2.0 * math.pi)
    qgarch = kind is ModelKind.QGARCH
    dim = 4 if qgarch else 3

    def logpost(theta: np.ndarray) -> float:
        if len(theta) != dim:
            raise DomainError(f"expected parameter vector of length {dim}, got {len(theta)}")
        omega, alpha, beta = theta[0], theta[1], theta[2]
        gamma = theta[3] if qgarch else 0.0
        if not _in_support(omega, alpha, beta, gamma):
            return -math.inf
        drive = omega + gamma * y_lag + alpha * y_lag_sq
        sig_tail, _ = lfilter([1.0], [1.0, -beta], drive, zi=np.array([beta * s1]))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ll = -0.5 * (
                n_log_2pi
                + math.log(s1)
                + np.log(sig_tail).sum()
                + y_sq[0] / s1
                + (y_sq[1:] / sig_tail).sum()
            )
        # Exact-boundary parameters can drive a variance to zero, which
        # shows up as inf/nan here; treat it as a rejection.
        return float(ll) if math.isfinite(ll) else -math.inf

    return logpost


def unconditional_variance(params: ModelParams) -> float:
    """Stationary variance omega / (1 - alpha - beta)."""
    persistence = params.alpha + params.beta
    if not persistence < 1.0:
        raise DomainError(f"alpha + beta = {persistence} has no stationary variance")
    return params.omega / (1.0 - persistence)


def news_impact_curve(params: ModelParams, grid: Sequence[float]) -> np.ndarray:
    """Conditional variance as a function of the previous return.

    The lagged variance is held at its stationary value, so the curve is
    sigma2(y) = omega + gamma*y + alpha*y**2 + beta * omega/(1-alpha-beta).

    Returns an array of shape (len(grid), 2) with columns (y, sigma2).
    """
    base = params.beta * unconditional_variance(params)
    y = np.asarray(grid, dtype=float)
    sig = params.omega + params.gamma * y + params.alpha * y * y + base
    return np.column_stack([y, sig])
