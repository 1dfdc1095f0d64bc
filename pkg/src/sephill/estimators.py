"""Tail-index and location/scatter estimators.

The central object is the separating Hill estimator: order the rows of a
sample by their distance from a location in the metric of a scatter matrix,
then average the log-ratios of the k largest distances against the
(k+1)-th.  The location and scatter can be the true model parameters or
estimates; the robust pair used throughout is the spatial median together
with Tyler's fixed-point shape estimator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    ConfigError,
    DegenerateSample,
    DimensionMismatch,
    DomainError,
    KOutOfRange,
    NonFinite,
    NonPositivePivot,
    NotConverged,
    NotPositiveDefinite,
    SingularIterate,
)

TRUE_PARAMS = "true_params"
SAMPLE_MEAN_COV = "sample_mean_cov"
SPATIAL_MEDIAN_TYLER = "spatial_median_tyler"
ESTIMATOR_METHODS = (SAMPLE_MEAN_COV, SPATIAL_MEDIAN_TYLER)


@dataclass(frozen=True)
class HillEstimate:
    """A single Hill value together with the inputs that produced it."""

    gamma_hat: float
    k: int
    n: int
    location_scatter_source: str


@dataclass(frozen=True, eq=False)
class LocationScatterEstimate:
    """Estimated location and scatter, with the inverse precomputed."""

    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    sigma_hat_inv: np.ndarray
    method: str
    iterations: int = 0
    converged: bool = True


def as_sample(sample) -> np.ndarray:
    """Validate a sample matrix: 2-d, finite, float."""
    x = np.asarray(sample, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"sample must be 2-d, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("sample entries must be finite")
    return x


def order_desc(values) -> np.ndarray:
    """Sort values into descending order.

    Ties keep their original relative order (stable sort), so downstream
    results never depend on how the sorting algorithm breaks them.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFinite("distances must be finite")
    return v[np.argsort(-v, kind="stable")]


def _hill_from_ordered(ordered: np.ndarray, k: int) -> float:
    n = ordered.shape[0]
    if not 1 <= k <= n - 1:
        raise KOutOfRange(f"k must satisfy 1 <= k <= n - 1, got k={k}, n={n}")
    pivot = ordered[k]
    if not pivot > 0.0:
        raise NonPositivePivot(
            f"order statistic {k + 1} of the distances is {pivot}, must be > 0"
        )
    value = float(np.mean(np.log(ordered[:k] / pivot)))
    # each log-ratio is >= 0 up to rounding; never report a signed zero
    return max(value, 0.0)


def univariate_hill(ordered, k: int, source: str = "direct") -> HillEstimate:
    """Hill estimator from distances already sorted in descending order.

    Averages ``log(ordered[i] / ordered[k])`` over the top ``k`` entries
    (0-based: entries ``0..k-1`` against pivot ``ordered[k]``).  The result
    is nonnegative and invariant to positive rescaling of all distances.
    """
    v = np.asarray(ordered, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected 1-d ordered distances, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFinite("distances must be finite")
    if v.shape[0] > 1 and np.any(np.diff(v) > 0):
        raise DomainError("distances must be sorted in descending order")
    gamma = _hill_from_ordered(v, int(k))
    return HillEstimate(gamma_hat=gamma, k=int(k), n=v.shape[0], location_scatter_source=source)


def mahalanobis(x, mu, sigma_inv) -> float:
    """Distance of one point from ``mu`` in the metric of ``sigma_inv``."""
    xv = np.asarray(x, dtype=float)
    mv = np.asarray(mu, dtype=float)
    si = np.asarray(sigma_inv, dtype=float)
    if xv.shape != mv.shape or xv.ndim != 1:
        raise DimensionMismatch(
            f"point and location must be vectors of equal length, got {xv.shape} and {mv.shape}"
        )
    if si.shape != (xv.shape[0], xv.shape[0]):
        raise DimensionMismatch(
            f"scatter inverse has shape {si.shape}, expected {(xv.shape[0], xv.shape[0])}"
        )
    diff = xv - mv
    q = float(np.einsum("i,ij,j->", diff, si, diff))
    return float(np.sqrt(max(q, 0.0)))


def mahalanobis_distances(sample, mu, sigma_inv) -> np.ndarray:
    """Row-wise distances of a sample from ``mu``; shape ``(n,)``.

    The quadratic forms are evaluated with einsum in a fixed summation
    order, so the values do not depend on the BLAS build or thread count.
    """
    x = as_sample(sample)
    mv = np.asarray(mu, dtype=float)
    si = np.asarray(sigma_inv, dtype=float)
    if mv.ndim != 1 or mv.shape[0] != x.shape[1]:
        raise DimensionMismatch(
            f"location has shape {mv.shape}, sample rows have length {x.shape[1]}"
        )
    if si.shape != (x.shape[1], x.shape[1]):
        raise DimensionMismatch(
            f"scatter inverse has shape {si.shape}, expected square of side {x.shape[1]}"
        )
    diff = x - mv
    q = np.einsum("ni,ij,nj->n", diff, si, diff)
    return np.sqrt(np.maximum(q, 0.0))


def separating_hill(sample, mu, sigma, k: int, source: str = TRUE_PARAMS) -> HillEstimate:
    """Separating Hill estimator of the extreme value index.

    Inverts ``sigma`` once, computes the distance of every row from ``mu``
    in that metric, sorts the distances in descending order and applies the
    Hill average at level ``k``.
    """
    sigma_inv = linalg.spd_inverse(sigma)
    dists = mahalanobis_distances(sample, mu, sigma_inv)
    ordered = order_desc(dists)
    gamma = _hill_from_ordered(ordered, int(k))
    return HillEstimate(
        gamma_hat=gamma, k=int(k), n=ordered.shape[0], location_scatter_source=source
    )


def sample_mean(sample) -> np.ndarray:
    """Coordinate-wise mean of the rows."""
    x = as_sample(sample)
    if x.shape[0] < 1:
        raise DegenerateSample("mean needs at least one row")
    return x.mean(axis=0)


def sample_covariance(sample) -> np.ndarray:
    """Sample covariance with the n-1 divisor.

    Raises :class:`DegenerateSample` when there are fewer than ``d + 1``
    rows or the result is not positive definite.
    """
    x = as_sample(sample)
    n, d = x.shape
    if n < d + 1:
        raise DegenerateSample(
            f"covariance of {n} rows in dimension {d} cannot be positive definite"
        )
    centered = x - x.mean(axis=0)
    cov = np.einsum("ni,nj->ij", centered, centered) / (n - 1)
    cov = 0.5 * (cov + cov.T)
    try:
        linalg.cholesky(cov)
    except NotPositiveDefinite as exc:
        raise DegenerateSample(f"sample covariance is degenerate: {exc}") from exc
    return cov


def _spatial_median_iter(x: np.ndarray, tol: float, max_iter: int):
    """Weiszfeld iteration with the standard adjustment at data points.

    Stops when the sum of unit vectors from the iterate toward the
    observations (the negative gradient of the objective) has norm at most
    ``d * tol * n``, a scale-free criterion.
    """
    n, d = x.shape
    m = x.mean(axis=0)
    scale = float(np.max(np.abs(x - m))) if n else 0.0
    collision_eps = 1e-12 * max(scale, 1e-300)
    grad_tol = d * tol * n
    for it in range(1, max_iter + 1):
        diff = x - m
        dist = np.linalg.norm(diff, axis=1)
        coll = dist <= collision_eps
        eta = int(np.count_nonzero(coll))
        if eta == n:
            # every observation sits at the iterate; it is the minimizer
            return m, it
        w = 1.0 / dist[~coll]
        unit_sum = np.einsum("n,ni->i", w, diff[~coll])
        g = float(np.linalg.norm(unit_sum))
        if eta > 0 and g <= eta:
            # subgradient optimality at a repeated data point
            return m, it
        if eta == 0 and g <= grad_tol:
            return m, it
        target = np.einsum("n,ni->i", w, x[~coll]) / w.sum()
        if eta > 0:
            step_frac = min(1.0, eta / g)
            m = (1.0 - step_frac) * target + step_frac * m
        else:
            m = target
    raise NotConverged(
        f"spatial median did not converge in {max_iter} iterations",
        last_iterate=m,
        iterations=max_iter,
    )


def spatial_median(sample, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """Geometric median of the rows by Weiszfeld iteration.

    Starts from the coordinate-wise mean.  Iterates that land exactly on a
    repeated observation are handled with the usual subgradient step
    instead of dividing by zero.  Raises :class:`NotConverged` (carrying
    the last iterate) if the gradient criterion is not met within
    ``max_iter`` iterations.
    """
    x = as_sample(sample)
    if x.shape[0] < 1:
        raise DegenerateSample("spatial median needs at least one row")
    m, _ = _spatial_median_iter(x, tol, max_iter)
    return m


def _tyler_iter(x: np.ndarray, mu_hat: np.ndarray, tol: float, max_iter: int):
    n, d = x.shape
    diff = x - mu_hat
    zero_rows = np.all(diff == 0.0, axis=1)
    if np.any(zero_rows):
        warnings.warn(
            f"dropping {int(np.count_nonzero(zero_rows))} rows equal to the "
            "location estimate",
            stacklevel=3,
        )
        diff = diff[~zero_rows]
    n_eff = diff.shape[0]
    if n_eff <= d:
        raise DegenerateSample(
            f"Tyler shape needs more than d={d} usable rows, have {n_eff}"
        )
    v = np.eye(d)
    for it in range(1, max_iter + 1):
        try:
            v_inv = linalg.spd_inverse(v)
        except NotPositiveDefinite as exc:
            raise SingularIterate(f"shape iterate lost positive definiteness: {exc}") from exc
        q = np.einsum("ni,ij,nj->n", diff, v_inv, diff)
        if not np.all(q > 0.0):
            raise SingularIterate("a row has nonpositive squared distance under the iterate")
        nxt = np.einsum("ni,nj->ij", diff / q[:, None], diff) * (d / n_eff)
        nxt = 0.5 * (nxt + nxt.T)
        trace = float(np.trace(nxt))
        if not np.isfinite(trace) or trace <= 0.0:
            raise SingularIterate("shape iterate has nonpositive trace")
        nxt *= d / trace
        delta = float(np.max(np.abs(nxt - v)))
        v = nxt
        if delta < tol:
            return v, it
    raise NotConverged(
        f"Tyler shape iteration did not converge in {max_iter} iterations",
        last_iterate=v,
        iterations=max_iter,
    )


def tyler_shape(sample, mu_hat, tol: float = 1e-9, max_iter: int = 500) -> np.ndarray:
    """Tyler's fixed-point shape estimator around a given location.

    Each step averages the outer products of the centered rows weighted by
    the inverse of their squared distance under the current iterate, then
    rescales to trace ``d``.  Rows exactly equal to ``mu_hat`` carry no
    directional information and are dropped with a warning.  The result is
    symmetric positive definite with trace ``d``.
    """
    x = as_sample(sample)
    mv = np.asarray(mu_hat, dtype=float)
    if mv.ndim != 1 or mv.shape[0] != x.shape[1]:
        raise DimensionMismatch(
            f"location has shape {mv.shape}, sample rows have length {x.shape[1]}"
        )
    v, _ = _tyler_iter(x, mv, tol, max_iter)
    return v


def estimate_location_scatter(
    sample,
    method: str,
    median_tol: float = 1e-10,
    shape_tol: float = 1e-9,
    max_iter: int = 500,
) -> LocationScatterEstimate:
    """Estimate location and scatter by the requested method.

    ``sample_mean_cov`` pairs the coordinate-wise mean with the sample
    covariance; ``spatial_median_tyler`` pairs the spatial median with
    Tyler's shape estimator (tolerances apply to that pair only).
    """
    x = as_sample(sample)
    if method == SAMPLE_MEAN_COV:
        mu_hat = sample_mean(x)
        sigma_hat = sample_covariance(x)
        iterations = 0
    elif method == SPATIAL_MEDIAN_TYLER:
        mu_hat, it_med = _spatial_median_iter(x, median_tol, max_iter)
        sigma_hat, it_shape = _tyler_iter(x, mu_hat, shape_tol, max_iter)
        iterations = it_med + it_shape
    else:
        raise ConfigError(
            f"unknown method {method!r}; expected one of {ESTIMATOR_METHODS}"
        )
    sigma_hat_inv = linalg.spd_inverse(sigma_hat)
    return LocationScatterEstimate(
        mu_hat=mu_hat,
        sigma_hat=sigma_hat,
        sigma_hat_inv=sigma_hat_inv,
        method=method,
        iterations=iterations,
        converged=True,
    )


def hill_plot(sample, loc_scatter: LocationScatterEstimate, k_values) -> list[tuple[int, float]]:
    """Hill values across a range of k, computing the distances once.

    Returns ``[(k, gamma_hat), ...]`` in the order the k values were given.
    """
    x = as_sample(sample)
    ks = [int(k) for k in k_values]
    dists = mahalanobis_distances(x, loc_scatter.mu_hat, loc_scatter.sigma_hat_inv)
    ordered = order_desc(dists)
    return [(k, _hill_from_ordered(ordered, k)) for k in ks]
