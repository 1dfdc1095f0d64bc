"""Deterministic Monte Carlo harness for the separating Hill estimator.

An experiment fixes an elliptical model, a set of sample sizes, a rule for
the tail fraction k, an estimation method and a replication count.  Each
replication is an independent task addressed by ``(base_seed, rep_id)``, so
results are bit-identical no matter how many workers execute them, and any
single record can be recomputed in isolation.

Per replication the harness estimates the extreme value index twice — once
with the true location/scatter and once with the configured estimator —
and attaches the perturbation-envelope report comparing the two.  The
aggregates summarize the normalized errors ``sqrt(k) * (gamma_hat - gamma)``
whose limiting law the experiments are designed to check.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import bounds as bounds_mod
from . import linalg
from .distributions import EllipticalModel, RngStream, sample_elliptical
from .errors import (
    BetaOutOfRange,
    ConfigError,
    DomainError,
    FailureCapExceeded,
    SepHillError,
    TooFewValues,
)
from .estimators import (
    SAMPLE_MEAN_COV,
    SPATIAL_MEDIAN_TYLER,
    TRUE_PARAMS,
    LocationScatterEstimate,
    estimate_location_scatter,
    mahalanobis_distances,
    order_desc,
    univariate_hill,
)

METHODS = (TRUE_PARAMS, SAMPLE_MEAN_COV, SPATIAL_MEDIAN_TYLER)

#: Fraction of replications per sample size allowed to fail before the
#: whole experiment aborts instead of reporting biased aggregates.
FAILURE_CAP_FRACTION = 0.01


def k_schedule(n: int, beta: float) -> int:
    """Tail fraction ``k = max(1, ceil(n**beta))`` clamped to ``n - 2``.

    Any exponent strictly between 0 and 1 keeps ``k`` growing while
    ``k / n`` vanishes, which is what the limit theorems require.
    """
    if not 0.0 < beta < 1.0:
        raise BetaOutOfRange(f"beta must lie strictly between 0 and 1, got {beta}")
    n = int(n)
    if n < 4:
        raise ConfigError(f"need n >= 4 for a meaningful tail fraction, got {n}")
    k = max(1, math.ceil(n**beta))
    return min(k, n - 2)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Full description of one experiment.

    The tail fraction is either derived from ``k_beta`` through
    :func:`k_schedule` or given explicitly as ``k_values`` aligned with
    ``n_values``.
    """

    model: EllipticalModel
    n_values: tuple[int, ...]
    replications: int
    base_seed: int
    estimator_method: str = SAMPLE_MEAN_COV
    k_beta: float | None = 0.5
    k_values: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if self.k_values is not None:
            object.__setattr__(
                self, "k_values", tuple(int(k) for k in self.k_values)
            )
        if not self.n_values:
            raise ConfigError("n_values must not be empty")
        if self.estimator_method not in METHODS:
            raise ConfigError(
                f"unknown estimator_method {self.estimator_method!r}; "
                f"expected one of {METHODS}"
            )
        if int(self.replications) < 1:
            raise ConfigError("replications must be at least 1")
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "base_seed", int(self.base_seed))
        if self.k_values is not None:
            if len(self.k_values) != len(self.n_values):
                raise ConfigError(
                    "k_values must align with n_values "
                    f"({len(self.k_values)} vs {len(self.n_values)})"
                )
            for n, k in zip(self.n_values, self.k_values):
                if not 1 <= k < n:
                    raise ConfigError(f"need 1 <= k < n, got k={k} for n={n}")
        else:
            if self.k_beta is None:
                raise ConfigError("either k_beta or k_values must be given")
            for n in self.n_values:
                k_schedule(n, self.k_beta)

    def k_for(self, n: int) -> int:
        """Tail fraction for sample size ``n`` under this configuration."""
        if self.k_values is not None:
            try:
                return self.k_values[self.n_values.index(int(n))]
            except ValueError:
                raise ConfigError(f"n={n} is not part of this experiment") from None
        return k_schedule(n, self.k_beta)


@dataclass(frozen=True)
class ReplicationRecord:
    """One replication's estimates and its perturbation-envelope report."""

    rep_id: int
    n: int
    k: int
    gamma_hat_true: float
    gamma_hat_est: float
    normalized_error: float
    estimator_gap: float
    bound_report: bounds_mod.PerturbationBound | None
    seed_used: int
    failed: bool = False
    failure: str | None = None


@dataclass(frozen=True)
class AggregateStats:
    """Summary of the successful replications at one sample size."""

    n: int
    k: int
    count: int
    failures: int
    mean_normalized_error: float
    sd_normalized_error: float
    median_normalized_error: float
    q05_normalized_error: float
    q95_normalized_error: float
    median_abs_error: float
    p95_scaled_gap: float
    target_mean: float | None
    target_sd: float
    ks_stat: float | None


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Records plus per-sample-size aggregates; aggregates are a pure
    function of the records, so they can always be recomputed."""

    config: ExperimentConfig
    records: tuple[ReplicationRecord, ...]
    aggregates: tuple[AggregateStats, ...]


def run_replication(config: ExperimentConfig, n: int, rep_id: int) -> ReplicationRecord:
    """Run a single replication.

    Samples ``n`` rows on the stream ``(base_seed, rep_id)``, estimates the
    index under the true parameters and under the configured method, and
    fills the perturbation report using the (k+1)-th largest true distance
    as pivot.  Estimator errors propagate to the caller.
    """
    model = config.model
    n = int(n)
    k = config.k_for(n)
    gamma = model.variate.gamma
    stream = RngStream(config.base_seed, rep_id)
    sample, _ = sample_elliptical(model, n, stream)

    sigma_inv = linalg.spd_inverse(model.sigma)
    ordered_true = order_desc(mahalanobis_distances(sample, model.mu, sigma_inv))
    gamma_true = univariate_hill(ordered_true, k, source=TRUE_PARAMS).gamma_hat

    method = config.estimator_method
    if method == TRUE_PARAMS:
        gamma_est = gamma_true
        loc = LocationScatterEstimate(
            mu_hat=model.mu,
            sigma_hat=model.sigma,
            sigma_hat_inv=sigma_inv,
            method=TRUE_PARAMS,
        )
    else:
        loc = estimate_location_scatter(sample, method)
        ordered_est = order_desc(
            mahalanobis_distances(sample, loc.mu_hat, loc.sigma_hat_inv)
        )
        gamma_est = univariate_hill(
            ordered_est, k, source=f"estimated:{method}"
        ).gamma_hat

    if method == SPATIAL_MEDIAN_TYLER:
        # Tyler's estimator targets the scatter normalized to trace d (the
        # estimator itself is scale-free), so the envelope must compare it
        # against the same normalization of the truth; distances rescale
        # accordingly.
        scale = float(np.trace(model.sigma)) / model.dim
        ref_sigma = model.sigma / scale
        ref_sigma_inv = sigma_inv * scale
        ref_ordered = ordered_true * math.sqrt(scale)
    else:
        ref_sigma = model.sigma
        ref_sigma_inv = sigma_inv
        ref_ordered = ordered_true

    coeffs = bounds_mod.perturbation_coefficients(
        model.mu,
        ref_sigma_inv,
        loc.mu_hat,
        loc.sigma_hat_inv,
        linalg.spectral_norm(ref_sigma),
    )
    report = bounds_mod.complete_bound(coeffs, float(ref_ordered[k]))

    return ReplicationRecord(
        rep_id=int(rep_id),
        n=n,
        k=k,
        gamma_hat_true=gamma_true,
        gamma_hat_est=gamma_est,
        normalized_error=math.sqrt(k) * (gamma_est - gamma),
        estimator_gap=gamma_est - gamma_true,
        bound_report=report,
        seed_used=config.base_seed,
    )


def _run_replication_tagged(config: ExperimentConfig, n: int, rep_id: int) -> ReplicationRecord:
    try:
        return run_replication(config, n, rep_id)
    except SepHillError as exc:
        return ReplicationRecord(
            rep_id=int(rep_id),
            n=int(n),
            k=config.k_for(n),
            gamma_hat_true=math.nan,
            gamma_hat_est=math.nan,
            normalized_error=math.nan,
            estimator_gap=math.nan,
            bound_report=None,
            seed_used=config.base_seed,
            failed=True,
            failure=f"{type(exc).__name__}: {exc}",
        )


def aggregate_records(
    records,
    n: int,
    k: int,
    gamma: float,
    target_mean: float | None,
) -> AggregateStats:
    """Summary statistics for the successful records at one sample size.

    ``target_mean`` is the centre of the limiting normal law when it is
    known; the KS statistic is only reported in that case.
    """
    ok = [r for r in records if not r.failed]
    failures = len(records) - len(ok)
    err = np.array([r.normalized_error for r in ok], dtype=float)
    abs_err = np.abs(
        np.array([r.gamma_hat_est for r in ok], dtype=float) - gamma
    )
    scaled_gap = math.sqrt(k) * np.abs(
        np.array([r.estimator_gap for r in ok], dtype=float)
    )
    sd = float(np.std(err, ddof=1)) if err.shape[0] >= 2 else math.nan
    if target_mean is None:
        ks = None
    else:
        ks = ks_statistic(err, lambda x: ndtr((x - target_mean) / gamma))
    return AggregateStats(
        n=int(n),
        k=int(k),
        count=len(ok),
        failures=failures,
        mean_normalized_error=float(np.mean(err)),
        sd_normalized_error=sd,
        median_normalized_error=float(np.median(err)),
        q05_normalized_error=float(np.quantile(err, 0.05)),
        q95_normalized_error=float(np.quantile(err, 0.95)),
        median_abs_error=float(np.median(abs_err)),
        p95_scaled_gap=float(np.quantile(scaled_gap, 0.95)),
        target_mean=target_mean,
        target_sd=gamma,
        ks_stat=ks,
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all replications and aggregate with a fixed-order reduction.

    Replications may execute on up to ``workers`` threads; since every
    task is a pure function of ``(base_seed, rep_id)`` and the reduction
    iterates records in rep_id order, the result does not depend on the
    scheduling.  Aborts with :class:`FailureCapExceeded` once more than
    1% of the replications at any sample size fail.
    """
    if not isinstance(config, ExperimentConfig):
        raise ConfigError("run_experiment needs an ExperimentConfig")
    gamma = config.model.variate.gamma
    if config.estimator_method == SAMPLE_MEAN_COV and gamma >= 0.25:
        warnings.warn(
            "sample covariance needs finite fourth radial moments "
            f"(extreme value index {gamma:g} >= 1/4); consider the "
            "spatial_median_tyler method",
            stacklevel=2,
        )
    m = config.replications
    tasks = [(n, rep) for n in config.n_values for rep in range(m)]
    results: dict[tuple[int, int], ReplicationRecord] = {}
    if int(workers) <= 1:
        for n, rep in tasks:
            results[(n, rep)] = _run_replication_tagged(config, n, rep)
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            futures = {
                pool.submit(_run_replication_tagged, config, n, rep): (n, rep)
                for n, rep in tasks
            }
            for fut, key in futures.items():
                results[key] = fut.result()

    records = tuple(results[(n, rep)] for n, rep in tasks)
    target_mean = config.model.variate.limit_bias
    aggregates = []
    for n in config.n_values:
        recs = [results[(n, rep)] for rep in range(m)]
        failures = sum(1 for r in recs if r.failed)
        if failures > FAILURE_CAP_FRACTION * m:
            tags = [r.failure for r in recs if r.failed][:5]
            raise FailureCapExceeded(
                f"{failures} of {m} replications failed at n={n} "
                f"(cap {FAILURE_CAP_FRACTION:.0%}); first failures: {tags}"
            )
        aggregates.append(
            aggregate_records(recs, n, config.k_for(n), gamma, target_mean)
        )
    return ExperimentResult(
        config=config, records=records, aggregates=tuple(aggregates)
    )


def ks_statistic(values, cdf) -> float:
    """Sup-distance between the empirical CDF of ``values`` and ``cdf``."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.shape[0]
    if n < 1:
        raise TooFewValues("need at least one value")
    f = np.asarray(cdf(x), dtype=float)
    steps = np.arange(1, n + 1, dtype=float) / n
    return float(max(np.max(steps - f), np.max(f - (steps - 1.0 / n))))


def ks_threshold(n: int, level: float) -> float:
    """Asymptotic Kolmogorov critical value ``c(level) / sqrt(n)``."""
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie strictly between 0 and 1")
    return math.sqrt(-0.5 * math.log(level / 2.0)) / math.sqrt(n)


@dataclass(frozen=True)
class NormalityDiagnostics:
    """Standardized moment checks and KS distance against a target normal."""

    z_mean: float
    z_sd: float
    ks_stat: float


def normality_diagnostics(values, target_mean: float, target_sd: float) -> NormalityDiagnostics:
    """Compare a sample against the normal law N(target_mean, target_sd**2).

    ``z_mean`` standardizes the sample mean by ``target_sd / sqrt(M)``;
    ``z_sd`` standardizes the sample standard deviation by
    ``target_sd / sqrt(2 M)``.  Requires at least 30 values.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 30:
        raise TooFewValues("normality diagnostics need at least 30 values")
    if not target_sd > 0:
        raise DomainError("target_sd must be positive")
    m = arr.shape[0]
    z_mean = (float(np.mean(arr)) - target_mean) / (target_sd / math.sqrt(m))
    z_sd = (float(np.std(arr, ddof=1)) - target_sd) / (
        target_sd / math.sqrt(2.0 * m)
    )
    ks = ks_statistic(arr, lambda x: ndtr((x - target_mean) / target_sd))
    return NormalityDiagnostics(z_mean=z_mean, z_sd=z_sd, ks_stat=ks)
