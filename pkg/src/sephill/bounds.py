"""Perturbation bounds for distance order statistics under estimated
location and scatter.

When the true location/scatter pair ``(mu, sigma)`` is replaced by an
estimate, every ordered distance moves by a controlled amount.  The control
is expressed through three nonnegative coefficients combined into a single
envelope constant ``m_n``; from it follow a quadratic envelope for squared
distances and a uniform bound on the change of the log-ratios entering the
Hill average.  This module computes those quantities and provides empirical
verifiers that check the inequalities on concrete ordered samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    DomainError,
    LengthMismatch,
    NonFinite,
    NonPositiveDistance,
)


@dataclass(frozen=True)
class PreconditionFlags:
    """Which of the envelope's applicability conditions hold."""

    m_lt_one: bool
    pivot_ok: bool
    a_lt_one: bool
    a_le_half: bool


@dataclass(frozen=True)
class PerturbationBound:
    """Envelope quantities for one (estimate, pivot) configuration.

    ``a_coef``/``b_coef``/``c_coef`` bound the perturbation of the squared
    quadratic form in the quadratic, linear and constant term; ``m_n`` is
    their scale-adjusted maximum.  Given a pivot distance ``r_pivot``, the
    derived ``a_n`` bounds the relative movement of distance ratios and
    ``b_n`` the movement of their logarithms (capped at log 2 once ``a_n``
    exceeds one half).  Fields not yet populated are NaN; ``preconds`` is
    None until a pivot has been supplied.
    """

    a_coef: float = math.nan
    b_coef: float = math.nan
    c_coef: float = math.nan
    m_n: float = math.nan
    lambda_max: float = math.nan
    r_pivot: float = math.nan
    a_n: float = math.nan
    b_n: float = math.nan
    preconds: PreconditionFlags | None = None


def pivot_threshold(m_n: float) -> float:
    """Smallest admissible pivot, ``m_n / (2 (1 - m_n))``; inf for m_n >= 1."""
    if m_n >= 1.0:
        return math.inf
    return m_n / (2.0 * (1.0 - m_n))


def perturbation_coefficients(
    mu, sigma_inv, mu_hat, sigma_hat_inv, lambda_max: float
) -> PerturbationBound:
    """Envelope coefficients for a location/scatter estimate.

    Parameters
    ----------
    mu, mu_hat : array_like
        True and estimated location.
    sigma_inv, sigma_hat_inv : array_like
        Inverses of the true and estimated scatter (symmetric).
    lambda_max : float
        Largest eigenvalue of the true scatter; must be positive.

    Returns
    -------
    PerturbationBound
        With ``a_coef``, ``b_coef``, ``c_coef``, ``m_n`` and ``lambda_max``
        populated.  All matrix norms are spectral, vector norms Euclidean.
    """
    mu = np.asarray(mu, dtype=float)
    mu_hat = np.asarray(mu_hat, dtype=float)
    if mu.ndim != 1 or mu.shape != mu_hat.shape:
        raise DimensionMismatch(
            f"locations must be vectors of equal length, got {mu.shape} and {mu_hat.shape}"
        )
    d = mu.shape[0]
    si = np.asarray(sigma_inv, dtype=float)
    shi = np.asarray(sigma_hat_inv, dtype=float)
    if si.shape != (d, d) or shi.shape != (d, d):
        raise DimensionMismatch(
            f"scatter inverses must be {d}x{d}, got {si.shape} and {shi.shape}"
        )
    if not (np.isfinite(lambda_max) and lambda_max > 0):
        raise DomainError("lambda_max must be a positive real")
    norm_mu = float(np.linalg.norm(mu))
    norm_mu_hat = float(np.linalg.norm(mu_hat))
    mu_gap = float(np.linalg.norm(mu - mu_hat))
    a_coef = linalg.spectral_norm(si - shi)
    b_coef = (norm_mu_hat + norm_mu) * a_coef + (
        linalg.spectral_norm(shi) + linalg.spectral_norm(si)
    ) * mu_gap
    c_coef = norm_mu**2 * a_coef + (norm_mu + norm_mu_hat) * linalg.spectral_norm(
        shi
    ) * mu_gap
    m_n = max(
        lambda_max * a_coef,
        math.sqrt(lambda_max) * (2.0 * norm_mu * a_coef + b_coef),
        a_coef * norm_mu**2 + b_coef * norm_mu + c_coef,
    )
    return PerturbationBound(
        a_coef=a_coef,
        b_coef=b_coef,
        c_coef=c_coef,
        m_n=m_n,
        lambda_max=float(lambda_max),
    )


def delta_poly(m_n: float, x: float) -> float:
    """Quadratic envelope ``m_n * (x**2 + x + 1)`` for squared-distance error."""
    if m_n < 0:
        raise DomainError("the envelope constant must be nonnegative")
    return m_n * (x * x + x + 1.0)


def log_ratio_bound(m_n: float, r_pivot: float) -> PerturbationBound:
    """Log-ratio envelope for a given pivot distance.

    Computes ``a_n = m_n * (1 + 1/r + 1/r**2)`` and the capped log bound
    ``b_n`` (``log(1/(1-a_n))`` while ``a_n <= 1/2``, ``log 2`` beyond),
    together with the four applicability flags.
    """
    if not r_pivot > 0:
        raise DomainError("r_pivot must be strictly positive")
    if m_n < 0 or not math.isfinite(m_n):
        raise DomainError("the envelope constant must be finite and nonnegative")
    m_n, r_pivot = float(m_n), float(r_pivot)
    a_n = m_n + m_n / r_pivot + m_n / (r_pivot * r_pivot)
    if a_n <= 0.5:
        b_n = -math.log1p(-a_n)
    else:
        b_n = math.log(2.0)
    flags = PreconditionFlags(
        m_lt_one=m_n < 1.0,
        pivot_ok=m_n < 1.0 and r_pivot > pivot_threshold(m_n),
        a_lt_one=a_n < 1.0,
        a_le_half=a_n <= 0.5,
    )
    return PerturbationBound(
        m_n=m_n, r_pivot=r_pivot, a_n=a_n, b_n=b_n, preconds=flags
    )


def complete_bound(coefficients: PerturbationBound, r_pivot: float) -> PerturbationBound:
    """Fill the pivot-dependent half of a coefficient-only bound."""
    pivot_part = log_ratio_bound(coefficients.m_n, r_pivot)
    return replace(
        coefficients,
        r_pivot=pivot_part.r_pivot,
        a_n=pivot_part.a_n,
        b_n=pivot_part.b_n,
        preconds=pivot_part.preconds,
    )


@dataclass(frozen=True)
class EpsilonLemmaReport:
    """Outcome of checking the squared-distance envelope at one index."""

    applicable: bool
    violations: int
    max_slack: float


@dataclass(frozen=True)
class LogRatioReport:
    """Outcome of checking the log-ratio envelope at indices 1..l."""

    applicable: bool
    violations: int
    max_ratio_gap: float
    bound: float


def _check_ordered(values, name: str) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-d, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFinite(f"{name} must be finite")
    if v.shape[0] > 1 and np.any(np.diff(v) > 0):
        raise DomainError(f"{name} must be sorted in descending order")
    return v


def verify_epsilon_lemma(true_sq_dists, est_sq_dists, m_n: float, l: int) -> EpsilonLemmaReport:
    """Check the squared-distance envelope at index ``l`` (1-based).

    ``applicable`` reflects whether the envelope's preconditions hold for
    the pivot ``sqrt(true_sq_dists[l-1])``; when they do, the inequality
    ``|est^2 - true^2| <= delta_poly(m_n, pivot)`` is evaluated there and
    ``max_slack`` reports the margin by which it holds.
    """
    t = _check_ordered(true_sq_dists, "true squared distances")
    e = _check_ordered(est_sq_dists, "estimated squared distances")
    if t.shape[0] != e.shape[0]:
        raise LengthMismatch(
            f"sequences have lengths {t.shape[0]} and {e.shape[0]}"
        )
    n = t.shape[0]
    if not 1 <= l <= n:
        raise DomainError(f"l must satisfy 1 <= l <= {n}, got {l}")
    r_l = math.sqrt(max(float(t[l - 1]), 0.0))
    applicable = m_n < 1.0 and r_l > pivot_threshold(m_n)
    if not applicable:
        return EpsilonLemmaReport(applicable=False, violations=0, max_slack=math.nan)
    eps = abs(float(e[l - 1]) - float(t[l - 1]))
    envelope = delta_poly(m_n, r_l)
    return EpsilonLemmaReport(
        applicable=True,
        violations=int(eps > envelope),
        max_slack=envelope - eps,
    )


def verify_log_ratio_lemma(true_dists, est_dists, m_n: float, l: int) -> LogRatioReport:
    """Check the log-ratio envelope for every index up to ``l`` (1-based).

    Compares ``log(est[i]/est[l])`` with ``log(true[i]/true[l])`` for
    ``i = 1..l`` against the bound from :func:`log_ratio_bound` at the true
    pivot.  All distances must be strictly positive.
    """
    t = _check_ordered(true_dists, "true distances")
    e = _check_ordered(est_dists, "estimated distances")
    if t.shape[0] != e.shape[0]:
        raise LengthMismatch(
            f"sequences have lengths {t.shape[0]} and {e.shape[0]}"
        )
    n = t.shape[0]
    if not 1 <= l <= n:
        raise DomainError(f"l must satisfy 1 <= l <= {n}, got {l}")
    if not (np.all(t > 0.0) and np.all(e > 0.0)):
        raise NonPositiveDistance("all distances must be strictly positive")
    pivot_part = log_ratio_bound(m_n, float(t[l - 1]))
    flags = pivot_part.preconds
    applicable = flags.m_lt_one and flags.pivot_ok and flags.a_lt_one
    if not applicable:
        return LogRatioReport(
            applicable=False, violations=0, max_ratio_gap=math.nan, bound=math.nan
        )
    bound = -math.log1p(-pivot_part.a_n)
    gaps = np.abs(
        np.log(e[:l] / e[l - 1]) - np.log(t[:l] / t[l - 1])
    )
    return LogRatioReport(
        applicable=True,
        violations=int(np.count_nonzero(gaps > bound)),
        max_ratio_gap=float(np.max(gaps)),
        bound=bound,
    )
