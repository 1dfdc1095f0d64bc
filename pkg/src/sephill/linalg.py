"""Dense symmetric-matrix helpers: Cholesky, SPD inverse, spectral norm.

Dimensions in this package are desk scale (a handful, rarely beyond a few
tens), so the factorizations below use plain O(d^3) loops.  That keeps the
arithmetic order fixed and the results bit-for-bit reproducible across BLAS
builds and thread counts, which the experiment harness relies on.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NonFinite, NonSymmetric, NotPositiveDefinite

#: Relative tolerance for the symmetry check.
SYMMETRY_RTOL = 1e-12

#: A Cholesky pivot below this fraction of the largest diagonal entry is
#: treated as a failure of positive definiteness rather than folded into a
#: noisy factor.
PIVOT_RTOL = 1e-14


def check_symmetric(m, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """Validate that ``m`` is a finite symmetric square matrix.

    Returns the input as a float ndarray.  Raises :class:`NonSymmetric`
    when the shape is not square or the asymmetry exceeds ``rtol`` relative
    to the largest entry, and :class:`NonFinite` for NaN/inf entries.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetric(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix entries must be finite")
    scale = float(np.max(np.abs(a)))
    if float(np.max(np.abs(a - a.T))) > rtol * scale:
        raise NonSymmetric(
            f"matrix is not symmetric within relative tolerance {rtol:g}"
        )
    return a


def cholesky(m) -> np.ndarray:
    """Lower-triangular Cholesky factor L with ``L @ L.T == m``.

    Parameters
    ----------
    m : array_like
        Symmetric positive definite matrix.

    Returns
    -------
    ndarray
        Lower triangular factor with strictly positive diagonal.

    Raises
    ------
    NotPositiveDefinite
        If any pivot falls to ``PIVOT_RTOL`` times the largest diagonal
        entry of ``m`` or below.  The check is relative, so rescaling the
        input by a positive constant cannot change the verdict.
    """
    a = check_symmetric(m)
    d = a.shape[0]
    diag_scale = float(np.max(np.abs(np.diag(a)))) if d else 0.0
    if d and diag_scale == 0.0:
        raise NotPositiveDefinite("matrix has a zero diagonal")
    floor = PIVOT_RTOL * diag_scale
    lower = np.zeros_like(a)
    for j in range(d):
        pivot = a[j, j] - np.dot(lower[j, :j], lower[j, :j])
        if pivot <= floor:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at column {j} is not positive "
                f"(floor {floor:.3e})"
            )
        ljj = np.sqrt(pivot)
        lower[j, j] = ljj
        for i in range(j + 1, d):
            lower[i, j] = (a[i, j] - np.dot(lower[i, :j], lower[j, :j])) / ljj
    return lower


def spd_inverse(m) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix.

    Factors ``m = L L^T`` and solves the two triangular systems against the
    identity, then symmetrizes the result so round-off cannot leave a
    lopsided inverse.
    """
    lower = cholesky(m)
    eye = np.eye(lower.shape[0])
    y = solve_triangular(lower, eye, lower=True)
    inv = solve_triangular(lower.T, y, lower=False)
    return 0.5 * (inv + inv.T)


def _jacobi_eigenvalues(a: np.ndarray, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by the cyclic Jacobi method.

    Sweeps over all super-diagonal positions, rotating each pair to zero,
    until the off-diagonal mass falls below 1e-14 of the Frobenius norm.
    Convergence is quadratic, so a handful of sweeps suffices at the
    dimensions we use.
    """
    a = a.copy()
    d = a.shape[0]
    if d == 1:
        return np.diag(a).copy()
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return np.zeros(d)
    for _ in range(max_sweeps):
        off = np.sqrt(
            max(float(np.sum(a * a)) - float(np.sum(np.diag(a) ** 2)), 0.0)
        )
        if off <= 1e-14 * norm:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) if tau != 0.0 else 1.0
                t /= abs(tau) + np.hypot(tau, 1.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.diag(a).copy()


def spectral_norm(m) -> float:
    """Largest absolute eigenvalue of a symmetric matrix.

    For the symmetric operands used throughout this package this equals the
    operator 2-norm.  Inputs failing the symmetry check raise
    :class:`NonSymmetric` rather than being silently symmetrized.
    """
    a = check_symmetric(m)
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(_jacobi_eigenvalues(a))))
