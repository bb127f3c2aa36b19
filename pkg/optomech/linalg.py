"""
Small dense complex matrix kernels.

Matrices here are at most 6x6: eigendecomposition with a residual guarantee,
resolvent solves over a frequency grid, and matching of eigenvalues to
branches along a parameter sweep.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConditioningError, NumericError
from .frozen import Frozen


EIG_RESIDUAL_TOL = 1e-9
SOLVE_RESIDUAL_TOL = 1e-10
MAX_CONDITION = 1e12
TIE_TOL = 1e-12


class EigenSet(Frozen):
    """
    Eigenvalues and eigenvectors of one coefficient matrix.

    Attributes
    ----------
    values : np.ndarray
        n complex eigenvalues (rad/s), unordered.
    vectors : np.ndarray
        n x n matrix; column j pairs with values[j].
    residuals : np.ndarray
        ||M v - λ v|| / ||M|| per pair.
    """
    def __init__(self, values, vectors, residuals):
        self.values = np.asarray(values, dtype=complex)
        self.vectors = np.asarray(vectors, dtype=complex)
        self.residuals = np.asarray(residuals, dtype=float)


def _residuals(M, values, vectors):
    """Relative eigenpair residuals."""
    scale = np.linalg.norm(M, 2)
    if scale == 0:
        return np.zeros(len(values))
    res = M @ vectors - vectors * values
    norms = np.linalg.norm(vectors, axis=0)
    return np.linalg.norm(res, axis=0) / (scale * np.where(norms > 0,
                                                           norms, 1.0))


def characteristic_polynomial(M):
    """
    Coefficients of det(λI - M), highest degree first.

    Uses the Faddeev-LeVerrier recursion, which is adequate for n <= 6.

    Parameters
    ----------
    M : np.ndarray
        Square complex matrix.

    Returns
    -------
    np.ndarray
        n + 1 complex coefficients, leading coefficient 1.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    N = np.zeros_like(M)
    identity = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        N = M @ N + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(M @ N) / k
    return coeffs


def eigvals_companion(M):
    """
    Eigenvalues from the roots of the characteristic polynomial.

    The polynomial is scaled by ||M|| before its companion matrix is
    diagonalised, then the roots are rescaled.

    Parameters
    ----------
    M : np.ndarray
        Square complex matrix.

    Returns
    -------
    np.ndarray
        n complex eigenvalues.
    """
    M = np.asarray(M, dtype=complex)
    scale = np.linalg.norm(M, 2)
    if scale == 0:
        return np.zeros(M.shape[0], dtype=complex)
    return np.roots(characteristic_polynomial(M / scale)) * scale


def eigendecompose(M):
    """
    Eigendecomposition with a residual bound.

    The LAPACK path (Hessenberg reduction and shifted QR) is tried first.
    If a residual misses the bound, eigenvalues are recomputed from the
    characteristic polynomial and eigenvectors taken from the null space
    of M - λI.

    Parameters
    ----------
    M : np.ndarray
        n x n complex matrix with finite entries.

    Returns
    -------
    EigenSet

    Raises
    ------
    NumericError
        Non-finite input, non-convergence, or residual bound still missed
        after the fallback.
    """
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise NumericError("Matrix has non-finite entries", matrix=M)

    try:
        values, vectors = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        values, vectors = None, None
        failure = str(exc)
    else:
        residuals = _residuals(M, values, vectors)
        if np.all(residuals < EIG_RESIDUAL_TOL):
            return EigenSet(values, vectors, residuals)
        failure = f"QR residual {residuals.max():.3e}"

    values = eigvals_companion(M)
    vectors = np.empty_like(M)
    for j, value in enumerate(values):
        _, _, vh = np.linalg.svd(M - value * np.eye(M.shape[0]))
        vectors[:, j] = vh[-1].conj()
    residuals = _residuals(M, values, vectors)
    if not np.all(residuals < EIG_RESIDUAL_TOL):
        raise NumericError(
            f"Eigendecomposition failed ({failure}; companion residual "
            f"{residuals.max():.3e})", matrix=M)
    return EigenSet(values, vectors, residuals)


def resolvent_solve(M, omega, rhs):
    """
    Solve (M - iωI) X = rhs at one or many frequencies.

    Parameters
    ----------
    M : np.ndarray
        n x n complex matrix (rad/s).
    omega : float or np.ndarray
        Angular frequency, or 1-D array of them.
    rhs : np.ndarray
        n x k right-hand side.

    Returns
    -------
    np.ndarray
        n x k solution for scalar omega, otherwise (len(omega), n, k).

    Raises
    ------
    ConditioningError
        If the 2-norm condition number exceeds 1e12 at any frequency.
    NumericError
        If the backward error exceeds 1e-10.
    """
    M = np.asarray(M, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    scalar = np.ndim(omega) == 0
    omegas = np.atleast_1d(np.asarray(omega, dtype=float))
    n = M.shape[0]
    if rhs.ndim == 1:
        rhs = rhs[:, None]

    A = M[None, :, :] - 1j * omegas[:, None, None] * np.eye(n)[None, :, :]
    condition = np.linalg.cond(A)
    worst = int(np.argmax(condition))
    if not np.isfinite(condition[worst]) or condition[worst] > MAX_CONDITION:
        raise ConditioningError(omegas[worst], condition[worst], matrix=M)

    b = np.broadcast_to(rhs, (len(omegas),) + rhs.shape)
    try:
        X = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(omegas[worst], np.inf, matrix=M) from exc

    residual = np.linalg.norm(A @ X - b, axis=(1, 2))
    scale = (np.linalg.norm(A, axis=(1, 2)) * np.linalg.norm(X, axis=(1, 2))
             + np.linalg.norm(b, axis=(1, 2)))
    backward = residual / np.where(scale > 0, scale, 1.0)
    if np.any(backward > SOLVE_RESIDUAL_TOL):
        bad = int(np.argmax(backward))
        raise NumericError(
            f"Resolvent solve residual {backward[bad]:.3e} at "
            f"omega={omegas[bad]:.6e} rad/s", matrix=M)
    return X[0] if scalar else X


class BranchTrack(Frozen):
    """
    Eigenvalues sorted into continuous branches.

    Attributes
    ----------
    values : np.ndarray
        (sweep length, n) array; column j is branch j.
    ties : np.ndarray
        Boolean per sweep point; True where two candidate distances were
        within 1e-12 (relative) and the tie was broken by index.
    """
    def __init__(self, values, ties):
        self.values = np.asarray(values, dtype=complex)
        self.ties = np.asarray(ties, dtype=bool)

    @property
    def branches(self):
        """List of n per-branch arrays."""
        return [self.values[:, j] for j in range(self.values.shape[1])]

    @property
    def ambiguous(self):
        """True if any assignment was a tie."""
        return bool(self.ties.any())


def _assign(references, candidates):
    """
    Minimal-total-distance assignment of candidates to references.

    Returns the reordered candidates and a tie flag.
    """
    cost = np.abs(references[:, None] - candidates[None, :])
    rows, cols = linear_sum_assignment(cost)
    ordered = np.empty_like(references)
    ordered[rows] = candidates[cols]

    tie = False
    if len(candidates) > 1:
        ranked = np.sort(cost, axis=1)
        scale = np.maximum(np.abs(references), 1.0)
        tie = bool(np.any(ranked[:, 1] - ranked[:, 0] <= TIE_TOL * scale))
    return ordered, tie


def track_branches(sweep, anchors):
    """
    Follow eigenvalues continuously along a sweep.

    The first point is matched to the anchors. Every later point is matched
    to the previous point's branch values. Both matchings minimise the
    total distance.

    Parameters
    ----------
    sweep : list of EigenSet or array-like
        Ordered eigenvalue sets, each of length n.
    anchors : array-like
        n complex anchor values for the first point.

    Returns
    -------
    BranchTrack
    """
    if len(sweep) == 0:
        raise ValueError("Sweep must contain at least one eigenvalue set")
    anchors = np.asarray(anchors, dtype=complex)
    points = [np.asarray(getattr(entry, "values", entry), dtype=complex)
              for entry in sweep]
    if any(len(p) != len(anchors) for p in points):
        raise ValueError(
            f"Every eigenvalue set must have {len(anchors)} values")

    values = np.empty((len(points), len(anchors)), dtype=complex)
    ties = np.zeros(len(points), dtype=bool)
    reference = anchors
    for i, candidates in enumerate(points):
        values[i], ties[i] = _assign(reference, candidates)
        reference = values[i]
    return BranchTrack(values, ties)
