"""
Elementary symmetric functions and Newton transformations.

sigma_j of an eigenvalue vector is computed with the one-pass recursion on
the partial products (the coefficients of prod(1 + t*lambda_i)), never by
subset enumeration; `sigma_enumerate` keeps the enumeration as an oracle for
short vectors. Matrix arguments go through their eigenvalues (symmetric
matrices only), so sigma_j(B) = sigma_j(eig(B)).

All functions accept a trailing-axis batch: a (..., N) array of eigenvalue
vectors or a (..., N, N) stack of symmetric matrices.

Usage:
    from symfun.symmetric import sigma, newton_tensor

    sigma(2, [1.0, 2.0, 3.0])           # 11.0
    newton_tensor(1, np.diag([1, 2, 3]))  # diag(5, 4, 3)
"""

import itertools
import logging
import math

import numpy as np

from core.exceptions import DomainError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
ENUMERATION_LIMIT = 8


def as_eigenvalues(lam):
    """Coerce to a float array of shape (..., N) with N >= 1."""
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0 or lam.shape[-1] < 1:
        raise DomainError("eigenvalue vector must have at least one entry")
    return lam


def as_symmetric(B, tol=SYMMETRY_TOL):
    """
    Coerce to a (..., N, N) float array, checking symmetry.

    Args:
        B: Square matrix or stack of square matrices
        tol: Allowed |B - B^T| relative to max(1, |B|)

    Returns:
        The symmetrized array (B + B^T) / 2

    Raises:
        DomainError: If B is not square or not symmetric within tol
    """
    B = np.asarray(B, dtype=float)
    if B.ndim < 2 or B.shape[-1] != B.shape[-2]:
        raise DomainError(f"expected square matrix, got shape {B.shape}")
    Bt = np.swapaxes(B, -1, -2)
    scale = max(1.0, float(np.max(np.abs(B)))) if B.size else 1.0
    if B.size and np.max(np.abs(B - Bt)) > tol * scale:
        raise DomainError("matrix is not symmetric")
    return 0.5 * (B + Bt)


def sigma_all(lam):
    """
    All elementary symmetric functions sigma_0..sigma_N of lam.

    Args:
        lam: (..., N) eigenvalue vectors

    Returns:
        (..., N+1) array with sigma_0 = 1
    """
    lam = as_eigenvalues(lam)
    N = lam.shape[-1]
    out = np.zeros(lam.shape[:-1] + (N + 1,))
    out[..., 0] = 1.0
    for i in range(N):
        for j in range(min(i + 1, N), 0, -1):
            out[..., j] += lam[..., i] * out[..., j - 1]
    return out


def sigma(j, lam):
    """
    sigma_j(lam) for 0 <= j <= N.

    Raises:
        DomainError: If j < 0 or j > N
    """
    lam = as_eigenvalues(lam)
    N = lam.shape[-1]
    if j < 0 or j > N:
        raise DomainError(f"sigma_{j} undefined for vectors of length {N}")
    if j == 0:
        return np.ones(lam.shape[:-1]) if lam.ndim > 1 else 1.0
    out = np.zeros(lam.shape[:-1] + (j + 1,))
    out[..., 0] = 1.0
    for i in range(N):
        for m in range(min(i + 1, j), 0, -1):
            out[..., m] += lam[..., i] * out[..., m - 1]
    value = out[..., j]
    return float(value) if np.ndim(value) == 0 else value


def sigma_enumerate(j, lam):
    """Subset-enumeration oracle for sigma_j; only for N <= 8."""
    lam = [float(v) for v in np.asarray(lam, dtype=float).ravel()]
    N = len(lam)
    if N > ENUMERATION_LIMIT:
        raise DomainError(f"enumeration oracle limited to N <= {ENUMERATION_LIMIT}")
    if j < 0 or j > N:
        raise DomainError(f"sigma_{j} undefined for vectors of length {N}")
    return math.fsum(math.prod(c) for c in itertools.combinations(lam, j))


def eigenvalues(B):
    """Eigenvalues of a symmetric matrix (or stack), ascending."""
    return np.linalg.eigvalsh(as_symmetric(B))


def sigma_matrix(j, B):
    """sigma_j of a symmetric matrix, through its eigenvalues."""
    return sigma(j, eigenvalues(B))


def newton_tensor(j, B):
    """
    Newton transformation T_j(B) = sum_i (-1)^i sigma_{j-i}(B) B^i.

    Built with the recursion T_0 = I, T_i = sigma_i(B) I - B T_{i-1}, which
    expands to the alternating sum. Satisfies tr(T_j(B) B) = (j+1) sigma_{j+1}(B).

    Args:
        j: Order, 0 <= j <= N-1
        B: (..., N, N) symmetric matrix or stack

    Returns:
        (..., N, N) array
    """
    B = as_symmetric(B)
    N = B.shape[-1]
    if j < 0 or j > N - 1:
        raise DomainError(f"T_{j} undefined for {N}x{N} matrices")
    sigmas = sigma_all(np.linalg.eigvalsh(B))
    eye = np.broadcast_to(np.eye(N), B.shape)
    T = eye.copy()
    for i in range(1, j + 1):
        T = sigmas[..., i][..., None, None] * eye - B @ T
    return 0.5 * (T + np.swapaxes(T, -1, -2))


def characteristic_expansion(B, t):
    """sum_j sigma_j(B) t^j, which equals det(I + tB)."""
    sigmas = sigma_all(np.linalg.eigvalsh(as_symmetric(B)))
    powers = t ** np.arange(sigmas.shape[-1])
    return np.sum(sigmas * powers, axis=-1)
