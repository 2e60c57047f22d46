"""
Garding cones and the inequalities that live on them.

Gamma_k^+ (strict) holds when sigma_1..sigma_k are all positive, Gamma_k
(closed) when they are all nonnegative. Membership is decided with an
absolute tolerance; values inside +/- tol count as closed-cone members but
not strict ones.

The Newton-MacLaurin constants are written for eigenvalue vectors of length
N read against the ambient dimension n = N + 1 (second fundamental forms of
hypersurfaces in R^n have N = n - 1 eigenvalues); with that reading both
gaps vanish at the identity vector.
"""

import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from core.exceptions import DomainError, PreconditionError
from symfun.symmetric import as_eigenvalues, sigma_all, sigma_matrix

logger = logging.getLogger(__name__)


def default_cone_tol():
    return getattr(settings, 'GBC_CONE_TOL', 1e-10)


@dataclass(frozen=True)
class ConeLabel:
    """Gamma_k^+ when strict, Gamma_k otherwise."""

    k: int
    strict: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"cone order must be positive, got {self.k}")

    def __str__(self):
        return f"Gamma_{self.k}{'^+' if self.strict else ''}"


def cone_membership(lam, cone, tol=None):
    """
    Test lam against a Garding cone.

    Args:
        lam: Eigenvalue vector of length N >= cone.k
        cone: ConeLabel
        tol: Absolute tolerance on the sigma_j values

    Returns:
        bool
    """
    tol = default_cone_tol() if tol is None else tol
    lam = as_eigenvalues(lam)
    if cone.k > lam.shape[-1]:
        raise DomainError(f"{cone} needs at least {cone.k} eigenvalues, got {lam.shape[-1]}")
    sig = sigma_all(lam)[1:cone.k + 1]
    if cone.strict:
        return bool((sig > tol).all())
    return bool((sig >= -tol).all())


def newton_maclaurin_gap(lam, m):
    """
    Raw Newton-MacLaurin gaps for lam in Gamma_m^+.

    gap1 = m(n-m-1)/((m+1)(n-m)) - sigma_{m-1} sigma_{m+1} / sigma_m^2
    gap2 = sigma_1 sigma_{m-1} / sigma_m - m(n-1)/(n-m)

    with n = N + 1. Both are >= 0 on the cone (the first one is asserted only
    for lam in Gamma_{m+1}^+) and both are 0 at lam = (1, ..., 1).

    Raises:
        DomainError: If m is outside 1..N-1
        PreconditionError: If sigma_m(lam) <= 0
    """
    lam = as_eigenvalues(lam)
    N = lam.shape[-1]
    if m < 1 or m > N - 1:
        raise DomainError(f"Newton-MacLaurin order m={m} outside 1..{N - 1}")
    n = N + 1
    sig = sigma_all(lam)
    if sig[m] <= 0:
        raise PreconditionError(f"sigma_{m}(lambda) = {sig[m]:.3e} is not positive")
    bound1 = m * (n - m - 1) / ((m + 1) * (n - m))
    bound2 = m * (n - 1) / (n - m)
    gap1 = bound1 - sig[m - 1] * sig[m + 1] / sig[m] ** 2
    gap2 = sig[1] * sig[m - 1] / sig[m] - bound2
    return float(gap1), float(gap2)


def superadditivity_gap(A, B, k):
    """sigma_k(A + B) - sigma_k(A) - sigma_k(B); nonnegative for A, B in Gamma_k."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return float(sigma_matrix(k, A + B) - sigma_matrix(k, A) - sigma_matrix(k, B))
