"""
Seeded samplers for cone-certified vectors and matrices.

Every sampler takes a numpy Generator, so a failing property case is
replayed by re-running with the same seed. Matrices in Gamma_k are built as
Q diag(mu) Q^T with Q Haar-orthogonal and mu rejection-sampled into the cone.

Usage:
    rng = np.random.default_rng(42)
    A = sample_cone_matrix(rng, 5, 2)
"""

import logging

import numpy as np

from core.exceptions import PreconditionError
from symfun.cones import ConeLabel, cone_membership

logger = logging.getLogger(__name__)

MAX_TRIES = 10000


def make_rng(seed):
    return np.random.default_rng(seed)


def random_orthogonal(rng, N):
    """Haar-distributed orthogonal N x N matrix (QR with sign fix)."""
    Z = rng.standard_normal((N, N))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_symmetric(rng, N, scale=1.0):
    Z = rng.standard_normal((N, N)) * scale
    return 0.5 * (Z + Z.T)


def sample_cone_vector(rng, N, k, strict=True, shift=0.5, max_tries=MAX_TRIES):
    """
    Rejection-sample an eigenvalue vector in Gamma_k^+ (or Gamma_k).

    Candidates are N(shift, 1) vectors; about half of them land in Gamma_1^+
    and the acceptance rate drops with k.

    Raises:
        PreconditionError: If no candidate is accepted within max_tries
    """
    cone = ConeLabel(k, strict)
    for _ in range(max_tries):
        mu = rng.normal(loc=shift, scale=1.0, size=N)
        if cone_membership(mu, cone):
            return mu
    raise PreconditionError(f"no sample accepted into {cone} after {max_tries} tries")


def sample_cone_matrix(rng, N, k, strict=True):
    """Symmetric matrix with eigenvalues in Gamma_k^+ (or Gamma_k)."""
    mu = sample_cone_vector(rng, N, k, strict=strict)
    Q = random_orthogonal(rng, N)
    M = (Q * mu) @ Q.T
    return 0.5 * (M + M.T)


def sample_diagonally_dominant(rng, N, scale=1.0):
    """Positive diagonally dominant symmetric matrix (so in every Gamma_k)."""
    M = random_symmetric(rng, N, scale)
    off = np.sum(np.abs(M), axis=1) - np.abs(np.diag(M))
    np.fill_diagonal(M, off + rng.uniform(0.1, 1.0, size=N) * scale)
    return M
