"""
Pointwise curvature of g = e^{-2u} delta from the 2-jet of u.

Frames (see tensor.conventions):
    schouten()         Euclidean frame, A = D^2u - |du|^2/2 I + du (x) du
    to_metric_frame()  g^{-1} A_g = e^{2u} A, the only conversion between the two
    riemann_from_schouten() expects the metric-frame A
    sigma_k_metric(), lk_conformal()  g-frame scalars, e^{2ku} sigma_k(A)

Usage:
    from confgeom.curvature import curvature_frame

    frame = curvature_frame(jet_at(spec, x), k=2)
    frame.lk
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import DomainError
from symfun.symmetric import eigenvalues, sigma, sigma_all

logger = logging.getLogger(__name__)


def schouten(jet):
    """Euclidean-frame Schouten tensor (batched)."""
    du = jet.gradient
    n = du.shape[-1]
    outer = du[..., :, None] * du[..., None, :]
    return jet.hessian - 0.5 * jet.grad_norm2[..., None, None] * np.eye(n) + outer


def b_matrix(jet):
    """B = |du|^2/2 I - du (x) du, so that D^2 u = A + B."""
    du = jet.gradient
    n = du.shape[-1]
    outer = du[..., :, None] * du[..., None, :]
    return 0.5 * jet.grad_norm2[..., None, None] * np.eye(n) - outer


def to_metric_frame(A, u):
    """g^{-1} A_g = e^{2u} A_eucl."""
    return np.exp(2.0 * np.asarray(u, dtype=float))[..., None, None] * np.asarray(A, dtype=float)


def ricci_scalar(jet, n=None):
    """
    Ricci tensor (coordinate components, lower indices) and scalar curvature.

    Ric = (n-2)(D^2u + lap(u)/(n-2) delta + du (x) du - |du|^2 delta)
    R   = e^{2u} (2(n-1) lap(u) - (n-1)(n-2) |du|^2)
    """
    n = jet.dimension if n is None else n
    du = jet.gradient
    outer = du[..., :, None] * du[..., None, :]
    lap = jet.laplacian
    g2 = jet.grad_norm2
    eye = np.eye(n)
    ricci = (n - 2) * (
        jet.hessian + (lap / (n - 2))[..., None, None] * eye + outer - g2[..., None, None] * eye
    )
    scalar = np.exp(2.0 * jet.value) * (2 * (n - 1) * lap - (n - 1) * (n - 2) * g2)
    return ricci, scalar


def schouten_from_ricci(ricci, scalar, u, n):
    """A_g = (Ric - R g / (2(n-1))) / (n-2), returned in the Euclidean frame."""
    g = np.exp(-2.0 * np.asarray(u, dtype=float))[..., None, None] * np.eye(n)
    A_lower = (ricci - (np.asarray(scalar) / (2 * (n - 1)))[..., None, None] * g) / (n - 2)
    # A_lower is the (0,2) tensor; raising with delta gives the Euclidean frame
    return A_lower


def riemann_from_schouten(A):
    """
    Mixed Riemann tensor R_{ij}^{lm} from a metric-frame Schouten tensor.

    R_{ij}^{lm} = A_i^l d_j^m + d_i^l A_j^m - A_i^m d_j^l - d_i^m A_j^l
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    d = np.eye(n)
    term = np.einsum('...il,jm->...ijlm', A, d)
    return (
        term
        + np.einsum('il,...jm->...ijlm', d, A)
        - np.einsum('...im,jl->...ijlm', A, d)
        - np.einsum('im,...jl->...ijlm', d, A)
    )


def lk_prefactor(n, k):
    """2^k k! (n-k)! / (n-2k)!"""
    return 2 ** k * math.factorial(k) * math.factorial(n - k) / math.factorial(n - 2 * k)


def sigma_k_metric(jet, k):
    """sigma_k(g^{-1} A_g) = e^{2ku} sigma_k(A_eucl)."""
    lam = eigenvalues(schouten(jet))
    return np.exp(2.0 * k * jet.value) * sigma(k, lam)


def lk_conformal(jet, n, k):
    """
    L_k through the sigma_k route: 2^k k! (n-k)!/(n-2k)! sigma_k(g).

    Raises:
        DomainError: If 2k >= n
    """
    if k < 1 or not 2 * k < n:
        raise DomainError(f"need 1 <= k < n/2, got n={n}, k={k}")
    value = lk_prefactor(n, k) * sigma_k_metric(jet, k)
    return float(value) if np.ndim(value) == 0 else value


def b_split_closed_form(grad_norm, j, n):
    """sigma_j(B) = (n-1)! (n-2j) / (2^j j! (n-j)!) |du|^{2j}."""
    coeff = math.factorial(n - 1) * (n - 2 * j) / (2 ** j * math.factorial(j) * math.factorial(n - j))
    return coeff * np.asarray(grad_norm, dtype=float) ** (2 * j)


def b_split_sigma(jet, j, n=None):
    """
    sigma_j of B = |du|^2/2 I - du (x) du.

    B has eigenvalue -|du|^2/2 once (along du) and |du|^2/2 with multiplicity
    n-1. The closed form is returned; the eigenvalue route is computed
    alongside and a disagreement above 1e-12 is logged.
    """
    n = jet.dimension if n is None else n
    closed = b_split_closed_form(np.sqrt(jet.grad_norm2), j, n)
    by_eigen = sigma(j, eigenvalues(b_matrix(jet)))
    scale = 1.0 + np.max(np.abs(closed))
    if np.max(np.abs(closed - by_eigen)) > 1e-12 * scale:
        logger.warning(f"sigma_{j}(B) routes disagree: {closed} vs {by_eigen}")
    return float(closed) if np.ndim(closed) == 0 else closed


@dataclass(frozen=True)
class CurvatureFrame:
    """
    Curvature of e^{-2u} delta at one point (or a batch).

    schouten is Euclidean-frame; schouten_metric, riemann and sigmas live in
    the metric frame.
    """

    jet: object
    k: int
    schouten: np.ndarray
    schouten_metric: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    riemann: np.ndarray
    sigmas: np.ndarray
    lk: np.ndarray
    b: np.ndarray

    def to_dict(self):
        return {
            'k': self.k,
            'schouten': self.schouten.tolist(),
            'scalar': np.asarray(self.scalar).tolist(),
            'sigmas': np.asarray(self.sigmas).tolist(),
            'lk': np.asarray(self.lk).tolist(),
        }


def curvature_frame(jet, k):
    """Assemble the CurvatureFrame of a jet for order k."""
    n = jet.dimension
    if k < 1 or not 2 * k < n:
        raise DomainError(f"need 1 <= k < n/2, got n={n}, k={k}")
    A = schouten(jet)
    A_metric = to_metric_frame(A, jet.value)
    ricci, scalar = ricci_scalar(jet, n)
    sigmas = sigma_all(np.linalg.eigvalsh(A_metric))[..., : k + 1]
    return CurvatureFrame(
        jet=jet,
        k=k,
        schouten=A,
        schouten_metric=A_metric,
        ricci=ricci,
        scalar=scalar,
        riemann=riemann_from_schouten(A_metric),
        sigmas=sigmas,
        lk=lk_prefactor(n, k) * sigmas[..., k],
        b=b_matrix(jet),
    )
