"""
Finite-difference divergence residuals for the divergence-free tensors.

- T_k(D^2 u) is divergence-free in the Euclidean sense for any smooth u.
- P_(k) is divergence-free in the metric sense: nabla_i P^{ijlm} = 0 with the
  Levi-Civita connection of g = e^{-2u} delta, whose Christoffel symbols are
      Gamma^c_{ab} = -(delta^c_a u_b + delta^c_b u_a - delta_ab u_c).

Both residuals are central differences with step h, so for smooth data they
are O(h^2): halving h divides the residual by about 4.

Usage:
    from functools import partial
    from profiles.metric_spec import jet_at

    divergence_residual_Tk(partial(jet_at, spec), 2, x, 1e-3)
"""

import logging

import numpy as np
from django.conf import settings

from confgeom.curvature import riemann_from_schouten, schouten, to_metric_frame
from profiles.fields import BUILTIN_FIELDS, sample_builtin
from profiles.metric_spec import MetricSpec, jet_at
from symfun.symmetric import newton_tensor
from tensor.conventions import metric_conformal
from tensor.gauss_bonnet import pk_tensor

logger = logging.getLogger(__name__)


def default_step():
    return getattr(settings, 'GBC_FD_STEP', 1e-3)


def christoffel_conformal(gradient):
    """Gamma[c, a, b] = Gamma^c_{ab} of e^{-2u} delta from du (shape (n,))."""
    du = np.asarray(gradient, dtype=float)
    n = du.shape[-1]
    eye = np.eye(n)
    return -(
        np.einsum('ca,b->cab', eye, du)
        + np.einsum('cb,a->cab', eye, du)
        - np.einsum('ab,c->cab', eye, du)
    )


def central_stencil(x, h):
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    shifts = h * np.eye(n)
    return np.concatenate([x + shifts, x - shifts]), n


def divergence_residual_Tk(jet_fn, k, x, h=None):
    """
    Central-difference d_i T_k^{ij}(D^2 u) at x.

    Args:
        jet_fn: Callable mapping an (m, n) array of points to a JetPoint batch
        k: Order, 0 <= k <= n-1
        x: Point, shape (n,)
        h: Step (defaults to GBC_FD_STEP)

    Returns:
        (n,) residual vector
    """
    h = default_step() if h is None else h
    points, n = central_stencil(x, h)
    T = newton_tensor(k, jet_fn(points).hessian)
    forward, backward = T[:n], T[n:]
    # row i of the stencil differentiates in direction i
    return np.einsum('iij->j', forward - backward) / (2.0 * h)


def pk_field(spec, points, k):
    """P_(k) at a batch of points of a metric spec."""
    jets = jet_at(spec, points)
    A = to_metric_frame(schouten(jets), jets.value)
    riem = riemann_from_schouten(A)
    return pk_tensor(riem, metric_conformal(jets.value, jets.dimension), k), jets


def divergence_residual_Pk(spec, k, x, h=None):
    """
    Central-difference covariant divergence nabla_i P_(k)^{ijlm} at x.

    Returns:
        (n, n, n) residual indexed by (j, l, m)
    """
    h = default_step() if h is None else h
    points, n = central_stencil(x, h)
    P_shift, _ = pk_field(spec, points, k)
    P_here, jet = pk_field(spec, np.asarray(x, dtype=float)[None, :], k)
    P_here = P_here[0]
    partial = np.einsum('iijlm->jlm', P_shift[:n] - P_shift[n:]) / (2.0 * h)
    G = christoffel_conformal(jet.gradient[0])
    trace = np.einsum('iic->c', G)
    correction = (
        np.einsum('c,cjlm->jlm', trace, P_here)
        + np.einsum('jic,iclm->jlm', G, P_here)
        + np.einsum('lic,ijcm->jlm', G, P_here)
        + np.einsum('mic,ijlc->jlm', G, P_here)
    )
    return partial + correction


def convergence_ratio(residual_fn, h, floor=1e-10):
    """
    |residual(h)| / |residual(h/2)|, about 4 for a central difference.

    Returns None when both residuals are below floor: the tensor is then
    differenced exactly (constant, or supported off the stencil) and has no
    truncation error to measure.
    """
    coarse = float(np.linalg.norm(residual_fn(h)))
    fine = float(np.linalg.norm(residual_fn(h / 2.0)))
    if coarse <= floor and fine <= floor:
        return None
    if fine == 0.0:
        return float('inf')
    return coarse / fine


def sample_divergence_case(rng, names=BUILTIN_FIELDS):
    """
    A random (spec, point) pair: built-in field, n in 5..7, k with 2k < n,
    point on the shell 1.2 <= |x| <= 1.8.
    """
    n = int(rng.choice([5, 6, 7]))
    k = int(rng.integers(1, (n - 1) // 2 + 1))
    name = str(rng.choice(list(names)))
    field = sample_builtin(rng, name, n, k)
    spec = MetricSpec(n=n, k=k, field=field, tau=None, label=name, kind=f'builtin:{name}')
    direction = rng.normal(size=n)
    x = rng.uniform(1.2, 1.8) * direction / np.linalg.norm(direction)
    return spec, x
