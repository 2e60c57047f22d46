"""
Covariant divergence of the Newton tensor of the Schouten tensor.

On a conformally flat manifold T_{k-1}(g^{-1} A_g) is divergence free in g:

    nabla_i T^i_j = d_i T^i_j + Gamma^i_{ic} T^c_j - Gamma^c_{ij} T^i_c = 0.

The residual below is the central-difference version of the left side.
"""

import numpy as np

from confgeom.curvature import schouten, to_metric_frame
from profiles.metric_spec import jet_at
from symfun.symmetric import newton_tensor
from tensor.divergence import central_stencil, christoffel_conformal, default_step


def schouten_newton_field(spec, points, j):
    """T_j(g^{-1} A_g) as a (1,1) tensor at a batch of points."""
    jets = jet_at(spec, points)
    return newton_tensor(j, to_metric_frame(schouten(jets), jets.value)), jets


def divergence_residual_schouten_newton(spec, k, x, h=None):
    """
    Central-difference nabla_i T_{k-1}(g^{-1} A_g)^i_j at x.

    Returns:
        (n,) residual vector
    """
    h = default_step() if h is None else h
    points, n = central_stencil(x, h)
    T_shift, _ = schouten_newton_field(spec, points, k - 1)
    T_here, jet = schouten_newton_field(spec, np.asarray(x, dtype=float)[None, :], k - 1)
    T_here = T_here[0]
    partial = np.einsum('iij->j', T_shift[:n] - T_shift[n:]) / (2.0 * h)
    G = christoffel_conformal(jet.gradient[0])
    return (
        partial
        + np.einsum('iic,cj->j', G, T_here)
        - np.einsum('cij,ic->j', G, T_here)
    )
