"""
Index conventions for curvature tensors.

Everything in gbcmass is conformally flat, g = e^{-2u} delta, so the Weyl
part vanishes and the whole Riemann tensor is carried by the Schouten
tensor A. The conventions below are the only place they are written down.

Frames
    Euclidean frame: the matrix returned by confgeom.curvature.schouten,
        A_eucl = D^2 u - |du|^2/2 I + du (x) du   (indices raised with delta).
    Metric frame: the endomorphism g^{-1} A_g = e^{2u} A_eucl. Converting
        between the two goes through confgeom.curvature.to_metric_frame only.

Riemann4 (mixed, two lower two upper)
    riem[i, j, l, m] = R_{ij}^{lm}
        = A_i^l delta_j^m + delta_i^l A_j^m - A_i^m delta_j^l - delta_i^m A_j^l
    with A in the metric frame. Antisymmetric in (i, j) and in (l, m).
    With this choice
        R_{ij}^{ij} (summed)  = 2 (n-1) tr A = R    (scalar curvature)
        Ric_i^l = R_{ij}^{lj} = (n-2) A_i^l + tr(A) delta_i^l
    and L_1 = R.

Lowered Riemann
    R_{ijlm} = R_{ij}^{ab} g_{al} g_{bm}; P_(k) contracts against this.

Arrays
    Trailing axes hold tensor indices; any leading axes are a batch of
    points, so a (N, n, n, n, n) array is N Riemann tensors.
"""

import numpy as np


def metric_conformal(u, n):
    """g_ij = e^{-2u} delta_ij for a scalar or a batch of u values."""
    u = np.asarray(u, dtype=float)
    return np.exp(-2.0 * u)[..., None, None] * np.eye(n)


def inverse_metric_conformal(u, n):
    """g^ij = e^{2u} delta_ij."""
    u = np.asarray(u, dtype=float)
    return np.exp(2.0 * u)[..., None, None] * np.eye(n)


def lower_riemann(riem, metric):
    """R_{ijlm} = R_{ij}^{ab} g_{al} g_{bm} (batched over leading axes)."""
    riem = np.asarray(riem, dtype=float)
    metric = np.asarray(metric, dtype=float)
    g = metric[..., None, None, :, :]
    # contract a with the first metric index, then b with the second
    tmp = np.matmul(np.swapaxes(g, -1, -2), riem)
    return np.matmul(tmp, g)
