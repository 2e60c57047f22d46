"""
JetPoint: the 2-jet (u, du, D^2 u) of the conformal factor at points of R^n.

Arrays may carry a leading batch axis: value (m,), gradient (m, n),
hessian (m, n, n) for m points. A single point has value (), gradient (n,).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class JetPoint:
    x: np.ndarray
    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray

    @property
    def dimension(self):
        return self.x.shape[-1]

    @property
    def batched(self):
        return self.x.ndim > 1

    @property
    def laplacian(self):
        return np.asarray(np.trace(self.hessian, axis1=-2, axis2=-1))

    @property
    def grad_norm2(self):
        return np.asarray(np.sum(self.gradient ** 2, axis=-1))

    def at(self, i):
        """Single-point jet from a batch."""
        return JetPoint(self.x[i], self.value[i], self.gradient[i], self.hessian[i])

    def to_dict(self):
        return {
            'x': np.asarray(self.x).tolist(),
            'value': np.asarray(self.value).tolist(),
            'gradient': np.asarray(self.gradient).tolist(),
            'hessian': np.asarray(self.hessian).tolist(),
        }


def zero_jet(points):
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    lead = points.shape[:-1]
    return JetPoint(points, np.zeros(lead), np.zeros(lead + (n,)), np.zeros(lead + (n, n)))


def radial_jet(points, center, derivatives):
    """
    Chain rule for u(x) = f(|x - c|).

    D^2 u = f'' rhat rhat^T + (f'/r)(I - rhat rhat^T)

    Args:
        points: (..., n) points, none at the center
        center: (n,) center c
        derivatives: Callable r -> (f, f', f'') on arrays of radii
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    y = points - center
    r = np.linalg.norm(y, axis=-1)
    f0, f1, f2 = (np.asarray(d, dtype=float) for d in derivatives(r)[:3])
    rhat = y / r[..., None]
    outer = rhat[..., :, None] * rhat[..., None, :]
    eye = np.eye(n)
    hessian = f2[..., None, None] * outer + (f1 / r)[..., None, None] * (eye - outer)
    return JetPoint(points, f0, f1[..., None] * rhat, hessian)


def sample_jet(rng, n, scale=1.0):
    """Random 2-jet at a random point, for property suites."""
    x = rng.normal(size=n)
    hessian = rng.normal(scale=scale, size=(n, n))
    return JetPoint(
        x,
        np.asarray(rng.normal(scale=0.3)),
        rng.normal(scale=scale, size=n),
        0.5 * (hessian + hessian.T),
    )
