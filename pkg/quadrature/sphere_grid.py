"""
Product quadrature on the unit sphere S^{n-1} in R^n.

The sphere is peeled one coordinate at a time:

    x = (t, sqrt(1 - t^2) y),   y in S^{d-1},   dS_d = (1 - t^2)^{(d-2)/2} dt dS_{d-1}

so every polar level is a Gauss-Jacobi rule with alpha = beta = (d-2)/2 and
the last circle is the trapezoid rule in the azimuth. A grid of degree D
uses D//2 + 1 Jacobi nodes per level and D + 1 azimuth nodes, which makes it
exact for every polynomial of total degree <= D.

Grids are immutable and memoized in the Django cache.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, roots_jacobi

from core.exceptions import DomainError
from quadrature.cache_utils import cached

logger = logging.getLogger(__name__)

MIN_DIMENSION = 4
MAX_DIMENSION = 8
MAX_DEGREE = 30


def sphere_volume(n):
    """omega_{n-1} = 2 pi^{n/2} / Gamma(n/2), the area of the unit sphere in R^n."""
    return float(2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0))


def default_degree(n):
    return 15 if n <= 6 else 11


@dataclass(frozen=True)
class SphereGrid:
    n: int
    degree: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self):
        return int(self.weights.shape[0])

    def scaled(self, r, center=None):
        """Nodes of the coordinate sphere of radius r (about center)."""
        points = r * self.nodes
        if center is not None:
            points = points + np.asarray(center, dtype=float)
        return points

    def describe(self):
        return {'n': self.n, 'degree': self.degree, 'nodes': self.size}


def _circle(degree):
    count = degree + 1
    phi = 2.0 * math.pi * np.arange(count) / count
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    return nodes, np.full(count, 2.0 * math.pi / count)


def _lift(nodes, weights, degree):
    """Rule on S^{d-1} -> rule on S^d."""
    d = nodes.shape[1]
    alpha = (d - 2) / 2.0
    t, w = roots_jacobi(degree // 2 + 1, alpha, alpha)
    radius = np.sqrt(1.0 - t ** 2)
    lifted = np.concatenate(
        [
            np.repeat(t, len(weights))[:, None],
            (radius[:, None, None] * nodes[None, :, :]).reshape(-1, d),
        ],
        axis=1,
    )
    return lifted, np.outer(w, weights).reshape(-1)


def _check(n, degree):
    if not MIN_DIMENSION <= n <= MAX_DIMENSION:
        raise DomainError(f"sphere grids support n in {MIN_DIMENSION}..{MAX_DIMENSION}, got n={n}")
    if not 1 <= degree <= MAX_DEGREE:
        raise DomainError(f"grid degree must be in 1..{MAX_DEGREE}, got {degree}")


@cached(key_prefix='sphere_grid')
def build_grid(n, degree):
    """
    Product Gauss-Jacobi x trapezoid grid on S^{n-1}.

    Args:
        n: Ambient dimension, 4..8
        degree: Polynomial exactness, 1..30

    Returns:
        SphereGrid whose weights sum to omega_{n-1}

    Raises:
        DomainError: Unsupported dimension or degree
    """
    _check(n, degree)
    nodes, weights = _circle(degree)
    while nodes.shape[1] < n:
        nodes, weights = _lift(nodes, weights, degree)
    logger.debug(f"Built S^{n - 1} grid of degree {degree} with {len(weights)} nodes")
    return SphereGrid(n=n, degree=degree, nodes=nodes, weights=weights)
