"""
Star-shaped boundary surfaces.

A surface is the level set phi = 0 of an implicit function that increases
away from the body, written in polar form about its center as
x = c + rho(theta) theta. Surface integrals reuse a SphereGrid: the node
theta_i carries the area weight

    w_i rho^{n-1} / (theta . nu),

which is the radial-graph element rho^{n-1} sqrt(1 + |grad_S rho|^2 / rho^2).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from core.exceptions import DomainError, SurfaceError

logger = logging.getLogger(__name__)

MIN_RHO = 1e-12
GRAPH_STEP = 1e-4


@dataclass(frozen=True)
class SurfaceSample:
    """Quadrature nodes of a surface: points, unit normals, area weights."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    @property
    def area(self):
        return float(np.sum(self.weights))


class StarSurface(ABC):
    """Closed hypersurface star-shaped about its center."""

    kind = 'star'

    def __init__(self, n, center=None):
        self.n = n
        self.center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        if self.center.shape != (n,):
            raise DomainError(f"center must have {n} entries")

    @abstractmethod
    def rho(self, theta):
        """Radial function on unit directions, shape (m, n) -> (m,)."""

    @abstractmethod
    def implicit(self, points):
        """(grad phi, Hess phi) at points on the surface."""

    def points(self, theta):
        theta = np.asarray(theta, dtype=float)
        rho = self.rho(theta)
        if np.any(rho <= MIN_RHO):
            index = int(np.argmin(rho))
            raise SurfaceError("degenerate surface (rho -> 0)", self.center + MIN_RHO * theta[index])
        return self.center + rho[:, None] * theta

    def normals(self, points):
        grad, _ = self.implicit(points)
        norm = np.linalg.norm(grad, axis=-1, keepdims=True)
        if np.any(norm == 0.0):
            raise SurfaceError("vanishing normal", points[int(np.argmin(norm[:, 0]))])
        return grad / norm

    def sample(self, grid):
        """Surface nodes, normals and area weights from a SphereGrid."""
        if grid.n != self.n:
            raise DomainError(f"grid lives in R^{grid.n}, surface in R^{self.n}")
        theta = grid.nodes
        rho = self.rho(theta)
        points = self.points(theta)
        normals = self.normals(points)
        cosine = np.sum(theta * normals, axis=-1)
        if np.any(cosine <= 0.0):
            raise SurfaceError("surface is not star-shaped about its center", points[int(np.argmin(cosine))])
        return SurfaceSample(points, normals, grid.weights * rho ** (self.n - 1) / cosine)

    @property
    @abstractmethod
    def bounding_radius(self):
        """max rho."""

    @property
    def diameter(self):
        return 2.0 * self.bounding_radius

    def scaled(self, factor):
        """The surface scaled by factor about the origin."""
        raise DomainError(f"{self.kind} surfaces cannot be scaled")

    def to_dict(self):
        return {'kind': self.kind, 'center': self.center.tolist()}


class SphereSurface(StarSurface):
    kind = 'sphere'

    def __init__(self, n, radius, center=None):
        super().__init__(n, center)
        if not radius > 0:
            raise SurfaceError(f"sphere radius must be positive, got {radius}")
        self.radius = float(radius)

    def rho(self, theta):
        return np.full(np.asarray(theta).shape[0], self.radius)

    def implicit(self, points):
        y = np.asarray(points, dtype=float) - self.center
        hess = np.broadcast_to(2.0 * np.eye(self.n), y.shape + (self.n,))
        return 2.0 * y, hess

    @property
    def bounding_radius(self):
        return self.radius

    def scaled(self, factor):
        return SphereSurface(self.n, factor * self.radius, factor * self.center)

    def to_dict(self):
        return {**super().to_dict(), 'radius': self.radius}


class EllipsoidSurface(StarSurface):
    """sum ((x - c)_i / a_i)^2 = 1."""

    kind = 'ellipsoid'

    def __init__(self, n, axes, center=None):
        super().__init__(n, center)
        self.axes = np.asarray(axes, dtype=float)
        if self.axes.shape != (n,) or np.any(self.axes <= 0):
            raise SurfaceError("ellipsoid needs one positive semi-axis per dimension")
        self.inv_sq = 1.0 / self.axes ** 2

    def rho(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 1.0 / np.sqrt(np.sum(theta ** 2 * self.inv_sq, axis=-1))

    def implicit(self, points):
        y = np.asarray(points, dtype=float) - self.center
        hess = np.broadcast_to(np.diag(2.0 * self.inv_sq), y.shape + (self.n,))
        return 2.0 * y * self.inv_sq, hess

    @property
    def bounding_radius(self):
        return float(np.max(self.axes))

    def scaled(self, factor):
        return EllipsoidSurface(self.n, factor * self.axes, factor * self.center)

    def to_dict(self):
        return {**super().to_dict(), 'axes': self.axes.tolist()}


class RadialGraphSurface(StarSurface):
    """
    x = c + rho(theta) theta for a user-supplied rho.

    phi(x) = |x - c| - rho((x - c)/|x - c|); its gradient and Hessian are
    taken by central differences with step GRAPH_STEP.
    """

    kind = 'radial_graph'

    def __init__(self, n, rho, center=None, step=GRAPH_STEP, max_radius=None):
        super().__init__(n, center)
        self._rho = rho
        self.step = step
        self._max_radius = max_radius

    def rho(self, theta):
        return np.asarray(self._rho(np.asarray(theta, dtype=float)), dtype=float)

    def phi(self, points):
        y = np.asarray(points, dtype=float) - self.center
        r = np.linalg.norm(y, axis=-1)
        return r - self.rho(y / r[..., None])

    def implicit(self, points):
        points = np.asarray(points, dtype=float)
        h = self.step
        eye = h * np.eye(self.n)
        grad = np.stack(
            [(self.phi(points + eye[i]) - self.phi(points - eye[i])) / (2 * h) for i in range(self.n)],
            axis=-1,
        )
        hess = np.empty(points.shape + (self.n,))
        for i in range(self.n):
            for j in range(i, self.n):
                value = (
                    self.phi(points + eye[i] + eye[j]) - self.phi(points + eye[i] - eye[j])
                    - self.phi(points - eye[i] + eye[j]) + self.phi(points - eye[i] - eye[j])
                ) / (4 * h * h)
                hess[..., i, j] = hess[..., j, i] = value
        return grad, hess

    @property
    def bounding_radius(self):
        if self._max_radius is None:
            raise DomainError("radial graph surfaces need max_radius for separation checks")
        return float(self._max_radius)


def perturbed_sphere(n, radius, amplitude, axis=0, center=None):
    """rho = radius (1 + amplitude theta_axis^2)."""
    if not -1.0 < amplitude:
        raise SurfaceError(f"amplitude {amplitude} makes rho vanish")
    return RadialGraphSurface(
        n,
        lambda theta: radius * (1.0 + amplitude * theta[..., axis] ** 2),
        center=center,
        max_radius=radius * (1.0 + max(amplitude, 0.0)),
    )


def surface_from_component(component):
    """SphereSurface or EllipsoidSurface for an ExcisedComponent."""
    n = len(component.center)
    if component.shape == 'sphere':
        return SphereSurface(n, component.radius, component.center)
    return EllipsoidSurface(n, component.axes, component.center)


def surfaces_from_spec(spec):
    """
    Boundary surfaces of the excised domain of a spec.

    Raises:
        DomainError: The spec has no excised components
    """
    if not spec.excised:
        raise DomainError(f"'{spec.label}' has no boundary: nothing is excised")
    return [surface_from_component(c) for c in spec.excised]


def separation_report(surfaces, fraction=0.1):
    """
    Pairwise gaps between bounding balls; each must be at least fraction of
    the larger diameter.

    Raises:
        SurfaceError: Two components overlap or come too close
    """
    pairs = []
    for i, a in enumerate(surfaces):
        for j in range(i + 1, len(surfaces)):
            b = surfaces[j]
            gap = float(np.linalg.norm(a.center - b.center)) - a.bounding_radius - b.bounding_radius
            required = fraction * max(a.diameter, b.diameter)
            pairs.append({'pair': [i, j], 'gap': gap, 'required': required})
            if gap < required:
                midpoint = 0.5 * (a.center + b.center)
                raise SurfaceError(
                    f"components {i} and {j} are separated by {gap:.4g} < {required:.4g}", midpoint
                )
    return pairs
