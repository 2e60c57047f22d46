"""
Conformal factors u: R^n -> R with exact gradients and Hessians.

Radial profiles come from the expression language; anisotropic test fields
are compiled closed forms (the parser stays radial-only). Every field
evaluates a batch of points at once and returns a JetPoint.

Built-in fields (the `builtin:<name>` spec type):
    quadratic              u = x^T M x / 2 + b.x + c
    sine_product           u = a sin(x_1) x_2^2
    bump                   u = eps (1 - q)^s on q < 1, q = sum ((x - c)_i / a_i)^2
    ellipsoidal            u = -beta q^(-s/2), constant on ellipsoids
    shifted_schwarzschild  Schwarzschild factor centred at c
    multi_schwarzschild    u = -(2/p) ln(1 + sum_i m_i / (2 |x - c_i|^p)), p = (n-2k)/k
"""

import logging
from abc import ABC, abstractmethod

import numpy as np

from core.exceptions import DomainError
from profiles.expr import jet_eval, parse, print_expr
from profiles.jets import JetPoint, radial_jet, zero_jet

logger = logging.getLogger(__name__)


def _points(points, n):
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != n:
        raise DomainError(f"expected points in R^{n}, got shape {points.shape}")
    return points


def _vector(values, n, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (n,):
        raise DomainError(f"{name} must have {n} entries, got {arr.shape[0]}")
    return arr


class Field(ABC):
    """Smooth conformal factor on R^n (minus its singular set)."""

    name = 'field'

    def __init__(self, n):
        self.n = n

    @abstractmethod
    def jet(self, points):
        """JetPoint batch at points of shape (..., n)."""

    @property
    def is_radial(self):
        """True when u depends on |x| only (about the origin)."""
        return False

    @property
    def support_radius(self):
        """Radius of a ball containing supp(u), or None if not compact."""
        return None

    def singular_points(self):
        """Points where u is undefined."""
        return []

    def describe(self):
        return {'name': self.name}


class FlatField(Field):
    name = 'flat'

    def jet(self, points):
        return zero_jet(_points(points, self.n))

    @property
    def is_radial(self):
        return True

    @property
    def support_radius(self):
        return 0.0

    def radial_derivatives(self, r, order=3):
        r = np.asarray(r, dtype=float)
        return tuple(np.zeros_like(r) for _ in range(order + 1))


class RadialExprField(Field):
    """u(x) = f(|x - c|) with f given by a profile expression."""

    name = 'radial_expr'

    def __init__(self, n, text, params=None, center=None):
        super().__init__(n)
        self.params = dict(params or {})
        self.expr = parse(text, params=self.params.keys())
        self.text = print_expr(self.expr)
        self.center = np.zeros(n) if center is None else _vector(center, n, 'center')

    @property
    def is_radial(self):
        return not np.any(self.center)

    def singular_points(self):
        return [self.center]

    def radial_derivatives(self, r, order=3):
        return jet_eval(self.expr, r, order=order, params=self.params)

    def jet(self, points):
        points = _points(points, self.n)
        return radial_jet(points, self.center, lambda r: self.radial_derivatives(r, order=2))

    def describe(self):
        return {'name': self.name, 'expr': self.text, 'params': dict(sorted(self.params.items()))}


class QuadraticField(Field):
    name = 'quadratic'

    def __init__(self, n, matrix=None, linear=None, constant=0.0):
        super().__init__(n)
        M = np.zeros((n, n)) if matrix is None else np.asarray(matrix, dtype=float)
        if M.shape != (n, n):
            raise DomainError(f"quadratic matrix must be {n}x{n}")
        self.matrix = 0.5 * (M + M.T)
        self.linear = np.zeros(n) if linear is None else _vector(linear, n, 'linear')
        self.constant = float(constant)

    def jet(self, points):
        x = _points(points, self.n)
        Mx = x @ self.matrix
        value = 0.5 * np.sum(Mx * x, axis=-1) + x @ self.linear + self.constant
        gradient = Mx + self.linear
        hessian = np.broadcast_to(self.matrix, x.shape[:-1] + (self.n, self.n)).copy()
        return JetPoint(x, value, gradient, hessian)

    def describe(self):
        return {
            'name': self.name,
            'matrix': self.matrix.tolist(),
            'linear': self.linear.tolist(),
            'constant': self.constant,
        }


class SineProductField(Field):
    name = 'sine_product'

    def __init__(self, n, amplitude=1.0):
        super().__init__(n)
        self.amplitude = float(amplitude)

    def jet(self, points):
        x = _points(points, self.n)
        a = self.amplitude
        s, c = np.sin(x[..., 0]), np.cos(x[..., 0])
        y = x[..., 1]
        gradient = np.zeros(x.shape)
        gradient[..., 0] = a * c * y ** 2
        gradient[..., 1] = 2 * a * s * y
        hessian = np.zeros(x.shape + (self.n,))
        hessian[..., 0, 0] = -a * s * y ** 2
        hessian[..., 0, 1] = hessian[..., 1, 0] = 2 * a * c * y
        hessian[..., 1, 1] = 2 * a * s
        return JetPoint(x, a * s * y ** 2, gradient, hessian)

    def describe(self):
        return {'name': self.name, 'amplitude': self.amplitude}


class _QuadraticFormField(Field):
    """u = psi(q) with q = sum ((x - c)_i / a_i)^2."""

    def __init__(self, n, axes=None, center=None):
        super().__init__(n)
        self.axes = np.ones(n) if axes is None else _vector(axes, n, 'axes')
        if np.any(self.axes <= 0):
            raise DomainError("axes must be positive")
        self.center = np.zeros(n) if center is None else _vector(center, n, 'center')
        self.inv_sq = 1.0 / self.axes ** 2

    @abstractmethod
    def profile(self, q):
        """(psi, psi', psi'') as arrays."""

    def jet(self, points):
        x = _points(points, self.n)
        y = x - self.center
        q = np.sum(y ** 2 * self.inv_sq, axis=-1)
        psi, d1, d2 = self.profile(q)
        grad_q = 2.0 * y * self.inv_sq
        gradient = d1[..., None] * grad_q
        hessian = (
            d2[..., None, None] * grad_q[..., :, None] * grad_q[..., None, :]
            + d1[..., None, None] * np.diag(2.0 * self.inv_sq)
        )
        return JetPoint(x, psi, gradient, hessian)


class BumpField(_QuadraticFormField):
    """Compactly supported anisotropic perturbation, C^(s-1) across q = 1."""

    name = 'bump'

    def __init__(self, n, epsilon=0.1, axes=None, center=None, power=6):
        super().__init__(n, axes, center)
        self.epsilon = float(epsilon)
        self.power = int(power)
        if self.power < 4:
            raise DomainError("bump power must be at least 4")

    @property
    def support_radius(self):
        return float(np.linalg.norm(self.center) + np.max(self.axes))

    def profile(self, q):
        s, eps = self.power, self.epsilon
        w = np.clip(1.0 - q, 0.0, None)
        return eps * w ** s, -eps * s * w ** (s - 1), eps * s * (s - 1) * w ** (s - 2)

    def describe(self):
        return {
            'name': self.name,
            'epsilon': self.epsilon,
            'axes': self.axes.tolist(),
            'center': self.center.tolist(),
            'power': self.power,
        }


class EllipsoidalField(_QuadraticFormField):
    """u = -beta q^(-s/2); level sets are the ellipsoids q = const."""

    name = 'ellipsoidal'

    def __init__(self, n, beta=0.5, axes=None, center=None, decay=None):
        super().__init__(n, axes, center)
        self.beta = float(beta)
        self.decay = float(n - 2 if decay is None else decay)

    def singular_points(self):
        return [self.center]

    def profile(self, q):
        h = 0.5 * self.decay
        b = self.beta
        return -b * q ** (-h), b * h * q ** (-h - 1), -b * h * (h + 1) * q ** (-h - 2)

    def describe(self):
        return {
            'name': self.name,
            'beta': self.beta,
            'axes': self.axes.tolist(),
            'center': self.center.tolist(),
            'decay': self.decay,
        }


class MultiSchwarzschildField(Field):
    """
    Several Schwarzschild-type centres.

    u = -(2/p) ln F,  F = 1 + sum_i (m_i/2) rho_i^(-p),  rho_i = |x - c_i|,
    p = (n-2k)/k. Far away it looks like one Schwarzschild metric of
    parameter sum m_i, so the mass is (sum m_i)^k.
    """

    name = 'multi_schwarzschild'

    def __init__(self, n, k, masses, centers):
        super().__init__(n)
        if not 2 * k < n:
            raise DomainError(f"need 2k < n, got n={n}, k={k}")
        self.k = k
        self.p = (n - 2 * k) / k
        self.masses = np.asarray(masses, dtype=float).reshape(-1)
        self.centers = np.asarray(centers, dtype=float).reshape(len(self.masses), n)
        if np.any(self.masses <= 0):
            raise DomainError("masses must be positive")

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    @property
    def is_radial(self):
        return len(self.masses) == 1 and not np.any(self.centers)

    def singular_points(self):
        return list(self.centers)

    def jet(self, points):
        x = _points(points, self.n)
        p = self.p
        F = np.ones(x.shape[:-1])
        grad_F = np.zeros(x.shape)
        hess_F = np.zeros(x.shape + (self.n,))
        eye = np.eye(self.n)
        for m, c in zip(self.masses, self.centers):
            y = x - c
            rho2 = np.sum(y ** 2, axis=-1)
            rho = np.sqrt(rho2)
            F += 0.5 * m * rho ** (-p)
            a = -0.5 * m * p * rho ** (-p - 2)
            grad_F += a[..., None] * y
            hess_F += a[..., None, None] * (
                eye - (p + 2) * y[..., :, None] * y[..., None, :] / rho2[..., None, None]
            )
        scale = -2.0 / p
        value = scale * np.log(F)
        gradient = scale * grad_F / F[..., None]
        hessian = scale * (
            hess_F / F[..., None, None]
            - grad_F[..., :, None] * grad_F[..., None, :] / (F ** 2)[..., None, None]
        )
        return JetPoint(x, value, gradient, hessian)

    def describe(self):
        return {
            'name': self.name,
            'masses': self.masses.tolist(),
            'centers': self.centers.tolist(),
        }


def _require(params, key, default=None):
    if key in params:
        return params[key]
    if default is None:
        raise DomainError(f"missing field parameter '{key}'")
    return default


def build_builtin(name, n, k, params):
    """
    Construct a built-in field from its spec name and parameters.

    Raises:
        DomainError: Unknown name or invalid parameters
    """
    params = dict(params or {})
    if name == 'quadratic':
        return QuadraticField(n, params.get('matrix'), params.get('linear'), params.get('constant', 0.0))
    if name == 'sine_product':
        return SineProductField(n, params.get('amplitude', 1.0))
    if name == 'bump':
        return BumpField(
            n, params.get('epsilon', 0.1), params.get('axes'), params.get('center'), params.get('power', 6)
        )
    if name == 'ellipsoidal':
        return EllipsoidalField(
            n, params.get('beta', 0.5), params.get('axes'), params.get('center'), params.get('decay')
        )
    if name == 'shifted_schwarzschild':
        return MultiSchwarzschildField(
            n, k, [_require(params, 'mass')], [_require(params, 'center')]
        )
    if name == 'multi_schwarzschild':
        return MultiSchwarzschildField(n, k, _require(params, 'masses'), _require(params, 'centers'))
    raise DomainError(f"unknown built-in field '{name}'")


BUILTIN_FIELDS = (
    'quadratic', 'sine_product', 'bump', 'ellipsoidal', 'shifted_schwarzschild', 'multi_schwarzschild',
)


def sample_builtin(rng, name, n, k):
    """
    Built-in field with random parameters of order one, smooth on the shell
    1.2 <= |x| <= 1.8 (centres stay within 0.3 of the origin, bumps cover
    the shell).
    """
    if name == 'quadratic':
        M = rng.normal(scale=0.5, size=(n, n))
        params = {'matrix': (0.5 * (M + M.T)).tolist(), 'linear': rng.normal(scale=0.5, size=n).tolist()}
    elif name == 'sine_product':
        params = {'amplitude': float(rng.uniform(0.5, 1.5))}
    elif name == 'bump':
        params = {'epsilon': float(rng.uniform(0.2, 0.5)), 'axes': rng.uniform(3.0, 4.0, size=n).tolist()}
    elif name == 'ellipsoidal':
        params = {'beta': float(rng.uniform(0.2, 0.6)), 'axes': rng.uniform(0.8, 1.2, size=n).tolist()}
    elif name == 'shifted_schwarzschild':
        params = {'mass': float(rng.uniform(0.2, 0.5)), 'center': rng.uniform(-0.1, 0.1, size=n).tolist()}
    elif name == 'multi_schwarzschild':
        count = int(rng.integers(2, 4))
        params = {
            'masses': rng.uniform(0.1, 0.3, size=count).tolist(),
            'centers': rng.uniform(-0.1, 0.1, size=(count, n)).tolist(),
        }
    else:
        raise DomainError(f"unknown built-in field '{name}'")
    return build_builtin(name, n, k, params)
