"""
Truncated Taylor arithmetic (forward-mode jets of order <= 3).

A TaylorJet holds the Taylor coefficients c_0..c_d of f(r + t) in t, so the
derivatives are f^(i)(r) = i! c_i. Arithmetic and the elementary functions
propagate the coefficients exactly (no finite differencing); coefficients
may carry a trailing batch shape so a whole vector of radii is evaluated at
once.

Domain violations raise ExprDomainError; the expression evaluator adds the
offending subexpression.

Usage:
    r = TaylorJet.variable(3.0, order=3)
    (r ** 2).derivatives()   # (9, 6, 2, 0)
"""

import math

import numpy as np

from core.exceptions import ExprDomainError

MAX_ORDER = 3


def _finite(values):
    if not np.all(np.isfinite(values)):
        raise ExprDomainError("overflow")
    return values


class TaylorJet:
    """Truncated Taylor series in one variable."""

    __slots__ = ('coeffs',)

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)

    @classmethod
    def variable(cls, r, order=MAX_ORDER):
        if not 0 <= order <= MAX_ORDER:
            raise ExprDomainError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
        r = np.asarray(r, dtype=float)
        coeffs = np.zeros((order + 1,) + r.shape)
        coeffs[0] = r
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @classmethod
    def constant(cls, value, like):
        coeffs = np.zeros_like(like.coeffs)
        coeffs[0] = value
        return cls(coeffs)

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivatives(self):
        """Tuple (f, f', ..., f^(d)) evaluated at the expansion point."""
        return tuple(math.factorial(i) * self.coeffs[i] for i in range(self.order + 1))

    def _lift(self, other):
        if isinstance(other, TaylorJet):
            return other
        return TaylorJet.constant(other, self)

    # arithmetic

    def __neg__(self):
        return TaylorJet(-self.coeffs)

    def __add__(self, other):
        return TaylorJet(self.coeffs + self._lift(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return TaylorJet(self.coeffs - self._lift(other).coeffs)

    def __rsub__(self, other):
        return TaylorJet(self._lift(other).coeffs - self.coeffs)

    def __mul__(self, other):
        a, b = self.coeffs, self._lift(other).coeffs
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for i in range(out.shape[0]):
            for j in range(i + 1):
                out[i] += a[j] * b[i - j]
        return TaylorJet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self.coeffs, self._lift(other).coeffs
        if np.any(b[0] == 0):
            raise ExprDomainError("division by zero")
        q = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for i in range(q.shape[0]):
            acc = a[i] - sum(b[j] * q[i - j] for j in range(1, i + 1))
            q[i] = acc / b[0]
        return TaylorJet(q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, TaylorJet):
            if exponent.order == 0 or not np.any(exponent.coeffs[1:]):
                return self._power_constant(exponent.coeffs[0])
            return (exponent * self.log()).exp()
        return self._power_constant(exponent)

    def __rpow__(self, base):
        return self._lift(base) ** self

    def _power_constant(self, p):
        p = np.asarray(p, dtype=float)
        if p.ndim > 0 and p.size and np.all(p == p.flat[0]):
            p = np.asarray(p.flat[0])
        if p.ndim == 0 and float(p).is_integer():
            return self._integer_power(int(p))
        g = self.coeffs
        if np.all(np.mod(p, 1.0) == 0):
            if np.any(g[0] == 0):
                raise ExprDomainError("integer power of zero")
        elif np.any(g[0] <= 0):
            raise ExprDomainError("non-integer power of a non-positive base")
        h = np.zeros_like(g * p)
        with np.errstate(over='ignore'):
            h[0] = _finite(np.power(g[0], p))
        for k in range(1, h.shape[0]):
            acc = sum(((p + 1) * j - k) * g[j] * h[k - j] for j in range(1, k + 1))
            h[k] = acc / (k * g[0])
        return TaylorJet(h)

    def _integer_power(self, p):
        if p < 0:
            return TaylorJet.constant(1.0, self) / self._integer_power(-p)
        result = TaylorJet.constant(1.0, self)
        base = self
        with np.errstate(over='ignore', invalid='ignore'):
            while p:
                if p & 1:
                    result = result * base
                p >>= 1
                if p:
                    base = base * base
        _finite(result.coeffs[0])
        return result

    # elementary functions

    def exp(self):
        g = self.coeffs
        h = np.zeros_like(g)
        with np.errstate(over='ignore'):
            h[0] = _finite(np.exp(g[0]))
        for k in range(1, h.shape[0]):
            h[k] = sum(j * g[j] * h[k - j] for j in range(1, k + 1)) / k
        return TaylorJet(h)

    def log(self):
        g = self.coeffs
        if np.any(g[0] <= 0):
            raise ExprDomainError("ln of a non-positive value")
        f = np.zeros_like(g)
        f[0] = np.log(g[0])
        for k in range(1, f.shape[0]):
            acc = g[k] - sum(j * f[j] * g[k - j] for j in range(1, k)) / k
            f[k] = acc / g[0]
        return TaylorJet(f)

    def sin_cos(self):
        g = self.coeffs
        s = np.zeros_like(g)
        c = np.zeros_like(g)
        s[0], c[0] = np.sin(g[0]), np.cos(g[0])
        for k in range(1, g.shape[0]):
            s[k] = sum(j * g[j] * c[k - j] for j in range(1, k + 1)) / k
            c[k] = -sum(j * g[j] * s[k - j] for j in range(1, k + 1)) / k
        return TaylorJet(s), TaylorJet(c)

    def sin(self):
        return self.sin_cos()[0]

    def cos(self):
        return self.sin_cos()[1]

    def sqrt(self):
        if np.any(self.coeffs[0] < 0):
            raise ExprDomainError("sqrt of a negative value")
        if np.any(self.coeffs[0] == 0):
            if self.order > 0:
                raise ExprDomainError("sqrt is not differentiable at 0")
            return TaylorJet(np.zeros_like(self.coeffs))
        return self._power_constant(0.5)

    def __repr__(self):
        return f"TaylorJet({self.coeffs.tolist()})"
