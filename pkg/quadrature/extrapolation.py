"""
Limits r -> infinity of per-radius flux sequences.

The model is v(r) = c0 + c1 s + c2 s^2 + ... with s = r^{-p}. When the decay
exponent p is known (from tau and k) the polynomial is fitted directly;
otherwise p is estimated from the last three values and refined with
scipy's curve_fit on c0 + c1 r^{-p}.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import curve_fit

from core.exceptions import DomainError

logger = logging.getLogger(__name__)

MAX_FIT_DEGREE = 4


@dataclass
class MassEstimate:
    """Per-radius values of one evaluator and their extrapolated limit."""

    radii: list
    values: list
    limit: float
    error: float
    evaluator: str = ''
    exponent: Optional[float] = None
    residual: float = 0.0
    low_confidence: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            'evaluator': self.evaluator,
            'radii': list(self.radii),
            'flux': list(self.values),
            'mass': self.limit,
            'error': self.error,
            'exponent': self.exponent,
            'fit_residual': self.residual,
            'low_confidence': self.low_confidence,
            'notes': list(self.notes),
        }


def _power_model(r, c0, c1, p):
    return c0 + c1 * r ** (-p)


def _polyfit(radii, values, p, degree):
    """c0 and max |residual| of the degree-J fit in s = r^{-p} / max s."""
    s = radii ** (-p)
    s = s / s.max()
    vander = np.vander(s, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(vander, values, rcond=None)
    residual = float(np.max(np.abs(vander @ coeffs - values)))
    return float(coeffs[0]), residual


def _polynomial_limit(radii, values, p, degree):
    limit, residual = _polyfit(radii, values, p, degree)
    error = residual
    if degree >= 2:
        lower, _ = _polyfit(radii, values, p, degree - 1)
        error = max(error, abs(limit - lower))
    return limit, error, residual


def estimate_exponent(radii, values):
    """
    p from the last three values, assuming a geometric tail.

    Returns:
        (p, ok) where ok is False for non-monotone or non-decaying tails
    """
    d1 = values[-2] - values[-3]
    d2 = values[-1] - values[-2]
    q = radii[-1] / radii[-2]
    if d1 == 0.0 or d2 == 0.0 or d2 / d1 <= 0.0:
        return 1.0, False
    p = -math.log(d2 / d1) / math.log(q)
    return p, p > 0.0


def _refine_exponent(radii, values, p):
    try:
        params, _ = curve_fit(
            _power_model, radii, values,
            p0=[values[-1], (values[0] - values[-1]) * radii[0] ** p, p],
            maxfev=2000,
        )
    except (RuntimeError, ValueError) as exc:
        logger.debug(f"curve_fit did not converge ({exc}); keeping p={p:.4g}")
        return p, False
    refined = float(params[2])
    if not math.isfinite(refined) or refined <= 0.0:
        return p, False
    return refined, True


def _is_monotone(values):
    diffs = np.diff(values)
    return bool(np.all(diffs >= 0.0) or np.all(diffs <= 0.0))


def extrapolate(radii, values, p=None, evaluator=''):
    """
    Extrapolate a per-radius sequence to r -> infinity.

    Args:
        radii: Increasing radii (at least 3)
        values: Per-radius values
        p: Known decay exponent; math.inf for r-independent sequences;
           None to fit it
        evaluator: Tag carried into the estimate

    Returns:
        MassEstimate with error >= max |fit residual|

    Raises:
        DomainError: Fewer than 3 values or mismatched lengths
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if radii.shape != values.shape:
        raise DomainError(f"{len(radii)} radii but {len(values)} values")
    if len(values) < 3:
        raise DomainError(f"extrapolation needs at least 3 values, got {len(values)}")
    if not np.all(np.isfinite(values)):
        raise DomainError("cannot extrapolate non-finite values")

    def estimate(limit, error, exponent, residual=0.0, low=False, notes=()):
        if low:
            logger.warning(f"Low-confidence extrapolation for '{evaluator}': {'; '.join(notes)}")
        return MassEstimate(
            radii=radii.tolist(), values=values.tolist(), limit=float(limit),
            error=float(max(error, residual)), evaluator=evaluator, exponent=exponent,
            residual=float(residual), low_confidence=low, notes=list(notes),
        )

    spread = float(values.max() - values.min())
    if spread == 0.0:
        return estimate(values[0], 0.0, p)
    if p is not None and math.isinf(p):
        mean = math.fsum(values.tolist()) / len(values)
        residual = float(np.max(np.abs(values - mean)))
        return estimate(mean, residual, p, residual)

    notes = []
    if not _is_monotone(values):
        notes.append('per-radius values are not monotone')

    if p is not None:
        if p <= 0.0:
            raise DomainError(f"decay exponent must be positive, got {p}")
        degree = min(len(values) - 1, MAX_FIT_DEGREE)
        limit, error, residual = _polynomial_limit(radii, values, p, degree)
        return estimate(limit, error, float(p), residual, bool(notes), notes)

    fitted, ok = estimate_exponent(radii, values)
    if not ok:
        notes.append(f'tail does not decay geometrically (p estimate {fitted:.4g})')
        return estimate(values[-1], spread, None, 0.0, True, notes)
    if len(values) > 3:
        fitted, ok = _refine_exponent(radii, values, fitted)
        if not ok:
            notes.append('exponent refinement failed')
    degree = min(len(values) - 2, MAX_FIT_DEGREE)
    limit, error, residual = _polynomial_limit(radii, values, fitted, degree)
    return estimate(limit, error, fitted, residual, bool(notes), notes)
