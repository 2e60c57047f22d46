"""
Normalizing constants of the mass and of the lower-bound identity.

omega = omega_{n-1} is the area of the unit sphere S^{n-1}.
"""

import math

from quadrature.sphere_grid import sphere_volume


def definition_constant(n, k):
    """c(n, k) = (n-2k)! / (2^{k-1} (n-1)! omega)."""
    return math.factorial(n - 2 * k) / (2 ** (k - 1) * math.factorial(n - 1) * sphere_volume(n))


def equivalent_constant(n, k):
    """(k-1)! (n-k)! / ((n-1)! omega), for the T_{k-1} flux and the boundary term."""
    return math.factorial(k - 1) * math.factorial(n - k) / (math.factorial(n - 1) * sphere_volume(n))


def lk_term_constant(n, k):
    """(n-2k)! / (2^k (n-1)! omega)."""
    return math.factorial(n - 2 * k) / (2 ** k * math.factorial(n - 1) * sphere_volume(n))


def grad_term_constant(n, k):
    """(n-2k) / (2^k omega)."""
    return (n - 2 * k) / (2 ** k * sphere_volume(n))


def constants_table(n, k):
    return {
        'omega': sphere_volume(n),
        'c_definition': definition_constant(n, k),
        'c_equivalent': equivalent_constant(n, k),
        'c_lk_term': lk_term_constant(n, k),
        'c_grad_term': grad_term_constant(n, k),
    }
