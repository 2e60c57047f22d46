"""
Generalized Kronecker delta and the pairing templates used to contract it.

kron_delta(upper, lower) is the determinant of the r x r matrix
delta^{upper_a}_{lower_b}: the sign of the permutation taking one index list
to the other when both list the same distinct indices, and 0 otherwise.

Contracting a delta against products of antisymmetric pairs (R_{ij}^{lm})
only needs a few combinatorial templates over positions 0..2k-1 of an
increasing index subset; they are built once per size and memoized.
"""

import itertools
from functools import lru_cache

from core.exceptions import DomainError


def permutation_sign(seq):
    """Sign of seq relative to its sorted order (entries must be distinct)."""
    seq = list(seq)
    inversions = sum(
        1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b]
    )
    return -1 if inversions % 2 else 1


def kron_delta(upper, lower):
    """
    delta^{upper}_{lower}.

    Args:
        upper: Index list (i_1..i_r)
        lower: Index list (j_1..j_r)

    Returns:
        -1, 0 or +1

    Raises:
        DomainError: If the lists have different lengths
    """
    upper = list(upper)
    lower = list(lower)
    if len(upper) != len(lower):
        raise DomainError(f"delta needs equal index counts, got {len(upper)} and {len(lower)}")
    if len(set(upper)) != len(upper) or len(set(lower)) != len(lower):
        return 0
    if set(upper) != set(lower):
        return 0
    return permutation_sign(upper) * permutation_sign(lower)


@lru_cache(maxsize=None)
def canonical_pairings(positions):
    """
    Perfect matchings of `positions` as increasing pairs ordered by first element.

    Args:
        positions: Sorted tuple of distinct ints, even length

    Returns:
        Tuple of pairings, each a tuple of (a, b) with a < b
    """
    if not positions:
        return ((),)
    first, rest = positions[0], positions[1:]
    out = []
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for tail in canonical_pairings(remaining):
            out.append(((first, partner),) + tail)
    return tuple(out)


@lru_cache(maxsize=None)
def ordered_pairings(positions):
    """All orderings of every canonical pairing (pairs stay increasing)."""
    out = []
    for pairing in canonical_pairings(positions):
        out.extend(itertools.permutations(pairing))
    return tuple(out)


def pairing_sign(pairs, tail=()):
    """Sign of the flattened pair sequence (followed by `tail`) against sorted order."""
    flat = [p for pair in pairs for p in pair] + list(tail)
    return permutation_sign(flat)
