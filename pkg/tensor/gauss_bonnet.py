"""
Gauss-Bonnet curvature L_k and the tensor P_(k) from a Riemann tensor.

    L_k = 2^{-k} delta^{i_1..i_2k}_{j_1..j_2k} R_{i_1 i_2}^{j_1 j_2} ... R_{i_2k-1 i_2k}^{j_2k-1 j_2k}
    P_(k)^{stlm} = 2^{-k} delta^{i_1..i_2k-2 s t}_{j_1..j_2k} R.. R g^{j_2k-1 l} g^{j_2k m}

Neither is evaluated over all n^{4k} index tuples. Only index sets W with
2k distinct entries contribute, and because every R factor is antisymmetric
in both pairs the sum over orderings of W collapses to signed pairings:

    L_k = 2^k k! sum_W sum_{P canonical} sum_{Q ordered} sgn P sgn Q prod R[P_a, Q_a]

(and an analogous template set for P_(k), restricted to s < t, a < b and
filled in by antisymmetry). Templates depend only on k; combined with the
increasing subsets W they become a ContractionPlan of flat indices into the
Riemann array, so a batch of points is contracted with one gather per
factor. Index conventions live in tensor.conventions.

Cost is C(n, 2k) times (2k-1)!! (2k-1)!! k! terms for L_k; for P_(k) with
n = 8, k = 3 a plan has about 1.1e5 terms, so batches are chunked.

The flux of the mass only needs the trace Q^{ij}_{jm}; for conformally flat
Riemann tensors pk_trace_conformal gives it from T_{k-1}(A) directly.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from core.exceptions import DomainError
from symfun.symmetric import newton_tensor
from tensor.conventions import lower_riemann
from tensor.kronecker import canonical_pairings, ordered_pairings, pairing_sign

logger = logging.getLogger(__name__)

# elements of the (points x terms) work array per chunk
CHUNK_BUDGET = 1 << 22


@dataclass(frozen=True)
class ContractionPlan:
    """
    Flat-index description of a delta contraction.

    Attributes:
        n: Dimension
        k: Order
        flat_index: (M, f) indices into a flattened (n^4,) Riemann array
        coeff: (M,) signed multiplicities
        scatter: Optional (M, n^4) sparse map onto output components
    """

    n: int
    k: int
    flat_index: np.ndarray
    coeff: np.ndarray
    scatter: object = None

    @property
    def size(self):
        return int(self.coeff.shape[0])


def _check_order(n, k):
    if k < 1:
        raise DomainError(f"curvature order must be positive, got k={k}")
    if 2 * k > n:
        raise DomainError(f"2k = {2 * k} exceeds dimension n = {n}")


def _flat(n, a, b, c, d):
    return ((a * n + b) * n + c) * n + d


@lru_cache(maxsize=None)
def lk_plan(n, k):
    """Plan for L_k in dimension n."""
    _check_order(n, k)
    subsets = np.array(list(itertools.combinations(range(n), 2 * k)), dtype=np.int64)
    positions = tuple(range(2 * k))
    index_blocks, coeff_blocks = [], []
    weight = 2 ** k * math.factorial(k)
    for lower in canonical_pairings(positions):
        s_lower = pairing_sign(lower)
        for upper in ordered_pairings(positions):
            sign = s_lower * pairing_sign(upper)
            cols = [
                _flat(n, subsets[:, p[0]], subsets[:, p[1]], subsets[:, q[0]], subsets[:, q[1]])
                for p, q in zip(lower, upper)
            ]
            index_blocks.append(np.stack(cols, axis=1))
            coeff_blocks.append(np.full(len(subsets), float(weight * sign)))
    plan = ContractionPlan(
        n=n,
        k=k,
        flat_index=np.concatenate(index_blocks),
        coeff=np.concatenate(coeff_blocks),
    )
    logger.debug(f"L_{k} plan for n={n}: {plan.size} terms")
    return plan


@lru_cache(maxsize=None)
def pk_plan(n, k):
    """Plan for the mixed tensor Q^{st}_{ab} (s < t, a < b) with P = Q g^-1 g^-1."""
    _check_order(n, k)
    subsets = np.array(list(itertools.combinations(range(n), 2 * k)), dtype=np.int64)
    positions = tuple(range(2 * k))
    weight = 2.0 ** (k - 2) * math.factorial(k - 1)
    index_blocks, coeff_blocks, target_blocks = [], [], []
    for ps, pt in itertools.combinations(positions, 2):
        rest_lower = tuple(p for p in positions if p not in (ps, pt))
        for pa, pb in itertools.combinations(positions, 2):
            rest_upper = tuple(p for p in positions if p not in (pa, pb))
            target = _flat(n, subsets[:, ps], subsets[:, pt], subsets[:, pa], subsets[:, pb])
            for lower in canonical_pairings(rest_lower):
                s_lower = pairing_sign(lower, tail=(ps, pt))
                for upper in ordered_pairings(rest_upper):
                    sign = s_lower * pairing_sign(upper, tail=(pa, pb))
                    cols = [
                        _flat(n, subsets[:, p[0]], subsets[:, p[1]], subsets[:, q[0]], subsets[:, q[1]])
                        for p, q in zip(lower, upper)
                    ]
                    if cols:
                        index_blocks.append(np.stack(cols, axis=1))
                    else:
                        index_blocks.append(np.zeros((len(subsets), 0), dtype=np.int64))
                    coeff_blocks.append(np.full(len(subsets), weight * sign))
                    target_blocks.append(target)
    flat_index = np.concatenate(index_blocks)
    coeff = np.concatenate(coeff_blocks)
    targets = np.concatenate(target_blocks)
    rows = np.arange(len(coeff))
    scatter = sparse.csr_matrix(
        (np.ones(len(coeff)), (rows, targets)), shape=(len(coeff), n ** 4)
    )
    plan = ContractionPlan(n=n, k=k, flat_index=flat_index, coeff=coeff, scatter=scatter)
    logger.debug(f"P_({k}) plan for n={n}: {plan.size} terms")
    return plan


def _as_batch(riem):
    riem = np.asarray(riem, dtype=float)
    if riem.ndim < 4 or len(set(riem.shape[-4:])) != 1:
        raise DomainError(f"expected (..., n, n, n, n) Riemann array, got shape {riem.shape}")
    n = riem.shape[-1]
    lead = riem.shape[:-4]
    return riem.reshape((-1, n ** 4)), lead, n


def _chunks(count, terms):
    step = max(1, CHUNK_BUDGET // max(1, terms))
    for start in range(0, count, step):
        yield slice(start, min(count, start + step))


def _term_values(plan, rflat):
    vals = np.broadcast_to(plan.coeff, (rflat.shape[0], plan.size)).copy()
    for f in range(plan.flat_index.shape[1]):
        vals *= rflat[:, plan.flat_index[:, f]]
    return vals


def lk_contract(riem, k):
    """
    L_k from a mixed Riemann tensor R_{ij}^{lm}.

    Args:
        riem: (..., n, n, n, n) array in the tensor.conventions layout
        k: Order, 1 <= k <= n/2

    Returns:
        float for a single tensor, (...) array for a batch

    Raises:
        DomainError: If 2k > n
    """
    rflat, lead, n = _as_batch(riem)
    plan = lk_plan(n, k)
    out = np.empty(rflat.shape[0])
    for sl in _chunks(rflat.shape[0], plan.size):
        out[sl] = _term_values(plan, rflat[sl]).sum(axis=1)
    out = out.reshape(lead)
    return float(out) if out.ndim == 0 else out


def pk_mixed(riem, k):
    """
    Q^{st}_{ab} = 2^{-k} delta^{I s t}_{J a b} prod R_I^J, the P_(k) tensor
    before raising its last pair; antisymmetric in (s, t) and in (a, b).
    """
    rflat, lead, n = _as_batch(riem)
    plan = pk_plan(n, k)
    half = np.empty((rflat.shape[0], n ** 4))
    for sl in _chunks(rflat.shape[0], plan.size):
        vals = _term_values(plan, rflat[sl])
        half[sl] = np.asarray(plan.scatter.T @ vals.T).T
    half = half.reshape(lead + (n, n, n, n))
    swapped_upper = np.swapaxes(half, -4, -3)
    swapped_lower = np.swapaxes(half, -2, -1)
    both = np.swapaxes(swapped_upper, -2, -1)
    return half - swapped_upper - swapped_lower + both


def pk_tensor(riem, metric, k):
    """
    P_(k)^{stlm} for a mixed Riemann tensor and metric g_ij.

    Args:
        riem: (..., n, n, n, n) mixed Riemann tensor
        metric: (..., n, n) metric g_ij at the same points
        k: Order, 2k <= n

    Returns:
        (..., n, n, n, n) array, contravariant in all four slots
    """
    Q = pk_mixed(riem, k)
    ginv = np.linalg.inv(np.asarray(metric, dtype=float))
    return lower_riemann(Q, ginv)


def contract_pk(P, riem, metric):
    """Full contraction P^{ijlm} R_{ijlm}; equals L_k when P = P_(k)."""
    lowered = lower_riemann(riem, metric)
    return np.sum(P * lowered, axis=(-4, -3, -2, -1))


def pk_trace_conformal(A, k):
    """
    Trace Q^{ij}_{jm} of pk_mixed for the conformally flat Riemann tensor of
    a metric-frame Schouten tensor A.

    Each R factor acts inside the delta as 4 A (x) delta, so the contraction
    collapses to a Newton tensor:

        Q^{ij}_{jm} = -2^{k-2} (k-1)! (n-k)!/(n-2k)! T_{k-1}(A)^i_m

    Args:
        A: (..., n, n) metric-frame Schouten tensor
        k: Order, 2k <= n

    Returns:
        (..., n, n) array
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    _check_order(n, k)
    scale = 2.0 ** (k - 2) * math.factorial(k - 1) * math.factorial(n - k) / math.factorial(n - 2 * k)
    return -scale * newton_tensor(k - 1, A)
