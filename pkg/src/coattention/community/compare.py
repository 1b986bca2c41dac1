"""Partition similarity measures: adjusted mutual information and
element-centric similarity.

Both accept :class:`Partition` objects or plain node->community mappings and
are invariant under community relabeling.
"""

from __future__ import annotations

import math
from collections.abc import Mapping

from ..graph import Node
from .leiden import Partition

_EPS = 2.220446049250313e-16  # float64 machine epsilon


def _membership(p: Partition | Mapping[Node, int]) -> Mapping[Node, int]:
    return p.membership if isinstance(p, Partition) else p


def _contingency(
    p: Mapping[Node, int], q: Mapping[Node, int]
) -> tuple[list[int], list[int], dict[tuple[int, int], int]]:
    if p.keys() != q.keys():
        raise ValueError("partitions cover different node sets")
    row_ids: dict[int, int] = {}
    col_ids: dict[int, int] = {}
    cells: dict[tuple[int, int], int] = {}
    for node in p:
        i = row_ids.setdefault(p[node], len(row_ids))
        j = col_ids.setdefault(q[node], len(col_ids))
        cells[(i, j)] = cells.get((i, j), 0) + 1
    a = [0] * len(row_ids)
    b = [0] * len(col_ids)
    for (i, j), count in cells.items():
        a[i] += count
        b[j] += count
    return a, b, cells


def _entropy(counts: list[int], n: int) -> float:
    return -sum((c / n) * math.log(c / n) for c in counts if c)


def _expected_mi(a: list[int], b: list[int], n: int) -> float:
    """Expected mutual information under the permutation model."""
    # log k! for k in 0..n, shared by every hypergeometric term
    logfact = [0.0] * (n + 2)
    for k in range(2, n + 2):
        logfact[k] = logfact[k - 1] + math.log(k)
    log_n = math.log(n)
    total = 0.0
    for ai in a:
        base_a = logfact[ai] + logfact[n - ai] - logfact[n]
        for bj in b:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            base = base_a + logfact[bj] + logfact[n - bj]
            log_ab = math.log(ai) + math.log(bj)
            for nij in range(lo, hi + 1):
                log_term = log_n + math.log(nij) - log_ab
                log_prob = base - (
                    logfact[nij]
                    + logfact[ai - nij]
                    + logfact[bj - nij]
                    + logfact[n - ai - bj + nij]
                )
                total += (nij / n) * log_term * math.exp(log_prob)
    return total


def ami(p: Partition | Mapping[Node, int], q: Partition | Mapping[Node, int]) -> float:
    """Adjusted mutual information with arithmetic-mean normalization.

    Identical partitions score 1; the value can be <= 0 for partitions no
    more similar than chance.
    """
    pm = _membership(p)
    qm = _membership(q)
    a, b, cells = _contingency(pm, qm)
    n = len(pm)
    if n == 0 or (len(a) == 1 and len(b) == 1):
        return 1.0
    mi = 0.0
    for (i, j), nij in cells.items():
        mi += (nij / n) * math.log(n * nij / (a[i] * b[j]))
    emi = _expected_mi(a, b, n)
    normalizer = 0.5 * (_entropy(a, n) + _entropy(b, n))
    denominator = normalizer - emi
    # Sign-preserving clamp keeps 0/0 at a perfect match equal to 1.
    if denominator < 0:
        denominator = min(denominator, -_EPS)
    else:
        denominator = max(denominator, _EPS)
    return (mi - emi) / denominator


def element_centric(
    p: Partition | Mapping[Node, int],
    q: Partition | Mapping[Node, int],
    alpha: float = 0.9,
) -> float:
    """Element-centric similarity for disjoint partitions.

    Each element's cluster-affinity vector is the stationary distribution of
    a restart-``alpha`` walk confined to its cluster, which for hard
    partitions has the closed form (1 - alpha) * e_i + alpha / cluster_size.
    The score is one minus the mean corrected L1 difference.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    pm = _membership(p)
    qm = _membership(q)
    a, b, cells = _contingency(pm, qm)
    n = len(pm)
    if n == 0:
        return 1.0
    total = 0.0
    for (i, j), count in cells.items():
        na = a[i]
        nb = b[j]
        overlap = count
        l1 = (
            overlap * alpha * abs(1.0 / na - 1.0 / nb)
            + (na - overlap) * alpha / na
            + (nb - overlap) * alpha / nb
        )
        total += count * (1.0 - l1 / (2.0 * alpha))
    return total / n
