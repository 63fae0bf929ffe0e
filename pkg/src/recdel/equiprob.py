"""Brute-force check of conditional equiprobability on small strata.

Insertion and deletion matrices are indexed by 0-based canonical ranks
(see :mod:`recdel.trees`).  The dense builders are for inspection and are
capped; :func:`evolve_exact` applies the same transitions sparsely, which
is what lets it reach stratum 8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from recdel.process import DeletionRule, DeletionUnavailable, ProcessParams
from recdel.trees import DEFAULT_STRATUM_CAP, StratumCapError, tree_from_rank

MATRIX_CAP = 6


def _check_matrix_cap(k: int, cap: int) -> None:
    if k < 0:
        raise ValueError(f"stratum number must be >= 0, got {k}")
    if k > cap:
        raise StratumCapError(f"dense matrices for stratum {k} exceed cap {cap}")


def build_insertion_matrix(k: int, params: ProcessParams, cap: int = MATRIX_CAP) -> np.ndarray:
    """``k! x (k+1)!`` matrix of uniform-attachment transitions."""
    _check_matrix_cap(k + 1, cap)
    rows, cols = math.factorial(k), math.factorial(k + 1)
    weight = params.p / (k + 1)
    zero = weight * 0
    mat = np.full((rows, cols), zero, dtype=object if params.exact else float)
    for r in range(rows):
        for c in range(k + 1):
            mat[r, r * (k + 1) + c] = weight
    return mat


def build_deletion_matrix(k_plus_1: int, rule: DeletionRule, params: ProcessParams,
                          cap: int = MATRIX_CAP) -> np.ndarray:
    """``(k+1)! x k!`` matrix: row ``t`` is ``q`` times the rule's row distribution."""
    if k_plus_1 < 1:
        raise ValueError(f"deletion matrices start at stratum 1, got {k_plus_1}")
    _check_matrix_cap(k_plus_1, cap)
    k = k_plus_1 - 1
    q = params.q
    mat = np.full((math.factorial(k_plus_1), math.factorial(k)), q * 0,
                  dtype=object if params.exact else float)
    for r in range(mat.shape[0]):
        for col, w in rule.row_distribution(tree_from_rank(k_plus_1, r)).items():
            mat[r, col] += q * w if params.exact else float(q) * float(w)
    return mat


@dataclass
class ColumnSumReport:
    ok: bool
    sums: list


def check_column_sum_condition(Q: np.ndarray, tol: float = 1e-12) -> ColumnSumReport:
    """All column sums identical: exact for Fractions, within ``tol`` for floats."""
    sums = list(Q.sum(axis=0))
    if Q.dtype == object:
        ok = all(s == sums[0] for s in sums)
    else:
        ok = bool(np.ptp(sums) <= tol) if sums else True
    return ColumnSumReport(ok, sums)


@dataclass
class TreeLevelDistribution:
    """Probability of every canonical tree, stratum by stratum, at time ``n``."""

    n: int
    strata: dict[int, list] = field(default_factory=dict)

    def stratum_mass(self, k: int):
        vec = self.strata.get(k)
        if vec is None:
            return Fraction(0)
        return sum(vec, start=vec[0] * 0)

    def total(self):
        return sum((self.stratum_mass(k) for k in self.strata), start=Fraction(0))


def evolve_exact(n_max: int, K: int, params: ProcessParams, rule: DeletionRule,
                 cap: int = DEFAULT_STRATUM_CAP) -> list[TreeLevelDistribution]:
    """Exact tree-level law for ``n = 0..n_max`` on strata ``0..K``.

    ``n_max <= K`` keeps all mass inside the tracked strata.  A deletion at
    stratum 0 leaves the lone root in place.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if n_max > K:
        raise ValueError(f"n_max={n_max} exceeds K={K}; probability mass would leave the tracked strata")
    if K > cap:
        raise StratumCapError(f"K={K} exceeds stratum cap {cap}")
    p, q = params.p, params.q
    one = p * 0 + 1
    rows_cache: dict[tuple[int, int], list[tuple[int, Fraction]]] = {}

    def deletion_row(stratum: int, rank: int):
        key = (stratum, rank)
        if key not in rows_cache:
            dist = rule.row_distribution(tree_from_rank(stratum, rank))
            rows_cache[key] = [(col, w if params.exact else float(w)) for col, w in dist.items()]
        return rows_cache[key]

    cur = {0: [one]}
    out = [TreeLevelDistribution(0, {0: [one]})]
    for n in range(1, n_max + 1):
        nxt = {k: [one * 0] * math.factorial(k) for k in range(0, min(n, K) + 1)}
        for k, vec in cur.items():
            # insertion into stratum k+1
            w = p / (k + 1)
            target = nxt[k + 1]
            for r, mass in enumerate(vec):
                if mass:
                    base = r * (k + 1)
                    share = mass * w
                    for c in range(k + 1):
                        target[base + c] += share
            # deletion into stratum k-1, or hold at the root
            if k == 0:
                nxt[0][0] += q * vec[0]
                continue
            target = nxt[k - 1]
            for r, mass in enumerate(vec):
                if mass:
                    for col, wt in deletion_row(k, r):
                        target[col] += q * mass * wt
        cur = {k: v for k, v in nxt.items() if any(v)}
        out.append(TreeLevelDistribution(n, {k: list(v) for k, v in cur.items()}))
    return out


@dataclass
class UniformityEntry:
    n: int
    k: int
    mass: object
    max_deviation: object
    uniform: bool


def check_conditional_uniformity(dists: list[TreeLevelDistribution], tol=0) -> list[UniformityEntry]:
    """Max ``|pi(t)/mass - 1/k!|`` per stratum with positive mass."""
    report = []
    for dist in dists:
        for k in sorted(dist.strata):
            vec = dist.strata[k]
            mass = sum(vec, start=vec[0] * 0)
            if not mass:
                continue
            target = Fraction(1, math.factorial(k)) if isinstance(mass, Fraction) else 1 / math.factorial(k)
            dev = max(abs(x / mass - target) for x in vec)
            report.append(UniformityEntry(dist.n, k, mass, dev, dev <= tol))
    return report


def column_sum_table(rule: DeletionRule, params: ProcessParams, k_max: int,
                     cap: int = MATRIX_CAP) -> list[dict]:
    """Column-sum report for deletion matrices from stratum 1 up to ``k_max``."""
    rows = []
    for kp1 in range(1, k_max + 1):
        try:
            rep = check_column_sum_condition(build_deletion_matrix(kp1, rule, params, cap=cap))
        except DeletionUnavailable:
            rows.append({"k_plus_1": kp1, "available": False, "equal": None, "sums": None})
            continue
        rows.append({"k_plus_1": kp1, "available": True, "equal": rep.ok, "sums": rep.sums})
    return rows


def verification_report(rule: DeletionRule, params: ProcessParams, K: int, n_max: int,
                        tol=0, matrix_cap: int = MATRIX_CAP) -> dict:
    """Column sums up to ``min(K, matrix_cap)`` and uniformity for ``n <= n_max``.

    If ``n_max`` exceeds ``K`` the evolution runs on ``K' = n_max`` strata
    (still within the stratum cap) so no mass is lost.
    """
    cols = column_sum_table(rule, params, min(K, matrix_cap), cap=matrix_cap)
    dists = evolve_exact(n_max, max(K, n_max), params, rule)
    uni = check_conditional_uniformity(dists, tol)
    return {
        "rule": rule.name,
        "p": params.p,
        "K": K,
        "n": n_max,
        "column_sums": cols,
        "uniformity": [e.__dict__ for e in uni],
        "columns_equal": all(c["equal"] for c in cols if c["available"]),
        "uniform": all(e.uniform for e in uni),
    }
