"""The insert/delete growth process and its Monte Carlo harness.

Randomness contract: every step draws exactly two uniforms ``(u0, u1)``
from the generator, in that order.  ``u0 < p`` selects insertion, in which
case the parent is ``1 + floor(u1 * m)`` for a tree of size ``m``.
Otherwise ``u1`` is handed to the deletion rule (ignored by LIFO, and the
whole step is a no-op on the single-node tree).  Because the draw count per
step is fixed, a trajectory only depends on the seed, never on which rule
or code path consumed it.
"""

from __future__ import annotations

import bisect
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from recdel.trees import RecursiveTree, canonical_rank, leaf_count, root_degree, tree_from_rank

THREADS_ENV = "RECDEL_THREADS"

FUNCTIONALS = ("stratum", "size", "leaf_count", "root_degree", "harmonic_of_size", "reciprocal_size")


@dataclass(frozen=True)
class ProcessParams:
    """Insertion probability ``p``; ``q = 1 - p`` is derived, never stored apart."""

    p: Fraction | float

    def __post_init__(self):
        p = self.p
        if isinstance(p, int) and not isinstance(p, bool):
            p = Fraction(p)
        if not isinstance(p, (Fraction, float)):
            raise TypeError(f"p must be a Fraction or float, got {type(p).__name__}")
        if not 0 <= p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> Fraction | float:
        return 1 - self.p

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @classmethod
    def parse(cls, text: str) -> ProcessParams:
        """``"3/10"`` gives an exact Fraction, ``"0.3"`` a float."""
        text = text.strip()
        if "/" in text:
            return cls(Fraction(text))
        return cls(float(text))

    def as_float(self) -> ProcessParams:
        return ProcessParams(float(self.p))

    def as_fraction(self) -> ProcessParams:
        """Exact version; floats convert via their shortest decimal form."""
        if self.exact:
            return self
        return ProcessParams(Fraction(repr(self.p)))


class DeletionUnavailable(NotImplementedError):
    """The rule cannot state its row distribution."""


class DeletionRule:
    """Maps a stratum ``k + 1`` tree to a stratum ``k`` tree.

    Subclasses implement :meth:`row_distribution` returning a sparse mapping
    ``{rank: probability}`` over 0-based canonical ranks of the stratum-``k``
    trees (probabilities are exact Fractions summing to 1).  The default
    :meth:`apply` inverts that distribution's CDF at the supplied uniform.
    Rules that only know how to sample override :meth:`apply` and leave
    :meth:`row_distribution` raising :class:`DeletionUnavailable`.
    """

    name = "rule"

    def row_distribution(self, t: RecursiveTree) -> Mapping[int, Fraction]:
        raise DeletionUnavailable(f"{self.name} does not expose a row distribution")

    def apply(self, t: RecursiveTree, u: float) -> RecursiveTree:
        if t.size < 2:
            raise ValueError("deletion needs a tree with at least two nodes")
        dist = sorted(self.row_distribution(t).items())
        cdf = np.cumsum([float(w) for _, w in dist])
        j = min(bisect.bisect_right(cdf, u * cdf[-1]), len(dist) - 1)
        return tree_from_rank(t.size - 2, dist[j][0])


def lifo_delete(t: RecursiveTree) -> RecursiveTree:
    """Drop the highest label, which is always a leaf."""
    if t.size < 2:
        raise ValueError("lifo_delete needs a tree with at least two nodes")
    return RecursiveTree(t.parents[:-1])


class LifoRule(DeletionRule):
    name = "lifo"

    def row_distribution(self, t):
        m = t.size
        if m < 2:
            raise ValueError("deletion needs a tree with at least two nodes")
        return {canonical_rank(t.parents) // (m - 1): Fraction(1)}

    def apply(self, t, u):
        return lifo_delete(t)


class CollapseToFirstRule(DeletionRule):
    """Test fixture outside the equiprobable class: every stratum-(k+1)
    tree deletes to canonical tree #1 (the star) of stratum k."""

    name = "collapse"

    def row_distribution(self, t):
        if t.size < 2:
            raise ValueError("deletion needs a tree with at least two nodes")
        return {0: Fraction(1)}


class PermutedLifoRule(DeletionRule):
    """LIFO followed by a fixed relabelling of each stratum.

    Composing LIFO with a bijection on the stratum-``k`` trees keeps every
    column sum at ``(k+1) q``, so this is another member of the equiprobable
    class; ``perms[k]`` is a permutation of ``range(k!)``.
    """

    name = "permuted-lifo"

    def __init__(self, perms: Mapping[int, Sequence[int]]):
        self.perms = {k: tuple(v) for k, v in perms.items()}
        for k, perm in self.perms.items():
            if sorted(perm) != list(range(math.factorial(k))):
                raise ValueError(f"perms[{k}] is not a permutation of range({math.factorial(k)})")

    def row_distribution(self, t):
        (rank,) = LifoRule().row_distribution(t)
        perm = self.perms.get(t.size - 2)
        return {perm[rank] if perm else rank: Fraction(1)}


RULES = {"lifo": LifoRule, "collapse": CollapseToFirstRule}


def get_rule(name: str) -> DeletionRule:
    try:
        return RULES[name]()
    except KeyError:
        raise ValueError(f"unknown deletion rule {name!r}; choose from {sorted(RULES)}") from None


def _insert_parent(u: float, m: int) -> int:
    return min(int(u * m), m - 1) + 1


def step_with(t: RecursiveTree, params: ProcessParams, rule: DeletionRule, u0: float, u1: float):
    """One step driven by explicit uniforms; returns ``(action, tree)``."""
    if u0 < float(params.p):
        return "insert", t.attach(_insert_parent(u1, t.size))
    if t.size == 1:
        return "stay", t
    return "delete", rule.apply(t, u1)


def step(t: RecursiveTree, params: ProcessParams, rule: DeletionRule, rng: np.random.Generator) -> RecursiveTree:
    u0, u1 = rng.random(2)
    return step_with(t, params, rule, u0, u1)[1]


@dataclass
class Trajectory:
    actions: list[str] = field(default_factory=list)
    strata: list[int] = field(default_factory=list)
    final: RecursiveTree = field(default_factory=RecursiveTree.single)
    snapshots: list[RecursiveTree] | None = None

    def __len__(self):
        return len(self.actions)


def run(n: int, params: ProcessParams, rule: DeletionRule, seed, keep_trees: bool = False) -> Trajectory:
    """Simulate ``n`` steps from the single-node tree.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts, including
    a :class:`numpy.random.SeedSequence` from :func:`replication_seed`.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    draws = rng.random((n, 2))
    t = RecursiveTree.single()
    traj = Trajectory(snapshots=[t] if keep_trees else None)
    for u0, u1 in draws:
        action, t = step_with(t, params, rule, u0, u1)
        traj.actions.append(action)
        traj.strata.append(t.size - 1)
        if keep_trees:
            traj.snapshots.append(t)
    traj.final = t
    return traj


def replication_seed(master_seed: int, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(rep,))


@dataclass(frozen=True)
class Summary:
    mean: float
    variance: float | None
    stderr: float | None
    reps: int


def _harmonic_table(m: int) -> np.ndarray:
    h = np.zeros(m + 1)
    h[1:] = np.cumsum(1.0 / np.arange(1, m + 1))
    return h


def _tree_observations(t: RecursiveTree) -> tuple[int, int, int]:
    return t.size, leaf_count(t), root_degree(t)


def _lifo_block(n: int, p: float, draws: np.ndarray):
    """Vectorised LIFO trajectories; ``draws`` has shape ``(reps, n, 2)``.

    Tracks parents and child counts so leaf count and root degree update in
    O(1) per step.  Consumes draws exactly as :func:`step_with` does.
    """
    reps = draws.shape[0]
    rows = np.arange(reps)
    parents = np.zeros((reps, n + 2), dtype=np.int32)
    kids = np.zeros((reps, n + 2), dtype=np.int32)
    size = np.ones(reps, dtype=np.int64)
    leaves = np.ones(reps, dtype=np.int64)
    rdeg = np.zeros(reps, dtype=np.int64)
    for t in range(n):
        u0 = draws[:, t, 0]
        u1 = draws[:, t, 1]
        ins = u0 < p
        dele = ~ins & (size > 1)

        r = rows[ins]
        m = size[r]
        par = np.minimum((u1[r] * m).astype(np.int64), m - 1) + 1
        parents[r, m + 1] = par
        leaves[r] += 1 - (kids[r, par] == 0)
        kids[r, par] += 1
        rdeg[r] += par == 1
        size[r] = m + 1

        d = rows[dele]
        node = size[d]
        par = parents[d, node]
        kids[d, par] -= 1
        leaves[d] += (kids[d, par] == 0).astype(np.int64) - 1
        rdeg[d] -= par == 1
        size[d] = node - 1
    return size, leaves, rdeg


def _thread_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, threads)


def simulate_final(n: int, params: ProcessParams, rule: DeletionRule, reps: int, master_seed: int,
                   threads: int | None = None, chunk: int = 2048) -> dict[str, np.ndarray]:
    """Per-replication final size, leaf count and root degree.

    Replication ``i`` is driven solely by ``replication_seed(master_seed, i)``,
    so the arrays are identical for any thread count or chunk size.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    size = np.empty(reps, dtype=np.int64)
    leaves = np.empty(reps, dtype=np.int64)
    rdeg = np.empty(reps, dtype=np.int64)
    p = float(params.p)

    def work(lo: int, hi: int) -> None:
        draws = np.empty((hi - lo, n, 2))
        for i in range(lo, hi):
            draws[i - lo] = np.random.default_rng(replication_seed(master_seed, i)).random((n, 2))
        if isinstance(rule, LifoRule):
            size[lo:hi], leaves[lo:hi], rdeg[lo:hi] = _lifo_block(n, p, draws)
            return
        for i in range(lo, hi):
            t = RecursiveTree.single()
            for u0, u1 in draws[i - lo]:
                t = step_with(t, params, rule, u0, u1)[1]
            size[i], leaves[i], rdeg[i] = _tree_observations(t)

    bounds = [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
    nthreads = _thread_count(threads)
    if nthreads == 1:
        for lo, hi in bounds:
            work(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(lambda b: work(*b), bounds))
    return {"size": size, "leaf_count": leaves, "root_degree": rdeg}


def monte_carlo(n: int, params: ProcessParams, rule: DeletionRule, reps: int, master_seed: int,
                functionals: Sequence[str] = FUNCTIONALS, threads: int | None = None) -> dict[str, Summary]:
    """Sample mean, variance and standard error of each requested functional at time ``n``."""
    functionals = list(functionals)
    if not functionals:
        raise ValueError("at least one functional is required")
    unknown = set(functionals) - set(FUNCTIONALS)
    if unknown:
        raise ValueError(f"unknown functionals {sorted(unknown)}; choose from {list(FUNCTIONALS)}")

    obs = simulate_final(n, params, rule, reps, master_seed, threads=threads)
    size = obs["size"]
    values = {
        "stratum": lambda: size - 1,
        "size": lambda: size,
        "leaf_count": lambda: obs["leaf_count"],
        "root_degree": lambda: obs["root_degree"],
        "harmonic_of_size": lambda: _harmonic_table(int(size.max()))[size],
        "reciprocal_size": lambda: 1.0 / size,
    }
    out = {}
    for name in functionals:
        x = np.asarray(values[name](), dtype=float)
        mean = float(x.mean())
        if reps > 1:
            var = float(x.var(ddof=1))
            out[name] = Summary(mean, var, math.sqrt(var / reps), reps)
        else:
            out[name] = Summary(mean, None, None, reps)
    return out
