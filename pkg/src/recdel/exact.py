"""Exact law of the stratum number and the moments built on it.

The stratum number is a lazy reflecting walk: up with probability ``p``,
down with probability ``q``, and held at 0 when a deletion hits the lone
root.  Row ``n`` of the table ``P[n][k] = P(S_n = k)`` follows from

    P[n+1][k] = p P[n][k-1] + q P[n][k+1]      (k >= 1)
    P[n+1][0] = q P[n][0]   + q P[n][1]

In rational mode with ``p = a/b`` every entry of row ``n`` is an integer
over ``b**n``, so the recurrence runs on Python ints and fractions are
formed only at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterator

import numpy as np

from recdel.process import ProcessParams

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

Number = Fraction | float


def resolve_mode(params: ProcessParams, mode: str | None) -> str:
    if mode is None:
        return RATIONAL if params.exact else FLOAT
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == RATIONAL and not params.exact:
        raise ValueError("rational mode needs p as an exact fraction")
    return mode


def harmonic_numbers(m: int, mode: str = RATIONAL) -> list:
    """``[H_0, ..., H_m]`` with ``H_0 = 0``."""
    out = [Fraction(0)] if mode == RATIONAL else [0.0]
    acc = out[0]
    for j in range(1, m + 1):
        acc = acc + (Fraction(1, j) if mode == RATIONAL else 1.0 / j)
        out.append(acc)
    return out


@dataclass(frozen=True)
class StratumDistribution:
    """Row ``n`` of the stratum table.

    Rational rows are held as integer numerators over a shared denominator;
    float rows as a numpy array.
    """

    n: int
    mode: str
    numerators: tuple[int, ...] | None = None
    denominator: int = 1
    values: np.ndarray | None = None

    @property
    def probs(self) -> list:
        if self.mode == RATIONAL:
            return [Fraction(x, self.denominator) for x in self.numerators]
        return [float(x) for x in self.values]

    def __getitem__(self, k: int):
        if not 0 <= k <= self.n:
            return Fraction(0) if self.mode == RATIONAL else 0.0
        if self.mode == RATIONAL:
            return Fraction(self.numerators[k], self.denominator)
        return float(self.values[k])

    def __len__(self):
        return self.n + 1

    def total(self):
        if self.mode == RATIONAL:
            return Fraction(sum(self.numerators), self.denominator)
        return math.fsum(self.values)


def iter_distributions(n_max: int, params: ProcessParams, mode: str | None = None) -> Iterator[StratumDistribution]:
    """Rows ``n = 0, 1, ..., n_max`` of the stratum table."""
    if n_max < 0:
        raise ValueError(f"n must be >= 0, got {n_max}")
    mode = resolve_mode(params, mode)
    if mode == RATIONAL:
        a, b = params.p.numerator, params.p.denominator
        c = b - a
        row = [1]
        scale = 1
        yield StratumDistribution(0, mode, tuple(row), scale)
        for n in range(1, n_max + 1):
            new = [0] * (n + 1)
            new[0] = c * (row[0] + (row[1] if len(row) > 1 else 0))
            for k in range(1, n + 1):
                up = a * row[k - 1]
                down = c * row[k + 1] if k + 1 < len(row) else 0
                new[k] = up + down
            row = new
            scale *= b
            yield StratumDistribution(n, mode, tuple(row), scale)
    else:
        p = float(params.p)
        q = 1.0 - p
        row = np.ones(1)
        yield StratumDistribution(0, mode, values=row.copy())
        for n in range(1, n_max + 1):
            new = np.zeros(n + 1)
            new[1:] = p * row
            new[:n - 1] += q * row[1:]
            new[0] += q * row[0]
            row = new
            yield StratumDistribution(n, mode, values=row.copy())


def stratum_recurrence(n: int, params: ProcessParams, mode: str | None = None) -> StratumDistribution:
    dist = None
    for dist in iter_distributions(n, params, mode):
        pass
    return dist


@dataclass(frozen=True)
class MomentTable:
    n: int
    mean_stratum: Number
    second_factorial: Number
    variance: Number
    harmonic: Number
    reciprocal_size: Number
    harmonic_size: Number
    leaf_mean: Number
    root_degree_mean: Number
    root_prob: Number

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.field_names()}


class _IntHarmonics:
    """Harmonic numbers and reciprocals scaled to integers by ``lcm(1..m)``."""

    def __init__(self):
        self.lcm = 1
        self.h = [0]       # H_k * lcm
        self.recip = [0]   # lcm / k, slot 0 unused

    def extend(self, m: int) -> None:
        if m < len(self.h):
            return
        new_lcm = math.lcm(self.lcm, *range(len(self.h), m + 1))
        factor = new_lcm // self.lcm
        self.h = [x * factor for x in self.h]
        self.recip = [0] + [new_lcm // j for j in range(1, len(self.recip))]
        self.lcm = new_lcm
        for j in range(len(self.h), m + 1):
            self.recip.append(new_lcm // j)
            self.h.append(self.h[-1] + self.recip[j])


_HARMONICS = _IntHarmonics()


def moments(dist: StratumDistribution) -> MomentTable:
    n = dist.n
    if dist.mode == RATIONAL:
        num, den = dist.numerators, dist.denominator
        _HARMONICS.extend(n + 1)
        L, hs, rc = _HARMONICS.lcm, _HARMONICS.h, _HARMONICS.recip
        mean = Fraction(sum(k * x for k, x in enumerate(num)), den)
        mu2 = Fraction(sum(k * (k - 1) * x for k, x in enumerate(num)), den)
        harm = Fraction(sum(hs[k] * x for k, x in enumerate(num)), L * den)
        recip = Fraction(sum(rc[k + 1] * x for k, x in enumerate(num)), L * den)
        root = Fraction(num[0], den)
    else:
        v = dist.values
        k = np.arange(n + 1, dtype=float)
        hs = np.array(harmonic_numbers(n, FLOAT))
        mean = math.fsum(k * v)
        mu2 = math.fsum(k * (k - 1) * v)
        harm = math.fsum(hs * v)
        recip = math.fsum(v / (k + 1))
        root = float(v[0])
    return MomentTable(
        n=n,
        mean_stratum=mean,
        second_factorial=mu2,
        variance=mu2 + mean - mean * mean,
        harmonic=harm,
        reciprocal_size=recip,
        harmonic_size=harm + recip,
        leaf_mean=(1 + mean + root) / 2,
        root_degree_mean=harm,
        root_prob=root,
    )


def expected_leaf_count(dist: StratumDistribution) -> Number:
    """Mean leaf count, from ``E_0[L_k] = (k+1)/2`` for ``k >= 1`` and 1 at ``k = 0``."""
    return moments(dist).leaf_mean


def expected_root_degree(dist: StratumDistribution) -> Number:
    """Mean root degree ``E[H_{S_n}]``.

    A uniform recursive tree on ``k + 1`` nodes has mean root degree
    ``H_k`` (node ``i`` picks the root with probability ``1/(i-1)``), which
    exhaustive enumeration confirms; so the average is over ``H_{S_n}``
    rather than ``H_{Z_n}``.  The latter is :attr:`MomentTable.harmonic_size`.
    """
    return moments(dist).harmonic


def moment_rows(n_max: int, params: ProcessParams, mode: str | None = None) -> Iterator[MomentTable]:
    for dist in iter_distributions(n_max, params, mode):
        yield moments(dist)
