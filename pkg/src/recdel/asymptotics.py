"""Large-n estimates of the stratum functionals in the three regimes.

Each estimate carries the order of its error term.  Where only a bound is
known (``P(S_n = 0)`` for ``p > 1/2``) the value is 0 and the bound sits in
``error_order``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from recdel.exact import FLOAT, iter_distributions, moments
from recdel.process import ProcessParams

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"

CRITICAL_TOL = 1e-12

ASYM_FUNCTIONALS = (
    "P0", "mean", "mu2", "variance", "harmonic", "reciprocal_size",
    "harmonic_size", "root_degree", "leaf_count",
)

# functional name -> MomentTable attribute
EXACT_FIELD = {
    "P0": "root_prob",
    "mean": "mean_stratum",
    "mu2": "second_factorial",
    "variance": "variance",
    "harmonic": "harmonic",
    "reciprocal_size": "reciprocal_size",
    "harmonic_size": "harmonic_size",
    "root_degree": "root_degree_mean",
    "leaf_count": "leaf_mean",
}


@dataclass(frozen=True)
class RegimeEstimate:
    functional: str
    regime: str
    value: float
    error_order: str


def regime(params: ProcessParams) -> str:
    p = params.p
    if isinstance(p, Fraction):
        half = p == Fraction(1, 2)
    else:
        half = abs(p - 0.5) < CRITICAL_TOL
    if half:
        return CRITICAL
    return SUBCRITICAL if p < 0.5 else SUPERCRITICAL


def _geometric(p: float, q: float) -> str:
    return f"O(({2 * math.sqrt(p * q):.6g}+eps)^n)"


def asym_estimate(functional: str, params: ProcessParams, n: int, refined: bool = False) -> RegimeEstimate:
    """Regime-appropriate closed form for ``functional`` at time ``n``.

    ``refined`` adds the next-order term to the critical mean.  Names:
    ``P0``, ``mean``, ``mu2``, ``variance``, ``harmonic`` (``E[H_{S_n}]``),
    ``reciprocal_size`` (``E[1/Z_n]``), ``harmonic_size`` (``E[H_{Z_n}]``),
    ``root_degree`` and ``leaf_count``.
    """
    if functional not in ASYM_FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; choose from {list(ASYM_FUNCTIONALS)}")
    if n < 1:
        raise ValueError(f"asymptotic estimates need n >= 1, got {n}")
    reg = regime(params)
    p = float(params.p)
    q = 1.0 - p
    geo = _geometric(p, q)

    def est(value, err):
        return RegimeEstimate(functional, reg, float(value), err)

    if functional == "P0":
        if reg == SUBCRITICAL:
            return est((q - p) / q, geo)
        if reg == CRITICAL:
            return est(math.sqrt(2 / (math.pi * n)), "O(n^-3/2)")
        return est(0.0, f"O(({2 * math.sqrt(p * q):.6g})^n n^-3/2)")

    if functional == "mean":
        if reg == SUBCRITICAL:
            return est(p / (q - p), geo)
        if reg == CRITICAL:
            value = math.sqrt(2 * n / math.pi) - 0.5
            if refined:
                return est(value + 1 / (4 * math.sqrt(2 * math.pi * n)), "O(n^-3/2)")
            return est(value, "O(n^-1/2)")
        return est((p - q) * n + q / (p - q), geo)

    if functional == "mu2":
        if reg == SUBCRITICAL:
            return est(2 * (p / (q - p)) ** 2, geo)
        if reg == CRITICAL:
            return est(n + 1 - 2 * math.sqrt(2 * n / math.pi), "O(n^-1/2)")
        return est((p - q) ** 2 * n * n - (4 * p * p - 3) * n + 2 * q * (1 - 3 * p) / (p - q) ** 2, geo)

    if functional == "variance":
        if reg == SUBCRITICAL:
            return est(p * q / (q - p) ** 2, geo)
        if reg == CRITICAL:
            root = math.sqrt(2 * n / math.pi)
            return est((1 - 2 / math.pi) * n - root / 2 + (3 - 1 / math.pi) / 4, "O(n^-1/2)")
        return est(p * q * (4 * (1 - 4 * p * q) * n - 3) / (p - q) ** 2, geo + " n")

    if functional in ("harmonic", "root_degree"):
        # mean root degree is E[H_{S_n}], so both names share one estimate
        if reg == SUBCRITICAL:
            return est(math.log(q / (q - p)), geo)
        if reg == CRITICAL:
            return est(0.5 * math.log(n), "O(1)")
        return est(math.log(p - q) + math.log(n), "O(1)")

    if functional == "reciprocal_size":
        if reg == SUBCRITICAL:
            return est((q - p) / p * math.log(q / (q - p)), geo)
        if reg == CRITICAL:
            return est(math.log(n) / math.sqrt(2 * math.pi * n), "o(log n / sqrt n)")
        return est(1 / ((p - q) * n), "o(1/n)")

    if functional == "harmonic_size":
        h = asym_estimate("harmonic", params, n)
        r = asym_estimate("reciprocal_size", params, n)
        return est(h.value + r.value, h.error_order)

    mean = asym_estimate("mean", params, n, refined=refined)
    p0 = asym_estimate("P0", params, n)
    return est((1 + mean.value + p0.value) / 2, mean.error_order)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    exact: float
    asymptotic: float
    difference: float


def exact_values(functional: str, params: ProcessParams, n_grid: Iterable[int]) -> dict[int, float]:
    """Float-mode exact values of ``functional`` at each ``n`` in the grid."""
    if functional not in EXACT_FIELD:
        raise ValueError(f"unknown functional {functional!r}")
    wanted = sorted(set(n_grid))
    if not wanted:
        return {}
    field_name = EXACT_FIELD[functional]
    out = {}
    targets = set(wanted)
    for dist in iter_distributions(wanted[-1], params.as_float(), FLOAT):
        if dist.n in targets:
            out[dist.n] = float(getattr(moments(dist), field_name))
    return out


def convergence_table(functional: str, params: ProcessParams, n_grid: Iterable[int],
                      refined: bool = False) -> list[ConvergenceRow]:
    exact = exact_values(functional, params, n_grid)
    rows = []
    for n in sorted(exact):
        a = asym_estimate(functional, params, n, refined=refined).value
        rows.append(ConvergenceRow(n, exact[n], a, abs(exact[n] - a)))
    return rows
