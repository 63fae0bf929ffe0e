"""Truncated power series and the generating functions of the stratum walk.

A :class:`PowerSeries` keeps coefficients ``c_0..c_N``; every retained
coefficient is exact (Fractions) or double precision (floats), and binary
operations truncate to the smaller order.  The generating functions are
assembled from their closed forms with these operations only, so they give
a route to the moments that shares nothing with the recurrence in
:mod:`recdel.exact`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from recdel.exact import FLOAT, RATIONAL, iter_distributions, resolve_mode
from recdel.process import ProcessParams

GF_NAMES = ("P0", "P1", "mu", "mu2", "H", "h")


class SeriesDomainError(ValueError):
    pass


class PowerSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if len(coeffs) == 0:
            raise ValueError("a power series needs at least one coefficient")
        self.coeffs = list(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return not any(isinstance(c, float) for c in self.coeffs)

    @classmethod
    def constant(cls, value, order: int) -> PowerSeries:
        zero = value * 0
        return cls([value] + [zero] * order)

    @classmethod
    def polynomial(cls, coeffs: Sequence, order: int) -> PowerSeries:
        coeffs = list(coeffs)[: order + 1]
        zero = coeffs[0] * 0
        return cls(coeffs + [zero] * (order + 1 - len(coeffs)))

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if len(self.coeffs) > 6 else ""
        return f"PowerSeries([{head}{tail}], order={self.order})"

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def truncate(self, order: int) -> PowerSeries:
        return PowerSeries(self.coeffs[: order + 1])

    def _coerce(self, other) -> PowerSeries:
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries.constant(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return PowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([a * other for a in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        zero = a[0] * 0
        out = [zero] * (n + 1)
        # skip zero terms: several operands here are sparse polynomials
        nz_b = [(j, b[j]) for j in range(n + 1) if b[j]]
        for i in range(n + 1):
            ai = a[i]
            if not ai:
                continue
            for j, bj in nz_b:
                if i + j > n:
                    break
                out[i + j] += ai * bj
        return PowerSeries(out)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([a / other for a in self.coeffs])
        return ps_div(self, other)

    def __rtruediv__(self, other):
        return ps_div(self._coerce(other), self)

    def shift_up(self) -> PowerSeries:
        """Multiply by ``z``, keeping the order."""
        return PowerSeries([self.coeffs[0] * 0] + self.coeffs[:-1])

    def shift_down(self) -> PowerSeries:
        """Divide by ``z``; the constant term must vanish.  Loses one order."""
        if self.coeffs[0] != 0:
            raise SeriesDomainError(f"cannot divide by z: constant term is {self.coeffs[0]}")
        if self.order == 0:
            raise SeriesDomainError("cannot divide an order-0 series by z")
        return PowerSeries(self.coeffs[1:])

    def partial_sums(self) -> PowerSeries:
        """Multiply by ``1/(1 - z)``."""
        out = []
        acc = self.coeffs[0] * 0
        for c in self.coeffs:
            acc = acc + c
            out.append(acc)
        return PowerSeries(out)

    def derivative(self) -> PowerSeries:
        if self.order == 0:
            return PowerSeries([self.coeffs[0] * 0])
        return PowerSeries([n * c for n, c in enumerate(self.coeffs) if n > 0])

    def integral(self) -> PowerSeries:
        """Antiderivative with zero constant; gains one order."""
        out = [self.coeffs[0] * 0]
        for n, c in enumerate(self.coeffs):
            out.append(c / (n + 1) if isinstance(c, float) else Fraction(c, n + 1))
        return PowerSeries(out)

    def __call__(self, z):
        """Evaluate the truncated polynomial (Horner)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def to_float(self) -> PowerSeries:
        return PowerSeries([float(c) for c in self.coeffs])


def ps_div(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    b0 = b.coeffs[0]
    if b0 == 0:
        raise SeriesDomainError("division by a series with zero constant term")
    n = min(a.order, b.order)
    bc = b.coeffs
    nz_b = [(j, bc[j]) for j in range(1, n + 1) if bc[j]]
    out = []
    for m in range(n + 1):
        acc = a.coeffs[m]
        for j, bj in nz_b:
            if j > m:
                break
            acc -= bj * out[m - j]
        out.append(acc / b0)
    return PowerSeries(out)


def ps_arith(op: str, a: PowerSeries, b: PowerSeries) -> PowerSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return ps_div(a, b)
    raise ValueError(f"unknown series operation {op!r}")


def ps_sqrt(a: PowerSeries) -> PowerSeries:
    a0 = a.coeffs[0]
    if not a0 > 0:
        raise SeriesDomainError(f"square root needs a positive constant term, got {a0}")
    if isinstance(a0, float):
        root = math.sqrt(a0)
    else:
        a0 = Fraction(a0)
        root = Fraction(math.isqrt(a0.numerator), math.isqrt(a0.denominator))
        if root * root != a0:
            raise SeriesDomainError(f"constant term {a0} is not a rational square")
    r = [root]
    two_r0 = 2 * root
    for n in range(1, a.order + 1):
        acc = a.coeffs[n]
        for j in range(1, (n + 1) // 2):
            acc -= 2 * r[j] * r[n - j]
        if n % 2 == 0:
            acc -= r[n // 2] * r[n // 2]
        r.append(acc / two_r0)
    return PowerSeries(r)


def ps_log(a: PowerSeries) -> PowerSeries:
    """``log a`` for ``a_0 = 1`` via ``n L_n = n a_n - sum_{j<n} j L_j a_{n-j}``."""
    if a.coeffs[0] != 1:
        raise SeriesDomainError(f"log needs constant term 1, got {a.coeffs[0]}")
    ac = a.coeffs
    zero = ac[0] * 0
    nz = [(i, ac[i]) for i in range(1, len(ac)) if ac[i]]
    jl = [zero]  # j * L_j
    for n in range(1, a.order + 1):
        acc = n * ac[n]
        for i, ai in nz:
            if i >= n:
                break
            acc -= jl[n - i] * ai
        jl.append(acc)
    out = [zero]
    for n in range(1, len(jl)):
        out.append(jl[n] / n if isinstance(jl[n], float) else Fraction(jl[n], n))
    return PowerSeries(out)


def _z(order: int, one) -> PowerSeries:
    return PowerSeries.polynomial([one * 0, one], order)


def series_gf(name: str, params: ProcessParams, N: int, mode: str | None = None) -> PowerSeries:
    """Expansion to order ``N`` of one of the walk's generating functions.

    ``P0``/``P1``: ``P(S_n = 0)``, ``P(S_n = 1)``; ``mu``/``mu2``: first and
    second factorial moments; ``H``: ``E[H_{S_n}]``; ``h``: ``E[1/(S_n+1)]``.
    """
    if name not in GF_NAMES:
        raise ValueError(f"unknown generating function {name!r}; choose from {list(GF_NAMES)}")
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    mode = resolve_mode(params, mode)
    if mode == RATIONAL:
        one = Fraction(1)
        p = params.p
    else:
        one = 1.0
        p = float(params.p)
    q = one - p
    M = N + 1  # P1 and h lose one order to a division by z
    z = _z(M, one)
    root = ps_sqrt(PowerSeries.polynomial([one, 0 * one, -4 * p * q], M))

    def p0():
        return 2 / (1 - 2 * q * z + root)

    if name == "P0":
        out = p0()
    elif name == "P1":
        P0 = p0()
        out = (P0 - 1).shift_down() / q - P0.truncate(M - 1)
    elif name == "mu":
        P0 = p0()
        out = (q * P0.shift_up()).partial_sums() + ((p - q) * z).partial_sums().partial_sums()
    elif name == "mu2":
        P0 = p0()
        first = (2 * q * (2 * p * z - 1) * P0.shift_up()).partial_sums().partial_sums()
        second = (2 * (4 * p - 3) * p * z * z + 2 * q * z).partial_sums().partial_sums().partial_sums()
        out = first + second
    else:
        log_ratio = ps_log((1 + root) / (1 - 2 * p * z + root))
        if name == "H":
            out = log_ratio.partial_sums()
        else:
            prefactor = (1 + root) / (p * (1 - 2 * q * z + root))
            out = prefactor.truncate(M - 1) * log_ratio.shift_down()
    return out.truncate(N)


def _p0_closed(p: float, z: float) -> float:
    q = 1.0 - p
    return 2.0 / (1.0 - 2.0 * q * z + math.sqrt(1.0 - 4.0 * p * q * z * z))


def bivariate_closed_form(params: ProcessParams, z: float, u: float) -> float:
    """Closed form of ``sum_{n,k} P(S_n = k) u^k z^n``."""
    p = float(params.p)
    q = 1.0 - p
    den = q * z - u * (1.0 - p * u * z)
    if abs(den) < 1e-12:
        raise SeriesDomainError(f"closed form denominator vanishes at z={z}, u={u}")
    return (q * (1.0 - u) * z * _p0_closed(p, z) - u) / den


def bivariate_check(params: ProcessParams, z0: float, u0: float, N: int) -> float:
    """``|truncated double sum - closed form|`` at ``(z0, u0)``.

    Restricted to ``|z0| <= 1/2`` and ``|u0| <= 1`` so the truncated sum
    converges geometrically for every ``p``.
    """
    if abs(z0) > 0.5 or abs(u0) > 1:
        raise SeriesDomainError(f"need |z0| <= 0.5 and |u0| <= 1, got z0={z0}, u0={u0}")
    closed = bivariate_closed_form(params, z0, u0)
    terms = []
    zn = 1.0
    for dist in iter_distributions(N, params, FLOAT):
        powers = u0 ** np.arange(dist.n + 1, dtype=float)
        terms.append(zn * math.fsum(dist.values * powers))
        zn *= z0
    return abs(math.fsum(terms) - closed)
