"""Exact calculus on functions Z -> Q with finite support.

A :class:`LatticeFunction` is a dense window of :class:`fractions.Fraction`
values starting at ``lo``; everything outside the window is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

__all__ = [
    "LatticeFunction",
    "delta",
    "bernoulli_step",
    "convolve",
    "convolution_power",
    "step_power",
    "backward_difference",
    "forward_difference",
    "cumulative",
    "strict_cumulative",
    "cumulative_function",
    "vandermonde",
    "vandermonde_raw",
]


@dataclass(frozen=True)
class LatticeFunction:
    lo: int
    values: tuple[Fraction, ...]
    probability: bool = False

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        lo = self.lo
        # canonical form: no explicit zeros at either end
        start, stop = 0, len(vals)
        while start < stop and vals[start] == 0:
            start += 1
        while stop > start and vals[stop - 1] == 0:
            stop -= 1
        object.__setattr__(self, "lo", lo + start if stop > start else 0)
        object.__setattr__(self, "values", vals[start:stop])

    @classmethod
    def from_dict(cls, table: dict[int, object], probability: bool = False) -> "LatticeFunction":
        if not table:
            return cls(0, (), probability)
        lo, hi = min(table), max(table)
        return cls(lo, tuple(Fraction(table.get(x, 0)) for x in range(lo, hi + 1)), probability)

    @property
    def hi(self) -> int:
        """Last index of the stored window (``lo - 1`` when empty)."""
        return self.lo + len(self.values) - 1

    @property
    def support(self) -> range:
        return range(self.lo, self.hi + 1)

    def __call__(self, x: int) -> Fraction:
        k = x - self.lo
        if 0 <= k < len(self.values):
            return self.values[k]
        return Fraction(0)

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        return _combine(self, other, 1)

    def __sub__(self, other: "LatticeFunction") -> "LatticeFunction":
        return _combine(self, other, -1)

    def __neg__(self) -> "LatticeFunction":
        return LatticeFunction(self.lo, tuple(-v for v in self.values))

    def scale(self, c) -> "LatticeFunction":
        c = Fraction(c)
        return LatticeFunction(self.lo, tuple(c * v for v in self.values))

    def shift(self, k: int) -> "LatticeFunction":
        """``x -> f(x - k)``."""
        return LatticeFunction(self.lo + k, self.values, self.probability)

    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def items(self) -> Iterable[tuple[int, Fraction]]:
        return ((self.lo + k, v) for k, v in enumerate(self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeFunction):
            return NotImplemented
        return self.lo == other.lo and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.lo, self.values))

    def __repr__(self) -> str:
        vals = ", ".join(str(v) for v in self.values)
        return f"LatticeFunction(lo={self.lo}, values=({vals}))"


def _combine(f: LatticeFunction, g: LatticeFunction, sign: int) -> LatticeFunction:
    if not f.values:
        return g if sign > 0 else -g
    if not g.values:
        return f
    lo = min(f.lo, g.lo)
    hi = max(f.hi, g.hi)
    return LatticeFunction(lo, tuple(f(x) + sign * g(x) for x in range(lo, hi + 1)))


def delta(i: int) -> LatticeFunction:
    return LatticeFunction(i, (Fraction(1),), probability=True)


def bernoulli_step() -> LatticeFunction:
    """The fair coin step law: mass 1/2 at 0 and at 1."""
    return LatticeFunction(0, (Fraction(1, 2), Fraction(1, 2)), probability=True)


def convolve(f: LatticeFunction, g: LatticeFunction) -> LatticeFunction:
    if not f.values or not g.values:
        return LatticeFunction(0, ())
    out = [Fraction(0)] * (len(f.values) + len(g.values) - 1)
    for i, a in enumerate(f.values):
        if a == 0:
            continue
        for j, b in enumerate(g.values):
            out[i + j] += a * b
    return LatticeFunction(f.lo + g.lo, tuple(out), f.probability and g.probability)


def convolution_power(f: LatticeFunction, t: int) -> LatticeFunction:
    """t-fold convolution of ``f`` with itself, by iteration."""
    if t < 0:
        raise ValueError(f"convolution power must be nonnegative, got {t}")
    result = delta(0)
    for _ in range(t):
        result = convolve(result, f)
    return LatticeFunction(result.lo, result.values, f.probability or t == 0)


@lru_cache(maxsize=None)
def step_power(t: int) -> LatticeFunction:
    """Closed form of the t-step Bernoulli law, ``x -> 2**-t * C(t, x)``.

    This is the fast path used by the kernels; it is cross-checked against
    :func:`convolution_power` in the tests.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    d = 2**t
    return LatticeFunction(0, tuple(Fraction(comb(t, x), d) for x in range(t + 1)), probability=True)


def backward_difference(f: LatticeFunction) -> LatticeFunction:
    """``(Delta f)(x) = f(x) - f(x - 1)``."""
    return f - f.shift(1)


def forward_difference(f: LatticeFunction) -> LatticeFunction:
    """``(bar-Delta f)(x) = f(x + 1) - f(x)``."""
    return f.shift(-1) - f


def cumulative(f: LatticeFunction, x: int) -> Fraction:
    """Inverse backward difference: sum of f(y) over y <= x."""
    if x < f.lo:
        return Fraction(0)
    return sum(f.values[: x - f.lo + 1], Fraction(0))


def strict_cumulative(f: LatticeFunction, x: int) -> Fraction:
    """Inverse forward difference: sum of f(y) over y <= x - 1.

    Not used by the kernels; kept so both inverses are available.
    """
    return cumulative(f, x - 1)


def cumulative_function(f: LatticeFunction) -> "_Cumulative":
    return _Cumulative(f)


class _Cumulative:
    # Delta^{-1} f is constant (= total mass) above the support, so it is not
    # a finitely supported LatticeFunction; this callable stands in for it.
    def __init__(self, f: LatticeFunction):
        self.f = f
        acc = Fraction(0)
        prefix = []
        for v in f.values:
            acc += v
            prefix.append(acc)
        self.prefix = tuple(prefix)
        self.mass = acc

    def __call__(self, x: int) -> Fraction:
        k = x - self.f.lo
        if k < 0:
            return Fraction(0)
        if k >= len(self.prefix):
            return self.mass
        return self.prefix[k]


def vandermonde(x: Sequence[int]) -> int:
    """Product of ``x[j] - x[i]`` over ``i < j``; rejects non-increasing input."""
    x = tuple(x)
    for a, b in zip(x, x[1:]):
        if not a < b:
            raise ValueError(f"expected a strictly increasing tuple, got {x}")
    return vandermonde_raw(x)


def vandermonde_raw(x: Sequence) -> int:
    """Same product without the ordering check (may be zero or negative)."""
    prod = 1
    for j in range(len(x)):
        for i in range(j):
            prod *= x[j] - x[i]
    return prod
