"""Determinantal transition kernels for two interlaced lines, in exact arithmetic.

A two-line state is a pair ``(x, y)`` with ``x`` of length ``n + 1`` and ``y``
of length ``n`` satisfying ``x_1 <= y_1 < x_2 <= y_2 < ... <= y_n < x_{n+1}``.

The kernel matrix is laid out with one row per *source* coordinate and one
column per *target* coordinate, in block order ``[[A, B], [C, D]]``::

    A[a][b] = phi_t(x'_b - x_a)
    B[a][b] = Delta^{-1} phi_t(y'_b - x_a) - 1{b >= a}
    C[a][b] = Delta phi_t(x'_b - y_a)
    D[a][b] = phi_t(y'_b - y_a)

where ``phi_t`` is the t-step law of a fair 0/1 walk.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence

from .calculus import cumulative_function, step_power, backward_difference, vandermonde, vandermonde_raw
from .linalg import bareiss, determinant

__all__ = [
    "TwoLineState",
    "KernelMatrix",
    "interlaces",
    "assemble",
    "q",
    "q_plus",
    "q_unchecked",
    "p",
    "p_plus",
    "lambda_measure",
    "fillings",
    "reachable_states",
    "reachable_lines",
    "marginalize_x",
    "intertwine_check",
    "recursion_check",
    "degeneracy_residuals",
    "determinant",
]


def interlaces(x: Sequence[int], y: Sequence[int]) -> bool:
    """True iff ``x_1 <= y_1 < x_2 <= ... <= y_n < x_{n+1}``."""
    if len(x) != len(y) + 1:
        return False
    for i, yi in enumerate(y):
        if not (x[i] <= yi < x[i + 1]):
            return False
    return True


@dataclass(frozen=True)
class TwoLineState:
    x: tuple[int, ...]
    y: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        object.__setattr__(self, "y", tuple(int(v) for v in self.y))
        if len(self.x) != len(self.y) + 1:
            raise ValueError(f"x must have one more entry than y, got {len(self.x)} and {len(self.y)}")
        if not interlaces(self.x, self.y):
            raise ValueError(f"state does not interlace: x={self.x}, y={self.y}")

    @property
    def n(self) -> int:
        return len(self.y)

    def coordinates(self) -> tuple[int, ...]:
        """Interleaved order ``x_1, y_1, x_2, ..., y_n, x_{n+1}``."""
        z = []
        for i in range(self.n):
            z += [self.x[i], self.y[i]]
        z.append(self.x[-1])
        return tuple(z)

    @classmethod
    def packed(cls, n: int) -> "TwoLineState":
        return cls(tuple(range(1, n + 2)), tuple(range(1, n + 1)))


def _state(s) -> TwoLineState:
    if isinstance(s, TwoLineState):
        return s
    x, y = s
    return TwoLineState(tuple(x), tuple(y))


@dataclass(frozen=True)
class KernelMatrix:
    n: int
    t: int
    A: tuple[tuple[Fraction, ...], ...]
    B: tuple[tuple[Fraction, ...], ...]
    C: tuple[tuple[Fraction, ...], ...]
    D: tuple[tuple[Fraction, ...], ...]

    def full(self) -> list[list[Fraction]]:
        top = [list(a) + list(b) for a, b in zip(self.A, self.B)]
        bottom = [list(c) + list(d) for c, d in zip(self.C, self.D)]
        return top + bottom

    def det(self) -> Fraction:
        return determinant(self.full())


def assemble(t: int, source, target) -> KernelMatrix:
    source, target = _state(source), _state(target)
    if source.n != target.n:
        raise ValueError(f"dimension mismatch: n={source.n} vs n={target.n}")
    if t < 0:
        raise ValueError("time must be nonnegative")
    phi = step_power(t)
    cum = cumulative_function(phi)
    dphi = backward_difference(phi)
    x, y, x2, y2 = source.x, source.y, target.x, target.y
    n = source.n
    A = tuple(tuple(phi(x2[b] - x[a]) for b in range(n + 1)) for a in range(n + 1))
    B = tuple(tuple(cum(y2[b] - x[a]) - (1 if b >= a else 0) for b in range(n)) for a in range(n + 1))
    C = tuple(tuple(dphi(x2[b] - y[a]) for b in range(n + 1)) for a in range(n))
    D = tuple(tuple(phi(y2[b] - y[a]) for b in range(n)) for a in range(n))
    return KernelMatrix(n, t, A, B, C, D)


@lru_cache(maxsize=None)
def _binomial_row(t: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    row = tuple(comb(t, k) for k in range(t + 1))
    return row, tuple(itertools.accumulate(row))


def _integer_entries(t: int):
    # Entries scaled by 2**t, so every block entry is an integer.
    row, prefix = _binomial_row(t)
    full = 2**t

    def phi(k: int) -> int:
        return row[k] if 0 <= k <= t else 0

    def cum(k: int) -> int:
        if k < 0:
            return 0
        return prefix[k] if k <= t else full

    def dphi(k: int) -> int:
        return phi(k) - phi(k - 1)

    return phi, cum, dphi, full


def q_unchecked(t: int, x: Sequence[int], y: Sequence[int], x2: Sequence[int], y2: Sequence[int]) -> Fraction:
    """The kernel determinant for arbitrary integer tuples (no interlacing check).

    Used by the recursion and boundary identities, which probe points just
    outside the interlacing set.
    """
    n = len(y)
    phi, cum, dphi, full = _integer_entries(t)
    rows = []
    for a in range(n + 1):
        xa = x[a]
        rows.append([phi(x2[b] - xa) for b in range(n + 1)]
                    + [cum(y2[b] - xa) - (full if b >= a else 0) for b in range(n)])
    for a in range(n):
        ya = y[a]
        rows.append([dphi(x2[b] - ya) for b in range(n + 1)] + [phi(y2[b] - ya) for b in range(n)])
    return Fraction(bareiss(rows), full ** (2 * n + 1))


def q(t: int, source, target) -> Fraction:
    """Killed-process transition probability from ``source`` to ``target`` in ``t`` steps."""
    source, target = _state(source), _state(target)
    if source.n != target.n:
        raise ValueError(f"dimension mismatch: n={source.n} vs n={target.n}")
    if t < 0:
        raise ValueError("time must be nonnegative")
    return q_unchecked(t, source.x, source.y, target.x, target.y)


def q_plus(t: int, source, target) -> Fraction:
    """h-transformed kernel: ``h(y') / h(y) * q``."""
    source, target = _state(source), _state(target)
    return Fraction(vandermonde(target.y), vandermonde(source.y)) * q(t, source, target)


def _line(v: Sequence[int]) -> tuple[int, ...]:
    v = tuple(int(a) for a in v)
    vandermonde(v)  # validates ordering
    return v


def p(t: int, y: Sequence[int], y2: Sequence[int]) -> Fraction:
    """Non-intersecting walk determinant ``det[phi_t(y'_j - y_i)]``."""
    y, y2 = _line(y), _line(y2)
    if len(y) != len(y2):
        raise ValueError("dimension mismatch")
    phi, _, _, full = _integer_entries(t)
    rows = [[phi(b - a) for b in y2] for a in y]
    return Fraction(bareiss(rows), full ** len(y))


def p_plus(t: int, y: Sequence[int], y2: Sequence[int]) -> Fraction:
    """Transition probability of walks conditioned never to meet."""
    y, y2 = _line(y), _line(y2)
    return Fraction(vandermonde(y2), vandermonde(y)) * p(t, y, y2)


def fillings(x: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All ``y`` with ``x_1 <= y_1 < x_2 <= ... <= y_n < x_{n+1}``."""
    x = tuple(x)
    ranges = [range(x[i], x[i + 1]) for i in range(len(x) - 1)]
    return itertools.product(*ranges)


def lambda_measure(x: Sequence[int], y: Sequence[int]) -> Fraction:
    """``n! h_n(y) / h_{n+1}(x)``, a probability measure on the fillings of ``x``."""
    x, y = tuple(x), tuple(y)
    if not interlaces(x, y):
        raise ValueError(f"{y} is not a filling of {x}")
    n = len(y)
    return Fraction(factorial(n) * vandermonde_raw(y), vandermonde(x))


def reachable_lines(start: Sequence[int], t: int) -> Iterator[tuple[int, ...]]:
    """Strictly increasing tuples with each coordinate in ``[start_i, start_i + t]``."""
    for cand in itertools.product(*(range(v, v + t + 1) for v in start)):
        if all(a < b for a, b in zip(cand, cand[1:])):
            yield cand


def reachable_states(source, t: int) -> Iterator[TwoLineState]:
    """Every interlaced state whose coordinates lie within ``t`` steps ahead of ``source``."""
    source = _state(source)
    for y2 in reachable_lines(source.y, t):
        for x2 in itertools.product(*(range(v, v + t + 1) for v in source.x)):
            if interlaces(x2, y2):
                yield TwoLineState(x2, y2)


def marginalize_x(t: int, source, y2: Sequence[int]) -> Fraction:
    """Sum of ``q_plus(t, source, (x', y'))`` over every admissible ``x'``."""
    source = _state(source)
    y2 = _line(y2)
    total = Fraction(0)
    for x2 in itertools.product(*(range(v, v + t + 1) for v in source.x)):
        if interlaces(x2, y2):
            total += q_plus(t, source, (x2, y2))
    return total


def intertwine_check(t: int, x: Sequence[int], target) -> tuple[Fraction, Fraction]:
    """Both sides of the intertwining ``sum_y lambda(x,y) q+(t,(x,y),.) = p+(t,x,x') lambda(x',y')``."""
    x = _line(x)
    target = _state(target)
    if len(x) != len(target.x):
        raise ValueError("dimension mismatch")
    lhs = Fraction(0)
    for y in fillings(x):
        lhs += lambda_measure(x, y) * q_plus(t, (x, y), target)
    rhs = p_plus(t, x, target.x) * lambda_measure(target.x, target.y)
    return lhs, rhs


def recursion_check(t: int, source, target) -> tuple[Fraction, Fraction]:
    """``q(t+1, s, .)`` against one averaging step applied in every source coordinate."""
    source, target = _state(source), _state(target)
    n = source.n
    m = 2 * n + 1
    acc = Fraction(0)
    for e in itertools.product((0, 1), repeat=m):
        x = tuple(source.x[i] + e[2 * i] for i in range(n + 1))
        y = tuple(source.y[i] + e[2 * i + 1] for i in range(n))
        acc += q_unchecked(t, x, y, target.x, target.y)
    return q(t + 1, source, target), acc / 2**m


def degeneracy_residuals(t: int, x: Sequence[int], y: Sequence[int], target) -> list[tuple[str, Fraction]]:
    """Boundary quantities that must vanish at the given source point.

    For each ``i`` where the source sits on a boundary:
    ``y_i == y_{i+1}`` gives ``q``; ``x_i == y_i`` gives the forward difference
    of ``q`` in ``x_i``; ``x_{i+1} == y_i`` gives the forward difference in
    ``x_{i+1}``.
    """
    target = _state(target)
    x, y = list(x), list(y)
    out = []

    def val(xx, yy):
        return q_unchecked(t, xx, yy, target.x, target.y)

    for i in range(len(y) - 1):
        if y[i] == y[i + 1]:
            out.append((f"y{i + 1}=y{i + 2}", val(x, y)))
    for i in range(len(y)):
        if x[i] == y[i]:
            bumped = x.copy()
            bumped[i] += 1
            out.append((f"x{i + 1}=y{i + 1}", val(bumped, y) - val(x, y)))
        if x[i + 1] == y[i]:
            bumped = x.copy()
            bumped[i + 1] += 1
            out.append((f"x{i + 2}=y{i + 1}", val(bumped, y) - val(x, y)))
    return out
