"""Interlaced particle dynamics driven by fair coins.

Line ``j`` carries ``j`` particles. At each step every particle stays or
jumps one unit to the right, then is pushed back (or forward) if the jump
would break interlacing with the already-updated line above it.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .calculus import vandermonde
from .kernels import TwoLineState, fillings, interlaces, p, reachable_lines
from .rng import STREAM_KILLED, CoinField, coin_array, dynamics_coins

__all__ = [
    "InterlacedConfiguration",
    "KilledTwoLineProcess",
    "initial_configuration",
    "step",
    "simulate",
    "simulate_batch",
    "step_batch",
    "cone_rank",
    "killed_two_line_step",
    "exact_law",
    "exact_killed_law",
    "empirical_transition",
    "cone_points",
    "cone_size",
    "fixed_time_law",
    "conditional_lower_lines",
]


@dataclass(frozen=True)
class InterlacedConfiguration:
    lines: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        lines = tuple(tuple(int(v) for v in line) for line in self.lines)
        object.__setattr__(self, "lines", lines)
        for k, line in enumerate(lines, start=1):
            if len(line) != k:
                raise ValueError(f"line {k} has {len(line)} particles")
            if any(a >= b for a, b in zip(line, line[1:])):
                raise ValueError(f"line {k} is not strictly increasing: {line}")
        for k in range(1, len(lines)):
            if not interlaces(lines[k], lines[k - 1]):
                raise ValueError(f"lines {k} and {k + 1} do not interlace")

    @property
    def n(self) -> int:
        return len(self.lines)

    def __getitem__(self, j: int) -> tuple[int, ...]:
        """Line ``j`` (1-based)."""
        return self.lines[j - 1]

    def flat(self) -> tuple[int, ...]:
        return tuple(v for line in self.lines for v in line)

    def pair(self, k: int) -> TwoLineState:
        """Lines ``k + 1`` and ``k`` as a two-line state."""
        return TwoLineState(self.lines[k], self.lines[k - 1])


def initial_configuration(n: int) -> InterlacedConfiguration:
    if n < 1:
        raise ValueError(f"need at least one line, got n={n}")
    return InterlacedConfiguration(tuple(tuple(range(1, j + 1)) for j in range(1, n + 1)))


def _update_line(old: Sequence[int], above: Sequence[int] | None, coins: Sequence[int]) -> tuple[int, ...]:
    if above is None:
        return (old[0] + coins[0],)
    j = len(old)
    new = []
    for i in range(j):
        v = old[i] + coins[i]
        if i < j - 1 and v == above[i] + 1:
            v -= 1
        if i > 0 and v == above[i - 1]:
            v += 1
        new.append(v)
    return tuple(new)


def step(cfg: InterlacedConfiguration, coins: Sequence[Sequence[int]],
         neighbours: str = "updated") -> InterlacedConfiguration:
    """Advance one time step; ``coins[j-1][i-1]`` is the coin of particle i on line j.

    ``neighbours="updated"`` compares against the new positions of the line
    above (the canonical rule). ``"previous"`` compares against its positions
    before the step, which is the same rule written in the tiling's own time
    frame; on the particle process it is a different (non-canonical) chain.
    """
    if neighbours not in ("updated", "previous"):
        raise ValueError(f"unknown neighbour convention {neighbours!r}")
    out = []
    for j, line in enumerate(cfg.lines):
        if j == 0:
            above = None
        else:
            above = out[j - 1] if neighbours == "updated" else cfg.lines[j - 1]
        out.append(_update_line(line, above, coins[j]))
    return InterlacedConfiguration(tuple(out))


def simulate(n: int, T: int, seed: int, trial: int = 0) -> list[InterlacedConfiguration]:
    """Trajectory of length ``T + 1`` from the packed start."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    field = CoinField(seed, trial)
    cfg = initial_configuration(n)
    out = [cfg]
    for t in range(1, T + 1):
        cfg = step(cfg, field.at(t, n))
        out.append(cfg)
    return out


def step_batch(state: np.ndarray, beta: np.ndarray, n: int) -> np.ndarray:
    """Vectorised :func:`step` for rows of line-major positions."""
    offsets = [j * (j - 1) // 2 for j in range(1, n + 2)]
    new = state + beta
    for j in range(2, n + 1):
        lo, hi = offsets[j - 1], offsets[j]
        above = new[:, offsets[j - 2]:lo]
        seg = new[:, lo:hi]
        seg[:, :-1] -= seg[:, :-1] == above + 1
        seg[:, 1:] += seg[:, 1:] == above
    return new


def simulate_batch(n: int, T: int, trials: int, seed: int, record: Iterable[int] | None = None,
                   first_trial: int = 0, start: np.ndarray | None = None) -> dict[int, np.ndarray]:
    """Run many trajectories at once.

    Returns ``{t: array}`` for each recorded time, each array of shape
    ``(trials, n(n+1)/2)`` holding positions in line-major order. Trial ``k``
    uses the same coins as ``simulate(n, T, seed, trial=first_trial + k)``.
    ``start`` overrides the packed initial rows.
    """
    record = set(range(T + 1) if record is None else record)
    if start is None:
        packed = np.array(initial_configuration(n).flat(), dtype=np.int64)
        state = np.tile(packed, (trials, 1))
    else:
        state = np.array(start, dtype=np.int64).reshape(trials, n * (n + 1) // 2)
    ids = np.arange(first_trial, first_trial + trials)
    out = {}
    if 0 in record:
        out[0] = state.copy()
    for t in range(1, T + 1):
        beta = dynamics_coins(seed, ids, t, n).astype(np.int64)
        state = step_batch(state, beta, n)
        if t in record:
            out[t] = state.copy()
    return out


@dataclass(frozen=True)
class KilledTwoLineProcess:
    state: TwoLineState | tuple
    alive: bool = True
    tau: int | None = None
    time: int = 0


def killed_two_line_step(proc: KilledTwoLineProcess, alpha: Sequence[int], beta: Sequence[int]) -> KilledTwoLineProcess:
    """One step of the two-line process that dies when two lower particles meet.

    ``beta`` moves the n lower particles ``y``; ``alpha`` the n+1 upper ones ``x``.
    """
    if not proc.alive:
        return KilledTwoLineProcess(proc.state, False, proc.tau, proc.time + 1)
    st = proc.state
    x, y = (st.x, st.y) if isinstance(st, TwoLineState) else st
    n = len(y)
    y2 = tuple(y[i] + beta[i] for i in range(n))
    t = proc.time + 1
    if any(y2[i] == y2[i + 1] for i in range(n - 1)):
        return KilledTwoLineProcess((tuple(x), y2), False, t, t)
    x2 = tuple(_push(x[i] + alpha[i], y2, i, n) for i in range(n + 1))
    return KilledTwoLineProcess(TwoLineState(x2, y2), True, None, t)


def _push(v: int, y2: Sequence[int], i: int, n: int) -> int:
    if i < n and v == y2[i] + 1:
        v -= 1
    if i > 0 and v == y2[i - 1]:
        v += 1
    return v


def exact_killed_law(source: TwoLineState, t: int) -> tuple[dict[TwoLineState, Fraction], Fraction]:
    """Exact law after ``t`` steps by enumerating every coin pattern; returns (law, killed mass)."""
    n = source.n
    m = 2 * n + 1
    w = Fraction(1, 2**m)
    law = {source: Fraction(1)}
    killed = Fraction(0)
    for _ in range(t):
        nxt: dict[TwoLineState, Fraction] = defaultdict(Fraction)
        for st, pr in law.items():
            proc = KilledTwoLineProcess(st)
            for c in itertools.product((0, 1), repeat=m):
                res = killed_two_line_step(proc, c[: n + 1], c[n + 1:])
                if res.alive:
                    nxt[res.state] += pr * w
                else:
                    killed += pr * w
        law = dict(nxt)
    return law, killed


def exact_law(n: int, t: int, start: InterlacedConfiguration | None = None,
              neighbours: str = "updated") -> dict[InterlacedConfiguration, Fraction]:
    """Exact law of the full configuration after ``t`` steps (all coin patterns enumerated)."""
    cfg = start or initial_configuration(n)
    m = n * (n + 1) // 2
    w = Fraction(1, 2**m)
    law = {cfg: Fraction(1)}
    for _ in range(t):
        nxt: dict[InterlacedConfiguration, Fraction] = defaultdict(Fraction)
        for c, pr in law.items():
            for bits in itertools.product((0, 1), repeat=m):
                coins, k = [], 0
                for j in range(1, n + 1):
                    coins.append(bits[k:k + j])
                    k += j
                nxt[step(c, coins, neighbours)] += pr * w
        law = dict(nxt)
    return law


def empirical_transition(n: int, t: int, trials: int, seed: int, source: TwoLineState | None = None,
                         mode: str = "killed") -> dict:
    """Monte Carlo frequencies of the state reached after ``t`` steps.

    ``mode="killed"``: the two-line process from ``source`` (default packed);
    killed runs are pooled under the key ``"killed"``.
    ``mode="full"``: the full dynamics with ``n + 1`` lines from the packed
    start, tabulating the pair ``(X^{n+1}(t), X^n(t))`` as a :class:`TwoLineState`.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    freq: Counter = Counter()
    if mode == "full":
        out = simulate_batch(n + 1, t, trials, seed, record=[t])[t]
        lo = n * (n + 1) // 2
        for row in out:
            freq[TwoLineState(tuple(row[lo:lo + n + 1]), tuple(row[lo - n:lo]))] += 1
    elif mode == "killed":
        source = source or TwoLineState.packed(n)
        x = np.tile(np.array(source.x, dtype=np.int64), (trials, 1))
        y = np.tile(np.array(source.y, dtype=np.int64), (trials, 1))
        alive = np.ones(trials, dtype=bool)
        ids = np.arange(trials)[:, None]
        for s in range(1, t + 1):
            bits = coin_array(seed, STREAM_KILLED, ids, s, np.arange(2 * n + 1)[None, :]).astype(np.int64)
            y = y + bits[:, n + 1:]
            if n > 1:
                alive &= ~np.any(y[:, 1:] == y[:, :-1], axis=1)
            v = x + bits[:, : n + 1]
            v[:, :n] -= v[:, :n] == y + 1
            v[:, 1:] += v[:, 1:] == y
            x = v
        for k in range(trials):
            if alive[k]:
                freq[TwoLineState(tuple(x[k]), tuple(y[k]))] += 1
            else:
                freq["killed"] += 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {key: c / trials for key, c in freq.items()}


def cone_points(top: Sequence[int]) -> list[tuple[tuple[int, ...], ...]]:
    """All lower-line fillings ``(x^1, ..., x^{n-1})`` under a top line ``x^n``."""
    top = tuple(top)
    if len(top) == 1:
        return [()]
    out = []
    for below in fillings(top):
        for rest in cone_points(below):
            out.append(rest + (below,))
    return out


def cone_size(top: Sequence[int]) -> Fraction:
    """Closed form ``h_n(x^n) / prod_{k<n} k!`` for the number of fillings."""
    n = len(top)
    den = 1
    for k in range(1, n):
        den *= factorial(k)
    return Fraction(vandermonde(top), den)


def fixed_time_law(n: int, t: int) -> dict[InterlacedConfiguration, Fraction]:
    """Law of the full configuration at time ``t``: the top line follows the
    conditioned walk from the packed start and the lower lines are uniform
    over its fillings."""
    packed = tuple(range(1, n + 1))
    law = {}
    for top in reachable_lines(packed, t):
        weight = p(t, packed, top)  # = p_plus(t, packed, top) / cone_size(top)
        if weight == 0:
            continue
        for lower in cone_points(top):
            law[InterlacedConfiguration(lower + (top,))] = weight
    return law


def conditional_lower_lines(samples: Iterable[InterlacedConfiguration]) -> dict[tuple[int, ...], dict]:
    """Group samples by top line; report the empirical law of the lower lines
    next to the uniform reference ``1 / card``."""
    groups: dict[tuple[int, ...], Counter] = defaultdict(Counter)
    for cfg in samples:
        groups[cfg.lines[-1]][cfg.lines[:-1]] += 1
    out = {}
    for top, counts in groups.items():
        total = sum(counts.values())
        out[top] = {
            "count": total,
            "frequencies": {k: v / total for k, v in counts.items()},
            "counts": dict(counts),
            "support": cone_points(top),
            "uniform": Fraction(1, int(cone_size(top))),
        }
    return out


def cone_rank(lower: Sequence[Sequence[int]], top: Sequence[int]) -> int:
    """Lexicographic index of ``lower = (x^1, ..., x^{n-1})`` among :func:`cone_points` of ``top``.

    Patterns are ordered by ``x^{n-1}`` first, then recursively below it,
    which is the order :func:`cone_points` lists them in.
    """
    top = tuple(top)
    if len(top) == 1:
        return 0
    below = tuple(lower[-1])
    rank = 0
    for z in fillings(top):
        if z >= below:
            break
        rank += int(cone_size(z))
    return rank + cone_rank(lower[:-1], below)
