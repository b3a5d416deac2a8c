"""Domino tilings of the Aztec diamond and the shuffling algorithm.

Coordinates: a unit square is named by its lower-left corner ``(a, b)``; the
diamond of order ``n`` is the union of squares inside ``|x| + |y| <= n + 1``,
so ``a, b`` range over ``[-n, n - 1]``. Internally a tiling is a ``2n x 2n``
int8 grid, row ``r = n - 1 - b`` (top row first) and column ``c = a + n``,
holding the type code of the domino covering each square.

The checkerboard puts black on the left square of the top row, i.e. ``(a, b)``
is black iff ``a + b + n`` is even. Horizontal dominoes are N when their left
square is black, S otherwise; vertical ones are W when their top square is
black, E otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .dynamics import InterlacedConfiguration, initial_configuration, step
from .rng import STREAM_CREATION, coin

__all__ = [
    "EMPTY", "N", "S", "E", "W", "TYPE_NAMES",
    "Domino",
    "DominoTiling",
    "InvariantViolation",
    "diamond_mask",
    "checkerboard_colour",
    "classify",
    "destruction",
    "shuffle_move",
    "creation",
    "creation_blocks",
    "grow",
    "grow_steps",
    "enumerate_all",
    "extract_particles",
    "CoupledRun",
    "coupled_run",
    "particle_law",
]

EMPTY, N, S, E, W = 0, 1, 2, 3, 4
TYPE_NAMES = {N: "N", S: "S", E: "E", W: "W"}
_CODES = {v: k for k, v in TYPE_NAMES.items()}


class InvariantViolation(RuntimeError):
    """An internal consistency check of the shuffling algorithm failed."""


@dataclass(frozen=True)
class Domino:
    a: int
    b: int
    orientation: str  # "horizontal" | "vertical"
    type: str

    def squares(self) -> tuple[tuple[int, int], tuple[int, int]]:
        if self.orientation == "horizontal":
            return (self.a, self.b), (self.a + 1, self.b)
        return (self.a, self.b), (self.a, self.b + 1)


def _in_diamond(a: int, b: int, n: int) -> bool:
    u = a if a >= 0 else -a - 1
    v = b if b >= 0 else -b - 1
    return u + v <= n - 1


_MASKS: dict[int, np.ndarray] = {}


def diamond_mask(n: int) -> np.ndarray:
    """Boolean ``2n x 2n`` grid marking the squares of the order-n diamond."""
    m = _MASKS.get(n)
    if m is None:
        idx = np.arange(2 * n)
        a = idx - n
        u = np.where(a >= 0, a, -a - 1)  # same form for rows, by symmetry
        m = (u[:, None] + u[None, :]) <= n - 1
        if n <= 512:
            _MASKS[n] = m
    return m


def _black_grid(n: int) -> np.ndarray:
    r = np.arange(2 * n)[:, None]
    c = np.arange(2 * n)[None, :]
    return (c - r + n - 1) % 2 == 0


def checkerboard_colour(square: tuple[int, int], n: int) -> str:
    a, b = square
    if not _in_diamond(a, b, n):
        raise ValueError(f"square {square} is outside the order-{n} diamond")
    return "black" if (a + b + n) % 2 == 0 else "white"


def classify(a: int, b: int, orientation: str, n: int) -> str:
    """Type of the domino anchored at lower-left square ``(a, b)`` in the order-n colouring."""
    if orientation == "horizontal":
        return "N" if (a + b + n) % 2 == 0 else "S"
    if orientation == "vertical":
        return "W" if (a + b + 1 + n) % 2 == 0 else "E"
    raise ValueError(f"unknown orientation {orientation!r}")


class DominoTiling:
    """A (possibly partial) tiling of the order-n diamond, stored as a type grid."""

    def __init__(self, order: int, grid: np.ndarray | None = None):
        if order < 0:
            raise ValueError("order must be nonnegative")
        self.order = order
        if grid is None:
            grid = np.zeros((2 * order, 2 * order), dtype=np.int8)
        if grid.shape != (2 * order, 2 * order):
            raise ValueError(f"grid shape {grid.shape} does not match order {order}")
        self.grid = grid

    @classmethod
    def from_dominoes(cls, order: int, dominoes: Iterable[Domino | tuple]) -> "DominoTiling":
        t = cls(order)
        for d in dominoes:
            if not isinstance(d, Domino):
                a, b, orientation = d[:3]
                d = Domino(a, b, orientation, classify(a, b, orientation, order))
            code = _CODES[classify(d.a, d.b, d.orientation, order)]
            if TYPE_NAMES[code] != d.type:
                raise ValueError(f"{d} has the wrong type for order {order}")
            for (a, b) in d.squares():
                if not _in_diamond(a, b, order):
                    raise ValueError(f"{d} leaves the diamond")
                r, c = order - 1 - b, a + order
                if t.grid[r, c] != EMPTY:
                    raise ValueError(f"{d} overlaps another domino")
                t.grid[r, c] = code
        return t

    def __eq__(self, other) -> bool:
        return isinstance(other, DominoTiling) and self.order == other.order and np.array_equal(self.grid, other.grid)

    def __hash__(self) -> int:
        return hash((self.order, self.grid.tobytes()))

    def key(self) -> bytes:
        return self.grid.tobytes()

    def copy(self) -> "DominoTiling":
        return DominoTiling(self.order, self.grid.copy())

    def dominoes(self) -> Iterator[Domino]:
        n = self.order
        g = self.grid
        black = _black_grid(n)
        # the anchor (lower-left square) of N and W is white/black respectively:
        # N: left square black; S: left square white; E: lower square black; W: lower square white
        anchor = ((g == N) & black) | ((g == S) & ~black) | ((g == E) & black) | ((g == W) & ~black)
        rs, cs = np.nonzero(anchor)
        for r, c in zip(rs.tolist(), cs.tolist()):
            code = int(g[r, c])
            a, b = c - n, n - 1 - r
            orientation = "horizontal" if code in (N, S) else "vertical"
            yield Domino(a, b, orientation, TYPE_NAMES[code])

    def __len__(self) -> int:
        return int(np.count_nonzero(self.grid)) // 2

    def counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.grid == code)) // 2 for code, name in TYPE_NAMES.items()}

    def is_complete(self) -> bool:
        return bool(np.all((self.grid != EMPTY) == diamond_mask(self.order)))

    def check(self) -> None:
        """Raise :class:`InvariantViolation` unless this is an exact cover by well-formed dominoes."""
        n = self.order
        g = self.grid
        if not self.is_complete():
            raise InvariantViolation("tiling does not cover the diamond exactly")
        black = _black_grid(n)
        pad = np.zeros((2 * n + 2, 2 * n + 2), dtype=np.int8)
        pad[1:-1, 1:-1] = g
        right = pad[1:-1, 2:]
        left = pad[1:-1, :-2]
        up = pad[:-2, 1:-1]
        down = pad[2:, 1:-1]
        ok = np.ones_like(black)
        ok &= ~((g == N) & black) | (right == N)
        ok &= ~((g == N) & ~black) | (left == N)
        ok &= ~((g == S) & ~black) | (right == S)
        ok &= ~((g == S) & black) | (left == S)
        ok &= ~((g == W) & black) | (down == W)
        ok &= ~((g == W) & ~black) | (up == W)
        ok &= ~((g == E) & ~black) | (down == E)
        ok &= ~((g == E) & black) | (up == E)
        if not ok.all():
            raise InvariantViolation("grid contains a broken domino")
        if len(self) != n * (n + 1):
            raise InvariantViolation(f"expected {n * (n + 1)} dominoes, found {len(self)}")

    def __repr__(self) -> str:
        return f"DominoTiling(order={self.order}, dominoes={len(self)})"


def destruction(tiling: DominoTiling) -> DominoTiling:
    """Remove every S-over-N and every E-left-of-W 2x2 block."""
    g = tiling.grid
    n = tiling.order
    pad = np.zeros((2 * n + 2, 2 * n + 2), dtype=np.int8)
    pad[1:-1, 1:-1] = g
    up, down = pad[:-2, 1:-1], pad[2:, 1:-1]
    left, right = pad[1:-1, :-2], pad[1:-1, 2:]
    kill = ((g == N) & (up == S)) | ((g == S) & (down == N)) | ((g == E) & (right == W)) | ((g == W) & (left == E))
    out = g.copy()
    out[kill] = EMPTY
    return DominoTiling(n, out)


def shuffle_move(partial: DominoTiling) -> DominoTiling:
    """Slide N up, S down, E right, W left; the result lives in the next diamond."""
    n = partial.order
    g = partial.grid
    out = np.zeros((2 * n + 2, 2 * n + 2), dtype=np.int8)
    # old cell (r, c) sits at (r + 1, c + 1) in the larger grid before moving
    for code, dr, dc in ((N, 0, 1), (S, 2, 1), (E, 1, 2), (W, 1, 0)):
        mask = g == code
        target = out[dr:dr + 2 * n, dc:dc + 2 * n]
        if np.any(target[mask] != EMPTY):
            raise InvariantViolation("shuffled dominoes overlap")
        target[mask] = code
    return DominoTiling(n + 1, out)


def creation_blocks(partial: DominoTiling) -> list[tuple[int, int]]:
    """Top-left cells ``(r, c)`` of the 2x2 holes, in row-major order."""
    n = partial.order
    empty = (partial.grid == EMPTY) & diamond_mask(n)
    claimed = np.zeros_like(empty)
    blocks = []
    black = _black_grid(n)
    rs, cs = np.nonzero(empty)
    for r, c in zip(rs.tolist(), cs.tolist()):
        if claimed[r, c]:
            continue
        if (r + 1 >= 2 * n or c + 1 >= 2 * n or not black[r, c]
                or not (empty[r, c + 1] and empty[r + 1, c] and empty[r + 1, c + 1])
                or claimed[r, c + 1] or claimed[r + 1, c] or claimed[r + 1, c + 1]):
            raise InvariantViolation(f"hole at {(r, c)} is not the corner of a 2x2 block")
        claimed[r:r + 2, c:c + 2] = True
        blocks.append((r, c))
    return blocks


def creation(partial: DominoTiling, coins: Iterable[int]) -> DominoTiling:
    """Fill each 2x2 hole: coin 0 -> two horizontal, coin 1 -> two vertical."""
    out = partial.grid.copy()
    it = iter(coins)
    for r, c in creation_blocks(partial):
        if next(it):
            out[r:r + 2, c] = W
            out[r:r + 2, c + 1] = E
        else:
            out[r, c:c + 2] = N
            out[r + 1, c:c + 2] = S
    return DominoTiling(partial.order, out)


def creation_coins(seed: int, step: int) -> Iterator[int]:
    """Coins for the creation stage that builds the order-``step`` diamond."""
    k = 0
    while True:
        yield coin(seed, STREAM_CREATION, step, k)
        k += 1


def grow_steps(n: int, seed: int) -> Iterator[DominoTiling]:
    """Yield the tilings of orders 0, 1, ..., n produced by repeated shuffling."""
    t = DominoTiling(0)
    yield t
    for m in range(1, n + 1):
        t = creation(shuffle_move(destruction(t)), creation_coins(seed, m))
        yield t


def grow(n: int, seed: int, fast: bool | None = None) -> DominoTiling:
    """Uniformly random tiling of the order-n diamond.

    ``fast`` selects the compiled implementation (default for n > 60); both
    paths consume the same coins and return identical tilings.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if fast is None:
        fast = n > 60
    if fast:
        from ._fastgrow import grow_grid
        return DominoTiling(n, grow_grid(n, seed))
    t = None
    for t in grow_steps(n, seed):
        pass
    return t


def _histories(n: int) -> Iterator[tuple[DominoTiling, Fraction]]:
    layer: dict[bytes, tuple[DominoTiling, Fraction]] = {DominoTiling(0).key(): (DominoTiling(0), Fraction(1))}
    for _ in range(n):
        nxt: dict[bytes, tuple[DominoTiling, Fraction]] = {}
        for t, pr in layer.values():
            partial = shuffle_move(destruction(t))
            k = len(creation_blocks(partial))
            w = pr / 2**k
            for bits in range(2**k):
                coins = [(bits >> s) & 1 for s in range(k)]
                child = creation(partial, coins)
                key = child.key()
                if key in nxt:
                    nxt[key] = (nxt[key][0], nxt[key][1] + w)
                else:
                    nxt[key] = (child, w)
        layer = nxt
    return iter(layer.values())


def enumerate_all(n: int) -> list[tuple[DominoTiling, Fraction]]:
    """Every tiling reachable by shuffling to order n, with its exact probability."""
    if n > 4:
        raise ValueError(f"exhaustive enumeration is limited to n <= 4, got {n}")
    if n < 0:
        raise ValueError("order must be nonnegative")
    return list(_histories(n))


def _particle_cells(tiling: DominoTiling) -> tuple[np.ndarray, np.ndarray]:
    n = tiling.order
    g = tiling.grid
    black = _black_grid(n)
    # the black square of an S (right half) or E (lower half) domino
    return np.nonzero(((g == S) | (g == E)) & black)


def _line_position(order: int, r: int, c: int) -> tuple[int, int]:
    return (c + r - order + 1) // 2, (c - r + order - 1) // 2 + 1


def extract_particles(tiling: DominoTiling) -> tuple[tuple[int, ...], ...]:
    """Particle lines read off the S and E dominoes; ``result[j-1]`` is line ``j``.

    Line ``j`` is the j-th diagonal (parallel to the north-west edge) of black
    squares, ``a - b = 2j - n``; a particle sits on the black square of each
    S or E domino, at ``x = (a + b + n) / 2 + 1``. Line ``j`` carries ``j``
    particles and consecutive lines satisfy
    ``x^j_i <= x^{j-1}_i <= x^j_{i+1}``.
    """
    n = tiling.order
    if n == 0:
        raise ValueError("the empty tiling has no particle lines")
    rs, cs = _particle_cells(tiling)
    lines: list[list[int]] = [[] for _ in range(n)]
    for r, c in zip(rs.tolist(), cs.tolist()):
        j, x = _line_position(n, r, c)
        if not 1 <= j <= n:
            raise InvariantViolation(f"particle on line {j} outside 1..{n}")
        lines[j - 1].append(x)
    for j, line in enumerate(lines, start=1):
        if len(line) != j:
            raise InvariantViolation(f"line {j} carries {len(line)} particles")
        line.sort()
        if any(a >= b for a, b in zip(line, line[1:])):
            raise InvariantViolation(f"line {j} has two particles at one site")
        if j > 1:
            above = lines[j - 2]
            if not all(line[i] <= above[i] <= line[i + 1] for i in range(j - 1)):
                raise InvariantViolation(f"lines {j - 1} and {j} do not interlace")
    return tuple(tuple(line) for line in lines)


@dataclass
class CoupledRun:
    """Particle trajectories from shuffling and from the dynamics, on shared coins.

    ``shuffling[t]`` holds line ``j`` of the order ``t + j`` tiling for each
    ``j``; ``dynamics[t]`` is the interlaced dynamics after ``t`` steps, each
    coin taken from the creation block that the particle occupies.
    """

    n: int
    seed: int
    shuffling: list[tuple[tuple[int, ...], ...]]
    dynamics: list[InterlacedConfiguration]
    coins: list[list[list[int]]]

    def mismatches(self) -> list[int]:
        return [t for t, (a, b) in enumerate(zip(self.shuffling, self.dynamics)) if a != b.lines]

    @property
    def agree(self) -> bool:
        return not self.mismatches()


def coupled_run(n: int, seed: int, steps: int | None = None) -> CoupledRun:
    """Run shuffling and the particle dynamics side by side on the same coins.

    A particle that sits in a block created at order ``m`` moves at order
    ``m + 1`` exactly when that block was filled vertically, unless it is
    pushed. So the dynamics coin of particle ``(j, i)`` at time ``t`` is the
    creation coin of the order-``(t + j - 1)`` block whose particle square is
    at position ``X^j_i(t - 1)`` on line ``j``; pushed particles ignore their
    coin and get 0.
    """
    if n < 1:
        raise ValueError("need at least one line")
    steps = n if steps is None else steps
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    top = steps + n
    lines_at: list[tuple[tuple[int, ...], ...] | None] = [None]
    created: list[dict[tuple[int, int], int]] = [{}]
    t = DominoTiling(0)
    for m in range(1, top + 1):
        partial = shuffle_move(destruction(t))
        blocks = creation_blocks(partial)
        bits = [coin(seed, STREAM_CREATION, m, k) for k in range(len(blocks))]
        created.append({_line_position(m, r + 1, c + 1): b for (r, c), b in zip(blocks, bits)})
        t = creation(partial, bits)
        lines_at.append(extract_particles(t))
    shuf = [tuple(lines_at[s + j][j - 1] for j in range(1, n + 1)) for s in range(steps + 1)]
    cfg = initial_configuration(n)
    dyn = [cfg]
    used = []
    for s in range(1, steps + 1):
        coins = [[created[s + j - 1].get((j, cfg[j][i]), 0) for i in range(j)] for j in range(1, n + 1)]
        cfg = step(cfg, coins)
        dyn.append(cfg)
        used.append(coins)
    return CoupledRun(n, seed, shuf, dyn, used)


def particle_law(n: int, t: int) -> dict[tuple[tuple[int, ...], ...], Fraction]:
    """Exact law of ``(x^1(t+1), ..., x^n(t+n))`` read off shuffling, by enumerating histories.

    Line ``j`` is recorded from the order ``t + j`` tiling. Limited to
    ``t + n <= 5``.
    """
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    if t + n > 5:
        raise ValueError(f"exhaustive enumeration is limited to t + n <= 5, got {t + n}")
    Layer = dict[tuple[bytes, tuple], tuple[DominoTiling, tuple, Fraction]]
    layer: Layer = {(DominoTiling(0).key(), ()): (DominoTiling(0), (), Fraction(1))}
    for m in range(1, t + n + 1):
        nxt: Layer = {}
        for tiling, rec, pr in layer.values():
            partial = shuffle_move(destruction(tiling))
            k = len(creation_blocks(partial))
            w = pr / 2**k
            for bits in range(2**k):
                child = creation(partial, [(bits >> s) & 1 for s in range(k)])
                j = m - t
                r2 = rec + (extract_particles(child)[j - 1],) if 1 <= j <= n else rec
                key = (child.key() if m < t + n else b"", r2)
                if key in nxt:
                    nxt[key] = (child, r2, nxt[key][2] + w)
                else:
                    nxt[key] = (child, r2, w)
        layer = nxt
    return {rec: pr for _, rec, pr in layer.values()}
