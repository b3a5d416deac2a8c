from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aztec.dynamics import fixed_time_law
from aztec.shuffling import (EMPTY, Domino, DominoTiling, InvariantViolation, checkerboard_colour, classify,
                             coupled_run, creation, creation_blocks, destruction, diamond_mask, enumerate_all,
                             extract_particles, grow, grow_steps, particle_law, shuffle_move)


def test_checkerboard():
    # top row of the order-3 diamond is b = 2, a in {-1, 0}
    assert checkerboard_colour((-1, 2), 3) == "black"
    assert checkerboard_colour((0, 2), 3) == "white"
    assert checkerboard_colour((-3, 0), 3) == "black"
    assert checkerboard_colour((-2, 1), 3) == "black"
    assert checkerboard_colour((-1, 1), 3) == "white"
    with pytest.raises(ValueError):
        checkerboard_colour((2, 2), 3)


def test_classify():
    assert classify(-1, 0, "horizontal", 1) == "N"
    assert classify(0, 0, "horizontal", 1) == "S"
    assert classify(-1, -1, "vertical", 1) == "W"
    assert classify(0, -1, "vertical", 1) == "E"
    with pytest.raises(ValueError):
        classify(0, 0, "diagonal", 1)


def order2_with_odd_centre():
    return DominoTiling.from_dominoes(2, [(-1, 1, "horizontal"), (-2, -1, "vertical"), (1, -1, "vertical"),
                                         (-1, 0, "horizontal"), (-1, -1, "horizontal"), (-1, -2, "horizontal")])


def test_destruction_examples():
    t = order2_with_odd_centre()
    t.check()
    d = destruction(t)
    assert len(d) == 4
    assert d.counts() == {"N": 1, "S": 1, "E": 1, "W": 1}
    assert destruction(d) == d
    for tiling, _ in enumerate_all(1):
        # neither order-1 tiling contains an S-over-N or E-left-of-W block
        assert destruction(tiling) == tiling


def test_shuffle_moves_one_unit():
    single = DominoTiling.from_dominoes(1, [(-1, 0, "horizontal")])
    moved = list(shuffle_move(single).dominoes())
    assert moved == [Domino(-1, 1, "horizontal", "N")]
    assert len(shuffle_move(DominoTiling(1))) == 0
    assert shuffle_move(DominoTiling(0)).order == 1


def test_shuffle_detects_overlap():
    # an S moving down into an N moving up
    bad = DominoTiling(2, np.zeros((4, 4), dtype=np.int8))
    bad.grid[1, 1:3] = 2  # S in row 1 moves down to row 2
    bad.grid[3, 1:3] = 1  # N in row 3 moves up to row 2
    with pytest.raises(InvariantViolation):
        shuffle_move(bad)


def test_creation_from_empty():
    partial = shuffle_move(destruction(DominoTiling(0)))
    assert creation_blocks(partial) == [(0, 0)]
    horizontal = creation(partial, [0])
    vertical = creation(partial, [1])
    assert {d.orientation for d in horizontal.dominoes()} == {"horizontal"}
    assert {d.orientation for d in vertical.dominoes()} == {"vertical"}
    horizontal.check()
    vertical.check()


def test_grow_small():
    assert len(grow(0, 1)) == 0
    assert grow(0, 1).order == 0
    counts = Counter(grow(1, s).key() for s in range(2000))
    assert len(counts) == 2
    assert all(abs(c / 2000 - 0.5) < 0.05 for c in counts.values())
    counts = Counter(grow(2, s).key() for s in range(4000))
    assert len(counts) == 8
    assert all(abs(c / 4000 - 1 / 8) < 0.03 for c in counts.values())


@pytest.mark.parametrize("n,count", [(1, 2), (2, 8), (3, 64), (4, 1024)])
def test_enumerate_all_is_uniform(n, count):
    tilings = enumerate_all(n)
    assert len(tilings) == count
    assert all(pr == F(1, 2 ** (n * (n + 1) // 2)) for _, pr in tilings)
    for t, _ in tilings:
        t.check()


def test_enumerate_all_limits():
    with pytest.raises(ValueError):
        enumerate_all(5)
    assert len(enumerate_all(0)) == 1


def test_grow_steps_are_valid_tilings():
    for m, t in enumerate(grow_steps(12, 3)):
        assert t.order == m
        t.check()


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40, 61])
def test_fast_grow_matches_reference(n):
    for seed in range(3):
        assert grow(n, seed, fast=True) == grow(n, seed, fast=False)


def test_extract_examples():
    vertical = creation(shuffle_move(DominoTiling(0)), [1])
    assert extract_particles(vertical) == ((1,),)
    horizontal = creation(shuffle_move(DominoTiling(0)), [0])
    assert extract_particles(horizontal) == ((1,),)
    with pytest.raises(ValueError):
        extract_particles(DominoTiling(0))


def test_extract_on_every_small_tiling():
    for n in (1, 2, 3):
        for t, _ in enumerate_all(n):
            lines = extract_particles(t)
            assert [len(line) for line in lines] == list(range(1, n + 1))


def test_extract_on_random_tilings():
    for seed in range(1000):
        lines = extract_particles(grow(20, seed))
        assert [len(line) for line in lines] == list(range(1, 21))


def test_packed_start_when_a_line_appears():
    # line j first appears in the order-j diamond in the packed position 1..j
    for seed in range(50):
        for m, t in enumerate(grow_steps(6, seed)):
            if m:
                assert extract_particles(t)[m - 1] == tuple(range(1, m + 1))


def test_extract_rejects_partial():
    with pytest.raises(InvariantViolation):
        extract_particles(destruction(order2_with_odd_centre()))


def test_coupled_run():
    for seed in range(20):
        assert coupled_run(1, seed, steps=10).agree
        run = coupled_run(3, seed)
        assert run.agree, run.mismatches()
        assert len(run.shuffling) == len(run.dynamics) == 4


@pytest.mark.parametrize("n,t", [(1, 1), (1, 4), (2, 1), (2, 2), (3, 1)])
def test_shuffling_marginals_match_fixed_time_law(n, t):
    law = particle_law(n, t)
    assert law == {cfg.lines: pr for cfg, pr in fixed_time_law(n, t).items()}


def test_particle_law_limits():
    with pytest.raises(ValueError):
        particle_law(3, 3)


@settings(max_examples=15)
@given(st.integers(1, 30), st.integers(0, 2**40))
def test_grow_invariants(n, seed):
    t = grow(n, seed)
    t.check()
    assert len(t) == n * (n + 1)
    assert np.all((t.grid != EMPTY) == diamond_mask(n))
    c = t.counts()
    # the four frozen corners force equal N/S and equal E/W counts
    assert c["N"] == c["S"] and c["E"] == c["W"]
