import itertools
from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, strategies as st

from aztec.calculus import step_power
from aztec.kernels import (TwoLineState, assemble, degeneracy_residuals, fillings, interlaces, intertwine_check,
                           lambda_measure, marginalize_x, p, p_plus, q, q_plus, reachable_lines, reachable_states,
                           recursion_check)
from aztec.linalg import cofactor_determinant

S1 = ((1, 2), (1,))


def brute_killed(source, t):
    """Independent enumeration of the killed two-line walk, written out directly."""
    law = {source: F(1)}
    n = len(source[1])
    for _ in range(t):
        nxt = {}
        for (x, y), pr in law.items():
            for bits in itertools.product((0, 1), repeat=2 * n + 1):
                y2 = [y[i] + bits[n + 1 + i] for i in range(n)]
                if any(y2[i] == y2[i + 1] for i in range(n - 1)):
                    continue
                x2 = []
                for i in range(n + 1):
                    v = x[i] + bits[i]
                    if i < n and v == y2[i] + 1:
                        v = y2[i]
                    if i > 0 and v == y2[i - 1]:
                        v = y2[i - 1] + 1
                    x2.append(v)
                key = (tuple(x2), tuple(y2))
                nxt[key] = nxt.get(key, F(0)) + pr / 2 ** (2 * n + 1)
        law = nxt
    return law


def test_assemble_examples():
    m = assemble(1, S1, S1)
    half = F(1, 2)
    # rows are source coordinates (x then y), columns target coordinates (x' then y')
    assert m.full() == [[half, half, -half], [0, half, 0], [half, 0, half]]
    assert m.det() == F(1, 4)
    m = assemble(2, ((1, 3), (2,)), ((2, 4), (3,)))
    assert m.A[0][0] == step_power(2)(1) == half
    with pytest.raises(ValueError):
        assemble(1, S1, ((1, 2, 3), (1, 2)))


def test_assemble_at_time_zero():
    s = TwoLineState((1, 3, 6), (2, 4))
    m = assemble(0, s, s)
    assert m.A == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert m.D == ((1, 0), (0, 1))
    assert m.det() == 1


def test_q_examples():
    assert q(1, S1, S1) == F(1, 4)
    assert q(1, S1, ((2, 3), (2,))) == F(1, 4)
    assert q(0, S1, S1) == 1
    assert q(0, S1, ((1, 3), (2,))) == 0


def test_q_plus_examples():
    for e in reachable_states(S1, 3):
        assert q_plus(3, S1, e) == q(3, S1, e)
    s = ((1, 2, 3), (1, 2))
    assert q_plus(0, s, s) == 1
    assert sum(q_plus(1, s, e) for e in reachable_states(s, 1)) == 1


def test_p_examples():
    for t in range(5):
        for b in range(1, 8):
            expected = F(comb(t, b - 1), 2**t) if 0 <= b - 1 <= t else 0
            assert p_plus(t, (1,), (b,)) == expected
    assert p(1, (1, 2), (1, 2)) == F(1, 4)
    assert p_plus(1, (1, 2), (1, 2)) == F(1, 4)
    assert p(1, (1, 2), (2, 3)) == F(1, 4)
    assert p_plus(1, (1, 2), (2, 3)) == F(1, 4)


def test_lambda_examples():
    assert lambda_measure((1, 2), (1,)) == 1
    assert list(fillings((1, 2, 3))) == [(1, 2)]
    assert lambda_measure((1, 2, 3), (1, 2)) == 1
    assert sum(lambda_measure((1, 3, 5), y) for y in fillings((1, 3, 5))) == 1
    with pytest.raises(ValueError):
        lambda_measure((1, 3), (3,))


def test_marginalize_examples():
    assert marginalize_x(1, S1, (1,)) == F(1, 2) == p_plus(1, (1,), (1,))
    assert marginalize_x(1, S1, (2,)) == F(1, 2)
    s = ((1, 3, 6), (2, 4))
    assert marginalize_x(0, s, (2, 4)) == 1
    assert marginalize_x(0, s, (2, 5)) == 0


def test_intertwining_examples():
    lhs, rhs = intertwine_check(1, (1, 2), S1)
    assert lhs == rhs
    lhs, rhs = intertwine_check(1, (1, 2, 3), ((1, 2, 3), (1, 2)))
    assert lhs == rhs
    x = (1, 3, 6)
    for e in reachable_states((x, (1, 3)), 2):
        if e.x == x:
            assert intertwine_check(0, x, e) == (lambda_measure(x, e.y), lambda_measure(x, e.y))


def test_recursion_examples():
    lhs, rhs = recursion_check(0, S1, S1)
    assert lhs == rhs == F(1, 4)
    s = ((1, 3), (2,))
    for e in reachable_states(s, 2):
        lhs, rhs = recursion_check(1, s, e)
        assert lhs == rhs
    packed = TwoLineState.packed(2)
    for e in reachable_states(packed, 1):
        lhs, rhs = recursion_check(0, packed, e)
        assert lhs == rhs


def test_degeneracies_vanish():
    target = ((3, 6, 9), (4, 7))
    for x, y in [((1, 4, 7), (1, 5)), ((1, 4, 7), (4, 5)), ((1, 4, 7), (2, 2))]:
        res = degeneracy_residuals(2, x, y, target)
        assert res
        assert all(v == 0 for _, v in res)


@pytest.mark.parametrize("source,t", [(S1, 1), (S1, 3), (((1, 3), (2,)), 2), (((1, 2, 3), (1, 2)), 1),
                                      (((1, 3, 5), (2, 4)), 2)])
def test_q_matches_independent_enumeration(source, t):
    law = brute_killed(source, t)
    for e in reachable_states(source, t):
        assert q(t, source, e) == law.get((e.x, e.y), 0)


def test_cofactor_route_agrees():
    s = ((1, 3, 5), (2, 4))
    for e in list(reachable_states(s, 2))[:20]:
        assert cofactor_determinant(assemble(2, s, e).full()) == q(2, s, e)


def test_rejects_bad_states():
    with pytest.raises(ValueError):
        TwoLineState((1, 2), (2,))
    with pytest.raises(ValueError):
        q(-1, S1, S1)
    with pytest.raises(ValueError):
        p(1, (2, 1), (1, 2))


def interlaced_states(n):
    def build(z):
        z = sorted(z)
        # spread to x_1 <= y_1 < x_2 <= ...: shift every x after the first up by its index
        x = [z[2 * i] + i for i in range(n + 1)]
        y = [z[2 * i + 1] + i for i in range(n)]
        return TwoLineState(tuple(x), tuple(y))
    return st.lists(st.integers(-4, 6), min_size=2 * n + 1, max_size=2 * n + 1).map(build)


@given(interlaced_states(1), st.integers(0, 4))
def test_q_plus_is_stochastic_n1(s, t):
    assert sum(q_plus(t, s, e) for e in reachable_states(s, t)) == 1


@given(interlaced_states(2), st.integers(0, 2))
def test_q_plus_is_stochastic_n2(s, t):
    assert sum(q_plus(t, s, e) for e in reachable_states(s, t)) == 1


@given(interlaced_states(2), st.integers(0, 2))
def test_q_is_subprobability(s, t):
    vals = [q(t, s, e) for e in reachable_states(s, t)]
    assert all(v >= 0 for v in vals)
    assert sum(vals) <= 1


@given(st.lists(st.integers(-5, 5), min_size=2, max_size=3, unique=True), st.integers(0, 3))
def test_p_plus_is_stochastic(y, t):
    y = sorted(y)
    assert sum(p_plus(t, y, e) for e in reachable_lines(y, t)) == 1


@given(interlaced_states(1), st.integers(-3, 3), st.integers(0, 3))
def test_translation_invariance(s, c, t):
    shifted = TwoLineState(tuple(v + c for v in s.x), tuple(v + c for v in s.y))
    for e in reachable_states(s, t):
        e2 = TwoLineState(tuple(v + c for v in e.x), tuple(v + c for v in e.y))
        assert q(t, s, e) == q(t, shifted, e2)


@given(st.lists(st.integers(0, 9), min_size=3, max_size=4, unique=True))
def test_lambda_is_a_probability(x):
    x = sorted(x)
    ys = list(fillings(x))
    assert all(interlaces(x, y) for y in ys)
    assert sum(lambda_measure(x, y) for y in ys) == 1
