"""Exact identity checks for the two-line kernels, in rational arithmetic.

Each check returns a :class:`Check` with the number of cases examined and a
list of failures (empty when the identity holds). Sums over "all states" run
over the finite reachable box, since a coordinate moves at most ``t`` in
``t`` steps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dynamics import exact_killed_law, exact_law, initial_configuration
from .kernels import (TwoLineState, degeneracy_residuals, fillings, intertwine_check, lambda_measure,
                      marginalize_x, p_plus, q, q_plus, reachable_lines, reachable_states, recursion_check)
from .stats import StatReport

__all__ = [
    "Check",
    "sample_sources",
    "check_identity_at_zero",
    "check_stochastic",
    "check_chapman_kolmogorov",
    "check_marginalization",
    "check_intertwining",
    "check_recursion",
    "check_degeneracies",
    "check_lambda",
    "check_killed_dynamics",
    "check_top_lines",
    "kernel_identity_suite",
    "suite_report",
]


@dataclass
class Check:
    name: str
    n: int
    t: int
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, lhs, rhs, where) -> None:
        self.cases += 1
        if lhs != rhs:
            self.failures.append({"where": repr(where), "lhs": str(lhs), "rhs": str(rhs)})

    def to_dict(self) -> dict:
        return {"name": self.name, "n": self.n, "t": self.t, "cases": self.cases,
                "ok": self.ok, "failures": self.failures[:5]}


def _spread(items: list, k: int | None) -> list:
    """At most ``k`` items, evenly spaced through ``items`` (all of them when ``k`` is None)."""
    if k is None or len(items) <= k:
        return items
    step = len(items) / k
    return [items[int(i * step)] for i in range(k)]


def _states_in_window(n: int, lo: int, hi: int) -> list[TwoLineState]:
    out = []
    for x in itertools.combinations(range(lo, hi + 1), n + 1):
        for y in fillings(x):
            out.append(TwoLineState(x, y))
    return out


def sample_sources(n: int) -> list[TwoLineState]:
    """The packed state plus two spread-out ones, including boundary contacts."""
    packed = TwoLineState.packed(n)
    wide_x = tuple(1 + 3 * i for i in range(n + 1))
    return [packed,
            TwoLineState(wide_x, tuple(v + 1 for v in wide_x[:-1])),
            TwoLineState(wide_x, tuple(v + 2 for v in wide_x[:-1]))]


def check_identity_at_zero(n: int, width: int | None = None) -> Check:
    """``q(0, s, s') = 1{s = s'}`` for every pair of states in a window."""
    width = width or 2 * n + 2
    c = Check("identity-at-zero", n, 0)
    states = _states_in_window(n, 1, width)
    for s in states:
        for e in states:
            c.record(q(0, s, e), Fraction(int(s == e)), (s, e))
    return c


def check_stochastic(n: int, t: int, sources: Sequence[TwoLineState] | None = None) -> Check:
    c = Check("stochastic", n, t)
    for s in sources or sample_sources(n):
        total = sum((q_plus(t, s, e) for e in reachable_states(s, t)), Fraction(0))
        c.record(total, Fraction(1), s)
    return c


def check_chapman_kolmogorov(n: int, s_time: int, t_time: int, targets: int | None = 8,
                             sources: Sequence[TwoLineState] | None = None) -> Check:
    """``q(s+t, a, c) = sum_b q(s, a, b) q(t, b, c)``, and the same for ``q_plus`` and ``p_plus``."""
    c = Check("chapman-kolmogorov", n, s_time + t_time)
    for a in (sources or sample_sources(n)[:2]):
        mids = list(reachable_states(a, s_time))
        for e in _spread(list(reachable_states(a, s_time + t_time)), targets):
            lhs = q(s_time + t_time, a, e)
            rhs = sum((q(s_time, a, b) * q(t_time, b, e) for b in mids), Fraction(0))
            c.record(lhs, rhs, ("q", a, e))
            lhs = q_plus(s_time + t_time, a, e)
            rhs = sum((q_plus(s_time, a, b) * q_plus(t_time, b, e) for b in mids), Fraction(0))
            c.record(lhs, rhs, ("q_plus", a, e))
        y_mids = list(reachable_lines(a.y, s_time))
        for y2 in _spread(list(reachable_lines(a.y, s_time + t_time)), targets):
            lhs = p_plus(s_time + t_time, a.y, y2)
            rhs = sum((p_plus(s_time, a.y, b) * p_plus(t_time, b, y2) for b in y_mids), Fraction(0))
            c.record(lhs, rhs, ("p_plus", a.y, y2))
    return c


def check_marginalization(n: int, t: int, sources: Sequence[TwoLineState] | None = None,
                          targets: int | None = None) -> Check:
    c = Check("marginalization", n, t)
    for s in sources or sample_sources(n):
        for y2 in _spread(list(reachable_lines(s.y, t)), targets):
            c.record(marginalize_x(t, s, y2), p_plus(t, s.y, y2), (s, y2))
    return c


def check_intertwining(n: int, t: int, tops: Sequence[Sequence[int]] | None = None,
                       targets: int | None = 40) -> Check:
    c = Check("intertwining", n, t)
    if tops is None:
        tops = [tuple(range(1, n + 2)), tuple(1 + 2 * i for i in range(n + 1))]
    for x in tops:
        cands = [TwoLineState(x2, y2) for x2 in reachable_lines(x, t) for y2 in fillings(x2)]
        for e in _spread(cands, targets):
            lhs, rhs = intertwine_check(t, x, e)
            c.record(lhs, rhs, (x, e))
    return c


def check_recursion(n: int, t: int, sources: Sequence[TwoLineState] | None = None,
                    targets: int | None = 12) -> Check:
    c = Check("recursion", n, t)
    for s in sources or sample_sources(n)[:2]:
        for e in _spread(list(reachable_states(s, t + 1)), targets):
            lhs, rhs = recursion_check(t, s, e)
            c.record(lhs, rhs, (s, e))
    return c


def _boundary_sources(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Source points touching each boundary face; some lie just outside the interlacing set."""
    base_x = [1 + 3 * i for i in range(n + 1)]
    base_y = [v + 1 for v in base_x[:-1]]
    out = []
    for i in range(n):
        y = base_y.copy()
        y[i] = base_x[i]  # x_i = y_i
        out.append((tuple(base_x), tuple(y)))
        y = base_y.copy()
        y[i] = base_x[i + 1]  # x_{i+1} = y_i
        out.append((tuple(base_x), tuple(y)))
    for i in range(n - 1):
        y = base_y.copy()
        y[i + 1] = y[i]  # y_i = y_{i+1}
        out.append((tuple(base_x), tuple(y)))
    return out


def check_degeneracies(n: int, t: int, targets: int | None = 12) -> Check:
    c = Check("degeneracies", n, t)
    x0 = tuple(1 + 3 * i for i in range(n + 1))
    base = TwoLineState(x0, tuple(v + 1 for v in x0[:-1]))
    cands = _spread(list(reachable_states(TwoLineState(tuple(v - 1 for v in x0), base.y), t + 1)), targets)
    for x, y in _boundary_sources(n):
        for e in cands:
            for label, value in degeneracy_residuals(t, x, y, e):
                c.record(value, Fraction(0), (label, x, y, e))
    return c


def check_lambda(n: int, tops: Sequence[Sequence[int]] | None = None) -> Check:
    c = Check("lambda-sums-to-one", n, 0)
    for x in tops or [tuple(range(1, n + 2)), tuple(1 + 2 * i for i in range(n + 1))]:
        c.record(sum((lambda_measure(x, y) for y in fillings(x)), Fraction(0)), Fraction(1), x)
    return c


def check_killed_dynamics(n: int, t: int, sources: Sequence[TwoLineState] | None = None) -> Check:
    """Exhaustive coin enumeration of the killed two-line process against ``q``, killed mass included."""
    c = Check("killed-process-equals-q", n, t)
    for s in sources or sample_sources(n)[:2]:
        law, killed = exact_killed_law(s, t)
        total = Fraction(0)
        for e in reachable_states(s, t):
            v = q(t, s, e)
            total += v
            c.record(law.get(e, Fraction(0)), v, (s, e))
        c.record(set(law) <= set(reachable_states(s, t)), True, (s, "support"))
        c.record(killed, 1 - total, (s, "killed mass"))
    return c


def check_top_lines(n: int, t: int) -> Check:
    """Law of the top two lines of the full dynamics (``n + 1`` lines, packed start) against ``q_plus``."""
    c = Check("top-two-lines-equal-q_plus", n, t)
    law = exact_law(n + 1, t)
    pair_law: dict[TwoLineState, Fraction] = {}
    for cfg, pr in law.items():
        st = cfg.pair(n)
        pair_law[st] = pair_law.get(st, Fraction(0)) + pr
    src = initial_configuration(n + 1).pair(n)
    for e in reachable_states(src, t):
        c.record(pair_law.get(e, Fraction(0)), q_plus(t, src, e), e)
    c.record(set(pair_law) <= set(reachable_states(src, t)), True, "support")
    return c


def kernel_identity_suite(n: int, t: int) -> list[Check]:
    """Every exact identity at dimension ``n`` up to time ``t``.

    Chapman-Kolmogorov is run for ``n <= 2`` only (its double sum grows fast).
    """
    checks = [check_identity_at_zero(n), check_lambda(n)]
    for s in range(1, t + 1):
        checks.append(check_stochastic(n, s))
        checks.append(check_marginalization(n, s))
        checks.append(check_degeneracies(n, s))
    for s in range(0, t):
        checks.append(check_recursion(n, s))
    for s in range(1, min(t, 3) + 1):
        checks.append(check_intertwining(n, s))
    if n <= 2:
        for a in range(1, t):
            b = t - a
            if a <= 3 and b <= 3 and a <= b:
                checks.append(check_chapman_kolmogorov(n, a, b))
    return checks


def suite_report(checks: Sequence[Check], name: str = "kernel-identities", **metadata) -> StatReport:
    failures = sum(len(c.failures) for c in checks)
    cases = sum(c.cases for c in checks)
    return StatReport(name, float(failures), 1.0, cases, failures == 0,
                      metadata={**metadata, "note": "statistic counts failed exact identities"},
                      details=[c.to_dict() for c in checks])
