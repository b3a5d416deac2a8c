import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from aztec.asymptotics import (ContinuumState, conditional_uniformity_report, cone_volume, cone_volume_mc,
                               continuum_q, continuum_q_plus, default_grid, dyson_limit_report,
                               dyson_transition_report, entrance_density_mu, entrance_density_nu, gaussian_cdf,
                               gaussian_derivative, gaussian_kernel, gue_limit_report, gue_minor_sample,
                               gue_minor_samples, kernel_convergence_report, mu_marginal_cdfs, mu_normalization,
                               nearest_lattice_state, normalizing_constant, rescale_particles, unscale_particles)
from aztec.dynamics import simulate_batch
from aztec.kernels import TwoLineState
from aztec.stats import ks_statistic

S = ((-1.0, 1.0), (0.0,))


def test_gaussian_values():
    assert gaussian_kernel(1, 0) == pytest.approx(0.3989422804014327, abs=1e-12)
    assert gaussian_cdf(1, 0) == 0.5
    assert gaussian_cdf(2.5, 0) == 0.5
    assert gaussian_derivative(1, 0) == 0
    assert gaussian_cdf(1, 1.96) == pytest.approx(0.9750021, abs=1e-7)
    with pytest.raises(ValueError):
        gaussian_kernel(0, 1)


def independent_q1(t, s, e):
    """The n = 1 continuum kernel written out as an explicit 3x3 determinant."""
    (x1, x2), (y,) = s
    (u1, u2), (v,) = e
    g = lambda z: math.exp(-z * z / (2 * t)) / math.sqrt(2 * math.pi * t)
    G = lambda z: 0.5 * math.erfc(-z / math.sqrt(2 * t))
    dg = lambda z: -z / t * g(z)
    m = np.array([[g(u1 - x1), g(u2 - x1), G(v - x1) - 1],
                  [g(u1 - x2), g(u2 - x2), G(v - x2)],
                  [dg(u1 - y), dg(u2 - y), g(v - y)]])
    return float(np.linalg.det(m))


def test_continuum_q_example():
    v = continuum_q(1, S, S)
    assert v > 0
    assert v == pytest.approx(0.09710685776338396, rel=1e-12)
    assert v == pytest.approx(independent_q1(1, S, S), rel=1e-12)
    e = ((-0.5, 2.0), (0.7,))
    assert continuum_q(0.8, S, e) == pytest.approx(independent_q1(0.8, S, e), rel=1e-10)
    assert continuum_q_plus(1, S, e) == pytest.approx(continuum_q(1, S, e))


@given(st.floats(-3, 3))
def test_continuum_translation_invariance(c):
    e = ((-0.5, 2.0), (0.7,))
    shift = lambda s: (tuple(v + c for v in s[0]), tuple(v + c for v in s[1]))
    assert continuum_q(1, shift(S), shift(e)) == pytest.approx(continuum_q(1, S, e), rel=1e-9, abs=1e-14)


def test_continuum_concentrates_at_small_time():
    t = 0.01
    h = 0.025
    axis = np.arange(-0.5 + h / 2, 0.5, h)  # midpoints of a box around the source
    total = 0.0
    for a in axis:
        for b in axis:
            for c in axis:
                x1, y, x2 = -1 + a, b, 1 + c
                if x1 < y < x2:
                    total += continuum_q(t, S, ((x1, x2), (y,)))
    assert total * h**3 == pytest.approx(1.0, abs=0.01)


def test_continuum_state_validation():
    with pytest.raises(ValueError):
        ContinuumState((0.0, 1.0), (1.0,))


def test_entrance_densities():
    for y in (-1.3, 0.0, 0.4, 2.2):
        assert entrance_density_mu(1, (y,)) == pytest.approx(gaussian_kernel(1, y), rel=1e-12)
    assert normalizing_constant(1) == pytest.approx(math.sqrt(2 * math.pi))
    assert mu_normalization(2) == pytest.approx(1.0, abs=1e-6)
    assert mu_normalization(3, points=121) == pytest.approx(1.0, abs=1e-4)
    assert mu_normalization(2, t=2.5) == pytest.approx(1.0, abs=1e-6)
    assert entrance_density_mu(1, (0.3, 0.3)) == 0
    assert entrance_density_nu(1, (-1.0, 1.0), (0.2,)) > 0
    assert entrance_density_nu(1, (-1.0, 0.5, 1.0), (0.2, 0.2)) == 0


def test_nu_marginals_are_mu():
    t = 1.0
    # integrating out the lower particle leaves mu^2 of the upper pair
    x = (-0.7, 1.1)
    val, _ = integrate.quad(lambda y: entrance_density_nu(t, x, (y,)), x[0], x[1])
    assert val == pytest.approx(entrance_density_mu(t, x), rel=1e-9)
    # integrating out the upper pair leaves mu^1 of the lower particle
    y = 0.4
    val, _ = integrate.dblquad(lambda x2, x1: entrance_density_nu(t, (x1, x2), (y,)), -12, y, y, 12)
    assert val == pytest.approx(entrance_density_mu(t, (y,)), rel=1e-7)


def test_rescale_examples():
    N, t = 400, 1.0
    assert rescale_particles(N * t / 2, N, t) == 0
    assert rescale_particles(N * t / 2 + 0.5 * math.sqrt(N), N, t) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rescale_particles(1.0, 0)


@given(st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=6), st.integers(1, 5000), st.floats(0.1, 3))
def test_rescale_round_trip(values, N, t):
    back = unscale_particles(rescale_particles(values, N, t), N, t)
    assert np.allclose(back, values, rtol=1e-9, atol=1e-6)


def test_nearest_lattice_state():
    assert nearest_lattice_state((0.2, 2.4), (1.1,)) == TwoLineState((0, 2), (1,))
    assert nearest_lattice_state((0.5, 0.6), (0.5,)) == TwoLineState((0, 1), (0,))
    s = nearest_lattice_state((1.0, 1.2, 1.4), (1.1, 1.3))
    assert s.x[0] <= s.y[0] < s.x[1] <= s.y[1] < s.x[2]


def test_default_grid():
    grid = default_grid(1)
    assert len(grid) == math.comb(7, 3)
    assert all(g.n == 1 for g in grid)


def test_kernel_convergence_single_tail_point():
    far = [((5.0, 6.0), (5.5,))]
    r = kernel_convergence_report(1, 1.0, far, N_list=(64, 256), ceiling=1e-2)
    assert r.metadata["errors"][-1] < 1e-2


def test_kernel_convergence_rejects_bad_input():
    with pytest.raises(ValueError):
        kernel_convergence_report(1, 1.0, N_list=(256, 64))
    with pytest.raises(ValueError):
        kernel_convergence_report(1, 1.0, mode="sideways")


def test_gue_samples():
    first = [gue_minor_sample(1, s).minors[0][0] for s in range(2000)]
    d, pv = ks_statistic(first, lambda v: gaussian_cdf(1, v))
    assert pv > 1e-3
    for s in range(200):
        assert gue_minor_sample(4, s).interlaces()
    ev = gue_minor_samples(3, 100_000, seed=5)
    assert abs(ev[1].sum(axis=1).mean()) < 0.02
    assert ev[2].shape == (100_000, 3)
    assert np.all(ev[1][:, 0] <= ev[1][:, 1])


def test_quadrature_marginals_match_gue():
    ev = gue_minor_samples(3, 50_000, seed=8)
    for k in (1, 2, 3):
        for i, cdf in enumerate(mu_marginal_cdfs(k)):
            d, _ = ks_statistic(ev[k - 1][:, i], cdf)
            assert d < 0.012, (k, i, d)


def test_cone_volume():
    assert cone_volume((0.0, 1.5, 4.0)) == pytest.approx(7.5)
    assert cone_volume_mc((0.0, 1.5, 4.0), samples=400_000) == pytest.approx(7.5, rel=0.02)
    assert cone_volume_mc((-1.0, 2.0, 2.5), samples=400_000) == pytest.approx(cone_volume((-1.0, 2.0, 2.5)),
                                                                            rel=0.02)


def test_gue_report_guard():
    r = gue_limit_report(2, 0)
    assert not r.passed
    assert r.metadata["note"] == "not in asymptotic regime"
    with pytest.raises(ValueError):
        gue_limit_report(2, 10, centring="middle")


def test_gue_limit_with_start_centring():
    # the packed start shifts line j by (j + 1) / 2; removing it leaves a small distance
    r = gue_limit_report(3, 400, 10_000, seed=1, centring="start")
    assert r.passed, r.details


def test_gue_distance_shrinks_with_time():
    small = gue_limit_report(2, 25, 5_000, seed=2, gue_samples=20_000)
    large = gue_limit_report(2, 900, 5_000, seed=2, gue_samples=20_000)
    assert large.statistic < small.statistic


def test_conditional_uniformity_report():
    X = simulate_batch(3, 6, 20_000, seed=6, record=[6])[6]
    r = conditional_uniformity_report(X, 3, seed=6)
    assert r.passed
    # putting every lower line at its leftmost filling is far from uniform
    X[:, 0] = X[:, 3]
    X[:, 1:3] = X[:, 3:5]
    assert not conditional_uniformity_report(X, 3, seed=6).passed


def test_dyson_transition_small():
    r = dyson_transition_report((1, 3), trials=20_000, seed=3, steps=2)
    assert r.passed
    assert r.metadata["outside_support"] == 0


def test_dyson_limit_single_walk():
    r = dyson_limit_report(1, (1.0,), (100, 400), trials=5_000, seed=4)
    single = [d for d in r.details if d["line"] == 1]
    assert single[-1]["ks"] < single[0]["ks"]
