import numpy as np
import pytest

from dcxsim.distributions import MassDistribution, constant, exponential
from dcxsim.geometry import PointPattern, make_stream, make_window
from dcxsim.processes import sample_poisson
from dcxsim.shotnoise import ResponseKernel
from dcxsim import wireless

W = make_window([0.0, 0.0], [1.0, 1.0])
PL = ResponseKernel("power_law", (4.0,))


def _layout(threshold=1.0, noise=0.0, n_links=1):
    tx = np.array([[0.3, 0.3], [0.7, 0.7]])[:n_links]
    rx = np.array([[0.3, 0.35], [0.7, 0.75]])[:n_links]
    return wireless.LinkLayout(W, tx, rx, threshold, PL, exponential(1.0), constant(noise))


def _no_interferers(gen):
    return PointPattern(W, np.empty((0, 2)))


def test_layout_validation():
    with pytest.raises(ValueError):
        wireless.LinkLayout(W, np.empty((0, 2)), np.empty((0, 2)), 1.0, PL, exponential(1.0), constant(0.0))
    with pytest.raises(ValueError):
        _layout(threshold=0.0)


def test_success_is_one_without_noise_or_interference():
    p, se = wireless.sinr_success(_layout(), _no_interferers, 500, make_stream(1))
    assert p == 1.0 and se == 0.0
    p2, _ = wireless.sinr_success_rayleigh(_layout(), _no_interferers, 500, make_stream(1))
    assert p2 == pytest.approx(1.0)


def test_rayleigh_closed_form_single_link():
    w0, t = 0.3, 2.0
    layout = _layout(threshold=t, noise=w0)
    g = layout.direct_gains()[0]
    p, se = wireless.sinr_success_rayleigh(layout, _no_interferers, 200, make_stream(2))
    assert se == pytest.approx(0.0, abs=1e-15)
    assert p == pytest.approx(float(np.exp(-t * w0 / g)))


def test_success_decreases_with_threshold():
    lam = 5.0
    sampler = lambda gen: sample_poisson(lam, W, gen)
    p_lo, _ = wireless.sinr_success_rayleigh(_layout(threshold=10.0, noise=0.01), sampler, 4000, make_stream(3))
    p_hi, _ = wireless.sinr_success_rayleigh(_layout(threshold=1000.0, noise=0.01), sampler, 4000, make_stream(3))
    assert p_hi < p_lo
    assert p_hi < 0.01


def test_rayleigh_estimator_reduces_variance():
    layout = _layout(noise=0.01, n_links=2)
    sampler = lambda gen: sample_poisson(5.0, W, gen)
    n = 8000
    p_i, se_i = wireless.sinr_success(layout, sampler, n, make_stream(4))
    p_r, se_r = wireless.sinr_success_rayleigh(layout, sampler, n, make_stream(4))
    assert se_r < se_i
    assert abs(p_i - p_r) <= 3 * float(np.hypot(se_i, se_r))


def test_rayleigh_requires_closed_form_tail():
    layout = wireless.LinkLayout(
        W,
        np.array([[0.3, 0.3]]),
        np.array([[0.3, 0.35]]),
        1.0,
        PL,
        MassDistribution("sum_of_exponentials", (0.5, 0.5)),
        constant(0.0),
    )
    with pytest.raises(ValueError):
        wireless.sinr_success_rayleigh(layout, _no_interferers, 10, make_stream(0))


def test_boolean_coverage_poisson_matches_void_probability():
    lam, r = 20.0, 0.1
    rep = wireless.boolean_coverage(
        lambda gen: sample_poisson(lam, W, gen),
        constant(r),
        np.array([[0.5, 0.5]]),
        20_000,
        make_stream(5),
    )
    target = 1.0 - np.exp(-lam * np.pi * r**2)
    assert abs(rep.p_cover[0] - target) <= 3 * rep.p_cover_stderr[0]
    # Campbell: E V = lam * pi r^2
    assert abs(rep.mean_count[0] - lam * np.pi * r**2) <= 3 * rep.mean_count_stderr[0]


def test_boolean_coverage_empty_germs():
    rep = wireless.boolean_coverage(
        _no_interferers, constant(0.2), np.array([[0.5, 0.5]]), 100, make_stream(6)
    )
    assert rep.p_cover[0] == 0.0
    assert rep.mean_count[0] == 0.0


def test_coverage_deterministic_across_workers():
    sampler = lambda gen: sample_poisson(10.0, W, gen)
    reps = [
        wireless.boolean_coverage(
            sampler, constant(0.1), np.array([[0.5, 0.5]]), 4000, make_stream(7), workers=k
        )
        for k in (1, 8)
    ]
    assert reps[0].to_dict() == reps[1].to_dict()
