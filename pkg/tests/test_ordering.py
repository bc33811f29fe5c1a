import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcxsim.geometry import make_stream
from dcxsim import ordering
from dcxsim.ordering import (
    CONSISTENT,
    INCONCLUSIVE,
    VIOLATION,
    TestFunction,
    bonferroni_z,
    compare_vectors,
    cx_compare_exact,
    lo_compare,
    make_suite,
    oracle_ginibre_radii,
    oracle_ising_exact,
    oracle_poisson_scaling,
    verify_dcx_numeric,
)

ALL_CLASSES = ["dcx", "idcx", "idcv", "ddcx", "cx", "icx", "icv"]


@given(st.sampled_from(ALL_CLASSES), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_suite_members_certified_numerically(order_class, seed):
    n = 1 if order_class in ("cx", "icx", "icv") else 3
    stream = make_stream(seed)
    suite = make_suite(order_class, n, 8, stream, scale=np.full(n, 3.0))
    probes = stream.split(1).generator().random((15, n)) * 8.0
    for f in suite:
        ok, worst = verify_dcx_numeric(f, probes, delta=0.3)
        assert ok, (f.family, f.phi, worst)


def test_suite_validation():
    with pytest.raises(ValueError):
        make_suite("supermodular", 2, 5, make_stream(0))
    with pytest.raises(ValueError):
        make_suite("dcx", 2, 0, make_stream(0))


def test_verify_rejects_misdeclared_function():
    # a concave profile declared convex must fail the certificate
    f = TestFunction(0, "lin_concave", "dcx", np.array([1.0, 1.0]), phi="sqrt")
    ok, worst = verify_dcx_numeric(f, np.array([[1.0, 1.0]]), delta=0.5)
    assert not ok and worst < 0


def _draw_iid_poisson(lam, n):
    def draw(gen):
        return gen.poisson(lam, size=n).astype(float)

    return draw


def _draw_mixed_poisson(levels, n):
    # common random level across coordinates: same marginals' mean, dcx-larger
    levels = np.asarray(levels, dtype=float)

    def draw(gen):
        lam = levels[gen.integers(levels.size)]
        return gen.poisson(lam, size=n).astype(float)

    return draw


def test_compare_vectors_consistent_direction():
    stream = make_stream(5)
    suite = make_suite("dcx", 3, 40, stream.split(10**6), scale=np.full(3, 5.0))
    rep = compare_vectors(
        _draw_iid_poisson(5.0, 3),
        _draw_mixed_poisson([2.5, 7.5], 3),
        suite,
        20_000,
        stream,
    )
    assert rep.verdict == CONSISTENT
    assert rep.mean_equality["passed"]
    assert any(r.z > 3 for r in rep.records)


def test_compare_vectors_detects_reversal():
    stream = make_stream(6)
    suite = make_suite("dcx", 3, 40, stream.split(10**6), scale=np.full(3, 5.0))
    rep = compare_vectors(
        _draw_mixed_poisson([2.5, 7.5], 3),
        _draw_iid_poisson(5.0, 3),
        suite,
        20_000,
        stream,
    )
    assert rep.verdict == VIOLATION


def test_compare_vectors_mean_gate_inconclusive():
    stream = make_stream(7)
    suite = make_suite("dcx", 2, 20, stream.split(10**6), scale=np.full(2, 5.0))
    rep = compare_vectors(
        _draw_iid_poisson(5.0, 2), _draw_iid_poisson(6.0, 2), suite, 20_000, stream
    )
    assert rep.verdict == INCONCLUSIVE
    assert not rep.mean_equality["passed"]


def test_compare_vectors_deterministic_across_workers():
    stream = make_stream(8)
    suite = make_suite("dcx", 2, 10, stream.split(10**6), scale=np.full(2, 5.0))
    reps = [
        compare_vectors(
            _draw_iid_poisson(5.0, 2),
            _draw_mixed_poisson([4.0, 6.0], 2),
            suite,
            6000,
            stream,
            workers=k,
        )
        for k in (1, 8)
    ]
    assert reps[0].to_dict() == reps[1].to_dict()


def test_bonferroni_grows_with_suite_size():
    assert bonferroni_z(3.0, 1) == pytest.approx(3.0)
    assert bonferroni_z(3.0, 100) > 3.0


def test_lo_compare_directions():
    stream = make_stream(9)
    draw_small = lambda gen: gen.exponential(1.0, size=2)
    draw_big = lambda gen: gen.exponential(2.0, size=2)
    ts = np.array([[t, t] for t in np.linspace(0.2, 3.0, 5)])
    rep = lo_compare(draw_small, draw_big, ts, 20_000, stream)
    assert rep.verdict == CONSISTENT
    rep2 = lo_compare(draw_big, draw_small, ts, 20_000, stream)
    assert rep2.verdict == VIOLATION


def test_cx_compare_exact_basics():
    # a two-point law vs its mean: constant is convex-smaller
    const = (np.array([1.0]), np.array([1.0]))
    spread = (np.array([0.0, 2.0]), np.array([0.5, 0.5]))
    assert cx_compare_exact(const, spread).passed
    assert not cx_compare_exact(spread, const).passed
    # unequal means fail even without a stop-loss crossing
    shifted = (np.array([2.0]), np.array([1.0]))
    assert not cx_compare_exact(const, shifted).passed
    with pytest.raises(ValueError):
        cx_compare_exact((np.array([0.0]), np.array([0.9])), const)


def test_oracle_poisson_scaling_validation():
    with pytest.raises(ValueError):
        oracle_poisson_scaling(0.0, 2.0)
    with pytest.raises(ValueError):
        oracle_poisson_scaling(1.0, 0.5)
    assert oracle_poisson_scaling(1.0, 1.0).passed  # identical laws


def test_oracle_ginibre_mean_matches_b():
    rep = oracle_ginibre_radii(1.5)
    assert rep.passed
    assert rep.mean_structured == pytest.approx(1.5, abs=1e-9)
    assert rep.mean_poisson == pytest.approx(1.5, abs=1e-9)


def test_oracle_ising_shared_cell_pair_product():
    # two sites in one lattice cell, f = x1 * x2: E f = 2 under (2, 0, 1/2)
    # spins, versus 1 at the constant mean field
    f = TestFunction(0, "pair_product", "dcx", np.array([0.0, 1.0]))
    rep = oracle_ising_exact(2, 2.0, 0.0, 0.5, [f], site_cells=[0, 0])
    assert rep.passed
    assert rep.worst_violation >= 0.0


def test_oracle_ising_validation():
    f = TestFunction(0, "pair_product", "dcx", np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        oracle_ising_exact(13, 2.0, 0.0, 0.5, [f])
    with pytest.raises(ValueError):
        oracle_ising_exact(2, 0.0, 2.0, 0.5, [f])


def test_empty_suite_rejected():
    with pytest.raises(ValueError):
        compare_vectors(lambda g: np.zeros(2), lambda g: np.zeros(2), [], 10, make_stream(0))
