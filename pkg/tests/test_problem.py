"""Problem construction, Gram cache, and objective evaluations."""

import numpy as np
import pytest

from neurolasso import (
    DimensionMismatchError,
    DualUnavailableError,
    NonFiniteInputError,
    build_instance,
    dual_objective,
    primal_objective,
    smooth_problem_check,
)
from conftest import random_instance


def naive_gram(A):
    """Triple-loop A^T A, the independent reference."""
    n, l = A.shape
    g = np.zeros((l, l))
    for i in range(l):
        for j in range(l):
            s = 0.0
            for k in range(n):
                s += A[k, i] * A[k, j]
            g[i, j] = s
    return g


def test_identity_example(identity_instance):
    inst, cache = identity_instance
    np.testing.assert_array_equal(cache.gram, np.eye(2))
    np.testing.assert_array_equal(cache.atb, [2.0, 0.3])
    assert cache.gram_norm_ub == 1.0


def test_small_product_example():
    inst, cache = build_instance([[1.0, 2.0], [3.0, 4.0]], [1.0, 1.0], 0.5)
    np.testing.assert_allclose(cache.gram, [[10.0, 14.0], [14.0, 20.0]], atol=0)
    np.testing.assert_allclose(cache.atb, [4.0, 6.0], atol=0)
    assert cache.gram_norm_ub == 34.0


def test_gram_matches_naive_reference():
    rng = np.random.default_rng(10)
    A = rng.standard_normal((8, 5))
    _, cache = build_instance(A, rng.standard_normal(8), 1.0)
    assert np.abs(cache.gram - naive_gram(A)).max() <= 1e-12


def test_gram_norm_bound_dominates_spectral_norm():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(2, 12))
        l = int(rng.integers(1, 10))
        A = rng.standard_normal((n, l)) * rng.uniform(0.1, 5)
        _, cache = build_instance(A, rng.standard_normal(n), 0.0)
        spectral = np.linalg.norm(cache.gram, 2)
        assert cache.gram_norm_ub >= spectral - 1e-12
        _, mf = build_instance(A, rng.standard_normal(n), 0.0, matrix_free=True)
        assert mf.gram_norm_ub >= spectral - 1e-12


def test_matrix_free_apply_identical():
    rng = np.random.default_rng(12)
    A = rng.standard_normal((7, 9))
    b = rng.standard_normal(7)
    _, dense = build_instance(A, b, 1.0)
    _, free = build_instance(A, b, 1.0, matrix_free=True)
    assert free.gram is None
    for _ in range(10):
        x = rng.standard_normal(9)
        np.testing.assert_allclose(free.apply(x), dense.apply(x), atol=1e-12)
    np.testing.assert_allclose(free.dense_gram(), dense.gram, atol=1e-13)


def test_gram_cache_immutable(identity_instance):
    inst, cache = identity_instance
    with pytest.raises(ValueError):
        cache.gram[0, 0] = 5.0
    with pytest.raises(ValueError):
        cache.atb[0] = 5.0
    with pytest.raises(ValueError):
        inst.A[0, 0] = 5.0


def test_validation_errors():
    with pytest.raises(DimensionMismatchError) as ei:
        build_instance(np.eye(3), np.ones(2), 1.0)
    assert "expected" in str(ei.value) and "got" in str(ei.value)
    with pytest.raises(NonFiniteInputError):
        build_instance([[np.nan, 0.0]], [1.0], 1.0)
    with pytest.raises(NonFiniteInputError):
        build_instance(np.eye(2), [np.inf, 0.0], 1.0)
    with pytest.raises(ValueError):
        build_instance(np.eye(2), np.ones(2), -0.5)
    with pytest.raises(ValueError):
        build_instance(np.eye(2), np.ones(2), np.nan)


def test_primal_objective_hand_values(identity_instance):
    inst, _ = identity_instance
    assert primal_objective(inst, np.zeros(2)) == pytest.approx(2.045, abs=1e-15)
    assert primal_objective(inst, [1.0, 0.0]) == pytest.approx(1.545, abs=1e-15)
    with pytest.raises(DimensionMismatchError):
        primal_objective(inst, np.zeros(3))


def test_primal_objective_convex_on_segments():
    inst, _ = random_instance(13, n=9, l=5)
    rng = np.random.default_rng(14)
    for _ in range(50):
        a = rng.standard_normal(5)
        c = rng.standard_normal(5)
        mid = primal_objective(inst, 0.5 * (a + c))
        assert mid <= 0.5 * primal_objective(inst, a) + 0.5 * primal_objective(inst, c) + 1e-12


def test_smooth_problem_check(identity_instance):
    inst, cache = identity_instance
    obj, viol = smooth_problem_check(inst, cache, [1.0, 0.0])
    assert obj == pytest.approx(1.0, abs=0)
    assert viol == 0.0
    # x = 0: violation is max(|atb|_inf - lam, 0)
    _, viol0 = smooth_problem_check(inst, cache, np.zeros(2))
    assert viol0 == pytest.approx(1.0, abs=1e-15)
    big = build_instance(np.eye(2), [2.0, 0.3], 2.5)
    _, v = smooth_problem_check(big[0], big[1], np.zeros(2))
    assert v == 0.0


def test_dual_objective_hand_values(identity_instance):
    inst, cache = identity_instance
    assert dual_objective(cache, [1.0, 0.3]) == pytest.approx(-1.545, abs=1e-12)
    assert dual_objective(cache, cache.atb) == pytest.approx(-2.045, abs=1e-12)


def test_dual_objective_matches_explicit_inverse():
    rng = np.random.default_rng(15)
    A = rng.standard_normal((10, 6))
    b = rng.standard_normal(10)
    _, cache = build_instance(A, b, 1.0)
    ginv = np.linalg.inv(cache.gram)
    for _ in range(10):
        z = rng.standard_normal(6)
        want = 0.5 * z @ ginv @ z - z @ ginv @ cache.atb
        assert dual_objective(cache, z) == pytest.approx(want, rel=1e-10)


def test_dual_unavailable():
    # rank deficient: l > n makes the Gram singular
    rng = np.random.default_rng(16)
    A = rng.standard_normal((3, 6))
    _, cache = build_instance(A, rng.standard_normal(3), 1.0)
    with pytest.raises(DualUnavailableError):
        dual_objective(cache, np.zeros(6))
    # matrix-free mode never exposes the dense Gram required here
    _, free = build_instance(np.eye(4), np.ones(4), 1.0, matrix_free=True)
    with pytest.raises(DualUnavailableError):
        dual_objective(free, np.zeros(4))
