"""
Finite-sample Mallows bounds on random instances.
"""
import numpy as np
import pytest

from mallows.bounds import check_lemma6, check_lemma_bounds, check_theorem3_bound
from mallows.distance import optimal_assignment
from simulate.specs import FixedDesignSpec


def centered(a):
    return a - a.mean(axis=0)


@pytest.mark.slow
def test_theorem3_bound_on_random_instances():
    rng = np.random.default_rng(2024)
    passed = 0
    for trial in range(100):
        n = int(rng.integers(3, 9))
        p = int(rng.integers(1, 3))
        r = int(rng.integers(1, 4))
        m = int(rng.integers(2, 7))
        X = rng.standard_normal((n, p))
        F = centered(rng.standard_normal((m, r)))
        G = centered(rng.standard_normal((m, r)) * rng.uniform(0.5, 2.0))
        passed += check_theorem3_bound(X, F, G, seed=trial, samples=256, slack=0.15).passed
    assert passed >= 95


@pytest.mark.slow
@pytest.mark.parametrize('p, r, n', [(1, 1, 50), (2, 3, 100)])
def test_lemma_bounds(p, r, n):
    rng = np.random.default_rng(p * 100 + r)
    spec = FixedDesignSpec(n=n, beta=rng.standard_normal((r, p)), sigma=np.eye(r), seed=n)
    report = check_lemma_bounds(spec, reps=200)
    assert report.residual.passed
    assert report.centered.passed
    assert report.residual.bound == pytest.approx(p * r / n)
    assert report.centered.bound == pytest.approx((p + 1) * r / n)


def test_lemma6_on_random_instances():
    rng = np.random.default_rng(6)
    for _ in range(100):
        m, k = int(rng.integers(20, 41)), int(rng.integers(1, 4))
        u, v = rng.standard_normal((2, m, k))
        assert check_lemma6(u, v).passed


def test_assignment_against_permutations():
    from itertools import permutations

    rng = np.random.default_rng(7)
    for m in range(1, 8):
        mu, nu = rng.standard_normal((2, m, 2))
        costs = ((mu[:, None, :] - nu[None, :, :]) ** 2).sum(axis=2)
        best = min(costs[np.arange(m), list(perm)].sum() for perm in permutations(range(m)))
        assert optimal_assignment(mu, nu, 2)[1] == pytest.approx(best, rel=1e-12, abs=1e-12)
