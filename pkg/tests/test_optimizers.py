import copy

import numpy as np
import pytest

from tokq.errors import InvalidArgumentError, NonFiniteObjectiveError
from tokq.optimizers import Spsa, SpsaConfig, spsa_minimize


def quad(x):
    return float(np.sum((np.asarray(x) - 1.0) ** 2))


def test_constant_objective_leaves_theta():
    theta, trace = spsa_minimize(lambda x: 3.0, [0.4, -0.2], SpsaConfig(iterations=20, seed=1))
    np.testing.assert_array_equal(theta, [0.4, -0.2])
    assert all(v == 3.0 for v in trace.objective)


def test_quadratic_converges_over_seeds():
    errs = []
    for seed in range(50):
        theta, trace = spsa_minimize(quad, [0.0], SpsaConfig(iterations=100, seed=seed))
        errs.append(abs(theta[0] - 1.0))
        assert trace.n_evaluations == 301
    assert np.median(errs) < 0.05


def test_evaluation_count():
    calls = []

    def f(x):
        calls.append(1)
        return quad(x)

    _, trace = spsa_minimize(f, [0.0, 0.0, 0.0], SpsaConfig(iterations=17, seed=0))
    assert len(calls) == trace.n_evaluations == 3 * 17 + 1
    assert len(trace) == 18


def test_best_so_far_monotone():
    _, trace = spsa_minimize(quad, [2.0, -1.0], SpsaConfig(iterations=40, seed=3))
    b = trace.best_so_far
    assert np.all(np.diff(b) <= 0)
    assert b[-1] == min(trace.objective) == trace.best_value
    assert quad(trace.best_params) == trace.best_value


def test_reproducible():
    a = spsa_minimize(quad, [0.0, 0.5], SpsaConfig(iterations=30, seed=11))
    b = spsa_minimize(quad, [0.0, 0.5], SpsaConfig(iterations=30, seed=11))
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1].objective == b[1].objective


def test_blocks_and_forks_match_single_run():
    cfg = SpsaConfig(iterations=30, seed=4)
    whole = Spsa(quad, [0.0, 0.0], cfg)
    whole.step(30)
    parts = Spsa(quad, [0.0, 0.0], cfg)
    parts.step(10)
    fork = copy.deepcopy(parts)
    parts.step(20)
    fork.step(20)
    np.testing.assert_array_equal(whole.theta, parts.theta)
    np.testing.assert_array_equal(whole.theta, fork.theta)
    assert whole.trace.objective == fork.trace.objective


def test_explicit_gain():
    _, trace = spsa_minimize(quad, [0.0], SpsaConfig(iterations=5, a=0.2, seed=0))
    assert trace.gain_a == 0.2


def test_non_finite_objective():
    with pytest.raises(NonFiniteObjectiveError):
        spsa_minimize(lambda x: float("nan"), [0.0], SpsaConfig(iterations=3))


@pytest.mark.parametrize("kw", [dict(iterations=0), dict(a=-1.0), dict(c=0.0), dict(A=-1.0),
                                dict(alpha=0.4), dict(gamma_exp=0.0)])
def test_config_validation(kw):
    with pytest.raises(InvalidArgumentError):
        SpsaConfig(**kw)
