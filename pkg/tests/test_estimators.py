import numpy as np
import pytest
from sklearn.base import clone

from shortdlog.errors import ParameterError
from shortdlog.estimators import QuantumOutputSampler, ShortDlogSolver, check_instance, check_pairs
from shortdlog.group import ProblemInstance, make_safe_prime_instance


@pytest.fixture(scope="module")
def inst():
    return make_safe_prime_instance(30, 14, 0, seed=21)


def test_params_and_clone():
    solver = ShortDlogSolver(tau=5, c=2)
    assert solver.get_params() == {"tau": 5, "c": 2, "verify_range": True}
    other = clone(solver).set_params(tau=6)
    assert other.tau == 6 and solver.tau == 5
    assert QuantumOutputSampler(seed=3).get_params()["seed"] == 3


def test_sample_then_predict(inst):
    sampler = QuantumOutputSampler(seed=4).fit(inst)
    pairs = sampler.sample_pairs(40)
    assert pairs.shape[1] == 2
    solver = ShortDlogSolver(tau=7).fit(inst.to_json())
    preds = solver.predict(pairs)
    assert sum(p == inst.d for p in preds) >= 38
    assert solver.score(pairs) >= 0.95
    assert solver.score(pairs, [inst.d] * len(pairs)) == solver.score(pairs)
    reports = solver.transform(sampler.sample(3))
    assert len(reports) == 3 and all(hasattr(r, "group_ops_used") for r in reports)


def test_unfitted_raises(inst):
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        ShortDlogSolver().predict([(0, 0)])
    with pytest.raises(NotFittedError):
        QuantumOutputSampler().sample(1)


def test_validation_helpers(inst):
    assert check_instance(inst.to_dict()).N == inst.N
    with pytest.raises(ParameterError):
        check_instance(42)
    assert check_pairs(np.array([[1, 2]]), 4, 4) == [(1, 2)]
    for bad in ([(1,)], [("a", 1)], [(256, 0)], [(0, 16)], np.zeros((2, 3))):
        with pytest.raises(ParameterError):
            check_pairs(bad, 4, 4)
    with pytest.raises(ParameterError):
        ShortDlogSolver(tau=15).fit(inst)
    with pytest.raises(ParameterError):
        ShortDlogSolver(c=0).fit(inst)
    hidden = ProblemInstance(N=inst.N, g=inst.g, x=inst.x, m=inst.m, delta=inst.delta)
    with pytest.raises(ParameterError):
        QuantumOutputSampler().fit(hidden)
    solver = ShortDlogSolver(tau=7).fit(hidden)
    with pytest.raises(ParameterError):
        solver.score([(0, 0)])
    assert np.isnan(solver.score([]))
