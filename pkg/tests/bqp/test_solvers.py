import sys
import pathlib
import itertools
import numpy as np
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.bqp import (
    BqpInstance,
    solve_exhaustive,
    solve_flip_descent,
    solve_coordinate_descent,
    solve,
)
from dsiml._src.objective import Hyperparams
from dsiml._src.utils.errors import SolverCapacityError


@pytest.fixture
def setup_data():
    rng = np.random.default_rng(0)
    instances = []
    for _ in range(100):
        M = rng.normal(size=(12, 12))
        instances.append(BqpInstance(M + M.T, rng.normal(size=12)))
    return {"rng": rng, "instances": instances}


def test_exhaustive_examples():
    b, value = solve_exhaustive(BqpInstance(np.zeros((2, 2)), np.array([3.0, -5.0])))
    np.testing.assert_array_equal(b, [-1, 1])
    assert value == -8.0

    A = np.array([[0.0, 2.0], [2.0, 0.0]])
    b, value = solve_exhaustive(BqpInstance(A, np.zeros(2)))
    np.testing.assert_array_equal(b, [-1, 1])
    assert value == -4.0


def test_exhaustive_matches_reenumeration(setup_data):
    rng = setup_data["rng"]
    M = rng.normal(size=(8, 8))
    inst = BqpInstance(M, rng.normal(size=8))
    # reversed candidate order
    candidates = list(itertools.product([1, -1], repeat=8))[::-1]
    oracle = min(inst.evaluate(np.array(c)) for c in candidates)
    _, value = solve_exhaustive(inst)
    assert value == pytest.approx(oracle, abs=1e-12)


def test_exhaustive_permutation_invariance(setup_data):
    rng = setup_data["rng"]
    M = rng.normal(size=(7, 7))
    inst = BqpInstance(M + M.T, rng.normal(size=7))
    perm = rng.permutation(7)
    permuted = BqpInstance(inst.A[np.ix_(perm, perm)], inst.c[perm])
    b, value = solve_exhaustive(inst)
    b_perm, value_perm = solve_exhaustive(permuted)
    assert value_perm == pytest.approx(value, abs=1e-9)
    np.testing.assert_array_equal(b_perm, b[perm])


def test_exhaustive_capacity():
    with pytest.raises(SolverCapacityError):
        solve_exhaustive(BqpInstance(np.eye(17), np.zeros(17)))


def test_flip_descent_quality(setup_data):
    rng = setup_data["rng"]
    hits = 0
    for inst in setup_data["instances"]:
        warm = rng.choice([-1, 1], size=12)
        b, value = solve_flip_descent(inst, warm, restarts=8, seed=3)
        assert value <= inst.evaluate(warm) + 1e-12
        assert value == pytest.approx(inst.evaluate(b))
        _, optimum = solve_exhaustive(inst)
        hits += value <= optimum + 1e-9
    assert hits >= 80


def test_flip_descent_fixed_point(setup_data):
    inst = setup_data["instances"][0]
    local, _ = solve_flip_descent(inst, np.ones(12), restarts=1)
    again, _ = solve_flip_descent(inst, local, restarts=1)
    np.testing.assert_array_equal(again, local)


def test_more_restarts_never_worse(setup_data):
    for inst in setup_data["instances"][:20]:
        warm = np.ones(12)
        values = [solve_flip_descent(inst, warm, r, seed=7)[1] for r in (1, 2, 4, 8)]
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_coordinate_descent_and_dispatch(setup_data):
    inst = setup_data["instances"][1]
    warm = -np.ones(12)
    b, value = solve_coordinate_descent(inst, warm)
    assert value <= inst.evaluate(warm)
    # a local optimum under single flips
    for k in range(12):
        flipped = b.astype(float)
        flipped[k] *= -1
        assert inst.evaluate(flipped) >= value - 1e-12

    hp = Hyperparams(dim=12)
    assert solve(inst, warm, hp.replace(solver="exhaustive"))[1] == pytest.approx(
        solve_exhaustive(inst)[1]
    )
    assert solve(inst, warm, hp.replace(solver="dcd"))[1] == pytest.approx(value)
    assert solve(inst, warm, hp, seed=1)[1] <= inst.evaluate(warm)
    with pytest.raises(ValueError):
        solve_flip_descent(inst, np.ones(5))
