import numpy as np
import pytest

from orthogroups.errors import ParameterError
from orthogroups.simulate import ScenarioSpec, generate, split, split_indices


def test_defaults():
    assert (ScenarioSpec(1).n, ScenarioSpec(1).p, ScenarioSpec(1).k) == (1000, 200, 10)
    assert (ScenarioSpec(2).n, ScenarioSpec(2).p, ScenarioSpec(2).k) == (1000, 200, 10)
    assert (ScenarioSpec(3).n, ScenarioSpec(3).p, ScenarioSpec(3).k) == (200, 1000, 10)
    s4 = ScenarioSpec(4, p=30)
    assert s4.k == 30
    assert ScenarioSpec(4, p=30, k=3).k == 30


@pytest.mark.parametrize(
    "kwargs", [dict(scenario=5), dict(scenario=1, n=0), dict(scenario=1, p=-1), dict(seed=-1), dict(split_ratio=1.0)]
)
def test_invalid_specs(kwargs):
    with pytest.raises(ParameterError):
        ScenarioSpec(**kwargs)


def test_determinism():
    spec = ScenarioSpec(1, seed=123)
    a, b = generate(spec), generate(spec)
    for name in ("X", "Y", "Z"):
        assert getattr(a, name).tobytes() == getattr(b, name).tobytes()
    assert not np.array_equal(a.X, generate(spec.with_(seed=124)).X)


def test_shapes_and_binary_group():
    d = generate(ScenarioSpec(3, seed=1))
    assert d.X.shape == (200, 1000) and d.Y.shape == (200,) and d.Z.shape == (200,)
    assert set(np.unique(d.Z)) <= {0, 1}
    assert d.truth.U.shape == (10, 1000) and d.truth.lam.shape == (10,)
    assert np.all(np.abs(d.truth.beta) <= 5)


def test_mean_matrix_rank():
    spec = ScenarioSpec(1, n=200, p=50, k=4, seed=3)
    d = generate(spec)
    mean = (d.truth.S - np.outer(d.Z, d.truth.lam)) @ d.truth.U
    assert np.linalg.matrix_rank(mean) <= spec.k + 1


def test_draw_order_documented():
    spec = ScenarioSpec(1, n=7, p=5, k=2, seed=42)
    rng = np.random.Generator(np.random.PCG64(42))
    S = rng.standard_normal((7, 2))
    U = rng.standard_normal((2, 5))
    z = (rng.random(7) < 0.5).astype(int)
    lam = rng.standard_normal(2)
    eps = rng.standard_normal((7, 5))
    beta = 10 * rng.random(2) - 5
    e = rng.standard_normal(7)
    d = generate(spec)
    M = S - np.outer(z, lam)
    np.testing.assert_array_equal(d.X, M @ U + eps)
    np.testing.assert_array_equal(d.Y, M @ beta + e)


def test_scenario2_response_ignores_group():
    corrs = []
    for seed in range(20):
        d = generate(ScenarioSpec(2, n=5000, p=20, k=10, seed=seed))
        corrs.append(np.corrcoef(d.Y, d.Z)[0, 1])
    assert np.all(np.abs(corrs) < 0.1)


def test_group_balance():
    fracs = [generate(ScenarioSpec(1, n=1000, p=5, k=2, seed=s)).Z.mean() for s in range(20)]
    assert sum(abs(f - 0.5) <= 0.05 for f in fracs) >= 19


def test_split_sizes_default_ratio():
    spec1 = ScenarioSpec(1, seed=0)
    tr, te = split_indices(spec1, 0)
    assert (tr.size, te.size) == (750, 250)
    spec3 = ScenarioSpec(3, seed=0)
    tr, te = split_indices(spec3, 0)
    assert (tr.size, te.size) == (150, 50)


def test_split_partition_and_alignment():
    spec = ScenarioSpec(1, n=100, p=5, k=2, seed=8, n_splits=3)
    d = generate(spec)
    train, test = split(d, spec, 2)
    rows = np.concatenate([train.rows, test.rows])
    assert np.array_equal(np.sort(rows), np.arange(100))
    assert np.intersect1d(train.rows, test.rows).size == 0
    np.testing.assert_array_equal(train.X, d.X[train.rows])
    np.testing.assert_array_equal(test.Y, d.Y[test.rows])
    np.testing.assert_array_equal(test.Z, d.Z[test.rows])


def test_split_deterministic_and_distinct():
    spec = ScenarioSpec(1, n=60, p=5, k=2, seed=8, n_splits=4)
    a = split_indices(spec, 1)[0]
    assert np.array_equal(a, split_indices(spec, 1)[0])
    assert not np.array_equal(a, split_indices(spec, 2)[0])


def test_split_index_range():
    spec = ScenarioSpec(1, n=60, p=5, k=2, n_splits=4)
    with pytest.raises(ParameterError):
        split_indices(spec, 4)
