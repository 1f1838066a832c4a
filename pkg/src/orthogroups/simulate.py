"""Synthetic scenarios with a binary group effect, and train/test splitting.

Rows are generated as ``x_i = (s_i - lambda * z_i) U + eps_i``. All draws
come from one PCG64 stream seeded with ``spec.seed`` in this order:

1. S, n x k standard normals, row-major
2. U, k x p standard normals, row-major
3. z, n uniforms, ``z_i = 1`` when the uniform is below 0.5
4. lambda, k standard normals (one draw shared by every row)
5. eps, n x p standard normals, row-major
6. beta, k uniforms mapped to Uniform(-5, 5) by ``10 u - 5``
7. response noise, n standard normals

Scenario 2 drops the group term from the response; scenario 4 sets k = p.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ParameterError

SCENARIO_DEFAULTS = {
    1: dict(n=1000, p=200, k=10),
    2: dict(n=1000, p=200, k=10),
    3: dict(n=200, p=1000, k=10),
    4: dict(n=1000, p=200, k=None),
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one simulation scenario.

    Unset dimensions take the scenario defaults; scenario 4 always uses
    ``k = p``.
    """

    scenario: int = 1
    n: int | None = None
    p: int | None = None
    k: int | None = None
    seed: int = 0
    split_ratio: float = 0.75
    n_splits: int = 50

    def __post_init__(self):
        if self.scenario not in SCENARIO_DEFAULTS:
            raise ParameterError(f"scenario must be one of 1-4, got {self.scenario}")
        defaults = SCENARIO_DEFAULTS[self.scenario]
        n = defaults["n"] if self.n is None else self.n
        p = defaults["p"] if self.p is None else self.p
        if self.scenario == 4:
            k = p
        else:
            k = defaults["k"] if self.k is None else self.k
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "k", int(k))
        if self.n < 2 or self.p < 1 or self.k < 1:
            raise ParameterError(f"dimensions must be positive (n >= 2), got n={n}, p={p}, k={k}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if not 0 < self.split_ratio < 1:
            raise ParameterError("split_ratio must lie in (0, 1)")
        n_train = self.n_train
        if n_train < 2 or self.n - n_train < 2:
            raise ParameterError("split leaves fewer than 2 rows on one side")
        if self.n_splits < 1:
            raise ParameterError("n_splits must be at least 1")

    @property
    def n_train(self) -> int:
        return math.floor(self.n * self.split_ratio)

    def with_(self, **changes) -> "ScenarioSpec":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Truth:
    """Latent quantities behind a generated dataset (U stored k x p)."""

    S: np.ndarray
    U: np.ndarray
    lam: np.ndarray
    beta: np.ndarray


@dataclass(frozen=True)
class GeneratedData:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    truth: Truth = field(repr=False)
    rows: np.ndarray | None = field(repr=False, default=None)

    def subset(self, rows: np.ndarray) -> "GeneratedData":
        base = np.arange(self.X.shape[0]) if self.rows is None else self.rows
        return GeneratedData(self.X[rows], self.Y[rows], self.Z[rows], self.truth, base[rows])


def generate(spec: ScenarioSpec) -> GeneratedData:
    """Draw ``(X, Y, Z)`` for ``spec``; identical specs give identical data."""
    n, p, k = spec.n, spec.p, spec.k
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    S = rng.standard_normal((n, k))
    U = rng.standard_normal((k, p))
    z = (rng.random(n) < 0.5).astype(np.int64)
    lam = rng.standard_normal(k)
    eps = rng.standard_normal((n, p))
    beta = 10.0 * rng.random(k) - 5.0
    y_noise = rng.standard_normal(n)

    latent = S - np.outer(z, lam)
    X = latent @ U + eps
    if spec.scenario == 2:
        Y = S @ beta + y_noise
    else:
        Y = latent @ beta + y_noise
    return GeneratedData(X, Y, z, Truth(S, U, lam, beta))


def split_indices(spec: ScenarioSpec, split_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Row indices of the train and test parts of split ``split_index``."""
    if not 0 <= split_index < spec.n_splits:
        raise ParameterError(f"split_index {split_index} outside [0, {spec.n_splits})")
    ss = np.random.SeedSequence(spec.seed, spawn_key=(split_index,))
    perm = np.random.Generator(np.random.PCG64(ss)).permutation(spec.n)
    n_train = spec.n_train
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split(
    data: GeneratedData, spec: ScenarioSpec, split_index: int
) -> tuple[GeneratedData, GeneratedData]:
    """Deterministic train/test partition keyed by ``(seed, split_index)``."""
    if data.X.shape[0] != spec.n:
        raise ParameterError("data and spec disagree on n")
    train, test = split_indices(spec, split_index)
    return data.subset(train), data.subset(test)
