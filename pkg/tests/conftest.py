import pytest

from varexp_cir import (
    ModelParams,
    cir_model,
    gm_model,
    make_builtin,
    make_grid,
    sample_batch,
    simulate_batch,
)

# Reference experiment configuration used throughout the suite.
KAPPA, THETA, XI, V0 = 2.0, 0.05, 0.3, 0.05
T, DT, M_PATHS, SEED = 1.0, 0.001, 5000, 42


@pytest.fixture(scope="session")
def params():
    return ModelParams(kappa=KAPPA, theta=THETA, xi=XI, v0=V0)


@pytest.fixture(scope="session")
def grid():
    return make_grid(T, DT)


@pytest.fixture(scope="session")
def gm_p1(params):
    return gm_model(params, make_builtin("p1"))


@pytest.fixture(scope="session")
def cir(params):
    return cir_model(params)


@pytest.fixture(scope="session")
def small_batch(grid):
    """128 paths on the full grid; cheap enough for unit tests."""
    return sample_batch(SEED, 128, grid)


@pytest.fixture(scope="session")
def full_batch(grid):
    """The reference-scale batch (M=5000); built once per session."""
    return sample_batch(SEED, M_PATHS, grid)


@pytest.fixture(scope="session")
def full_runs(full_batch, params):
    """Reference-scale path batches for the CIR baseline and all three
    variable-exponent models, driven by common increments."""
    models = {"cir": cir_model(params)}
    for name in ("p1", "p2", "p3"):
        models[f"gm_{name}"] = gm_model(params, make_builtin(name))
    return {mid: (m, simulate_batch(m, full_batch)) for mid, m in models.items()}
