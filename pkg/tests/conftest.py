from __future__ import annotations

import pytest

from app.config import settings
from app.db.session import close_db
from app.schemas import ModelParams
from app.services.reduced_profile import solve_reduced
from app.services.slep import SlepSystem
from app.services.spectral import build_slep_constants, eig_slow
from app.services.steady_eps import solve_layered_eps

# Moderate resolution: enough for the structural checks, fast enough for the default run.
PROFILE_NODES = 512
SLOW_NODES = 1025
SLOW_MODES = 64
STEADY_NODES = 801


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Every test gets its own cache directory."""
    monkeypatch.setattr(settings, "cache_dir", tmp_path / "cache")
    yield tmp_path / "cache"
    close_db()


@pytest.fixture(scope="session")
def params() -> ModelParams:
    return ModelParams(a=10.0, sigma=8.0, d=4.0, ell=2.0, eps=0.05, tau=1.0)


@pytest.fixture(scope="session")
def profile(params):
    return solve_reduced(params, nodes=PROFILE_NODES)


@pytest.fixture(scope="session")
def basis(profile):
    return eig_slow(profile, N_target=SLOW_MODES, nodes=SLOW_NODES)


@pytest.fixture(scope="session")
def constants(params, profile, basis):
    """Constants with kappa* from the inner layer, which needs no eps continuation."""
    return build_slep_constants(params, kappa_method="inner", profile=profile, basis=basis)


@pytest.fixture(scope="session")
def slep(constants) -> SlepSystem:
    return SlepSystem(constants, 1.5 * constants.tau_star)


@pytest.fixture(scope="session")
def steady(params, profile):
    return solve_layered_eps(params, profile, nodes=STEADY_NODES)
