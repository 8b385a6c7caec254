from dataclasses import replace

import numpy as np
import pytest

from app.services.reduced_profile import sample_profile
from app.services.steady_eps import (
    LayeredSteadySolver,
    build_eps_schedule,
    layered_grid,
    linearize_coeffs,
    resample_state,
    solve_layered_eps,
    state_to_dict,
    steady_residual,
)
from app.utils.errors import NewtonDivergence


def test_eps_schedule_is_geometric_down_to_the_target():
    schedule = build_eps_schedule(0.015, start=0.08, ratio=0.5)
    assert schedule == pytest.approx([0.08, 0.04, 0.02, 0.015])
    assert build_eps_schedule(0.1, start=0.08) == [0.1]


def test_layered_grid_concentrates_nodes_at_the_layer():
    x = layered_grid(1.2, 0.02, 2.0, 501)
    assert x.size == 501
    assert x[0] == 0.0 and x[-1] == 2.0
    assert np.all(np.diff(x) > 0.0)
    inside = np.count_nonzero(np.abs(x - 1.2) <= 0.2)
    assert inside >= 0.4 * x.size - 2


def test_non_decreasing_schedule_is_rejected(params, profile):
    with pytest.raises(ValueError, match="decrease"):
        solve_layered_eps(params, profile, [0.05, 0.06], nodes=201)


def test_steady_state_is_layered_and_converged(steady, params, profile):
    assert steady.eps == params.eps
    assert steady.nodes == 801
    assert steady.newton_residual < 1e-8
    assert steady_residual(steady, params) < 1e-8
    assert steady.u.max() - steady.u.min() > 1.0
    assert abs(steady.x_star - profile.x_star) < 10 * params.eps


def test_steady_state_tracks_the_reduced_inhibitor(steady, profile):
    _, V = sample_profile(profile, steady.x)
    assert np.max(np.abs(steady.v - V)) < 0.1 * (V.max() - V.min())


def test_linearization_matches_stored_coefficients(steady):
    f_u, f_v, g_u, g_v = linearize_coeffs(steady)
    assert np.array_equal(f_u, steady.f_u)
    assert np.all(f_v < 0.0) and np.all(g_v < 0.0)
    assert np.array_equal(g_u, steady.g_u)


def test_resample_state_reconverges_on_a_uniform_grid(steady, params):
    x = np.linspace(0.0, params.ell, 1201)
    state = resample_state(steady, params, x)
    assert state.nodes == 1201
    assert state.newton_residual < 1e-8
    assert state.x_star == pytest.approx(steady.x_star, abs=0.01)


def test_state_to_dict_schema(steady):
    payload = state_to_dict(steady)
    assert set(payload) == {"eps", "x_star", "newton_residual", "x", "u", "v"}
    assert len(payload["x"]) == steady.nodes


def test_stalled_continuation_reports_the_last_converged_eps(params, profile, monkeypatch):
    floor = 0.065
    original = LayeredSteadySolver.solve

    def solve(self, u, v):
        result = original(self, u, v)
        return result if self.eps >= floor else replace(result, converged=False)

    monkeypatch.setattr(LayeredSteadySolver, "solve", solve)
    with pytest.raises(NewtonDivergence) as caught:
        solve_layered_eps(params, profile, [0.08, 0.04], nodes=401)
    last = caught.value.last_converged_eps
    assert last is not None
    assert floor <= last < floor + 2e-4
    assert caught.value.to_dict()["details"]["last_converged_eps"] == last
