import numpy as np
import numpy.testing as npt
import pytest

from app.models import Branch
from app.services.model_core import branch_eval, find_vhat
from app.services.reduced_profile import (
    G_branch,
    branch_potential,
    first_integral,
    integral_g_left,
    profile_to_dict,
    sample_profile,
)
from app.utils.errors import DomainError


def test_layer_sits_inside_the_interval(profile, params):
    assert 0.0 < profile.x_star < params.ell
    assert profile.v_hat == pytest.approx(find_vhat(params.a, params.sigma), rel=1e-12)
    assert profile.V_left[-1] == profile.v_hat == profile.V_right[0]


def test_c1_matching_at_the_layer(profile):
    scale = max(np.max(np.abs(profile.dV_left)), np.max(np.abs(profile.dV_right)))
    assert profile.slope_mismatch < 1e-6 * scale
    assert profile.slope_at_layer > 0.0


def test_V_is_strictly_increasing(profile):
    assert np.all(np.diff(profile.V) > 0.0)
    assert np.all(np.diff(profile.grid) > 0.0)


def test_neumann_ends(profile):
    assert profile.dV_left[0] == 0.0
    assert profile.dV_right[-1] == 0.0


def test_energy_is_constant_on_each_piece(profile):
    left, right = first_integral(profile)
    for values in (left, right):
        drift = (values.max() - values.min()) / max(1.0, np.max(np.abs(values)))
        assert drift < 1e-8


def test_flux_balance_over_the_left_piece(profile, params):
    integral = integral_g_left(profile)
    assert integral < 0.0
    assert params.d * profile.slope_at_layer + integral == pytest.approx(0.0, abs=1e-5 * abs(integral))


def test_branch_potential_is_an_antiderivative_of_G():
    a = 10.0
    v, h = 5.0, 1e-5
    for branch in (Branch.MINUS, Branch.PLUS):
        numeric = (branch_potential(v + h, branch, a) - branch_potential(v - h, branch, a)) / (2 * h)
        assert numeric == pytest.approx(G_branch(v, branch, a), rel=1e-6)
    assert G_branch(5.0, Branch.MINUS, a) < 0.0 < G_branch(5.0, Branch.PLUS, a)


def test_sample_profile_follows_the_outer_branches(profile):
    x = np.array([0.0, 0.5 * profile.x_star, 0.5 * (profile.x_star + profile.ell), profile.ell])
    U, V = sample_profile(profile, x)
    npt.assert_allclose(V[0], profile.V0)
    npt.assert_allclose(V[-1], profile.V_ell)
    npt.assert_allclose(U[:2], branch_eval(V[:2], Branch.MINUS, profile.a))
    npt.assert_allclose(U[2:], branch_eval(V[2:], Branch.PLUS, profile.a))


def test_sample_profile_at_the_layer_returns_both_limits(profile):
    (u_minus, u_plus), v = sample_profile(profile, profile.x_star)
    assert v == profile.v_hat
    assert u_minus < u_plus


def test_sample_profile_outside_the_interval(profile):
    with pytest.raises(DomainError):
        sample_profile(profile, profile.ell + 0.1)


def test_profile_to_dict_schema(profile):
    payload = profile_to_dict(profile)
    assert set(payload) == {"x_star", "v_hat", "grid", "V", "U_left_of_layer", "U_right_of_layer", "slope_mismatch"}
    assert len(payload["grid"]) == len(payload["V"])
