import math

import numpy as np
import numpy.testing as npt
import pytest

from app.models import Branch
from app.schemas import ModelParams, OriginalParams, SIGMOIDAL_THRESHOLD
from app.services.model_core import (
    FOLD_MERGE_THRESHOLD,
    M_by_quadrature,
    M_of_v,
    M_prime,
    branch_eval,
    constant_state_is_unstable_activator,
    constant_state_jacobian,
    constant_steady_state,
    find_vhat,
    fold_cubic_roots,
    fold_points,
    inner_layer_kappa,
    kinetics,
    kinetics_determinant,
    nullcline_v,
    reduce_parameters,
)
from app.utils.errors import DomainError, RegimeError


def test_fold_points_match_cubic_roots():
    folds = fold_points(10.0)
    roots = np.roots([2.0, -10.0, 0.0, 10.0])
    positive = np.sort(roots[(np.abs(roots.imag) < 1e-12) & (roots.real > 0)].real)
    npt.assert_allclose([folds.u_lo, folds.u_hi], positive, rtol=1e-8)
    npt.assert_allclose([folds.u_lo, folds.u_hi], [1.1378052016, 4.7812837960], rtol=1e-9)
    npt.assert_allclose([folds.v_lo, folds.v_hi], [4.4680755005, 6.5109129266], rtol=1e-9)


def test_fold_points_respect_bounds():
    a = 10.0
    folds = fold_points(a)
    assert max(1.0, 8.0 / a) < folds.u_lo < 2.0
    assert 4.0 < folds.u_hi < 5.0
    assert 2.0 < folds.v_lo < 5.0 < folds.v_hi < 8.083


def test_fold_points_reject_non_sigmoidal_feed():
    with pytest.raises(RegimeError):
        fold_points(6.0)


def test_fold_cubic_roots_near_merge():
    u_lo, u_hi = fold_cubic_roots(FOLD_MERGE_THRESHOLD + 1e-3)
    assert 0.0 < u_lo < u_hi
    assert u_hi - u_lo < 0.2
    with pytest.raises(DomainError):
        fold_cubic_roots(5.0)


def test_branches_invert_the_nullcline():
    a = 10.0
    folds = fold_points(a)
    v = np.linspace(folds.v_lo, folds.v_hi, 23)[1:-1]
    for branch in Branch:
        u = branch_eval(v, branch, a)
        npt.assert_allclose(nullcline_v(u, a), v, rtol=1e-10)
    h_minus = branch_eval(v, Branch.MINUS, a)
    h_zero = branch_eval(v, Branch.ZERO, a)
    h_plus = branch_eval(v, Branch.PLUS, a)
    assert np.all(h_minus < h_zero) and np.all(h_zero < h_plus)


def test_outer_branches_extend_past_the_folds():
    a = 10.0
    folds = fold_points(a)
    assert branch_eval(folds.v_hi + 1.0, Branch.MINUS, a) > 0.0
    assert branch_eval(0.5 * folds.v_lo, Branch.PLUS, a) > folds.u_hi
    with pytest.raises(DomainError, match="h_zero"):
        branch_eval(folds.v_hi + 0.1, Branch.ZERO, a)
    with pytest.raises(DomainError):
        branch_eval(folds.v_hi + 0.1, Branch.PLUS, a)


def test_kinetics_determinant_identity_and_signs():
    u, v = np.meshgrid(np.linspace(0.05, 10.0, 60), np.linspace(0.05, 25.0, 60))
    k = kinetics(u, v, 10.0, 8.0)
    npt.assert_allclose(k.det, kinetics_determinant(u, 8.0), rtol=1e-12, atol=1e-14)
    assert np.all(k.det > 0.0)
    assert np.all(k.f_v < 0.0)
    assert np.all(k.g_v < 0.0)


def test_kinetics_rejects_non_positive_activator():
    with pytest.raises(DomainError):
        kinetics(0.0, 1.0, 10.0, 8.0)


def test_constant_state_and_its_jacobian():
    u, v = constant_steady_state(10.0)
    assert (u, v) == (2.0, 5.0)
    k = kinetics(u, v, 10.0, 8.0)
    assert abs(k.f) < 1e-14 and abs(k.g) < 1e-14
    params = ModelParams(eps=0.1, tau=2.0)
    jacobian = constant_state_jacobian(params)
    npt.assert_allclose(jacobian[0], [k.f_u / 0.2, k.f_v / 0.2])
    npt.assert_allclose(jacobian[1], [k.g_u, k.g_v])
    assert jacobian[0, 0] > 0.0


def test_sigmoidal_guard_is_activator_instability():
    assert constant_state_is_unstable_activator(SIGMOIDAL_THRESHOLD + 1e-6)
    assert not constant_state_is_unstable_activator(SIGMOIDAL_THRESHOLD - 1e-6)
    with pytest.raises(ValueError, match="non-sigmoidal"):
        ModelParams(a=6.0)


def test_M_closed_form_matches_quadrature():
    a, sigma = 10.0, 8.0
    folds = fold_points(a)
    for v in np.linspace(folds.v_lo, folds.v_hi, 9)[1:-1]:
        assert abs(M_of_v(v, a, sigma) - M_by_quadrature(v, a, sigma)) < 1e-10


def test_M_changes_sign_once_between_folds():
    a, sigma = 10.0, 8.0
    folds = fold_points(a)
    delta = 1e-6
    assert M_of_v(folds.v_lo + delta, a, sigma) > 0.0 > M_of_v(folds.v_hi - delta, a, sigma)
    v_hat = find_vhat(a, sigma)
    assert folds.v_lo < v_hat < folds.v_hi
    assert v_hat == pytest.approx(5.5042339154, rel=1e-9)
    assert abs(M_of_v(v_hat, a, sigma)) < 1e-12
    assert M_prime(v_hat, a, sigma) < 0.0


def test_M_prime_matches_finite_difference():
    a, sigma = 10.0, 8.0
    v, h = 5.2, 1e-6
    numeric = (M_of_v(v + h, a, sigma) - M_of_v(v - h, a, sigma)) / (2 * h)
    assert M_prime(v, a, sigma) == pytest.approx(numeric, rel=1e-6)


def test_inner_layer_kappa_is_positive():
    kappa = inner_layer_kappa(10.0, 8.0)
    assert kappa > 0.0 and math.isfinite(kappa)


def test_reduce_parameters_rescales_time_and_space():
    original = OriginalParams(d1=1e-4, d2=0.4, a=10.0, b=0.5, sigma=8.0, k1_orig=0.01, k2=0.2, alpha=1.0)
    params, time_scale = reduce_parameters(original)
    assert time_scale == 0.5
    assert params.eps == pytest.approx(math.sqrt(1e-4 / 8.0))
    assert params.tau == pytest.approx(0.5 * math.sqrt(8.0 / 1e-4))
    assert params.d == pytest.approx(0.8)
    assert params.k1 == pytest.approx(0.01 * math.sqrt(8.0 / 1e-4))
    assert params.k2 == pytest.approx(0.4)
    assert params.alpha == pytest.approx(2.0)


def test_reduce_parameters_keeps_instantaneous_exchange():
    original = OriginalParams(d1=1e-4, d2=0.4, a=10.0, b=0.5, sigma=8.0, alpha="inf")
    params, _ = reduce_parameters(original, eps_override=0.02)
    assert params.eps == 0.02
    assert math.isinf(params.alpha)
    assert not params.delayed
