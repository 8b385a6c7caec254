import math

import numpy as np
import pytest

from app.models import HopfRegime, RegionLabel
from app.services.slep import SlepSystem
from app.utils.errors import RegimeError


def test_spectral_sum_properties_hold(slep):
    failed = {name: check for name, check in slep.property_suite(samples=6).items() if not check["passed"]}
    assert not failed


def test_turing_curve_solves_the_zero_eigenvalue_condition(slep):
    rho = slep.rho0
    k1s = [0.05 * rho, 0.2 * rho, 0.35 * rho, 0.45 * rho]
    xis = [slep.turing_curve_xi(k1) for k1 in k1s]
    for k1, xi in zip(k1s, xis):
        assert xi > 0.0
        assert abs(slep.turing_residual(k1, xi)) < 1e-10 * max(1.0, rho)
        assert slep.turing_curve_slope(k1) > 0.0
    assert np.all(np.diff(xis) > 0.0)


def test_turing_curve_is_undefined_past_half_rho0(slep):
    with pytest.raises(RegimeError, match="Gamma3"):
        slep.turing_curve_xi(0.6 * slep.rho0)
    with pytest.raises(RegimeError, match="BOUNDARY"):
        slep.turing_curve_xi(0.5 * slep.rho0)


def test_classify_covers_every_region(slep):
    rho = slep.rho0
    k1 = 0.25 * rho
    xi = slep.turing_curve_xi(k1)
    above = slep.classify(k1, 2.0 * xi)
    below = slep.classify(k1, 0.5 * xi)
    assert above.label is RegionLabel.GAMMA_1
    assert above.xi_k1 == pytest.approx(xi)
    assert below.label is RegionLabel.GAMMA_2
    assert slep.classify(0.75 * rho, 1.0).label is RegionLabel.GAMMA_3_1
    assert slep.classify(1.2 * rho, 1.0).label is RegionLabel.GAMMA_3_2
    assert slep.classify(0.5 * rho, 1.0).label is RegionLabel.BOUNDARY
    assert slep.classify(rho, 1.0).label is RegionLabel.BOUNDARY


def test_delay_robustness_verdicts(slep):
    rho = slep.rho0
    k1 = 0.25 * rho
    xi = slep.turing_curve_xi(k1)
    assert slep.classify(k1, 2.0 * xi).delay_verdict == "unstable for every alpha"
    assert slep.classify(1.2 * rho, 1.0).delay_verdict == "stable for every alpha"
    assert slep.classify(0.5 * rho, 1.0).delay_verdict == "excluded"
    assert slep.classify(0.75 * rho, 1.0).delay_verdict == "hopf possible (upper_band)"
    assert slep.classify(k1, 0.5 * xi).delay_verdict.startswith("hopf possible")


def test_large_k2_reproduces_the_closed_forms(slep):
    k1 = 0.8 * slep.rho0
    k2 = 1e6 * slep.gamma0
    hopf = slep.find_hopf(k1, k2, with_transversality=False)
    limits = slep.large_k2_limits(k1)
    assert hopf.regime is HopfRegime.UPPER_BAND
    assert hopf.alpha_H == pytest.approx(limits["alpha_H"], rel=0.01)
    assert hopf.lamIH == pytest.approx(limits["lamIH"], rel=0.01)
    assert hopf.alpha2 == pytest.approx(limits["alpha2"], rel=0.01)
    assert hopf.alpha0 == pytest.approx(limits["alpha0"], rel=0.01)


def test_large_k2_limit_of_the_imaginary_roots(slep):
    rho, tau = slep.rho0, slep.tau
    k1 = 0.8 * rho
    alpha = 0.5 * k1 / tau
    limits = slep.large_k2_limits(k1, alpha)
    assert limits["lambda_I1"] == pytest.approx(alpha * math.sqrt(0.6 / 0.2))
    assert limits["lambda_I2"] == pytest.approx(math.sqrt(k1 * alpha / tau - alpha * alpha))
    assert slep.large_k2_limits(1.5 * rho)["alpha_H"] is None


def test_middle_band_hopf_ordering_and_transversality(slep):
    rho = slep.rho0
    k1 = 0.6 * rho
    k2 = 2.0 * slep.k2hat_star(k1)
    hopf = slep.find_hopf(k1, k2)
    assert hopf.regime is HopfRegime.MIDDLE_BAND
    assert hopf.alpha2 < hopf.lamIH < hopf.alpha_H < hopf.alpha0
    assert hopf.alpha1 is None
    assert hopf.dlamR_dalpha < 0.0
    assert hopf.I2 > 0.0
    tracked = slep.transversality_by_tracking(hopf, k1, k2)
    assert tracked == pytest.approx(hopf.dlamR_dalpha, rel=1e-3)


def test_lower_band_hopf_between_k2hat_and_the_turing_curve(slep):
    rho = slep.rho0
    k1 = 0.4 * rho
    k2hat = slep.k2hat_star(k1)
    xi = slep.turing_curve_xi(k1)
    assert k2hat < xi
    k2 = math.sqrt(k2hat * xi)
    hopf = slep.find_hopf(k1, k2)
    assert hopf.regime is HopfRegime.LOWER_BAND
    assert hopf.alpha2 < hopf.lamIH < hopf.alpha_H < hopf.alpha0
    assert hopf.dlamR_dalpha < 0.0
    lam_1 = slep.lambda_I1(hopf.alpha_H, k1, k2)
    lam_2 = slep.lambda_I2(hopf.alpha_H, k1, k2)
    assert lam_1 == pytest.approx(lam_2, rel=1e-8)


def test_lower_band_outside_the_curve_has_no_hopf_point(slep):
    k1 = 0.4 * slep.rho0
    xi = slep.turing_curve_xi(k1)
    assert slep.hopf_regime(k1, 2.0 * xi) is HopfRegime.NONE
    with pytest.raises(RegimeError):
        slep.find_hopf(k1, 2.0 * xi)


def test_below_k2hat_reports_alpha1(slep):
    k1 = 0.4 * slep.rho0
    k2 = 0.5 * slep.k2hat_star(k1)
    assert slep.hopf_regime(k1, k2) is HopfRegime.BELOW_K2HAT
    alpha1 = slep.alpha1(k1, k2)
    assert alpha1 > 0.0
    assert slep.sums.X(0.0, alpha1 * alpha1, k2) + 1.5 * k1 - slep.rho0 == pytest.approx(0.0, abs=1e-9 * slep.rho0)


def test_lambda_I2_equals_alpha_at_alpha2(slep):
    k1 = 0.6 * slep.rho0
    k2 = 2.0 * slep.k2hat_star(k1)
    alpha2 = slep.alpha2(k1, k2)
    assert 0.0 < alpha2 < slep.alpha0(k1, k2)
    assert slep.lambda_I2(alpha2, k1, k2) == pytest.approx(alpha2, rel=1e-8)


def test_lambda_I1_is_confined_to_the_imaginary_regions(slep):
    k1 = 0.25 * slep.rho0
    xi = slep.turing_curve_xi(k1)
    with pytest.raises(RegimeError):
        slep.lambda_I1(1.0, k1, 2.0 * xi)


def test_delayed_thresholds_need_tau_above_tau_star(constants):
    system = SlepSystem(constants, 0.9 * constants.tau_star)
    with pytest.raises(RegimeError, match="tau"):
        system.alpha0(0.3 * constants.rho0_star, 1.0)
    with pytest.raises(RegimeError):
        system.find_hopf(0.6 * constants.rho0_star, 1.0)


def test_symmetric_delayed_problem_has_no_crossing(slep):
    k1 = 0.25 * slep.rho0
    report = slep.slep1_no_crossing_check(k1, 0.5 * slep.gamma0, list(slep.gamma0 * np.logspace(-2, 2, 9)))
    assert report["passed"]
    assert report["no_zero_eigenvalue"]
    assert report["min_imaginary_margin"] > 0.0


def test_turing_root_tracks_from_zero(slep):
    k1 = 0.25 * slep.rho0
    xi = slep.turing_curve_xi(k1)
    root = slep.complex_slep_root(0.0, "F", k1, xi)
    assert abs(root) < 1e-8


def test_root_sensitivity_matches_a_central_difference(slep):
    k1 = 0.25 * slep.rho0
    xi = slep.turing_curve_xi(k1)
    delta = 1e-4 * xi
    upper = slep.complex_slep_root(0.0, "F", k1, xi + delta).real
    lower = slep.complex_slep_root(0.0, "F", k1, xi - delta).real
    sensitivity = slep.turing_root_sensitivity(k1, xi)
    assert sensitivity > 0.0
    assert sensitivity == pytest.approx((upper - lower) / (2.0 * delta), rel=1e-4)
