import math

import numpy as np
import numpy.testing as npt
import pytest

from app.services.spectral import (
    SpectralSums,
    build_slep_constants,
    delta_limit_constants,
    eig_fast,
    extrapolate_rho0,
    kappa_from_rho0,
    neville_extrapolate,
    resolvent_at_layer,
    rho0_from_kappa,
    sample_fast_spectra,
    sturm_liouville_eigs,
    tail_deviation,
    tau_star,
)
from app.utils.errors import DomainError


def _discrete_neumann_eigs(nodes: int, ell: float, d: float, q: float, modes: int) -> np.ndarray:
    h = ell / (nodes - 1)
    n = np.arange(modes)
    return q + d * (4.0 / h**2) * np.sin(n * np.pi * h / (2.0 * ell)) ** 2


def test_constant_potential_matches_the_discrete_cosine_spectrum():
    ell, d, q, nodes = 2.0, 4.0, 3.0, 257
    x = np.linspace(0.0, ell, nodes)
    eigs = sturm_liouville_eigs(x, np.full(nodes, q), d, 6)
    npt.assert_allclose(eigs.gamma, _discrete_neumann_eigs(nodes, ell, d, q, 6), rtol=1e-10)
    npt.assert_allclose(eigs.psi[:, 2], np.sqrt(2.0 / ell) * np.cos(2.0 * np.pi * x / ell), atol=1e-8)


def test_constant_potential_converges_at_second_order():
    ell, d, q, n = 2.0, 4.0, 3.0, 3
    exact = q + d * (n * np.pi / ell) ** 2
    errors = []
    for nodes in (257, 513):
        x = np.linspace(0.0, ell, nodes)
        gamma = sturm_liouville_eigs(x, np.full(nodes, q), d, n + 1).gamma
        errors.append(abs(gamma[n] - exact))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.02)


def test_eigenvectors_are_orthonormal_in_the_lumped_product():
    x = np.linspace(0.0, 2.0, 301) ** 1.5 / np.sqrt(2.0)
    potential = 1.0 + np.sin(3.0 * x) ** 2
    eigs = sturm_liouville_eigs(x, potential, 0.5, 8)
    gram = eigs.psi.T @ (eigs.mass[:, None] * eigs.psi)
    npt.assert_allclose(gram, np.eye(8), atol=1e-8)
    assert np.all(eigs.psi[0] > 0.0)


def test_slow_spectrum_is_positive_and_follows_the_tail_law(basis):
    assert basis.N == 64
    assert basis.gamma0 > 0.0
    assert np.all(np.diff(basis.gamma) > 0.0)
    assert basis.q_min > 0.0
    assert tail_deviation(basis) < 0.05


def test_spectral_sums_agree_with_the_full_resolvent(basis):
    sums = SpectralSums(basis, 1.0)
    for z in (0.0, 1.0, complex(0.5, 2.0)):
        exact = resolvent_at_layer(basis, z)
        assert abs(sums.S1(z) - exact) < 1e-2 * abs(exact)


def test_X_and_Y_are_the_parts_of_the_resolvent_sum(basis):
    sums = SpectralSums(basis, 0.7)
    lamR, lamI2, k2 = 0.3, 4.0, 0.5
    value = sums.S1(complex(lamR + 2.0 * k2, math.sqrt(lamI2)))
    assert sums.X(lamR, lamI2, k2) == pytest.approx(value.real, rel=1e-10)
    assert sums.Y(lamR, lamI2, k2) == pytest.approx(-value.imag / math.sqrt(lamI2), rel=1e-10)


def test_X_derivative_on_the_real_axis_is_minus_Y(basis):
    sums = SpectralSums(basis, 0.7)
    for k2 in (0.0, 0.4, 3.0):
        assert sums.X_lamR(0.0, 0.0, k2) == pytest.approx(-sums.Y(0.0, 0.0, k2), rel=1e-7)
    assert sums.X_k2(0.0, 1.0, 0.4) == 2.0 * sums.X_lamR(0.0, 1.0, 0.4)


def test_S2_is_minus_the_derivative_of_S1(basis):
    sums = SpectralSums(basis, 1.0)
    z, h = complex(0.8, 1.5), 1e-5
    numeric = -(sums.S1(z + h) - sums.S1(z - h)) / (2 * h)
    assert abs(sums.S2(z) - numeric) < 1e-6 * abs(numeric)


def test_sums_reject_shifts_below_the_spectrum(basis):
    sums = SpectralSums(basis, 1.0)
    with pytest.raises(DomainError, match="gamma0"):
        sums.X(-2.0 * basis.gamma0, 0.0, 0.0)


def test_neville_is_exact_on_a_quadratic():
    h = [0.4, 0.2, 0.1]
    values = [3.0 + 2.0 * s + 5.0 * s * s for s in h]
    result = neville_extrapolate(h, values)
    assert result.value == pytest.approx(3.0, abs=1e-12)
    assert len(result.table) == 3
    with pytest.raises(ValueError):
        neville_extrapolate([0.1], [1.0])
    with pytest.raises(ValueError, match="three"):
        extrapolate_rho0([0.08, 0.04], [1.0, 1.1])


def test_kappa_and_rho0_invert_each_other(profile):
    rho0 = rho0_from_kappa(1.3, profile)
    assert rho0 > 0.0
    assert kappa_from_rho0(rho0, profile) == pytest.approx(1.3, rel=1e-12)


def test_constants_from_the_inner_layer(constants, basis):
    assert constants.kappa_method == "inner"
    assert constants.rho0_star > 0.0
    assert constants.c1_star > 0.0 and constants.c2_star > 0.0
    assert constants.tau_star > 0.0
    assert constants.mu_star == pytest.approx(0.5 * basis.q_min)
    assert tau_star(constants) == pytest.approx(constants.tau_star, rel=1e-12)
    sums = SpectralSums(basis, constants.c1c2)
    assert constants.tau_star == pytest.approx(sums.Y(0.0, 0.0, 0.0), rel=1e-12)


def test_fast_operator_has_one_positive_eigenvalue(steady):
    spectrum = eig_fast(steady)
    assert spectrum.mu0_eps > 0.0 > spectrum.mu1_eps
    assert spectrum.concentration >= 0.9
    assert spectrum.concentration_width < 20.0


@pytest.mark.slow
def test_extrapolated_kappa_agrees_with_the_inner_layer(params, profile, basis, constants):
    extrapolated = build_slep_constants(params, profile=profile, basis=basis)
    assert extrapolated.rho0_error is not None
    assert extrapolated.kappa_star == pytest.approx(constants.kappa_star, rel=0.1)


@pytest.mark.slow
def test_delta_limits_reproduce_c1_and_c2(params, profile, constants):
    samples = sample_fast_spectra(params, profile)
    limits = delta_limit_constants(samples.states, spectra=samples.spectra)
    assert limits.c1_star == pytest.approx(constants.c1_star, rel=0.1)
    assert limits.c2_star == pytest.approx(constants.c2_star, rel=0.1)
    assert len(limits.per_test) == 3
