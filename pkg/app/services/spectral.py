from __future__ import annotations

from dataclasses import dataclass, replace
from time import perf_counter
from typing import Callable, Literal, Sequence
import logging
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from app.config import settings
from app.models import (
    Branch,
    Extrapolation,
    FastSpectrum,
    LayeredStateEps,
    ReducedProfile,
    SlepConstants,
    SpectralBasis,
)
from app.schemas import ModelParams
from app.services.model_core import M_prime, branch_eval, inner_layer_kappa, kinetics, kinetics_determinant
from app.services.reduced_profile import integral_g_left, sample_profile, solve_reduced
from app.services.steady_eps import build_eps_schedule, solve_layered_eps
from app.utils.banded import fv_stiffness
from app.utils.errors import DomainError, NumericalFailure, RegimeError

logger = logging.getLogger(__name__)

CONCENTRATION_LEVEL = 0.9


# ---------------------------------------------------------------------------
# Slow operator -d d^2/dx^2 + q*(x)
# ---------------------------------------------------------------------------


def slow_potential(profile: ReducedProfile, x: np.ndarray) -> np.ndarray:
    """Nodal values of q* = (f_u g_v - f_v g_u)/(-f_u) along (U*, V*).

    The control volume containing x* gets the length-weighted mean of the two
    one-sided values.
    """
    U, V = sample_profile(profile, x)
    k = kinetics(U, V, profile.a, profile.sigma)
    q = kinetics_determinant(U, profile.sigma) / (-k.f_u)

    mass, _, _ = fv_stiffness(x)
    edges = np.concatenate([[x[0]], 0.5 * (x[:-1] + x[1:]), [x[-1]]])
    j = int(np.searchsorted(edges, profile.x_star, side="right") - 1)
    j = min(max(j, 0), x.size - 1)
    u_minus = branch_eval(V[j], Branch.MINUS, profile.a)
    u_plus = branch_eval(V[j], Branch.PLUS, profile.a)
    q_minus = kinetics_determinant(u_minus, profile.sigma) / -kinetics(u_minus, V[j], profile.a, profile.sigma).f_u
    q_plus = kinetics_determinant(u_plus, profile.sigma) / -kinetics(u_plus, V[j], profile.a, profile.sigma).f_u
    theta = (profile.x_star - edges[j]) / mass[j]
    q = np.array(q, dtype=float)
    q[j] = theta * q_minus + (1.0 - theta) * q_plus
    return q


def point_probe(x: np.ndarray, x_star: float) -> np.ndarray:
    """Weights evaluating a nodal function at x*.

    Average of the linear extrapolations from the two nodes on each side, so a
    kink or potential jump inside the straddling cell does not bias the value.
    """
    n = x.size
    j = int(np.searchsorted(x, x_star, side="right") - 1)
    j = min(max(j, 1), n - 3)
    probe = np.zeros(n)
    h_left = x[j] - x[j - 1]
    t_left = (x_star - x[j]) / h_left
    probe[j - 1] += -0.5 * t_left
    probe[j] += 0.5 * (1.0 + t_left)
    h_right = x[j + 2] - x[j + 1]
    t_right = (x_star - x[j + 1]) / h_right
    probe[j + 1] += 0.5 * (1.0 - t_right)
    probe[j + 2] += 0.5 * t_right
    return probe


@dataclass(slots=True, frozen=True)
class SturmLiouvilleEigs:
    gamma: np.ndarray
    psi: np.ndarray
    x: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray


def sturm_liouville_eigs(x: np.ndarray, potential: np.ndarray, d: float, modes: int) -> SturmLiouvilleEigs:
    """Lowest eigenpairs of -d u'' + q u with Neumann ends on the grid x.

    The symmetrized matrix M^-1/2 (d K + M q) M^-1/2 is tridiagonal; eigenvectors
    are mapped back and normalized in the lumped (trapezoid) inner product with
    the sign fixed by psi_n(0) > 0.
    """
    mass, k_diag, k_off = fv_stiffness(x)
    root = np.sqrt(mass)
    diag = d * k_diag / mass + potential
    offdiag = d * k_off / (root[:-1] * root[1:])
    gamma, vectors = eigh_tridiagonal(diag, offdiag, select="i", select_range=(0, modes - 1))
    psi = vectors / root[:, None]
    signs = np.where(psi[0] < 0.0, -1.0, 1.0)
    psi = psi * signs
    return SturmLiouvilleEigs(gamma=gamma, psi=psi, x=x, diag=diag, offdiag=offdiag, mass=mass)


def eig_slow(
    profile: ReducedProfile,
    d: float | None = None,
    N_target: int | None = None,
    *,
    nodes: int | None = None,
) -> SpectralBasis:
    """Eigenpairs of the slow limiting operator along the reduced profile."""
    started = perf_counter()
    d = profile.d if d is None else d
    modes = N_target or settings.slow_modes
    nodes = nodes or settings.slow_nodes
    if modes * 4 > nodes:
        raise ValueError(f"{modes} modes need at least {4 * modes} nodes")

    x = np.linspace(0.0, profile.ell, nodes)
    q = slow_potential(profile, x)
    if not np.all(q > 0.0):
        raise RegimeError(
            "slow potential is not positive along the reduced profile",
            q_min=float(q.min()),
        )
    eigs = sturm_liouville_eigs(x, q, d, modes)
    probe = point_probe(x, profile.x_star)
    psi_at_xstar = probe @ eigs.psi
    if not eigs.gamma[0] > 0.0:
        raise RegimeError("lowest slow eigenvalue is not positive", gamma0=float(eigs.gamma[0]))

    basis = SpectralBasis(
        gamma=eigs.gamma,
        psi_at_xstar=psi_at_xstar,
        d=d,
        ell=profile.ell,
        x_star=profile.x_star,
        gamma_bar=float(np.sum(eigs.mass * q) / profile.ell),
        q_min=float(q.min()),
        x=x,
        diag=eigs.diag,
        offdiag=eigs.offdiag,
        mass=eigs.mass,
        probe=probe,
    )
    logger.info(
        "Slow spectrum: %d modes on %d nodes, gamma0=%.8f in %.2fs",
        modes, nodes, basis.gamma0, perf_counter() - started,
    )
    return basis


def tail_deviation(basis: SpectralBasis, start_fraction: float = 0.5) -> float:
    """Largest relative gap between computed gamma_n and gamma_bar + d (n pi/ell)^2 on the upper modes."""
    n = np.arange(basis.N)
    model = basis.gamma_bar + basis.tail_kappa * n**2
    upper = n >= int(start_fraction * basis.N)
    return float(np.max(np.abs(basis.gamma[upper] - model[upper]) / model[upper]))


def resolvent_at_layer(basis: SpectralBasis, z: complex) -> complex:
    """Sum over all discrete modes of psi_n(x*)^2/(gamma_n + z) by one tridiagonal solve."""
    b = basis.probe / np.sqrt(basis.mass)
    shifted = basis.diag.astype(complex) + z
    ab = np.zeros((3, basis.diag.size), dtype=complex)
    ab[0, 1:] = basis.offdiag
    ab[1] = shifted
    ab[2, :-1] = basis.offdiag
    y = solve_banded((1, 1), ab, b.astype(complex))
    value = complex(b @ y)
    return value.real if isinstance(z, (int, float)) else value


# ---------------------------------------------------------------------------
# Spectral sums with asymptotic tails
# ---------------------------------------------------------------------------


class SpectralSums:
    """Weighted resolvent sums S(z) = sum_n w_n/(gamma_n + z) at the layer.

    Computed modes are extended with the asymptotic law gamma_n ~ gamma_bar +
    d (n pi/ell)^2, psi_n(x*)^2 ~ (2/ell) cos^2(n pi x*/ell) up to
    tail_factor * N; beyond that the sum is replaced by its integral with
    cos^2 averaged to 1/2, evaluated in closed form.
    """

    def __init__(self, basis: SpectralBasis, c1c2: float, *, tail_factor: int | None = None) -> None:
        tail_factor = tail_factor or settings.tail_factor
        self.basis = basis
        self.c1c2 = c1c2
        self.kappa = basis.tail_kappa
        self.shift = basis.gamma_bar
        n_total = max(tail_factor, 1) * basis.N
        n = np.arange(basis.N, n_total)
        model_gamma = self.shift + self.kappa * n**2
        model_psi2 = (2.0 / basis.ell) * np.cos(n * np.pi * basis.x_star / basis.ell) ** 2
        self.gamma = np.concatenate([basis.gamma, model_gamma])
        self.weights = c1c2 * np.concatenate([basis.psi_at_xstar**2, model_psi2])
        self.tail_start = n_total - 0.5
        self.tail_weight = c1c2 / basis.ell

    @property
    def gamma0(self) -> float:
        return float(self.gamma[0])

    def _check(self, shift: float) -> None:
        if not self.gamma0 + shift > 0.0:
            raise DomainError(
                f"resolvent sums need gamma0 + lamR + 2 k2 > 0, got {self.gamma0 + shift:.6g}",
                gamma0=self.gamma0,
                shift=shift,
            )

    # closed-form tail: w/ell * integral_{n0}^inf dn / (kappa n^2 + shift + z)
    def _remainder(self, z: complex) -> complex:
        zp = complex(z) + self.shift
        root = np.sqrt(self.kappa * zp)
        t = self.tail_start * np.sqrt(self.kappa / zp)
        return complex(self.tail_weight * (np.pi / 2.0 - np.arctan(t)) / root)

    def _remainder_derivative(self, z: complex) -> complex:
        zp = complex(z) + self.shift
        t = self.tail_start * np.sqrt(self.kappa / zp)
        first = -0.5 * self.kappa**-0.5 * zp**-1.5 * (np.pi / 2.0 - np.arctan(t))
        second = 0.5 * self.tail_start / (zp * zp * (1.0 + t * t))
        return complex(self.tail_weight * (first + second))

    def _tail_lam(self, lam_r_total: float, lamI: float) -> float:
        return max(lamI, 1e-6 * abs(lam_r_total + self.shift) + 1e-300)

    def S1(self, z: complex) -> complex:
        """sum w_n/(gamma_n + z) for complex z."""
        return complex(np.sum(self.weights / (self.gamma + z))) + self._remainder(z)

    def S2(self, z: complex) -> complex:
        """sum w_n/(gamma_n + z)^2 = -dS1/dz."""
        return complex(np.sum(self.weights / (self.gamma + z) ** 2)) - self._remainder_derivative(z)

    def X(self, lamR: float, lamI2: float, k2: float) -> float:
        zr = lamR + 2.0 * k2
        self._check(zr)
        A = self.gamma + zr
        explicit = float(np.sum(self.weights * A / (A * A + lamI2)))
        return explicit + self._remainder(complex(zr, math.sqrt(lamI2))).real

    def Y(self, lamR: float, lamI2: float, k2: float) -> float:
        zr = lamR + 2.0 * k2
        self._check(zr)
        A = self.gamma + zr
        explicit = float(np.sum(self.weights / (A * A + lamI2)))
        lam = self._tail_lam(zr, math.sqrt(lamI2))
        return explicit - self._remainder(complex(zr, lam)).imag / lam

    def X_lamR(self, lamR: float, lamI2: float, k2: float) -> float:
        zr = lamR + 2.0 * k2
        self._check(zr)
        A = self.gamma + zr
        explicit = float(np.sum(self.weights * (lamI2 - A * A) / (A * A + lamI2) ** 2))
        return explicit + self._remainder_derivative(complex(zr, math.sqrt(lamI2))).real

    def X_k2(self, lamR: float, lamI2: float, k2: float) -> float:
        return 2.0 * self.X_lamR(lamR, lamI2, k2)

    def Y_lamR(self, lamR: float, lamI2: float, k2: float) -> float:
        zr = lamR + 2.0 * k2
        self._check(zr)
        A = self.gamma + zr
        explicit = float(np.sum(-2.0 * self.weights * A / (A * A + lamI2) ** 2))
        lam = self._tail_lam(zr, math.sqrt(lamI2))
        return explicit - self._remainder_derivative(complex(zr, lam)).imag / lam

    def Y_k2(self, lamR: float, lamI2: float, k2: float) -> float:
        return 2.0 * self.Y_lamR(lamR, lamI2, k2)

    def X_lamI2(self, lamR: float, lamI2: float, k2: float) -> float:
        zr = lamR + 2.0 * k2
        self._check(zr)
        A = self.gamma + zr
        explicit = float(np.sum(-self.weights * A / (A * A + lamI2) ** 2))
        lam = self._tail_lam(zr, math.sqrt(lamI2))
        return explicit - self._remainder_derivative(complex(zr, lam)).imag / (2.0 * lam)

    def weighted_A(self, lamR: float, lamI2: float, k2: float) -> float:
        """sum w_n A_n/(A_n^2 + lamI^2)^2 with A_n = gamma_n + lamR + 2 k2."""
        return -self.X_lamI2(lamR, lamI2, k2)


# ---------------------------------------------------------------------------
# Fast operator eps^2 d^2/dx^2 + f_u
# ---------------------------------------------------------------------------


def eig_fast(
    state: LayeredStateEps,
    modes: int = 4,
    *,
    require_single_positive: bool = True,
) -> FastSpectrum:
    """Rightmost eigenpairs of eps^2 d^2/dx^2 + f_u^eps with Neumann ends."""
    x = state.x
    mass, k_diag, k_off = fv_stiffness(x)
    root = np.sqrt(mass)
    eps2 = state.eps**2
    diag = -eps2 * k_diag / mass + state.f_u
    offdiag = -eps2 * k_off / (root[:-1] * root[1:])
    n = x.size
    mu, vectors = eigh_tridiagonal(diag, offdiag, select="i", select_range=(n - modes, n - 1))
    order = np.argsort(mu)[::-1]
    mu = mu[order]
    phi = vectors[:, order] / root[:, None]
    phi0 = phi[:, 0]
    if phi0[np.argmax(np.abs(phi0))] < 0.0:
        phi0 = -phi0

    nonnegative = int(np.sum(mu >= 0.0))
    if require_single_positive and (mu[0] <= 0.0 or nonnegative > 1):
        raise NumericalFailure(
            "fast operator must have exactly one positive eigenvalue; refine the grid",
            eps=state.eps,
            mu=mu.tolist(),
            nodes=n,
        )

    width, fraction = _concentration(x, mass, phi0, state.x_star, state.eps)
    return FastSpectrum(
        eps=state.eps,
        mu=mu,
        x=x,
        phi0=phi0,
        concentration=fraction,
        concentration_width=width,
    )


def _concentration(x, mass, phi, x_star: float, eps: float) -> tuple[float, float]:
    """Smallest C (in units of eps) holding CONCENTRATION_LEVEL of the phi^2 mass, and that fraction."""
    if not math.isfinite(x_star):
        return math.inf, 0.0
    density = mass * phi * phi
    distance = np.abs(x - x_star)
    order = np.argsort(distance)
    cumulative = np.cumsum(density[order]) / np.sum(density)
    k = int(np.searchsorted(cumulative, CONCENTRATION_LEVEL))
    k = min(k, x.size - 1)
    return float(distance[order][k] / eps), float(cumulative[k])


# ---------------------------------------------------------------------------
# eps -> 0 limits
# ---------------------------------------------------------------------------


def neville_extrapolate(h: Sequence[float], values: Sequence[float]) -> Extrapolation:
    """Polynomial extrapolation of values(h) to h = 0 with its Neville table."""
    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=float)
    n = h.size
    if n < 2:
        raise ValueError("extrapolation needs at least two samples")
    table = [[float(value)] for value in values]
    for i in range(1, n):
        for k in range(1, i + 1):
            upper = table[i][k - 1]
            lower = table[i - 1][k - 1]
            table[i].append(upper + (upper - lower) * h[i] / (h[i - k] - h[i]))
    value = table[-1][-1]
    error = abs(table[-1][-1] - table[-1][-2])
    first = np.diff(values)
    monotone = bool(np.all(first > 0) or np.all(first < 0))
    corrections = [abs(table[-1][k] - table[-1][k - 1]) for k in range(1, n)]
    shrinking = all(later <= earlier for earlier, later in zip(corrections, corrections[1:]))
    return Extrapolation(
        value=value,
        error=error,
        reliable=monotone and shrinking,
        table=tuple(tuple(row) for row in table),
    )


def extrapolate_rho0(eps_values: Sequence[float], rho_values: Sequence[float]) -> Extrapolation:
    """Limit of rho(eps) = mu0/eps as eps -> 0 from at least three geometric samples."""
    if len(eps_values) < 3:
        raise ValueError("rho0 extrapolation needs at least three eps samples")
    result = neville_extrapolate(eps_values, rho_values)
    if not result.reliable:
        logger.warning(
            "Unreliable rho0 extrapolation table for eps=%s: %s",
            list(eps_values), [round(value, 10) for value in rho_values],
        )
    return result


def default_test_functions(ell: float) -> list[Callable[[np.ndarray], np.ndarray]]:
    return [
        lambda x: np.ones_like(x),
        lambda x: 1.0 + x / ell,
        lambda x: np.cos(np.pi * x / (3.0 * ell)),
    ]


@dataclass(slots=True, frozen=True)
class DeltaLimit:
    c1_star: float
    c2_star: float
    c1_error: float
    c2_error: float
    per_test: tuple[tuple[float, float], ...]


def delta_limit_constants(
    states: Sequence[LayeredStateEps],
    tests: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None,
    *,
    spectra: Sequence[FastSpectrum] | None = None,
) -> DeltaLimit:
    """c1*, c2* from the weak limits of -f_v phi0/sqrt(eps) and g_u phi0/sqrt(eps)."""
    if len(states) < 2:
        raise ValueError("delta limits need at least two eps values")
    tests = list(tests) if tests is not None else default_test_functions(states[0].ell)
    spectra = list(spectra) if spectra is not None else [eig_fast(state) for state in states]
    eps = [state.eps for state in states]

    per_test = []
    errors1, errors2 = [], []
    for test in tests:
        c1_samples, c2_samples = [], []
        usable = True
        for state, spectrum in zip(states, spectra):
            mass, _, _ = fv_stiffness(state.x)
            w = test(state.x)
            w_star = float(np.interp(state.x_star, state.x, w))
            if abs(w_star) < 1e-8 * float(np.max(np.abs(w))):
                usable = False
                break
            scaled = spectrum.phi0 / math.sqrt(state.eps)
            c1_samples.append(float(np.sum(mass * -state.f_v * scaled * w)) / w_star)
            c2_samples.append(float(np.sum(mass * state.g_u * scaled * w)) / w_star)
        if not usable:
            logger.debug("Skipping a test function that vanishes at x*")
            continue
        c1 = neville_extrapolate(eps, c1_samples)
        c2 = neville_extrapolate(eps, c2_samples)
        per_test.append((c1.value, c2.value))
        errors1.append(c1.error)
        errors2.append(c2.error)

    if not per_test:
        raise NumericalFailure("every test function vanishes at x*")
    values = np.array(per_test)
    c1_mean, c2_mean = values.mean(axis=0)
    spread = values.max(axis=0) - values.min(axis=0)
    return DeltaLimit(
        c1_star=float(c1_mean),
        c2_star=float(c2_mean),
        c1_error=float(max(max(errors1), spread[0])),
        c2_error=float(max(max(errors2), spread[1])),
        per_test=tuple(per_test),
    )


def jump_factor(a: float, v_hat: float) -> float:
    """h+ - h- + (h-/(1+h-^2) - h+/(1+h+^2)) v_hat, the jump of g across the layer."""
    h_minus = branch_eval(v_hat, Branch.MINUS, a)
    h_plus = branch_eval(v_hat, Branch.PLUS, a)
    return h_plus - h_minus + (h_minus / (1.0 + h_minus**2) - h_plus / (1.0 + h_plus**2)) * v_hat


def kappa_from_rho0(rho0: float, profile: ReducedProfile) -> float:
    """Invert rho0* = kappa*^2 M'(v_hat) (integral of g over (0, x*)) / d."""
    product = M_prime(profile.v_hat, profile.a, profile.sigma) * integral_g_left(profile)
    kappa2 = rho0 * profile.d / product
    if not kappa2 > 0.0:
        raise NumericalFailure("kappa*^2 from rho0* is not positive", rho0=rho0, product=product)
    return math.sqrt(kappa2)


def rho0_from_kappa(kappa: float, profile: ReducedProfile) -> float:
    return kappa**2 * M_prime(profile.v_hat, profile.a, profile.sigma) * integral_g_left(profile) / profile.d


def tau_star(constants: SlepConstants, *, tail_factor: int | None = None) -> float:
    """tau* = sum c1* c2* psi_n(x*)^2 / gamma_n^2, i.e. Y(0, 0, 0)."""
    return SpectralSums(constants.basis, constants.c1c2, tail_factor=tail_factor).Y(0.0, 0.0, 0.0)


@dataclass(slots=True, frozen=True)
class FastSamples:
    states: tuple[LayeredStateEps, ...]
    spectra: tuple[FastSpectrum, ...]

    @property
    def eps(self) -> list[float]:
        return [state.eps for state in self.states]

    @property
    def rho(self) -> list[float]:
        return [spectrum.rho_eps for spectrum in self.spectra]


def sample_fast_spectra(
    params: ModelParams,
    profile: ReducedProfile,
    eps_samples: Sequence[float] | None = None,
    *,
    nodes: int | None = None,
) -> FastSamples:
    """Layered states and fast spectra at decreasing eps, continued one from the next."""
    eps_samples = list(eps_samples or settings.eps_sample_values)
    states, spectra = [], []
    for eps in eps_samples:
        schedule = build_eps_schedule(eps, start=max(settings.eps_start, eps_samples[0]))
        state = solve_layered_eps(params.with_updates(eps=eps), profile, schedule, nodes=nodes)
        states.append(state)
        spectra.append(eig_fast(state))
        logger.debug("eps=%.5g: mu0=%.6e rho=%.8f", eps, spectra[-1].mu0_eps, spectra[-1].rho_eps)
    return FastSamples(states=tuple(states), spectra=tuple(spectra))


def build_slep_constants(
    params: ModelParams,
    *,
    kappa_method: Literal["extrapolated", "inner"] = "extrapolated",
    profile: ReducedProfile | None = None,
    basis: SpectralBasis | None = None,
    eps_samples: Sequence[float] | None = None,
    tail_factor: int | None = None,
) -> SlepConstants:
    """Assemble rho0*, kappa*, c1*, c2*, tau*, mu* for the parameters' (a, sigma, d, ell)."""
    started = perf_counter()
    profile = profile or solve_reduced(params)
    basis = basis or eig_slow(profile)
    rho0_error: float | None = None
    if kappa_method == "inner":
        kappa = inner_layer_kappa(params.a, params.sigma, profile.v_hat)
        rho0 = rho0_from_kappa(kappa, profile)
    else:
        samples = sample_fast_spectra(params, profile, eps_samples)
        extrapolation = extrapolate_rho0(samples.eps, samples.rho)
        rho0 = extrapolation.value
        rho0_error = extrapolation.error
        kappa = kappa_from_rho0(rho0, profile)
    if not rho0 > 0.0:
        raise NumericalFailure("rho0* is not positive", rho0=rho0)

    c1 = -kappa * M_prime(profile.v_hat, params.a, params.sigma)
    c2 = kappa * jump_factor(params.a, profile.v_hat)
    constants = SlepConstants(
        rho0_star=rho0,
        kappa_star=kappa,
        c1_star=c1,
        c2_star=c2,
        tau_star=0.0,
        mu_star=0.5 * basis.q_min,
        basis=basis,
        x_star=profile.x_star,
        v_hat=profile.v_hat,
        a=params.a,
        sigma=params.sigma,
        d=basis.d,
        ell=params.ell,
        kappa_method=kappa_method,
        rho0_error=rho0_error,
    )
    constants = replace(constants, tau_star=tau_star(constants, tail_factor=tail_factor))
    logger.info(
        "SLEP constants (%s): rho0*=%.8f kappa*=%.6f c1*c2*=%.6f tau*=%.6f gamma0=%.6f in %.2fs",
        kappa_method, constants.rho0_star, kappa, constants.c1c2, constants.tau_star,
        constants.gamma0, perf_counter() - started,
    )
    return constants


__all__ = [
    "slow_potential",
    "point_probe",
    "sturm_liouville_eigs",
    "eig_slow",
    "tail_deviation",
    "resolvent_at_layer",
    "SpectralSums",
    "eig_fast",
    "neville_extrapolate",
    "extrapolate_rho0",
    "default_test_functions",
    "DeltaLimit",
    "delta_limit_constants",
    "jump_factor",
    "kappa_from_rho0",
    "rho0_from_kappa",
    "tau_star",
    "FastSamples",
    "sample_fast_spectra",
    "build_slep_constants",
]
