from __future__ import annotations

from dataclasses import dataclass, replace
from time import perf_counter
from typing import Literal, Sequence
import logging
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from app.config import settings
from app.models import HopfRegime, HopfSolution, RegionLabel, RegionPoint, SlepConstants, XYArgs
from app.services.spectral import SpectralSums
from app.utils.errors import ConsistencyError, DomainError, NumericalFailure, RegimeError

logger = logging.getLogger(__name__)

BOUNDARY_RTOL = 1e-9
TANGENT_TOL = 1e-8
BRACKET_LIMIT = 1e30
INNER_XTOL = 1e-300
INNER_RTOL = 1e-14
NEWTON_MAX_ITERATIONS = 50


@dataclass(slots=True, frozen=True)
class Transversality:
    """Speed of the crossing at the Hopf point and the two parts of its numerator."""
    dlamR_dalpha: float
    I1: float
    I2: float
    denominator: float
    gamma0_bound_holds: bool


@dataclass(slots=True, frozen=True)
class ScanTrace:
    points: int
    alphas: tuple[float, ...]
    differences: tuple[float, ...]


class SlepSystem:
    """Scalar singular-limit eigenvalue equations for a fixed set of constants and tau.

    Everything here is a pure function of (k1, k2, alpha); the instance only
    carries the constants, the spectral sums and tolerances.
    """

    def __init__(
        self,
        constants: SlepConstants,
        tau: float,
        *,
        tail_factor: int | None = None,
        root_tol: float | None = None,
        scan_points: int | None = None,
        scan_max_points: int | None = None,
    ) -> None:
        self.constants = constants
        self.tau = tau
        self.rho0 = constants.rho0_star
        self.sums = SpectralSums(constants.basis, constants.c1c2, tail_factor=tail_factor)
        self.root_tol = root_tol or settings.root_tol
        self.scan_points = scan_points or settings.hopf_scan_points
        self.scan_max_points = scan_max_points or settings.hopf_scan_max_points

    @property
    def gamma0(self) -> float:
        return self.constants.gamma0

    # -- spectral sums -------------------------------------------------------

    def X(self, args: XYArgs) -> float:
        return self.sums.X(args.lamR, args.lamI2, args.k2)

    def Y(self, args: XYArgs) -> float:
        return self.sums.Y(args.lamR, args.lamI2, args.k2)

    def _X0(self, k2: float, lamI2: float = 0.0) -> float:
        return self.sums.X(0.0, lamI2, k2)

    def _Y0(self, k2: float, lamI2: float = 0.0) -> float:
        return self.sums.Y(0.0, lamI2, k2)

    def _require_tau(self, k2: float = 0.0) -> None:
        if not self.tau > self.constants.tau_star:
            raise RegimeError(
                f"tau={self.tau} must exceed tau*={self.constants.tau_star:.8g}",
                tau=self.tau,
                tau_star=self.constants.tau_star,
            )

    def _root(self, func, lo: float, hi: float, *, rtol: float | None = None) -> float:
        return brentq(func, lo, hi, xtol=INNER_XTOL, rtol=max(rtol or self.root_tol, 4 * np.finfo(float).eps), maxiter=500)

    def _increasing_root_in_k2(self, target: float) -> float:
        """k2 > 0 with X(0, 0, k2) = target, for 0 < target < X(0, 0, 0)."""
        func = lambda k2: self._X0(k2) - target
        hi = max(self.gamma0, 1.0)
        while func(hi) > 0.0:
            hi *= 4.0
            if hi > BRACKET_LIMIT:
                raise NumericalFailure("could not bracket the root in k2", target=target)
        return self._root(func, 0.0, hi)

    # -- Turing curve and regions -------------------------------------------

    def is_boundary_k1(self, k1: float) -> bool:
        scale = BOUNDARY_RTOL * self.rho0
        return abs(k1 - 0.5 * self.rho0) <= scale or abs(k1 - self.rho0) <= scale

    def turing_curve_xi(self, k1: float) -> float:
        """Unique k2 with rho0* - 2 k1 - X(0, 0, k2) = 0."""
        if k1 < 0:
            raise DomainError(f"k1 must be >= 0, got {k1}", k1=k1)
        if abs(2.0 * k1 - self.rho0) <= 2.0 * BOUNDARY_RTOL * self.rho0:
            raise RegimeError("BOUNDARY: 2 k1 = rho0* is excluded", k1=k1, rho0_star=self.rho0)
        if k1 > 0.5 * self.rho0:
            raise RegimeError("no curve: region Gamma3", k1=k1, rho0_star=self.rho0)
        xi = self._increasing_root_in_k2(self.rho0 - 2.0 * k1)
        # Newton polish with dH/dk2 = 2 Y(0, 0, k2)
        for _ in range(2):
            residual = self.rho0 - 2.0 * k1 - self._X0(xi)
            slope = 2.0 * self._Y0(xi)
            if slope <= 0.0:
                break
            candidate = xi - residual / slope
            if candidate <= 0.0:
                break
            xi = candidate
        return xi

    def turing_residual(self, k1: float, k2: float) -> float:
        return self.rho0 - 2.0 * k1 - self._X0(k2)

    def turing_curve_slope(self, k1: float) -> float:
        """d xi/d k1 = 1 / Y(0, 0, xi(k1))."""
        return 1.0 / self._Y0(self.turing_curve_xi(k1))

    def turing_root_sensitivity(self, k1: float, k2: float) -> float:
        """d lambda*/d k2 of the real root of F* tracked from lambda = 0."""
        lam = self.complex_slep_root(0.0, "F", k1, k2).real
        s2 = self.sums.S2(lam + 2.0 * k2).real
        return 2.0 * s2 / (self.tau - s2)

    def classify(self, k1: float, k2: float) -> RegionPoint:
        if k1 < 0 or k2 < 0:
            raise DomainError("k1 and k2 must be non-negative", k1=k1, k2=k2)
        if self.is_boundary_k1(k1):
            label = RegionLabel.BOUNDARY
            xi = None
        elif k1 >= self.rho0:
            label = RegionLabel.GAMMA_3_2
            xi = None
        elif k1 > 0.5 * self.rho0:
            label = RegionLabel.GAMMA_3_1
            xi = None
        else:
            xi = self.turing_curve_xi(k1)
            h = self.turing_residual(k1, k2)
            if abs(h) <= 1e-10 * self.rho0:
                label = RegionLabel.BOUNDARY
            elif h > 0.0:
                label = RegionLabel.GAMMA_1
            else:
                label = RegionLabel.GAMMA_2
        return RegionPoint(k1=k1, k2=k2, label=label, xi_k1=xi, delay_verdict=self.delay_robustness(k1, k2, label))

    def delay_robustness(self, k1: float, k2: float, label: RegionLabel | None = None) -> str:
        """Stability of the symmetric layered state over every delay rate alpha."""
        if label is None:
            label = self.classify(k1, k2).label
        if label is RegionLabel.GAMMA_1:
            return "unstable for every alpha"
        if label is RegionLabel.GAMMA_3_2:
            return "stable for every alpha"
        if label is RegionLabel.BOUNDARY:
            return "excluded"
        try:
            regime = self.hopf_regime(k1, k2)
        except (RegimeError, NumericalFailure):
            regime = HopfRegime.NONE
        return f"hopf possible ({regime.value})"

    # -- delayed coupling thresholds ----------------------------------------

    def alpha0(self, k1: float, k2: float) -> float:
        """k1 / (tau - Y(0, 0, k2)): lambda_I2 exists only for alpha below it."""
        self._require_tau()
        return k1 / (self.tau - self._Y0(k2))

    def k2hat_star(self, k1: float) -> float:
        """Unique k2 with X(0, 0, k2) = rho0* - 3 k1/2."""
        if not 0.0 < k1 < 2.0 * self.rho0 / 3.0:
            raise RegimeError("k2hat* needs 0 < k1 < 2 rho0*/3", k1=k1, rho0_star=self.rho0)
        return self._increasing_root_in_k2(self.rho0 - 1.5 * k1)

    def alpha1(self, k1: float, k2: float) -> float:
        """Root of X(0, alpha^2, k2) + 3 k1/2 - rho0* = 0."""
        if not 0.0 < k1 < 2.0 * self.rho0 / 3.0:
            raise RegimeError("no alpha1: needs 0 < k1 < 2 rho0*/3", k1=k1)
        func = lambda alpha: self._X0(k2, alpha * alpha) + 1.5 * k1 - self.rho0
        if func(0.0) <= 0.0:
            raise RegimeError("no alpha1: F1(1, 0+) <= 0 (k2 >= k2hat*)", k1=k1, k2=k2)
        hi = max(self.gamma0, 1.0)
        while func(hi) > 0.0:
            hi *= 4.0
            if hi > BRACKET_LIMIT:
                raise NumericalFailure("could not bracket alpha1", k1=k1, k2=k2)
        return self._root(func, 0.0, hi)

    def alpha2(self, k1: float, k2: float) -> float:
        """Root in (0, alpha0) of Y(0, alpha^2, k2) + k1/(2 alpha) - tau = 0."""
        if k1 <= 0.0:
            raise DomainError("alpha2 needs k1 > 0", k1=k1)
        a0 = self.alpha0(k1, k2)
        func = lambda alpha: self._Y0(k2, alpha * alpha) + k1 / (2.0 * alpha) - self.tau
        return self._root(func, a0 * 1e-14, a0)

    def _in_imaginary_region(self, k1: float, k2: float) -> bool:
        # Gamma2 or Gamma3-1
        if not 0.0 < k1 < self.rho0 or self.is_boundary_k1(k1):
            return False
        return self._X0(k2) - self.rho0 + 2.0 * k1 > 0.0

    def lambda_I1(self, alpha: float, k1: float, k2: float) -> float:
        """Positive root of X(0, lam^2, k2) = rho0* - k1 (1 + alpha^2/(alpha^2 + lam^2))."""
        if not self._in_imaginary_region(k1, k2):
            raise RegimeError("lambda_I1 needs (k1, k2) in Gamma2 or Gamma3-1", k1=k1, k2=k2)
        a2 = alpha * alpha
        func = lambda s: self._X0(k2, s) - self.rho0 + k1 * (1.0 + a2 / (a2 + s))
        return math.sqrt(self._decreasing_root_in_s(func, alpha))

    def lambda_I2(self, alpha: float, k1: float, k2: float) -> float:
        """Positive root of Y(0, lam^2, k2) = tau - k1 alpha/(alpha^2 + lam^2), alpha in (0, alpha0)."""
        a0 = self.alpha0(k1, k2)
        if not 0.0 < alpha < a0:
            raise RegimeError(
                f"lambda_I2 needs alpha in (0, alpha0={a0:.8g})", alpha=alpha, alpha0=a0
            )
        a2 = alpha * alpha
        func = lambda s: self._Y0(k2, s) - self.tau + k1 * alpha / (a2 + s)
        return math.sqrt(self._decreasing_root_in_s(func, alpha))

    def _decreasing_root_in_s(self, func, alpha: float) -> float:
        if func(0.0) <= 0.0:
            raise RegimeError("no sign change for the imaginary root", alpha=alpha)
        hi = max(alpha * alpha, 1e-12)
        while func(hi) > 0.0:
            hi *= 4.0
            if hi > BRACKET_LIMIT:
                raise NumericalFailure("could not bracket the imaginary root", alpha=alpha)
        return brentq(func, 0.0, hi, xtol=INNER_XTOL, rtol=INNER_RTOL, maxiter=500)

    # -- Hopf point ---------------------------------------------------------

    def hopf_regime(self, k1: float, k2: float) -> HopfRegime:
        rho = self.rho0
        if k1 <= 0.0 or k1 >= rho or self.is_boundary_k1(k1):
            return HopfRegime.NONE
        if k1 >= 2.0 * rho / 3.0:
            return HopfRegime.UPPER_BAND
        k2hat = self.k2hat_star(k1)
        if k2 < k2hat:
            return HopfRegime.BELOW_K2HAT
        if k1 < 0.5 * rho:
            return HopfRegime.LOWER_BAND if k2 < self.turing_curve_xi(k1) else HopfRegime.NONE
        return HopfRegime.MIDDLE_BAND

    def _difference(self, alpha: float, k1: float, k2: float) -> float:
        return self.lambda_I1(alpha, k1, k2) - self.lambda_I2(alpha, k1, k2)

    def _scan(self, k1: float, k2: float, a0: float, points: int):
        alphas = a0 * np.logspace(-6.0, math.log10(1.0 - 1e-6), points)
        diffs = np.array([self._difference(alpha, k1, k2) for alpha in alphas])
        crossings: list[float] = []
        multiplicities: list[int] = []
        for i in range(points - 1):
            left, right = diffs[i], diffs[i + 1]
            if left == 0.0:
                crossings.append(float(alphas[i]))
                multiplicities.append(1)
            elif left * right < 0.0:
                root = brentq(
                    lambda alpha: self._difference(alpha, k1, k2),
                    alphas[i],
                    alphas[i + 1],
                    xtol=INNER_XTOL,
                    rtol=max(self.root_tol, 4 * np.finfo(float).eps),
                )
                crossings.append(float(root))
                multiplicities.append(1)
        scale = max(float(np.max(np.abs(diffs))), 1e-300)
        for i in range(1, points - 1):
            value = abs(diffs[i])
            if value <= abs(diffs[i - 1]) and value <= abs(diffs[i + 1]) and diffs[i - 1] * diffs[i + 1] > 0.0:
                touch = minimize_scalar(
                    lambda alpha: self._difference(alpha, k1, k2) ** 2,
                    bounds=(alphas[i - 1], alphas[i + 1]),
                    method="bounded",
                    options={"xatol": 1e-14 * a0},
                )
                if math.sqrt(touch.fun) < TANGENT_TOL * scale:
                    crossings.append(float(touch.x))
                    multiplicities.append(2)
        order = np.argsort(crossings)
        trace = ScanTrace(points=points, alphas=tuple(alphas.tolist()), differences=tuple(diffs.tolist()))
        return [crossings[i] for i in order], [multiplicities[i] for i in order], trace

    def find_hopf(self, k1: float, k2: float, *, with_transversality: bool = True) -> HopfSolution:
        """Largest alpha in (0, alpha0) where lambda_I1 = lambda_I2."""
        started = perf_counter()
        self._require_tau()
        regime = self.hopf_regime(k1, k2)
        if regime is HopfRegime.NONE:
            raise RegimeError("(k1, k2) is outside every Hopf regime", k1=k1, k2=k2)
        a0 = self.alpha0(k1, k2)
        points = self.scan_points
        while True:
            crossings, multiplicities, trace = self._scan(k1, k2, a0, points)
            if crossings or points * 4 > self.scan_max_points:
                break
            logger.warning("No Hopf crossing at %d scan points; escalating", points)
            points *= 4
        if not crossings:
            raise NumericalFailure(
                "no crossing of lambda_I1 and lambda_I2 in (0, alpha0)",
                k1=k1,
                k2=k2,
                regime=regime.value,
                scan_points=trace.points,
                min_abs_difference=float(np.min(np.abs(trace.differences))),
                difference_at_ends=[trace.differences[0], trace.differences[-1]],
            )

        alpha_h = crossings[-1]
        lam_h = 0.5 * (self.lambda_I1(alpha_h, k1, k2) + self.lambda_I2(alpha_h, k1, k2))
        a2 = self.alpha2(k1, k2)
        a1 = None
        k2hat = None
        if k1 < 2.0 * self.rho0 / 3.0:
            k2hat = self.k2hat_star(k1)
            if k2 < k2hat:
                a1 = self.alpha1(k1, k2)
        if regime in (HopfRegime.LOWER_BAND, HopfRegime.MIDDLE_BAND) and not (a2 < lam_h < alpha_h < a0):
            raise ConsistencyError(
                "ordering alpha2 < lambda_IH < alpha_H < alpha0 violated",
                alpha2=a2,
                lamIH=lam_h,
                alpha_H=alpha_h,
                alpha0=a0,
            )
        hopf = HopfSolution(
            k1=k1,
            k2=k2,
            regime=regime,
            alpha_H=alpha_h,
            lamIH=lam_h,
            alpha0=a0,
            alpha2=a2,
            crossings=tuple(crossings),
            multiplicities=tuple(multiplicities),
            alpha1=a1,
            k2hat_star=k2hat,
        )
        if with_transversality:
            speed = self.transversality(hopf, k1, k2)
            hopf = replace(
                hopf,
                dlamR_dalpha=speed.dlamR_dalpha,
                I1=speed.I1,
                I2=speed.I2,
                gamma0_bound_holds=speed.gamma0_bound_holds,
            )
        logger.info(
            "Hopf point k1=%.6g k2=%.6g: alpha_H=%.10g lamIH=%.10g (%d crossings, %s) in %.2fs",
            k1, k2, alpha_h, lam_h, len(crossings), regime.value, perf_counter() - started,
        )
        return hopf

    def transversality(self, hopf: HopfSolution, k1: float, k2: float) -> Transversality:
        """d lambda_R/d alpha at (i lambda_IH, alpha_H) from the implicit function theorem."""
        alpha = hopf.alpha_H
        lam = hopf.lamIH
        D = alpha * alpha + lam * lam
        s2 = self.sums.S2(complex(2.0 * k2, lam))
        weighted_a = self.sums.weighted_A(0.0, lam * lam, k2)
        re_g_lam = -self.tau + alpha * k1 * (alpha * alpha - lam * lam) / D**2 + s2.real
        im_g_lam = -2.0 * k1 * alpha * alpha * lam / D**2 - 2.0 * lam * weighted_a
        re_g_alpha = -2.0 * alpha * k1 * lam * lam / D**2
        im_g_alpha = k1 * lam * (lam * lam - alpha * alpha) / D**2
        denominator = re_g_lam**2 + im_g_lam**2
        i1 = (self.tau - s2.real) * 2.0 * alpha * k1 * lam * lam / D**2
        i2 = 2.0 * k1 * lam * lam * (alpha * alpha - lam * lam) / D**2 * weighted_a
        value = -(re_g_lam * re_g_alpha + im_g_lam * im_g_alpha) / denominator
        if lam < alpha and not i2 > 0.0:
            raise ConsistencyError("I2 must be positive when lambda_IH < alpha_H", I2=i2)
        if i1 <= 0.0:
            logger.warning("I1=%.3e <= 0 at k1=%.6g k2=%.6g: d may be too small for transversality", i1, k1, k2)
        bound = self.gamma0 > hopf.alpha0 / math.sqrt(3.0) - 2.0 * k2
        return Transversality(
            dlamR_dalpha=value,
            I1=i1,
            I2=i2,
            denominator=denominator,
            gamma0_bound_holds=bound,
        )

    # -- complex SLEP equations ---------------------------------------------

    def F_star(self, lam: complex, k1: float, k2: float) -> complex:
        return self.rho0 - 2.0 * k1 - self.tau * lam - self.sums.S1(lam + 2.0 * k2)

    def F_star_derivative(self, lam: complex, k2: float) -> complex:
        return -self.tau + self.sums.S2(lam + 2.0 * k2)

    def G_star(self, lam: complex, alpha: float, k1: float, k2: float) -> complex:
        return (
            self.rho0
            - self.tau * lam
            - k1 * (alpha / (alpha + lam) + 1.0)
            - self.sums.S1(lam + 2.0 * k2)
        )

    def G_star_derivative(self, lam: complex, alpha: float, k1: float, k2: float) -> complex:
        return -self.tau + k1 * alpha / (alpha + lam) ** 2 + self.sums.S2(lam + 2.0 * k2)

    def complex_slep_root(
        self,
        seed: complex,
        target: Literal["F", "G"],
        k1: float,
        k2: float,
        alpha: float | None = None,
    ) -> complex:
        """Newton iteration for a root of F* or G* inside the resolvent region."""
        if target == "G" and (alpha is None or not math.isfinite(alpha)):
            raise DomainError("G* needs a finite alpha")
        lam = complex(seed)
        bound = -self.constants.mu_star
        for iteration in range(NEWTON_MAX_ITERATIONS):
            if not lam.real + 2.0 * k2 > bound:
                raise DomainError(
                    "Newton iterate left the resolvent region",
                    lam=[lam.real, lam.imag],
                    bound=bound,
                )
            if target == "F":
                value = self.F_star(lam, k1, k2)
                slope = self.F_star_derivative(lam, k2)
            else:
                value = self.G_star(lam, alpha, k1, k2)
                slope = self.G_star_derivative(lam, alpha, k1, k2)
            step = value / slope
            lam -= step
            if abs(step) < 1e-14 * (1.0 + abs(lam)):
                logger.debug("complex SLEP root %s after %d iterations", lam, iteration + 1)
                return lam
        raise NumericalFailure("complex SLEP Newton did not converge", target=target, last=[lam.real, lam.imag])

    def transversality_by_tracking(self, hopf: HopfSolution, k1: float, k2: float, delta: float | None = None) -> float:
        """Central difference of Re lambda along the root of G* tracked at alpha_H +/- delta."""
        delta = delta or 1e-5 * hopf.alpha_H
        seed = complex(0.0, hopf.lamIH)
        upper = self.complex_slep_root(seed, "G", k1, k2, hopf.alpha_H + delta)
        lower = self.complex_slep_root(seed, "G", k1, k2, hopf.alpha_H - delta)
        return (upper.real - lower.real) / (2.0 * delta)

    # -- robustness and property checks -------------------------------------

    def slep1_no_crossing_check(
        self,
        k1: float,
        k2: float,
        alpha_grid: Sequence[float],
        lam_grid: Sequence[float] | None = None,
    ) -> dict:
        """Sampled confirmation that the symmetric delayed problem has no zero or imaginary eigenvalue."""
        self._require_tau()
        lam_grid = list(lam_grid) if lam_grid is not None else list(self.gamma0 * np.logspace(-4, 3, 64))
        x_hat = self._X0(0.0)
        worst_margin = math.inf
        worst_at: tuple[float, float] | None = None
        for alpha in alpha_grid:
            for lam in lam_grid:
                margin = self.tau + k1 * alpha / (alpha * alpha + lam * lam) - self._Y0(0.0, lam * lam)
                if margin < worst_margin:
                    worst_margin = margin
                    worst_at = (float(alpha), float(lam))
        report = {
            "k1": k1,
            "k2": k2,
            "x_hat": x_hat,
            "rho0_star": self.rho0,
            "no_zero_eigenvalue": x_hat > self.rho0,
            "min_imaginary_margin": worst_margin,
            "worst_sample": worst_at,
            "samples": len(alpha_grid) * len(lam_grid),
        }
        report["passed"] = bool(report["no_zero_eigenvalue"] and worst_margin > 0.0)
        if not report["passed"]:
            raise ConsistencyError("SLEP-1 no-crossing check failed", **report)
        return report

    def property_suite(self, samples: int = 10) -> dict:
        """Sign, identity and bound checks of X and Y on a sampled (lamR, lamI^2, k2) grid."""
        g0 = self.gamma0
        lam_r = np.linspace(0.0, 2.0 * g0, samples)
        lam_i2 = np.concatenate([[0.0], g0 * g0 * np.logspace(-2, 2, samples - 1)])
        k2s = np.concatenate([[0.0], g0 * np.logspace(-2, 1, samples - 1)])
        h = 1e-5 * g0
        tau_star = self.constants.tau_star
        signs = {"dX_dlamI2": 0, "dY_dlamI2": 0, "dY_dlamR": 0}
        y_bound_violations = 0
        for lr in lam_r:
            for s in lam_i2:
                for k2 in k2s:
                    hs = max(h * h, 1e-6 * s)
                    low_s = max(s - hs, 0.0)
                    high_s = s + hs
                    dx = (self.sums.X(lr, high_s, k2) - self.sums.X(lr, low_s, k2)) / (high_s - low_s)
                    dy = (self.sums.Y(lr, high_s, k2) - self.sums.Y(lr, low_s, k2)) / (high_s - low_s)
                    dyr = (self.sums.Y(lr + h, s, k2) - self.sums.Y(max(lr - h, 0.0), s, k2)) / (lr + h - max(lr - h, 0.0))
                    signs["dX_dlamI2"] += dx >= 0.0
                    signs["dY_dlamI2"] += dy >= 0.0
                    signs["dY_dlamR"] += dyr >= 0.0
                    if (lr, s, k2) != (0.0, 0.0, 0.0) and not self.sums.Y(lr, s, k2) < tau_star:
                        y_bound_violations += 1
        identity = []
        for k2 in k2s:
            dx_dr = (self.sums.X(h, 0.0, k2) - self.sums.X(-h, 0.0, k2)) / (2.0 * h) if g0 + 2 * k2 - h > 0 else float("nan")
            y = self.sums.Y(0.0, 0.0, k2)
            identity.append(abs(dx_dr + y) / y)
        half = [
            abs(0.5 * self.sums.Y_k2(lr, 0.0, k2) - self.sums.Y_lamR(lr, 0.0, k2)) / abs(self.sums.Y_lamR(lr, 0.0, k2))
            for lr in lam_r
            for k2 in k2s
        ]
        checks = {
            "dX_dlamI2_negative": {"passed": signs["dX_dlamI2"] == 0, "violations": int(signs["dX_dlamI2"])},
            "dY_dlamI2_negative": {"passed": signs["dY_dlamI2"] == 0, "violations": int(signs["dY_dlamI2"])},
            "dY_dlamR_negative": {"passed": signs["dY_dlamR"] == 0, "violations": int(signs["dY_dlamR"])},
            "dX_dlamR_equals_minus_Y": {"passed": max(identity) < 1e-6, "max_relative_error": max(identity)},
            "half_dY_dk2_equals_dY_dlamR": {"passed": max(half) < 1e-6, "max_relative_error": max(half)},
            "X000_exceeds_rho0": {"passed": self._X0(0.0) > self.rho0, "X000": self._X0(0.0), "rho0_star": self.rho0},
            "Y_below_tau_star": {"passed": y_bound_violations == 0, "violations": y_bound_violations},
            "Y000_equals_tau_star": {
                "passed": abs(self._Y0(0.0) - tau_star) <= 1e-12 * tau_star,
                "Y000": self._Y0(0.0),
                "tau_star": tau_star,
            },
        }
        return checks

    def large_k2_limits(self, k1: float, alpha: float | None = None) -> dict:
        """Closed forms of the delayed-coupling quantities as k2 -> infinity."""
        rho = self.rho0
        tau = self.tau
        result: dict[str, float | None] = {
            "alpha_H": (rho - k1) / tau if k1 < rho else None,
            "lamIH": math.sqrt((2.0 * k1 - rho) * (rho - k1)) / tau if 0.5 * rho < k1 < rho else None,
            "alpha2": k1 / (2.0 * tau),
            "alpha0": k1 / tau,
            "lambda_I1": None,
            "lambda_I2": None,
        }
        if alpha is not None:
            if 0.5 * rho < k1 < rho:
                result["lambda_I1"] = alpha * math.sqrt((2.0 * k1 - rho) / (rho - k1))
            radicand = k1 * alpha / tau - alpha * alpha
            result["lambda_I2"] = math.sqrt(radicand) if radicand > 0 else None
        return result


__all__ = [
    "Transversality",
    "ScanTrace",
    "SlepSystem",
]
