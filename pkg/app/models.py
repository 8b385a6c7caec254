"""
Data models for the layered-state toolkit.

All entities are immutable once constructed; numpy arrays inside them are
treated as read-only by every service.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np


class Branch(StrEnum):
    MINUS = "minus"
    ZERO = "zero"
    PLUS = "plus"


@dataclass(slots=True, frozen=True)
class KineticsEval:
    """Kinetics values and partial derivatives at (u, v)."""
    f: np.ndarray | float
    g: np.ndarray | float
    f_u: np.ndarray | float
    f_v: np.ndarray | float
    g_u: np.ndarray | float
    g_v: np.ndarray | float

    @property
    def det(self) -> np.ndarray | float:
        return self.f_u * self.g_v - self.f_v * self.g_u


@dataclass(slots=True, frozen=True)
class NullclineBranches:
    """Fold points of the sigmoidal f-nullcline v = (a-u)(1+u^2)/(4u)."""
    a: float
    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    def domain(self, branch: Branch) -> tuple[float, float]:
        if branch is Branch.MINUS:
            return self.v_lo, np.inf
        if branch is Branch.ZERO:
            return self.v_lo, self.v_hi
        return 0.0, self.v_hi

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "u_lo": self.u_lo,
            "u_hi": self.u_hi,
            "v_lo": self.v_lo,
            "v_hi": self.v_hi,
        }


@dataclass(slots=True, frozen=True)
class ReducedProfile:
    """The eps = 0 layered solution.

    V* is stored piecewise: the left piece on [0, x*] follows h-, the right piece
    on [x*, ell] follows h+. Both pieces include x* and carry V' for Hermite
    interpolation.
    """
    a: float
    sigma: float
    d: float
    ell: float
    x_star: float
    v_hat: float
    x_left: np.ndarray
    V_left: np.ndarray
    dV_left: np.ndarray
    x_right: np.ndarray
    V_right: np.ndarray
    dV_right: np.ndarray
    slope_mismatch: float

    @property
    def V0(self) -> float:
        return float(self.V_left[0])

    @property
    def V_ell(self) -> float:
        return float(self.V_right[-1])

    @property
    def slope_at_layer(self) -> float:
        return 0.5 * float(self.dV_left[-1] + self.dV_right[0])

    @property
    def grid(self) -> np.ndarray:
        return np.concatenate([self.x_left, self.x_right[1:]])

    @property
    def V(self) -> np.ndarray:
        return np.concatenate([self.V_left, self.V_right[1:]])


@dataclass(slots=True, frozen=True)
class LayeredStateEps:
    """Steady layered state of the decoupled system at eps > 0 with its linearization."""
    eps: float
    a: float
    sigma: float
    d: float
    ell: float
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    f_u: np.ndarray
    f_v: np.ndarray
    g_u: np.ndarray
    g_v: np.ndarray
    newton_residual: float
    x_star: float

    @property
    def nodes(self) -> int:
        return int(self.x.size)


@dataclass(slots=True, frozen=True)
class SpectralBasis:
    """Leading eigenpairs of -d d^2/dx^2 + q*(x) with Neumann conditions.

    ``diag``/``offdiag``/``mass`` describe the discrete operator so that the
    resolvent at x* can be evaluated without truncation. ``probe`` maps nodal
    values to the value at x*.
    """
    gamma: np.ndarray
    psi_at_xstar: np.ndarray
    d: float
    ell: float
    x_star: float
    gamma_bar: float
    q_min: float
    x: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray
    probe: np.ndarray

    @property
    def N(self) -> int:
        return int(self.gamma.size)

    @property
    def gamma0(self) -> float:
        return float(self.gamma[0])

    @property
    def tail_kappa(self) -> float:
        """Coefficient of n^2 in the asymptotic eigenvalue law."""
        return self.d * (np.pi / self.ell) ** 2


@dataclass(slots=True, frozen=True)
class FastSpectrum:
    """Leading eigenpairs of eps^2 d^2/dx^2 + f_u^eps on a layered state."""
    eps: float
    mu: np.ndarray
    x: np.ndarray
    phi0: np.ndarray
    concentration: float
    concentration_width: float

    @property
    def mu0_eps(self) -> float:
        return float(self.mu[0])

    @property
    def mu1_eps(self) -> float:
        return float(self.mu[1])

    @property
    def rho_eps(self) -> float:
        return self.mu0_eps / self.eps


@dataclass(slots=True, frozen=True)
class Extrapolation:
    """Polynomial extrapolation to eps = 0 with its Neville table."""
    value: float
    error: float
    reliable: bool
    table: tuple[tuple[float, ...], ...]


@dataclass(slots=True, frozen=True)
class SlepConstants:
    """Scalar inputs of the singular-limit eigenvalue equations."""
    rho0_star: float
    kappa_star: float
    c1_star: float
    c2_star: float
    tau_star: float
    mu_star: float
    basis: SpectralBasis
    x_star: float
    v_hat: float
    a: float
    sigma: float
    d: float
    ell: float
    kappa_method: str = "extrapolated"
    rho0_error: float | None = None

    @property
    def c1c2(self) -> float:
        return self.c1_star * self.c2_star

    @property
    def gamma0(self) -> float:
        return self.basis.gamma0

    def to_dict(self) -> dict:
        return {
            "rho0_star": self.rho0_star,
            "kappa_star": self.kappa_star,
            "c1_star": self.c1_star,
            "c2_star": self.c2_star,
            "c1c2": self.c1c2,
            "tau_star": self.tau_star,
            "mu_star": self.mu_star,
            "gamma0": self.gamma0,
            "x_star": self.x_star,
            "v_hat": self.v_hat,
            "rho0_error": self.rho0_error,
            "kappa_method": self.kappa_method,
        }

    def to_arrays(self) -> dict[str, np.ndarray]:
        """Flatten into arrays for ``numpy.savez``."""
        scalars = {
            "rho0_star": self.rho0_star,
            "kappa_star": self.kappa_star,
            "c1_star": self.c1_star,
            "c2_star": self.c2_star,
            "tau_star": self.tau_star,
            "mu_star": self.mu_star,
            "x_star": self.x_star,
            "v_hat": self.v_hat,
            "a": self.a,
            "sigma": self.sigma,
            "d": self.d,
            "ell": self.ell,
            "kappa_method": self.kappa_method,
            "rho0_error": self.rho0_error,
            "basis_d": self.basis.d,
            "basis_ell": self.basis.ell,
            "basis_x_star": self.basis.x_star,
            "gamma_bar": self.basis.gamma_bar,
            "q_min": self.basis.q_min,
        }
        return {
            "scalars": np.array(json.dumps(scalars, sort_keys=True)),
            "gamma": self.basis.gamma,
            "psi_at_xstar": self.basis.psi_at_xstar,
            "x": self.basis.x,
            "diag": self.basis.diag,
            "offdiag": self.basis.offdiag,
            "mass": self.basis.mass,
            "probe": self.basis.probe,
        }

    @classmethod
    def from_arrays(cls, arrays) -> "SlepConstants":
        scalars = json.loads(str(arrays["scalars"]))
        basis = SpectralBasis(
            gamma=np.asarray(arrays["gamma"]),
            psi_at_xstar=np.asarray(arrays["psi_at_xstar"]),
            d=scalars["basis_d"],
            ell=scalars["basis_ell"],
            x_star=scalars["basis_x_star"],
            gamma_bar=scalars["gamma_bar"],
            q_min=scalars["q_min"],
            x=np.asarray(arrays["x"]),
            diag=np.asarray(arrays["diag"]),
            offdiag=np.asarray(arrays["offdiag"]),
            mass=np.asarray(arrays["mass"]),
            probe=np.asarray(arrays["probe"]),
        )
        return cls(
            rho0_star=scalars["rho0_star"],
            kappa_star=scalars["kappa_star"],
            c1_star=scalars["c1_star"],
            c2_star=scalars["c2_star"],
            tau_star=scalars["tau_star"],
            mu_star=scalars["mu_star"],
            basis=basis,
            x_star=scalars["x_star"],
            v_hat=scalars["v_hat"],
            a=scalars["a"],
            sigma=scalars["sigma"],
            d=scalars["d"],
            ell=scalars["ell"],
            kappa_method=scalars["kappa_method"],
            rho0_error=scalars["rho0_error"],
        )


@dataclass(slots=True, frozen=True)
class XYArgs:
    """Arguments of the spectral sums X and Y."""
    lamR: float
    lamI2: float
    k2: float

    def shift(self) -> float:
        return self.lamR + 2.0 * self.k2


class RegionLabel(StrEnum):
    GAMMA_1 = "Gamma1"
    GAMMA_2 = "Gamma2"
    GAMMA_3_1 = "Gamma3-1"
    GAMMA_3_2 = "Gamma3-2"
    BOUNDARY = "BOUNDARY"


@dataclass(slots=True, frozen=True)
class RegionPoint:
    k1: float
    k2: float
    label: RegionLabel
    xi_k1: float | None = None
    delay_verdict: str = ""

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "k2": self.k2,
            "label": self.label.value,
            "xi_k1": self.xi_k1,
            "delay_verdict": self.delay_verdict,
        }


class HopfRegime(StrEnum):
    BELOW_K2HAT = "below_k2hat"
    LOWER_BAND = "lower_band"
    MIDDLE_BAND = "middle_band"
    UPPER_BAND = "upper_band"
    NONE = "none"


@dataclass(slots=True, frozen=True)
class HopfSolution:
    """Purely imaginary crossing of the delayed antisymmetric problem."""
    k1: float
    k2: float
    regime: HopfRegime
    alpha_H: float
    lamIH: float
    alpha0: float
    alpha2: float
    crossings: tuple[float, ...]
    multiplicities: tuple[int, ...]
    alpha1: float | None = None
    k2hat_star: float | None = None
    dlamR_dalpha: float | None = None
    I1: float | None = None
    I2: float | None = None
    gamma0_bound_holds: bool | None = None

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "k2": self.k2,
            "regime": self.regime.value,
            "alpha_H": self.alpha_H,
            "lamIH": self.lamIH,
            "alpha0": self.alpha0,
            "alpha2": self.alpha2,
            "alpha1": self.alpha1,
            "k2hat_star": self.k2hat_star,
            "crossings": list(self.crossings),
            "multiplicities": list(self.multiplicities),
            "dlamR_dalpha": self.dlamR_dalpha,
            "I1": self.I1,
            "I2": self.I2,
            "gamma0_bound_holds": self.gamma0_bound_holds,
        }


class Verdict(StrEnum):
    DECAY = "DECAY"
    GROWTH = "GROWTH"
    SUSTAINED_OSCILLATION = "SUSTAINED_OSCILLATION"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(slots=True, frozen=True)
class DiagnosticsSeries:
    """Observables recorded along a trajectory and the verdict derived from them."""
    times: np.ndarray
    asym_norm: np.ndarray
    dev_norm: np.ndarray
    observable: str
    peak_count: int
    log_slope: float
    amplitude_drift: float
    growth_ratio: float
    verdict: Verdict
    snapshot_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    snapshots: np.ndarray = field(default_factory=lambda: np.empty((0, 0, 0)))

    def to_dict(self) -> dict:
        return {
            "observable": self.observable,
            "peak_count": self.peak_count,
            "log_slope": self.log_slope,
            "amplitude_drift": self.amplitude_drift,
            "growth_ratio": self.growth_ratio,
            "verdict": self.verdict.value,
            "samples": int(self.times.size),
        }


@dataclass(slots=True, frozen=True)
class ModeSplit:
    """Symmetric and antisymmetric parts of a two-reactor perturbation."""
    ws: np.ndarray
    wa: np.ndarray
    zs: np.ndarray
    za: np.ndarray

    @classmethod
    def from_reactors(cls, w1, z1, w2, z2) -> "ModeSplit":
        return cls(
            ws=(w1 + w2) / 2.0,
            wa=(w1 - w2) / 2.0,
            zs=(z1 + z2) / 2.0,
            za=(z1 - z2) / 2.0,
        )

    def reactors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.ws + self.wa, self.zs + self.za, self.ws - self.wa, self.zs - self.za


__all__ = [
    "Branch",
    "KineticsEval",
    "NullclineBranches",
    "ReducedProfile",
    "LayeredStateEps",
    "SpectralBasis",
    "FastSpectrum",
    "Extrapolation",
    "SlepConstants",
    "XYArgs",
    "RegionLabel",
    "RegionPoint",
    "HopfRegime",
    "HopfSolution",
    "Verdict",
    "DiagnosticsSeries",
    "ModeSplit",
]
