"""
Validated parameter sets, run configurations and documented JSON outputs.
"""
from __future__ import annotations

import math
from enum import StrEnum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# a > (5/3)sqrt(15) is exactly L11 > 0 at the constant state
SIGMOIDAL_THRESHOLD = 5.0 / 3.0 * math.sqrt(15.0)


def coerce_alpha(value):
    if value is None:
        return math.inf
    if isinstance(value, str) and value.strip().lower() in {"inf", "infinite", "infinity", "none"}:
        return math.inf
    return value


class OriginalParams(BaseModel):
    """Parameters of the two-layer system in laboratory units"""
    model_config = ConfigDict(frozen=True)

    d1: float = Field(..., gt=0, description="Activator diffusion rate (length^2/time)")
    d2: float = Field(..., gt=0, description="Inhibitor diffusion rate (length^2/time)")
    a: float = Field(..., gt=0, description="Feed constant of the activator")
    b: float = Field(..., gt=0, description="Kinetic constant of the inhibitor")
    sigma: float = Field(..., gt=1, description="Complexing factor, sigma = 1 + k")
    k1_orig: float = Field(0.0, ge=0, description="Inter-reactor exchange rate of the activator (1/time)")
    k2: float = Field(0.0, ge=0, description="Inter-reactor exchange rate of the inhibitor (1/time)")
    alpha: float = Field(math.inf, description="Weak-kernel rate (1/time); inf for instantaneous exchange")
    ell: float = Field(1.0, gt=0, description="Length of the interval (0, ell)")

    @field_validator("alpha", mode="before")
    @classmethod
    def parse_alpha(cls, value):
        return coerce_alpha(value)

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("alpha must be > 0 or infinite")
        return value


class ModelParams(BaseModel):
    """Reduced system parameters with regime guards.

    ``alpha = inf`` is the non-delayed coupling.
    """
    model_config = ConfigDict(frozen=True)

    a: float = Field(10.0, description="Feed constant; must exceed (5/3)sqrt(15)")
    sigma: float = Field(8.0, gt=0, description="Complexing factor")
    eps: float = Field(0.02, gt=0, description="Activator diffusion scale")
    tau: float = Field(1.0, gt=0, description="Activator time constant")
    d: float = Field(4.0, gt=0, description="Inhibitor diffusion rate")
    k1: float = Field(0.0, ge=0, description="Activator exchange rate between the layers")
    k2: float = Field(0.0, ge=0, description="Inhibitor exchange rate between the layers")
    alpha: float = Field(math.inf, description="Inverse mean delay of the activator exchange")
    ell: float = Field(2.0, gt=0, description="Domain length")

    @field_validator("a")
    @classmethod
    def validate_sigmoidal_regime(cls, value: float) -> float:
        """The f-nullcline is sigmoidal with the constant state on the middle branch."""
        if not value > SIGMOIDAL_THRESHOLD:
            raise ValueError(
                f"non-sigmoidal regime: a={value} must exceed (5/3)sqrt(15)={SIGMOIDAL_THRESHOLD:.6f}"
            )
        return value

    @field_validator("alpha", mode="before")
    @classmethod
    def parse_alpha(cls, value):
        return coerce_alpha(value)

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("alpha must be > 0 or infinite")
        return value

    @property
    def delayed(self) -> bool:
        return math.isfinite(self.alpha)

    def with_updates(self, **changes) -> "ModelParams":
        """Return a validated copy with some fields replaced."""
        payload = self.model_dump()
        payload.update(changes)
        return ModelParams(**payload)


class SystemKind(StrEnum):
    DECOUPLED2 = "decoupled2"
    COUPLED4 = "coupled4"
    COUPLED6_DELAYED = "coupled6_delayed"


class PerturbationMode(StrEnum):
    NONE = "none"
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


class PerturbationSpec(BaseModel):
    """Perturbation added to the layered state at t = 0"""
    model_config = ConfigDict(frozen=True)

    mode: PerturbationMode = Field(PerturbationMode.ANTISYMMETRIC, description="Which reactor mode is excited")
    amplitude: float = Field(1e-4, ge=0, description="Sup-norm amplitude of the perturbation of u")
    width_eps: float = Field(5.0, gt=0, description="Width of the bump at x* in units of eps")
    noise: float = Field(0.0, ge=0, description="Relative amplitude of seeded nodal noise")
    seed: int = Field(0, description="Seed for the noise generator")
    shape: Literal["bump", "eigenfunction"] = Field(
        "bump",
        description="Localized bump at x*, or the principal eigenvector of the excited mode",
    )


class SimConfig(BaseModel):
    """Time integration setup for one trajectory."""
    model_config = ConfigDict(frozen=True)

    system: SystemKind = Field(SystemKind.COUPLED4, description="Which system to integrate")
    params: ModelParams = Field(default_factory=ModelParams)
    nodes: int = Field(401, ge=16, description="Uniform grid nodes on [0, ell]")
    dt: float | None = Field(None, gt=0, description="Time step; defaults to min(h/2, eps*tau*sigma/4)")
    t_end: float = Field(50.0, gt=0, description="Final time")
    perturbation: PerturbationSpec = Field(default_factory=PerturbationSpec)
    stride: int = Field(10, ge=1, description="Record diagnostics every stride steps")
    snapshot_stride: int | None = Field(None, ge=1, description="Record field snapshots every this many steps")
    initial: Literal["layered", "constant"] = Field("layered", description="Base state the perturbation is added to")

    @model_validator(mode="after")
    def validate_system_params(self):
        if self.system is SystemKind.COUPLED6_DELAYED and not self.params.delayed:
            raise ValueError(
                "coupled6_delayed needs a finite alpha; use coupled4 for instantaneous exchange"
            )
        return self

    @property
    def h(self) -> float:
        return self.params.ell / (self.nodes - 1)

    @property
    def resolved_dt(self) -> float:
        if self.dt is not None:
            return self.dt
        p = self.params
        return min(self.h / 2.0, p.eps * p.tau * p.sigma / 4.0)


class AxisScale(StrEnum):
    LINEAR = "linear"
    LOG = "log"


class SweepAxis(BaseModel):
    """One axis of a parameter grid"""
    model_config = ConfigDict(frozen=True)

    name: Literal["k1", "k2", "alpha", "tau", "d", "ell"]
    min: float
    max: float
    count: int = Field(..., ge=1)
    scale: AxisScale = AxisScale.LINEAR
    relative_to: Literal["none", "rho0", "gamma0", "alpha0"] = Field(
        "none",
        description="Interpret min/max as multiples of a computed constant",
    )

    @model_validator(mode="after")
    def validate_range(self):
        if self.max < self.min:
            raise ValueError(f"axis {self.name}: max < min")
        if self.scale is AxisScale.LOG and self.min <= 0:
            raise ValueError(f"axis {self.name}: log scale needs min > 0")
        return self


class SweepTask(StrEnum):
    CLASSIFY = "classify"
    TURING_CURVE = "turing-curve"
    HOPF = "hopf"
    LAMBDA_CURVES = "lambda-curves"


class SweepJob(BaseModel):
    """A grid of parameter points evaluated by one task.

    Points are enumerated row-major in axis declaration order.
    """
    model_config = ConfigDict(frozen=True)

    axes: list[SweepAxis] = Field(..., min_length=1)
    task: SweepTask = SweepTask.CLASSIFY
    output: Path = Field(Path("sweep.csv"), description="CSV sink")

    @field_validator("axes")
    @classmethod
    def validate_unique_axes(cls, value: list[SweepAxis]) -> list[SweepAxis]:
        names = [axis.name for axis in value]
        if len(names) != len(set(names)):
            raise ValueError(f"Duplicate sweep axes: {names}")
        return value


class RunConfig(BaseModel):
    """Fully resolved command-line run."""
    model_config = ConfigDict(frozen=True)

    command: str
    params: ModelParams
    payload: dict = Field(default_factory=dict, description="Subcommand-specific options")
    output: Path | None = None
    output_format: Literal["json", "csv"] = "json"
    cache_dir: Path
    cache_enabled: bool = True
    workers: int = Field(1, ge=1)
    seed: int = 0

    def header(self) -> dict:
        """Resolved configuration recorded at the top of every output file."""
        return {
            "command": self.command,
            "params": self.params.model_dump(mode="json"),
            "payload": {key: _jsonable(value) for key, value in sorted(self.payload.items())},
            "workers": self.workers,
            "seed": self.seed,
        }


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


class ConstantsResponse(BaseModel):
    """Scalar inputs of every singular-limit equation."""

    rho0_star: float = Field(..., gt=0, description="Limit of mu0/eps")
    kappa_star: float = Field(..., gt=0, description="Normalization constant of the layer eigenfunction")
    c1_star: float = Field(..., gt=0)
    c2_star: float = Field(..., gt=0)
    c1c2: float = Field(..., gt=0)
    tau_star: float = Field(..., gt=0, description="Y(0,0,0)")
    mu_star: float = Field(..., gt=0, description="Half the infimum of the slow potential")
    gamma0: float = Field(..., gt=0)
    x_star: float
    v_hat: float
    rho0_error: float | None = Field(None, description="Extrapolation error estimate")
    kappa_method: Literal["extrapolated", "inner"]

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "rho0_star": 0.41,
                "kappa_star": 0.52,
                "c1_star": 0.47,
                "c2_star": 3.1,
                "c1c2": 1.46,
                "tau_star": 2.7,
                "mu_star": 0.16,
                "gamma0": 0.61,
                "x_star": 1.54,
                "v_hat": 5.5042,
                "rho0_error": 1e-4,
                "kappa_method": "extrapolated",
            }
        }
    )


class RegionResponse(BaseModel):
    """Region of the (k1, k2) quadrant."""

    k1: float
    k2: float
    label: Literal["Gamma1", "Gamma2", "Gamma3-1", "Gamma3-2", "BOUNDARY"]
    xi_k1: float | None = Field(None, description="Turing curve value at k1 when k1 < rho0*/2")
    delay_verdict: str = Field(..., description="Stability of the symmetric state over all alpha")


class HopfResponse(BaseModel):
    """Delayed-coupling Hopf point."""

    k1: float
    k2: float
    regime: str
    alpha_H: float = Field(..., gt=0)
    lamIH: float = Field(..., gt=0)
    alpha0: float
    alpha2: float
    alpha1: float | None = None
    k2hat_star: float | None = None
    crossings: list[float]
    multiplicities: list[int]
    dlamR_dalpha: float | None = None
    I1: float | None = None
    I2: float | None = None
    gamma0_bound_holds: bool | None = None
