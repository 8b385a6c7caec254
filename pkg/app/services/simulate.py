from __future__ import annotations

from dataclasses import dataclass, field
from time import perf_counter
from typing import Literal, Sequence
import logging
import math

import numpy as np
from scipy import sparse
from scipy.linalg import eig, solve_banded
from scipy.signal import find_peaks
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigs

from app.config import settings
from app.models import DiagnosticsSeries, LayeredStateEps, ModeSplit, ReducedProfile, Verdict
from app.schemas import ModelParams, PerturbationMode, PerturbationSpec, SimConfig, SystemKind
from app.services.model_core import constant_steady_state, kinetics
from app.services.reduced_profile import solve_reduced
from app.services.steady_eps import resample_state, solve_layered_eps
from app.utils.banded import fv_stiffness, stiffness_apply, tridiagonal_banded
from app.utils.errors import DomainError, NumericalFailure, RegimeError

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITERATIONS = 25
MAX_HALVINGS = 4
QUIET_LEVEL = 1e-12
GROWTH_FACTOR = 10.0
SLOPE_THRESHOLD = 1e-3
MIN_PEAKS = 10
MAX_DRIFT = 0.05
DELAYED_FREQUENCY_FRACTIONS = (0.25, 0.5, 0.75, 1.0)

_COMPONENTS = {
    SystemKind.DECOUPLED2: ("u", "v"),
    SystemKind.COUPLED4: ("u1", "v1", "u2", "v2"),
    SystemKind.COUPLED6_DELAYED: ("u1", "v1", "u2", "v2", "U1", "U2"),
}


def component_names(system: SystemKind) -> tuple[str, ...]:
    return _COMPONENTS[system]


class _StepRejected(Exception):
    pass


@dataclass(slots=True, frozen=True)
class SimState:
    """Fields on the simulation grid, one row per component in _COMPONENTS order."""
    t: float
    fields: np.ndarray

    def component(self, system: SystemKind, name: str) -> np.ndarray:
        return self.fields[_COMPONENTS[system].index(name)]


@dataclass(slots=True, frozen=True)
class SimulationResult:
    x: np.ndarray
    base: np.ndarray
    final: SimState
    diagnostics: DiagnosticsSeries
    halvings: int = 0


@dataclass(slots=True, frozen=True)
class DirectSpectrum:
    """Rightmost eigenvalues of the discretized linearization, per reactor mode."""
    symmetric: np.ndarray
    antisymmetric: np.ndarray | None = None
    symmetric_vector: np.ndarray | None = None
    antisymmetric_vector: np.ndarray | None = None

    @property
    def rightmost(self) -> complex:
        values = [self.symmetric[0]]
        if self.antisymmetric is not None:
            values.append(self.antisymmetric[0])
        return max(values, key=lambda value: value.real)

    def to_dict(self) -> dict:
        def pack(values):
            return None if values is None else [[float(v.real), float(v.imag)] for v in values]

        return {"symmetric": pack(self.symmetric), "antisymmetric": pack(self.antisymmetric)}


@dataclass(slots=True, frozen=True)
class ThresholdResult:
    parameter: str
    bracket: tuple[float, float]
    eigs_value: float | None = None
    simulation_value: float | None = None
    iterations: int = 0
    history: tuple[tuple[float, bool], ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "bracket": list(self.bracket),
            "eigs_value": self.eigs_value,
            "simulation_value": self.simulation_value,
            "iterations": self.iterations,
        }


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------


class StrangIntegrator:
    """Half reaction, full diffusion, half reaction.

    Reaction and inter-reactor exchange are local to a node and advanced with
    the implicit trapezoidal rule (a batched Newton on the small per-node
    system). Diffusion is Crank-Nicolson on the finite-volume Laplacian with
    Neumann ends, one tridiagonal solve per diffusing component.
    """

    def __init__(self, config: SimConfig) -> None:
        self.config = config
        self.system = config.system
        self.params = config.params
        self.x = np.linspace(0.0, self.params.ell, config.nodes)
        self.mass, self.diag, self.offdiag = fv_stiffness(self.x)
        p = self.params
        rates = {"u": p.eps / p.tau, "v": p.d, "U": 0.0}
        self.diffusivity = [rates[name[0]] for name in _COMPONENTS[self.system]]
        self._banded: dict[tuple[float, float], np.ndarray] = {}

    @property
    def size(self) -> int:
        return len(_COMPONENTS[self.system])

    def reaction(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Local right-hand side F(y) of shape (m, n) and its Jacobian of shape (n, m, m)."""
        p = self.params
        m, n = y.shape
        F = np.zeros_like(y)
        J = np.zeros((n, m, m))
        scale = 1.0 / (p.eps * p.tau)
        reactors = 1 if self.system is SystemKind.DECOUPLED2 else 2
        for i in range(reactors):
            ui, vi = 2 * i, 2 * i + 1
            k = kinetics(y[ui], y[vi], p.a, p.sigma)
            F[ui] = k.f * scale
            F[vi] = k.g
            J[:, ui, ui] = k.f_u * scale
            J[:, ui, vi] = k.f_v * scale
            J[:, vi, ui] = k.g_u
            J[:, vi, vi] = k.g_v
            if reactors == 1:
                continue
            j = 1 - i
            uj, vj = 2 * j, 2 * j + 1
            # activator exchange reads the partner's delayed copy in the delayed system
            source = 4 + j if self.system is SystemKind.COUPLED6_DELAYED else uj
            F[ui] += p.k1 / p.tau * (y[source] - y[ui])
            J[:, ui, ui] -= p.k1 / p.tau
            J[:, ui, source] += p.k1 / p.tau
            F[vi] += p.k2 * (y[vj] - y[vi])
            J[:, vi, vi] -= p.k2
            J[:, vi, vj] += p.k2
        if self.system is SystemKind.COUPLED6_DELAYED:
            for i in range(2):
                Ui, ui = 4 + i, 2 * i
                F[Ui] = p.alpha * (y[ui] - y[Ui])
                J[:, Ui, ui] = p.alpha
                J[:, Ui, Ui] = -p.alpha
        return F, J

    def react(self, y0: np.ndarray, h: float) -> np.ndarray:
        """Implicit trapezoidal step of length h for the local system at every node."""
        try:
            F0, _ = self.reaction(y0)
        except DomainError as exc:
            raise _StepRejected(str(exc)) from exc
        y = y0.copy()
        identity = np.eye(self.size)
        for _ in range(NEWTON_MAX_ITERATIONS):
            try:
                F, J = self.reaction(y)
            except DomainError as exc:
                raise _StepRejected(str(exc)) from exc
            residual = y - y0 - 0.5 * h * (F0 + F)
            matrix = identity[None, :, :] - 0.5 * h * J
            try:
                delta = np.linalg.solve(matrix, -residual.T[:, :, None])[:, :, 0].T
            except np.linalg.LinAlgError as exc:
                raise _StepRejected("singular local Jacobian") from exc
            y = y + delta
            if np.max(np.abs(delta) / (1.0 + np.abs(y))) < NEWTON_TOL:
                return y
        raise _StepRejected("local Newton did not converge")

    def _crank_nicolson(self, rate: float, dt: float) -> np.ndarray:
        key = (rate, dt)
        if key not in self._banded:
            c = 0.5 * dt * rate
            off = c * self.offdiag
            self._banded[key] = tridiagonal_banded(self.mass + c * self.diag, off, off)
        return self._banded[key]

    def diffuse(self, y: np.ndarray, dt: float) -> np.ndarray:
        out = y.copy()
        for row, rate in enumerate(self.diffusivity):
            if rate == 0.0:
                continue
            rhs = self.mass * y[row] - 0.5 * dt * rate * stiffness_apply(self.diag, self.offdiag, y[row])
            out[row] = solve_banded((1, 1), self._crank_nicolson(rate, dt), rhs)
        return out

    def step(self, state: SimState, dt: float) -> SimState:
        y = self.react(state.fields, 0.5 * dt)
        y = self.diffuse(y, dt)
        y = self.react(y, 0.5 * dt)
        physical = y[: 2 if self.system is SystemKind.DECOUPLED2 else 4]
        if not np.all(physical > 0.0):
            raise _StepRejected("positivity lost")
        return SimState(t=state.t + dt, fields=y)


def step(state: SimState, config: SimConfig, dt: float | None = None) -> SimState:
    """One Strang-split step; failed local solves halve dt up to MAX_HALVINGS times."""
    integrator = StrangIntegrator(config)
    new_state, _ = _advance(integrator, state, dt or config.resolved_dt, 0)
    return new_state


def _advance(integrator: StrangIntegrator, state: SimState, dt: float, depth: int) -> tuple[SimState, int]:
    try:
        return integrator.step(state, dt), 0
    except _StepRejected as exc:
        if depth >= MAX_HALVINGS:
            raise NumericalFailure(
                "time step rejected after repeated halving",
                t=state.t,
                dt=dt,
                reason=str(exc),
            ) from exc
        logger.warning("Step at t=%.6g rejected (%s); halving dt to %.3e", state.t, exc, 0.5 * dt)
        half, first = _advance(integrator, state, 0.5 * dt, depth + 1)
        full, second = _advance(integrator, half, 0.5 * dt, depth + 1)
        return full, first + second + 1


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------


def base_state(
    config: SimConfig,
    *,
    profile: ReducedProfile | None = None,
    steady: LayeredStateEps | None = None,
) -> LayeredStateEps | tuple[np.ndarray, np.ndarray]:
    """Unperturbed (u, v) on the uniform simulation grid.

    The layered state is re-converged on that grid so that it is a discrete
    steady state of the scheme, not only of the solver's graded grid.
    """
    x = np.linspace(0.0, config.params.ell, config.nodes)
    if config.initial == "constant":
        u_star, v_star = constant_steady_state(config.params.a)
        return np.full_like(x, u_star), np.full_like(x, v_star)
    if steady is None:
        profile = profile or solve_reduced(config.params)
        steady = solve_layered_eps(config.params, profile)
    return resample_state(steady, config.params, x)


def _bump(x: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-(((x - center) / width) ** 2))


def initial_state(
    config: SimConfig,
    u: np.ndarray,
    v: np.ndarray,
    *,
    x_star: float | None = None,
    eigenvector: np.ndarray | None = None,
) -> SimState:
    """Base state on every reactor plus the configured perturbation of u."""
    spec: PerturbationSpec = config.perturbation
    x = np.linspace(0.0, config.params.ell, config.nodes)
    if spec.shape == "eigenfunction" and eigenvector is not None:
        shape = np.real(eigenvector[: x.size])
        shape = shape / np.max(np.abs(shape))
    else:
        center = x_star if x_star is not None and math.isfinite(x_star) else 0.5 * config.params.ell
        shape = _bump(x, center, spec.width_eps * config.params.eps)
    if spec.noise > 0.0:
        rng = np.random.default_rng(spec.seed)
        shape = shape + spec.noise * rng.standard_normal(x.size)
    delta = spec.amplitude * shape if spec.mode is not PerturbationMode.NONE else np.zeros_like(x)

    if config.system is SystemKind.DECOUPLED2:
        rows = [u + delta, v]
    else:
        if spec.mode is PerturbationMode.ANTISYMMETRIC:
            split = ModeSplit(ws=u, wa=delta, zs=v, za=np.zeros_like(v))
        else:
            split = ModeSplit(ws=u + delta, wa=np.zeros_like(u), zs=v, za=np.zeros_like(v))
        u1, v1, u2, v2 = split.reactors()
        rows = [u1, v1, u2, v2]
        if config.system is SystemKind.COUPLED6_DELAYED:
            # constant history: the delayed copies start at the current activator
            rows += [u1.copy(), u2.copy()]
    return SimState(t=0.0, fields=np.array(rows))


# ---------------------------------------------------------------------------
# Diagnostics and verdicts
# ---------------------------------------------------------------------------


def asym_norm(state: SimState, system: SystemKind) -> float:
    if system is SystemKind.DECOUPLED2:
        return 0.0
    y = state.fields
    split = ModeSplit.from_reactors(y[0], y[1], y[2], y[3])
    return 2.0 * (float(np.max(np.abs(split.wa))) + float(np.max(np.abs(split.za))))


def dev_norm(state: SimState, system: SystemKind, base_u: np.ndarray) -> float:
    rows = (0,) if system is SystemKind.DECOUPLED2 else (0, 2)
    return max(float(np.max(np.abs(state.fields[row] - base_u))) for row in rows)


def judge_series(times: Sequence[float], values: Sequence[float]) -> tuple[Verdict, int, float, float, float]:
    """(verdict, peaks, log slope, amplitude drift, growth ratio) of an observable series.

    Rules in order: a tenfold rise is GROWTH; at least 10 peaks in the last half
    with under 5% drift is SUSTAINED_OSCILLATION; otherwise the log-amplitude
    slope over the last half decides with threshold 1e-3; INCONCLUSIVE remains.
    A series that never leaves round-off level counts as DECAY.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    floor = np.finfo(float).tiny
    if values.size < 3 or float(np.max(values)) < QUIET_LEVEL:
        return Verdict.DECAY, 0, 0.0, 0.0, 1.0
    ratio = float(np.max(values) / max(values[0], floor))
    window = times >= times[0] + 0.5 * (times[-1] - times[0])
    tail_t, tail_v = times[window], values[window]
    peaks, _ = find_peaks(tail_v)
    drift = math.inf
    if peaks.size >= 2:
        heights = tail_v[peaks]
        drift = float(abs(heights[-1] - heights[0]) / np.mean(heights))
    slope = float(np.polyfit(tail_t, np.log(np.maximum(tail_v, floor)), 1)[0]) if tail_t.size >= 2 else 0.0

    if ratio >= GROWTH_FACTOR:
        verdict = Verdict.GROWTH
    elif peaks.size >= MIN_PEAKS and drift < MAX_DRIFT:
        verdict = Verdict.SUSTAINED_OSCILLATION
    elif slope > SLOPE_THRESHOLD:
        verdict = Verdict.GROWTH
    elif slope < -SLOPE_THRESHOLD:
        verdict = Verdict.DECAY
    else:
        verdict = Verdict.INCONCLUSIVE
    return verdict, int(peaks.size), slope, drift, ratio


def _observable(config: SimConfig) -> str:
    if config.system is SystemKind.DECOUPLED2 or config.perturbation.mode is PerturbationMode.SYMMETRIC:
        return "dev_norm"
    return "asym_norm"


def simulate(
    config: SimConfig,
    *,
    profile: ReducedProfile | None = None,
    steady: LayeredStateEps | None = None,
    initial: SimState | None = None,
) -> SimulationResult:
    """Integrate one trajectory and judge it."""
    started = perf_counter()
    integrator = StrangIntegrator(config)
    base = base_state(config, profile=profile, steady=steady)
    if isinstance(base, LayeredStateEps):
        base_u, base_v, x_star = base.u, base.v, base.x_star
    else:
        (base_u, base_v), x_star = base, None
    eigenvector = None
    if initial is None and config.perturbation.shape == "eigenfunction" and isinstance(base, LayeredStateEps):
        mode = "symmetric" if config.system is SystemKind.DECOUPLED2 or config.perturbation.mode is PerturbationMode.SYMMETRIC else "antisymmetric"
        spectrum = direct_eigs(config.system, config.params, base, 1, modes=(mode,), vectors=True)
        eigenvector = spectrum.symmetric_vector if mode == "symmetric" else spectrum.antisymmetric_vector
    state = initial or initial_state(config, base_u, base_v, x_star=x_star, eigenvector=eigenvector)

    dt = config.resolved_dt
    steps = max(int(math.ceil(config.t_end / dt - 1e-12)), 1)
    dt = config.t_end / steps
    times, asym, dev = [state.t], [asym_norm(state, config.system)], [dev_norm(state, config.system, base_u)]
    snapshot_times: list[float] = []
    snapshots: list[np.ndarray] = []
    if config.snapshot_stride:
        snapshot_times.append(state.t)
        snapshots.append(state.fields.copy())
    halvings = 0
    for n in range(1, steps + 1):
        state, extra = _advance(integrator, state, dt, 0)
        halvings += extra
        if n % config.stride == 0 or n == steps:
            times.append(state.t)
            asym.append(asym_norm(state, config.system))
            dev.append(dev_norm(state, config.system, base_u))
        if config.snapshot_stride and (n % config.snapshot_stride == 0 or n == steps):
            snapshot_times.append(state.t)
            snapshots.append(state.fields.copy())

    observable = _observable(config)
    series = np.array(asym if observable == "asym_norm" else dev)
    verdict, peaks, slope, drift, ratio = judge_series(times, series)
    diagnostics = DiagnosticsSeries(
        times=np.array(times),
        asym_norm=np.array(asym),
        dev_norm=np.array(dev),
        observable=observable,
        peak_count=peaks,
        log_slope=slope,
        amplitude_drift=drift,
        growth_ratio=ratio,
        verdict=verdict,
        snapshot_times=np.array(snapshot_times),
        snapshots=np.array(snapshots) if snapshots else np.empty((0, integrator.size, config.nodes)),
    )
    logger.info(
        "Simulated %s to t=%.4g in %d steps (%d halvings): %s (slope %.3e) in %.2fs",
        config.system.value, config.t_end, steps, halvings, verdict.value, slope, perf_counter() - started,
    )
    return SimulationResult(x=integrator.x, base=np.array([base_u, base_v]), final=state, diagnostics=diagnostics, halvings=halvings)


# ---------------------------------------------------------------------------
# Direct eigenproblems
# ---------------------------------------------------------------------------


def mode_operator(
    system: SystemKind,
    params: ModelParams,
    state: LayeredStateEps,
    mode: Literal["symmetric", "antisymmetric"],
) -> sparse.csr_matrix:
    """Discretized linearization of one reactor mode, already multiplied by the inverse mass.

    Unknowns are blocked as (w, z) or (w, z, W) with W the delayed copy; the
    delayed exchange enters linearly through W so the problem stays a plain
    eigenproblem.
    """
    if system is SystemKind.DECOUPLED2 and mode == "antisymmetric":
        raise RegimeError("the decoupled system has no antisymmetric mode")
    if system is SystemKind.COUPLED6_DELAYED and not params.delayed:
        raise RegimeError("coupled6_delayed needs a finite alpha")
    eps, tau, d = state.eps, params.tau, params.d
    k1, k2 = params.k1, params.k2
    mass, diag, offdiag = fv_stiffness(state.x)
    n = state.x.size
    laplacian = -sparse.diags(1.0 / mass) @ sparse.diags([offdiag, diag, offdiag], [-1, 0, 1], shape=(n, n))
    antisym = mode == "antisymmetric"
    delayed = system is SystemKind.COUPLED6_DELAYED
    if system is SystemKind.COUPLED4 and antisym:
        self_exchange = 2.0 * eps * k1
    elif delayed:
        self_exchange = eps * k1
    else:
        self_exchange = 0.0
    inhibitor_exchange = 2.0 * k2 if antisym and system is not SystemKind.DECOUPLED2 else 0.0
    scale = 1.0 / (eps * tau)

    A_ww = (eps * eps * laplacian + sparse.diags(state.f_u - self_exchange)) * scale
    A_wz = sparse.diags(state.f_v * scale)
    A_zw = sparse.diags(state.g_u)
    A_zz = d * laplacian + sparse.diags(state.g_v - inhibitor_exchange)
    if not delayed:
        return sparse.bmat([[A_ww, A_wz], [A_zw, A_zz]], format="csr")
    identity = sparse.identity(n)
    sign = -1.0 if antisym else 1.0
    A_wW = sign * (k1 / tau) * identity
    return sparse.bmat(
        [
            [A_ww, A_wz, A_wW],
            [A_zw, A_zz, None],
            [params.alpha * identity, None, -params.alpha * identity],
        ],
        format="csr",
    )


def _shift_invert(matrix: sparse.csr_matrix, k: int, shift: complex):
    if shift.imag != 0.0:
        return eigs(matrix.astype(complex), k=k, sigma=shift, which="LM", tol=1e-12)
    return eigs(matrix, k=k, sigma=shift.real, which="LM", tol=1e-12)


def _sparse_candidates(matrix: sparse.csr_matrix, count: int, shifts: Sequence[complex]):
    """Union of the eigenvalues nearest each shift and of an LR pass, duplicates dropped."""
    size = matrix.shape[0]
    k = min(max(3 * count, 12), size - 2)
    found_values, found_vectors = [], []
    for shift in shifts:
        values, vecs = _shift_invert(matrix, k, complex(shift))
        if complex(shift).imag != 0.0:
            # real operator: conjugates are eigenpairs too
            values, vecs = np.concatenate([values, values.conj()]), np.hstack([vecs, vecs.conj()])
        found_values.append(values)
        found_vectors.append(vecs)
    try:
        values, vecs = eigs(matrix, k=k, which="LR", tol=1e-10, maxiter=max(1000, size))
    except ArpackNoConvergence as exc:
        values, vecs = exc.eigenvalues, exc.eigenvectors
        logger.debug("LR pass returned %d of %d eigenvalues", values.size, k)
    if values.size:
        found_values.append(values)
        found_vectors.append(vecs)
    values = np.concatenate(found_values)
    vecs = np.hstack([np.asarray(block, dtype=complex) for block in found_vectors])
    keep: list[int] = []
    for index in np.lexsort((-np.abs(values.imag), -values.real)):
        if all(abs(values[index] - values[j]) > 1e-9 * (1.0 + abs(values[j])) for j in keep):
            keep.append(int(index))
    return values[keep], vecs[:, keep]


def _rightmost(matrix: sparse.csr_matrix, count: int, vectors: bool, shifts: Sequence[complex]):
    size = matrix.shape[0]
    if size <= settings.dense_eig_max:
        values, vecs = eig(matrix.toarray())
    else:
        try:
            values, vecs = _sparse_candidates(matrix, count, shifts)
        except (ArpackNoConvergence, ArpackError) as exc:
            if size > 4 * settings.dense_eig_max:
                raise NumericalFailure("eigen-solver stagnation", size=size, reason=str(exc)) from exc
            logger.warning("Shift-invert stagnated (%s); falling back to a dense solve of size %d", exc, size)
            values, vecs = eig(matrix.toarray())
    order = np.lexsort((-np.abs(values.imag), -values.real))[:count]
    return values[order], (vecs[:, order[0]] if vectors else None)


def direct_eigs(
    system: SystemKind,
    params: ModelParams,
    state: LayeredStateEps,
    n_rightmost: int = 6,
    *,
    modes: Sequence[str] | None = None,
    vectors: bool = False,
    shift: float = 1e-3,
    frequencies: Sequence[float] | None = None,
) -> DirectSpectrum:
    """Rightmost eigenvalues of the linearization at the symmetric layered state.

    Coupled systems are split into their symmetric and antisymmetric
    half-size problems. Large problems are solved by shift-invert at ``shift``
    and at i*omega for every omega in ``frequencies``; for the delayed system
    these default to fractions of alpha; a Hopf frequency lies below
    alpha_H.
    """
    if abs(state.eps - params.eps) > 1e-12 * params.eps or state.d != params.d:
        raise RegimeError("state was solved at different parameters", state_eps=state.eps, eps=params.eps)
    if frequencies is None:
        delayed = system is SystemKind.COUPLED6_DELAYED
        frequencies = tuple(fraction * params.alpha for fraction in DELAYED_FREQUENCY_FRACTIONS) if delayed else ()
    shifts = (complex(shift), *(complex(0.0, omega) for omega in frequencies))
    started = perf_counter()
    if modes is None:
        modes = ("symmetric",) if system is SystemKind.DECOUPLED2 else ("symmetric", "antisymmetric")
    # the symmetric mode of the non-delayed coupled system is the decoupled problem
    sym_system = SystemKind.DECOUPLED2 if system is SystemKind.COUPLED4 else system
    result: dict = {"symmetric": np.empty(0, dtype=complex)}
    if "symmetric" in modes:
        values, vector = _rightmost(mode_operator(sym_system, params, state, "symmetric"), n_rightmost, vectors, shifts)
        result["symmetric"], result["symmetric_vector"] = values, vector
    if "antisymmetric" in modes:
        values, vector = _rightmost(mode_operator(system, params, state, "antisymmetric"), n_rightmost, vectors, shifts)
        result["antisymmetric"], result["antisymmetric_vector"] = values, vector
    spectrum = DirectSpectrum(**result)
    logger.debug("direct_eigs %s in %.2fs: %s", system.value, perf_counter() - started, spectrum.to_dict())
    return spectrum


# ---------------------------------------------------------------------------
# Threshold scans
# ---------------------------------------------------------------------------


def _scan_system(parameter: str, config: SimConfig) -> SystemKind:
    if parameter == "alpha":
        return SystemKind.COUPLED6_DELAYED
    if parameter == "k2" and config.system is SystemKind.DECOUPLED2:
        return SystemKind.COUPLED4
    return config.system


def threshold_scan(
    parameter: Literal["tau", "k2", "alpha"],
    bracket: tuple[float, float],
    config: SimConfig,
    *,
    method: Literal["eigs", "simulate", "both"] = "eigs",
    rtol: float = 1e-3,
    steady: LayeredStateEps | None = None,
    profile: ReducedProfile | None = None,
) -> ThresholdResult:
    """Bisect the parameter value where the layered state changes stability.

    The steady state does not depend on tau, k1, k2 or alpha, so one solve
    serves every probe.
    """
    lo, hi = sorted(float(value) for value in bracket)
    if not lo > 0.0:
        raise DomainError("bracket must be positive", bracket=list(bracket))
    system = _scan_system(parameter, config)
    params = config.params
    if steady is None:
        profile = profile or solve_reduced(params)
        steady = solve_layered_eps(params, profile)

    def unstable_by_eigs(value: float) -> bool:
        probe = params.with_updates(**{parameter: value})
        return direct_eigs(system, probe, steady).rightmost.real > 0.0

    def unstable_by_simulation(value: float) -> bool:
        probe = config.model_copy(update={"system": system, "params": params.with_updates(**{parameter: value})})
        verdict = simulate(probe, steady=steady).diagnostics.verdict
        if verdict is Verdict.INCONCLUSIVE:
            logger.warning("Inconclusive verdict at %s=%.6g; counted as stable", parameter, value)
        return verdict in (Verdict.GROWTH, Verdict.SUSTAINED_OSCILLATION)

    outcome: dict = {}
    iterations = 0
    history: list[tuple[float, bool]] = []
    probes = []
    if method in ("eigs", "both"):
        probes.append(("eigs_value", unstable_by_eigs))
    if method in ("simulate", "both"):
        probes.append(("simulation_value", unstable_by_simulation))
    for name, probe in probes:
        a, b = lo, hi
        unstable_a, unstable_b = probe(a), probe(b)
        history += [(a, unstable_a), (b, unstable_b)]
        if unstable_a == unstable_b:
            raise RegimeError(
                f"same-sign bracket for {parameter}: both ends are {'unstable' if unstable_a else 'stable'}",
                parameter=parameter,
                bracket=[lo, hi],
                method=name,
            )
        count = 0
        while b - a > rtol * max(abs(a), abs(b)):
            mid = 0.5 * (a + b)
            unstable_mid = probe(mid)
            history.append((mid, unstable_mid))
            if unstable_mid == unstable_a:
                a = mid
            else:
                b = mid
            count += 1
        outcome[name] = 0.5 * (a + b)
        iterations = max(iterations, count)
        logger.info("Threshold %s (%s) = %.6g after %d bisections", parameter, name, outcome[name], count)
    return ThresholdResult(
        parameter=parameter,
        bracket=(lo, hi),
        iterations=iterations,
        history=tuple(history),
        **outcome,
    )


__all__ = [
    "component_names",
    "SimState",
    "SimulationResult",
    "DirectSpectrum",
    "ThresholdResult",
    "StrangIntegrator",
    "step",
    "base_state",
    "initial_state",
    "asym_norm",
    "dev_norm",
    "judge_series",
    "simulate",
    "mode_operator",
    "direct_eigs",
    "threshold_scan",
]
