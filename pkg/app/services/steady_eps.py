from __future__ import annotations

from dataclasses import dataclass
from time import perf_counter
from typing import Literal, Sequence
import logging
import math

import numpy as np
from scipy.linalg import solve_banded

from app.config import settings
from app.models import Branch, LayeredStateEps, ReducedProfile
from app.schemas import ModelParams
from app.services.model_core import branch_eval, constant_steady_state, kinetics
from app.services.reduced_profile import sample_profile
from app.utils.banded import banded_from_diagonals, fv_stiffness, stiffness_apply
from app.utils.errors import NewtonDivergence, NumericalFailure

logger = logging.getLogger(__name__)

LAYER_FRACTION = 0.4
LAYER_HALF_WIDTH = 10.0  # in units of eps
MIN_EPS_STEP = 1e-4
MAX_NEWTON_ITERATIONS = 60
ARMIJO_C = 1e-4
MIN_DAMPING = 2.0**-12


def layered_grid(x_star: float, eps: float, ell: float, nodes: int) -> np.ndarray:
    """Piecewise-uniform grid with LAYER_FRACTION of the nodes in x* +/- 10 eps."""
    lo = max(0.0, x_star - LAYER_HALF_WIDTH * eps)
    hi = min(ell, x_star + LAYER_HALF_WIDTH * eps)
    inner = max(int(round(LAYER_FRACTION * nodes)), 3)
    remaining = nodes - inner
    outer_length = lo + (ell - hi)
    if outer_length <= 0.0:
        return np.linspace(0.0, ell, nodes)
    left_count = int(round(remaining * lo / outer_length))
    if lo > 0.0:
        left_count = min(max(left_count, 1), remaining - (1 if hi < ell else 0))
    else:
        left_count = 0
    right_count = remaining - left_count
    pieces = []
    if left_count > 0:
        pieces.append(np.linspace(0.0, lo, left_count + 1)[:-1])
    pieces.append(np.linspace(lo, hi, inner))
    if right_count > 0:
        pieces.append(np.linspace(hi, ell, right_count + 1)[1:])
    return np.concatenate(pieces)


def build_eps_schedule(target: float, start: float | None = None, ratio: float = 0.7) -> list[float]:
    """Geometric schedule from an easy eps down to the target."""
    start = settings.eps_start if start is None else start
    if target >= start:
        return [target]
    schedule = [start]
    while schedule[-1] * ratio > target:
        schedule.append(schedule[-1] * ratio)
    schedule.append(target)
    return schedule


@dataclass(slots=True)
class _NewtonResult:
    u: np.ndarray
    v: np.ndarray
    residual: float
    iterations: int
    converged: bool


class LayeredSteadySolver:
    """Damped Newton for eps^2 u'' + f = 0, d v'' + g = 0 on a fixed grid.

    Residuals are integrated over control volumes; unknowns are interleaved
    (u0, v0, u1, v1, ...) so the Jacobian has two bands on either side.
    """

    def __init__(self, x: np.ndarray, eps: float, params: ModelParams, *, tol: float) -> None:
        self.x = x
        self.eps = eps
        self.params = params
        self.tol = tol
        self.mass, self.diag, self.offdiag = fv_stiffness(x)

    def residual(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        k = kinetics(u, v, self.params.a, self.params.sigma)
        r = np.empty(2 * u.size)
        r[0::2] = -self.eps**2 * stiffness_apply(self.diag, self.offdiag, u) + self.mass * k.f
        r[1::2] = -self.params.d * stiffness_apply(self.diag, self.offdiag, v) + self.mass * k.g
        return r

    def jacobian(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        n = u.size
        k = kinetics(u, v, self.params.a, self.params.sigma)
        e2 = self.eps**2
        d = self.params.d
        main = np.empty(2 * n)
        main[0::2] = -e2 * self.diag + self.mass * k.f_u
        main[1::2] = -d * self.diag + self.mass * k.g_v
        # u-row couples to its own v; v-row couples to its own u
        up1 = np.zeros(2 * n - 1)
        up1[0::2] = self.mass * k.f_v
        low1 = np.zeros(2 * n - 1)
        low1[0::2] = self.mass * k.g_u
        off2 = np.empty(2 * n - 2)
        off2[0::2] = -e2 * self.offdiag
        off2[1::2] = -d * self.offdiag
        return banded_from_diagonals({-2: off2, -1: low1, 0: main, 1: up1, 2: off2}, 2 * n, 2, 2)

    def solve(self, u: np.ndarray, v: np.ndarray) -> _NewtonResult:
        u = u.copy()
        v = v.copy()
        r = self.residual(u, v)
        norm = float(np.max(np.abs(r)))
        for iteration in range(1, MAX_NEWTON_ITERATIONS + 1):
            if norm < self.tol:
                return _NewtonResult(u, v, norm, iteration - 1, True)
            try:
                delta = solve_banded((2, 2), self.jacobian(u, v), -r)
            except (np.linalg.LinAlgError, ValueError) as exc:
                logger.debug("Banded solve failed at eps=%.5g: %s", self.eps, exc)
                return _NewtonResult(u, v, norm, iteration, False)
            du, dv = delta[0::2], delta[1::2]
            step = 1.0
            l2 = float(np.linalg.norm(r))
            while step >= MIN_DAMPING:
                u_trial = u + step * du
                v_trial = v + step * dv
                if np.all(u_trial > 0.0) and np.all(v_trial > 0.0):
                    r_trial = self.residual(u_trial, v_trial)
                    if np.linalg.norm(r_trial) <= (1.0 - ARMIJO_C * step) * l2:
                        break
                step *= 0.5
            else:
                return _NewtonResult(u, v, norm, iteration, False)
            u, v, r = u_trial, v_trial, r_trial
            norm = float(np.max(np.abs(r)))
            logger.debug("Newton eps=%.5g iter=%d step=%.3g residual=%.3e", self.eps, iteration, step, norm)
        return _NewtonResult(u, v, norm, MAX_NEWTON_ITERATIONS, norm < self.tol)


def initial_guess(
    profile: ReducedProfile,
    x: np.ndarray,
    eps: float,
    kind: Literal["layered", "constant"] = "layered",
) -> tuple[np.ndarray, np.ndarray]:
    """Reduced profile with the jump replaced by a tanh of width eps*sqrt(sigma), or the constant state."""
    if kind == "constant":
        u_star, v_star = constant_steady_state(profile.a)
        return np.full_like(x, u_star), np.full_like(x, v_star)
    _, V = sample_profile(profile, x)
    lower = np.asarray(branch_eval(V, Branch.MINUS, profile.a))
    upper = np.asarray(branch_eval(V, Branch.PLUS, profile.a))
    weight = 0.5 * (1.0 + np.tanh((x - profile.x_star) / (eps * math.sqrt(profile.sigma))))
    return lower + (upper - lower) * weight, np.asarray(V, dtype=float)


def solve_layered_eps(
    params: ModelParams,
    profile: ReducedProfile,
    eps_schedule: Sequence[float] | None = None,
    *,
    nodes: int | None = None,
    tol: float | None = None,
    initial: Literal["layered", "constant"] = "layered",
) -> LayeredStateEps:
    """Continue the steady layered state in eps down to the last schedule entry."""
    started = perf_counter()
    nodes = nodes or settings.steady_nodes
    tol = tol or settings.newton_tol
    schedule = list(eps_schedule) if eps_schedule is not None else build_eps_schedule(params.eps)
    if any(later >= earlier for earlier, later in zip(schedule, schedule[1:])):
        raise ValueError(f"eps schedule must decrease strictly: {schedule}")

    target = schedule[-1]
    pending = list(schedule)
    eps = pending.pop(0)
    x = layered_grid(profile.x_star, eps, params.ell, nodes)
    u, v = initial_guess(profile, x, eps, initial)
    result = LayeredSteadySolver(x, eps, params, tol=tol).solve(u, v)
    if not result.converged:
        raise NewtonDivergence(
            f"Newton diverged at the first continuation value eps={eps}",
            last_converged_eps=None,
            residual=result.residual,
        )
    last_eps, last_x, last_u, last_v, last_residual = eps, x, result.u, result.v, result.residual

    while pending:
        eps = pending[0]
        x = layered_grid(profile.x_star, eps, params.ell, nodes)
        result = LayeredSteadySolver(x, eps, params, tol=tol).solve(
            np.interp(x, last_x, last_u), np.interp(x, last_x, last_v)
        )
        if result.converged:
            pending.pop(0)
            logger.debug("Converged at eps=%.6g in %d iterations", eps, result.iterations)
            last_eps, last_x, last_u, last_v, last_residual = eps, x, result.u, result.v, result.residual
            continue
        midpoint = 0.5 * (last_eps + eps)
        if last_eps - midpoint < MIN_EPS_STEP:
            raise NewtonDivergence(
                f"Newton diverged below eps={last_eps}",
                last_converged_eps=last_eps,
                attempted_eps=eps,
            )
        logger.warning("Newton failed at eps=%.6g; halving continuation step to %.6g", eps, midpoint)
        pending.insert(0, midpoint)

    state = _build_state(params, target, last_x, last_u, last_v, last_residual)
    if initial == "layered" and not _is_layered(state):
        raise NumericalFailure("continuation left the layered branch", eps=target)
    logger.info(
        "Solved layered steady state at eps=%.5g (%d nodes, residual %.2e) in %.2fs",
        target, last_x.size, last_residual, perf_counter() - started,
    )
    return state


def resample_state(
    state: LayeredStateEps,
    params: ModelParams,
    x: np.ndarray,
    *,
    tol: float | None = None,
) -> LayeredStateEps:
    """Interpolate a solved state onto another grid and re-converge it there."""
    tol = tol or settings.newton_tol
    x = np.asarray(x, dtype=float)
    solver = LayeredSteadySolver(x, state.eps, params.with_updates(eps=state.eps), tol=tol)
    result = solver.solve(np.interp(x, state.x, state.u), np.interp(x, state.x, state.v))
    if not result.converged:
        raise NumericalFailure(
            "steady state did not re-converge on the new grid",
            nodes=int(x.size),
            residual=result.residual,
        )
    return _build_state(solver.params, state.eps, x, result.u, result.v, result.residual)


def _build_state(params: ModelParams, eps: float, x, u, v, residual: float) -> LayeredStateEps:
    k = kinetics(u, v, params.a, params.sigma)
    return LayeredStateEps(
        eps=eps,
        a=params.a,
        sigma=params.sigma,
        d=params.d,
        ell=params.ell,
        x=x,
        u=u,
        v=v,
        f_u=k.f_u,
        f_v=k.f_v,
        g_u=k.g_u,
        g_v=k.g_v,
        newton_residual=residual,
        x_star=_layer_position(x, u),
    )


def _layer_position(x: np.ndarray, u: np.ndarray) -> float:
    level = 0.5 * (float(u.min()) + float(u.max()))
    above = np.nonzero(u >= level)[0]
    if above.size == 0 or above[0] == 0:
        return float("nan")
    i = above[0]
    return float(x[i - 1] + (level - u[i - 1]) * (x[i] - x[i - 1]) / (u[i] - u[i - 1]))


def _is_layered(state: LayeredStateEps) -> bool:
    return float(state.u.max() - state.u.min()) > 1.0 and math.isfinite(state.x_star)


def linearize_coeffs(state: LayeredStateEps) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(f_u, f_v, g_u, g_v) evaluated at the nodes of the state."""
    k = kinetics(state.u, state.v, state.a, state.sigma)
    return k.f_u, k.f_v, k.g_u, k.g_v


def steady_residual(state: LayeredStateEps, params: ModelParams) -> float:
    """Max-norm of the cell-integrated residual of the steady problem."""
    solver = LayeredSteadySolver(state.x, state.eps, params, tol=settings.newton_tol)
    return float(np.max(np.abs(solver.residual(state.u, state.v))))


def state_to_dict(state: LayeredStateEps) -> dict:
    return {
        "eps": state.eps,
        "x_star": state.x_star,
        "newton_residual": state.newton_residual,
        "x": state.x.tolist(),
        "u": state.u.tolist(),
        "v": state.v.tolist(),
    }


__all__ = [
    "layered_grid",
    "build_eps_schedule",
    "LayeredSteadySolver",
    "initial_guess",
    "solve_layered_eps",
    "resample_state",
    "linearize_coeffs",
    "steady_residual",
    "state_to_dict",
]
