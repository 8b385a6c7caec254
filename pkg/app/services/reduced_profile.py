from __future__ import annotations

from time import perf_counter
import logging
import math

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq, root

from app.config import settings
from app.models import Branch, ReducedProfile
from app.schemas import ModelParams
from app.services.model_core import branch_eval, find_vhat, fold_points, require_sigmoidal
from app.utils.errors import DomainError, NumericalFailure, RegimeError

logger = logging.getLogger(__name__)

# Relative distance to a fold below which the branch evaluators are considered unreliable
FOLD_MARGIN = 1e-6
ODE_RTOL = 1e-11
ODE_ATOL = 1e-13


def G_branch(v, branch: Branch | str, a: float):
    """g restricted to an outer branch: G(v) = h(v) - h(v) v / (1 + h(v)^2)."""
    h = np.asarray(branch_eval(v, branch, a))
    value = h - h * np.asarray(v, dtype=float) / (1.0 + h * h)
    if np.ndim(value) == 0:
        return float(value)
    return value


def branch_potential(v, branch: Branch | str, a: float):
    """Antiderivative of G along a branch.

    On the nullcline g = (5u - a)/4 and dv/du = a/4 - u/2 - a/(4u^2), so the
    integral of G dv is a closed expression in u = h(v).
    """
    u = np.asarray(branch_eval(v, branch, a))
    value = (
        -10.0 * u**3 / 3.0 + 3.5 * a * u * u - a * a * u - 5.0 * a * np.log(u) - a * a / u
    ) / 16.0
    if np.ndim(value) == 0:
        return float(value)
    return value


def _shoot_left(V0: float, v_hat: float, a: float, d: float, span: float, dense: bool = False):
    def rhs(_x, y):
        return [y[1], -G_branch(y[0], Branch.MINUS, a) / d]

    def reach(_x, y):
        return y[0] - v_hat

    reach.terminal = True
    reach.direction = 1.0
    return _integrate(rhs, reach, V0, span, dense, "left")


def _shoot_right(V_ell: float, v_hat: float, a: float, d: float, span: float, dense: bool = False):
    # integrated in y = ell - x, where the profile decreases toward v_hat
    def rhs(_y, state):
        return [state[1], -G_branch(state[0], Branch.PLUS, a) / d]

    def reach(_y, state):
        return state[0] - v_hat

    reach.terminal = True
    reach.direction = -1.0
    return _integrate(rhs, reach, V_ell, span, dense, "right")


def _integrate(rhs, event, start: float, span: float, dense: bool, side: str):
    solution = solve_ivp(
        rhs,
        (0.0, span),
        [start, 0.0],
        method="DOP853",
        events=event,
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=dense,
    )
    if solution.status == -1 or not solution.t_events[0].size:
        raise NumericalFailure(
            f"{side} shooting did not reach v_hat",
            start=start,
            span=span,
            message=solution.message,
        )
    return solution


class _Shooter:
    """Two-sided shooting for the outer problems with a common layer level v_hat."""

    def __init__(self, params: ModelParams) -> None:
        self.a = params.a
        self.d = params.d
        self.ell = params.ell
        self.folds = fold_points(params.a)
        self.v_hat = find_vhat(params.a, params.sigma)
        self.span = 50.0 * max(params.ell, math.sqrt(params.d), 1.0)
        self.p_minus_hat = branch_potential(self.v_hat, Branch.MINUS, self.a)
        self.p_plus_hat = branch_potential(self.v_hat, Branch.PLUS, self.a)

    def left_energy(self, V0: float) -> float:
        """(d/2) V'(x*)^2 reached from V(0) = V0 with V'(0) = 0."""
        return branch_potential(V0, Branch.MINUS, self.a) - self.p_minus_hat

    def right_energy(self, V_ell: float) -> float:
        return branch_potential(V_ell, Branch.PLUS, self.a) - self.p_plus_hat

    def matching_right_end(self, V0: float) -> float:
        """V(ell) giving the same slope at x* as the left piece started at V0."""
        target = self.left_energy(V0)
        return brentq(
            lambda V: self.right_energy(V) - target,
            self.v_hat,
            self.folds.v_hi,
            xtol=1e-14,
            rtol=4 * np.finfo(float).eps,
        )

    def smallest_start(self) -> float:
        """Lowest admissible V(0): at the fold or where the right end reaches v_hi."""
        ceiling = self.right_energy(self.folds.v_hi)
        if self.left_energy(self.folds.v_lo) <= ceiling:
            return self.folds.v_lo
        return brentq(
            lambda V: self.left_energy(V) - ceiling,
            self.folds.v_lo,
            self.v_hat,
            xtol=1e-14,
            rtol=4 * np.finfo(float).eps,
        )

    def left(self, V0: float, dense: bool = False):
        return _shoot_left(V0, self.v_hat, self.a, self.d, self.span, dense)

    def right(self, V_ell: float, dense: bool = False):
        return _shoot_right(V_ell, self.v_hat, self.a, self.d, self.span, dense)

    def length(self, V0: float) -> float:
        V_ell = self.matching_right_end(V0)
        return float(self.left(V0).t_events[0][0] + self.right(V_ell).t_events[0][0])

    def residual(self, unknowns) -> np.ndarray:
        """(x*_left - x*_right, slope mismatch) for unknowns (V(0), V(ell))."""
        V0, V_ell = unknowns
        left = self.left(V0)
        right = self.right(V_ell)
        x_left = left.t_events[0][0]
        x_right = self.ell - right.t_events[0][0]
        slope_left = left.y_events[0][0][1]
        slope_right = -right.y_events[0][0][1]
        return np.array([x_left - x_right, slope_left - slope_right])


def solve_reduced(
    params: ModelParams,
    *,
    tol: float = 1e-10,
    nodes: int | None = None,
) -> ReducedProfile:
    """Construct the eps = 0 layered solution by two-sided shooting with C^1 matching."""
    started = perf_counter()
    require_sigmoidal(params.a)
    nodes = nodes or settings.profile_nodes
    shooter = _Shooter(params)
    folds = shooter.folds
    margin = FOLD_MARGIN * (folds.v_hi - folds.v_lo)

    V0_min = shooter.smallest_start() + margin
    V0_max = shooter.v_hat - margin
    longest = shooter.length(V0_min)
    shortest = shooter.length(V0_max)
    logger.debug(
        "Reduced shooting bracket V0 in [%.10f, %.10f] -> lengths [%.6f, %.6f]",
        V0_min, V0_max, longest, shortest,
    )
    if not shortest < params.ell < longest:
        raise RegimeError(
            "no layered solution at this d",
            d=params.d,
            ell=params.ell,
            V0_bracket=[V0_min, V0_max],
            length_bracket=[shortest, longest],
        )

    V0 = brentq(
        lambda V: shooter.length(V) - params.ell,
        V0_min,
        V0_max,
        xtol=1e-13,
        rtol=4 * np.finfo(float).eps,
    )
    V_ell = shooter.matching_right_end(V0)

    polished = root(shooter.residual, [V0, V_ell], method="hybr", tol=1e-14)
    if polished.success:
        V0, V_ell = (float(value) for value in polished.x)
    else:
        logger.warning("Shooting polish did not converge (%s); keeping bracketed root", polished.message)

    if V0 - folds.v_lo < margin or folds.v_hi - V_ell < margin:
        raise RegimeError(
            "layered solution touches a fold of the nullcline",
            V0=V0,
            V_ell=V_ell,
            v_lo=folds.v_lo,
            v_hi=folds.v_hi,
        )

    profile = _sample_solution(shooter, params, V0, V_ell, nodes)
    scale = max(float(np.max(np.abs(profile.dV_left))), float(np.max(np.abs(profile.dV_right))), 1e-300)
    if profile.slope_mismatch > max(tol, 1e-6 * scale):
        raise NumericalFailure(
            "C^1 matching residual above tolerance",
            slope_mismatch=profile.slope_mismatch,
            tol=tol,
        )

    logger.info(
        "Solved reduced problem: x*=%.8f v_hat=%.8f V(0)=%.8f V(ell)=%.8f in %.2fs",
        profile.x_star, profile.v_hat, V0, V_ell, perf_counter() - started,
    )
    return profile


def _sample_solution(
    shooter: _Shooter,
    params: ModelParams,
    V0: float,
    V_ell: float,
    nodes: int,
) -> ReducedProfile:
    left = shooter.left(V0, dense=True)
    right = shooter.right(V_ell, dense=True)
    x_left_star = float(left.t_events[0][0])
    y_right_star = float(right.t_events[0][0])
    x_star = 0.5 * (x_left_star + params.ell - y_right_star)

    s = np.linspace(0.0, 1.0, nodes)
    # both pieces cluster nodes toward the layer
    x_left = x_star * (1.0 - (1.0 - s) ** 1.5)
    x_right = x_star + (params.ell - x_star) * s**1.5

    left_states = left.sol(np.clip(x_left / x_star * x_left_star, 0.0, x_left_star))
    y = (params.ell - x_right) / (params.ell - x_star) * y_right_star
    right_states = right.sol(np.clip(y, 0.0, y_right_star))

    V_left = left_states[0].copy()
    dV_left = left_states[1].copy()
    V_right = right_states[0].copy()
    dV_right = -right_states[1].copy()
    V_left[-1] = shooter.v_hat
    V_right[0] = shooter.v_hat
    dV_left[0] = 0.0
    dV_right[-1] = 0.0

    slope_left = float(left.y_events[0][0][1])
    slope_right = float(-right.y_events[0][0][1])
    dV_left[-1] = slope_left
    dV_right[0] = slope_right

    return ReducedProfile(
        a=params.a,
        sigma=params.sigma,
        d=params.d,
        ell=params.ell,
        x_star=x_star,
        v_hat=shooter.v_hat,
        x_left=x_left,
        V_left=V_left,
        dV_left=dV_left,
        x_right=x_right,
        V_right=V_right,
        dV_right=dV_right,
        slope_mismatch=abs(slope_left - slope_right),
    )


def integral_g_left(profile: ReducedProfile) -> float:
    """Integral of g(U*, V*) over (0, x*); negative because g < 0 on the minus branch."""
    values = G_branch(profile.V_left, Branch.MINUS, profile.a)
    return float(simpson(values, x=profile.x_left))


def first_integral(profile: ReducedProfile) -> tuple[np.ndarray, np.ndarray]:
    """(d/2) V'^2 + integral of G along each outer piece; constant on each piece."""
    left = 0.5 * profile.d * profile.dV_left**2 + branch_potential(profile.V_left, Branch.MINUS, profile.a)
    right = 0.5 * profile.d * profile.dV_right**2 + branch_potential(profile.V_right, Branch.PLUS, profile.a)
    return left, right


def sample_profile(profile: ReducedProfile, x):
    """Evaluate (U*, V*) at x.

    A scalar x equal to x* returns the one-sided pair (h-(v_hat), h+(v_hat)) for U*.
    Array nodes at x* take the left limit.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0.0) or np.any(x_arr > profile.ell):
        raise DomainError(
            f"x outside [0, {profile.ell}]",
            x_min=float(np.min(x_arr)),
            x_max=float(np.max(x_arr)),
        )
    if np.ndim(x) == 0 and float(x) == profile.x_star:
        pair = (
            branch_eval(profile.v_hat, Branch.MINUS, profile.a),
            branch_eval(profile.v_hat, Branch.PLUS, profile.a),
        )
        return pair, profile.v_hat

    left_spline = CubicHermiteSpline(profile.x_left, profile.V_left, profile.dV_left)
    right_spline = CubicHermiteSpline(profile.x_right, profile.V_right, profile.dV_right)
    on_left = x_arr <= profile.x_star
    V = np.where(on_left, left_spline(np.minimum(x_arr, profile.x_star)), right_spline(np.maximum(x_arr, profile.x_star)))
    U = np.empty_like(V)
    if np.any(on_left):
        U[on_left] = branch_eval(V[on_left], Branch.MINUS, profile.a)
    if np.any(~on_left):
        U[~on_left] = branch_eval(V[~on_left], Branch.PLUS, profile.a)

    if np.ndim(x) == 0:
        return float(U[0]), float(V[0])
    return U, V


def profile_to_dict(profile: ReducedProfile) -> dict:
    return {
        "x_star": profile.x_star,
        "v_hat": profile.v_hat,
        "grid": profile.grid.tolist(),
        "V": profile.V.tolist(),
        "U_left_of_layer": np.asarray(branch_eval(profile.V_left, Branch.MINUS, profile.a)).tolist(),
        "U_right_of_layer": np.asarray(branch_eval(profile.V_right, Branch.PLUS, profile.a)).tolist(),
        "slope_mismatch": profile.slope_mismatch,
    }


__all__ = [
    "G_branch",
    "branch_potential",
    "solve_reduced",
    "integral_g_left",
    "first_integral",
    "sample_profile",
    "profile_to_dict",
]
