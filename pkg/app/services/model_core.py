from __future__ import annotations

from functools import lru_cache
import logging
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from app.models import Branch, KineticsEval, NullclineBranches
from app.schemas import SIGMOIDAL_THRESHOLD, ModelParams, OriginalParams
from app.utils.errors import DomainError, NumericalFailure, RegimeError

logger = logging.getLogger(__name__)

# Below 3*sqrt(3) the stationarity cubic has no positive roots at all
FOLD_MERGE_THRESHOLD = 3.0 * math.sqrt(3.0)
ROOT_XTOL = 1e-14


def reduce_parameters(
    original: OriginalParams,
    *,
    eps_override: float | None = None,
) -> tuple[ModelParams, float]:
    """Map laboratory parameters to the reduced system.

    Returns the reduced parameters and the time scale b (reduced time = b * t).
    """
    eps = math.sqrt(original.d1 / original.sigma)
    stretch = math.sqrt(original.sigma / original.d1)
    b = original.b
    params = ModelParams(
        a=original.a,
        sigma=original.sigma,
        eps=eps_override if eps_override is not None else eps,
        tau=b * stretch,
        d=original.d2 / b,
        k1=original.k1_orig * stretch,
        k2=original.k2 / b,
        alpha=original.alpha / b,
        ell=original.ell,
    )
    logger.debug(
        "Reduced parameters: eps=%.6g tau=%.6g d=%.6g k1=%.6g k2=%.6g (time scale %.6g)",
        params.eps, params.tau, params.d, params.k1, params.k2, b,
    )
    return params, b


def constant_steady_state(a: float) -> tuple[float, float]:
    """The unique constant steady state (a/5, 1 + a^2/25)."""
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}", a=a)
    u = a / 5.0
    return u, 1.0 + u * u


def kinetics(u, v, a: float, sigma: float) -> KineticsEval:
    """Evaluate f = (a - u - 4uv/(1+u^2))/sigma, g = u - uv/(1+u^2) and their partials."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u <= 0):
        raise DomainError("kinetics require u > 0", u_min=float(np.min(u)))
    s = 1.0 + u * u
    w = (1.0 - u * u) / (s * s)
    f = (a - u - 4.0 * u * v / s) / sigma
    g = u - u * v / s
    f_u = -(1.0 + 4.0 * v * w) / sigma
    f_v = -4.0 * u / (sigma * s)
    g_u = 1.0 - v * w
    g_v = -u / s
    return KineticsEval(
        f=_scalar_or_array(f),
        g=_scalar_or_array(g),
        f_u=_scalar_or_array(f_u),
        f_v=_scalar_or_array(f_v),
        g_u=_scalar_or_array(g_u),
        g_v=_scalar_or_array(g_v),
    )


def kinetics_determinant(u, sigma: float):
    """Closed form of f_u g_v - f_v g_u, which does not depend on v."""
    u = np.asarray(u, dtype=float)
    return _scalar_or_array(5.0 * u / (sigma * (1.0 + u * u)))


def constant_state_jacobian(params: ModelParams) -> np.ndarray:
    """Linearization of the decoupled system at the constant state.

    Rows are (u, v); the activator row carries the 1/(eps tau) factor of the
    time-dependent problem.
    """
    u, v = constant_steady_state(params.a)
    k = kinetics(u, v, params.a, params.sigma)
    scale = 1.0 / (params.eps * params.tau)
    return np.array(
        [
            [k.f_u * scale, k.f_v * scale],
            [k.g_u, k.g_v],
        ]
    )


def constant_state_is_unstable_activator(a: float) -> bool:
    """Whether f_u > 0 at the constant state, i.e. a > (5/3)sqrt(15)."""
    u = a / 5.0
    return 3.0 * u * u - 5.0 > 0.0


def nullcline_v(u, a: float):
    """The f-nullcline written as v = (a - u)(1 + u^2)/(4u)."""
    u = np.asarray(u, dtype=float)
    return _scalar_or_array((a - u) * (1.0 + u * u) / (4.0 * u))


def fold_cubic_roots(a: float) -> tuple[float, float]:
    """Positive roots of 2u^3 - a u^2 + a = 0, the extrema of the nullcline.

    Defined for any a > 3*sqrt(3); the sigmoidal guard is applied by fold_points.
    """
    if not a > FOLD_MERGE_THRESHOLD:
        raise DomainError(
            f"fold cubic has no distinct positive roots for a={a} <= 3*sqrt(3)",
            a=a,
            threshold=FOLD_MERGE_THRESHOLD,
        )

    def cubic(u: float) -> float:
        return 2.0 * u**3 - a * u * u + a

    u_min = a / 3.0
    u_lo = brentq(cubic, 0.0, u_min, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    u_hi = brentq(cubic, u_min, a / 2.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    return u_lo, u_hi


def require_sigmoidal(a: float) -> None:
    if not a > SIGMOIDAL_THRESHOLD:
        raise RegimeError(
            f"non-sigmoidal regime: a={a} must exceed (5/3)sqrt(15)={SIGMOIDAL_THRESHOLD:.6f}",
            a=a,
            threshold=SIGMOIDAL_THRESHOLD,
        )


@lru_cache(maxsize=64)
def fold_points(a: float) -> NullclineBranches:
    """Fold coordinates of the sigmoidal nullcline."""
    require_sigmoidal(a)
    u_lo, u_hi = fold_cubic_roots(a)
    branches = NullclineBranches(
        a=a,
        u_lo=u_lo,
        u_hi=u_hi,
        v_lo=float(nullcline_v(u_lo, a)),
        v_hi=float(nullcline_v(u_hi, a)),
    )
    logger.debug(
        "Fold points for a=%.6g: u=(%.10f, %.10f), v=(%.10f, %.10f)",
        a, branches.u_lo, branches.u_hi, branches.v_lo, branches.v_hi,
    )
    return branches


def _check_domain(v: np.ndarray, branch: Branch, folds: NullclineBranches) -> None:
    tol = 1e-12 * max(1.0, folds.v_hi)
    if branch is Branch.MINUS:
        bad = v < folds.v_lo - tol
        interval = f"[{folds.v_lo:.12g}, inf)"
    elif branch is Branch.PLUS:
        bad = (v < -tol) | (v > folds.v_hi + tol)
        interval = f"[0, {folds.v_hi:.12g}]"
    else:
        bad = (v <= folds.v_lo) | (v >= folds.v_hi)
        interval = f"({folds.v_lo:.12g}, {folds.v_hi:.12g})"
    if np.any(bad):
        offending = float(v[np.argmax(bad)])
        raise DomainError(
            f"v={offending:.12g} outside the domain of h_{branch.value}: {interval}",
            branch=branch.value,
            v=offending,
            interval=interval,
        )


def branch_eval(v, branch: Branch | str, a: float):
    """Solve (a - u)(1 + u^2) = 4uv for u on one branch of the nullcline.

    Inside [v_lo, v_hi] the cubic u^3 - a u^2 + (1 + 4v) u - a has three real
    roots and the trigonometric form is used; outside only one real root exists
    and Cardano's formula applies. One Newton step polishes every root.
    """
    branch = Branch(branch)
    folds = fold_points(a)
    v_arr = np.atleast_1d(np.asarray(v, dtype=float))
    _check_domain(v_arr, branch, folds)

    c = 1.0 + 4.0 * v_arr
    shift = a / 3.0
    p = c - a * a / 3.0
    q = -2.0 * a**3 / 27.0 + a * c / 3.0 - a

    u = np.empty_like(v_arr)
    three = (v_arr >= folds.v_lo) & (v_arr <= folds.v_hi)
    if np.any(three):
        p3 = p[three]
        q3 = q[three]
        radius = 2.0 * np.sqrt(-p3 / 3.0)
        arg = np.clip(3.0 * q3 / (2.0 * p3) * np.sqrt(-3.0 / p3), -1.0, 1.0)
        theta = np.arccos(arg) / 3.0
        k = {Branch.PLUS: 0, Branch.ZERO: 1, Branch.MINUS: 2}[branch]
        u[three] = radius * np.cos(theta - 2.0 * np.pi * k / 3.0) + shift
    single = ~three
    if np.any(single):
        p1 = p[single]
        q1 = q[single]
        root = np.sqrt(q1 * q1 / 4.0 + p1**3 / 27.0)
        u[single] = np.cbrt(-q1 / 2.0 + root) + np.cbrt(-q1 / 2.0 - root) + shift

    residual = u**3 - a * u * u + c * u - a
    slope = 3.0 * u * u - 2.0 * a * u + c
    safe = np.abs(slope) > 1e-8 * (1.0 + a * a)
    u = np.where(safe, u - residual / np.where(safe, slope, 1.0), u)

    if np.ndim(v) == 0:
        return float(u[0])
    return u


def M_of_v(v, a: float, sigma: float):
    """M(v): integral of f(s, v) ds from h-(v) to h+(v), by the closed antiderivative."""
    v_arr = np.asarray(v, dtype=float)
    h_minus = np.asarray(branch_eval(v_arr, Branch.MINUS, a))
    h_plus = np.asarray(branch_eval(v_arr, Branch.PLUS, a))
    value = _antiderivative_f(h_plus, v_arr, a, sigma) - _antiderivative_f(h_minus, v_arr, a, sigma)
    return _scalar_or_array(value)


def M_prime(v, a: float, sigma: float):
    """dM/dv = -(2/sigma)[ln(1 + h+^2) - ln(1 + h-^2)]."""
    v_arr = np.asarray(v, dtype=float)
    h_minus = np.asarray(branch_eval(v_arr, Branch.MINUS, a))
    h_plus = np.asarray(branch_eval(v_arr, Branch.PLUS, a))
    value = -(2.0 / sigma) * (np.log1p(h_plus**2) - np.log1p(h_minus**2))
    return _scalar_or_array(value)


def M_by_quadrature(v: float, a: float, sigma: float) -> float:
    """Adaptive-quadrature evaluation of M, kept as an independent check."""
    h_minus = branch_eval(v, Branch.MINUS, a)
    h_plus = branch_eval(v, Branch.PLUS, a)
    value, _ = quad(
        lambda s: (a - s - 4.0 * s * v / (1.0 + s * s)) / sigma,
        h_minus,
        h_plus,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    return value


@lru_cache(maxsize=64)
def find_vhat(a: float, sigma: float) -> float:
    """Unique zero of M on [v_lo, v_hi]."""
    folds = fold_points(a)
    m_lo = M_of_v(folds.v_lo, a, sigma)
    m_hi = M_of_v(folds.v_hi, a, sigma)
    if not (m_lo > 0.0 > m_hi):
        raise NumericalFailure(
            "M(v) does not change sign between the folds",
            M_at_v_lo=m_lo,
            M_at_v_hi=m_hi,
        )
    v_hat = brentq(
        lambda v: M_of_v(v, a, sigma),
        folds.v_lo,
        folds.v_hi,
        xtol=ROOT_XTOL,
        rtol=4 * np.finfo(float).eps,
    )
    logger.debug("v_hat=%.12f for a=%.6g sigma=%.6g", v_hat, a, sigma)
    return v_hat


def inner_layer_kappa(a: float, sigma: float, v_hat: float | None = None) -> float:
    """Normalization constant of the layer eigenfunction from the inner profile.

    The inner layer solves u'' + f(u, v_hat) = 0 on the real line and satisfies
    u' = sqrt(-2F(u)) with F(u) the integral of f(., v_hat) from h-(v_hat). The
    limit eigenfunction is kappa* u'((x - x*)/eps)/sqrt(eps), so
    kappa*^-2 = integral of sqrt(-2F(u)) du over [h-(v_hat), h+(v_hat)].
    """
    if v_hat is None:
        v_hat = find_vhat(a, sigma)
    h_minus = branch_eval(v_hat, Branch.MINUS, a)
    h_plus = branch_eval(v_hat, Branch.PLUS, a)
    base = float(_antiderivative_f(h_minus, v_hat, a, sigma))

    def speed(u: float) -> float:
        potential = float(_antiderivative_f(u, v_hat, a, sigma)) - base
        return math.sqrt(max(-2.0 * potential, 0.0))

    middle = branch_eval(v_hat, Branch.ZERO, a)
    value, _ = quad(speed, h_minus, h_plus, points=[middle], epsabs=1e-13, epsrel=1e-12, limit=400)
    if value <= 0.0:
        raise NumericalFailure("inner layer energy integral is not positive", value=value)
    return 1.0 / math.sqrt(value)


def _antiderivative_f(s, v, a: float, sigma: float):
    return (a * s - 0.5 * s * s - 2.0 * v * np.log1p(s * s)) / sigma


def _scalar_or_array(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


__all__ = [
    "FOLD_MERGE_THRESHOLD",
    "reduce_parameters",
    "constant_steady_state",
    "kinetics",
    "kinetics_determinant",
    "constant_state_jacobian",
    "constant_state_is_unstable_activator",
    "nullcline_v",
    "fold_cubic_roots",
    "require_sigmoidal",
    "fold_points",
    "branch_eval",
    "M_of_v",
    "M_prime",
    "M_by_quadrature",
    "find_vhat",
    "inner_layer_kappa",
]
