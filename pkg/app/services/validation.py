"""
Named self-checks behind the ``validate`` subcommand.

Each suite returns ``{check_name: {"passed": bool, ...}}``; nothing here raises
on a failed check, the caller decides what a failure means.
"""
from __future__ import annotations

import logging
from time import perf_counter

import numpy as np

from app.schemas import ModelParams
from app.models import Branch
from app.services.model_core import (
    M_by_quadrature,
    M_of_v,
    branch_eval,
    find_vhat,
    fold_points,
    kinetics,
    kinetics_determinant,
)
from app.services.pipeline import ConstantsPipeline
from app.services.reduced_profile import first_integral, integral_g_left, solve_reduced
from app.services.slep import SlepSystem
from app.services.spectral import SpectralSums, eig_slow, resolvent_at_layer, tail_deviation
from app.utils.errors import ConsistencyError

logger = logging.getLogger(__name__)


def _check(passed: bool, **details) -> dict:
    return {"passed": bool(passed), **details}


def model_suite(params: ModelParams) -> dict:
    a, sigma = params.a, params.sigma
    folds = fold_points(a)
    v_mid = np.linspace(folds.v_lo, folds.v_hi, 41)[1:-1]
    h_minus = np.asarray(branch_eval(v_mid, Branch.MINUS, a))
    h_zero = np.asarray(branch_eval(v_mid, Branch.ZERO, a))
    h_plus = np.asarray(branch_eval(v_mid, Branch.PLUS, a))
    u = np.linspace(0.05, a, 200)
    v = np.linspace(0.05, a * a / 4.0, 200)
    k = kinetics(u, v, a, sigma)
    det = k.f_u * k.g_v - k.f_v * k.g_u
    v_hat = find_vhat(a, sigma)
    samples = np.linspace(folds.v_lo, folds.v_hi, 7)[1:-1]
    quadrature_gap = max(abs(M_of_v(s, a, sigma) - M_by_quadrature(s, a, sigma)) for s in samples)
    return {
        "fold_order": _check(
            max(1.0, 8.0 / a) < folds.u_lo < a / 5.0 < folds.u_hi and 2.0 * a / 5.0 < folds.u_hi < a / 2.0,
            **folds.to_dict(),
        ),
        "fold_values": _check(
            max(2.0, 1.0 + 64.0 / a**2) < folds.v_lo < 1.0 + a * a / 25.0 < folds.v_hi < a * a / 12.0 - 0.25
        ),
        "branch_order": _check(bool(np.all(h_minus < h_zero) and np.all(h_zero < h_plus))),
        "determinant_identity": _check(
            float(np.max(np.abs(det - kinetics_determinant(u, sigma)))) < 1e-12,
            max_error=float(np.max(np.abs(det - kinetics_determinant(u, sigma)))),
        ),
        "negative_cross_terms": _check(bool(np.all(k.f_v < 0.0) and np.all(k.g_v < 0.0))),
        "M_closed_form": _check(quadrature_gap < 1e-10, max_error=quadrature_gap),
        "v_hat_root": _check(abs(M_of_v(v_hat, a, sigma)) < 1e-12, v_hat=v_hat),
    }


def profile_suite(params: ModelParams) -> dict:
    profile = solve_reduced(params)
    left, right = first_integral(profile)
    left_drift = float(np.max(left) - np.min(left)) / max(1.0, float(np.max(np.abs(left))))
    right_drift = float(np.max(right) - np.min(right)) / max(1.0, float(np.max(np.abs(right))))
    flux_balance = params.d * profile.slope_at_layer + integral_g_left(profile)
    return {
        "layer_inside": _check(0.0 < profile.x_star < params.ell, x_star=profile.x_star),
        "c1_matching": _check(profile.slope_mismatch < 1e-8, slope_mismatch=profile.slope_mismatch),
        "first_integral_left": _check(left_drift < 1e-8, drift=left_drift),
        "first_integral_right": _check(right_drift < 1e-8, drift=right_drift),
        "flux_balance": _check(abs(flux_balance) < 1e-6, residual=flux_balance),
        "v_hat_at_layer": _check(abs(profile.V_left[-1] - profile.v_hat) < 1e-9, v_hat=profile.v_hat),
    }


def spectral_suite(params: ModelParams) -> dict:
    profile = solve_reduced(params)
    basis = eig_slow(profile)
    deviation = tail_deviation(basis)
    sums = SpectralSums(basis, 1.0)
    probes = [0.0, 1.0, complex(0.5, 2.0)]
    gaps = [abs(sums.S1(z) - resolvent_at_layer(basis, z)) / abs(resolvent_at_layer(basis, z)) for z in probes]
    return {
        "gamma_increasing": _check(bool(np.all(np.diff(basis.gamma) > 0.0))),
        "gamma0_positive": _check(basis.gamma0 > 0.0, gamma0=basis.gamma0),
        "tail_law": _check(deviation < 0.05, max_relative_deviation=deviation),
        "sums_vs_resolvent": _check(max(gaps) < 1e-2, relative_gaps=gaps),
    }


def slep_suite(params: ModelParams, pipeline: ConstantsPipeline) -> dict:
    constants = pipeline.run(params)
    tau = params.tau if params.tau > constants.tau_star else 1.5 * constants.tau_star
    system = SlepSystem(constants, tau)
    report = {
        f"property_{name}": check for name, check in system.property_suite().items()
    }
    k1 = 0.25 * constants.rho0_star
    k2 = 0.5 * constants.gamma0
    try:
        no_crossing = system.slep1_no_crossing_check(k1, k2, list(constants.gamma0 * np.logspace(-2, 2, 9)))
        report["slep1_no_crossing"] = _check(True, margin=no_crossing["min_imaginary_margin"])
    except ConsistencyError as exc:
        report["slep1_no_crossing"] = _check(False, error=str(exc))
    xi = system.turing_curve_xi(k1)
    report["turing_curve_root"] = _check(abs(system.turing_residual(k1, xi)) < 1e-9, k1=k1, xi=xi)
    report["tau_above_tau_star"] = _check(tau > constants.tau_star, tau=tau, tau_star=constants.tau_star)
    return report


def run_suite(name: str, params: ModelParams, pipeline: ConstantsPipeline | None = None) -> dict:
    started = perf_counter()
    if name == "model":
        report = model_suite(params)
    elif name == "profile":
        report = profile_suite(params)
    elif name == "spectral":
        report = spectral_suite(params)
    elif name == "slep":
        report = slep_suite(params, pipeline or ConstantsPipeline())
    else:
        raise ValueError(f"unknown suite '{name}'")
    failed = [check for check, result in report.items() if not result["passed"]]
    logger.info("Validation suite %s: %d checks, %d failed in %.2fs", name, len(report), len(failed), perf_counter() - started)
    if failed:
        logger.warning("Failed checks: %s", ", ".join(failed))
    return report


__all__ = ["model_suite", "profile_suite", "spectral_suite", "slep_suite", "run_suite"]
