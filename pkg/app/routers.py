"""
Subcommand handlers.

Every handler takes the resolved RunConfig and returns a CommandResult; the
entry point decides whether it becomes JSON, CSV, a file or stdout.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from app.models import Branch
from app.schemas import (
    ConstantsResponse,
    HopfResponse,
    PerturbationSpec,
    RegionResponse,
    RunConfig,
    SimConfig,
    SweepJob,
)
from app.services.model_core import branch_eval, constant_steady_state, find_vhat, fold_points
from app.services.pipeline import ConstantsPipeline
from app.services.reduced_profile import profile_to_dict, sample_profile, solve_reduced
from app.services.simulate import component_names, simulate, threshold_scan
from app.services.slep import SlepSystem
from app.services.spectral import eig_fast, eig_slow, tail_deviation
from app.services.steady_eps import solve_layered_eps, state_to_dict, steady_residual
from app.services.sweep import run_sweep
from app.services.validation import run_suite
from app.utils.errors import LayerModelError


logger = logging.getLogger(__name__)


@dataclass(slots=True)
class CommandResult:
    """What a subcommand produced.

    ``columns``/``rows`` are the CSV rendering; ``extra_csv`` maps a file-name
    suffix to additional tables written next to ``--output``. ``written`` is set
    when the handler already wrote its artifact.
    """
    payload: Any
    columns: tuple[str, ...] | None = None
    rows: list[list[Any]] | None = None
    extra_csv: dict[str, tuple[tuple[str, ...], list[list[Any]]]] = field(default_factory=dict)
    written: Path | None = None
    failed: bool = False


def _optional(value: float) -> float | None:
    return None if value is None or not math.isfinite(value) else float(value)


def _pipeline(run: RunConfig) -> ConstantsPipeline:
    return ConstantsPipeline(
        cache_dir=run.cache_dir,
        cache_enabled=run.cache_enabled,
        kappa_method=run.payload.get("kappa_method", "extrapolated"),
    )


def _slep_system(run: RunConfig) -> SlepSystem:
    constants = _pipeline(run).run(run.params)
    return SlepSystem(constants, run.params.tau)


def nullclines(run: RunConfig) -> CommandResult:
    a, sigma = run.params.a, run.params.sigma
    folds = fold_points(a)
    u0, v0 = constant_steady_state(a)
    span = folds.v_hi - folds.v_lo
    v = np.linspace(0.5 * folds.v_lo, folds.v_hi + 0.5 * span, run.payload.get("points", 201))
    branches = {}
    for branch in (Branch.MINUS, Branch.ZERO, Branch.PLUS):
        lo, hi = folds.domain(branch)
        inside = (v > lo) & (v < hi) if branch is Branch.ZERO else (v >= lo) & (v <= hi)
        values = np.full(v.shape, np.nan)
        values[inside] = branch_eval(v[inside], branch, a)
        branches[branch] = values
    rows = [
        [float(v[i]), *(_optional(branches[branch][i]) for branch in (Branch.MINUS, Branch.ZERO, Branch.PLUS))]
        for i in range(v.size)
    ]
    columns = ("v", "h_minus", "h_zero", "h_plus")
    payload = {
        "folds": folds.to_dict(),
        "v_hat": find_vhat(a, sigma),
        "constant_state": {"u": u0, "v": v0},
        "samples": [dict(zip(columns, row)) for row in rows],
    }
    return CommandResult(payload=payload, columns=columns, rows=rows)


def reduced(run: RunConfig) -> CommandResult:
    profile = solve_reduced(run.params, nodes=run.payload.get("nodes"))
    U, V = sample_profile(profile, profile.grid)
    rows = [[float(x), float(v), float(u)] for x, v, u in zip(profile.grid, V, U)]
    return CommandResult(payload=profile_to_dict(profile), columns=("x", "V", "U"), rows=rows)


def steady(run: RunConfig) -> CommandResult:
    profile = solve_reduced(run.params)
    state = solve_layered_eps(
        run.params,
        profile,
        nodes=run.payload.get("nodes"),
        initial=run.payload.get("initial", "layered"),
    )
    payload = state_to_dict(state)
    payload["steady_residual"] = steady_residual(state, run.params)
    rows = [[float(x), float(u), float(v)] for x, u, v in zip(state.x, state.u, state.v)]
    return CommandResult(payload=payload, columns=("x", "u", "v"), rows=rows)


def spectral(run: RunConfig) -> CommandResult:
    profile = solve_reduced(run.params)
    basis = eig_slow(profile, N_target=run.payload.get("modes"), nodes=run.payload.get("nodes"))
    payload: dict[str, Any] = {
        "x_star": basis.x_star,
        "gamma0": basis.gamma0,
        "gamma_bar": basis.gamma_bar,
        "q_min": basis.q_min,
        "tail_kappa": basis.tail_kappa,
        "tail_deviation": tail_deviation(basis),
        "gamma": basis.gamma.tolist(),
        "psi_at_xstar": basis.psi_at_xstar.tolist(),
    }
    if run.payload.get("fast"):
        fast = eig_fast(solve_layered_eps(run.params, profile))
        payload["fast"] = {
            "eps": fast.eps,
            "mu": fast.mu.tolist(),
            "rho_eps": fast.rho_eps,
            "concentration": fast.concentration,
            "concentration_width": fast.concentration_width,
        }
    rows = [[n, float(g), float(p)] for n, (g, p) in enumerate(zip(basis.gamma, basis.psi_at_xstar))]
    return CommandResult(payload=payload, columns=("n", "gamma", "psi_at_xstar"), rows=rows)


def constants(run: RunConfig) -> CommandResult:
    result = _pipeline(run).run(run.params)
    response = ConstantsResponse(**result.to_dict())
    payload = response.model_dump()
    columns = tuple(payload)
    return CommandResult(payload=payload, columns=columns, rows=[[payload[key] for key in columns]])


def turing_curve(run: RunConfig) -> CommandResult:
    system = _slep_system(run)
    scale = system.rho0 if run.payload.get("relative_to", "rho0") == "rho0" else 1.0
    k1_values = np.linspace(run.payload.get("k1_min", 0.0), run.payload.get("k1_max", 0.49), run.payload.get("count", 25))
    rows = []
    for k1 in scale * k1_values:
        try:
            xi = system.turing_curve_xi(float(k1))
            rows.append([float(k1), xi, system.turing_curve_slope(float(k1)), None])
        except LayerModelError as exc:
            logger.debug("Turing curve undefined at k1=%.6g: %s", k1, exc)
            rows.append([float(k1), None, None, f"{type(exc).__name__}: {exc}"])
    columns = ("k1", "xi", "slope", "error")
    payload = {"rho0_star": system.rho0, "points": [dict(zip(columns, row)) for row in rows]}
    return CommandResult(payload=payload, columns=columns, rows=rows)


def hopf(run: RunConfig) -> CommandResult:
    system = _slep_system(run)
    solution = system.find_hopf(
        run.params.k1,
        run.params.k2,
        with_transversality=not run.payload.get("no_transversality", False),
    )
    payload = HopfResponse(**solution.to_dict()).model_dump()
    scalars = tuple(key for key, value in payload.items() if not isinstance(value, list))
    return CommandResult(payload=payload, columns=scalars, rows=[[payload[key] for key in scalars]])


def classify(run: RunConfig) -> CommandResult:
    point = _slep_system(run).classify(run.params.k1, run.params.k2)
    payload = RegionResponse(**point.to_dict()).model_dump()
    columns = tuple(payload)
    return CommandResult(payload=payload, columns=columns, rows=[[payload[key] for key in columns]])


def simulate_command(run: RunConfig) -> CommandResult:
    options = run.payload
    config = SimConfig(
        system=options.get("system", "coupled4"),
        params=run.params,
        nodes=options.get("nodes", 401),
        dt=options.get("dt"),
        t_end=options.get("t_end", 50.0),
        perturbation=PerturbationSpec(
            mode=options.get("mode", "antisymmetric"),
            amplitude=options.get("amplitude", 1e-4),
            width_eps=options.get("width_eps", 5.0),
            noise=options.get("noise", 0.0),
            seed=run.seed,
            shape=options.get("shape", "bump"),
        ),
        stride=options.get("stride", 10),
        snapshot_stride=options.get("snapshot_stride"),
        initial=options.get("initial", "layered"),
    )
    result = simulate(config)
    diagnostics = result.diagnostics
    rows = [
        [float(t), float(a), float(d)]
        for t, a, d in zip(diagnostics.times, diagnostics.asym_norm, diagnostics.dev_norm)
    ]
    payload = {
        **diagnostics.to_dict(),
        "system": config.system.value,
        "halvings": result.halvings,
        "t_final": result.final.t,
        "times": diagnostics.times.tolist(),
        "asym_norm": diagnostics.asym_norm.tolist(),
        "dev_norm": diagnostics.dev_norm.tolist(),
    }
    extra = {}
    if diagnostics.snapshot_times.size:
        names = component_names(config.system)
        snapshot_rows = [
            [float(t), float(x), *(float(value) for value in fields[:, i])]
            for t, fields in zip(diagnostics.snapshot_times, diagnostics.snapshots)
            for i, x in enumerate(result.x)
        ]
        extra["snapshots"] = (("t", "x", *names), snapshot_rows)
    return CommandResult(
        payload=payload,
        columns=("t", "asym_norm", "dev_norm"),
        rows=rows,
        extra_csv=extra,
    )


def scan(run: RunConfig) -> CommandResult:
    options = run.payload
    params = run.params
    # the delayed system needs a finite alpha even before the first probe
    if options["param"] == "alpha" and not params.delayed:
        params = params.with_updates(alpha=options["max"])
    config = SimConfig(
        system=options.get("system", "coupled4"),
        params=params,
        perturbation=PerturbationSpec(seed=run.seed),
        nodes=options.get("nodes", 401),
        t_end=options.get("t_end", 50.0),
    )
    result = threshold_scan(
        options["param"],
        (options["min"], options["max"]),
        config,
        method=options.get("method", "eigs"),
        rtol=options.get("rtol", 1e-3),
    )
    rows = [[value, unstable] for value, unstable in result.history]
    return CommandResult(payload=result.to_dict(), columns=("value", "unstable"), rows=rows)


def sweep(run: RunConfig) -> CommandResult:
    job = SweepJob(
        axes=run.payload["axis"],
        task=run.payload.get("task", "classify"),
        output=run.output or Path("sweep.csv"),
    )
    result = run_sweep(job, run.params, header=run.header(), pipeline=_pipeline(run), workers=run.workers)
    return CommandResult(payload=result.to_dict(), written=result.path)


def validate(run: RunConfig) -> CommandResult:
    report = run_suite(run.payload["suite"], run.params, _pipeline(run))
    rows = [[name, check["passed"]] for name, check in report.items()]
    failed = not all(check["passed"] for check in report.values())
    return CommandResult(payload=report, columns=("check", "passed"), rows=rows, failed=failed)


COMMANDS: dict[str, Callable[[RunConfig], CommandResult]] = {
    "nullclines": nullclines,
    "reduced": reduced,
    "steady": steady,
    "spectral": spectral,
    "constants": constants,
    "turing-curve": turing_curve,
    "hopf": hopf,
    "classify": classify,
    "simulate": simulate_command,
    "scan": scan,
    "sweep": sweep,
    "validate": validate,
}


__all__ = ["CommandResult", "COMMANDS"]
