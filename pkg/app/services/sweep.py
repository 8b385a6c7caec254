"""
Parameter sweeps over the singular-limit equations.

Points are enumerated row-major in axis declaration order and evaluated by a
process pool; rows are merged back in enumeration order so the output does
not depend on the number of workers. A failing point fills the error column
and never stops the sweep.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter
from typing import Any, Mapping

import numpy as np

from app.config import settings
from app.models import SlepConstants
from app.schemas import AxisScale, ModelParams, SweepAxis, SweepJob, SweepTask
from app.services.pipeline import ConstantsPipeline
from app.services.slep import SlepSystem
from app.utils.errors import LayerModelError
from app.utils.file_operations import write_csv

logger = logging.getLogger(__name__)

POINT_ERRORS = (LayerModelError, ValueError, ArithmeticError)

COLUMNS: dict[SweepTask, tuple[str, ...]] = {
    SweepTask.CLASSIFY: ("k1", "k2", "label", "xi_k1", "delay_verdict", "error"),
    SweepTask.TURING_CURVE: ("k1", "xi", "error"),
    SweepTask.HOPF: ("k1", "k2", "regime", "alpha_H", "lamIH", "alpha0", "alpha2", "dlamR_dalpha", "error"),
    SweepTask.LAMBDA_CURVES: ("alpha", "lamI1", "lamI2", "error"),
}


@dataclass(slots=True, frozen=True)
class PointTask:
    index: int
    task: SweepTask
    values: dict[str, float]
    relative: dict[str, str]
    constants: SlepConstants
    scan_points: int
    scan_max_points: int
    tail_factor: int


@dataclass(slots=True, frozen=True)
class SweepResult:
    path: Path
    columns: tuple[str, ...]
    rows: list[list[Any]]
    errors: int
    constants_computed: int

    def to_dict(self) -> dict:
        return {
            "path": str(self.path),
            "rows": len(self.rows),
            "errors": self.errors,
            "constants_computed": self.constants_computed,
        }


def axis_values(axis: SweepAxis) -> np.ndarray:
    if axis.count == 1:
        return np.array([axis.min])
    if axis.scale is AxisScale.LOG:
        return np.geomspace(axis.min, axis.max, axis.count)
    return np.linspace(axis.min, axis.max, axis.count)


def enumerate_points(job: SweepJob, base: ModelParams) -> list[dict[str, float]]:
    """Row-major grid, the last declared axis varying fastest."""
    names = [axis.name for axis in job.axes]
    grids = [axis_values(axis) for axis in job.axes]
    defaults = {name: getattr(base, name) for name in ("k1", "k2", "alpha", "tau", "d", "ell")}
    points = []
    for combo in itertools.product(*grids):
        point = dict(defaults)
        point.update({name: float(value) for name, value in zip(names, combo)})
        points.append(point)
    return points


def _resolve(values: dict[str, float], relative: Mapping[str, str], system: SlepSystem) -> dict[str, float]:
    resolved = dict(values)
    for name in ("k1", "k2", "tau", "alpha"):
        scale = relative.get(name, "none")
        if scale == "rho0":
            resolved[name] = values[name] * system.rho0
        elif scale == "gamma0":
            resolved[name] = values[name] * system.gamma0
        elif scale == "alpha0":
            resolved[name] = values[name] * system.alpha0(resolved["k1"], resolved["k2"])
    return resolved


def evaluate_point(point: PointTask) -> list[Any]:
    """One output row; exceptions become the error column."""
    system = SlepSystem(
        point.constants,
        point.values["tau"],
        tail_factor=point.tail_factor,
        scan_points=point.scan_points,
        scan_max_points=point.scan_max_points,
    )
    values = dict(point.values)
    try:
        values = _resolve(point.values, point.relative, system)
        return _row(point.task, system, values) + [None]
    except POINT_ERRORS as exc:
        logger.debug("Sweep point %d failed: %s", point.index, exc)
        return _failed_row(point.task, values, exc)


def _failed_row(task: SweepTask, values: Mapping[str, float], exc: Exception) -> list[Any]:
    lead = _leading(task, values)
    padding = [None] * (len(COLUMNS[task]) - 1 - len(lead))
    return lead + padding + [f"{type(exc).__name__}: {exc}"]


def _leading(task: SweepTask, values: Mapping[str, float]) -> list[Any]:
    if task is SweepTask.TURING_CURVE:
        return [values["k1"]]
    if task is SweepTask.LAMBDA_CURVES:
        return [values["alpha"]]
    return [values["k1"], values["k2"]]


def _row(task: SweepTask, system: SlepSystem, values: Mapping[str, float]) -> list[Any]:
    k1, k2, alpha = values["k1"], values["k2"], values["alpha"]
    if task is SweepTask.CLASSIFY:
        point = system.classify(k1, k2)
        return [k1, k2, point.label.value, point.xi_k1, point.delay_verdict]
    if task is SweepTask.TURING_CURVE:
        return [k1, system.turing_curve_xi(k1)]
    if task is SweepTask.HOPF:
        hopf = system.find_hopf(k1, k2)
        return [k1, k2, hopf.regime.value, hopf.alpha_H, hopf.lamIH, hopf.alpha0, hopf.alpha2, hopf.dlamR_dalpha]
    if not math.isfinite(alpha):
        raise ValueError("lambda-curves needs a finite alpha axis")
    return [alpha, system.lambda_I1(alpha, k1, k2), system.lambda_I2(alpha, k1, k2)]


def run_sweep(
    job: SweepJob,
    base: ModelParams,
    *,
    header: Mapping[str, Any],
    pipeline: ConstantsPipeline | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate the grid and write the CSV; constants are resolved once per (d, ell)."""
    started = perf_counter()
    pipeline = pipeline or ConstantsPipeline()
    workers = workers or settings.workers
    computed_before = pipeline.stats.computations
    points = enumerate_points(job, base)
    relative = {axis.name: axis.relative_to for axis in job.axes}

    constants_by_shape: dict[tuple[float, float], SlepConstants | Exception] = {}
    tasks: list[PointTask] = []
    failed: dict[int, list[Any]] = {}
    for index, values in enumerate(points):
        shape = (values["d"], values["ell"])
        if shape not in constants_by_shape:
            try:
                constants_by_shape[shape] = pipeline.run(base.with_updates(d=values["d"], ell=values["ell"]))
            except POINT_ERRORS as exc:
                logger.warning("No SLEP constants for d=%.6g ell=%.6g: %s", shape[0], shape[1], exc)
                constants_by_shape[shape] = exc
        constants = constants_by_shape[shape]
        if isinstance(constants, Exception):
            failed[index] = _failed_row(job.task, values, constants)
            continue
        tasks.append(
            PointTask(
                index=index,
                task=job.task,
                values=values,
                relative=relative,
                constants=constants,
                scan_points=settings.hopf_scan_points,
                scan_max_points=settings.hopf_scan_max_points,
                tail_factor=settings.tail_factor,
            )
        )

    logger.info("Sweep %s: %d points on %d worker(s)", job.task.value, len(tasks), workers)
    if workers == 1 or not tasks:
        evaluated = [evaluate_point(task) for task in tasks]
    else:
        chunksize = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            evaluated = list(executor.map(evaluate_point, tasks, chunksize=chunksize))
    by_index = dict(failed)
    by_index.update((task.index, row) for task, row in zip(tasks, evaluated))
    rows = [by_index[index] for index in range(len(points))]

    columns = COLUMNS[job.task]
    errors = sum(1 for row in rows if row[-1])
    path = write_csv(job.output, header, columns, rows)
    computed = pipeline.stats.computations - computed_before
    logger.info(
        "Sweep finished: %d rows, %d errors, %d constants computed in %.2fs",
        len(rows), errors, computed, perf_counter() - started,
    )
    return SweepResult(path=path, columns=columns, rows=rows, errors=errors, constants_computed=computed)


__all__ = [
    "COLUMNS",
    "PointTask",
    "SweepResult",
    "axis_values",
    "enumerate_points",
    "evaluate_point",
    "run_sweep",
]
