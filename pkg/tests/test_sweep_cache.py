import numpy.testing as npt
import pytest

from app.db.repository import SqlAlchemyCacheRepository
from app.db.session import init_db, session_scope
from app.schemas import SweepAxis, SweepJob, SweepTask
from app.services.pipeline import ConstantsPipeline, cache_entries
from app.services.sweep import COLUMNS, PointTask, enumerate_points, evaluate_point, run_sweep

PROFILE_NODES = 512
SLOW_NODES = 1025
SLOW_MODES = 64


def _pipeline(cache_dir, **kwargs) -> ConstantsPipeline:
    return ConstantsPipeline(
        cache_dir=cache_dir,
        kappa_method="inner",
        profile_nodes=PROFILE_NODES,
        slow_nodes=SLOW_NODES,
        slow_modes=SLOW_MODES,
        **kwargs,
    )


def _job(output) -> SweepJob:
    return SweepJob(
        axes=[
            SweepAxis(name="k1", min=0.1, max=0.9, count=3, relative_to="rho0"),
            SweepAxis(name="k2", min=0.5, max=2.0, count=2, relative_to="gamma0"),
        ],
        task=SweepTask.CLASSIFY,
        output=output,
    )


def test_pipeline_hits_after_the_first_run(tmp_path, params):
    first = _pipeline(tmp_path)
    computed = first.run(params)
    assert (first.stats.misses, first.stats.computations) == (1, 1)

    second = _pipeline(tmp_path)
    cached = second.run(params)
    assert second.stats.to_dict() == {"hits": 1, "misses": 0, "computations": 0}
    assert cached.rho0_star == computed.rho0_star
    assert cached.tau_star == computed.tau_star
    npt.assert_array_equal(cached.basis.gamma, computed.basis.gamma)

    entries = cache_entries(tmp_path)
    assert len(entries) == 1
    assert entries[0]["hits"] == 1
    assert entries[0]["kind"] == "slep_constants"


def test_cache_key_ignores_the_exchange_rates(tmp_path, params):
    pipeline = _pipeline(tmp_path)
    key, _ = pipeline.cache_key(params)
    assert pipeline.cache_key(params.with_updates(k1=0.3, k2=2.0, tau=5.0))[0] == key
    assert pipeline.cache_key(params.with_updates(d=3.0))[0] != key
    assert _pipeline(tmp_path, tail_factor=4).cache_key(params)[0] != key


def test_missing_blob_counts_as_a_miss(tmp_path, params):
    _pipeline(tmp_path).run(params)
    for blob in (tmp_path / "blobs").glob("*.npz"):
        blob.unlink()
    again = _pipeline(tmp_path)
    again.run(params)
    assert again.stats.misses == 1 and again.stats.computations == 1
    init_db(tmp_path)
    with session_scope() as session:
        assert SqlAlchemyCacheRepository(session).count("slep_constants") == 1


def test_disabled_cache_never_touches_the_index(tmp_path, params):
    pipeline = _pipeline(tmp_path / "unused", cache_enabled=False)
    pipeline.run(params)
    assert pipeline.stats.to_dict() == {"hits": 0, "misses": 0, "computations": 1}
    assert not (tmp_path / "unused").exists()


def test_points_are_enumerated_row_major(tmp_path, params):
    points = enumerate_points(_job(tmp_path / "s.csv"), params)
    assert len(points) == 6
    assert [(p["k1"], p["k2"]) for p in points[:2]] == [(0.1, 0.5), (0.1, 2.0)]
    assert points[2]["k1"] == 0.5
    assert all(p["tau"] == params.tau for p in points)


def test_sweep_is_independent_of_the_worker_count(tmp_path, params):
    header = {"command": "sweep"}
    serial = run_sweep(_job(tmp_path / "serial.csv"), params, header=header, pipeline=_pipeline(tmp_path / "cache"), workers=1)
    assert serial.constants_computed == 1
    assert serial.columns == COLUMNS[SweepTask.CLASSIFY]
    assert len(serial.rows) == 6

    parallel = run_sweep(_job(tmp_path / "parallel.csv"), params, header=header, pipeline=_pipeline(tmp_path / "cache"), workers=2)
    assert parallel.constants_computed == 0
    assert parallel.rows == serial.rows
    assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "parallel.csv").read_bytes()


def test_failing_points_fill_the_error_column(tmp_path, params):
    job = SweepJob(
        axes=[SweepAxis(name="k1", min=0.5, max=0.7, count=2, relative_to="rho0")],
        task=SweepTask.TURING_CURVE,
        output=tmp_path / "curve.csv",
    )
    result = run_sweep(job, params, header={}, pipeline=_pipeline(tmp_path / "cache"), workers=1)
    assert result.errors == 2
    for row in result.rows:
        assert row[1] is None
        assert row[-1].startswith("RegimeError")


@pytest.mark.parametrize("task", list(SweepTask))
def test_every_task_has_a_column_layout(task):
    assert COLUMNS[task][-1] == "error"


def test_evaluate_point_reports_the_leading_values(tmp_path, params, constants):
    point = PointTask(
        index=0,
        task=SweepTask.LAMBDA_CURVES,
        values={"k1": 0.1, "k2": 0.1, "alpha": float("inf"), "tau": params.tau, "d": params.d, "ell": params.ell},
        relative={},
        constants=constants,
        scan_points=64,
        scan_max_points=256,
        tail_factor=4,
    )
    row = evaluate_point(point)
    assert row[0] == float("inf")
    assert row[1] is None and row[2] is None
    assert "finite alpha" in row[-1]


def test_shape_without_a_layered_solution_only_fails_its_rows(tmp_path, params):
    # d = 1e-4 shrinks every admissible shooting length far below ell = 2
    job = SweepJob(
        axes=[
            SweepAxis(name="d", min=1e-4, max=params.d, count=2),
            SweepAxis(name="k1", min=0.1, max=0.3, count=2, relative_to="rho0"),
        ],
        task=SweepTask.TURING_CURVE,
        output=tmp_path / "by_d.csv",
    )
    result = run_sweep(job, params, header={}, pipeline=_pipeline(tmp_path / "cache"), workers=1)
    assert len(result.rows) == 4
    assert result.errors == 2
    for row in result.rows[:2]:
        assert row[1] is None
        assert row[-1].startswith("RegimeError")
    for row in result.rows[2:]:
        assert row[1] > 0.0
        assert row[-1] is None
    assert result.constants_computed == 1
    assert result.path.exists()
