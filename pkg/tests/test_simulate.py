import numpy as np
import numpy.testing as npt
import pytest

from app.config import settings
from app.models import Verdict
from app.schemas import ModelParams, PerturbationMode, PerturbationSpec, SimConfig, SystemKind
from app.services.simulate import (
    SimState,
    asym_norm,
    base_state,
    component_names,
    direct_eigs,
    initial_state,
    judge_series,
    mode_operator,
    simulate,
    step,
    threshold_scan,
)
from app.services.steady_eps import resample_state
from app.utils.errors import RegimeError

SIM_NODES = 501


def test_judge_series_growth():
    t = np.linspace(0.0, 10.0, 201)
    verdict, *_ = judge_series(t, 1e-6 * np.exp(t))
    assert verdict is Verdict.GROWTH


def test_judge_series_decay():
    t = np.linspace(0.0, 10.0, 201)
    verdict, peaks, slope, _, ratio = judge_series(t, np.exp(-t))
    assert verdict is Verdict.DECAY
    assert peaks == 0
    assert slope == pytest.approx(-1.0, rel=1e-6)
    assert ratio == 1.0


def test_judge_series_sustained_oscillation():
    t = np.linspace(0.0, 10.0, 2001)
    verdict, peaks, _, drift, _ = judge_series(t, 1.0 + 0.5 * np.sin(6.0 * np.pi * t))
    assert verdict is Verdict.SUSTAINED_OSCILLATION
    assert peaks >= 10
    assert drift < 0.05


def test_judge_series_quiet_and_flat():
    t = np.linspace(0.0, 1.0, 50)
    assert judge_series(t, np.zeros_like(t))[0] is Verdict.DECAY
    assert judge_series(t, np.ones_like(t))[0] is Verdict.INCONCLUSIVE


def test_constant_state_is_a_fixed_point_of_the_scheme():
    params = ModelParams(eps=0.05, k1=0.1, k2=0.2, alpha=2.0)
    for system in (SystemKind.COUPLED4, SystemKind.COUPLED6_DELAYED):
        config = SimConfig(
            system=system,
            params=params,
            nodes=65,
            initial="constant",
            perturbation=PerturbationSpec(mode=PerturbationMode.NONE),
        )
        u, v = base_state(config)
        state = initial_state(config, u, v)
        assert state.fields.shape == (len(component_names(system)), 65)
        advanced = step(state, config, 0.01)
        assert advanced.t == pytest.approx(0.01)
        npt.assert_allclose(advanced.fields, state.fields, atol=1e-12)


def test_antisymmetric_bump_sets_the_asymmetry_norm():
    params = ModelParams(eps=0.05, k1=0.1, alpha=3.0)
    amplitude = 1e-3
    config = SimConfig(
        system=SystemKind.COUPLED6_DELAYED,
        params=params,
        nodes=65,
        initial="constant",
        perturbation=PerturbationSpec(amplitude=amplitude),
    )
    u, v = base_state(config)
    state = initial_state(config, u, v, x_star=1.0)
    assert asym_norm(state, config.system) == pytest.approx(2.0 * amplitude)
    npt.assert_array_equal(state.component(config.system, "U1"), state.component(config.system, "u1"))
    npt.assert_array_equal(state.component(config.system, "U2"), state.component(config.system, "u2"))
    npt.assert_array_equal(state.component(config.system, "v1"), state.component(config.system, "v2"))
    assert asym_norm(state, SystemKind.DECOUPLED2) == 0.0


def test_noise_is_reproducible_from_the_seed():
    spec = PerturbationSpec(mode=PerturbationMode.SYMMETRIC, noise=0.1, seed=7)
    config = SimConfig(system=SystemKind.DECOUPLED2, nodes=65, initial="constant", perturbation=spec)
    u, v = base_state(config)
    first = initial_state(config, u, v)
    second = initial_state(config, u, v)
    npt.assert_array_equal(first.fields, second.fields)


def test_unperturbed_constant_run_is_quiet():
    config = SimConfig(
        system=SystemKind.COUPLED4,
        params=ModelParams(eps=0.05, k1=0.1, k2=0.1),
        nodes=33,
        dt=0.002,
        t_end=0.1,
        initial="constant",
        perturbation=PerturbationSpec(mode=PerturbationMode.NONE),
        stride=5,
        snapshot_stride=25,
    )
    result = simulate(config)
    diagnostics = result.diagnostics
    assert diagnostics.verdict is Verdict.DECAY
    assert diagnostics.observable == "asym_norm"
    assert diagnostics.times[-1] == pytest.approx(0.1)
    assert diagnostics.times.size == 11
    assert diagnostics.snapshots.shape == (3, 4, 33)
    assert result.halvings == 0


def test_mode_operator_shapes(steady, params):
    n = steady.nodes
    assert mode_operator(SystemKind.DECOUPLED2, params, steady, "symmetric").shape == (2 * n, 2 * n)
    delayed = params.with_updates(alpha=2.0, k1=0.1)
    assert mode_operator(SystemKind.COUPLED6_DELAYED, delayed, steady, "antisymmetric").shape == (3 * n, 3 * n)
    with pytest.raises(RegimeError):
        mode_operator(SystemKind.DECOUPLED2, params, steady, "antisymmetric")
    with pytest.raises(RegimeError):
        mode_operator(SystemKind.COUPLED6_DELAYED, params, steady, "symmetric")


def test_direct_eigs_rejects_a_state_from_other_parameters(steady, params):
    with pytest.raises(RegimeError, match="different parameters"):
        direct_eigs(SystemKind.DECOUPLED2, params.with_updates(eps=0.04), steady)


@pytest.fixture(scope="module")
def uniform_steady(steady, params):
    return resample_state(steady, params, np.linspace(0.0, params.ell, SIM_NODES))


@pytest.mark.slow
def test_decoupled_tau_threshold_flips_the_simulated_verdict(uniform_steady, params, constants):
    config = SimConfig(system=SystemKind.DECOUPLED2, params=params, nodes=SIM_NODES)
    result = threshold_scan(
        "tau",
        (0.1 * constants.tau_star, 3.0 * constants.tau_star),
        config,
        rtol=1e-2,
        steady=uniform_steady,
    )
    tau_c = result.eigs_value
    assert tau_c is not None

    def verdict(tau: float) -> Verdict:
        probe = config.model_copy(
            update={
                "params": params.with_updates(tau=tau),
                "dt": 0.01,
                "t_end": 40.0,
                "perturbation": PerturbationSpec(mode=PerturbationMode.SYMMETRIC),
            }
        )
        return simulate(probe, steady=uniform_steady).diagnostics.verdict

    assert verdict(0.7 * tau_c) in (Verdict.GROWTH, Verdict.SUSTAINED_OSCILLATION)
    assert verdict(1.5 * tau_c) is Verdict.DECAY


@pytest.mark.slow
def test_k2_threshold_matches_the_turing_curve(uniform_steady, params, slep):
    k1 = 0.25 * slep.rho0
    xi = slep.turing_curve_xi(k1)
    config = SimConfig(
        system=SystemKind.COUPLED4,
        params=params.with_updates(k1=k1, tau=slep.tau),
        nodes=SIM_NODES,
    )
    result = threshold_scan("k2", (0.2 * xi, 5.0 * xi), config, rtol=1e-2, steady=uniform_steady)
    assert result.eigs_value == pytest.approx(xi, rel=0.2)


@pytest.mark.slow
def test_alpha_threshold_matches_the_singular_limit_hopf_point(uniform_steady, params, slep):
    k1 = 0.6 * slep.rho0
    k2 = 2.0 * slep.k2hat_star(k1)
    alpha_h = slep.find_hopf(k1, k2, with_transversality=False).alpha_H
    config = SimConfig(
        system=SystemKind.COUPLED4,
        params=params.with_updates(k1=k1, k2=k2, tau=slep.tau),
        nodes=SIM_NODES,
    )
    result = threshold_scan("alpha", (0.5 * alpha_h, 2.0 * alpha_h), config, rtol=1e-2, steady=uniform_steady)
    assert result.eigs_value == pytest.approx(alpha_h, rel=0.2)


def test_symmetric_layered_start_stays_symmetric(uniform_steady, params, slep):
    # below the Turing curve the antisymmetric mode is stable
    k1 = 0.25 * slep.rho0
    config = SimConfig(
        system=SystemKind.COUPLED4,
        params=params.with_updates(k1=k1, k2=0.5 * slep.turing_curve_xi(k1), tau=slep.tau),
        nodes=SIM_NODES,
        dt=0.01,
        t_end=1.0,
        perturbation=PerturbationSpec(mode=PerturbationMode.NONE),
        stride=10,
    )
    diagnostics = simulate(config, steady=uniform_steady).diagnostics
    assert diagnostics.observable == "asym_norm"
    assert np.max(diagnostics.asym_norm) < 1e-12


def test_coupled_symmetric_mode_is_the_decoupled_spectrum(uniform_steady, params):
    coupled = params.with_updates(k1=0.1, k2=0.2)
    symmetric = direct_eigs(SystemKind.COUPLED4, coupled, uniform_steady, modes=["symmetric"]).symmetric
    decoupled = direct_eigs(SystemKind.DECOUPLED2, coupled, uniform_steady).symmetric
    npt.assert_array_equal(symmetric, decoupled)


@pytest.mark.parametrize(
    ("system", "swap"),
    [
        (SystemKind.COUPLED4, [2, 3, 0, 1]),
        (SystemKind.COUPLED6_DELAYED, [2, 3, 0, 1, 5, 4]),
    ],
)
def test_swapping_the_reactors_mirrors_the_trajectory(system, swap):
    config = SimConfig(
        system=system,
        params=ModelParams(eps=0.05, k1=0.1, k2=0.2, alpha=2.0),
        nodes=65,
        initial="constant",
        perturbation=PerturbationSpec(amplitude=1e-2, noise=0.5, seed=3),
    )
    u, v = base_state(config)
    state = initial_state(config, u, v)
    mirrored = SimState(t=state.t, fields=state.fields[swap])
    for _ in range(20):
        state = step(state, config, 0.01)
        mirrored = step(mirrored, config, 0.01)
    npt.assert_allclose(mirrored.fields, state.fields[swap], rtol=0.0, atol=1e-12)
    assert asym_norm(state, system) > 1e-4


@pytest.mark.slow
def test_sparse_solver_agrees_with_the_dense_one_at_the_hopf_point(uniform_steady, params, slep, monkeypatch):
    k1 = 0.6 * slep.rho0
    k2 = 2.0 * slep.k2hat_star(k1)
    alpha_h = slep.find_hopf(k1, k2, with_transversality=False).alpha_H
    probe = params.with_updates(k1=k1, k2=k2, tau=slep.tau, alpha=alpha_h)

    def leading() -> complex:
        spectrum = direct_eigs(SystemKind.COUPLED6_DELAYED, probe, uniform_steady, 3, modes=["antisymmetric"])
        return spectrum.antisymmetric[0]

    dense = leading()
    monkeypatch.setattr(settings, "dense_eig_max", 100)
    sparse = leading()
    assert sparse.real == pytest.approx(dense.real, abs=1e-8 * (1.0 + abs(dense)))
    assert abs(sparse.imag) == pytest.approx(abs(dense.imag), abs=1e-8 * (1.0 + abs(dense)))


def test_sparse_path_matches_the_dense_spectrum(uniform_steady, params, monkeypatch):
    probe = params.with_updates(k1=0.1, k2=0.2)
    dense = direct_eigs(SystemKind.COUPLED4, probe, uniform_steady, 3)
    monkeypatch.setattr(settings, "dense_eig_max", 100)
    sparse = direct_eigs(SystemKind.COUPLED4, probe, uniform_steady, 3)
    for mode in ("symmetric", "antisymmetric"):
        expected, found = getattr(dense, mode), getattr(sparse, mode)
        npt.assert_allclose(found.real, expected.real, atol=1e-8 * (1.0 + np.max(np.abs(expected))))
        npt.assert_allclose(np.abs(found.imag), np.abs(expected.imag), atol=1e-8 * (1.0 + np.max(np.abs(expected))))
