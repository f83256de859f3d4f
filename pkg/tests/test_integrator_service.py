import math

import numpy as np
import pytest

from app.core import IntegrationError, ParameterError
from app.models import ModelParams, Regularization, StepConfig
from app.services import IntegratorService, ModelService, SpectralService


def plane_wave_error(torus, params, dt):
    u0 = SpectralService.field(torus, np.exp(2j * torus.points))
    traj = IntegratorService.evolve(u0, params, 1.0, StepConfig(dt=dt, record_every=1000))
    exact = np.exp(2j * torus.points - 2j * traj.final.time)
    return float(np.sqrt(np.sum(np.abs(traj.final.values - exact) ** 2) / np.sum(np.abs(exact) ** 2)))


def test_plane_wave_is_an_exact_orbit(torus, gdnls):
    assert plane_wave_error(torus, gdnls, 1e-3) <= 1e-8


def test_plane_wave_error_is_fourth_order(torus, gdnls):
    coarse = plane_wave_error(torus, gdnls, 0.01)
    fine = plane_wave_error(torus, gdnls, 0.005)
    assert 12 <= coarse / fine <= 20


def test_step_lands_on_t_final(line, gaussian, gdnls):
    traj = IntegratorService.evolve(gaussian(), gdnls, 0.1, StepConfig(dt=0.03, record_every=1))
    assert traj.final.time == pytest.approx(0.1, abs=1e-15)
    assert len(traj.states) == 5
    assert len(traj.ledger) == len(traj.states)


def test_zero_field_stays_zero(torus, gdnls, step):
    zero = SpectralService.field(torus, np.zeros(torus.n))
    traj = IntegratorService.evolve(zero, gdnls, 0.05, step)
    assert not np.any(traj.stack())


def test_linear_flow_matches_free_propagation(line, gaussian, gdnls, step):
    u0 = gaussian()
    linear = gdnls.model_copy(update={"nonlinear": False})
    traj = IntegratorService.evolve(u0, linear, 0.2, step)
    np.testing.assert_allclose(traj.final.values, SpectralService.free_propagate(u0, 0.2).values, atol=1e-12)


def test_conserved_quantities_drift_little(line, gaussian, gdnls, step):
    traj = IntegratorService.evolve(gaussian(), gdnls, 0.5, step)
    first, last = traj.ledger[0], traj.ledger[-1]
    assert abs(last.mass - first.mass) <= 1e-10 * first.mass
    assert abs(last.energy - first.energy) <= 1e-9 * (1 + abs(first.energy))
    assert abs(last.momentum - first.momentum) <= 1e-9 * (1 + abs(first.momentum))


def test_blow_up_guard(torus, gdnls):
    u0 = SpectralService.field(torus, np.ones(torus.n))
    runaway = lambda values, t: 50.0 * values
    cfg = StepConfig(dt=0.01, record_every=1, blowup_factor=10.0)
    with pytest.raises(IntegrationError, match="blow-up"):
        IntegratorService.integrate(u0, gdnls, 1.0, cfg, runaway)


def test_non_positive_horizon(torus, gdnls, step):
    u0 = SpectralService.field(torus, np.ones(torus.n))
    with pytest.raises(ParameterError):
        IntegratorService.evolve(u0, gdnls, 0.0, step)


def test_evolve_regularized_needs_a_truncation(line, gaussian, gdnls, step):
    with pytest.raises(ParameterError):
        IntegratorService.evolve_regularized(gaussian(), gdnls, 0.1, step)


def test_evolve_regularized_starts_from_the_projection(line, gaussian, step):
    p = ModelParams(sigma=1.0, regularization=Regularization(k=3))
    u0 = gaussian()
    traj = IntegratorService.evolve_regularized(u0, p, 0.05, step)
    projected = SpectralService.apply_multiplier(u0, SpectralService.low_pass_multiplier(line, 3))
    np.testing.assert_allclose(traj.states[0].values, projected.values)


def test_picard_iterates_contract(line, gaussian):
    p = ModelParams(sigma=1.0, regularization=Regularization(k=3))
    cfg = StepConfig(dt=0.01)
    u0 = gaussian(0.3, 2.0)
    result = IntegratorService.picard_construct(u0, p, 5, cfg, t_final=0.5)
    assert len(result.iterates) == 6
    assert len(result.differences) == 5
    assert all(ratio <= 0.5 for ratio in result.ratios[1:])
    assert not np.any(result.iterates[0].stack())

    reference = IntegratorService.evolve_regularized(u0, p, 0.5, cfg)
    distance = IntegratorService.trajectory_distance(result.iterates[-1], reference)
    assert distance <= 10 * result.differences[-1] + 1e-6


def test_picard_of_zero_data(line, step):
    p = ModelParams(sigma=1.0, regularization=Regularization(k=3))
    zero = SpectralService.field(line, np.zeros(line.n))
    result = IntegratorService.picard_construct(zero, p, 3, step, t_final=0.05)
    assert result.differences == [0.0, 0.0, 0.0]


def test_picard_needs_regularization(line, gaussian, gdnls, step):
    with pytest.raises(ParameterError):
        IntegratorService.picard_construct(gaussian(), gdnls, 3, step)


def test_trajectory_distance_requires_shared_times(line, gaussian, gdnls):
    u0 = gaussian()
    first = IntegratorService.evolve(u0, gdnls, 0.1, StepConfig(dt=0.01, record_every=1))
    second = IntegratorService.evolve(u0, gdnls, 0.1, StepConfig(dt=0.01, record_every=2))
    with pytest.raises(ParameterError):
        IntegratorService.trajectory_distance(first, second)
    assert IntegratorService.trajectory_distance(first, first) == 0.0


def test_measure_order():
    orders = IntegratorService.measure_order([1.6e-3, 1e-4, 6.25e-6], [0.1, 0.05, 0.025])
    assert orders == pytest.approx([4.0, 4.0])
    assert IntegratorService.measure_order([1e-3, 0.0], [0.1, 0.05]) == [math.inf]
    with pytest.raises(ParameterError):
        IntegratorService.measure_order([1.0], [0.1])


def test_ledger_tracks_the_final_state(line, gaussian, gdnls, step):
    traj = IntegratorService.evolve(gaussian(), gdnls, 0.05, step)
    assert traj.ledger[-1].mass == pytest.approx(ModelService.mass(traj.final))


def test_linear_flow_is_time_reversible(line, gaussian, step):
    # conj(u(T)) evolved for T lands on conj(u0)
    linear = ModelParams(sigma=1.0, nonlinear=False)
    u0 = gaussian()
    forward = IntegratorService.evolve(u0, linear, 0.3, step).final
    back = IntegratorService.evolve(forward.with_values(np.conj(forward.values), time=0.0), linear, 0.3, step).final
    np.testing.assert_allclose(np.conj(back.values), u0.values, atol=1e-12)


def test_gdnls_is_reversible_under_conjugate_reflection(line, gaussian, gdnls, step):
    u0 = gaussian(0.5, 1.5)
    forward = IntegratorService.evolve(u0, gdnls, 0.2, step).final
    reflected = np.conj(np.roll(forward.values[::-1], 1))
    back = IntegratorService.evolve(forward.with_values(reflected, time=0.0), gdnls, 0.2, step).final
    np.testing.assert_allclose(np.conj(np.roll(back.values[::-1], 1)), u0.values, atol=1e-7)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_flow_commutes_with_scaling(line, gaussian, gdnls, lam):
    u0 = gaussian(0.3, 1.5)
    step, halved = StepConfig(dt=1e-3, record_every=50), StepConfig(dt=5e-4, record_every=50)
    scaled0 = ModelService.rescale(u0, lam, 1.0)
    lhs = IntegratorService.evolve(scaled0, gdnls, 0.1, step).final
    lhs_fine = IntegratorService.evolve(scaled0, gdnls, 0.1, halved).final
    rhs = ModelService.rescale(IntegratorService.evolve(u0, gdnls, lam ** 2 * 0.1, step).final, lam, 1.0)
    rhs_fine = ModelService.rescale(IntegratorService.evolve(u0, gdnls, lam ** 2 * 0.1, halved).final, lam, 1.0)
    solver_error = max(IntegratorService.l2_distance(lhs, lhs_fine), IntegratorService.l2_distance(rhs, rhs_fine))
    assert IntegratorService.l2_distance(lhs, rhs) <= 10 * solver_error + 1e-12


def test_conservation_drift_falls_at_fourth_order(line, gaussian):
    params = ModelParams(sigma=0.9)
    u0 = gaussian(0.5, 2.0)
    drifts = []
    for dt in (0.02, 0.01):
        traj = IntegratorService.evolve(u0, params, 1.0, StepConfig(dt=dt, record_every=5))
        first = traj.ledger[0]
        drifts.append(max(abs(row.energy - first.energy) / (1 + abs(first.energy)) for row in traj.ledger))
    if drifts[-1] > 1e-13:
        assert IntegratorService.measure_order(drifts, [0.02, 0.01])[0] >= 3.5


def test_regularized_flows_converge_as_the_truncation_lifts(torus, gdnls):
    modes = np.arange(-64, 65)
    values = 0.1 * np.sum(np.exp(1j * np.outer(modes, torus.points)) / (1.0 + modes[:, None] ** 2), axis=0)
    u0 = SpectralService.field(torus, values)
    flows = []
    for k in (4, 5, 6, 7):
        params = gdnls.model_copy(update={"regularization": Regularization(k=k)})
        flows.append(IntegratorService.evolve_regularized(u0, params, 0.5, StepConfig(dt=1e-3, record_every=10)))
    distances = [IntegratorService.trajectory_distance(a, b) for a, b in zip(flows, flows[1:])]
    assert distances[0] > distances[1] > distances[2]
    assert max(b / a for a, b in zip(distances, distances[1:])) <= 0.7


def test_lifting_the_regularization_recovers_the_flow(torus, gdnls, step):
    # k past Nyquist and η = 1 on the whole horizon: the regularized equation is the gDNLS flow
    u0 = SpectralService.field(torus, 0.3 * np.exp(1j * torus.points) + 0.1 * np.cos(2 * torus.points))
    params = gdnls.model_copy(update={"regularization": Regularization(k=8)})
    regularized = IntegratorService.evolve_regularized(u0, params, 0.5, step)
    plain = IntegratorService.evolve(u0, gdnls, 0.5, step)
    assert IntegratorService.trajectory_distance(regularized, plain) <= 1e-10
