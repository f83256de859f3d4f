import math

import numpy as np
import pytest

from app.core import BranchError, GridError
from app.models import ModelParams, NonlinearitySign, SolitonBranch, StepConfig
from app.services import IntegratorService, SolitonService, SpectralService


@pytest.fixture
def spec():
    return SolitonService.make_spec(1.0, 0.0, 1.0, 1.0)


def closed_form_tail(x):
    # σ=1, b=0, ω=c=1: Φ² = 6/(2cosh(√3x) - 1)
    return 4 * (np.arctan(math.sqrt(3) * np.tanh(math.sqrt(3) * np.asarray(x) / 2)) + math.pi / 3)


def test_gamma():
    assert SolitonService.gamma_of(1.0, 0.0) == 1.0
    assert SolitonService.gamma_of(1.0, -0.375) == pytest.approx(-1.0)


def test_branch_classification():
    assert SolitonService.classify_branch(1.0, 0.0, 1.0, 1.0) == SolitonBranch.GENERIC
    assert SolitonService.classify_branch(1.0, 0.0, 1.0, 2.0) == SolitonBranch.ALGEBRAIC
    assert SolitonService.classify_branch(1.0, -0.375, 1.0, -1.8) == SolitonBranch.NEGATIVE


def test_branch_errors_name_the_inequality():
    with pytest.raises(BranchError, match="omega"):
        SolitonService.classify_branch(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(BranchError, match="2\\*sqrt\\(omega\\)"):
        SolitonService.classify_branch(1.0, 0.0, 1.0, 3.0)
    with pytest.raises(BranchError, match="gamma"):
        SolitonService.classify_branch(1.0, -0.375, 1.0, 0.0)


def test_amplitude_at_the_center_of_a_standing_soliton():
    spec = SolitonService.make_spec(1.0, 0.0, 1.0, 0.0)
    # Φ² = 8/(2cosh(2x)) = 4 sech(2x)
    x = np.array([0.0, 0.3, -1.2])
    np.testing.assert_allclose(SolitonService.amplitude_power(spec, x), 4 / np.cosh(2 * x), rtol=1e-14)
    assert SolitonService.amplitude_profile(spec, 0.0) == pytest.approx(2.0)


def test_stable_denominator_matches_the_cosh_form(spec):
    x = np.linspace(-10, 10, 41)
    direct = 6 / (2 * np.cosh(math.sqrt(3) * x) - 1)
    np.testing.assert_allclose(SolitonService.amplitude_power(spec, x), direct, rtol=1e-12)


def test_tail_integral_against_closed_form(spec):
    x = np.array([-6.0, -1.0, 0.0, 0.7, 3.0, 12.0])
    np.testing.assert_allclose(SolitonService.tail_integral(spec, x), closed_form_tail(x), rtol=0, atol=1e-10)
    total = SolitonService.tail_integral(spec, [40.0])[0]
    assert total == pytest.approx(8 * math.pi / 3, abs=1e-10)


def test_tail_integral_keeps_input_order(spec):
    x = np.array([2.0, -3.0, 0.0, 2.0])
    values = SolitonService.tail_integral(spec, x)
    np.testing.assert_allclose(values, closed_form_tail(x), atol=1e-10)


def test_phase_derivative_matches_the_phase(spec):
    x = np.array([-2.0, 0.0, 0.5, 3.0])
    h = 1e-4
    numeric = (SolitonService.phase_profile(spec, x + h) - SolitonService.phase_profile(spec, x - h)) / (2 * h)
    np.testing.assert_allclose(SolitonService.phase_derivative(spec, x), numeric, atol=1e-7)


def test_soliton_field_modulus_travels(spec):
    grid = SpectralService.make_grid(512, 80.0)
    u = SolitonService.soliton_field(spec, 2.0, grid)
    assert u.time == 2.0
    expected = SolitonService.amplitude_profile(spec, grid.points - 2.0)
    np.testing.assert_allclose(u.modulus, expected, atol=1e-12)


def test_soliton_residual_is_spectrally_small(spec):
    grid = SpectralService.make_grid(4096, 80.0)
    assert SolitonService.soliton_residual(spec, grid) <= 1e-6


def test_generic_branch_below_sigma_one():
    spec = SolitonService.make_spec(0.9, 0.0, 1.0, 0.5)
    assert spec.branch == SolitonBranch.GENERIC
    grid = SpectralService.make_grid(2048, 80.0)
    assert SolitonService.soliton_residual(spec, grid) <= 1e-6


def test_short_domain_is_rejected(spec):
    with pytest.raises(GridError):
        SolitonService.soliton_field(spec, 0.0, SpectralService.make_grid(256, 10.0))


def test_algebraic_soliton_is_only_qualitative(caplog):
    spec = SolitonService.make_spec(1.0, 0.0, 1.0, 2.0)
    grid = SpectralService.make_grid(256, 40.0)
    with caplog.at_level("WARNING"):
        u = SolitonService.soliton_field(spec, 0.0, grid)
    assert "qualitative only" in caplog.text
    # Φ² = 8/(4x² + 1)
    assert u.modulus[grid.n // 2] == pytest.approx(math.sqrt(8.0))


def propagation_error(spec, t_final, dt=5e-4):
    grid = SpectralService.make_grid(2048, 80.0)
    params = ModelParams(sigma=spec.sigma, b=spec.b, sign=NonlinearitySign.DNLSB)
    u0 = SolitonService.soliton_field(spec, 0.0, grid)
    traj = IntegratorService.evolve(u0, params, t_final, StepConfig(dt=dt, record_every=10 ** 6))
    exact = SolitonService.soliton_field(spec, traj.final.time, grid)
    return IntegratorService.l2_distance(traj.final, exact)


def test_soliton_propagates_onto_the_exact_solution(spec):
    assert propagation_error(spec, 1.0) <= 1e-4


def test_generic_soliton_below_sigma_one_propagates():
    spec = SolitonService.make_spec(0.9, 0.0, 1.0, 0.5)
    assert propagation_error(spec, 0.5) <= 1e-4


def test_soliton_residual_falls_with_resolution(spec):
    coarse = SolitonService.soliton_residual(spec, SpectralService.make_grid(512, 80.0))
    fine = SolitonService.soliton_residual(spec, SpectralService.make_grid(1024, 80.0))
    assert fine < coarse / 100
