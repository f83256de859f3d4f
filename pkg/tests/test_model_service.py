import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core import ParameterError
from app.models import ModelParams, NonlinearitySign, Regularization, TimeCutoff
from app.services import ModelService, SpectralService


def plane_wave(grid, k=2, amplitude=1.0):
    return SpectralService.field(grid, amplitude * np.exp(1j * k * grid.points))


def test_sigma_below_one_half_needs_the_unsafe_flag():
    with pytest.raises(ValidationError):
        ModelParams(sigma=0.5)
    assert ModelParams(sigma=0.5, unsafe_sigma=True).sigma == 0.5


def test_plane_wave_nonlinearity(torus, gdnls):
    u = plane_wave(torus)
    n = ModelService.nonlinearity(u, gdnls, 0.0)
    # -sign·|u|^2·u_x = 2i u for k=2
    np.testing.assert_allclose(n.values, 2j * u.values, atol=1e-11)


def test_sign_flips_the_transport_term(torus, gdnls):
    u = plane_wave(torus)
    dnlsb = gdnls.model_copy(update={"sign": NonlinearitySign.DNLSB})
    forward = ModelService.nonlinearity(u, gdnls, 0.0).values
    backward = ModelService.nonlinearity(u, dnlsb, 0.0).values
    np.testing.assert_allclose(forward, -backward, atol=1e-12)


def test_linear_switch_zeroes_the_nonlinearity(torus, gdnls):
    u = plane_wave(torus)
    linear = gdnls.model_copy(update={"nonlinear": False})
    assert not np.any(ModelService.nonlinearity(u, linear, 0.0).values)


def test_power_term_adds_b_q_u(torus):
    u = plane_wave(torus, k=0, amplitude=0.5)
    p = ModelParams(sigma=1.0, b=2.0, sign=NonlinearitySign.DNLSB)
    # u_x = 0, so N = i b |u|^4 u
    np.testing.assert_allclose(ModelService.nonlinearity(u, p, 0.0).values, 1j * 2.0 * 0.5 ** 4 * u.values, atol=1e-14)


def test_rhs_of_a_plane_wave_orbit(torus, gdnls):
    u = plane_wave(torus)
    np.testing.assert_allclose(ModelService.rhs(u, gdnls, 0.0).values, -2j * u.values, atol=1e-10)


def test_regularized_coefficients_vanish_past_the_cutoff(line, gaussian):
    p = ModelParams(sigma=1.0, regularization=Regularization(k=3, eta=TimeCutoff(inner=0.5, outer=1.0)))
    u = gaussian()
    a, q = ModelService.coefficients(line, u.values, p, 1.5)
    assert not np.any(a) and not np.any(q)
    a_mid, _ = ModelService.coefficients(line, u.values, p, 0.75)
    a_full, _ = ModelService.coefficients(line, u.values, p, 0.0)
    np.testing.assert_allclose(a_mid, 0.5 * a_full, atol=1e-15)


def test_time_cutoff_profile():
    eta = TimeCutoff(inner=1.0, outer=2.0)
    np.testing.assert_allclose(eta.evaluate([0.0, 1.0, 1.5, -1.5, 2.0, 3.0]), [1, 1, 0.5, 0.5, 0, 0], atol=1e-15)
    with pytest.raises(ValidationError):
        TimeCutoff(inner=2.0, outer=1.0)


def test_functionals_of_a_plane_wave(torus, gdnls):
    u = plane_wave(torus)
    assert ModelService.mass(u) == pytest.approx(math.pi, rel=1e-12)
    assert ModelService.momentum(u) == pytest.approx(-2 * math.pi, rel=1e-12)
    # ½k²A²L - k A⁴ L / 4
    assert ModelService.energy(u, gdnls) == pytest.approx(3 * math.pi, rel=1e-12)
    assert ModelService.h1_norm(u) == pytest.approx(math.sqrt(2 * math.pi * 5), rel=1e-12)
    assert ModelService.linf_norm(u) == pytest.approx(1.0)


def test_functionals_of_the_zero_field(torus, gdnls):
    zero = SpectralService.field(torus, np.zeros(torus.n))
    row = ModelService.ledger_row(zero, gdnls)
    assert row.as_row() == [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]


def test_energy_variation_matches_the_flow(line, gaussian):
    p =ModelParams(sigma=1.0, b=0.3, sign=NonlinearitySign.DNLSB)
    u = gaussian(0.6, 2.0)
    v = SpectralService.field(line, np.exp(-((line.points - 1.0) / 1.5) ** 2) * (1 + 0.5j))
    eps = 1e-6
    plus = ModelService.energy(u.with_values(u.values + eps * v.values), p)
    minus = ModelService.energy(u.with_values(u.values - eps * v.values), p)
    variation = (plus - minus) / (2 * eps)
    # u_t = -2i δE/δū gives dE/dε = Re∫ conj(i u_t) v
    u_t = ModelService.rhs(u, p, 0.0).values
    expected = float(np.real(np.sum(np.conj(1j * u_t) * v.values)) * line.dx)
    assert variation == pytest.approx(expected, rel=1e-6, abs=1e-9)


def test_critical_index():
    assert ModelService.critical_index(1.0) == 0.0
    assert ModelService.critical_index(2.0) == pytest.approx(0.25)
    with pytest.raises(ParameterError):
        ModelService.critical_index(0.0)


def test_rescale_maps_grid_samples_and_time(line, gaussian):
    u = gaussian().with_values(gaussian().values, time=0.8)
    scaled = ModelService.rescale(u, 2.0, 1.0)
    assert scaled.grid.length == pytest.approx(20.0)
    assert scaled.time == pytest.approx(0.2)
    np.testing.assert_allclose(scaled.values, math.sqrt(2.0) * u.values)
    refined = ModelService.rescale(u, 2.0, 1.0, n=512)
    assert refined.grid.n == 512
    with pytest.raises(ParameterError):
        ModelService.rescale(u, -1.0, 1.0)


def test_cfl_limit(torus, gdnls):
    assert ModelService.cfl_limit(plane_wave(torus), gdnls) == pytest.approx(torus.dx)
    assert math.isinf(ModelService.cfl_limit(SpectralService.field(torus, np.zeros(torus.n)), gdnls))
