import numpy as np
import pytest

from fchoquard.errors import DomainError, NegativeTail, WindowTooSmall
from fchoquard.grid import Field, make_grid
from fchoquard.ground_state import find_seed
from fchoquard.nonlinearity import default_model
from fchoquard.spectral import FracParams
from fchoquard.verify import (
    asymmetry,
    decay_fit,
    half_height_radius,
    pohozaev_residual,
    qualitative_report,
    radial_profile,
    verification_report,
)

P2 = FracParams(2, 0.5, 1.0, 1.0)


def _power_tail(g, expo=3.0):
    return Field(g, 1.0 / (1.0 + g.radius() ** expo))


def test_radial_profile_csv_header_and_order():
    g = make_grid(2, 8.0, 64)
    prof = radial_profile(_power_tail(g))
    lines = prof.to_csv().splitlines()
    assert lines[0] == "r,shell_mean_u,shell_min,shell_max"
    assert len(lines) == prof.r.size + 1
    assert np.all(np.diff(prof.r) > 0)
    assert np.all(prof.min <= prof.mean) and np.all(prof.mean <= prof.max)
    assert prof.r[-1] <= g.L


def test_half_height_radius_gaussian():
    g = make_grid(2, 8.0, 256)
    u = Field(g, np.exp(-g.radius() ** 2))
    assert half_height_radius(u) == pytest.approx(np.sqrt(np.log(2)), abs=g.h / 2)
    assert half_height_radius(Field.zeros(g)) == 0.0


def test_pohozaev_residual_zero_field():
    g = make_grid(2, 8.0, 32)
    with pytest.raises(DomainError):
        pohozaev_residual(Field.zeros(g), default_model(), P2)


def test_pohozaev_residual_of_seed_is_order_one():
    g = make_grid(2, 16.0, 64)
    seed = find_seed(default_model(), P2, g)
    assert 1e-3 < pohozaev_residual(seed, default_model(), P2) < 10


def test_pohozaev_residual_recomputed(small_ground_state):
    assert pohozaev_residual(small_ground_state) <= 1e-8


def test_qualitative_zero_field_all_zero():
    g = make_grid(2, 8.0, 32)
    q = qualitative_report(Field.zeros(g), default_model(), P2)
    assert (q.min_value, q.asymmetry, q.sup_norm, q.l1_norm, q.riesz_edge) == (0, 0, 0, 0, 0)


def test_qualitative_ground_state(small_ground_state):
    q = qualitative_report(small_ground_state)
    assert q.min_value > -1e-8 * q.sup_norm
    assert q.asymmetry < 1e-6
    assert q.riesz_edge < 0.05
    assert "not centered" not in q.flags


def test_shifted_solution_flagged(small_ground_state):
    u = small_ground_state.u
    shifted = u.with_values(np.roll(u.values, (5, 2), axis=(0, 1)))
    q = qualitative_report(shifted, small_ground_state.model, small_ground_state.params)
    assert q.asymmetry > 1e-2
    assert "not centered" in q.flags
    rep = verification_report(shifted, small_ground_state.model, small_ground_state.params)
    assert rep["radial_symmetry"]["asserted"] is False


def test_asymmetry_invariant_under_grid_symmetries():
    g = make_grid(2, 8.0, 64)
    x, y = g.coords()
    u = Field(g, np.exp(-(x**2 + y**2)) * (1 + 0.1 * np.cos(4 * np.arctan2(y, x))))
    # four-fold symmetric: all dihedral maps of the square grid preserve it
    assert asymmetry(u) < 1e-13
    v = Field(g, np.exp(-(x**2 + 2 * y**2)))
    assert asymmetry(v) > 0.1


def test_decay_fit_power_law_recovers_exponent():
    g = make_grid(2, 32.0, 256)
    fit = decay_fit(_power_tail(g), P2, window=(4.0, 25.0))
    assert abs(fit.slope + 3) < 0.02
    assert fit.r_squared > 0.999
    assert fit.expected == -3
    assert "non-polynomial" not in fit.flags
    assert fit.c_lower <= fit.c_upper and fit.envelope_ratio < 1.01


def test_decay_fit_gaussian_flagged():
    g = make_grid(2, 16.0, 256)
    u = Field(g, np.exp(-g.radius() ** 2 / 8))
    slopes = [decay_fit(u, P2, window=(r1, 10.0)).slope for r1 in (2.0, 4.0, 6.0)]
    assert slopes[0] > slopes[1] > slopes[2]
    assert "non-polynomial" in decay_fit(u, P2, window=(2.0, 10.0)).flags


def test_decay_fit_errors():
    g = make_grid(2, 16.0, 64)
    u = _power_tail(g)
    with pytest.raises(WindowTooSmall):
        decay_fit(u, P2, window=(5.0, 6.0))
    with pytest.raises(WindowTooSmall):
        decay_fit(u, P2, window=(2.0, 0.9 * g.L))
    with pytest.raises(NegativeTail):
        decay_fit(Field(g, np.where(g.radius() > 3, 0.0, 1.0)), P2, window=(4.0, 12.0))


def test_decay_fit_sign_changing_uses_modulus():
    g = make_grid(2, 32.0, 256)
    x, _ = g.coords()
    u = Field(g, np.sign(x + 1e-9) * (1.0 / (1.0 + g.radius() ** 3)))
    fit = decay_fit(u, P2, window=(4.0, 25.0))
    assert fit.notes and "changing-sign" in fit.notes[0]
    assert abs(fit.slope + 3) < 0.05


def test_verification_report_zero_field_fails():
    g = make_grid(2, 8.0, 32)
    rep = verification_report(Field.zeros(g), default_model(), P2)
    assert rep["pohozaev_residual"]["passed"] is False
    assert rep["all_asserted_passed"] is False


def test_verification_report_ground_state(small_ground_state):
    rep = verification_report(small_ground_state)
    assert rep["all_asserted_passed"]
    assert rep["decay"]["asserted"] is False
