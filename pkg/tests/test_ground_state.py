import json
import warnings

import numpy as np
import pytest

from fchoquard.errors import NotAdmissible, SeedFailure
from fchoquard.functionals import Workspace
from fchoquard.grid import Field, make_grid
from fchoquard.ground_state import (
    J_NOISE,
    SolveOptions,
    SolveResult,
    center,
    dilation_path,
    _normalize_amplitude,
    find_seed,
    fixed_point_resolvent,
    minimize_pohozaev,
    mountain_pass_upper_bound,
    project_pohozaev,
)
from fchoquard.inequality_lab import random_bumps
from fchoquard.nonlinearity import DoublePower, Saturable, default_model
from fchoquard.spectral import FracParams, kinetic
from fchoquard.verify import asymmetry, pohozaev_residual

P2 = FracParams(2, 0.5, 1.0, 1.0)
M = default_model()


def quiet(fn, *a, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*a, **kw)


def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(grad_tol=0)
    with pytest.raises(ValueError):
        SolveOptions(backtrack=1.0)
    with pytest.raises(ValueError):
        SolveOptions(step_size=-1)
    assert SolveOptions().replace(max_iters=3).max_iters == 3


def test_seed_default_model():
    g = make_grid(2, 16.0, 64)
    v = find_seed(M, P2, g)
    ws = Workspace(g, P2, M)
    assert ws.parts(v.values)[2] > 0
    # first radius L/4 succeeds: the support ends at |x| = 4
    r = g.radius()
    assert np.all(v.values[r >= 4.0] == 0) and v.values[r < 3.9].min() > 0


def test_seed_competing_model_uses_positive_t0():
    m = DoublePower(2.0, 2.5, -1)
    v = find_seed(m, P2, make_grid(2, 16.0, 64))
    assert m.F(v.sup) > 0


@pytest.mark.xfail(strict=True, reason="D(u) >= 0 for every real F, so a negative F still yields D > 0")
def test_seed_negative_F_raises():
    m = DoublePower(2.0, 2.5, -1, a=0.0)
    with pytest.raises(SeedFailure):
        find_seed(m, P2, make_grid(2, 16.0, 64))


def test_default_solution(ground_state):
    res = ground_state
    assert res.converged and res.status == "converged"
    u = res.u.values
    assert u.min() > 0
    assert asymmetry(res.u) < 1e-6
    r = res.report
    assert abs(r.pohozaev) <= 1e-8 * (r.kinetic + r.mass)
    assert res.residual <= 1e-8
    assert res.p_mu_estimate == r.energy > 0


def test_descent_history(ground_state):
    res = ground_state
    J = np.array([h["J"] for h in res.history])
    # accepted steps never raise J by more than the rounding slack
    assert np.all(np.diff(J) <= J_NOISE * np.abs(J[:-1]))
    assert J[-1] < J[0]
    scale = res.report.kinetic + res.params.mu * res.report.mass
    assert all(abs(h["P"]) <= 1e-10 * scale * 1.01 for h in res.history)
    assert {"J", "grad", "P"} <= set(res.history[0])


def test_modulus_does_not_raise_kinetic(ground_state):
    u = ground_state.u
    assert kinetic(u.with_values(np.abs(u.values)), P2) <= kinetic(u, P2) * (1 + 1e-12)


def test_sign_flipped_seed(small_ground_state):
    g = small_ground_state.u.grid
    seed = find_seed(M, P2, g)
    neg = quiet(minimize_pohozaev, -seed, M, P2)
    assert neg.converged
    assert neg.u.values.max() < 0
    j0, j1 = small_ground_state.p_mu_estimate, neg.p_mu_estimate
    assert abs(j0 - j1) <= 1e-10 * j0


def test_projection_hits_tolerance():
    g = make_grid(2, 16.0, 128)
    ws = Workspace(g, P2, M)
    u = random_bumps(g, np.random.default_rng(2), signed=False, width=(0.06, 0.09))
    # a field near the Pohozaev set, as met inside the solver's line search
    near = 1.05 * _normalize_amplitude(ws, u.values)
    v, parts, t = project_pohozaev(ws, near, tol=1e-10)
    assert 0.5 < t < 2
    A, B, D = parts[:3]
    P = 0.5 * (2 - 1) * A + B - 1.5 * D
    assert abs(P) <= 1e-10 * (A + B)


def test_max_iters_reports_partial():
    g = make_grid(2, 16.0, 64)
    res = quiet(minimize_pohozaev, find_seed(M, P2, g), M, P2, SolveOptions(max_iters=1))
    assert not res.converged and res.status == "max_iters"
    assert any("MaxIters" in w for w in res.warnings)
    assert len(res.history) == 2


def test_fixed_point_zero_seed():
    g = make_grid(2, 8.0, 32)
    res = fixed_point_resolvent(Field.zeros(g), M, P2)
    assert res.converged and res.u.sup == 0
    assert any("trivial limit" in w for w in res.warnings)


def test_fixed_point_from_minimizer(small_ground_state):
    res = quiet(fixed_point_resolvent, small_ground_state.u, M, P2)
    assert res.converged
    d = np.linalg.norm(res.u.values - small_ground_state.u.values) / np.linalg.norm(small_ground_state.u.values)
    # at L = 16 the two fixed sets differ by a box effect of about 1e-3
    assert d < 1e-2


@pytest.mark.xfail(strict=True, reason="on a finite box the Pohozaev minimizer is not an exact fixed point; "
                                      "the remaining residual needs more than two sweeps")
def test_fixed_point_warm_start_two_iterations(small_ground_state):
    res = quiet(fixed_point_resolvent, small_ground_state.u, M, P2)
    assert res.converged and res.iterations <= 2


def test_cross_solver_small_box(small_ground_state):
    seed = find_seed(M, P2, small_ground_state.u.grid)
    fp = quiet(fixed_point_resolvent, seed, M, P2)
    assert fp.converged
    a, b = center(small_ground_state.u).values, center(fp.u).values
    # box effect at L = 16; the 1e-4 agreement is checked at L = 48 in the acceptance suite
    assert np.linalg.norm(a - b) / np.linalg.norm(a) < 1e-2
    assert abs(fp.report.energy / small_ground_state.report.energy - 1) < 1e-5


@pytest.mark.parametrize("model,L,n", [(DoublePower(2.0, 2.5, 1), 16.0, 256), (Saturable(1.0), 24.0, 384)])
def test_cross_solver_other_models(model, L, n):
    # both ground states are narrow (half-height radius ~0.3), hence h = 1/8
    g = make_grid(2, L, n)
    seed = find_seed(model, P2, g)
    a = quiet(minimize_pohozaev, seed, model, P2)
    b = quiet(fixed_point_resolvent, seed, model, P2)
    assert a.converged and b.converged
    ua, ub = center(a.u).values, center(b.u).values
    assert np.linalg.norm(ua - ub) / np.linalg.norm(ua) < 1e-4
    assert abs(a.report.energy / b.report.energy - 1) < 1e-6


def test_mountain_pass_bound(ground_state):
    u = ground_state.u
    path = quiet(dilation_path, u, [0.5, 1.0, 2.0])
    assert quiet(mountain_pass_upper_bound, path, M, P2) == pytest.approx(ground_state.p_mu_estimate, rel=1e-12)


def test_mountain_pass_not_admissible(ground_state):
    u = ground_state.u
    with pytest.raises(NotAdmissible):
        mountain_pass_upper_bound(quiet(dilation_path, u, [0.5, 1.0]), M, P2)
    with pytest.raises(NotAdmissible):
        mountain_pass_upper_bound([u], M, P2)
    with pytest.raises(NotAdmissible):
        mountain_pass_upper_bound([u, 2 * u], M, P2)


def test_center_moves_mass_to_origin():
    # h = 1/8 keeps the Gaussian band-limited to well below the tolerance
    g = make_grid(2, 8.0, 128)
    u = Field.from_function(g, lambda x, y: np.exp(-(x**2 + 2 * y**2)))
    shifted = Field.from_function(g, lambda x, y: np.exp(-((x - 0.77) ** 2 + 2 * (y + 0.31) ** 2)))
    assert asymmetry(shifted) > 1e-2
    back = center(shifted)
    assert np.max(np.abs(back.values - u.values)) < 1e-10
    assert center(Field.zeros(g)).sup == 0


def test_result_serialization(small_ground_state, tmp_path):
    res = small_ground_state
    d = json.loads(res.to_json())
    assert d["converged"] is True and d["solver"] == "pohozaev"
    assert d["report"]["energy"] == res.report.energy
    assert d["grid"] == {"dim": 2, "half_length": 16.0, "points_per_axis": 128}
    res.save(tmp_path / "r.json", tmp_path / "r.fchq")
    from fchoquard.io import load_snapshot
    assert np.array_equal(load_snapshot(tmp_path / "r.fchq").values, res.u.values)
    assert isinstance(res, SolveResult)


def test_pohozaev_residual_of_seed_is_order_one():
    g = make_grid(2, 16.0, 64)
    seed = find_seed(M, P2, g)
    assert pohozaev_residual(seed, M, P2) > 1e-2
