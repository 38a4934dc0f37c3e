import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from fchoquard.errors import NonlinearityOverflow, UnknownModel
from fchoquard.nonlinearity import (
    DoublePower,
    PurePower,
    Saturable,
    check_growth,
    default_model,
    eval_F,
    eval_f,
    parse_model,
    probe_t0,
)
from fchoquard.spectral import FracParams

P2 = FracParams(2, 0.5, 1.0, 1.0)
MODELS = [PurePower(2.0), PurePower(2.7), DoublePower(2.0, 2.5, 1), DoublePower(2.5, 2.0, -1, 1.0, 0.5),
          Saturable(1.0), Saturable(2.0)]


def test_pure_power_example():
    m = PurePower(2.0)
    assert eval_F(m, 3.0) == 4.5
    assert eval_f(m, 3.0) == 3.0


@pytest.mark.parametrize("m", MODELS)
def test_zero_at_origin(m):
    assert eval_F(m, 0.0) == 0.0
    assert eval_f(m, 0.0) == 0.0


def test_saturable_example():
    m = Saturable(1.0)
    assert eval_f(m, 1.0) == 0.5
    ref, _ = sp_integrate.quad(lambda t: t**3 / (1 + t * t), 0, 1, epsabs=0, epsrel=1e-13)
    assert abs(eval_F(m, 1.0) - ref) <= 1e-10 * ref


def test_saturable_small_argument_branch():
    m = Saturable(1.5)
    for t in (1e-4, 0.01, 0.03, 0.05):
        ref, _ = sp_integrate.quad(lambda x: m.f(x), 0, t, epsabs=0, epsrel=1e-13)
        assert eval_F(m, t) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("m", MODELS)
def test_f_is_derivative_of_F(m):
    t = np.linspace(-10, 10, 401)
    t = t[np.abs(t) > 1e-3]
    eps = 1e-6 * np.maximum(1.0, np.abs(t))
    fd = (m.F(t + eps) - m.F(t - eps)) / (2 * eps)
    assert np.max(np.abs(fd - m.f(t)) / np.maximum(np.abs(m.f(t)), 1e-300)) < 1e-6


@settings(max_examples=50)
@given(t=st.floats(-1e6, 1e6), r=st.floats(1.1, 5.0))
def test_pure_power_even_and_odd(t, r):
    m = PurePower(r)
    assert eval_F(m, -t) == eval_F(m, t)
    assert eval_f(m, -t) == -eval_f(m, t)


def test_overflow_guard():
    with pytest.raises(NonlinearityOverflow):
        eval_F(PurePower(3.0), 1e120)
    with pytest.raises(ValueError):
        eval_F(PurePower(2.0), math.nan)


def test_growth_default_model():
    rep = check_growth(default_model(), P2)
    assert rep.window == (1.5, 3.0)
    assert rep.f1 and rep.f2 and rep.f3 and rep.f4 and rep.f5
    assert rep.existence
    c = rep.corroborated
    assert c["zero_decreasing"] and c["inf_decreasing"]


def test_growth_below_and_above_window():
    assert check_growth(PurePower(1.2), P2).f3_i is False
    assert check_growth(PurePower(3.5), P2).f3_ii is False


def test_growth_critical_reported():
    rep = check_growth(PurePower(1.5), P2)
    assert rep.f3_i == "critical"
    assert rep.f2_i is True
    assert check_growth(PurePower(3.0), P2).f3_ii == "critical"


@pytest.mark.parametrize("m", [DoublePower(2.0, 2.5, 1), Saturable(1.0)])
def test_shipped_models_satisfy_assumptions(m):
    rep = check_growth(m, P2)
    assert rep.existence and rep.f5
    c = rep.corroborated
    assert c["zero_decreasing"] and c["inf_decreasing"]


def test_competing_powers_t0():
    # F = t^2/2 - t^2.5/2.5 is positive only for small t
    m = DoublePower(2.0, 2.5, -1)
    t0 = probe_t0(m)
    assert t0 is not None and m.F(t0) > 0
    assert check_growth(m, P2).f4


def test_no_positive_t0():
    m = DoublePower(2.0, 2.5, -1, a=0.0)
    t0 = probe_t0(m)
    assert t0 is not None and m.F(t0) < 0


@pytest.mark.parametrize("m", MODELS)
def test_parse_round_trip(m):
    assert parse_model(m.spec()) == m


@pytest.mark.parametrize("text", ["", "cubic r=3", "pure_power r", "pure_power q=2", "pure_power r=0.5",
                                  "double_power sign=2", "saturable scale=-1"])
def test_parse_errors(text):
    with pytest.raises(UnknownModel):
        parse_model(text)
