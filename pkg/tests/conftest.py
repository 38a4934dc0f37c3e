import time
import warnings

import pytest

from fchoquard.grid import make_grid
from fchoquard.ground_state import SolveOptions, find_seed, minimize_pohozaev
from fchoquard.nonlinearity import default_model
from fchoquard.spectral import FracParams

_cache = {}
SOLVE_SECONDS = {}


def default_params():
    return FracParams(2, 0.5, 1.0, 1.0)


def solve_default(L=16.0, n=256, max_iters=2000):
    """Cached Pohozaev solve of the default problem on [-L, L]^2 with n points per axis."""
    key = (L, n)
    if key not in _cache:
        g = make_grid(2, L, n)
        p, m = default_params(), default_model()
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _cache[key] = minimize_pohozaev(find_seed(m, p, g), m, p, SolveOptions(max_iters=max_iters))
        SOLVE_SECONDS[key] = time.perf_counter() - t0
    return _cache[key]


@pytest.fixture(scope="session")
def params():
    return default_params()


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def ground_state():
    """Default solve at L = 16, n = 256."""
    return solve_default()


@pytest.fixture(scope="session")
def small_ground_state():
    """Default solve at L = 16, n = 128."""
    return solve_default(16.0, 128)


# acceptance summary ---------------------------------------------------------

ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
