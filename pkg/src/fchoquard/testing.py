"""Random test fields for property checks.

The scaling-law fields are sums of radial Laguerre-Gauss profiles
L_k(q) exp(-q), q = |x - c|^2 / (2 w^2).  For k >= 1 their low moments vanish,
which suppresses the leading periodic-image term of the kinetic energy on
the box; the Gaussian envelope keeps them numerically band-limited.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_laguerre

from .grid import Field, GridSpec

__all__ = ["laguerre_gauss_field", "scaling_fields", "scaling_errors"]


def laguerre_gauss_field(grid: GridSpec, rng: np.random.Generator, degree: int = 3,
                         width: tuple[float, float] = (0.084, 0.09), components: int = 1,
                         offset: float = 0.02) -> Field:
    """Sum of isotropic Laguerre-Gauss components with random widths and weights.

    ``width`` bounds the envelope scale as a fraction of the half length L;
    centres are drawn uniformly within ``offset * L`` of the origin.  Weights
    are drawn from [0.5, 1.5] with random signs.
    """
    coords = grid.coords()
    out = np.zeros(grid.shape)
    for _ in range(components):
        w = rng.uniform(*width) * grid.L
        c = rng.uniform(-offset, offset, grid.dim) * grid.L
        q = 0.5 * sum(((x - ci) / w) ** 2 for x, ci in zip(coords, c))
        out = out + rng.choice((-1.0, 1.0)) * rng.uniform(0.5, 1.5) * eval_laguerre(degree, q) * np.exp(-q)
    return Field(grid, out)


def scaling_fields(grid: GridSpec, count: int = 10, seed: int = 0, **kw) -> list[Field]:
    rng = np.random.default_rng(seed)
    return [laguerre_gauss_field(grid, rng, **kw) for _ in range(count)]


def scaling_errors(fields, ts, m, p) -> np.ndarray:
    """Relative deviation of (kinetic, mass, dterm)(u(./t)) from the scaling laws.

    Returns an array of shape (len(fields), len(ts), 3).
    """
    from .functionals import Workspace, _dilate_values

    fields = list(fields)
    ws = Workspace(fields[0].grid, p, m)
    N = p.dim
    out = np.empty((len(fields), len(ts), 3))
    for i, u in enumerate(fields):
        base = np.array(ws.parts(u.values)[:3])
        for j, t in enumerate(ts):
            law = np.array([t ** (N - 2 * p.s), t**N, t ** (N + p.alpha)]) * base
            got = np.array(ws.parts(_dilate_values(u.values, u.grid, float(t)))[:3])
            out[i, j] = np.abs(got / law - 1.0)
    return out
