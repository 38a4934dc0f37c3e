"""Uniform tensor grids on the truncated box [-L, L]^N.

Fields are sampled at x_j = -L + j h, j = 0..n-1, with h = 2L/n, so the grid
center (the origin) sits at index n/2 along every axis.  The periodic
extension of the box is the discretization convention throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BoundaryContamination, InvalidGrid

__all__ = [
    "GridSpec",
    "Field",
    "make_grid",
    "integrate",
    "wavenumbers",
    "boundary_ratio",
    "check_boundary",
]

MAX_POINTS = 2**28


@dataclass(frozen=True)
class GridSpec:
    dim: int
    half_length: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise InvalidGrid(f"dim must be 1, 2 or 3, got {self.dim}")
        if not np.isfinite(self.half_length) or self.half_length <= 0:
            raise InvalidGrid(f"half_length must be > 0, got {self.half_length}")
        n = self.points_per_axis
        if int(n) != n or n < 8 or n % 2:
            raise InvalidGrid(f"points_per_axis must be even and >= 8, got {n}")
        if n**self.dim > MAX_POINTS:
            raise InvalidGrid(f"{n}^{self.dim} points exceeds the supported size")

    @property
    def n(self) -> int:
        return self.points_per_axis

    @property
    def L(self) -> float:
        return self.half_length

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.points_per_axis

    h = spacing

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis(self) -> np.ndarray:
        return -self.half_length + self.spacing * np.arange(self.points_per_axis)

    def coords(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays, one per axis (``np.ogrid`` style)."""
        x = self.axis()
        out = []
        for d in range(self.dim):
            shape = [1] * self.dim
            shape[d] = self.points_per_axis
            out.append(x.reshape(shape))
        return tuple(out)

    def radius(self) -> np.ndarray:
        r2 = sum(c**2 for c in self.coords())
        return np.sqrt(np.broadcast_to(r2, self.shape))


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a function on a :class:`GridSpec` (values are read-only)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.size != self.grid.points_per_axis**self.grid.dim:
            raise InvalidGrid(f"expected {self.grid.shape} values, got shape {v.shape}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "Field":
        """Sample ``func(*coords)`` on the grid."""
        return cls(grid, np.broadcast_to(func(*grid.coords()), grid.shape))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @cached_property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l2(self) -> float:
        return float(np.sqrt(integrate(self.values**2, self.grid)))

    def __add__(self, other):
        return self.with_values(self.values + _vals(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - _vals(other))

    def __rsub__(self, other):
        return self.with_values(_vals(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * _vals(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / _vals(other))

    def __neg__(self):
        return self.with_values(-self.values)


def _vals(x):
    return x.values if isinstance(x, Field) else x


def make_grid(dim: int, half_length: float, points_per_axis: int) -> GridSpec:
    return GridSpec(int(dim), float(half_length), int(points_per_axis))


def integrate(f, grid: GridSpec | None = None) -> float:
    """Rectangle rule h^N * sum(values); exact trapezoid under periodic extension."""
    if isinstance(f, Field):
        grid, values = f.grid, f.values
    else:
        values = np.asarray(f)
    return float(grid.cell_volume * np.sum(values))


def wavenumbers(grid: GridSpec) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-axis frequencies pi*k/L in FFT order, and |xi| on the full lattice.

    The returned axis arrays are in ``numpy.fft`` order (zero mode first); sorted
    they run over k = -n/2 .. n/2-1.
    """
    n, L = grid.points_per_axis, grid.half_length
    k = np.fft.fftfreq(n, d=1.0 / n)
    xi = np.pi * k / L
    axes = []
    for d in range(grid.dim):
        shape = [1] * grid.dim
        shape[d] = n
        axes.append(xi.reshape(shape))
    mod = np.sqrt(np.broadcast_to(sum(a**2 for a in axes), grid.shape))
    return axes, mod


def boundary_ratio(u: Field, shell: float = 0.1) -> float:
    """max |u| over the outer ``shell`` fraction of the box divided by max |u|."""
    if u.sup == 0.0:
        return 0.0
    g = u.grid
    inner = (1.0 - shell) * g.half_length
    mask = np.zeros(g.shape, dtype=bool)
    for c in g.coords():
        mask |= np.broadcast_to(np.abs(c) >= inner, g.shape)
    return float(np.max(np.abs(u.values[mask])) / u.sup)


def check_boundary(u: Field, threshold: float = 1e-8, shell: float = 0.1, what: str = "field"):
    """Warn with :class:`BoundaryContamination` if ``u`` has not decayed near the box edge.

    Returns the measured ratio so callers can attach it to their results.
    """
    ratio = boundary_ratio(u, shell)
    if ratio > threshold:
        warnings.warn(
            f"{what} has not decayed at the box boundary "
            f"(edge/max = {ratio:.2e} > {threshold:.0e})",
            BoundaryContamination,
            stacklevel=3,
        )
    return ratio
