"""Energy, Pohozaev functional, gradient and dilations.

With A = ||(-Delta)^{s/2} u||^2 (kinetic), B = ||u||^2 (mass) and
D = int (I_alpha * F(u)) F(u):

    J(u) = A/2 + mu B/2 - D/2
    P(u) = (N-2s)/2 A + N mu/2 B - (N+alpha)/2 D

Under u -> u(./t) the triple (A, B, D) scales as (t^{N-2s}, t^N, t^{N+alpha}),
which is what the projection and path routines below rely on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sp_fft
from scipy import optimize

from .errors import DilationRange, NoPohozaevTime
from .grid import Field, GridSpec, check_boundary, integrate
from .nonlinearity import NonlinearityModel
from .spectral import (
    FracParams,
    _apply_rfft,
    _resolvent_symbol,
    _riesz_values,
    _symbol,
)

__all__ = [
    "EnergyReport",
    "Workspace",
    "dterm",
    "energy",
    "pohozaev",
    "energy_report",
    "gradient",
    "pohozaev_gradient",
    "dilate",
    "pohozaev_time",
    "pohozaev_time_from_parts",
    "path_energy",
    "path_pohozaev",
]

T_BOUNDS = (0.25, 4.0)


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    mass: float
    dterm: float
    energy: float
    pohozaev: float
    grad_norm: float
    dim: int = 0
    s: float = 0.0
    alpha: float = 0.0
    mu: float = 0.0

    FIELDS = ("kinetic", "mass", "dterm", "energy", "pohozaev", "grad_norm", "dim", "s", "alpha", "mu")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "EnergyReport":
        return cls(**{k: d[k] for k in cls.FIELDS})


class Workspace:
    """Array-level evaluation of the functionals for one (grid, params, model).

    Holds the cached multipliers so solvers can work on raw ``ndarray`` values
    without re-wrapping fields on every iteration.
    """

    def __init__(self, grid: GridSpec, p: FracParams, m: NonlinearityModel, rule: str = "spectral"):
        self.grid, self.p, self.m, self.rule = grid, p, m, rule
        self.sym_s = _symbol(grid, p.s)
        self.resolvent = _resolvent_symbol(grid, p.s, p.mu)
        self.dv = grid.cell_volume

    def integrate(self, a) -> float:
        return float(self.dv * np.sum(a))

    def frac(self, u):
        return _apply_rfft(u, self.sym_s)

    def resolve(self, rhs):
        return _apply_rfft(rhs, self.resolvent)

    def riesz(self, a):
        return _riesz_values(a, self.grid, self.p.alpha, self.rule)

    def parts(self, u):
        """(A, B, D, Fu, V) with V = I_alpha * F(u)."""
        Fu = self.m.F(u)
        V = self.riesz(Fu)
        A = _kinetic_values(u, self.grid, self.sym_s)
        B = self.integrate(u * u)
        D = self.integrate(V * Fu)
        return A, B, D, Fu, V

    def energy(self, u) -> float:
        A, B, D, _, _ = self.parts(u)
        return 0.5 * A + 0.5 * self.p.mu * B - 0.5 * D

    def pohozaev(self, u) -> float:
        A, B, D, _, _ = self.parts(u)
        return pohozaev_from_parts(A, B, D, self.p)

    def source(self, u, V=None):
        """(I_alpha * F(u)) f(u)."""
        if V is None:
            V = self.riesz(self.m.F(u))
        return V * self.m.f(u)

    def gradient(self, u, V=None):
        return self.frac(u) + self.p.mu * u - self.source(u, V)

    def pohozaev_gradient(self, u, V=None):
        N, s, a, mu = self.p.dim, self.p.s, self.p.alpha, self.p.mu
        return (N - 2 * s) * self.frac(u) + N * mu * u - (N + a) * self.source(u, V)

    def report(self, u, grad: bool = True) -> EnergyReport:
        A, B, D, _, V = self.parts(u)
        gn = math.sqrt(self.integrate(self.gradient(u, V) ** 2)) if grad else float("nan")
        p = self.p
        return EnergyReport(
            kinetic=A,
            mass=B,
            dterm=D,
            energy=energy_from_parts(A, B, D, p),
            pohozaev=pohozaev_from_parts(A, B, D, p),
            grad_norm=gn,
            dim=p.dim,
            s=p.s,
            alpha=p.alpha,
            mu=p.mu,
        )


def _kinetic_values(u: np.ndarray, grid: GridSpec, sym: np.ndarray) -> float:
    uh = sp_fft.rfftn(u)
    w = np.abs(uh) ** 2 * sym
    n = grid.n
    weights = np.full(n // 2 + 1, 2.0)
    weights[0] = weights[-1] = 1.0
    return float(np.sum(w * weights)) * grid.cell_volume / n**grid.dim


def energy_from_parts(A, B, D, p: FracParams) -> float:
    return 0.5 * A + 0.5 * p.mu * B - 0.5 * D


def pohozaev_from_parts(A, B, D, p: FracParams) -> float:
    N = p.dim
    return 0.5 * (N - 2 * p.s) * A + 0.5 * N * p.mu * B - 0.5 * (N + p.alpha) * D


# --------------------------------------------------------------------------
# Field-level API


def _ws(u: Field, p, m, rule="spectral") -> Workspace:
    return Workspace(u.grid, p, m, rule)


def dterm(u: Field, m: NonlinearityModel, p: FracParams, rule: str = "spectral") -> float:
    """D(u) = int (I_alpha * F(u)) F(u) dx."""
    Fu = m.F(u.values)
    check_boundary(u.with_values(Fu), what="F(u)")
    V = _riesz_values(Fu, u.grid, p.alpha, rule)
    return integrate(V * Fu, u.grid)


def energy(u: Field, m: NonlinearityModel, p: FracParams) -> float:
    return _ws(u, p, m).energy(u.values)


def pohozaev(u: Field, m: NonlinearityModel, p: FracParams) -> float:
    return _ws(u, p, m).pohozaev(u.values)


def energy_report(u: Field, m: NonlinearityModel, p: FracParams) -> EnergyReport:
    return _ws(u, p, m).report(u.values)


def gradient(u: Field, m: NonlinearityModel, p: FracParams, preconditioned: bool = False) -> Field:
    """L^2 gradient (-Delta)^s u + mu u - (I_alpha * F(u)) f(u).

    With ``preconditioned=True`` the Bessel resolvent ((-Delta)^s + mu)^{-1} is
    applied to it, giving u - ((-Delta)^s + mu)^{-1}[(I_alpha * F(u)) f(u)].
    """
    ws = _ws(u, p, m)
    g = ws.gradient(u.values)
    if preconditioned:
        g = ws.resolve(g)
    return u.with_values(g)


def pohozaev_gradient(u: Field, m: NonlinearityModel, p: FracParams) -> Field:
    return u.with_values(_ws(u, p, m).pohozaev_gradient(u.values))


# --------------------------------------------------------------------------
# dilation


def _interp_matrix(grid: GridSpec, t: float) -> np.ndarray:
    """Matrix E with (E @ c)_j = band-limited interpolant of coefficients c at x_j / t."""
    n, L = grid.n, grid.L
    y = grid.axis() / t + L  # shift so the first sample sits at phase 0
    k = np.fft.fftfreq(n, d=1.0 / n)
    xi = np.pi * k / L
    E = np.exp(1j * np.outer(y, xi)) / n
    # Nyquist mode: use cos so the interpolant stays real
    nyq = n // 2
    E[:, nyq] = np.cos(xi[nyq] * y) / n
    # for t < 1 some x/t leave the box; the field is zero there, not periodic.
    # Points within one cell of the seam keep their interpolated value so the
    # map stays continuous at t = 1.
    E[np.abs(grid.axis() / t) > L + grid.h] = 0.0
    return E


def _dilate_values(values: np.ndarray, grid: GridSpec, t: float) -> np.ndarray:
    if t == 1.0:
        return values.copy()
    c = sp_fft.fftn(values)
    E = _interp_matrix(grid, t)
    for ax in range(grid.dim):
        c = np.moveaxis(np.tensordot(E, c, axes=([1], [ax])), 0, ax)
    return np.ascontiguousarray(c.real)


def dilate(u: Field, t: float, t_min: float = T_BOUNDS[0], t_max: float = T_BOUNDS[1],
           boundary_threshold: float = 1e-8) -> Field:
    """u(./t) by trigonometric interpolation on the same grid."""
    if not (t_min <= t <= t_max):
        raise DilationRange(f"t = {t} outside [{t_min}, {t_max}]")
    out = u.with_values(_dilate_values(u.values, u.grid, float(t)))
    if t > 1.0:
        check_boundary(out, boundary_threshold, what=f"dilated field (t={t:g})")
    return out


# --------------------------------------------------------------------------
# scaling-law path quantities


def path_energy(A, B, D, p: FracParams, t):
    """J(u(./t)) from the scaling laws."""
    N = p.dim
    t = np.asarray(t, dtype=float)
    return 0.5 * t ** (N - 2 * p.s) * A + 0.5 * p.mu * t**N * B - 0.5 * t ** (N + p.alpha) * D


def path_pohozaev(A, B, D, p: FracParams, t):
    N = p.dim
    t = np.asarray(t, dtype=float)
    return (0.5 * (N - 2 * p.s) * t ** (N - 2 * p.s) * A + 0.5 * N * p.mu * t**N * B
            - 0.5 * (N + p.alpha) * t ** (N + p.alpha) * D)


def pohozaev_time_from_parts(A: float, B: float, D: float, p: FracParams, rtol: float = 1e-12) -> float:
    """Unique positive root of (N-2s)/2 A + N/2 mu B t^{2s} - (N+alpha)/2 D t^{2s+alpha}."""
    if not D > 0:
        raise NoPohozaevTime(f"D(u) = {D:.3e} <= 0: the dilation path never reaches P = 0")
    N, s, a, mu = p.dim, p.s, p.alpha, p.mu

    def g(t):
        return 0.5 * (N - 2 * s) * A + 0.5 * N * mu * B * t ** (2 * s) - 0.5 * (N + a) * D * t ** (2 * s + a)

    lo, hi = 1.0, 1.0
    while g(hi) > 0:
        hi *= 2.0
    while g(lo) <= 0:
        lo *= 0.5
    return float(optimize.brentq(g, lo, hi, xtol=1e-300, rtol=rtol, maxiter=500))


def pohozaev_time(u: Field, m: NonlinearityModel, p: FracParams) -> float:
    A, B, D, _, _ = _ws(u, p, m).parts(u.values)
    return pohozaev_time_from_parts(A, B, D, p)


def scaling_triple(u: Field, m: NonlinearityModel, p: FracParams):
    """(kinetic, mass, dterm) of u."""
    A, B, D, _, _ = _ws(u, p, m).parts(u.values)
    return A, B, D

