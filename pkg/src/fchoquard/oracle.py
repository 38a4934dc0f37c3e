"""Slow reference implementations for tests.

Nothing here calls the production convolution or multiplier routines: sums
are formed pair by pair and integrals by adaptive quadrature.  Every O(n^2)
routine checks the point cap before allocating anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .errors import TooLarge, UnsupportedDim
from .grid import Field

__all__ = [
    "OracleConfig",
    "kernel_constant",
    "cell_average",
    "direct_conv",
    "riesz_quad",
    "frac_laplacian_quad",
    "frac_laplacian_periodic_quad",
    "gagliardo_double_integral",
    "fd_gradient",
    "fd_directional",
]


@dataclass(frozen=True)
class OracleConfig:
    max_points: int = 4096
    singular_cell_rule: str = "cell_average"  # radial cell average of the kernel at x = 0
    chunk: int = 1 << 22

    def check(self, npts: int):
        if npts > self.max_points:
            raise TooLarge(f"{npts} points exceeds the oracle cap of {self.max_points}")


def kernel_constant(N: int, alpha: float) -> float:
    """A_{N,alpha} from plain gamma functions."""
    return special.gamma((N - alpha) / 2) / (2**alpha * math.pi ** (N / 2) * special.gamma(alpha / 2))


def cell_average(N: int, alpha: float, h: float) -> float:
    """Mean of A |x|^{alpha-N} over [-h/2, h/2]^N by quadrature in polar form."""
    a = h / 2
    A = kernel_constant(N, alpha)
    if N == 1:
        return A * 2 * a**alpha / alpha / h
    if N == 2:
        # 8 congruent triangles; along angle th the cell extends to a / cos(th)
        val, _ = sp_integrate.quad(lambda th: (a / math.cos(th)) ** alpha / alpha, 0, math.pi / 4,
                                   epsabs=0, epsrel=1e-13)
        return A * 8 * val / h**2
    # 24 congruent pieces: face x = a, quadrant y, z >= 0, split along y = z
    def inner(th, ph):
        rmax = a / (math.sin(th) * math.cos(ph))
        return rmax**alpha / alpha * math.sin(th)

    val, _ = sp_integrate.dblquad(
        inner, 0, math.pi / 4,
        lambda ph: math.atan(1 / math.cos(ph)), lambda ph: math.pi / 2,
        epsabs=0, epsrel=1e-12,
    )
    return A * 24 * val / h**3


def _points(u: Field) -> np.ndarray:
    g = u.grid
    grids = np.meshgrid(*([g.axis()] * g.dim), indexing="ij")
    return np.stack([x.ravel() for x in grids], axis=1)


def direct_conv(u: Field, alpha: float, cfg: OracleConfig = OracleConfig()) -> Field:
    """h^N sum_j K(x_i - x_j) u_j with the cell-averaged kernel at i = j (free space, no images)."""
    g = u.grid
    npts = g.n**g.dim
    cfg.check(npts)
    X = _points(u)
    v = u.values.ravel()
    A = kernel_constant(g.dim, alpha)
    c0 = cell_average(g.dim, alpha, g.h)
    out = np.empty(npts)
    rows = max(1, cfg.chunk // npts)
    for i0 in range(0, npts, rows):
        d = X[i0:i0 + rows, None, :] - X[None, :, :]
        r = np.sqrt(np.sum(d * d, axis=-1))
        with np.errstate(divide="ignore"):
            K = np.where(r > 0, A * r ** (alpha - g.dim), c0)
        out[i0:i0 + rows] = K @ v
    return u.with_values(out.reshape(g.shape) * g.cell_volume)


def riesz_quad(func, x: float, alpha: float, support: float = math.inf) -> float:
    """(I_alpha * func)(x) in one dimension by adaptive quadrature.

    ``func`` must be a vectorizable callable vanishing outside [-support, support].
    """
    A = kernel_constant(1, alpha)
    lo, hi = -support, support
    tot = 0.0
    # algebraic end-point weights take care of |x - y|^{alpha - 1}
    if lo < x:
        left = max(lo, x - 50.0) if math.isinf(lo) else lo
        v, _ = sp_integrate.quad(lambda y: func(y), left, x, weight="alg", wvar=(0, alpha - 1),
                                 epsabs=1e-15, epsrel=1e-12, limit=400)
        tot += v
        if math.isinf(lo):
            v, _ = sp_integrate.quad(lambda y: func(y) * abs(x - y) ** (alpha - 1), -math.inf, left,
                                     epsabs=1e-15, epsrel=1e-12, limit=400)
            tot += v
    if x < hi:
        right = min(hi, x + 50.0) if math.isinf(hi) else hi
        v, _ = sp_integrate.quad(lambda y: func(y), x, right, weight="alg", wvar=(alpha - 1, 0),
                                 epsabs=1e-15, epsrel=1e-12, limit=400)
        tot += v
        if math.isinf(hi):
            v, _ = sp_integrate.quad(lambda y: func(y) * abs(x - y) ** (alpha - 1), right, math.inf,
                                     epsabs=1e-15, epsrel=1e-12, limit=400)
            tot += v
    return A * tot


def _frac_constant(s: float) -> float:
    return 4**s * special.gamma((1 + 2 * s) / 2) / (math.sqrt(math.pi) * abs(special.gamma(-s)))


def frac_laplacian_quad(func, x: float, s: float) -> float:
    """(-Delta)^s func at x in one dimension from the singular-integral form.

    C_{1,s} int_0^inf (2 f(x) - f(x+z) - f(x-z)) / z^{1+2s} dz, split at z = 1.
    """
    fx = func(x)

    def second(z):
        return 2 * fx - func(x + z) - func(x - z)

    near, _ = sp_integrate.quad(lambda z: second(z) / z ** (1 + 2 * s), 0, 1, epsabs=1e-14, epsrel=1e-11, limit=400)
    def outer(z):
        return -(func(x + z) + func(x - z)) / z ** (1 + 2 * s)

    # func is assumed concentrated near the origin, i.e. near z = |x|
    Z = abs(x) + 40.0
    brk = [abs(x)] if abs(x) > 1 else None
    far, _ = sp_integrate.quad(outer, 1, Z, points=brk, epsabs=1e-15, epsrel=1e-12, limit=400)
    tail, _ = sp_integrate.quad(outer, Z, math.inf, epsabs=1e-15, epsrel=1e-12, limit=400)
    far += tail + 2 * fx / (2 * s)  # int_1^inf 2 f(x) z^{-1-2s} dz
    return _frac_constant(s) * (near + far)


def frac_laplacian_periodic_quad(func, x: float, s: float, L: float, mass: float, images: int = 16) -> float:
    """(-Delta)^s of the 2L-periodization of ``func`` at x.

    Sums frac_laplacian_quad over the images |k| <= images; the remaining
    images use the far-field form -C_{1,s} mass |y|^{-1-2s}, summed with the
    Hurwitz zeta function.  ``mass`` is the integral of ``func``.
    """
    tot = sum(frac_laplacian_quad(func, x + 2 * L * k, s) for k in range(-images, images + 1))
    e = 1 + 2 * s
    P = 2 * L
    tail = special.zeta(e, images + 1 + x / P) + special.zeta(e, images + 1 - x / P)
    return tot - _frac_constant(s) * mass * tail / P**e


def gagliardo_double_integral(u: Field, s: float, cfg: OracleConfig = OracleConfig(),
                              images: str = "none", diagonal: bool = False) -> float:
    """h^2 sum_{i != j} (u_i - u_j)^2 / |x_i - x_j|^{1+2s}  (N = 1, constant-free).

    images
        "none": pairs inside the box only (the raw sum);
        "exterior": plus the pairs with one point outside the box, where u = 0,
        in closed form;
        "periodic": j runs over all integers with u extended periodically,
        the image sums done with the Hurwitz zeta function.
    diagonal
        subtract the leading singular-quadrature error
        2 zeta(2s-1) h^{2-2s} h sum_i u'(x_i)^2 of the diagonal gap
        (u' by second-order finite differences).
    """
    g = u.grid
    if g.dim != 1:
        raise UnsupportedDim("the Gagliardo double integral oracle is one-dimensional")
    if images not in ("none", "exterior", "periodic"):
        raise ValueError(f"unknown images mode {images!r}")
    n = g.n
    cfg.check(n)
    x = g.axis()
    v = u.values
    h = g.h
    e = 1 + 2 * s
    tot = 0.0
    if images == "periodic":
        r = np.arange(1, n)
        W = (special.zeta(e, r / n) + special.zeta(e, 1 - r / n)) / (n * h) ** e
        for k, w in zip(r, W):
            tot += w * float(np.sum((v - np.roll(v, -k)) ** 2))
    else:
        rows = max(1, cfg.chunk // n)
        for i0 in range(0, n, rows):
            d = np.abs(x[i0:i0 + rows, None] - x[None, :])
            du = (v[i0:i0 + rows, None] - v[None, :]) ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                w = np.where(d > 0, du / d**e, 0.0)
            tot += float(np.sum(w))
    tot *= h * h
    if images == "exterior":
        left = x + g.L + h / 2  # distance to the left edge of the covered interval
        right = g.L - h / 2 - x
        tail = (left ** (-2 * s) + right ** (-2 * s)) / (2 * s)
        tot += 2 * h * float(np.sum(v * v * tail))
    if diagonal:
        du = np.gradient(v, h, edge_order=2)
        tot -= 2 * special.zeta(2 * s - 1) * h ** (2 - 2 * s) * h * float(np.sum(du * du))
    return tot


def fd_gradient(u: Field, energy, eps: float = 1e-5, cfg: OracleConfig = OracleConfig()) -> Field:
    """Central differences of ``energy`` along every grid coordinate, divided by h^N.

    The result approximates the L^2 gradient.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-7, 1e-3]")
    g = u.grid
    cfg.check(g.n**g.dim)
    base = u.values.ravel()
    out = np.empty_like(base)
    for k in range(base.size):
        e = np.zeros_like(base)
        e[k] = eps
        jp = energy(u.with_values((base + e).reshape(g.shape)))
        jm = energy(u.with_values((base - e).reshape(g.shape)))
        out[k] = (jp - jm) / (2 * eps)
    return u.with_values(out.reshape(g.shape) / g.cell_volume)


def fd_directional(u: Field, energy, directions, eps: float = 1e-5) -> np.ndarray:
    """(J(u + eps v) - J(u - eps v)) / (2 eps) for each direction v (no size cap)."""
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-7, 1e-3]")
    out = []
    for v in directions:
        vv = v.values if isinstance(v, Field) else np.asarray(v)
        out.append((energy(u.with_values(u.values + eps * vv)) - energy(u.with_values(u.values - eps * vv))) / (2 * eps))
    return np.array(out)
