"""Ground-state solvers.

``minimize_pohozaev``
    descent for J restricted to the Pohozaev set {P = 0}: every iterate is
    rescaled along its dilation orbit u(./t) onto the set, and steps follow the
    resolvent-preconditioned tangential gradient with backtracking on J.
``fixed_point_resolvent``
    normalized, damped iteration of u -> ((-Delta)^s + mu)^{-1}[(I_alpha*F(u)) f(u)].

On a periodic box the critical points of the discrete J satisfy the Pohozaev
identity only up to a box-truncation error that decays like L^{-(N+2s)}.  The
descent therefore reports two residuals: the constrained (Lagrange) residual
it converges on, and the raw gradient norm of J.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.fft as sp_fft

from .errors import NotAdmissible, SeedFailure
from .functionals import (
    EnergyReport,
    Workspace,
    _dilate_values,
    energy_from_parts,
    pohozaev_from_parts,
    pohozaev_time_from_parts,
)
from .grid import Field, GridSpec, boundary_ratio
from .nonlinearity import NonlinearityModel, probe_t0
from .spectral import FracParams

__all__ = [
    "SolveOptions",
    "SolveResult",
    "find_seed",
    "project_pohozaev",
    "minimize_pohozaev",
    "fixed_point_resolvent",
    "mountain_pass_upper_bound",
    "dilation_path",
    "center",
]


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 500
    step_size: float = 1.0
    grad_tol: float = 1e-8
    pohozaev_tol: float = 1e-8
    backtrack: float = 0.5
    preconditioned: bool = True
    projection_tol: float = 1e-10
    max_backtracks: int = 30
    theta: float = 1.0
    gamma: float | None = None
    stagnation_window: int = 50

    def __post_init__(self):
        for name in ("step_size", "grad_tol", "pohozaev_tol", "projection_tol", "theta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")

    def replace(self, **kw) -> "SolveOptions":
        return replace(self, **kw)


@dataclass
class SolveResult:
    u: Field
    report: EnergyReport
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    p_mu_estimate: float = float("nan")
    warnings: list = field(default_factory=list)
    solver: str = ""
    status: str = ""
    residual: float = float("nan")
    params: FracParams | None = None
    model: NonlinearityModel | None = None

    def as_dict(self) -> dict:
        g = self.u.grid
        return {
            "solver": self.solver,
            "converged": self.converged,
            "status": self.status,
            "iterations": self.iterations,
            "p_mu_estimate": self.p_mu_estimate,
            "residual": self.residual,
            "report": self.report.as_dict(),
            "model": self.model.spec() if self.model is not None else None,
            "grid": {"dim": g.dim, "half_length": g.half_length, "points_per_axis": g.points_per_axis},
            "warnings": list(self.warnings),
            "history": self.history,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)

    def save(self, path_json, path_snapshot=None):
        from .io import save_snapshot

        Path(path_json).write_text(self.to_json(indent=2) + "\n")
        if path_snapshot is not None:
            save_snapshot(self.u, path_snapshot)


# --------------------------------------------------------------------------
# seeds and projection


def _bump(grid: GridSpec, t0: float, rho: float) -> np.ndarray:
    r2 = np.broadcast_to(sum(c**2 for c in grid.coords()), grid.shape) / rho**2
    out = np.zeros(grid.shape)
    inside = r2 < 1.0
    out[inside] = t0 * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


def find_seed(m: NonlinearityModel, p: FracParams, g: GridSpec, t0: float | None = None) -> Field:
    """Smooth radial bump t0 exp(1 - 1/(1 - |x/rho|^2)) with D > 0.

    rho starts at L/4 and grows by 1.5 up to L/1.5.  ``t0`` defaults to the
    probe value of the model closest to 1 with F(t0) > 0.
    """
    if t0 is None:
        t0 = _seed_amplitude(m)
    if t0 is None:
        raise SeedFailure("no t0 with F(t0) != 0 was found; (f4) fails")
    ws = Workspace(g, p, m)
    rho, tried = g.L / 4, []
    while rho <= g.L / 1.5 * (1 + 1e-12):
        v = _bump(g, t0, rho)
        D = ws.parts(v)[2]
        tried.append((rho, D))
        if D > 0:
            return Field(g, v)
        rho *= 1.5
    raise SeedFailure(f"no seed radius gave D > 0 (tried {tried})", tried)


def _seed_amplitude(m: NonlinearityModel) -> float | None:
    ts = np.logspace(-6, 6, 121)
    ts = ts[ts <= m.safe_range]
    order = np.argsort(np.abs(np.log(ts)))
    for cand in (ts[order], -ts[order]):
        pos = np.nonzero(m.F(cand) > 0)[0]
        if pos.size:
            return float(cand[pos[0]])
    return probe_t0(m)


def _normalize_amplitude(ws: Workspace, u: np.ndarray) -> np.ndarray:
    """Scale u by c > 0 with P(c u) = 0 (bisection in log c)."""
    def P(c):
        A, B, D, _, _ = ws.parts(c * u)
        return pohozaev_from_parts(A, B, D, ws.p)

    lo, hi = 1.0, 1.0
    for _ in range(200):
        if P(hi) < 0:
            break
        hi *= 2.0
    for _ in range(200):
        if P(lo) > 0:
            break
        lo *= 0.5
    for _ in range(100):
        mid = math.sqrt(lo * hi)
        if P(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1 < 1e-13:
            break
    return math.sqrt(lo * hi) * u


def project_pohozaev(ws: Workspace, u: np.ndarray, tol: float = 1e-10, max_rounds: int = 12):
    """Dilate u along its orbit until |P| <= tol (A + mu B).

    The dilation time comes from the closed-form scaling laws; rounds repeat
    because the discrete dilation follows those laws only up to box effects.
    Returns (values, parts, total dilation factor).
    """
    lo, hi = 0.25, 4.0
    total = 1.0
    parts = ws.parts(u)
    for _ in range(max_rounds):
        A, B, D = parts[:3]
        P = pohozaev_from_parts(A, B, D, ws.p)
        if abs(P) <= tol * (A + ws.p.mu * B):
            break
        t = pohozaev_time_from_parts(A, B, D, ws.p)
        t = min(max(t, lo), hi)
        u = _dilate_values(u, ws.grid, t)
        total *= t
        parts = ws.parts(u)
    return u, parts, total


# --------------------------------------------------------------------------
# Pohozaev-projected descent

# energy differences below this relative size are rounding noise
J_NOISE = 1e-13
# Armijo constant for the sufficient-decrease test
ARMIJO = 1e-4


def _lagrange_residual(ws: Workspace, u, V):
    """r = J'(u) - lam P'(u) with the least-squares multiplier."""
    gJ = ws.gradient(u, V)
    gP = ws.pohozaev_gradient(u, V)
    lam = ws.integrate(gJ * gP) / ws.integrate(gP * gP)
    return gJ - lam * gP, gJ, lam


def _finish(ws, u, iters, converged, history, warns, solver, status, residual) -> SolveResult:
    report = ws.report(u)
    ratio = boundary_ratio(Field(ws.grid, u))
    if ratio > 1e-8:
        warns.append(f"BoundaryContamination: edge/max = {ratio:.2e}")
    return SolveResult(
        u=Field(ws.grid, u),
        report=report,
        iterations=iters,
        converged=converged,
        history=history,
        p_mu_estimate=report.energy,
        warnings=warns,
        solver=solver,
        status=status,
        residual=residual,
        params=ws.p,
        model=ws.m,
    )


def minimize_pohozaev(seed: Field, m: NonlinearityModel, p: FracParams,
                      opts: SolveOptions | None = None) -> SolveResult:
    """Minimize J on the Pohozaev set starting from ``seed`` (needs D(seed) > 0).

    Convergence: |P| <= pohozaev_tol (A + mu B) and the constrained residual
    ||J' - lam P'|| <= grad_tol ||u||.
    """
    opts = opts or SolveOptions()
    ws = Workspace(seed.grid, p, m)
    warns: list[str] = []
    u = seed.values.copy()
    A, B, D, _, _ = ws.parts(u)
    t = pohozaev_time_from_parts(A, B, D, p)  # raises NoPohozaevTime when D <= 0
    if not 0.5 <= t <= 2.0:
        u = _normalize_amplitude(ws, u)
    u, parts, _ = project_pohozaev(ws, u, opts.projection_tol)
    J = energy_from_parts(*parts[:3], p)
    history = []
    tau = opts.step_size
    d = z_prev = None
    rz_prev = 0.0
    status, converged, it = "max_iters", False, 0
    for it in range(opts.max_iters + 1):
        A, B, D, _, V = parts
        r, gJ, _ = _lagrange_residual(ws, u, V)
        unorm = math.sqrt(B)
        res = math.sqrt(ws.integrate(r * r)) / unorm
        P = pohozaev_from_parts(A, B, D, p)
        prel = abs(P) / (A + p.mu * B)
        history.append({
            "J": J,
            "grad": math.sqrt(ws.integrate(gJ * gJ)),
            "P": P,
            "constrained": res,
            "step": tau,
        })
        if res <= opts.grad_tol and prel <= opts.pohozaev_tol:
            status, converged = "converged", True
            break
        if it == opts.max_iters:
            break
        z = ws.resolve(r) if opts.preconditioned else r
        rz = ws.integrate(r * z)
        # Polak-Ribiere+ conjugate direction in the preconditioned metric
        if d is not None and rz_prev > 0:
            beta = max(0.0, (rz - ws.integrate(r * z_prev)) / rz_prev)
            d = z + beta * d
            if ws.integrate(r * d) <= 0:
                d = z
        else:
            d = z
        z_prev, rz_prev = z, rz
        slack = J_NOISE * abs(J)
        accepted = False
        for _ in range(opts.max_backtracks):
            trial, tparts, _ = project_pohozaev(ws, u - tau * d, opts.projection_tol)
            Jt = energy_from_parts(*tparts[:3], p)
            if Jt <= J - ARMIJO * tau * ws.integrate(r * d) + slack:
                accepted = True
                break
            tau *= opts.backtrack
            d = z  # restart from steepest descent after a rejected step
        if not accepted:
            status = "line_search_stall"
            warns.append(f"LineSearchStall at iteration {it} (constrained residual {res:.2e})")
            break
        u, parts, J = trial, tparts, Jt
        tau = min(tau / opts.backtrack, opts.step_size)
    if status == "max_iters":
        warns.append(f"MaxIters: stopped after {it} iterations")
    return _finish(ws, u, it, converged, history, warns, "pohozaev", status, res)


# --------------------------------------------------------------------------
# normalized resolvent fixed point


def _petviashvili_exponent(m: NonlinearityModel) -> float:
    e = m.exponent_zero or 2.0
    if m.exponent_inf is not None:
        e = min(e, m.exponent_inf)
    deg = 2 * e - 1  # homogeneity of (I*F(u)) f(u) for a pure power
    return deg / (deg - 1)


def fixed_point_resolvent(seed: Field, m: NonlinearityModel, p: FracParams,
                          opts: SolveOptions | None = None) -> SolveResult:
    """u <- (1-theta) u + theta M^gamma ((-Delta)^s + mu)^{-1}[(I_alpha*F(u)) f(u)].

    M = <u, ((-Delta)^s + mu) u> / <u, (I_alpha*F(u)) f(u)> equals 1 at every
    nontrivial solution; raising it to gamma removes the amplitude instability
    of the plain iteration.  theta is halved whenever the residual grows.
    """
    opts = opts or SolveOptions()
    ws = Workspace(seed.grid, p, m)
    gamma = opts.gamma if opts.gamma is not None else _petviashvili_exponent(m)
    theta = min(opts.theta, 1.0)
    u = seed.values.copy()
    warns: list[str] = []
    history = []
    norm0 = math.sqrt(ws.integrate(u * u))
    if norm0 == 0.0:
        warns.append("trivial limit: the iteration is at the zero solution")
        return _finish(ws, u, 0, True, history, warns, "fixedpoint", "trivial", 0.0)
    best = (math.inf, u)
    status, converged, it = "max_iters", False, 0
    prev = math.inf
    window_start = math.inf
    for it in range(opts.max_iters + 1):
        V = ws.riesz(m.F(u))
        src = ws.source(u, V)
        Ku = ws.frac(u) + p.mu * u
        unorm = math.sqrt(ws.integrate(u * u))
        if unorm <= 1e-12 * norm0:
            warns.append("trivial limit: the iterate collapsed to zero")
            status, converged = "trivial", True
            u = np.zeros_like(u)
            res = 0.0
            break
        res = math.sqrt(ws.integrate((Ku - src) ** 2)) / unorm
        history.append({"residual": res, "theta": theta})
        if res < best[0]:
            best = (res, u)
        if res <= opts.grad_tol:
            status, converged = "converged", True
            break
        if it == opts.max_iters:
            break
        if res > prev:
            theta *= 0.5
        prev = res
        if it % opts.stagnation_window == 0:
            if res > 0.5 * window_start and it > 0 and theta < 1e-3:
                status = "stagnation"
                warns.append(f"Stagnation: residual {res:.2e} plateaued above {opts.grad_tol:.0e}")
                break
            window_start = res
        den = ws.integrate(u * src)
        M = ws.integrate(u * Ku) / den if den > 0 else 1.0
        new = (M**gamma) * ws.resolve(src) if den > 0 else ws.resolve(src)
        u = (1 - theta) * u + theta * new
    if not converged:
        res, u = best
        if status == "max_iters":
            warns.append(f"MaxIters: stopped after {it} iterations")
    return _finish(ws, u, it, converged, history, warns, "fixedpoint", status, res)


# --------------------------------------------------------------------------
# paths and alignment


def dilation_path(u: Field, ts) -> list[Field]:
    """[0, u(./t_1), u(./t_2), ...] for increasing t (no range checks)."""
    out = [Field.zeros(u.grid)]
    for t in ts:
        out.append(u.with_values(_dilate_values(u.values, u.grid, float(t))))
    return out


def mountain_pass_upper_bound(path, m: NonlinearityModel, p: FracParams) -> float:
    """max_k J(path[k]) for a discrete path from 0 to a negative-energy state."""
    path = list(path)
    if len(path) < 2:
        raise NotAdmissible("a path needs at least two fields")
    if path[0].sup != 0.0:
        raise NotAdmissible("path must start at the zero field")
    ws = Workspace(path[0].grid, p, m)
    energies = [ws.energy(f.values) for f in path]
    if not energies[-1] < 0:
        raise NotAdmissible(f"path must end at negative energy, got J = {energies[-1]:.3e}")
    return float(max(energies))


def center(u: Field) -> Field:
    """Shift u so its |u|^2-weighted center of mass sits at the origin (Fourier shift)."""
    g = u.grid
    w = u.values**2
    tot = float(np.sum(w))
    if tot == 0.0:
        return u
    vals = sp_fft.fftn(u.values)
    n, L = g.n, g.L
    xi = np.pi * np.fft.fftfreq(n, d=1.0 / n) / L
    for ax, c in enumerate(g.coords()):
        xc = float(np.sum(w * c)) / tot
        shape = [1] * g.dim
        shape[ax] = n
        phase = np.exp(1j * xi * xc).reshape(shape)
        if n % 2 == 0:
            ph = phase.copy()
            idx = [0] * g.dim
            idx[ax] = n // 2
            ph[tuple(idx)] = np.cos(xi[n // 2] * xc)
            phase = ph
        vals = vals * phase
    return u.with_values(sp_fft.ifftn(vals).real)
