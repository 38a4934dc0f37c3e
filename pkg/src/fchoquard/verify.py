"""A posteriori certificates for computed solutions.

Everything here is recomputed from the raw field; cached scalars on a
``SolveResult`` are never trusted.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, NegativeTail, WindowTooSmall
from .functionals import Workspace
from .grid import Field
from .spectral import FracParams

__all__ = [
    "radial_profile",
    "half_height_radius",
    "pohozaev_residual",
    "QualitativeReport",
    "qualitative_report",
    "asymmetry",
    "DecayFit",
    "decay_fit",
    "verification_report",
]

SIGN_CHANGE_NOTE = (
    "sign-changing field: |u| fitted; polynomial decay is expected even for "
    "changing-sign solutions, reported as informational"
)


def _field_and_params(res, m=None, p=None):
    """Accept a SolveResult or a bare Field (then m and p are required)."""
    if isinstance(res, Field):
        u = res
    else:
        u = res.u
        m = m if m is not None else res.model
        p = p if p is not None else res.params
    return u, m, p


# --------------------------------------------------------------------------
# radial profile


@dataclass(frozen=True)
class RadialProfile:
    r: np.ndarray
    mean: np.ndarray
    min: np.ndarray
    max: np.ndarray
    count: np.ndarray

    def to_csv(self) -> str:
        rows = ["r,shell_mean_u,shell_min,shell_max"]
        rows += [f"{a:.17g},{b:.17g},{c:.17g},{d:.17g}" for a, b, c, d in zip(self.r, self.mean, self.min, self.max)]
        return "\n".join(rows) + "\n"


def radial_profile(u: Field, width: float | None = None) -> RadialProfile:
    """Shell statistics of u over shells of the given width (default h) with r <= L."""
    g = u.grid
    width = width or g.h
    r = g.radius().ravel()
    v = u.values.ravel()
    keep = r <= g.L
    r, v = r[keep], v[keep]
    idx = np.floor(r / width + 0.5).astype(int)
    nb = idx.max() + 1
    count = np.bincount(idx, minlength=nb)
    ok = count > 0
    rmean = np.bincount(idx, weights=r, minlength=nb)[ok] / count[ok]
    vmean = np.bincount(idx, weights=v, minlength=nb)[ok] / count[ok]
    vmin = np.full(nb, np.inf)
    vmax = np.full(nb, -np.inf)
    np.minimum.at(vmin, idx, v)
    np.maximum.at(vmax, idx, v)
    return RadialProfile(rmean, vmean, vmin[ok], vmax[ok], count[ok])


def half_height_radius(u: Field) -> float:
    prof = radial_profile(u)
    a = np.abs(prof.mean)
    top = a.max()
    if top == 0:
        return 0.0
    below = np.nonzero(a < 0.5 * top)[0]
    below = below[below > np.argmax(a)]
    if not below.size:
        return float(prof.r[-1])
    k = below[0]
    # linear interpolation between the bracketing shells
    r0, r1, a0, a1 = prof.r[k - 1], prof.r[k], a[k - 1], a[k]
    return float(r0 + (0.5 * top - a0) * (r1 - r0) / (a1 - a0))


# --------------------------------------------------------------------------
# Pohozaev residual


def pohozaev_residual(res, m=None, p: FracParams | None = None) -> float:
    """|P(u)| / ((N-2s)/2 kinetic + N mu/2 mass), recomputed from the field."""
    u, m, p = _field_and_params(res, m, p)
    ws = Workspace(u.grid, p, m)
    A, B, D, _, _ = ws.parts(u.values)
    den = 0.5 * (p.dim - 2 * p.s) * A + 0.5 * p.dim * p.mu * B
    if den == 0.0:
        raise DomainError("Pohozaev residual is undefined for u = 0")
    P = 0.5 * (p.dim - 2 * p.s) * A + 0.5 * p.dim * p.mu * B - 0.5 * (p.dim + p.alpha) * D
    return abs(P) / den


# --------------------------------------------------------------------------
# qualitative properties


def _symmetries(dim: int):
    """All axis permutations combined with all axis reflections (the grid's dihedral group)."""
    for perm in itertools.permutations(range(dim)):
        for flips in itertools.product((False, True), repeat=dim):
            if perm == tuple(range(dim)) and not any(flips):
                continue
            yield perm, flips


def _reflect(a: np.ndarray, axis: int) -> np.ndarray:
    # x_j -> -x_j maps index j to (n - j) mod n
    return np.roll(np.flip(a, axis=axis), 1, axis=axis)


def asymmetry(u: Field) -> float:
    """max over grid symmetries R of ||u - u o R||_inf / ||u||_inf."""
    sup = u.sup
    if sup == 0:
        return 0.0
    worst = 0.0
    for perm, flips in _symmetries(u.grid.dim):
        w = np.transpose(u.values, perm)
        for ax, fl in enumerate(flips):
            if fl:
                w = _reflect(w, ax)
        worst = max(worst, float(np.max(np.abs(u.values - w))))
    return worst / sup


def center_offset(u: Field) -> float:
    w = u.values**2
    tot = float(np.sum(w))
    if tot == 0:
        return 0.0
    return math.sqrt(sum((float(np.sum(w * c)) / tot) ** 2 for c in u.grid.coords()))


@dataclass
class QualitativeReport:
    min_value: float
    asymmetry: float
    sup_norm: float
    l1_norm: float
    riesz_edge: float
    center_offset: float = 0.0
    flags: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def _shell_mask(grid, shell=0.1):
    lim = grid.L * (1.0 - shell)
    mask = np.zeros(grid.shape, dtype=bool)
    for c in grid.coords():
        mask |= np.broadcast_to(np.abs(c) >= lim, grid.shape)
    return mask


def qualitative_report(res, m=None, p: FracParams | None = None, shell: float = 0.1) -> QualitativeReport:
    u, m, p = _field_and_params(res, m, p)
    sup = u.sup
    if sup == 0:
        return QualitativeReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ["trivial"])
    ws = Workspace(u.grid, p, m)
    V = ws.riesz(m.F(u.values))
    vmax = float(np.max(np.abs(V)))
    edge = float(np.max(np.abs(V[_shell_mask(u.grid, shell)]))) / vmax if vmax > 0 else 0.0
    off = center_offset(u)
    flags = []
    if off > 0.5 * u.grid.h:
        flags.append("not centered")
    mn = float(np.min(u.values))
    if mn < -1e-8 * sup:
        flags.append("sign-changing")
    return QualitativeReport(
        min_value=mn,
        asymmetry=asymmetry(u),
        sup_norm=sup,
        l1_norm=float(u.grid.cell_volume * np.sum(np.abs(u.values))),
        riesz_edge=edge,
        center_offset=off,
        flags=flags,
    )


# --------------------------------------------------------------------------
# decay


@dataclass
class DecayFit:
    window: tuple[float, float]
    slope: float
    expected: float
    c_lower: float
    c_upper: float
    r_squared: float
    shells: int
    intercept: float = 0.0
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def envelope_ratio(self) -> float:
        return self.c_upper / self.c_lower if self.c_lower > 0 else math.inf

    def as_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        d["envelope_ratio"] = self.envelope_ratio
        return d


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def decay_fit(res, p: FracParams | None = None, window: tuple[float, float] | None = None,
              min_shells: int = 8) -> DecayFit:
    """Log-log fit of the shell-averaged tail of u over ``window``.

    Default window: [3 x half-height radius, 0.8 L].  Envelope constants are
    min/max of u(r) (1 + r^{N+2s}) over the window shells.
    """
    u, _, p = _field_and_params(res, None, p)
    g = u.grid
    notes = []
    if float(np.min(u.values)) < -1e-8 * u.sup:
        u = u.with_values(np.abs(u.values))
        notes.append(SIGN_CHANGE_NOTE)
    if window is None:
        window = (3.0 * half_height_radius(u), 0.8 * g.L)
    r1, r2 = float(window[0]), float(window[1])
    if r2 > 0.8 * g.L * (1 + 1e-12):
        raise WindowTooSmall(f"window end {r2:g} exceeds the boundary guard 0.8 L = {0.8 * g.L:g}")
    prof = radial_profile(u)
    sel = (prof.r >= r1) & (prof.r <= r2)
    if int(sel.sum()) < min_shells:
        raise WindowTooSmall(f"window [{r1:g}, {r2:g}] holds {int(sel.sum())} shells, need {min_shells}")
    r, v = prof.r[sel], prof.mean[sel]
    if np.any(v <= 0):
        raise NegativeTail(f"shell mean of u is <= 0 inside the window [{r1:g}, {r2:g}]")
    expo = p.dim + 2 * p.s
    slope, icpt, r2fit = _linfit(np.log(r), np.log(v))
    env = v * (1.0 + r**expo)
    flags = []
    # an exponential tail fits log u linearly in r better than in log r
    _, _, r2exp = _linfit(r, np.log(v))
    if r2exp > r2fit or r2fit < 0.99:
        flags.append("non-polynomial")
    return DecayFit(
        window=(r1, r2),
        slope=slope,
        expected=-expo,
        c_lower=float(env.min()),
        c_upper=float(env.max()),
        r_squared=r2fit,
        shells=int(sel.sum()),
        intercept=icpt,
        flags=flags,
        notes=notes,
    )


# --------------------------------------------------------------------------
# combined report


def verification_report(res, m=None, p: FracParams | None = None, pohozaev_tol: float = 1e-8,
                        asym_tol: float = 1e-6, decay_tol: float = 0.3) -> dict:
    """All certificates keyed by name, each with ``value``, ``asserted`` and ``passed``."""
    u, m, p = _field_and_params(res, m, p)
    out = {}
    try:
        pr = pohozaev_residual(u, m, p)
        out["pohozaev_residual"] = {"value": pr, "asserted": True, "passed": pr <= pohozaev_tol}
    except DomainError as exc:
        out["pohozaev_residual"] = {"value": None, "asserted": True, "passed": False, "error": str(exc)}
    q = qualitative_report(u, m, p)
    sup = q.sup_norm
    out["qualitative"] = {"value": q.as_dict(), "asserted": False, "passed": True}
    out["positivity"] = {"value": q.min_value, "asserted": True,
                         "passed": sup > 0 and q.min_value > -1e-8 * sup}
    out["radial_symmetry"] = {"value": q.asymmetry, "asserted": "not centered" not in q.flags,
                              "passed": sup > 0 and q.asymmetry < asym_tol}
    try:
        fit = decay_fit(u, p)
        ok = abs(fit.slope - fit.expected) <= decay_tol
        out["decay"] = {"value": fit.as_dict(), "asserted": False, "passed": ok}
    except (WindowTooSmall, NegativeTail, ValueError) as exc:
        out["decay"] = {"value": None, "asserted": False, "passed": False, "error": str(exc)}
    out["all_asserted_passed"] = all(v["passed"] for v in out.values() if v["asserted"])
    return out


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, default=float)
