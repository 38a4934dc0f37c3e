"""Randomized property checks for the inequalities behind the existence and
regularity arguments.

Scalar inequalities are checked with vectorized sweeps; functional ones
(HLS, Sobolev, Lipschitz composition) on random smooth fields.  Empirical
constants are estimates, never sharp constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate as sp_integrate

from .errors import DomainError
from .grid import Field, GridSpec
from .spectral import FracParams, _riesz_values, gagliardo_seminorm_sq

__all__ = [
    "IneqReport",
    "truncate",
    "truncation_inequality",
    "h_trunc",
    "h_trunc_prime",
    "h_tilde",
    "h_tilde_quad",
    "trunc_h_properties",
    "LIPSCHITZ_LIBRARY",
    "composition_seminorm_check",
    "modulus_check",
    "random_bumps",
    "lemma_sweep",
    "trunc_h_sweep",
    "jensen_sweep",
    "composition_sweep",
    "hls_ratio",
    "hls_sweep",
    "sobolev_ratio",
    "sobolev_sweep",
    "run_battery",
]

REL_TOL = 1e-12


@dataclass
class IneqReport:
    name: str
    trials: int
    worst_margin: float
    violations: int
    notes: list = field(default_factory=list)
    estimate: float | None = None
    seed: int | None = None

    def merge(self, other: "IneqReport") -> "IneqReport":
        if other.name != self.name:
            raise ValueError("cannot merge reports of different inequalities")
        est = [e for e in (self.estimate, other.estimate) if e is not None]
        return IneqReport(
            self.name,
            self.trials + other.trials,
            min(self.worst_margin, other.worst_margin),
            self.violations + other.violations,
            self.notes + [n for n in other.notes if n not in self.notes],
            max(est) if est else None,
            self.seed,
        )

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


# --------------------------------------------------------------------------
# truncation inequality


def truncate(t, k):
    return np.clip(t, -k, k)


def truncation_inequality(a, b, r, k):
    """(a-b)(a_k|a_k|^{r-2} - b_k|b_k|^{r-2}) - 4(r-1)/r^2 (|a_k|^{r/2} - |b_k|^{r/2})^2.

    Vectorized; returns (margin, scale) when given arrays, the margin alone for scalars.
    """
    r = np.asarray(r, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(r < 2) or np.any(k < 0):
        raise DomainError("need r >= 2 and k >= 0")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ak, bk = truncate(a, k), truncate(b, k)
    lhs = (a - b) * (ak * np.abs(ak) ** (r - 2) - bk * np.abs(bk) ** (r - 2))
    rhs = 4 * (r - 1) / r**2 * (np.abs(ak) ** (r / 2) - np.abs(bk) ** (r / 2)) ** 2
    margin = lhs - rhs
    if margin.ndim == 0:
        return float(margin)
    return margin


def _lemma_scale(a, b, r, k):
    ak, bk = truncate(a, k), truncate(b, k)
    return (np.abs(a) + np.abs(b)) * (np.abs(ak) ** (r - 1) + np.abs(bk) ** (r - 1)) + 1e-300


def lemma_sweep(trials: int = 10**6, seed: int = 0) -> IneqReport:
    """Random (a, b, r, k) with r in [2, 10], k in [0, 5]; a quarter of the pairs nearly equal."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(2, 10, trials)
    k = rng.uniform(0, 5, trials)
    a = rng.uniform(-10, 10, trials)
    b = rng.uniform(-10, 10, trials)
    near = rng.random(trials) < 0.25
    b[near] = a[near] + rng.normal(0, 1e-3, near.sum())
    margin = truncation_inequality(a, b, r, k)
    rel = margin / _lemma_scale(a, b, r, k)
    return IneqReport("truncation_lemma", trials, float(rel.min()), int(np.sum(rel < -REL_TOL)), seed=seed)


# --------------------------------------------------------------------------
# gamma-linear truncation h_{T,gamma}


def _check_hparams(T, gamma):
    if np.any(np.asarray(gamma) <= 1):
        raise DomainError("gamma must exceed 1")
    if np.any(np.asarray(T) <= 0):
        raise DomainError("T must be positive")


def h_trunc(t, T, gamma):
    """0 for t <= 0, t^gamma on (0, T], gamma T^{gamma-1} t - (gamma-1) T^gamma beyond."""
    t = np.asarray(t, dtype=float)
    tp = np.maximum(t, 0.0)
    lin = gamma * T ** (gamma - 1) * t - (gamma - 1) * T**gamma
    return np.where(t <= 0, 0.0, np.where(t <= T, tp**gamma, lin))


def h_trunc_prime(t, T, gamma):
    t = np.asarray(t, dtype=float)
    tp = np.maximum(t, 0.0)
    return np.where(t <= 0, 0.0, np.where(t <= T, gamma * tp ** (gamma - 1), gamma * T ** (gamma - 1)))


def h_tilde(t, T, gamma):
    """int_0^t h'(r)^2 dr in closed form."""
    t = np.asarray(t, dtype=float)
    c = gamma**2 / (2 * gamma - 1)
    tp = np.minimum(np.maximum(t, 0.0), T)
    return c * tp ** (2 * gamma - 1) + gamma**2 * T ** (2 * gamma - 2) * np.maximum(t - T, 0.0)


def h_tilde_quad(t: float, T: float, gamma: float) -> float:
    """int_0^t h'(r)^2 dr by adaptive quadrature (break point at T)."""
    if t <= 0:
        return 0.0
    f = lambda r: float(h_trunc_prime(r, T, gamma)) ** 2
    pts = [T] if 0 < T < t else None
    val, _ = sp_integrate.quad(f, 0.0, t, points=pts, epsabs=0, epsrel=1e-13, limit=200)
    return val


def trunc_h_properties(t, T, gamma, r=None) -> dict:
    """Margins (>= 0 when the property holds) at t (and the pair (t, r) for the Jensen bound).

    keys: A1_lower (h >= 0), A1_upper (|t|^gamma - h), A2_lower (t h'),
    A2_upper (gamma h - t h'), tilde_upper (||h'||_inf |t|^gamma - h~), and
    jensen ((h~(t) - h~(r))(t - r) - (h(t) - h(r))^2) when r is given.
    """
    _check_hparams(T, gamma)
    t = np.asarray(t, dtype=float)
    h = h_trunc(t, T, gamma)
    hp = h_trunc_prime(t, T, gamma)
    ht = h_tilde(t, T, gamma)
    sup_hp = gamma * np.asarray(T, dtype=float) ** (gamma - 1)
    out = {
        "A1_lower": h,
        "A1_upper": np.abs(t) ** gamma - h,
        "A2_lower": t * hp,
        "A2_upper": gamma * h - t * hp,
        "tilde_lower": ht,
        "tilde_upper": sup_hp * np.abs(t) ** gamma - ht,
    }
    if r is not None:
        r = np.asarray(r, dtype=float)
        out["jensen"] = (ht - h_tilde(r, T, gamma)) * (t - r) - (h - h_trunc(r, T, gamma)) ** 2
    if t.ndim == 0:
        out = {k: float(v) for k, v in out.items()}
    return out


def _h_scales(t, T, gamma, r=None):
    a = np.abs(t) ** gamma + gamma * T ** (gamma - 1) * np.abs(t) + 1e-300
    sc = {"A1_lower": a, "A1_upper": a, "A2_lower": gamma * a, "A2_upper": gamma * a}
    sup_hp = gamma * T ** (gamma - 1)
    sc["tilde_lower"] = sc["tilde_upper"] = sup_hp * a
    if r is not None:
        sc["jensen"] = sup_hp**2 * (np.abs(t) + np.abs(r)) ** 2 + 1e-300
    return sc


def _draw_h(rng, trials):
    gamma = rng.uniform(1.0 + 1e-6, 4.0, trials)
    T = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), trials))
    t = T * rng.uniform(-3, 3, trials)
    r = T * rng.uniform(-3, 3, trials)
    return t, T, gamma, r


def trunc_h_sweep(trials: int = 10**6, seed: int = 1) -> list[IneqReport]:
    rng = np.random.default_rng(seed)
    t, T, gamma, _ = _draw_h(rng, trials)
    props = trunc_h_properties(t, T, gamma)
    scales = _h_scales(t, T, gamma)
    reports = []
    for key, label in (("A1_lower", "h_nonneg"), ("A1_upper", "h_le_power"),
                       ("A2_lower", "th'_nonneg"), ("A2_upper", "th'_le_gamma_h"),
                       ("tilde_lower", "h_tilde_nonneg"), ("tilde_upper", "h_tilde_le_power")):
        rel = props[key] / scales[key]
        reports.append(IneqReport(label, trials, float(rel.min()), int(np.sum(rel < -REL_TOL)), seed=seed))
    # limit in T: for fixed t > 0, h_{T}(t) increases to t^gamma as T grows
    tp = np.abs(t[:1000]) + 1e-3
    g = gamma[:1000]
    Ts = np.array([0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
    vals = np.stack([h_trunc(tp, f * tp, g) for f in Ts])
    gaps = tp**g - vals
    mono = np.all(np.diff(vals, axis=0) >= -REL_TOL * tp**g) and np.all(gaps[Ts >= 1] == 0)
    reports.append(IneqReport("h_limit_T", tp.size, float(np.min(np.diff(vals, axis=0))), 0 if mono else 1,
                              notes=["T in {t/8, ..., 8t}; exact for T >= t"], seed=seed))
    return reports


def jensen_sweep(trials: int = 10**6, seed: int = 2) -> IneqReport:
    rng = np.random.default_rng(seed)
    t, T, gamma, r = _draw_h(rng, trials)
    m = trunc_h_properties(t, T, gamma, r)["jensen"]
    rel = m / _h_scales(t, T, gamma, r)["jensen"]
    return IneqReport("jensen_h_tilde", trials, float(rel.min()), int(np.sum(rel < -REL_TOL)),
                      notes=["h~ in closed form; checked against adaptive quadrature in the tests"], seed=seed)


# --------------------------------------------------------------------------
# Lipschitz compositions and the seminorm


def _soft(lam):
    return lambda x: np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)


LIPSCHITZ_LIBRARY = {
    "identity": (lambda x: x, 1.0),
    "modulus": (np.abs, 1.0),
    "clamp_0.5": (lambda x: truncate(x, 0.5), 1.0),
    "soft_threshold_0.2": (_soft(0.2), 1.0),
    "positive_part": (lambda x: np.maximum(x, 0.0), 1.0),
    "scaled_sine_2": (lambda x: np.sin(2 * x), 2.0),
}


def composition_seminorm_check(u: Field, h, lipschitz_bound: float, p: FracParams) -> tuple[float, float]:
    """(margin, scale) with margin = Lip(h)^2 [u]^2 - [h(u)]^2 for the spectral seminorm."""
    a = gagliardo_seminorm_sq(u, p)
    b = gagliardo_seminorm_sq(u.with_values(h(u.values)), p)
    margin = lipschitz_bound**2 * a - b
    return margin, lipschitz_bound**2 * a + b


def modulus_check(u: Field, p: FracParams) -> tuple[float, float]:
    return composition_seminorm_check(u, np.abs, 1.0, p)


def random_bumps(grid: GridSpec, rng: np.random.Generator, bumps: int = 3, signed: bool = True,
                 width: tuple[float, float] = (0.08, 0.2)) -> Field:
    """Sum of Gaussians with random centers inside the middle half of the box.

    Widths are fractions of L, so the fields are band-limited on grids with
    n >= 32 and have decayed to machine zero at the box edge.
    """
    L = grid.L
    vals = np.zeros(grid.shape)
    for _ in range(bumps):
        c = rng.uniform(-0.3 * L, 0.3 * L, grid.dim)
        w = rng.uniform(*width) * L
        amp = rng.uniform(-1, 1) if signed else rng.uniform(0.2, 1)
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords(), c))
        vals = vals + amp * np.exp(-r2 / (2 * w * w))
    return Field(grid, vals)


def composition_sweep(grid: GridSpec, p: FracParams, trials: int = 100, seed: int = 3) -> list[IneqReport]:
    rng = np.random.default_rng(seed)
    fields = [random_bumps(grid, rng) for _ in range(trials)]
    out = []
    for name, (h, lip) in LIPSCHITZ_LIBRARY.items():
        worst, bad = math.inf, 0
        for u in fields:
            m, sc = composition_seminorm_check(u, h, lip, p)
            rel = m / sc if sc > 0 else 0.0
            worst = min(worst, rel)
            bad += rel < -1e-8
        out.append(IneqReport(f"composition_{name}", trials, worst, bad, seed=seed))
    return out


# --------------------------------------------------------------------------
# HLS and Sobolev ratios


HLS_PAIRS_FRACTIONS = (0.5, 0.35, 0.65, 0.25, 0.75)


def hls_pairs(p: FracParams) -> list[tuple[float, float]]:
    """(r, t) with 1/r + 1/t = (N+alpha)/N, both > 1."""
    total = (p.dim + p.alpha) / p.dim
    lo = total - 1.0  # 1/r must exceed this so that 1/t < 1
    out = []
    for f in HLS_PAIRS_FRACTIONS:
        inv_r = lo + f * (1.0 - lo)
        out.append((1.0 / inv_r, 1.0 / (total - inv_r)))
    return out


def _lp(v: np.ndarray, q: float, dv: float) -> float:
    return float((dv * np.sum(np.abs(v) ** q)) ** (1.0 / q))


def hls_ratio(g: Field, h: Field, p: FracParams, r: float, t: float) -> float:
    """|int (I_alpha * g) h| / (||g||_r ||h||_t); 0 when either field vanishes."""
    dv = g.grid.cell_volume
    den = _lp(g.values, r, dv) * _lp(h.values, t, dv)
    if den == 0:
        return 0.0
    V = _riesz_values(g.values, g.grid, p.alpha)
    return abs(dv * float(np.sum(V * h.values))) / den


def sobolev_ratio(u: Field, p: FracParams, form: str = "half") -> float:
    """||u||_{2*_s} / ||(-Delta)^{s/2} u||_2 ("half") or / ||(-Delta)^s u||_2 ("full")."""
    dv = u.grid.cell_volume
    num = _lp(u.values, p.two_star_s, dv)
    if form == "half":
        den = math.sqrt(gagliardo_seminorm_sq(u, p))
    elif form == "full":
        from .spectral import frac_laplacian

        den = math.sqrt(dv * float(np.sum(frac_laplacian(u, p, p.s).values ** 2)))
    else:
        raise ValueError("form must be 'half' or 'full'")
    return num / den if den > 0 else 0.0


def hls_sweep(p: FracParams, trials: int = 50, n: int = 64, L: float = 8.0, seed: int = 4) -> IneqReport:
    """Max HLS ratio over random pairs on n and on 2n; a >2x jump counts as a violation."""
    from .grid import make_grid

    pairs = hls_pairs(p)
    worst = 0.0
    ests = []
    for nn in (n, 2 * n):
        grid = make_grid(p.dim, L, nn)
        rng = np.random.default_rng(seed)
        best = 0.0
        for i in range(trials):
            g = random_bumps(grid, rng)
            h = random_bumps(grid, rng)
            r, t = pairs[i % len(pairs)]
            best = max(best, hls_ratio(g, h, p, r, t))
        ests.append(best)
    growth = ests[1] / ests[0] if ests[0] > 0 else 1.0
    worst = 2.0 - growth
    return IneqReport("hls", trials, worst, int(growth > 2.0), estimate=ests[1],
                      notes=[f"max ratio n={n}: {ests[0]:.6g}, n={2 * n}: {ests[1]:.6g}",
                             f"pairs (r, t): {[(round(a, 4), round(b, 4)) for a, b in pairs]}"],
                      seed=seed)


def sobolev_sweep(p: FracParams, trials: int = 50, n: int = 64, L: float = 8.0, seed: int = 5) -> IneqReport:
    """Max of ||u||_{2*_s} / ||(-Delta)^{s/2} u||_2 on n and 2n.

    The variant with (-Delta)^s in the denominator is also recorded: it is
    not dilation invariant, so no finite constant can bound it uniformly.
    """
    from .grid import make_grid

    ests, full = [], []
    for nn in (n, 2 * n):
        grid = make_grid(p.dim, L, nn)
        rng = np.random.default_rng(seed)
        best = bestf = 0.0
        for _ in range(trials):
            u = random_bumps(grid, rng)
            best = max(best, sobolev_ratio(u, p))
            bestf = max(bestf, sobolev_ratio(u, p, "full"))
        ests.append(best)
        full.append(bestf)
    growth = ests[1] / ests[0] if ests[0] > 0 else 1.0
    return IneqReport("sobolev", trials, 2.0 - growth, int(growth > 2.0), estimate=ests[1],
                      notes=[f"max ratio n={n}: {ests[0]:.6g}, n={2 * n}: {ests[1]:.6g}",
                             "tested with ||(-Delta)^{s/2} u||_2; the (-Delta)^s form scales as t^{-s} "
                             f"under dilation (max here {full[1]:.6g}) and is flagged, not asserted"],
                      seed=seed)


def run_battery(p: FracParams, trials: int = 10**6, field_trials: int = 100, seed: int = 0,
                grid: GridSpec | None = None) -> list[IneqReport]:
    from .grid import make_grid

    grid = grid or make_grid(p.dim, 8.0, 64)
    reports = [lemma_sweep(trials, seed)]
    reports += trunc_h_sweep(trials, seed + 1)
    reports.append(jensen_sweep(trials, seed + 2))
    reports += composition_sweep(grid, p, field_trials, seed + 3)
    reports.append(hls_sweep(p, seed=seed + 4))
    reports.append(sobolev_sweep(p, seed=seed + 5))
    return reports
