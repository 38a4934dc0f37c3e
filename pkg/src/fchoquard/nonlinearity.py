"""Berestycki-Lions type nonlinearities F with f = F'.

Each model declares the growth exponent of F (equivalently of t f(t)) at the
origin and at infinity; the assumption checks are decided from these
declarations and only corroborated by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonlinearityOverflow, UnknownModel
from .spectral import FracParams

__all__ = [
    "NonlinearityModel",
    "PurePower",
    "DoublePower",
    "Saturable",
    "AssumptionReport",
    "eval_F",
    "eval_f",
    "check_growth",
    "parse_model",
    "default_model",
]

CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class NonlinearityModel:
    """Base class.  Subclasses set ``kind`` and implement ``F``/``f`` on arrays."""

    kind: str = field(init=False, default="abstract")

    # declared exponents of |F(t)| ~ |t|^e as t -> 0 and |t| -> inf
    @property
    def exponent_zero(self) -> float | None:
        return None

    @property
    def exponent_inf(self) -> float | None:
        return None

    # |t| beyond which F overflows double precision
    @property
    def safe_range(self) -> float:
        return math.inf

    def F(self, t):
        raise NotImplementedError

    def f(self, t):
        raise NotImplementedError

    @property
    def even(self) -> bool:
        """F(-t) = F(t) (the functional is then even in u)."""
        return True

    def spec(self) -> str:
        raise NotImplementedError


def _abs_pow(t, e):
    return np.abs(t) ** e


def _signed_pow(t, e):
    """t |t|^{e-1}, finite at t = 0 for every e > 0."""
    return np.sign(t) * np.abs(t) ** e


@dataclass(frozen=True)
class PurePower(NonlinearityModel):
    """F(t) = |t|^r / r,  f(t) = t |t|^{r-2}."""

    r: float = 2.0
    kind: str = field(init=False, default="pure_power")

    def __post_init__(self):
        if not self.r > 1:
            raise UnknownModel(f"pure power needs r > 1, got {self.r}")

    @property
    def exponent_zero(self):
        return self.r

    @property
    def exponent_inf(self):
        return self.r

    @property
    def safe_range(self):
        return 10.0 ** (300.0 / self.r)

    def F(self, t):
        return _abs_pow(t, self.r) / self.r

    def f(self, t):
        return _signed_pow(t, self.r - 1.0)

    def spec(self):
        return f"pure_power r={self.r!r}"


@dataclass(frozen=True)
class DoublePower(NonlinearityModel):
    """F(t) = a |t|^r / r + sign * b |t|^h / h  (cooperating: sign=+1, competing: sign=-1)."""

    r: float = 2.0
    h: float = 2.5
    sign: int = 1
    a: float = 1.0
    b: float = 1.0
    kind: str = field(init=False, default="double_power")

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise UnknownModel(f"sign must be +1 or -1, got {self.sign}")
        if not (self.r > 1 and self.h > 1):
            raise UnknownModel(f"exponents must exceed 1, got r={self.r}, h={self.h}")

    def _coef(self):
        return self.a, self.sign * self.b

    def _terms(self):
        c1, c2 = self._coef()
        terms = {}
        for e, c in ((self.r, c1), (self.h, c2)):
            terms[e] = terms.get(e, 0.0) + c
        return sorted(e for e, c in terms.items() if c != 0)

    @property
    def exponent_zero(self):
        t = self._terms()
        return t[0] if t else None

    @property
    def exponent_inf(self):
        t = self._terms()
        return t[-1] if t else None

    @property
    def safe_range(self):
        return 10.0 ** (300.0 / max(self.r, self.h))

    def F(self, t):
        c1, c2 = self._coef()
        return c1 * _abs_pow(t, self.r) / self.r + c2 * _abs_pow(t, self.h) / self.h

    def f(self, t):
        c1, c2 = self._coef()
        return c1 * _signed_pow(t, self.r - 1.0) + c2 * _signed_pow(t, self.h - 1.0)

    def spec(self):
        return f"double_power r={self.r!r} h={self.h!r} sign={self.sign:+d} a={self.a!r} b={self.b!r}"


@dataclass(frozen=True)
class Saturable(NonlinearityModel):
    """f(t) = t^3 / (1 + (t/scale)^2), so F(t) = scale^2 (t^2 - scale^2 log(1 + t^2/scale^2)) / 2."""

    scale: float = 1.0
    kind: str = field(init=False, default="saturable")

    def __post_init__(self):
        if not self.scale > 0:
            raise UnknownModel(f"scale must be > 0, got {self.scale}")

    @property
    def exponent_zero(self):
        return 4.0

    @property
    def exponent_inf(self):
        return 2.0

    @property
    def safe_range(self):
        return 1e150

    def F(self, t):
        c = self.scale
        y = (np.asarray(t, dtype=float) / c) ** 2
        # y - log1p(y) loses all digits for small y; use the series there
        small = y < 1e-3
        ys = np.where(small, y, 0.0)
        series = ys**2 / 2 - ys**3 / 3 + ys**4 / 4 - ys**5 / 5 + ys**6 / 6
        yl = np.where(small, 1.0, y)
        direct = yl - np.log1p(yl)
        return 0.5 * c**4 * np.where(small, series, direct)

    def f(self, t):
        t = np.asarray(t, dtype=float)
        return t**3 / (1.0 + (t / self.scale) ** 2)

    def spec(self):
        return f"saturable scale={self.scale!r}"


def default_model() -> PurePower:
    return PurePower(2.0)


def _check_range(m: NonlinearityModel, t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("nonlinearity argument must be finite")
    if t.size and float(np.max(np.abs(t))) > m.safe_range:
        raise NonlinearityOverflow(f"|t| exceeds the safe range {m.safe_range:.3g} of {m.spec()}")
    return t


def eval_F(m: NonlinearityModel, t):
    t = _check_range(m, t)
    out = m.F(t)
    return float(out) if np.ndim(out) == 0 else out


def eval_f(m: NonlinearityModel, t):
    t = _check_range(m, t)
    out = m.f(t)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# assumption checks


@dataclass
class AssumptionReport:
    f1: bool
    f2_i: bool | str
    f2_ii: bool | str
    f3_i: bool | str
    f3_ii: bool | str
    f4: bool
    f5: bool
    window: tuple[float, float]
    exponent_zero: float
    exponent_inf: float
    t0: float | None
    corroborated: dict = field(default_factory=dict)

    @property
    def f2(self) -> bool:
        return self.f2_i is True and self.f2_ii is True

    @property
    def f3(self) -> bool:
        return self.f3_i is True and self.f3_ii is True

    @property
    def existence(self) -> bool:
        """(f1)-(f4) all hold."""
        return self.f1 and self.f2 and self.f3 and self.f4

    def as_dict(self) -> dict:
        return {
            "f1": self.f1,
            "f2_i": self.f2_i,
            "f2_ii": self.f2_ii,
            "f3_i": self.f3_i,
            "f3_ii": self.f3_ii,
            "f4": self.f4,
            "f5": self.f5,
            "window": list(self.window),
            "exponent_zero": self.exponent_zero,
            "exponent_inf": self.exponent_inf,
            "t0": self.t0,
            "corroborated": self.corroborated,
        }


def _compare(e: float, bound: float, above: bool):
    """True/False strictly, 'critical' at equality."""
    if math.isclose(e, bound, rel_tol=CRITICAL_RTOL):
        return "critical"
    return e > bound if above else e < bound


def probe_t0(m: NonlinearityModel, lo: float = -6, hi: float = 6, num: int = 121) -> float | None:
    """First t on a positive log grid (then its negative) with F(t) > 0, else with F(t) != 0."""
    ts = np.logspace(lo, hi, num)
    ts = ts[ts <= m.safe_range]
    for cand in (ts, -ts):
        vals = m.F(cand)
        pos = np.nonzero(vals > 0)[0]
        if pos.size:
            return float(cand[pos[0]])
    for cand in (ts, -ts):
        nz = np.nonzero(m.F(cand) != 0)[0]
        if nz.size:
            return float(cand[nz[0]])
    return None


def _corroborate(m: NonlinearityModel, p: FracParams) -> dict:
    small = 10.0 ** -np.arange(1, 7)
    large = 10.0 ** np.arange(1, 7)
    r0 = np.abs(m.F(small)) / small**p.lower_critical
    rinf = np.abs(m.F(large)) / large**p.upper_critical
    return {
        "ratio_zero": r0.tolist(),
        "ratio_inf": rinf.tolist(),
        "zero_decreasing": bool(np.all(np.diff(r0) <= 0)),
        "inf_decreasing": bool(np.all(np.diff(rinf) <= 0)),
    }


def check_growth(m: NonlinearityModel, p: FracParams) -> AssumptionReport:
    e0, einf = m.exponent_zero, m.exponent_inf
    if e0 is None or einf is None:
        raise UnknownModel(f"model {m!r} does not declare its growth exponents")
    lo, hi = p.lower_critical, p.upper_critical
    # (f2) is a limsup-finiteness condition: equality passes
    f2_i = e0 >= lo or math.isclose(e0, lo, rel_tol=CRITICAL_RTOL)
    f2_ii = einf <= hi or math.isclose(einf, hi, rel_tol=CRITICAL_RTOL)
    t0 = probe_t0(m)
    return AssumptionReport(
        f1=True,
        f2_i=bool(f2_i),
        f2_ii=bool(f2_ii),
        f3_i=_compare(e0, lo, above=True),
        f3_ii=_compare(einf, hi, above=False),
        f4=t0 is not None,
        f5=bool(e0 >= 2.0),
        window=(lo, hi),
        exponent_zero=e0,
        exponent_inf=einf,
        t0=t0,
        corroborated=_corroborate(m, p),
    )


# --------------------------------------------------------------------------
# textual grammar:  "<kind> key=value key=value ..."


def parse_model(text: str) -> NonlinearityModel:
    """Parse e.g. ``pure_power r=2``, ``double_power r=2 h=2.5 sign=-1``, ``saturable scale=1``."""
    parts = text.split()
    if not parts:
        raise UnknownModel("empty model description")
    kind, kw = parts[0].lower(), {}
    for item in parts[1:]:
        if "=" not in item:
            raise UnknownModel(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        kw[k.strip()] = float(v)
    try:
        if kind == "pure_power":
            return PurePower(**kw)
        if kind == "double_power":
            if "sign" in kw:
                kw["sign"] = int(kw["sign"])
            return DoublePower(**kw)
        if kind == "saturable":
            return Saturable(**kw)
    except TypeError as exc:
        raise UnknownModel(f"bad parameters for {kind}: {exc}") from None
    raise UnknownModel(f"unknown nonlinearity kind {kind!r}")
