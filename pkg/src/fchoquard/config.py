"""Run configuration: a flat ``key = value`` file with ``[section]`` headers.

Sections and keys (all optional, defaults in brackets)::

    [params]  dim [2]  s [0.5]  alpha [1.0]  mu [1.0]
    [grid]    half_length [16.0]  points_per_axis [256]
    [model]   spec [pure_power r=2]
    [solver]  method [pohozaev]  max_iters [500]  step_size [1.0]  grad_tol [1e-8]
              pohozaev_tol [1e-8]  backtrack [0.5]  preconditioned [true]
    [output]  dir [out]  formats [json, snapshot, csv]
    [sweep]   axis []  values []  seed [0]

Model grammar: ``<kind> key=value ...`` with kinds ``pure_power`` (r),
``double_power`` (r, h, sign, a, b) and ``saturable`` (scale).
"""

from __future__ import annotations

import configparser
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ChoquardError, ConfigError
from .ground_state import SolveOptions
from .grid import GridSpec
from .nonlinearity import NonlinearityModel, check_growth, parse_model
from .spectral import FracParams

__all__ = ["RunConfig", "load_config", "parse_config", "DEFAULT_CONFIG_PATH", "SOLVERS", "SWEEP_AXES"]

DEFAULT_CONFIG_PATH = Path(__file__).with_name("default.cfg")
SOLVERS = ("pohozaev", "fixedpoint", "both")
SWEEP_AXES = ("mu", "s", "alpha", "r")
FORMATS = ("json", "snapshot", "csv")


@dataclass(frozen=True)
class RunConfig:
    params: FracParams
    grid: GridSpec
    model: NonlinearityModel
    solve: SolveOptions = field(default_factory=SolveOptions)
    method: str = "pohozaev"
    out_dir: Path = Path("out")
    formats: tuple[str, ...] = FORMATS
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] = ()
    seed: int = 0
    warnings: tuple[str, ...] = ()

    @property
    def decay_asserted(self) -> bool:
        """Decay certificates are asserted only under (f5)."""
        return check_growth(self.model, self.params).f5

    def with_overrides(self, grid_n=None, box_L=None, solver=None, out=None) -> "RunConfig":
        cfg = self
        if grid_n is not None or box_L is not None:
            try:
                g = GridSpec(cfg.grid.dim,
                             float(box_L) if box_L is not None else cfg.grid.half_length,
                             int(grid_n) if grid_n is not None else cfg.grid.points_per_axis)
            except ChoquardError as exc:
                raise ConfigError(str(exc)) from None
            cfg = replace(cfg, grid=g)
        if solver is not None:
            if solver not in SOLVERS:
                raise ConfigError(f"solver must be one of {SOLVERS}, got {solver!r}")
            cfg = replace(cfg, method=solver)
        if out is not None:
            cfg = replace(cfg, out_dir=Path(out))
        return cfg


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _num(sec, key, default, kind=float):
    if key not in sec:
        return default
    try:
        return kind(sec[key])
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key}: cannot parse {sec[key]!r} as {kind.__name__}") from None


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    known = {"params", "grid", "model", "solver", "output", "sweep"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")
    for name in known:
        if not cp.has_section(name):
            cp.add_section(name)
    P, G, M, S, O, W = (cp[k] for k in ("params", "grid", "model", "solver", "output", "sweep"))
    dim = _num(P, "dim", 2, int)
    try:
        params = FracParams(dim, _num(P, "s", 0.5), _num(P, "alpha", 1.0), _num(P, "mu", 1.0))
        grid = GridSpec(dim, _num(G, "half_length", 16.0), _num(G, "points_per_axis", 256, int))
        model = parse_model(M.get("spec", "pure_power r=2"))
        opts = SolveOptions(
            max_iters=_num(S, "max_iters", 500, int),
            step_size=_num(S, "step_size", 1.0),
            grad_tol=_num(S, "grad_tol", 1e-8),
            pohozaev_tol=_num(S, "pohozaev_tol", 1e-8),
            backtrack=_num(S, "backtrack", 0.5),
            preconditioned=_bool(S.get("preconditioned", "true")),
        )
    except ConfigError:
        raise
    except (ChoquardError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    method = S.get("method", "pohozaev").strip()
    if method not in SOLVERS:
        raise ConfigError(f"[solver] method must be one of {SOLVERS}, got {method!r}")
    formats = tuple(f.strip() for f in O.get("formats", ",".join(FORMATS)).split(",") if f.strip())
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ConfigError(f"[output] unknown formats {sorted(bad)}")
    axis = W.get("axis", "").strip() or None
    if axis is not None and axis not in SWEEP_AXES:
        raise ConfigError(f"[sweep] axis must be one of {SWEEP_AXES}, got {axis!r}")
    try:
        values = tuple(float(v) for v in W.get("values", "").replace(",", " ").split())
    except ValueError:
        raise ConfigError("[sweep] values must be numbers") from None
    rep = check_growth(model, params)
    notes = []
    for key in ("f3_i", "f3_ii"):
        val = getattr(rep, key)
        if val is not True:
            notes.append(f"({key.replace('_', ',')}) {'is critical' if val == 'critical' else 'fails'} "
                         f"for {model.spec()}: exponents ({rep.exponent_zero}, {rep.exponent_inf}) "
                         f"vs window ({rep.window[0]:.6g}, {rep.window[1]:.6g})")
    if not rep.f5:
        notes.append("(f5) fails: decay certificates are informational only")
    for n in notes:
        warnings.warn(n, stacklevel=2)
    return RunConfig(
        params=params,
        grid=grid,
        model=model,
        solve=opts,
        method=method,
        out_dir=Path(O.get("dir", "out")),
        formats=formats,
        sweep_axis=axis,
        sweep_values=values,
        seed=_num(W, "seed", 0, int),
        warnings=tuple(notes),
    )


def load_config(path=None) -> RunConfig:
    path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def sweep_config(cfg: RunConfig, axis: str, value: float) -> RunConfig:
    """Copy of cfg with one parameter replaced."""
    if axis in ("mu", "s", "alpha"):
        try:
            return replace(cfg, params=cfg.params.replace(**{axis: value}))
        except ChoquardError as exc:
            raise ConfigError(str(exc)) from None
    if axis == "r":
        if not hasattr(cfg.model, "r"):
            raise ConfigError(f"model {cfg.model.spec()} has no exponent r")
        try:
            return replace(cfg, model=replace(cfg.model, r=value))
        except ChoquardError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown sweep axis {axis!r}")
