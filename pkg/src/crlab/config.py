"""Run configuration: a flat key-value file, overridable by CLI flags.

The file format is one ``key = value`` per line, ``#`` comments allowed.
Every key has a default; unknown keys are rejected so typos fail loudly.
Tolerances are addressed as ``tol_<name>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .errors import ConfigurationError

DEFAULT_TOLERANCES = {
    "duality": 1e-12,
    "tangency": 1e-14,
    "structure_eq": 1e-9,
    "phase_loop": 1e-4,
    "phase_cap": 1e-3,
    "legendrian": 1e-8,
    "invariance": 1e-10,
    "torus_frame": 1e-9,
    "sup_nu": 1e-10,
    "dilatation": 1e-6,
    "quotient": 1e-10,
    "rotation": 1e-10,
    "rotation_mu": 1e-8,
    "group_law": 1e-8,
    "contact_order": 3.5,
    "first_variation": 1e-4,
    "condition": 1e-9,
    "radial_derivs": 1e-12,
    "two_route": 1e-2,
    "lift_path": 1e-5,
    "lift_equivariance": 1e-6,
    "torus_mean": 1e-8,
    "equivariance": 1e-7,
    "pushforward": 1e-8,
}


@dataclass
class RunConfig:
    """All knobs of a run; see DEFAULT_TOLERANCES for the named checks."""

    lambda_max: float = 2.0
    bump_width: float = 1.0
    rk4_steps_per_unit: int = 512
    s_max: float = 1.0
    sphere_grid: int = 64
    torus_grid: int = 16
    band_grid: int = 8
    lift_steps: int = 10000
    random_points: int = 1000
    n_caps: int = 10
    s_grid: tuple = (0.005, 0.01, 0.02, 0.04)
    rotation_s: tuple = (0.1, 0.5, 1.0)
    cutoff_lo: float = 0.55
    cutoff_hi: float = 0.85
    cutoff_margin: float = 0.1
    fd_step: float = 1e-2
    seed: int = 2026
    out_dir: str = "crlab_out"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        self.validate()

    def validate(self):
        if any(t <= 0 for t in self.tolerances.values()):
            raise ConfigurationError("all tolerances must be positive")
        for name in ("sphere_grid", "torus_grid", "band_grid"):
            if getattr(self, name) < 2:
                raise ConfigurationError(f"{name} must be at least 2")
        if self.sphere_grid < 8:
            raise ConfigurationError("sphere_grid must be at least 8 per axis")
        if self.rk4_steps_per_unit < 16:
            raise ConfigurationError("rk4_steps_per_unit must be at least 16")
        if any(abs(s) > self.s_max for s in self.s_grid):
            raise ConfigurationError("s_grid values must lie within s_max")
        if not self.lambda_max >= 1.0:
            raise ConfigurationError("lambda must be >= 1")

    def tol(self, name: str) -> float:
        try:
            return self.tolerances[name]
        except KeyError:
            raise ConfigurationError(f"unknown tolerance {name!r}") from None

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        out["tolerances"] = dict(sorted(self.tolerances.items()))
        return out


_SCALARS = {
    "lambda": ("lambda_max", float),
    "bump_width": ("bump_width", float),
    "rk4_steps_per_unit": ("rk4_steps_per_unit", int),
    "s_max": ("s_max", float),
    "sphere_grid": ("sphere_grid", int),
    "torus_grid": ("torus_grid", int),
    "band_grid": ("band_grid", int),
    "lift_steps": ("lift_steps", int),
    "random_points": ("random_points", int),
    "n_caps": ("n_caps", int),
    "cutoff_lo": ("cutoff_lo", float),
    "cutoff_hi": ("cutoff_hi", float),
    "cutoff_margin": ("cutoff_margin", float),
    "fd_step": ("fd_step", float),
    "seed": ("seed", int),
    "out_dir": ("out_dir", str),
}


def _parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigurationError(f"bad numeric list {text!r}") from exc


def apply_setting(cfg: RunConfig, key: str, value: str):
    key = key.strip()
    value = value.strip()
    if key in _SCALARS:
        attr, typ = _SCALARS[key]
        try:
            setattr(cfg, attr, typ(value))
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key}: {value!r}") from exc
    elif key == "s_grid":
        cfg.s_grid = _parse_float_list(value)
    elif key == "rotation_s":
        cfg.rotation_s = _parse_float_list(value)
    elif key.startswith("tol_"):
        name = key[4:]
        if name not in cfg.tolerances:
            raise ConfigurationError(f"unknown tolerance key {key!r}")
        try:
            cfg.tolerances[name] = float(value)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key}: {value!r}") from exc
    else:
        raise ConfigurationError(f"unknown configuration key {key!r}")


def load_config(path: str | None = None, overrides: dict | None = None
                ) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigurationError(f"unreadable config file {path}") from exc
        for ln, line in enumerate(lines, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}:{ln}: expected 'key = value'")
            key, value = line.split("=", 1)
            apply_setting(cfg, key, value)
    for key, value in (overrides or {}).items():
        if value is not None:
            apply_setting(cfg, key, str(value))
    cfg.validate()
    return cfg
