"""Run configuration: a flat sectioned key-value file mapped onto RunConfig.

Section names are free-form and only group keys for readability; every key
must be a RunConfig field and may appear once.  Unset fields are filled
from the scenario preset, then from the defaults below.
"""
import configparser
from dataclasses import dataclass, fields, replace
from typing import Optional

from .errors import ConfigError
from .euler import FLOOR_CAP, GasParams
from .parabolic import IPDGParams, Q1_IIPG, SEM
from .scenarios import get_scenario


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    preset: Optional[str] = None
    k: Optional[int] = None
    dx: Optional[float] = None
    gamma: float = 1.4
    prandtl: float = 0.72
    reynolds: Optional[float] = None
    conductivity: Optional[float] = None
    cfl_a: Optional[float] = None
    t_end: Optional[float] = None
    dt_fixed: Optional[float] = None
    sigma_int: Optional[float] = None
    sigma_bdy: Optional[float] = None
    sigma_tilde: Optional[float] = None
    energy_variant: Optional[str] = None
    floor_cap: float = FLOOR_CAP
    max_halvings: int = 40
    max_doublings: int = 10
    doubling_trigger: str = "node"
    solver_policy: str = "auto"
    output_dir: Optional[str] = None
    output_every: int = 0
    convergence_dx: Optional[tuple] = None
    max_steps: Optional[int] = None

    def resolved(self):
        """Copy with every preset-driven field filled and validated."""
        spec = get_scenario(self.scenario)
        name = self.preset or spec.default_preset
        if name not in spec.presets:
            raise ConfigError(f"scenario {self.scenario!r} has no preset {name!r}; "
                              f"available: {sorted(spec.presets)}")
        p = spec.presets[name]
        pick = lambda mine, theirs: theirs if mine is None else mine
        k = pick(self.k, p.k)
        cfg = replace(
            self, preset=name, k=k, dx=pick(self.dx, p.dx),
            reynolds=pick(self.reynolds, p.reynolds), cfl_a=pick(self.cfl_a, p.cfl_a),
            t_end=pick(self.t_end, p.t_end), conductivity=pick(self.conductivity, p.conductivity),
            dt_fixed=pick(self.dt_fixed, p.dt_fixed),
            energy_variant=pick(self.energy_variant, Q1_IIPG if k == 1 else SEM),
        )
        d = IPDGParams.defaults(k)
        cfg = replace(cfg, sigma_int=pick(cfg.sigma_int, d.sigma_int),
                      sigma_bdy=pick(cfg.sigma_bdy, d.sigma_bdy),
                      sigma_tilde=pick(cfg.sigma_tilde, d.sigma_tilde))
        cfg.validate()
        return cfg

    def validate(self):
        if self.k not in (1, 2, 3):
            raise ConfigError(f"degree k must be 1, 2 or 3, got {self.k}")
        want = Q1_IIPG if self.k == 1 else SEM
        if self.energy_variant != want:
            raise ConfigError(f"k = {self.k} requires energy_variant {want}, got {self.energy_variant}")
        for name in ("dx", "cfl_a"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.t_end < 0:
            raise ConfigError("t_end must be nonnegative")
        if self.dt_fixed is not None and not self.dt_fixed > 0:
            raise ConfigError("dt_fixed must be positive")
        if self.doubling_trigger not in ("node", "average"):
            raise ConfigError("doubling_trigger must be 'node' or 'average'")
        if self.solver_policy not in ("auto", "direct", "krylov"):
            raise ConfigError("solver_policy must be 'auto', 'direct' or 'krylov'")
        if self.max_halvings < 0 or self.max_doublings < 0 or self.output_every < 0:
            raise ConfigError("budgets and output cadence must be nonnegative")
        if not 0 < self.floor_cap:
            raise ConfigError("floor_cap must be positive")
        self.gas
        self.ipdg

    @property
    def gas(self):
        return GasParams(self.gamma, self.prandtl, self.reynolds, self.conductivity)

    @property
    def ipdg(self):
        return IPDGParams(self.sigma_int, self.sigma_bdy, self.sigma_tilde, self.energy_variant)


def _number(text):
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _convert(name, kind, text):
    text = text.strip()
    if text.lower() in ("", "none") and "Optional" in str(kind):
        return None
    try:
        if name == "convergence_dx":
            return tuple(_number(v) for v in text.split(","))
        if "int" in str(kind):
            return int(text)
        if "float" in str(kind):
            return _number(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc
    return text


def parse_config(text):
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    known = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            if key in values:
                raise ConfigError(f"key {key!r} given more than once")
            values[key] = _convert(key, known[key], raw)
    if "scenario" not in values:
        raise ConfigError("missing required key 'scenario'")
    return RunConfig(**values).resolved()


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
