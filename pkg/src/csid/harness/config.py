"""Experiment configuration: a flat, typed YAML document plus named presets.

Example file::

    format_version: 1
    preset: fig4          # optional; fields below override it
    trials: 20
    sweep: [0.001, 0.01, 0.1]
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from ..errors import InvalidArgument
from ..measurement import measurement_rows
from ..recovery import LambdaRule, SolverConfig
from ..signal_core import RNG_ALGORITHM

FORMAT_VERSION = 1
EXPERIMENT_IDS = ("fig4_noise_sweep", "fig5_convergence", "fig6_curves", "fig7_sparsity_sweep", "custom")
METHODS = ("lms_direct", "za_lms_direct", "compressive", "compressive_plus_recovery")
SWEEPABLE = ("noise_variance", "k", "mu", "rho", "q", "L", "N")
FILTER_NORMALIZATIONS = ("unit_energy", "unit_variance")


class ConfigError(InvalidArgument):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str = "custom"
    N: int = 500
    L: int = 80
    k: int = 40
    q: int = 2
    phase: int = 1
    mu: float = 0.003
    rho: float = 2.5e-5
    noise_variance: float = 0.01
    sweep_param: str = "noise_variance"
    sweep: tuple = (0.01,)
    trials: int = 100
    base_seed: int = 0
    methods: tuple = ("lms_direct", "compressive")
    # taps drawn N(0, 1/L) ("unit_energy") or N(0, 1) ("unit_variance")
    filter_normalization: str = "unit_energy"
    iterations_conventional: int = 20000
    iterations_compressive: int = 10000
    record_stride: int = 10
    convergence_window: int = 100
    convergence_factor: float = 1.05
    steady_state_tail: float = 0.1
    lambda_rule: str = "scaled"
    lambda_value: float = 0.015
    solver_acceleration: str = "accelerated"
    solver_max_iterations: int = 5000
    solver_tolerance: float = 1e-8
    recovery_debias: bool = True
    guidance_constant: float = 1.0
    record_wall_time: bool = False
    threads: int = 1
    output_dir: str = "results"

    @property
    def M(self) -> int:
        return measurement_rows(self.N, self.L, self.q, self.phase)

    def at(self, value) -> "ExperimentConfig":
        """The config with the swept parameter set to ``value``."""
        kind = type(getattr(self, self.sweep_param))
        return dataclasses.replace(self, **{self.sweep_param: kind(value)})

    @property
    def lambda_rule_obj(self) -> LambdaRule:
        return LambdaRule(self.lambda_rule, self.lambda_value)

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(max_iterations=self.solver_max_iterations, tolerance=self.solver_tolerance,
                            acceleration=self.solver_acceleration)

    def filter_variance(self, L: Optional[int] = None) -> float:
        L = self.L if L is None else L
        return 1.0 / L if self.filter_normalization == "unit_energy" else 1.0

    def validate(self) -> "ExperimentConfig":
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.experiment_id in EXPERIMENT_IDS, f"experiment_id must be one of {EXPERIMENT_IDS}")
        need(self.sweep_param in SWEEPABLE, f"sweep_param must be one of {SWEEPABLE}")
        need(len(self.sweep) >= 1, "sweep must list at least one value")
        need(len(self.methods) >= 1, "methods must not be empty")
        for m in self.methods:
            need(m in METHODS, f"unknown method {m!r}; expected a subset of {METHODS}")
        need(len(set(self.methods)) == len(self.methods), "methods must not repeat")
        need(self.trials >= 1, "trials must be >= 1")
        need(0 <= self.base_seed and self.base_seed + self.trials <= 2**64, "base_seed out of 64-bit range")
        need(self.filter_normalization in FILTER_NORMALIZATIONS,
             f"filter_normalization must be one of {FILTER_NORMALIZATIONS}")
        need(self.record_stride >= 1, "record_stride must be >= 1")
        for name in ("iterations_conventional", "iterations_compressive"):
            need(getattr(self, name) >= 10 * self.record_stride,
                 f"{name} must cover at least 10 recorded points")
        need(self.convergence_window >= 1, "convergence_window must be >= 1")
        need(self.convergence_factor > 1, "convergence_factor must be > 1")
        need(0 < self.steady_state_tail <= 1, "steady_state_tail must lie in (0, 1]")
        need(self.threads >= 1, "threads must be >= 1")
        need(self.guidance_constant > 0, "guidance_constant must be positive")
        try:
            self.lambda_rule_obj
            self.solver_config
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from None
        for v in self.sweep:
            c = self.at(v)
            need(c.N >= 1 and c.L >= 1, "N and L must be >= 1")
            need(0 <= c.k <= c.N, f"k={c.k} must lie in [0, N={c.N}]")
            need(c.k >= 1, "k must be >= 1 (relative distortion needs a nonzero system)")
            need(c.q >= 1 and 0 <= c.phase < c.q, f"phase={c.phase} must lie in [0, q={c.q})")
            need(c.mu > 0, "mu must be positive")
            need(c.rho >= 0, "rho must be nonnegative")
            need(c.noise_variance >= 0, "noise_variance must be nonnegative")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["sweep"] = list(self.sweep)
        d["methods"] = list(self.methods)
        return {"format_version": FORMAT_VERSION, "rng_algorithm": RNG_ALGORITHM, **d}

    def dump(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=False))


_BASELINE = dict(N=500, L=80, k=40, q=2, phase=1, mu=0.003, rho=2.5e-5, noise_variance=0.01)

PRESETS = {
    "fig4": dict(_BASELINE, experiment_id="fig4_noise_sweep", sweep_param="noise_variance",
                 sweep=(1e-3, 3e-3, 1e-2, 3e-2, 1e-1), trials=100,
                 methods=("lms_direct", "compressive")),
    "fig5": dict(_BASELINE, experiment_id="fig5_convergence", sweep_param="noise_variance",
                 sweep=(0.01,), trials=100, methods=("lms_direct", "compressive")),
    "fig6": dict(_BASELINE, experiment_id="fig6_curves", sweep_param="noise_variance",
                 sweep=(0.01,), trials=50, methods=("lms_direct", "za_lms_direct", "compressive")),
    "fig7": dict(_BASELINE, experiment_id="fig7_sparsity_sweep", sweep_param="k",
                 sweep=(10, 20, 30, 40, 50), trials=50, methods=METHODS),
}


def _coerce(name, value):
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    if name not in fields:
        raise ConfigError(f"unknown config key {name!r}")
    default = fields[name].default
    try:
        if isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                value = [value]
            return tuple(value)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise TypeError
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {value!r}") from None


def make_config(preset: Optional[str] = None, **overrides) -> ExperimentConfig:
    base = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        base = dict(PRESETS[preset])
    base.update(overrides)
    values = {k: _coerce(k, v) for k, v in base.items()}
    if "sweep" in values and values.get("sweep_param", ExperimentConfig.sweep_param) in ("k", "q", "L", "N"):
        values["sweep"] = tuple(int(v) for v in values["sweep"])
    return ExperimentConfig(**values).validate()


def load_config(path=None, preset: Optional[str] = None, **overrides) -> ExperimentConfig:
    """Read a YAML config (optional) and apply a preset and CLI overrides.

    Precedence, lowest first: dataclass defaults, preset (from the file's
    ``preset`` key or the argument), file keys, ``overrides``.
    """
    doc = {}
    if path is not None:
        try:
            doc = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} must be a key-value mapping")
        version = doc.pop("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ConfigError(f"unsupported config format_version {version}")
        rng_algorithm = doc.pop("rng_algorithm", RNG_ALGORITHM)
        if rng_algorithm != RNG_ALGORITHM:
            raise ConfigError(f"config was produced with {rng_algorithm}, this build uses {RNG_ALGORITHM}")
        file_preset = doc.pop("preset", None)
        preset = preset or file_preset
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return make_config(preset, **doc)
